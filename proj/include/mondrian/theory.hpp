#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mondrian/geometry.hpp"
#include "mondrian/quadrature.hpp"

namespace mondrian {

class ModelParams {
public:
    ModelParams(Weight p, double t);
    Weight p() const { return p_; }
    double t() const { return t_; }

private:
    Weight p_;
    double t_;
};

struct RectMoments {
    double mean_sigma_lambda;
    double mean_sigma_one;
    double var_sigma_lambda;
    double var_sigma_one;
    double cov;
};

// Moments of the edge count and weighted length on [-a,a] x [-b,b].
RectMoments moments_rect(const ModelParams& mp, double a, double b);
// Second-order displays with the direction weights inside the g-terms and
// without the correction. Kept for comparison only; Monte Carlo rejects them.
RectMoments moments_rect_uncorrected(const ModelParams& mp, double a, double b);

struct VarianceAsymptotics {
    double var_sigma_lambda;
    double var_sigma_one;
    double cov;
};

// Leading terms on the square [-r,r]^2 implied by moments_rect.
VarianceAsymptotics variance_asymptotics(const ModelParams& mp, double r);
// Leading terms with the constant 4 instead of 16.
VarianceAsymptotics variance_asymptotics_uncorrected(const ModelParams& mp, double r);

enum class PcfKind {
    Edge,
    Cross,
    Vertex,
    IsoEdge,
    IsoCross,
    IsoVertex,
    PoissonEdge,
    PoissonCross,
    PoissonVertex
};

std::string to_string(PcfKind kind);
PcfKind pcf_kind_from_string(const std::string& name);

class PcfCurve {
public:
    PcfCurve(PcfKind kind, std::vector<double> r_grid, std::vector<double> values);
    PcfKind kind() const { return kind_; }
    const std::vector<double>& r_grid() const { return r_; }
    const std::vector<double>& values() const { return v_; }

private:
    PcfKind kind_;
    std::vector<double> r_, v_;
};

// Mondrian correlation functions normalised by the true intensities
// (vertices 2t^2 p(1-p), edge length t). Relative to the uncorrected
// forms, the vertex excess is divided by 4 and the cross excess by 2.
double pcf_edge(const ModelParams& mp, double r);
double pcf_cross(const ModelParams& mp, double r);
double pcf_vertex(const ModelParams& mp, double r);
double baseline_pcf(PcfKind kind, const ModelParams& mp, double r);
double pcf(PcfKind kind, const ModelParams& mp, double r);
// Uncorrected forms (edge, cross, vertex only); diagnostics.
double pcf_uncorrected(PcfKind kind, const ModelParams& mp, double r);
// r * (g(r) - 1), bounded as r -> 0.
double pcf_excess_scaled(PcfKind kind, const ModelParams& mp, double r);
PcfCurve pcf_curve(PcfKind kind, const ModelParams& mp, const std::vector<double>& r_grid);

// Building blocks of the pcfs, stable near 0:
//   expo_kernel(a) = 1 - e^{-a}
//   cross_kernel(a) = 1 - e^{-a}/2 - (1 - e^{-a})/(2a)
//   vertex_kernel(a) = 2 - 2/a + 1/a^2 - e^{-a}(1/2 - 1/a + 1/a^2)
double expo_kernel(double a);
double cross_kernel(double a);
double vertex_kernel(double a);

// K(r) = int_0^r 2p(1-p) s g(s) ds.
double k_from_pcf(const ModelParams& mp, PcfKind kind, double r, const QuadOptions& opts = {});
double k_from_pcf_uncorrected(const ModelParams& mp, PcfKind kind, double r, const QuadOptions& opts = {});
double k_from_pcf(const ModelParams& mp, const std::function<double(double)>& s_times_g, double r,
                  const QuadOptions& opts = {});

double point_intersection_measure(const ModelParams& mp, double area);

// Measure of {(x,y) in [0,|z|]^2 : y - x in [0,u]}.
double segment_pair_overlap(double z, double u);

// I^j(f; t) = 1/(j-1)! int_0^t (t-s)^{j-1} f(s) ds with f(s) = s^2 e^{-sq}.
double I_closed(int j, double q, double t);
// int_y^inf z^k I^j(s^2 e^{-sqz}; t) dz for k in {0,1}; diverges for k >= 2.
double I_tail(int j, int k, double q, double t, double y);

}  // namespace mondrian
