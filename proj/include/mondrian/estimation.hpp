#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mondrian/sampler.hpp"
#include "mondrian/theory.hpp"

namespace mondrian {

struct McConfig {
    Rect window;
    SimParams params;  // p and t; the seed field is unused, replicates derive from master_seed
    std::size_t n_replicates = 2;
    std::vector<double> r_grid;
    double delta = 0.0;  // 0 selects min(p,1-p) * min(r_grid) / 10
    std::uint64_t master_seed = 0;
    std::size_t bootstrap_resamples = 1000;
    int threads = 0;  // 0: MONDRIAN_THREADS or the OpenMP default
    std::size_t cell_cap = 10'000'000;
};

// Throws std::invalid_argument naming the violated constraint.
void validate(const McConfig& cfg, bool needs_grid);
double effective_delta(const McConfig& cfg);

// Worker count: requested (or MONDRIAN_THREADS, or the OpenMP default when
// 0), capped by MONDRIAN_THREADS when that is set.
int resolve_threads(int requested);

struct StatLine {
    std::string name;
    double estimate;
    double se;
    double theory;
    double z;
};

struct MomentReport {
    std::size_t n_replicates;
    RectMoments theory;
    RectMoments theory_uncorrected;
    std::vector<StatLine> stats;            // against moments_rect
    std::vector<StatLine> stats_uncorrected;  // same estimates against moments_rect_uncorrected
    std::vector<StatLine> stats_swapped;    // horizontal edges weighted by p instead of 1-p
};

MomentReport mc_moments(const McConfig& cfg);

struct WeightedPoint {
    double x, y, w;
};

// Ordered pairs (a, b) with b - a in R_{r,p} = [0,(1-p)r] x [0,pr], each
// weighted w_a w_b / |W ∩ (W - (b - a))|, accumulated cumulatively over the
// r grid. With same_set the self-pair a = b is skipped.
struct PairQuery {
    Rect window;
    Weight p;
    std::vector<double> r_grid;
};

std::vector<double> pair_sums_bruteforce(const PairQuery& q, std::span<const WeightedPoint> anchors,
                                         std::span<const WeightedPoint> targets, bool same_set);
// Grid-indexed kernel. Anchors are processed in fixed chunks whose partial
// histograms are added in chunk order, so the result does not depend on the
// thread count.
std::vector<double> pair_sums_grid(const PairQuery& q, std::span<const WeightedPoint> anchors,
                                   std::span<const WeightedPoint> targets, bool same_set, int threads = 1);

enum class KKind { Vertex, Edge, Cross };
std::string to_string(KKind kind);
KKind k_kind_from_string(const std::string& name);
PcfKind pcf_kind_of(KKind kind);

struct ReplicateSums {
    std::vector<double> sums;  // translation-corrected pair sums, cumulative in r
    double norm = 0.0;         // estimate of the squared intensity product
    bool degenerate = false;
};

ReplicateSums replicate_sums(KKind kind, const PairQuery& q, std::span<const WeightedPoint> vertices,
                             std::span<const WeightedPoint> skeleton, int threads = 1);

// Two normalisations of the same pair sums S_i(r):
//   k       = mean_i S_i / (lambda_a lambda_b) with the model intensities,
//             unbiased; se is the standard error of that mean.
//   k_ratio = sum_i S_i / sum_i D_i with D_i the per-replicate intensity
//             estimate; biased low when intensity estimates fluctuate.
struct KReport {
    KKind kind;
    double p = 0.5;
    double t = 1.0;
    double intensity_product = 1.0;
    std::vector<double> r_grid;
    std::vector<double> k;
    std::vector<double> se;
    std::vector<double> spread;  // SD of per-replicate S_i / intensity_product
    std::vector<double> k_ratio;
    std::vector<double> se_ratio;  // delta method
    std::vector<double> theory;    // filled by attach_theory
    std::vector<double> z;
    std::vector<double> z_ratio;
    std::vector<std::vector<double>> replicate_s;
    std::vector<double> replicate_d;
    std::size_t degenerate_replicates = 0;
    std::string normalization;
};

KReport pool_replicates(KKind kind, Weight p, double t, const std::vector<double>& r_grid,
                        const std::vector<ReplicateSums>& reps, double intensity_product);
void attach_theory(KReport& report, const std::vector<double>& theory);

// Intensities of the stationary processes: vertices 2 t^2 p(1-p) (two
// interior endpoints per maximal edge), edge length t.
double vertex_intensity(const ModelParams& mp);
double edge_intensity(const ModelParams& mp);
double intensity_product(KKind kind, const ModelParams& mp);

std::vector<KReport> k_functions(const McConfig& cfg, const std::vector<KKind>& kinds);
KReport k_vertex(const McConfig& cfg);
KReport k_edge(const McConfig& cfg);
KReport k_cross(const McConfig& cfg);

struct PcfEstimate {
    PcfCurve curve;
    std::vector<double> se;
    std::string warning;
};

// Local-linear slope of K over [r - h, r + h], divided by 2p(1-p)r; reported
// at grid points whose window lies inside the grid.
PcfEstimate pcf_estimate(const KReport& report, double bandwidth);

}  // namespace mondrian
