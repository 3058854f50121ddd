#include "mondrian/theory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mondrian/special.hpp"

namespace mondrian {

ModelParams::ModelParams(Weight p, double t) : p_(p), t_(t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("t must be finite and > 0");
}

namespace {

void check_ab(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("half-widths a, b must be > 0");
}

void check_r(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::domain_error("pcf argument r must be > 0");
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

RectMoments moments_rect(const ModelParams& mp, double a, double b) {
    check_ab(a, b);
    const double p = mp.p().value(), q = mp.p().complement(), t = mp.t();
    const double xa = 2.0 * a * t * q, xb = 2.0 * b * t * p;
    RectMoments m{};
    m.mean_sigma_lambda = 8.0 * t * p * q * a * b;
    m.mean_sigma_one = 4.0 * t * t * p * q * a * b + 2.0 * t * (p * b + q * a);
    m.var_sigma_lambda = -8.0 * a * b * p * q * (g1(xa) + g1(xb));
    m.var_sigma_one = 2.0 * t * b * p + 2.0 * t * a * q + 12.0 * a * b * t * t * p * q -
                      16.0 * a * b * t * t * p * q * (g2(xa) + g2(xb));
    m.cov = 8.0 * t * a * b * p * q * (1.0 - g3(xa) - g3(xb));
    return m;
}

RectMoments moments_rect_uncorrected(const ModelParams& mp, double a, double b) {
    check_ab(a, b);
    const double p = mp.p().value(), q = mp.p().complement(), t = mp.t();
    const double xa = 2.0 * a * t * q, xb = 2.0 * b * t * p;
    RectMoments m{};
    m.mean_sigma_lambda = 8.0 * t * p * q * a * b;
    m.mean_sigma_one = 4.0 * t * t * p * q * a * b + 2.0 * t * (p * b + q * a);
    m.var_sigma_lambda = -8.0 * a * b * p * q * (q * g1(xa) + p * g1(xb));
    m.var_sigma_one = 2.0 * t * b * p + 2.0 * t * a * q + 12.0 * a * b * t * t * p * q +
                      16.0 * a * b * t * t * p * q * (q * g2(xa) + p * g2(xb));
    m.cov = 8.0 * t * a * b * p * q * (1.0 - (q * g3(xa) + p * g3(xb)));
    return m;
}

VarianceAsymptotics variance_asymptotics(const ModelParams& mp, double r) {
    if (!(r > 1.0)) throw std::invalid_argument("asymptotics need r > 1");
    const double base = 16.0 * mp.p().value() * mp.p().complement() * r * r * std::log(r);
    return {base, mp.t() * mp.t() * base, mp.t() * base};
}

VarianceAsymptotics variance_asymptotics_uncorrected(const ModelParams& mp, double r) {
    if (!(r > 1.0)) throw std::invalid_argument("asymptotics need r > 1");
    const double base = 4.0 * mp.p().value() * mp.p().complement() * r * r * std::log(r);
    return {base, mp.t() * mp.t() * base, mp.t() * base};
}

std::string to_string(PcfKind kind) {
    switch (kind) {
        case PcfKind::Edge: return "edge";
        case PcfKind::Cross: return "cross";
        case PcfKind::Vertex: return "vertex";
        case PcfKind::IsoEdge: return "iso_edge";
        case PcfKind::IsoCross: return "iso_cross";
        case PcfKind::IsoVertex: return "iso_vertex";
        case PcfKind::PoissonEdge: return "poisson_edge";
        case PcfKind::PoissonCross: return "poisson_cross";
        case PcfKind::PoissonVertex: return "poisson_vertex";
    }
    throw std::logic_error("unknown pcf kind");
}

PcfKind pcf_kind_from_string(const std::string& name) {
    for (auto k : {PcfKind::Edge, PcfKind::Cross, PcfKind::Vertex, PcfKind::IsoEdge, PcfKind::IsoCross,
                   PcfKind::IsoVertex, PcfKind::PoissonEdge, PcfKind::PoissonCross,
                   PcfKind::PoissonVertex})
        if (to_string(k) == name) return k;
    throw std::invalid_argument("unknown pcf kind '" + name + "'");
}

PcfCurve::PcfCurve(PcfKind kind, std::vector<double> r_grid, std::vector<double> values)
    : kind_(kind), r_(std::move(r_grid)), v_(std::move(values)) {
    if (r_.size() != v_.size()) throw std::invalid_argument("pcf curve: grid and values differ in size");
    for (std::size_t i = 0; i < r_.size(); ++i) {
        if (!(r_[i] > 0.0)) throw std::invalid_argument("pcf curve: grid entries must be > 0");
        if (i > 0 && !(r_[i - 1] < r_[i]))
            throw std::invalid_argument("pcf curve: grid must be strictly increasing");
        if (!std::isfinite(v_[i])) throw std::invalid_argument("pcf curve: values must be finite");
    }
}

double expo_kernel(double a) { return -std::expm1(-a); }

double cross_kernel(double a) {
    if (a < 1.0) {
        double fact = 1.0, power = 1.0, sum = 0.0;
        for (int m = 1; m < 30; ++m) {
            power *= a;
            fact *= m;
            const double term = power * (0.5 / fact + 0.5 / (fact * (m + 1)));
            sum += (m % 2 ? term : -term);
        }
        return sum;
    }
    const double e = std::exp(-a);
    return 1.0 - 0.5 * e + 0.5 * std::expm1(-a) / a;
}

double vertex_kernel(double a) {
    if (a < 1.0) {
        double fact = 1.0, power = 1.0, sum = 0.0;
        for (int m = 1; m < 30; ++m) {
            power *= a;
            fact *= m;
            const double term = power * (0.5 / fact + 1.0 / (fact * (m + 1)) + 1.0 / (fact * (m + 1) * (m + 2)));
            sum += (m % 2 ? term : -term);
        }
        return sum;
    }
    const double ia = 1.0 / a;
    return 2.0 - 2.0 * ia + ia * ia - std::exp(-a) * (0.5 - ia + ia * ia);
}

namespace {

// Factor between the uncorrected excess and the intensity-consistent one.
double uncorrected_excess_factor(PcfKind kind) {
    switch (kind) {
        case PcfKind::Vertex: return 4.0;
        case PcfKind::Cross: return 2.0;
        case PcfKind::Edge: return 1.0;
        default: throw std::invalid_argument("only edge, cross and vertex have uncorrected variants");
    }
}

double excess_scaled_uncorrected(PcfKind kind, const ModelParams& mp, double r) {
    const double p = mp.p().value(), q = mp.p().complement(), t = mp.t();
    const double a = t * r * p * p, b = t * r * q * q;
    const double c = 2.0 / std::numbers::pi * t * r;
    switch (kind) {
        case PcfKind::Edge:
            return (expo_kernel(a) / (p * p) + expo_kernel(b) / (q * q)) / (2.0 * t * t * r);
        case PcfKind::Cross:
            return (cross_kernel(a) / p + cross_kernel(b) / q) / (t * t * r * p * q);
        case PcfKind::Vertex:
            return (vertex_kernel(a) + vertex_kernel(b)) / (t * t * r * p * p * q * q);
        case PcfKind::IsoEdge: return expo_kernel(c) / (2.0 * t * t * r);
        case PcfKind::IsoCross: return cross_kernel(c) / (t * t * r);
        case PcfKind::IsoVertex: return vertex_kernel(c) / (t * t * r);
        case PcfKind::PoissonEdge: return 1.0 / t;
        case PcfKind::PoissonCross: return 1.0 / (4.0 * t * p * q);
        case PcfKind::PoissonVertex: return 1.0 / (2.0 * t * p * p * q * q);
    }
    throw std::logic_error("unknown pcf kind");
}

}  // namespace

double pcf_excess_scaled(PcfKind kind, const ModelParams& mp, double r) {
    check_r(r);
    const double v = excess_scaled_uncorrected(kind, mp, r);
    if (kind == PcfKind::Vertex || kind == PcfKind::Cross) return v / uncorrected_excess_factor(kind);
    return v;
}

double pcf_uncorrected(PcfKind kind, const ModelParams& mp, double r) {
    check_r(r);
    (void)uncorrected_excess_factor(kind);
    return 1.0 + excess_scaled_uncorrected(kind, mp, r) / r;
}

double pcf(PcfKind kind, const ModelParams& mp, double r) {
    return 1.0 + pcf_excess_scaled(kind, mp, r) / r;
}

double pcf_edge(const ModelParams& mp, double r) { return pcf(PcfKind::Edge, mp, r); }
double pcf_cross(const ModelParams& mp, double r) { return pcf(PcfKind::Cross, mp, r); }
double pcf_vertex(const ModelParams& mp, double r) { return pcf(PcfKind::Vertex, mp, r); }

double baseline_pcf(PcfKind kind, const ModelParams& mp, double r) {
    if (kind == PcfKind::Edge || kind == PcfKind::Cross || kind == PcfKind::Vertex)
        throw std::invalid_argument("baseline_pcf needs an iso_* or poisson_* kind");
    return pcf(kind, mp, r);
}

PcfCurve pcf_curve(PcfKind kind, const ModelParams& mp, const std::vector<double>& r_grid) {
    std::vector<double> v;
    v.reserve(r_grid.size());
    for (double r : r_grid) v.push_back(pcf(kind, mp, r));
    return PcfCurve(kind, r_grid, std::move(v));
}

namespace {
// The excess scales like 1/t, so a purely absolute target is unreachable for small t.
constexpr double kKRelTol = 1e-12;
}  // namespace

double k_from_pcf(const ModelParams& mp, const std::function<double(double)>& s_times_g, double r,
                  const QuadOptions& opts) {
    check_r(r);
    const double w = 2.0 * mp.p().value() * mp.p().complement();
    QuadOptions o = opts;
    o.abs_tol = opts.abs_tol / w;
    o.rel_tol = std::max(opts.rel_tol, kKRelTol);
    return w * integrate(s_times_g, 0.0, r, o);
}

double k_from_pcf(const ModelParams& mp, PcfKind kind, double r, const QuadOptions& opts) {
    check_r(r);
    const double w = 2.0 * mp.p().value() * mp.p().complement();
    // The linear part integrates exactly; only the bounded excess needs quadrature.
    QuadOptions o = opts;
    o.abs_tol = opts.abs_tol / w;
    o.rel_tol = std::max(opts.rel_tol, kKRelTol);
    const double excess =
        integrate([&](double s) { return pcf_excess_scaled(kind, mp, s); }, 0.0, r, o);
    return w * (0.5 * r * r + excess);
}

double k_from_pcf_uncorrected(const ModelParams& mp, PcfKind kind, double r, const QuadOptions& opts) {
    const double f = uncorrected_excess_factor(kind);
    const double w = 2.0 * mp.p().value() * mp.p().complement();
    const double base = k_from_pcf(mp, kind, r, opts);
    return 0.5 * w * r * r + f * (base - 0.5 * w * r * r);
}

double point_intersection_measure(const ModelParams& mp, double area) {
    if (!(area >= 0.0)) throw std::invalid_argument("area must be >= 0");
    return 2.0 * mp.p().value() * mp.p().complement() * area;
}

double segment_pair_overlap(double z, double u) {
    if (!(u > 0.0)) throw std::invalid_argument("segment_pair_overlap needs u > 0");
    const double az = std::abs(z);
    return az >= u ? az * u - 0.5 * u * u : 0.5 * z * z;
}

namespace {

void check_j(int j) {
    if (j < 1 || j > 3) throw std::domain_error("I_closed/I_tail: j must be 1, 2 or 3");
}

// sum_n (-x)^n c(n) with c(n) = weight(n) / (shift + n)!
template <class W>
double alt_series(double x, int shift, W weight) {
    double sum = 0.0, power = 1.0;
    double inv_fact = 1.0 / factorial(shift);
    for (int n = 0; n < 60; ++n) {
        const double term = power * weight(n) * inv_fact;
        sum += term;
        if (n > 2 && std::abs(term) < 1e-18 * std::abs(sum)) break;
        power *= -x;
        inv_fact /= (shift + n + 1);
    }
    return sum;
}

}  // namespace

double I_closed(int j, double q, double t) {
    check_j(j);
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("I_closed: q must lie in [0,1]");
    if (!(t > 0.0)) throw std::domain_error("I_closed: t must be > 0");
    const double x = q * t;
    if (x < 2.0)
        return std::pow(t, j + 2) *
               alt_series(x, j + 2, [](int n) { return static_cast<double>((n + 1) * (n + 2)); });
    double sum = 0.0;
    for (int r = 0; r <= j - 1; ++r) {
        const double sign = ((r + j + 1) % 2) ? -1.0 : 1.0;
        sum += sign * std::pow(x, r) * factorial(j + 1 - r) / (factorial(j - 1 - r) * factorial(r));
    }
    const double sj = (j % 2) ? -1.0 : 1.0;
    sum += sj * std::exp(-x) * (x * (x + 2.0 * j) + j * (j + 1.0));
    return sum / std::pow(q, j + 2);
}

double I_tail(int j, int k, double q, double t, double y) {
    check_j(j);
    if (k != 0 && k != 1)
        throw std::domain_error("I_tail: k must be 0 or 1 (the integral diverges for k >= 2)");
    if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("I_tail: q must lie in (0,1]");
    if (!(t > 0.0)) throw std::domain_error("I_tail: t must be > 0");
    if (!(y > 0.0)) throw std::domain_error("I_tail: y must be > 0");
    const double x = q * y * t;
    if (x < 2.0) {
        const double s1 =
            alt_series(x, j + 1, [](int n) { return static_cast<double>(n + 1); });
        if (k == 0) return std::pow(t, j + 1) * s1 / q;
        const double s0 = alt_series(x, j, [](int) { return 1.0; });
        return y / q * std::pow(t, j + 1) * s1 + std::pow(t, j) * s0 / (q * q);
    }
    double sum = 0.0;
    for (int r = 0; r <= j - 1; ++r) {
        const double sign = (r % 2) ? -1.0 : 1.0;
        sum += sign * (k + j - r) / factorial(r) * std::pow(x, r);
    }
    sum *= ((j + 1) % 2) ? -1.0 : 1.0;
    sum += ((j % 2) ? -1.0 : 1.0) * std::exp(-x) * ((k + j) + x);
    return sum / (std::pow(y, j + 1 - k) * std::pow(q, 2 + j));
}

}  // namespace mondrian
