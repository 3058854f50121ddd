#include "mondrian/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <stdexcept>

#include <omp.h>

#include "mondrian/functionals.hpp"
#include "mondrian/rng.hpp"

namespace mondrian {

namespace {

constexpr std::size_t kAnchorChunk = 512;
constexpr std::uint64_t kBootstrapTag = 0x626f6f7473747270ULL;

// Runs body(i) for i in [0, n) on `threads` workers; rethrows the exception
// of the lowest failing index.
template <class Body>
void parallel_indexed(std::size_t n, int threads, Body body) {
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

int resolve_threads(int requested) {
    int cap = 0;
    if (const char* env = std::getenv("MONDRIAN_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw std::invalid_argument("MONDRIAN_THREADS must be a positive integer");
        cap = static_cast<int>(v);
    }
    int n = requested > 0 ? requested : (cap > 0 ? cap : omp_get_max_threads());
    if (cap > 0) n = std::min(n, cap);
    return std::max(n, 1);
}

double effective_delta(const McConfig& cfg) {
    if (cfg.delta > 0.0) return cfg.delta;
    const double p = cfg.params.p().value();
    return std::min(p, 1.0 - p) * *std::min_element(cfg.r_grid.begin(), cfg.r_grid.end()) / 10.0;
}

void validate(const McConfig& cfg, bool needs_grid) {
    if (cfg.n_replicates < 2) throw std::invalid_argument("n_replicates must be >= 2");
    if (cfg.delta < 0.0 || !std::isfinite(cfg.delta))
        throw std::invalid_argument("delta must be > 0 (or 0 for the default)");
    if (cfg.bootstrap_resamples < 2) throw std::invalid_argument("bootstrap_resamples must be >= 2");
    if (!needs_grid) return;
    if (cfg.r_grid.empty()) throw std::invalid_argument("r grid is empty");
    for (std::size_t i = 0; i < cfg.r_grid.size(); ++i) {
        if (!(cfg.r_grid[i] > 0.0) || !std::isfinite(cfg.r_grid[i]))
            throw std::invalid_argument("r grid entries must be finite and > 0");
        if (i > 0 && !(cfg.r_grid[i - 1] < cfg.r_grid[i]))
            throw std::invalid_argument("r grid must be strictly increasing");
    }
    const double p = cfg.params.p().value();
    if (!(cfg.r_grid.back() * std::max(p, 1.0 - p) < cfg.window.min_extent()))
        throw std::invalid_argument(
            "largest r times max(p,1-p) must be below the smallest window extent");
}

MomentReport mc_moments(const McConfig& cfg) {
    validate(cfg, false);
    const std::size_t n = cfg.n_replicates;
    const int threads = resolve_threads(cfg.threads);
    std::vector<double> one(n), lam(n), swp(n);
    parallel_indexed(n, threads, [&](std::size_t i) {
        const SimParams sp(cfg.params.p(), cfg.params.t(), derive_seed(cfg.master_seed, i));
        const Tessellation tess = sample(cfg.window, sp, {cfg.cell_cap});
        one[i] = static_cast<double>(sigma_one(tess));
        lam[i] = sigma_lambda(tess);
        swp[i] = sigma_lambda_swapped(tess);
    });

    // Statistics: mean L, mean 1, var L, var 1, cov, mean swapped, var swapped.
    auto stats_of = [&](auto&& idx) {
        double s1 = 0, sl = 0, ss = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i = idx(k);
            s1 += one[i];
            sl += lam[i];
            ss += swp[i];
        }
        const double dn = static_cast<double>(n);
        const double m1 = s1 / dn, ml = sl / dn, ms = ss / dn;
        double v1 = 0, vl = 0, c = 0, vs = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i = idx(k);
            v1 += (one[i] - m1) * (one[i] - m1);
            vl += (lam[i] - ml) * (lam[i] - ml);
            vs += (swp[i] - ms) * (swp[i] - ms);
            c += (one[i] - m1) * (lam[i] - ml);
        }
        return std::array<double, 7>{ml, m1, vl / (dn - 1), v1 / (dn - 1), c / (dn - 1), ms, vs / (dn - 1)};
    };
    const auto point = stats_of([](std::size_t k) { return k; });

    const std::size_t B = cfg.bootstrap_resamples;
    std::vector<std::array<double, 7>> boot(B);
    const std::uint64_t boot_seed = mix64(cfg.master_seed ^ kBootstrapTag);
    parallel_indexed(B, threads, [&](std::size_t b) {
        Rng rng(derive_seed(boot_seed, b));
        std::vector<std::size_t> pick(n);
        for (auto& v : pick) v = static_cast<std::size_t>(rng.below(n));
        boot[b] = stats_of([&](std::size_t k) { return pick[k]; });
    });
    std::array<double, 7> se{};
    for (int s = 0; s < 7; ++s) {
        double m = 0;
        for (const auto& x : boot) m += x[s];
        m /= static_cast<double>(B);
        double v = 0;
        for (const auto& x : boot) v += (x[s] - m) * (x[s] - m);
        se[s] = std::sqrt(v / static_cast<double>(B - 1));
    }

    const ModelParams mp(cfg.params.p(), cfg.params.t());
    const double a = cfg.window.width() / 2.0, b = cfg.window.height() / 2.0;
    MomentReport rep{n, moments_rect(mp, a, b), moments_rect_uncorrected(mp, a, b), {}, {}, {}};
    auto line = [&](const char* name, int s, double theory) {
        return StatLine{name, point[s], se[s], theory, (point[s] - theory) / se[s]};
    };
    auto fill = [&](std::vector<StatLine>& out, const RectMoments& th) {
        out = {line("mean_sigma_lambda", 0, th.mean_sigma_lambda), line("mean_sigma_one", 1, th.mean_sigma_one),
               line("var_sigma_lambda", 2, th.var_sigma_lambda), line("var_sigma_one", 3, th.var_sigma_one),
               line("cov", 4, th.cov)};
    };
    fill(rep.stats, rep.theory);
    fill(rep.stats_uncorrected, rep.theory_uncorrected);
    rep.stats_swapped = {line("mean_sigma_lambda", 5, rep.theory.mean_sigma_lambda),
                         line("var_sigma_lambda", 6, rep.theory.var_sigma_lambda)};
    return rep;
}

std::vector<double> pair_sums_bruteforce(const PairQuery& q, std::span<const WeightedPoint> anchors,
                                         std::span<const WeightedPoint> targets, bool same_set) {
    const double p = q.p.value(), c = q.p.complement();
    const auto& grid = q.r_grid;
    std::vector<double> hist(grid.size(), 0.0);
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        for (std::size_t j = 0; j < targets.size(); ++j) {
            if (same_set && i == j) continue;
            const double hx = targets[j].x - anchors[i].x, hy = targets[j].y - anchors[i].y;
            if (hx < 0.0 || hy < 0.0) continue;
            const double rstar = std::max(hx / c, hy / p);
            const auto bin = std::lower_bound(grid.begin(), grid.end(), rstar) - grid.begin();
            if (bin == static_cast<std::ptrdiff_t>(grid.size())) continue;
            hist[bin] += anchors[i].w * targets[j].w / rect_translation_overlap(q.window, hx, hy);
        }
    }
    for (std::size_t k = 1; k < hist.size(); ++k) hist[k] += hist[k - 1];
    return hist;
}

std::vector<double> pair_sums_grid(const PairQuery& q, std::span<const WeightedPoint> anchors,
                                   std::span<const WeightedPoint> targets, bool same_set, int threads) {
    const double p = q.p.value(), c = q.p.complement();
    const auto& grid = q.r_grid;
    const std::size_t nb = grid.size();
    if (anchors.empty() || targets.empty()) return std::vector<double>(nb, 0.0);

    const Rect& w = q.window;
    const double cell = std::max(p, c) * grid.back();
    const auto nx = static_cast<std::ptrdiff_t>(std::max(1.0, std::ceil(w.width() / cell)));
    const auto ny = static_cast<std::ptrdiff_t>(std::max(1.0, std::ceil(w.height() / cell)));
    auto cx = [&](double x) {
        return std::clamp(static_cast<std::ptrdiff_t>(std::floor((x - w.x_min()) / cell)), std::ptrdiff_t{0}, nx - 1);
    };
    auto cy = [&](double y) {
        return std::clamp(static_cast<std::ptrdiff_t>(std::floor((y - w.y_min()) / cell)), std::ptrdiff_t{0}, ny - 1);
    };
    // Bucket targets by cell, keeping index order inside each bucket.
    std::vector<std::size_t> start(static_cast<std::size_t>(nx * ny) + 1, 0);
    std::vector<std::size_t> cell_of(targets.size());
    for (std::size_t j = 0; j < targets.size(); ++j) {
        cell_of[j] = static_cast<std::size_t>(cy(targets[j].y) * nx + cx(targets[j].x));
        ++start[cell_of[j] + 1];
    }
    for (std::size_t k = 1; k < start.size(); ++k) start[k] += start[k - 1];
    std::vector<std::size_t> order(targets.size());
    {
        std::vector<std::size_t> fill(start.begin(), start.end() - 1);
        for (std::size_t j = 0; j < targets.size(); ++j) order[fill[cell_of[j]]++] = j;
    }

    const std::size_t n_chunks = (anchors.size() + kAnchorChunk - 1) / kAnchorChunk;
    std::vector<std::vector<double>> partial(n_chunks, std::vector<double>(nb, 0.0));
    auto run_chunk = [&](std::size_t ch) {
        auto& hist = partial[ch];
        const std::size_t end = std::min(anchors.size(), (ch + 1) * kAnchorChunk);
        for (std::size_t i = ch * kAnchorChunk; i < end; ++i) {
            const WeightedPoint& a = anchors[i];
            const std::ptrdiff_t ix = cx(a.x), iy = cy(a.y);
            for (std::ptrdiff_t gy = iy; gy <= std::min(iy + 1, ny - 1); ++gy) {
                for (std::ptrdiff_t gx = ix; gx <= std::min(ix + 1, nx - 1); ++gx) {
                    const auto g = static_cast<std::size_t>(gy * nx + gx);
                    for (std::size_t k = start[g]; k < start[g + 1]; ++k) {
                        const std::size_t j = order[k];
                        if (same_set && i == j) continue;
                        const double hx = targets[j].x - a.x, hy = targets[j].y - a.y;
                        if (hx < 0.0 || hy < 0.0) continue;
                        const double rstar = std::max(hx / c, hy / p);
                        if (rstar > grid.back()) continue;
                        const auto bin = std::lower_bound(grid.begin(), grid.end(), rstar) - grid.begin();
                        hist[bin] += a.w * targets[j].w / rect_translation_overlap(w, hx, hy);
                    }
                }
            }
        }
    };
    if (threads <= 1 || n_chunks == 1) {
        for (std::size_t ch = 0; ch < n_chunks; ++ch) run_chunk(ch);
    } else {
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (std::ptrdiff_t ch = 0; ch < static_cast<std::ptrdiff_t>(n_chunks); ++ch)
            run_chunk(static_cast<std::size_t>(ch));
    }
    std::vector<double> hist(nb, 0.0);
    for (const auto& part : partial)
        for (std::size_t k = 0; k < nb; ++k) hist[k] += part[k];
    for (std::size_t k = 1; k < nb; ++k) hist[k] += hist[k - 1];
    return hist;
}

std::string to_string(KKind kind) {
    switch (kind) {
        case KKind::Vertex: return "vertex";
        case KKind::Edge: return "edge";
        case KKind::Cross: return "cross";
    }
    throw std::logic_error("unknown K kind");
}

KKind k_kind_from_string(const std::string& name) {
    for (auto k : {KKind::Vertex, KKind::Edge, KKind::Cross})
        if (to_string(k) == name) return k;
    throw std::invalid_argument("unknown K kind '" + name + "' (expected vertex, edge or cross)");
}

PcfKind pcf_kind_of(KKind kind) {
    switch (kind) {
        case KKind::Vertex: return PcfKind::Vertex;
        case KKind::Edge: return PcfKind::Edge;
        case KKind::Cross: return PcfKind::Cross;
    }
    throw std::logic_error("unknown K kind");
}

ReplicateSums replicate_sums(KKind kind, const PairQuery& q, std::span<const WeightedPoint> vertices,
                             std::span<const WeightedPoint> skeleton, int threads) {
    const double area = q.window.area();
    ReplicateSums out;
    double norm_pairs = 0.0;
    switch (kind) {
        case KKind::Vertex: {
            const auto n = static_cast<double>(vertices.size());
            out.degenerate = vertices.size() < 2;
            norm_pairs = n * (n - 1.0);
            break;
        }
        case KKind::Edge: {
            double len = 0.0, sq = 0.0;
            for (const auto& s : skeleton) {
                len += s.w;
                sq += s.w * s.w;
            }
            out.degenerate = skeleton.size() < 2;
            norm_pairs = len * len - sq;
            break;
        }
        case KKind::Cross: {
            double len = 0.0;
            for (const auto& s : skeleton) len += s.w;
            out.degenerate = vertices.empty() || skeleton.empty();
            norm_pairs = static_cast<double>(vertices.size()) * len;
            break;
        }
    }
    out.norm = out.degenerate ? 0.0 : norm_pairs / (area * area);
    if (out.degenerate) {
        out.sums.assign(q.r_grid.size(), 0.0);
        return out;
    }
    switch (kind) {
        case KKind::Vertex: out.sums = pair_sums_grid(q, vertices, vertices, true, threads); break;
        case KKind::Edge: out.sums = pair_sums_grid(q, skeleton, skeleton, true, threads); break;
        case KKind::Cross: out.sums = pair_sums_grid(q, vertices, skeleton, false, threads); break;
    }
    return out;
}

KReport pool_replicates(KKind kind, Weight p, double t, const std::vector<double>& r_grid,
                        const std::vector<ReplicateSums>& reps, double intensity_product) {
    if (reps.size() < 2) throw std::invalid_argument("pooling needs at least 2 replicates");
    if (!(intensity_product > 0.0)) throw std::invalid_argument("intensity product must be > 0");
    const std::size_t nb = r_grid.size();
    const auto n = static_cast<double>(reps.size());
    KReport rep;
    rep.kind = kind;
    rep.p = p.value();
    rep.t = t;
    rep.intensity_product = intensity_product;
    rep.r_grid = r_grid;
    rep.normalization =
        "k: mean over replicates of the translation-corrected pair sum divided by the model intensity "
        "product; k_ratio: pooled sum of pair sums over pooled per-replicate intensity-product estimates";
    double dsum = 0.0;
    for (const auto& r : reps) {
        dsum += r.norm;
        rep.degenerate_replicates += r.degenerate ? 1 : 0;
        rep.replicate_s.push_back(r.sums);
        rep.replicate_d.push_back(r.norm);
    }
    for (auto* v : {&rep.k, &rep.se, &rep.spread, &rep.k_ratio, &rep.se_ratio}) v->assign(nb, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
        double ssum = 0.0;
        for (const auto& r : reps) ssum += r.sums[b];
        const double m = ssum / n;
        double v = 0.0;
        for (const auto& r : reps) v += (r.sums[b] - m) * (r.sums[b] - m);
        const double sd = std::sqrt(v / (n - 1.0));
        rep.k[b] = m / intensity_product;
        rep.spread[b] = sd / intensity_product;
        rep.se[b] = rep.spread[b] / std::sqrt(n);
        if (dsum <= 0.0) continue;
        const double kr = ssum / dsum;
        double e2 = 0.0;
        for (const auto& r : reps) {
            const double e = r.sums[b] - kr * r.norm;
            e2 += e * e;
        }
        rep.k_ratio[b] = kr;
        rep.se_ratio[b] = std::sqrt(e2 * n / (n - 1.0)) / dsum;
    }
    return rep;
}

void attach_theory(KReport& report, const std::vector<double>& theory) {
    if (theory.size() != report.r_grid.size())
        throw std::invalid_argument("theory curve does not match the r grid");
    report.theory = theory;
    report.z.resize(theory.size());
    report.z_ratio.resize(theory.size());
    for (std::size_t b = 0; b < theory.size(); ++b) {
        report.z[b] = (report.k[b] - theory[b]) / report.se[b];
        report.z_ratio[b] = (report.k_ratio[b] - theory[b]) / report.se_ratio[b];
    }
}

double vertex_intensity(const ModelParams& mp) {
    return 2.0 * mp.t() * mp.t() * mp.p().value() * mp.p().complement();
}

double edge_intensity(const ModelParams& mp) { return mp.t(); }

double intensity_product(KKind kind, const ModelParams& mp) {
    switch (kind) {
        case KKind::Vertex: return vertex_intensity(mp) * vertex_intensity(mp);
        case KKind::Edge: return edge_intensity(mp) * edge_intensity(mp);
        case KKind::Cross: return vertex_intensity(mp) * edge_intensity(mp);
    }
    throw std::logic_error("unknown K kind");
}

std::vector<KReport> k_functions(const McConfig& cfg, const std::vector<KKind>& kinds) {
    validate(cfg, true);
    const std::size_t n = cfg.n_replicates;
    const int threads = resolve_threads(cfg.threads);
    const double delta = effective_delta(cfg);
    const PairQuery query{cfg.window, cfg.params.p(), cfg.r_grid};
    bool need_vertices = false, need_skeleton = false;
    for (auto k : kinds) {
        need_vertices |= k != KKind::Edge;
        need_skeleton |= k != KKind::Vertex;
    }
    std::vector<std::vector<ReplicateSums>> sums(kinds.size(), std::vector<ReplicateSums>(n));
    parallel_indexed(n, threads, [&](std::size_t i) {
        const SimParams sp(cfg.params.p(), cfg.params.t(), derive_seed(cfg.master_seed, i));
        const Tessellation tess = sample(cfg.window, sp, {cfg.cell_cap});
        std::vector<WeightedPoint> vs, sk;
        if (need_vertices)
            for (const auto& v : vertices(tess)) vs.push_back({v.x, v.y, 1.0});
        if (need_skeleton)
            for (const auto& s : skeleton_points(tess, delta)) sk.push_back({s.x, s.y, s.mass});
        for (std::size_t k = 0; k < kinds.size(); ++k) sums[k][i] = replicate_sums(kinds[k], query, vs, sk);
    });

    const ModelParams mp(cfg.params.p(), cfg.params.t());
    std::vector<KReport> out;
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        KReport rep = pool_replicates(kinds[k], cfg.params.p(), cfg.params.t(), cfg.r_grid, sums[k],
                                      intensity_product(kinds[k], mp));
        std::vector<double> theory;
        for (double r : cfg.r_grid) theory.push_back(k_from_pcf(mp, pcf_kind_of(kinds[k]), r));
        attach_theory(rep, theory);
        out.push_back(std::move(rep));
    }
    return out;
}

KReport k_vertex(const McConfig& cfg) { return k_functions(cfg, {KKind::Vertex}).front(); }
KReport k_edge(const McConfig& cfg) { return k_functions(cfg, {KKind::Edge}).front(); }
KReport k_cross(const McConfig& cfg) { return k_functions(cfg, {KKind::Cross}).front(); }

PcfEstimate pcf_estimate(const KReport& report, double bandwidth) {
    const auto& r = report.r_grid;
    if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
    const double w = 2.0 * report.p * (1.0 - report.p);
    const std::size_t nrep = report.replicate_s.size();

    std::vector<double> rr, vals, ses;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] - bandwidth < r.front() || r[i] + bandwidth > r.back()) continue;
        std::vector<std::size_t> idx;
        for (std::size_t k = 0; k < r.size(); ++k)
            if (std::abs(r[k] - r[i]) <= bandwidth * (1.0 + 1e-12)) idx.push_back(k);
        if (idx.size() < 3)
            throw std::invalid_argument("bandwidth spans fewer than 3 grid points; grid too coarse");
        double mr = 0.0;
        for (auto k : idx) mr += r[k];
        mr /= static_cast<double>(idx.size());
        double sxx = 0.0;
        for (auto k : idx) sxx += (r[k] - mr) * (r[k] - mr);
        std::vector<double> coef;
        for (auto k : idx) coef.push_back((r[k] - mr) / sxx);
        double slope = 0.0;
        for (std::size_t m = 0; m < idx.size(); ++m) slope += coef[m] * report.k[idx[m]];
        double se = 0.0;
        if (nrep >= 2) {
            // The slope is linear in K, hence a mean of per-replicate slopes.
            std::vector<double> per(nrep, 0.0);
            for (std::size_t s = 0; s < nrep; ++s)
                for (std::size_t m = 0; m < idx.size(); ++m)
                    per[s] += coef[m] * report.replicate_s[s][idx[m]] / report.intensity_product;
            const double mean = mean_of(per);
            double v = 0.0;
            for (double x : per) v += (x - mean) * (x - mean);
            se = std::sqrt(v / (nrep - 1.0) / nrep) / (w * r[i]);
        }
        rr.push_back(r[i]);
        vals.push_back(slope / (w * r[i]));
        ses.push_back(se);
    }
    if (rr.empty())
        throw std::invalid_argument("no grid point has a full bandwidth window inside the grid; grid too coarse");
    return {PcfCurve(pcf_kind_of(report.kind), std::move(rr), std::move(vals)), std::move(ses),
            "derivative estimate: differentiation amplifies Monte Carlo noise; compare within the reported SE"};
}

}  // namespace mondrian
