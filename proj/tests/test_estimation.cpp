#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>

#include "mondrian/estimation.hpp"
#include "mondrian/rng.hpp"
#include "support/oracles.hpp"

using namespace mondrian;

namespace {

McConfig config(Rect w, double p, double t, std::size_t n, std::vector<double> grid, std::uint64_t seed) {
    return McConfig{w, SimParams(Weight(p), t, 0), n, std::move(grid), 0.0, seed};
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> csr_k(double p, const std::vector<double>& grid) {
    std::vector<double> v;
    for (double r : grid) v.push_back(r * r * p * (1 - p));
    return v;
}

}  // namespace

TEST_CASE("grid pair kernel agrees with the brute-force reference") {
    Rng rng(1);
    const Rect w(0, 3, 0, 2);
    for (double p : {0.2, 0.5, 0.85}) {
        const PairQuery q{w, Weight(p), {0.05, 0.3, 0.7, 1.1}};
        const auto a = oracle::marked_points(w, 700, 1.0, rng);
        const auto b = oracle::marked_points(w, 1300, 0.1, rng);
        for (bool same : {true, false}) {
            const auto& tg = same ? a : b;
            const auto ref = pair_sums_bruteforce(q, a, tg, same);
            const auto g1 = pair_sums_grid(q, a, tg, same, 1);
            const auto g4 = pair_sums_grid(q, a, tg, same, 4);
            CHECK(same_bits(g1, g4));
            for (std::size_t k = 0; k < ref.size(); ++k) {
                CHECK(g1[k] == doctest::Approx(ref[k]).epsilon(1e-12));
                if (k) CHECK(g1[k] >= g1[k - 1]);
            }
        }
    }
}

TEST_CASE("degenerate replicates contribute zero") {
    const PairQuery q{Rect(0, 1, 0, 1), Weight(0.5), {0.1, 0.2}};
    const std::vector<WeightedPoint> one{{0.5, 0.5, 1.0}}, none;
    const auto v = replicate_sums(KKind::Vertex, q, one, none);
    CHECK(v.degenerate);
    CHECK(v.sums == std::vector<double>{0, 0});
    CHECK(replicate_sums(KKind::Edge, q, none, none).degenerate);
    CHECK(replicate_sums(KKind::Cross, q, none, one).degenerate);
}

TEST_CASE("empty tessellations give K identically zero") {
    const auto r = k_edge(config(Rect(0, 1, 0, 1), 0.5, 1e-6, 4, {0.1, 0.2}, 1));
    CHECK(r.degenerate_replicates == 4);
    for (double k : r.k) CHECK(k == 0.0);
    for (double k : r.k_ratio) CHECK(k == 0.0);
}

TEST_CASE("CSR oracles recover the rectangle area") {
    const Rect w(0, 4, 0, 4);
    const double p = 0.7;
    const std::vector<double> grid{0.25, 0.5, 1.0, 2.0};
    const PairQuery q{w, Weight(p), grid};
    const std::size_t n = 300, npts = 150;
    Rng rng(3);
    std::vector<ReplicateSums> vs, es, cs;
    for (std::size_t i = 0; i < n; ++i) {
        const auto pts = oracle::binomial_points(w, npts, rng);
        const auto marked = oracle::marked_points(w, 800, 0.02, rng);
        const auto segs = oracle::wrapped_segments(w, 20, 1.5, 0.05, rng);
        vs.push_back(replicate_sums(KKind::Vertex, q, pts, {}));
        es.push_back(replicate_sums(KKind::Edge, q, {}, marked));
        cs.push_back(replicate_sums(KKind::Cross, q, pts, segs));
    }
    const double a2 = w.area() * w.area();
    auto check = [&](KReport r) {
        attach_theory(r, csr_k(p, grid));
        for (std::size_t b = 0; b < grid.size(); ++b) {
            CHECK(std::abs(r.z[b]) <= 3.0);
            CHECK(std::abs(r.z_ratio[b]) <= 3.0);
        }
    };
    check(pool_replicates(KKind::Vertex, Weight(p), 1, grid, vs, npts * (npts - 1.0) / a2));
    // marks are i.i.d. uniform on [0.01, 0.03]: E w = 0.02
    check(pool_replicates(KKind::Edge, Weight(p), 1, grid, es, 800 * 799 * 0.02 * 0.02 / a2));
    check(pool_replicates(KKind::Cross, Weight(p), 1, grid, cs, npts * 20 * 1.5 / a2));
}

TEST_CASE("K estimates are nondecreasing and deterministic across thread counts") {
    auto cfg = config(Rect(0, 3, 0, 3), 0.6, 2, 12, {0.2, 0.4, 0.6, 0.8, 1.0}, 99);
    cfg.threads = 1;
    const auto a = k_functions(cfg, {KKind::Vertex, KKind::Edge, KKind::Cross});
    cfg.threads = 3;
    const auto b = k_functions(cfg, {KKind::Vertex, KKind::Edge, KKind::Cross});
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(same_bits(a[k].k, b[k].k));
        CHECK(same_bits(a[k].se, b[k].se));
        CHECK(same_bits(a[k].k_ratio, b[k].k_ratio));
        for (std::size_t i = 1; i < a[k].k.size(); ++i) {
            CHECK(a[k].k[i] >= a[k].k[i - 1]);
            CHECK(a[k].k_ratio[i] >= a[k].k_ratio[i - 1]);
        }
        for (double v : a[k].k) CHECK(v >= 0);
    }
    const auto single = k_vertex(cfg);
    CHECK(same_bits(single.k, a[0].k));
}

TEST_CASE("edge K is insensitive to the skeleton spacing") {
    auto cfg = config(Rect(0, 4, 0, 4), 0.5, 2, 60, {0.5, 1.0}, 5);
    cfg.delta = 0.02;
    const auto coarse = k_edge(cfg);
    cfg.delta = 0.01;
    const auto fine = k_edge(cfg);
    for (std::size_t b = 0; b < 2; ++b) CHECK(std::abs(coarse.k[b] - fine.k[b]) < fine.se[b]);
}

TEST_CASE("moment report passes theory through and is deterministic") {
    auto cfg = config(Rect(-1, 1, -0.5, 0.5), 0.4, 1.5, 500, {}, 8);
    cfg.bootstrap_resamples = 200;
    cfg.threads = 1;
    const auto a = mc_moments(cfg);
    cfg.threads = 2;
    const auto b = mc_moments(cfg);
    const auto th = moments_rect(ModelParams(Weight(0.4), 1.5), 1, 0.5);
    CHECK(a.theory.var_sigma_one == th.var_sigma_one);
    CHECK(a.stats[0].theory == th.mean_sigma_lambda);
    CHECK(a.stats[4].theory == th.cov);
    for (std::size_t i = 0; i < a.stats.size(); ++i) {
        CHECK(a.stats[i].estimate == b.stats[i].estimate);
        CHECK(a.stats[i].se == b.stats[i].se);
        CHECK(a.stats[i].se > 0);
        CHECK(a.stats[i].z == doctest::Approx((a.stats[i].estimate - a.stats[i].theory) / a.stats[i].se));
    }
}

TEST_CASE("weighted length mean scales linearly in t") {
    for (double t : {1.0, 2.0}) {
        auto cfg = config(Rect(0, 2, 0, 1), 0.35, t, 4000, {}, 21);
        cfg.bootstrap_resamples = 100;
        const auto m = mc_moments(cfg);
        CHECK(m.stats[0].theory == doctest::Approx(2 * t * 0.35 * 0.65 * 2));
        CHECK(std::abs(m.stats[0].z) <= 3);
    }
}

TEST_CASE("configuration validation") {
    CHECK_THROWS_AS(mc_moments(config(Rect(0, 1, 0, 1), 0.5, 1, 1, {}, 0)), std::invalid_argument);
    CHECK_THROWS_AS(k_vertex(config(Rect(0, 1, 0, 1), 0.5, 1, 5, {0.5, 2.5}, 0)), std::invalid_argument);
    CHECK_THROWS_AS(k_vertex(config(Rect(0, 5, 0, 5), 0.5, 1, 5, {1.0, 0.5}, 0)), std::invalid_argument);
    CHECK_THROWS_AS(k_vertex(config(Rect(0, 5, 0, 5), 0.5, 1, 5, {}, 0)), std::invalid_argument);
    auto cfg = config(Rect(0, 5, 0, 5), 0.25, 1, 5, {0.4, 2.0}, 0);
    CHECK(effective_delta(cfg) == doctest::Approx(0.01));
}

TEST_CASE("thread count honours the environment cap") {
    ::setenv("MONDRIAN_THREADS", "2", 1);
    CHECK(resolve_threads(8) == 2);
    CHECK(resolve_threads(0) == 2);
    CHECK(resolve_threads(1) == 1);
    ::setenv("MONDRIAN_THREADS", "zero", 1);
    CHECK_THROWS_AS(resolve_threads(0), std::invalid_argument);
    ::unsetenv("MONDRIAN_THREADS");
    CHECK(resolve_threads(3) == 3);
}

TEST_CASE("pcf estimate on analytic K curves") {
    KReport r;
    r.kind = KKind::Vertex;
    r.p = 0.3;
    for (int i = 1; i <= 40; ++i) r.r_grid.push_back(0.1 * i);
    r.k.assign(40, 2.0);
    auto flat = pcf_estimate(r, 0.3);
    for (double v : flat.curve.values()) CHECK(v == doctest::Approx(0.0).scale(1));
    CHECK(!flat.warning.empty());

    for (std::size_t i = 0; i < 40; ++i) r.k[i] = r.r_grid[i] * r.r_grid[i] * 0.21;
    const auto csr = pcf_estimate(r, 0.3);
    CHECK(csr.curve.r_grid().front() == doctest::Approx(0.4));
    for (double v : csr.curve.values()) CHECK(std::abs(v - 1.0) <= 1e-6);

    CHECK_THROWS_AS(pcf_estimate(r, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(pcf_estimate(r, 10.0), std::invalid_argument);
}

TEST_CASE("estimated vertex pcf follows the theory") {
    std::vector<double> grid;
    for (int i = 1; i <= 50; ++i) grid.push_back(0.05 * i);
    const auto rep = k_vertex(config(Rect(0, 5, 0, 5), 0.5, 2, 400, grid, 17));
    const auto est = pcf_estimate(rep, 0.25);
    const ModelParams mp(Weight(0.5), 2);
    int checked = 0;
    for (std::size_t i = 0; i < est.curve.r_grid().size(); ++i) {
        const double r = est.curve.r_grid()[i];
        if (r < 1.0 - 1e-9 || r > 2.0 + 1e-9) continue;
        ++checked;
        CHECK(std::abs(est.curve.values()[i] - pcf_vertex(mp, r)) <= 4 * est.se[i]);
    }
    CHECK(checked >= 10);
}
