#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mondrian/estimation.hpp"
#include "mondrian/functionals.hpp"
#include "mondrian/io.hpp"
#include "mondrian/special.hpp"
#include "mondrian/theory.hpp"

using namespace mondrian;
using nlohmann::json;

namespace {

struct StatisticalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> split_numbers(const std::string& s, char sep) {
    std::vector<double> out;
    std::stringstream ss(s);
    ss.imbue(std::locale::classic());
    std::string item;
    while (std::getline(ss, item, sep)) {
        std::istringstream is(item);
        is.imbue(std::locale::classic());
        double v;
        if (!(is >> v) || !(is >> std::ws).eof()) throw std::invalid_argument("not a number: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

Rect parse_window(const std::string& s) {
    const auto v = split_numbers(s, ',');
    if (v.size() != 4) throw std::invalid_argument("--window expects x0,x1,y0,y1");
    return Rect(v[0], v[1], v[2], v[3]);
}

// "start:stop:step" (inclusive) or a comma-separated list.
std::vector<double> parse_grid(const std::string& s) {
    if (s.find(':') == std::string::npos) return split_numbers(s, ',');
    const auto v = split_numbers(s, ':');
    if (v.size() != 3 || !(v[2] > 0.0) || !(v[1] >= v[0]))
        throw std::invalid_argument("--r-grid expects start:stop:step with step > 0 and stop >= start");
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((v[1] - v[0]) / v[2] + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(v[0] + static_cast<double>(i) * v[2]);
    return out;
}

struct Common {
    std::string window = "0,1,0,1";
    double p = 0.5;
    double t = 1.0;
    std::uint64_t seed = 1;
    std::size_t n = 100;
    std::string r_grid = "0.5,1,2";
    double delta = 0.0;
    std::string kind = "all";
    std::string format = "json";
    std::string out;
    double z_threshold = 3.0;
    int threads = 0;
    std::size_t bootstrap = 1000;
};

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-")
        std::cout << content;
    else
        write_file_atomic(path, content);
}

McConfig make_config(const Common& c, bool with_grid) {
    McConfig cfg{parse_window(c.window), SimParams(Weight(c.p), c.t, c.seed), c.n,
                 with_grid ? parse_grid(c.r_grid) : std::vector<double>{}, c.delta, c.seed};
    cfg.threads = c.threads;
    cfg.bootstrap_resamples = c.bootstrap;
    validate(cfg, with_grid);
    return cfg;
}

std::vector<KKind> parse_kinds(const std::string& k) {
    if (k == "all") return {KKind::Vertex, KKind::Edge, KKind::Cross};
    return {k_kind_from_string(k)};
}

json config_json(const Common& c, const McConfig& cfg, bool with_grid) {
    const Rect& w = cfg.window;
    json j{{"window", {w.x_min(), w.x_max(), w.y_min(), w.y_max()}},
           {"p", c.p},
           {"t", c.t},
           {"seed", c.seed},
           {"n", c.n},
           {"bootstrap", c.bootstrap}};
    if (with_grid) {
        j["r_grid"] = cfg.r_grid;
        j["delta"] = effective_delta(cfg);
        j["kinds"] = json::array();
        for (auto k : parse_kinds(c.kind)) j["kinds"].push_back(to_string(k));
    }
    return j;
}

int cmd_sample(const Common& c, const std::string& svg, const std::string& json_path, bool color) {
    const Tessellation tess = sample(parse_window(c.window), SimParams(Weight(c.p), c.t, c.seed));
    if (!svg.empty()) write_file_atomic(svg, tessellation_to_svg(tess, color));
    if (!json_path.empty()) write_file_atomic(json_path, tessellation_to_json(tess).dump(1) + "\n");
    if (svg.empty() && json_path.empty()) {
        if (c.format == "svg")
            emit(c.out, tessellation_to_svg(tess, color));
        else if (c.format == "json")
            emit(c.out, tessellation_to_json(tess).dump(1) + "\n");
        else
            throw std::invalid_argument("sample supports --format json or svg");
    }
    std::cerr << "edges: " << sigma_one(tess) << "\n";
    return 0;
}

std::string theory_table(const std::string& table, const std::vector<double>& ps, double t,
                         const std::vector<double>& grid, double a, double b) {
    auto f = format_double;
    std::string out;
    auto row_error = [&](std::vector<std::string> head, std::size_t ncols, const std::exception& e) {
        for (std::size_t i = 0; i < ncols; ++i) head.push_back("");
        head.push_back(e.what());
        return csv_line(head);
    };
    if (table == "pcf") {
        const std::vector<PcfKind> kinds{PcfKind::Edge, PcfKind::Cross, PcfKind::Vertex,
                                         PcfKind::IsoEdge, PcfKind::IsoCross, PcfKind::IsoVertex,
                                         PcfKind::PoissonEdge, PcfKind::PoissonCross, PcfKind::PoissonVertex};
        std::vector<std::string> head{"t", "p", "r"};
        for (auto k : kinds) head.push_back(to_string(k));
        for (auto k : {"edge", "cross", "vertex"}) head.push_back(std::string(k) + "_uncorrected");
        head.push_back("error");
        out += csv_line(head);
        for (double p : ps)
            for (double r : grid) {
                const ModelParams mp(Weight(p), t);
                try {
                    std::vector<std::string> row{f(t), f(p), f(r)};
                    for (auto k : kinds) row.push_back(f(pcf(k, mp, r)));
                    for (auto k : {PcfKind::Edge, PcfKind::Cross, PcfKind::Vertex})
                        row.push_back(f(pcf_uncorrected(k, mp, r)));
                    row.push_back("");
                    out += csv_line(row);
                } catch (const std::exception& e) {
                    out += row_error({f(t), f(p), f(r)}, kinds.size() + 3, e);
                }
            }
    } else if (table == "kfun") {
        out += csv_line({"t", "p", "r", "k_vertex", "k_edge", "k_cross", "k_csr", "error"});
        for (double p : ps)
            for (double r : grid) {
                const ModelParams mp(Weight(p), t);
                try {
                    out += csv_line({f(t), f(p), f(r), f(k_from_pcf(mp, PcfKind::Vertex, r)),
                                     f(k_from_pcf(mp, PcfKind::Edge, r)), f(k_from_pcf(mp, PcfKind::Cross, r)),
                                     f(r * r * p * (1 - p)), ""});
                } catch (const std::exception& e) {
                    out += row_error({f(t), f(p), f(r)}, 4, e);
                }
            }
    } else if (table == "moments") {
        out += csv_line({"t", "p", "a", "b", "mean_sigma_lambda", "mean_sigma_one", "var_sigma_lambda",
                         "var_sigma_one", "cov", "error"});
        for (double p : ps) {
            try {
                const auto m = moments_rect(ModelParams(Weight(p), t), a, b);
                out += csv_line({f(t), f(p), f(a), f(b), f(m.mean_sigma_lambda), f(m.mean_sigma_one),
                                 f(m.var_sigma_lambda), f(m.var_sigma_one), f(m.cov), ""});
            } catch (const std::exception& e) {
                out += row_error({f(t), f(p), f(a), f(b)}, 5, e);
            }
        }
    } else if (table == "asymptotics") {
        out += csv_line({"t", "p", "r", "ratio_var_sigma_lambda", "ratio_var_sigma_one", "ratio_cov",
                         "uncorrected_ratio_var_sigma_lambda", "uncorrected_ratio_var_sigma_one", "uncorrected_ratio_cov",
                         "error"});
        for (double p : ps)
            for (double r : grid) {
                const ModelParams mp(Weight(p), t);
                try {
                    const auto m = moments_rect(mp, r, r);
                    const auto mun = moments_rect_uncorrected(mp, r, r);
                    const auto lead = variance_asymptotics(mp, r);
                    const auto lun = variance_asymptotics_uncorrected(mp, r);
                    out += csv_line({f(t), f(p), f(r), f(m.var_sigma_lambda / lead.var_sigma_lambda),
                                     f(m.var_sigma_one / lead.var_sigma_one), f(m.cov / lead.cov),
                                     f(mun.var_sigma_lambda / lun.var_sigma_lambda),
                                     f(mun.var_sigma_one / lun.var_sigma_one), f(mun.cov / lun.cov), ""});
                } catch (const std::exception& e) {
                    out += row_error({f(t), f(p), f(r)}, 6, e);
                }
            }
    } else if (table == "g") {
        out += csv_line({"x", "g1", "g2", "g3", "error"});
        for (double x : grid) {
            try {
                out += csv_line({f(x), f(g1(x)), f(g2(x)), f(g3(x)), ""});
            } catch (const std::exception& e) {
                out += row_error({f(x)}, 3, e);
            }
        }
    } else {
        throw std::invalid_argument("unknown table '" + table + "' (pcf, kfun, moments, asymptotics, g)");
    }
    return out;
}

json compare_report(const Common& c, const std::string& what, std::string& csv, double& max_z) {
    const bool do_moments = what == "moments" || what == "all";
    const bool do_k = what == "kfun" || what == "all";
    if (!do_moments && !do_k) throw std::invalid_argument("--what must be moments, kfun or all");
    const McConfig cfg = make_config(c, do_k);
    json rep{{"version", kSchemaVersion}, {"command", "compare"}, {"what", what},
             {"config", config_json(c, cfg, do_k)}, {"z_threshold", c.z_threshold}};
    max_z = 0.0;
    auto track = [&](double z) { max_z = std::isfinite(z) ? std::max(max_z, std::abs(z)) : INFINITY; };
    if (do_moments) {
        const MomentReport m = mc_moments(cfg);
        rep["moments"] = moment_report_json(m);
        for (const auto& s : m.stats) track(s.z);
        csv += moment_report_csv(m);
    }
    if (do_k) {
        const auto reps = k_functions(cfg, parse_kinds(c.kind));
        rep["k"] = json::array();
        for (const auto& r : reps) {
            rep["k"].push_back(k_report_json(r));
            for (double z : r.z) track(z);
        }
        if (!csv.empty()) csv += "\n";
        csv += k_report_csv(reps);
    }
    rep["max_abs_z"] = std::isfinite(max_z) ? json(max_z) : json(nullptr);
    rep["pass"] = max_z <= c.z_threshold;
    return rep;
}

void add_common(CLI::App* app, Common& c, bool grid, bool mc) {
    app->add_option("--window", c.window, "x0,x1,y0,y1")->capture_default_str();
    app->add_option("--p", c.p, "direction weight in (0,1)")->capture_default_str();
    app->add_option("--t", c.t, "time parameter > 0")->capture_default_str();
    app->add_option("--seed", c.seed, "seed (master seed for Monte Carlo runs)")->capture_default_str();
    app->add_option("--format", c.format, "output format")->capture_default_str();
    app->add_option("--out", c.out, "output path ('-' or empty: stdout)");
    if (mc) {
        app->add_option("--n", c.n, "number of replicates")->capture_default_str();
        app->add_option("--threads", c.threads, "worker threads (capped by MONDRIAN_THREADS)");
        app->add_option("--bootstrap", c.bootstrap, "bootstrap resamples")->capture_default_str();
    }
    if (grid) {
        app->add_option("--r-grid", c.r_grid, "start:stop:step or a comma list")->capture_default_str();
        app->add_option("--delta", c.delta, "skeleton spacing (0: automatic)")->capture_default_str();
        app->add_option("--kind", c.kind, "vertex|edge|cross|all")->capture_default_str();
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted planar Mondrian tessellations: sampling, closed forms and Monte Carlo checks"};
    app.set_config("--config", "", "TOML/INI file with option defaults; flags take precedence");
    app.require_subcommand(1);

    Common sample_c, theory_c, moments_c, kfun_c, compare_c;
    std::string svg, json_out, table = "pcf", what = "moments", p_list = "0.5,0.75,0.9";
    bool color = false;
    double a = 0.5, b = 0.5;

    auto* s = app.add_subcommand("sample", "sample one tessellation");
    add_common(s, sample_c, false, false);
    s->add_option("--svg", svg, "write SVG to this path");
    s->add_option("--json", json_out, "write JSON to this path");
    s->add_flag("--color-births", color, "colour edges by birth time");

    auto* th = app.add_subcommand("theory", "closed-form tables as CSV");
    th->add_option("--table", table, "pcf|kfun|moments|asymptotics|g")->capture_default_str();
    th->add_option("--p", p_list, "comma list of weights")->capture_default_str();
    th->add_option("--t", theory_c.t, "time parameter")->capture_default_str();
    th->add_option("--r-grid", theory_c.r_grid, "r (or x) grid")->capture_default_str();
    th->add_option("--a", a, "half width for the moments table")->capture_default_str();
    th->add_option("--b", b, "half height for the moments table")->capture_default_str();
    th->add_option("--out", theory_c.out, "output path");

    auto* mo = app.add_subcommand("moments", "Monte Carlo moments of edge count and weighted length");
    add_common(mo, moments_c, false, true);

    auto* kf = app.add_subcommand("kfun", "Monte Carlo K-functions");
    add_common(kf, kfun_c, true, true);

    auto* cmp = app.add_subcommand("compare", "Monte Carlo versus theory with a z-score gate");
    add_common(cmp, compare_c, true, true);
    cmp->add_option("--what", what, "moments|kfun|all")->capture_default_str();
    cmp->add_option("--z-threshold", compare_c.z_threshold, "gate on |z|")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*s) return cmd_sample(sample_c, svg, json_out, color);
        if (*th) {
            emit(theory_c.out, theory_table(table, split_numbers(p_list, ','), theory_c.t,
                                            parse_grid(theory_c.r_grid), a, b));
            return 0;
        }
        if (*mo) {
            const MomentReport m = mc_moments(make_config(moments_c, false));
            if (moments_c.format == "csv")
                emit(moments_c.out, moment_report_csv(m));
            else
                emit(moments_c.out, moment_report_json(m).dump(1) + "\n");
            return 0;
        }
        if (*kf) {
            const auto reps = k_functions(make_config(kfun_c, true), parse_kinds(kfun_c.kind));
            if (kfun_c.format == "csv") {
                emit(kfun_c.out, k_report_csv(reps));
            } else {
                json arr = json::array();
                for (const auto& r : reps) arr.push_back(k_report_json(r));
                emit(kfun_c.out, json{{"version", kSchemaVersion}, {"k", arr}}.dump(1) + "\n");
            }
            return 0;
        }
        if (*cmp) {
            std::string csv;
            double max_z = 0.0;
            const json rep = compare_report(compare_c, what, csv, max_z);
            if (compare_c.out.empty() || compare_c.out == "-") {
                std::cout << rep.dump(1) << "\n";
            } else {
                write_file_atomic(compare_c.out, rep.dump(1) + "\n");
                std::string csv_path = compare_c.out;
                const auto dot = csv_path.rfind('.');
                csv_path = (dot == std::string::npos ? csv_path : csv_path.substr(0, dot)) + ".csv";
                write_file_atomic(csv_path, csv);
            }
            if (!rep["pass"].get<bool>()) {
                std::cerr << "STATISTICAL FAILURE: max |z| = " << format_double(max_z) << " exceeds "
                          << format_double(compare_c.z_threshold) << "\n";
                return 1;
            }
            std::cerr << "PASS: max |z| = " << format_double(max_z) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "ERROR: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
