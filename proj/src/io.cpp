#include "mondrian/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace mondrian {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json tessellation_to_json(const Tessellation& tess) {
    const Rect& w = tess.window();
    json edges = json::array();
    for (const auto& e : tess.edges()) {
        edges.push_back({{"o", e.seg.orientation() == Orientation::H ? "H" : "V"},
                         {"c", e.seg.fixed()},
                         {"lo", e.seg.lo()},
                         {"hi", e.seg.hi()},
                         {"birth", e.birth}});
    }
    return json{{"version", kSchemaVersion},
                {"window", {w.x_min(), w.x_max(), w.y_min(), w.y_max()}},
                {"p", tess.params().p().value()},
                {"t", tess.params().t()},
                {"seed", tess.params().seed()},
                {"edges", edges}};
}

Tessellation tessellation_from_json(const json& j) {
    try {
        const int version = j.at("version").get<int>();
        if (version != kSchemaVersion)
            throw std::invalid_argument("unsupported tessellation schema version " + std::to_string(version));
        const auto win = j.at("window").get<std::vector<double>>();
        if (win.size() != 4) throw std::invalid_argument("window must have four numbers");
        const Rect w(win[0], win[1], win[2], win[3]);
        const SimParams params(Weight(j.at("p").get<double>()), j.at("t").get<double>(),
                               j.at("seed").get<std::uint64_t>());
        std::vector<MaximalEdge> edges;
        for (const auto& e : j.at("edges")) {
            const auto o = e.at("o").get<std::string>();
            if (o != "H" && o != "V") throw std::invalid_argument("edge orientation must be \"H\" or \"V\"");
            edges.push_back({Segment(o == "H" ? Orientation::H : Orientation::V, e.at("c").get<double>(),
                                     e.at("lo").get<double>(), e.at("hi").get<double>()),
                             e.at("birth").get<double>()});
        }
        Tessellation tess(w, params, std::move(edges));
        tess.validate(1e-9);
        return tess;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed tessellation JSON: ") + e.what());
    }
}

std::string tessellation_to_svg(const Tessellation& tess, bool color_by_birth) {
    const Rect& w = tess.window();
    const double flip = w.y_min() + w.y_max();
    const double stroke = 0.002 * std::max(w.width(), w.height());
    auto f = format_double;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << f(w.x_min()) << ' ' << f(w.y_min()) << ' '
        << f(w.width()) << ' ' << f(w.height()) << "\">\n";
    out << "<rect x=\"" << f(w.x_min()) << "\" y=\"" << f(w.y_min()) << "\" width=\"" << f(w.width())
        << "\" height=\"" << f(w.height()) << "\" fill=\"white\" stroke=\"black\" stroke-width=\""
        << f(2 * stroke) << "\"/>\n";
    const double t = tess.params().t();
    for (const auto& e : tess.edges()) {
        const Segment& s = e.seg;
        double x1, y1, x2, y2;
        if (s.orientation() == Orientation::H) {
            x1 = s.lo(), x2 = s.hi(), y1 = y2 = s.fixed();
        } else {
            x1 = x2 = s.fixed(), y1 = s.lo(), y2 = s.hi();
        }
        std::string color = "black";
        if (color_by_birth) {
            // Early edges blue, late edges red.
            const double u = std::clamp(e.birth / t, 0.0, 1.0);
            const int red = static_cast<int>(std::lround(255 * u));
            const int blue = 255 - red;
            color = "rgb(" + std::to_string(red) + ",0," + std::to_string(blue) + ")";
        }
        out << "<line x1=\"" << f(x1) << "\" y1=\"" << f(flip - y1) << "\" x2=\"" << f(x2) << "\" y2=\""
            << f(flip - y2) << "\" stroke=\"" << color << "\" stroke-width=\"" << f(stroke) << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        os << content;
        os.flush();
        if (!os) throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot move output into '" + path + "': " + ec.message());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        const auto& f = fields[i];
        if (f.find_first_of(",\"\n") != std::string::npos) {
            out += '"';
            for (char c : f) {
                if (c == '"') out += '"';
                out += c;
            }
            out += '"';
        } else {
            out += f;
        }
    }
    out += '\n';
    return out;
}

namespace {

json stat_lines(const std::vector<StatLine>& lines) {
    json arr = json::array();
    for (const auto& s : lines)
        arr.push_back({{"name", s.name}, {"estimate", s.estimate}, {"se", s.se}, {"theory", s.theory}, {"z", s.z}});
    return arr;
}

}  // namespace

json moment_report_json(const MomentReport& rep) {
    return json{{"n_replicates", rep.n_replicates},
                {"stats", stat_lines(rep.stats)},
                {"diagnostics",
                 {{"against_uncorrected_forms", stat_lines(rep.stats_uncorrected)},
                  {"swapped_weighting", stat_lines(rep.stats_swapped)}}}};
}

json k_report_json(const KReport& rep) {
    json rows = json::array();
    for (std::size_t b = 0; b < rep.r_grid.size(); ++b)
        rows.push_back({{"r", rep.r_grid[b]},
                        {"k", rep.k[b]},
                        {"se", rep.se[b]},
                        {"spread", rep.spread[b]},
                        {"theory", rep.theory.empty() ? 0.0 : rep.theory[b]},
                        {"z", rep.z.empty() ? 0.0 : rep.z[b]},
                        {"k_ratio", rep.k_ratio[b]},
                        {"se_ratio", rep.se_ratio[b]},
                        {"z_ratio", rep.z_ratio.empty() ? 0.0 : rep.z_ratio[b]}});
    return json{{"kind", to_string(rep.kind)},
                {"p", rep.p},
                {"t", rep.t},
                {"intensity_product", rep.intensity_product},
                {"n_replicates", rep.replicate_d.size()},
                {"degenerate_replicates", rep.degenerate_replicates},
                {"normalization", rep.normalization},
                {"rows", rows}};
}

std::string moment_report_csv(const MomentReport& rep) {
    std::string out = csv_line({"statistic", "estimate", "se", "theory", "z"});
    for (const auto& s : rep.stats)
        out += csv_line({s.name, format_double(s.estimate), format_double(s.se), format_double(s.theory),
                         format_double(s.z)});
    return out;
}

std::string k_report_csv(const std::vector<KReport>& reps) {
    std::string out = csv_line({"kind", "r", "k", "se", "spread", "theory", "z", "k_ratio", "se_ratio", "z_ratio"});
    for (const auto& rep : reps)
        for (std::size_t b = 0; b < rep.r_grid.size(); ++b)
            out += csv_line({to_string(rep.kind), format_double(rep.r_grid[b]), format_double(rep.k[b]),
                             format_double(rep.se[b]), format_double(rep.spread[b]),
                             format_double(rep.theory.empty() ? 0.0 : rep.theory[b]),
                             format_double(rep.z.empty() ? 0.0 : rep.z[b]), format_double(rep.k_ratio[b]),
                             format_double(rep.se_ratio[b]),
                             format_double(rep.z_ratio.empty() ? 0.0 : rep.z_ratio[b])});
    return out;
}

}  // namespace mondrian
