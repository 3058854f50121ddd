#include "mondrian/functionals.hpp"

#include <cmath>
#include <stdexcept>

namespace mondrian {

std::size_t sigma_one(const Tessellation& tess) { return tess.edges().size(); }

double sigma_lambda(const Tessellation& tess) {
    double s = 0.0;
    for (const auto& e : tess.edges()) s += lambda_segment(e.seg, tess.params().p());
    return s;
}

double sigma_lambda_swapped(const Tessellation& tess) {
    double s = 0.0;
    for (const auto& e : tess.edges()) s += lambda_segment(e.seg, tess.params().p().swapped());
    return s;
}

double total_length(const Tessellation& tess) {
    double s = 0.0;
    for (const auto& e : tess.edges()) s += e.seg.length();
    return s;
}

std::vector<Vertex> vertices(const Tessellation& tess, double tol) {
    const auto topo = build_topology(tess, tol);
    const auto& edges = tess.edges();
    std::vector<Vertex> out;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Segment& s = edges[i].seg;
        for (int end = 0; end < 2; ++end) {
            const int host = topo.endpoint_host[i][end];
            if (host < 0) continue;
            const double hx = edges[host].seg.fixed();
            Vertex v{};
            if (s.orientation() == Orientation::H) {
                v.x = hx;
                v.y = s.fixed();
            } else {
                v.x = s.fixed();
                v.y = hx;
            }
            v.host_birth = edges[host].birth;
            v.guest_birth = edges[i].birth;
            v.host = host;
            v.guest = static_cast<int>(i);
            out.push_back(v);
        }
    }
    return out;
}

std::vector<SkeletonPoint> skeleton_points(const Tessellation& tess, double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("skeleton spacing delta must be finite and > 0");
    std::vector<SkeletonPoint> out;
    for (const auto& e : tess.edges()) {
        const Segment& s = e.seg;
        const double len = s.length();
        const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / delta)));
        const double piece = len / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double m = s.lo() + (static_cast<double>(k) + 0.5) * piece;
            if (s.orientation() == Orientation::H)
                out.push_back({m, s.fixed(), piece});
            else
                out.push_back({s.fixed(), m, piece});
        }
    }
    return out;
}

}  // namespace mondrian
