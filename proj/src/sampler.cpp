#include "mondrian/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "mondrian/rng.hpp"

namespace mondrian {

SimParams::SimParams(Weight p, double t, std::uint64_t seed) : p_(p), t_(t), seed_(seed) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("time parameter t must be finite and > 0");
}

Tessellation::Tessellation(Rect window, SimParams params, std::vector<MaximalEdge> edges)
    : window_(window), params_(params), edges_(std::move(edges)) {
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto& e = edges_[i];
        if (!(e.birth > 0.0 && e.birth <= params_.t()))
            throw std::invalid_argument("edge " + std::to_string(i) + ": birth outside (0, t]");
        if (i > 0 && !(edges_[i - 1].birth < e.birth))
            throw std::invalid_argument("edge " + std::to_string(i) +
                                        ": birth times must be strictly increasing");
        const auto& s = e.seg;
        const bool h = s.orientation() == Orientation::H;
        const double flo = h ? window_.x_min() : window_.y_min();
        const double fhi = h ? window_.x_max() : window_.y_max();
        const double clo = h ? window_.y_min() : window_.x_min();
        const double chi = h ? window_.y_max() : window_.x_max();
        if (s.lo() < flo || s.hi() > fhi || !(s.fixed() > clo && s.fixed() < chi))
            throw std::invalid_argument("edge " + std::to_string(i) + " leaves the window");
    }
}

void Tessellation::validate(double tol) const { (void)build_topology(*this, tol); }

Tessellation sample(const Rect& window, const SimParams& params, const SampleOptions& opts) {
    struct Pending {
        Rect box;
        double born;
    };
    const Weight p = params.p();
    const double t = params.t();
    Rng rng(params.seed());
    std::deque<Pending> queue{{window, 0.0}};
    std::vector<MaximalEdge> edges;
    std::size_t n_cells = 1;

    while (!queue.empty()) {
        const Pending c = queue.front();
        queue.pop_front();
        const double lam = lambda_rect(c.box, p);
        const double split_at = c.born + rng.exponential(lam);
        if (!(split_at <= t)) continue;

        const bool horizontal = rng.uniform_pos() * lam <= p.value() * c.box.height();
        const double lo = horizontal ? c.box.y_min() : c.box.x_min();
        const double hi = horizontal ? c.box.y_max() : c.box.x_max();
        double at = lo + rng.uniform_open() * (hi - lo);
        while (!(at > lo && at < hi)) at = lo + rng.uniform_open() * (hi - lo);

        if (++n_cells > opts.cell_cap)
            throw ResourceError("cell count exceeds cap of " + std::to_string(opts.cell_cap));
        const Rect& b = c.box;
        if (horizontal) {
            edges.push_back({Segment(Orientation::H, at, b.x_min(), b.x_max()), split_at});
            queue.push_back({Rect(b.x_min(), b.x_max(), b.y_min(), at), split_at});
            queue.push_back({Rect(b.x_min(), b.x_max(), at, b.y_max()), split_at});
        } else {
            edges.push_back({Segment(Orientation::V, at, b.y_min(), b.y_max()), split_at});
            queue.push_back({Rect(b.x_min(), at, b.y_min(), b.y_max()), split_at});
            queue.push_back({Rect(at, b.x_max(), b.y_min(), b.y_max()), split_at});
        }
    }
    std::stable_sort(edges.begin(), edges.end(),
                     [](const MaximalEdge& a, const MaximalEdge& b) { return a.birth < b.birth; });
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (edges[i].birth == edges[i - 1].birth)
            throw std::runtime_error("two edges share a birth time; random stream degenerate");
    return Tessellation(window, params, std::move(edges));
}

Tessellation restrict(const Tessellation& tess, const Rect& sub) {
    if (!tess.window().contains(sub))
        throw std::invalid_argument("restriction window is not contained in the tessellation window");
    std::vector<MaximalEdge> out;
    for (const auto& e : tess.edges()) {
        const auto& s = e.seg;
        const bool h = s.orientation() == Orientation::H;
        const double clo = h ? sub.y_min() : sub.x_min();
        const double chi = h ? sub.y_max() : sub.x_max();
        if (!(s.fixed() > clo && s.fixed() < chi)) continue;
        const double lo = std::max(s.lo(), h ? sub.x_min() : sub.y_min());
        const double hi = std::min(s.hi(), h ? sub.x_max() : sub.y_max());
        if (!(lo < hi)) continue;
        out.push_back({Segment(s.orientation(), s.fixed(), lo, hi), e.birth});
    }
    return Tessellation(sub, tess.params(), std::move(out));
}

Topology build_topology(const Tessellation& tess, double tol) {
    struct Node {
        Topology::Cell cell;
        int split = -1;
        int child_lo = -1, child_hi = -1;
    };
    const auto& edges = tess.edges();
    std::vector<Node> nodes;
    nodes.reserve(2 * edges.size() + 1);
    nodes.push_back({{tess.window(), -1, -1, -1, -1}});

    Topology topo;
    topo.endpoint_host.resize(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Segment& s = edges[i].seg;
        const bool h = s.orientation() == Orientation::H;
        const double px = h ? s.mid() : s.fixed();
        const double py = h ? s.fixed() : s.mid();
        int at = 0;
        while (nodes[at].split >= 0) {
            const Segment& cut = edges[nodes[at].split].seg;
            const double v = cut.orientation() == Orientation::H ? py : px;
            if (v == cut.fixed())
                throw std::invalid_argument("edge " + std::to_string(i) + " overlaps edge " +
                                            std::to_string(nodes[at].split));
            at = v < cut.fixed() ? nodes[at].child_lo : nodes[at].child_hi;
        }
        const Topology::Cell c = nodes[at].cell;
        const Rect& b = c.box;
        const double span_lo = h ? b.x_min() : b.y_min();
        const double span_hi = h ? b.x_max() : b.y_max();
        const double cross_lo = h ? b.y_min() : b.x_min();
        const double cross_hi = h ? b.y_max() : b.x_max();
        if (!(s.fixed() > cross_lo && s.fixed() < cross_hi) ||
            std::abs(s.lo() - span_lo) > tol || std::abs(s.hi() - span_hi) > tol)
            throw std::invalid_argument("edge " + std::to_string(i) +
                                        " does not span a cell of the earlier tessellation");
        const int id = static_cast<int>(i);
        Topology::Cell a = c, z = c;
        if (h) {
            topo.endpoint_host[i] = {c.left, c.right};
            a.box = Rect(b.x_min(), b.x_max(), b.y_min(), s.fixed());
            a.top = id;
            z.box = Rect(b.x_min(), b.x_max(), s.fixed(), b.y_max());
            z.bottom = id;
        } else {
            topo.endpoint_host[i] = {c.bottom, c.top};
            a.box = Rect(b.x_min(), s.fixed(), b.y_min(), b.y_max());
            a.right = id;
            z.box = Rect(s.fixed(), b.x_max(), b.y_min(), b.y_max());
            z.left = id;
        }
        nodes[at].split = id;
        nodes[at].child_lo = static_cast<int>(nodes.size());
        nodes[at].child_hi = static_cast<int>(nodes.size()) + 1;
        nodes.push_back({a});
        nodes.push_back({z});
    }
    for (const auto& n : nodes)
        if (n.split < 0) topo.cells.push_back(n.cell);
    return topo;
}

std::vector<Rect> cells(const Tessellation& tess) {
    std::vector<Rect> out;
    for (const auto& c : build_topology(tess).cells) out.push_back(c.box);
    return out;
}

}  // namespace mondrian
