#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mondrian/geometry.hpp"

namespace mondrian {

class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SimParams {
public:
    SimParams(Weight p, double t, std::uint64_t seed);
    Weight p() const { return p_; }
    double t() const { return t_; }
    std::uint64_t seed() const { return seed_; }

private:
    Weight p_;
    double t_;
    std::uint64_t seed_;
};

struct MaximalEdge {
    Segment seg;
    double birth;
};

// Window, parameters and edges in strictly increasing birth order. The
// constructor checks the cheap invariants; validate() replays the edges and
// checks the T-junction structure.
class Tessellation {
public:
    Tessellation(Rect window, SimParams params, std::vector<MaximalEdge> edges);

    const Rect& window() const { return window_; }
    const SimParams& params() const { return params_; }
    const std::vector<MaximalEdge>& edges() const { return edges_; }

    // Throws std::invalid_argument when the edges do not form a valid split
    // history. tol is the slack allowed for endpoint/boundary coincidence.
    void validate(double tol = 0.0) const;

private:
    Rect window_;
    SimParams params_;
    std::vector<MaximalEdge> edges_;
};

struct SampleOptions {
    std::size_t cell_cap = 10'000'000;
};

Tessellation sample(const Rect& window, const SimParams& params, const SampleOptions& opts = {});

Tessellation restrict(const Tessellation& tess, const Rect& sub);

std::vector<Rect> cells(const Tessellation& tess);

// Split-history replay: final cells with the ids of their bounding edges
// (-1 = window side), and for each edge the id of the edge its lo/hi
// endpoint rests on (-1 = window boundary).
struct Topology {
    struct Cell {
        Rect box;
        int left, right, bottom, top;
    };
    std::vector<Cell> cells;
    std::vector<std::array<int, 2>> endpoint_host;
};

Topology build_topology(const Tessellation& tess, double tol = 0.0);

}  // namespace mondrian
