#pragma once

#include <cstddef>
#include <vector>

#include "mondrian/sampler.hpp"

namespace mondrian {

struct Vertex {
    double x, y;
    double host_birth, guest_birth;
    int host, guest;  // edge indices
};

struct SkeletonPoint {
    double x, y;
    double mass;
};

std::size_t sigma_one(const Tessellation& tess);
double sigma_lambda(const Tessellation& tess);
// Same sum with the weights swapped (horizontal edges weighted by p).
double sigma_lambda_swapped(const Tessellation& tess);
double total_length(const Tessellation& tess);

// Interior T-junctions. tol as in build_topology.
std::vector<Vertex> vertices(const Tessellation& tess, double tol = 0.0);

std::vector<SkeletonPoint> skeleton_points(const Tessellation& tess, double delta);

}  // namespace mondrian
