#pragma once

#include <cstdint>

namespace mondrian {

// splitmix64 finalizer; also used to derive per-replicate seeds.
std::uint64_t mix64(std::uint64_t x);

// Seed of replicate i under master seed m: mix64(m + golden * (i + 1)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// xoshiro256** seeded through splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();
    // Uniform on (0,1]; never returns 0.
    double uniform_pos();
    // Uniform on the open interval (0,1).
    double uniform_open();
    // Exp(rate) by inversion.
    double exponential(double rate);
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t s_[4];
};

}  // namespace mondrian
