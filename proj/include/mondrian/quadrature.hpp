#pragma once

#include <functional>
#include <stdexcept>

namespace mondrian {

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;  // accepted error is max(abs_tol, rel_tol * |value|)
    unsigned max_depth = 20;
};

// Adaptive Gauss-Kronrod (7/15) on a finite interval. Throws QuadratureError
// when the error estimate exceeds the requested tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opts = {});

// Integral over [a, inf): panels of doubling width are added until the
// integrand has fallen below 1e-16 of the largest magnitude seen.
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const QuadOptions& opts = {}, double first_panel = 1.0);

}  // namespace mondrian
