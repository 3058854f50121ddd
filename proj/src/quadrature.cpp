#include "mondrian/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mondrian {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

double accepted(const QuadOptions& o, double value) {
    return std::max(o.abs_tol, o.rel_tol * std::abs(value));
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opts) {
    if (a == b) return 0.0;
    double err = 0.0, l1 = 0.0;
    double value = GK::integrate(f, a, b, opts.max_depth, 1e-9, &err, &l1);
    if (err > accepted(opts, value)) {
        // Second pass with the relative target implied by the absolute one.
        const double rel = std::clamp(0.1 * accepted(opts, value) / std::max(l1, 1e-300), 1e-15, 1e-9);
        value = GK::integrate(f, a, b, opts.max_depth, rel, &err, &l1);
    }
    if (!std::isfinite(value) || err > accepted(opts, value)) {
        std::ostringstream msg;
        msg.precision(3);
        msg << "quadrature on [" << a << ", " << b << "] did not converge: error estimate " << err
            << " exceeds tolerance " << accepted(opts, value);
        throw QuadratureError(msg.str());
    }
    return value;
}

double integrate_to_infinity(const std::function<double(double)>& f, double a, const QuadOptions& opts,
                             double first_panel) {
    // Panels share the tolerance budget; later panels are tiny anyway.
    QuadOptions panel = opts;
    panel.abs_tol = opts.abs_tol / 4.0;
    double total = 0.0, peak = std::abs(f(a)), lo = a, width = first_panel;
    for (int k = 0; k < 200; ++k) {
        const double hi = lo + width;
        const double part = integrate(f, lo, hi, panel);
        total += part;
        for (int s = 1; s <= 8; ++s) peak = std::max(peak, std::abs(f(lo + width * s / 8.0)));
        const double tail = std::abs(f(hi));
        if (tail <= 1e-16 * peak && std::abs(part) <= std::max(opts.abs_tol, 1e-16 * std::abs(total)))
            return total;
        lo = hi;
        width *= 2.0;
        panel.abs_tol = std::max(panel.abs_tol / 2.0, opts.abs_tol * 1e-6);
    }
    throw QuadratureError("improper integral: integrand did not decay within the panel budget");
}

}  // namespace mondrian
