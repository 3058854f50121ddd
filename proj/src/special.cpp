#include "mondrian/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace mondrian {

namespace {

using quad = boost::multiprecision::cpp_bin_float_quad;

void check_domain(double x) {
    if (!(x >= 0.0) || std::isnan(x)) throw std::domain_error("g-series argument must be >= 0");
}

}  // namespace

double g_series(GSeries which, double x) {
    check_domain(x);
    if (x == 0.0) return 0.0;
    const quad qx = x;
    quad power = 1;  // x^k / k!
    quad sum = 0;
    for (int k = 1; k < 2000; ++k) {
        power *= qx;
        power /= k;
        quad denom = quad(k) * (k + 1);
        if (which == GSeries::G2) denom *= quad(k + 1) * (k + 2);
        if (which == GSeries::G3) denom *= (k + 1);
        const quad term = power / denom;
        sum += (k % 2 ? -term : term);
        if (k > x && term < 1e-30 * (1 + abs(sum))) break;
    }
    return static_cast<double>(sum);
}

double ein(double x) {
    if (!(x >= 0.0)) throw std::domain_error("Ein argument must be >= 0");
    if (x == 0.0) return 0.0;
    if (x < 1.0) {
        // Power series: sum_{k>=1} (-1)^{k+1} x^k / (k k!).
        double term = 1.0, sum = 0.0;
        for (int k = 1; k < 60; ++k) {
            term *= x / k;
            const double add = term / k;
            sum += (k % 2 ? add : -add);
            if (add < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return std::numbers::egamma + std::log(x) - std::expint(-x);
}

double g_closed(GSeries which, double x) {
    check_domain(x);
    if (x == 0.0) return 0.0;
    const double e = ein(x);
    const double em = std::exp(-x);
    const double one_minus = -std::expm1(-x);
    switch (which) {
        case GSeries::G1:
            return 1.0 - e - one_minus / x;
        case GSeries::G2:
            return 1.25 - 0.5 / (x * x) - (0.5 + 1.0 / x) * e + em * (1.0 + x) / (2.0 * x * x);
        case GSeries::G3:
            return 2.0 - (1.0 + 1.0 / x) * e - one_minus / x;
    }
    throw std::logic_error("unknown series");
}

double g_eval(GSeries which, double x) {
    check_domain(x);
    return x <= kSeriesRegimeLimit ? g_series(which, x) : g_closed(which, x);
}

double g1(double x) { return g_eval(GSeries::G1, x); }
double g2(double x) { return g_eval(GSeries::G2, x); }
double g3(double x) { return g_eval(GSeries::G3, x); }

}  // namespace mondrian
