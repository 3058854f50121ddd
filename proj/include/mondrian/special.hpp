#pragma once

namespace mondrian {

enum class GSeries { G1, G2, G3 };

// Alternating series of the variance formulas:
//   g1(x) = sum_k (-1)^k x^k / (k (k+1)!)
//   g2(x) = sum_k (-1)^k x^k / (k (k+1) (k+2)!)
//   g3(x) = sum_k (-1)^k x^k / (k (k+1) (k+1)!)
// Direct summation up to x = 30, closed form in Ein beyond.
double g1(double x);
double g2(double x);
double g3(double x);
double g_eval(GSeries which, double x);

inline constexpr double kSeriesRegimeLimit = 30.0;

// Series summed in 113-bit floating point.
double g_series(GSeries which, double x);
// Closed form via Ein(x) = gamma + ln x + E1(x); loses accuracy for small x.
double g_closed(GSeries which, double x);

// Entire exponential integral Ein(x) = int_0^x (1 - e^{-s})/s ds.
double ein(double x);

}  // namespace mondrian
