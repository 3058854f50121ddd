#include "mondrian/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mondrian {

Weight::Weight(double p) : p_(p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("weight p must lie in (0,1), got " + std::to_string(p));
}

Rect::Rect(double x_min, double x_max, double y_min, double y_max)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(y_min) ||
        !std::isfinite(y_max))
        throw std::invalid_argument("rectangle coordinates must be finite");
    if (!(x_min < x_max) || !(y_min < y_max))
        throw std::invalid_argument("rectangle needs x_min < x_max and y_min < y_max");
}

double Rect::min_extent() const { return std::min(width(), height()); }

bool Rect::contains(const Rect& o) const {
    return o.x_min_ >= x_min_ && o.x_max_ <= x_max_ && o.y_min_ >= y_min_ && o.y_max_ <= y_max_;
}

bool Rect::contains_point(double x, double y) const {
    return x >= x_min_ && x <= x_max_ && y >= y_min_ && y <= y_max_;
}

bool Rect::interior_point(double x, double y) const {
    return x > x_min_ && x < x_max_ && y > y_min_ && y < y_max_;
}

Segment::Segment(Orientation o, double fixed, double lo, double hi)
    : o_(o), fixed_(fixed), lo_(lo), hi_(hi) {
    if (!std::isfinite(fixed) || !std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("segment coordinates must be finite");
    if (!(lo < hi)) throw std::invalid_argument("segment needs lo < hi");
}

double lambda_rect(const Rect& w, Weight p) {
    return p.value() * w.height() + p.complement() * w.width();
}

double lambda_segment(const Segment& s, Weight p) {
    return (s.orientation() == Orientation::H ? p.complement() : p.value()) * s.length();
}

double rect_translation_overlap(const Rect& w, double dx, double dy) {
    return std::max(0.0, w.width() - std::abs(dx)) * std::max(0.0, w.height() - std::abs(dy));
}

}  // namespace mondrian
