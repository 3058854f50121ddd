#pragma once

#include <stdexcept>

namespace mondrian {

// Direction weight p in (0,1). Horizontal lines carry mass p, vertical 1-p.
class Weight {
public:
    explicit Weight(double p);
    double value() const { return p_; }
    double complement() const { return 1.0 - p_; }
    Weight swapped() const { return Weight(1.0 - p_); }

private:
    double p_;
};

class Rect {
public:
    Rect(double x_min, double x_max, double y_min, double y_max);

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    double y_min() const { return y_min_; }
    double y_max() const { return y_max_; }
    double width() const { return x_max_ - x_min_; }
    double height() const { return y_max_ - y_min_; }
    double area() const { return width() * height(); }
    double min_extent() const;

    bool contains(const Rect& other) const;
    bool contains_point(double x, double y) const;
    bool interior_point(double x, double y) const;

    friend bool operator==(const Rect&, const Rect&) = default;

private:
    double x_min_, x_max_, y_min_, y_max_;
};

enum class Orientation { H, V };

// Axis-parallel segment. H: y = fixed, x in [lo,hi]. V: x = fixed, y in [lo,hi].
class Segment {
public:
    Segment(Orientation o, double fixed, double lo, double hi);

    Orientation orientation() const { return o_; }
    double fixed() const { return fixed_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double length() const { return hi_ - lo_; }
    double mid() const { return 0.5 * (lo_ + hi_); }

    friend bool operator==(const Segment&, const Segment&) = default;

private:
    Orientation o_;
    double fixed_, lo_, hi_;
};

double lambda_rect(const Rect& w, Weight p);
double lambda_segment(const Segment& s, Weight p);
double rect_translation_overlap(const Rect& w, double dx, double dy);

}  // namespace mondrian
