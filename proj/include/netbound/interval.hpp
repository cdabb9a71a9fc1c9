#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace netbound {

/// Closed interval over the extended reals. The default-constructed interval
/// is (-inf, +inf), the "unbounded" top element of the abstract domain.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    static Interval all() { return {}; }
    static Interval point(double v) { return {v, v}; }
    static Interval of(double lo, double hi) { return {lo, hi}; }

    bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
    bool contains(double v) const { return v >= lo && v <= hi; }
    bool contains(const Interval& o) const { return o.lo >= lo && o.hi <= hi; }
    double width() const { return hi - lo; }

    Interval hull(const Interval& o) const {
        return {std::min(lo, o.lo), std::max(hi, o.hi)};
    }

    bool operator==(const Interval& o) const = default;
};

inline Interval operator+(const Interval& a, const Interval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
}

/// c * [lo, hi] with an explicit c == 0 guard so 0 * inf never produces NaN.
inline Interval scale(double c, const Interval& x) {
    if (c == 0.0) return Interval::point(0.0);
    const double a = c * x.lo;
    const double b = c * x.hi;
    return {std::min(a, b), std::max(a, b)};
}

/// Per-coordinate interval box.
using Box = std::vector<Interval>;

inline bool box_bounded(const Box& b) {
    for (const auto& iv : b)
        if (!iv.bounded()) return false;
    return true;
}

std::string to_string(const Interval& iv);
std::string to_string(const Box& box);

}  // namespace netbound
