#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pfaffnet {

/// Axis-aligned box [lo, hi] in R^d.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    Box() = default;
    Box(std::vector<double> lo_, std::vector<double> hi_);

    /// Cube [lo, hi]^d.
    static Box cube(std::size_t d, double lo, double hi);

    std::size_t dim() const noexcept { return lo.size(); }
    double width(std::size_t axis) const { return hi[axis] - lo[axis]; }
    bool contains(std::span<const double> x) const;

    /// Throws ShapeError unless lo and hi agree in size, d >= 1 and lo < hi on every axis.
    void validate() const;

    friend bool operator==(const Box&, const Box&) = default;
};

} // namespace pfaffnet
