#include "pfaffnet/geometry.hpp"

#include "pfaffnet/errors.hpp"

#include <cmath>
#include <string>

namespace pfaffnet {

Box::Box(std::vector<double> lo_, std::vector<double> hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    validate();
}

Box Box::cube(std::size_t d, double lo, double hi) {
    return Box(std::vector<double>(d, lo), std::vector<double>(d, hi));
}

bool Box::contains(std::span<const double> x) const {
    if (x.size() != dim())
        return false;
    for (std::size_t a = 0; a < dim(); ++a)
        if (x[a] < lo[a] || x[a] > hi[a])
            return false;
    return true;
}

void Box::validate() const {
    if (lo.size() != hi.size())
        throw ShapeError("box bounds have different lengths");
    if (lo.empty())
        throw ShapeError("box must have dimension >= 1");
    for (std::size_t a = 0; a < lo.size(); ++a)
        if (!std::isfinite(lo[a]) || !std::isfinite(hi[a]) || !(lo[a] < hi[a]))
            throw ShapeError("box axis " + std::to_string(a) + " is empty or unbounded");
}

} // namespace pfaffnet
