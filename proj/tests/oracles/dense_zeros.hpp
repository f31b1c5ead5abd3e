#pragma once

// Dense-grid zero counter: n uniform samples, one bisection per sign change.

#include <cstddef>
#include <vector>

namespace oracle {

template <class F>
std::vector<double> dense_zeros(F&& f, double lo, double hi, std::size_t n = 1000000) {
    std::vector<double> out;
    double xa = lo + (hi - lo) * 0.5 / n;
    double fa = f(xa);
    for (std::size_t i = 1; i < n; ++i) {
        const double xb = lo + (hi - lo) * (i + 0.5) / n;
        const double fb = f(xb);
        if ((fa >= 0) != (fb >= 0)) {
            double a = xa, b = xb;
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (a + b);
                ((f(m) >= 0) == (fa >= 0) ? a : b) = m;
            }
            out.push_back(0.5 * (a + b));
        }
        xa = xb;
        fa = fb;
    }
    return out;
}

} // namespace oracle
