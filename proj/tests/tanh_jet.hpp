#ifndef DRESSING_TESTS_TANH_JET_HPP
#define DRESSING_TESTS_TANH_JET_HPP

#include <cmath>
#include <vector>

#include "dressing/diffpoly.hpp"

namespace testing {

// Jet of σ(x) = k·tanh(kx). Each derivative is a polynomial P(t) in t = tanh(kx)
// and d/dx P(t) = k·P'(t)(1 − t²).
inline dressing::Jet tanh_jet(double x, double k, int order) {
    const double t = std::tanh(k * x);
    std::vector<double> poly{0.0, k};
    std::vector<dressing::Complex> values;
    for (int m = 0; m <= order; ++m) {
        double v = 0.0;
        for (std::size_t i = poly.size(); i-- > 0;) v = v * t + poly[i];
        values.emplace_back(v);
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t i = 1; i < poly.size(); ++i) {
            next[i - 1] += k * i * poly[i];
            next[i + 1] -= k * i * poly[i];
        }
        poly = std::move(next);
    }
    return dressing::Jet(std::move(values));
}

}  // namespace testing

#endif
