#ifndef DRESSING_RK4_HPP
#define DRESSING_RK4_HPP

#include <cstddef>
#include <vector>

namespace dressing {

using State = std::vector<double>;

// One classical fourth-order step of y' = f(y).
template <class F>
State rk4_step(F&& f, const State& y, double h) {
    const std::size_t n = y.size();
    auto shifted = [&](const State& k, double a) {
        State out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + a * k[i];
        return out;
    };
    const State k1 = f(y);
    const State k2 = f(shifted(k1, h / 2));
    const State k3 = f(shifted(k2, h / 2));
    const State k4 = f(shifted(k3, h));
    State out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
}

}  // namespace dressing

#endif
