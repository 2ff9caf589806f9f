#pragma once

#include <cmath>
#include <random>

#include "dqca/core.hpp"

namespace dqca_test {

/// Unit-norm state with random complex spinors on [x_lo, x_hi].
inline dqca::FieldState random_state(std::mt19937& rng, int x_lo, int x_hi) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    dqca::FieldState s;
    s.offset = x_lo;
    s.amps.resize(static_cast<std::size_t>(x_hi - x_lo) + 1);
    for (auto& a : s.amps) {
        a.up = {u(rng), u(rng)};
        a.lo = {u(rng), u(rng)};
    }
    double scale = 1.0 / std::sqrt(s.norm_sq());
    for (auto& a : s.amps) {
        a.up *= scale;
        a.lo *= scale;
    }
    return s;
}

}  // namespace dqca_test
