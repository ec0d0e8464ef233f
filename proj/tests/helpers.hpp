#pragma once

#include <cstdint>
#include <random>

#include "lmgcd/spin_core.hpp"

namespace lmgcd::testing {

inline constexpr std::uint64_t kSeed = 20240917;

inline DickeState random_state(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CVector a(n + 1);
    for (auto& x : a) x = {g(rng), g(rng)};
    a.normalize();
    return {n, a};
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace lmgcd::testing
