#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "lmgcd/linalg.hpp"
#include "lmgcd/spectral.hpp"

using namespace lmgcd;
using lmgcd::testing::max_abs_diff;

TEST_CASE("Floquet eigendecomposition") {
    SUBCASE("identity") {
        const auto f = floquet_eigs(CMatrix::Identity(5, 5), 2.0);
        CHECK(f.quasienergies.cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("diagonal") {
        RVector d(4);
        d << -1.2, 0.3, 0.31, 1.5;
        CMatrix u = CMatrix::Zero(4, 4);
        for (int i = 0; i < 4; ++i) u(i, i) = std::polar(1.0, -d(i) * 2.0);
        const auto f = floquet_eigs(u, 2.0);
        CHECK((f.quasienergies - d).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("driven propagator") {
        const DriveConfig config{20, 3.125, 1.0, CdLevel::CD1, 256};
        const CMatrix u = period_propagator(config);
        const auto f = floquet_eigs(u, config.period(), config);
        CMatrix rebuilt = CMatrix::Zero(21, 21);
        for (int k = 0; k < 21; ++k) {
            const cplx phase = std::polar(1.0, -f.quasienergies(k) * f.period);
            CHECK((u * f.eigenvectors.col(k) - phase * f.eigenvectors.col(k)).norm() < 1e-9);
            rebuilt += phase * f.eigenvectors.col(k) * f.eigenvectors.col(k).adjoint();
        }
        CHECK(max_abs_diff(rebuilt, u) < 1e-9);
        for (int k = 0; k < 21; ++k) {
            CHECK(f.quasienergies(k) > -kPi / f.period);
            CHECK(f.quasienergies(k) <= kPi / f.period);
        }
    }
    SUBCASE("non-unitary input") { CHECK_THROWS_AS(floquet_eigs(2.0 * CMatrix::Identity(3, 3), 1.0), ParameterError); }
}

TEST_CASE("parity resolution") {
    SUBCASE("parity operator is the flip") {
        for (int n : {2, 5, 8}) {
            const auto ops = build_collective_ops(n);
            const CMatrix p = parity_operator(ops);
            CHECK(max_abs_diff(p * p, CMatrix::Identity(n + 1, n + 1)) < 1e-12);
            for (int k = 0; k <= n; ++k) CHECK(std::abs(p(n - k, k) - 1.0) < 1e-12);
        }
    }
    SUBCASE("sector sizes") {
        for (int n : {2, 9, 16}) {
            const auto ops = build_collective_ops(n);
            const DriveConfig config{n, 2.0, 1.0, CdLevel::None, 128};
            const auto resolved = parity_resolve(floquet_eigs(period_propagator(config), 2.0, config), ops);
            CHECK(resolved.even.size() == static_cast<std::size_t>(n / 2 + 1));
            CHECK(resolved.odd.size() == static_cast<std::size_t>((n + 1) / 2));
        }
    }
}

TEST_CASE("level-spacing ratios") {
    SUBCASE("equal spacing") {
        std::vector<double> levels;
        for (int k = 0; k < 50; ++k) levels.push_back(-kPi + (k + 0.5) * 2 * kPi / 50);
        const auto s = r_statistics(levels, 1.0);
        for (double r : s.r_values) CHECK(r == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("Poisson levels") {
        std::mt19937_64 rng(lmgcd::testing::kSeed);
        std::uniform_real_distribution<double> u(-kPi, kPi);
        std::vector<double> levels(100000);
        for (auto& x : levels) x = u(rng);
        const auto s = r_statistics(levels, 1.0);
        CHECK(std::abs(s.r_mean - (2 * std::log(2.0) - 1)) < 0.005);
        CHECK(std::abs(s.r_mean - 0.386) < 0.005);
    }
    SUBCASE("invariant under a global quasienergy shift") {
        std::mt19937_64 rng(lmgcd::testing::kSeed + 3);
        std::uniform_real_distribution<double> u(-kPi / 2, kPi / 2);
        std::vector<double> levels(300);
        for (auto& x : levels) x = u(rng);
        const double period = 2.0;
        const double reference = r_statistics(levels, period).r_mean;
        for (int trial = 0; trial < 3; ++trial) {
            const double shift = u(rng) * 4;
            std::vector<double> moved;
            for (double e : levels) moved.push_back(std::remainder(e + shift, 2 * kPi / period));
            CHECK(r_statistics(moved, period).r_mean == doctest::Approx(reference).epsilon(1e-12));
        }
    }
    SUBCASE("repeated levels are merged and counted") {
        const auto s = r_statistics({-1.0, 0.0, 0.0, 0.5, 2.0}, 1.0);
        CHECK(s.degeneracies == 1);
        CHECK(s.levels == 4);
    }
}

TEST_CASE("eigenstate overlaps") {
    const DriveConfig config{14, 3.125, 1.0, CdLevel::CD2, 256};
    const auto f = floquet_eigs(period_propagator(config), 2.0, config);
    const DickeState eigen{14, f.eigenvectors.col(5)};
    CHECK(max_eigenstate_overlap(eigen, f) == doctest::Approx(1.0).epsilon(1e-12));
    const DickeState psi = coherent_state(14, 1.0, 0.4);
    CHECK(eigenstate_overlaps(psi, f).sum() == doctest::Approx(1.0).epsilon(1e-10));
}
