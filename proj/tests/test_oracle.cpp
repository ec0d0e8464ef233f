#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "lmgcd/experiments.hpp"
#include "lmgcd/linalg.hpp"
#include "lmgcd/oracle.hpp"

using namespace lmgcd;
using lmgcd::testing::max_abs_diff;

TEST_CASE("full-space Hamiltonian") {
    const int n = 6;
    const auto ops = build_collective_ops(n);
    const RMatrix e = oracle::dicke_embedding(n);
    CHECK((e.transpose() * e - RMatrix::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff() < 1e-13);
    const CMatrix full = oracle::full_hamiltonian(n, 0.4, 2.0);
    const CMatrix restricted = e.transpose().cast<cplx>() * full * e.cast<cplx>();
    CHECK(max_abs_diff(restricted, lmg_hamiltonian(ops, 0.4, 2.0)) < 1e-12);

    const auto fops = oracle::build_full_ops(n);
    const CMatrix s2 = fops.sx * fops.sx + fops.sy * fops.sy + fops.sz * fops.sz;
    CHECK(max_abs_diff(linalg::commutator(full, s2), CMatrix::Zero(full.rows(), full.cols())) < 1e-12);

    const auto free = linalg::eigh(oracle::full_hamiltonian(n, 0.0, 2.0));
    int index = 0;
    for (int k = 0; k <= n; ++k) {
        const int mult = static_cast<int>(std::lround(std::exp(log_binomial(n, k))));
        for (int r = 0; r < mult; ++r) CHECK(free.values(index++) == doctest::Approx(-n + 2.0 * k).epsilon(1e-12));
    }
    CHECK_THROWS_AS(oracle::full_hamiltonian(9, 0.1, 1.0), ParameterError);
}

TEST_CASE("full-space coherent states and Husimi values") {
    const int n = 5;
    const auto fops = oracle::build_full_ops(n);
    const auto full = oracle::full_coherent_state(fops, 0.9, 2.1);
    const auto projected = oracle::project_to_sector(full);
    CHECK(projected.leakage < 1e-12);
    CHECK(std::norm(projected.state.amplitudes.dot(coherent_amplitudes(n, 0.9, 2.1))) ==
          doctest::Approx(1.0).epsilon(1e-12));
    std::mt19937_64 rng(lmgcd::testing::kSeed);
    const auto psi = lmgcd::testing::random_state(n, rng);
    const double q = std::norm(coherent_amplitudes(n, 0.4, 1.0).dot(psi.amplitudes));
    CHECK(std::abs(oracle::full_husimi(oracle::embed(psi), fops, 0.4, 1.0) - q) < 1e-12);
}

TEST_CASE("Taylor exponential") {
    const auto ops = build_collective_ops(6);
    const CMatrix h = lmg_hamiltonian(ops, 0.3, 2.0);
    const CVector v = coherent_amplitudes(6, 1.0, 0.5);
    CHECK((oracle::taylor_expm_apply(h, 0.37, v) - linalg::expm_hermitian(h, 0.37) * v).norm() < 1e-13);
}

TEST_CASE("full-space evolution matches the sector") {
    for (auto [n, level] : {std::pair{4, CdLevel::CD2}, std::pair{6, CdLevel::CD1}, std::pair{5, CdLevel::None}}) {
        const auto result = experiments::oracle_case({n, level}, 2.0, 1.0, 128, 3, 10, lmgcd::testing::kSeed);
        CAPTURE(n);
        CHECK(result.passed);
        CHECK(result.max_deficit < experiments::kOracleDeficitTolerance);
        CHECK(result.max_observable_error < experiments::kOracleObservableTolerance);
        CHECK(result.max_leakage < 1e-10);
        CHECK(result.samples.size() == 7);
    }
}
