#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "lmgcd/linalg.hpp"

using namespace lmgcd;
using lmgcd::testing::max_abs_diff;

TEST_CASE("collective operators: su(2) algebra") {
    for (int n : {1, 2, 7, 20}) {
        const auto ops = build_collective_ops(n);
        CHECK(max_abs_diff(linalg::commutator(ops.sx, ops.sy), kI * ops.sz) < 1e-12);
        CHECK(max_abs_diff(linalg::commutator(ops.sy, ops.sz), kI * ops.sx) < 1e-12);
        CHECK(max_abs_diff(linalg::commutator(ops.sz, ops.sx), kI * ops.sy) < 1e-12);
        const double s = ops.spin();
        const CMatrix casimir = ops.sx * ops.sx + ops.sy * ops.sy + ops.sz * ops.sz;
        CHECK(max_abs_diff(casimir, s * (s + 1) * CMatrix::Identity(n + 1, n + 1)) < 1e-12);
        CHECK(linalg::hermiticity_defect(ops.sx) < 1e-14);
        CHECK(linalg::hermiticity_defect(ops.sy) < 1e-14);
        CHECK(linalg::hermiticity_defect(ops.sz) < 1e-14);
        CHECK(max_abs_diff(ops.sz2, ops.sz * ops.sz) < 1e-14);
    }
}

TEST_CASE("collective operators: small cases") {
    const auto one = build_collective_ops(1);
    CHECK(one.sz(0, 0).real() == doctest::Approx(0.5));
    CHECK(one.sz(1, 1).real() == doctest::Approx(-0.5));
    CHECK(std::abs(one.sz(0, 1)) == 0.0);

    const auto two = build_collective_ops(2);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(two.sx(i, i)) == 0.0);
    CHECK(two.sx(0, 1).real() == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(two.sx(1, 2).real() == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::abs(two.sx(0, 2)) == 0.0);

    CHECK_THROWS_AS(build_collective_ops(0), ParameterError);
}

TEST_CASE("dicke states") {
    const auto top = dicke_state(4, 2);
    CHECK(top.amplitudes.isApprox(CVector::Unit(5, 0)));
    const auto mid = dicke_state(4, 0);
    CHECK(mid.amplitudes.isApprox(CVector::Unit(5, 2)));
    CHECK_THROWS_AS(dicke_state(3, 0), ParameterError);
    CHECK_THROWS_AS(dicke_state(4, 3), ParameterError);
}

TEST_CASE("coherent states") {
    SUBCASE("theta = 0 is the highest-weight state") {
        for (double phi : {0.0, 0.7, 4.0}) {
            const auto c = coherent_state(9, 0.0, phi);
            CHECK(max_abs_diff(c.amplitudes, CVector::Unit(10, 0)) < 1e-14);
        }
    }
    SUBCASE("theta = pi is the lowest-weight state up to phase") {
        const auto c = coherent_state(9, kPi, 0.0);
        CHECK(std::abs(c.amplitudes(9)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("exponential and closed form agree including phase") {
        const auto ops = build_collective_ops(6);
        const auto c = coherent_state(ops, kPi / 3, 1.1);
        const CVector closed = coherent_amplitudes(6, kPi / 3, 1.1);
        CHECK((c.amplitudes - closed).cwiseAbs().maxCoeff() < 1e-12);
        for (int k = 0; k <= 6; ++k) {
            const double mag = std::sqrt(std::exp(log_binomial(6, k))) * std::pow(std::cos(kPi / 6), 6 - k) *
                               std::pow(std::sin(kPi / 6), k);
            CHECK(std::abs(closed(k) - mag * std::polar(1.0, k * 1.1)) < 1e-13);
        }
    }
    SUBCASE("norm, <Sz> and overlap identity") {
        const int n = 12;
        const auto ops = build_collective_ops(n);
        const double t1 = 0.4, p1 = 2.2, t2 = 1.9, p2 = 2 * kPi - 0.3;
        const auto a = coherent_state(ops, t1, p1);
        const auto b = coherent_state(ops, t2, p2);
        CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(a.amplitudes.dot(ops.sz * a.amplitudes).real() == doctest::Approx(0.5 * n * std::cos(t1)).epsilon(1e-10));
        const double cos_angle = std::cos(t1) * std::cos(t2) + std::sin(t1) * std::sin(t2) * std::cos(p1 - p2);
        const double expected = std::pow((1 + cos_angle) / 2, n);
        CHECK(std::norm(a.amplitudes.dot(b.amplitudes)) == doctest::Approx(expected).epsilon(1e-10));
    }
    SUBCASE("closed form stays finite at large N") {
        const CVector big = coherent_amplitudes(2000, 1.0, 0.5);
        CHECK(big.allFinite());
        CHECK(big.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("parity basis") {
    SUBCASE("sector sizes") {
        CHECK(ParityBasis(2, Parity::Even).size() == 2);
        CHECK(ParityBasis(2, Parity::Odd).size() == 1);
        for (int n : {1, 2, 5, 10, 101}) {
            const ParityBasis even(n, Parity::Even), odd(n, Parity::Odd);
            CHECK(even.size() == n / 2 + 1);
            CHECK(odd.size() == (n + 1) / 2);
            CHECK(even.size() + odd.size() == n + 1);
        }
    }
    SUBCASE("isometry, flip eigenvectors and round trips") {
        for (int n : {6, 7}) {
            const auto ops = build_collective_ops(n);
            CMatrix flip = CMatrix::Zero(n + 1, n + 1);
            for (int k = 0; k <= n; ++k) flip(n - k, k) = 1.0;
            CMatrix assembled = CMatrix::Zero(n + 1, n + 1);
            for (Parity p : {Parity::Even, Parity::Odd}) {
                const ParityBasis basis(n, p);
                const RMatrix q = basis.isometry();
                CHECK((q.transpose() * q - RMatrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff() < 1e-14);
                const double sign = p == Parity::Even ? 1.0 : -1.0;
                CHECK(max_abs_diff(flip * q.cast<cplx>(), sign * q.cast<cplx>()) < 1e-14);
                CHECK(max_abs_diff(basis.restrict(ops.sx), q.transpose().cast<cplx>() * ops.sx * q.cast<cplx>()) < 1e-13);
                basis.embed(basis.restrict(ops.sz2), assembled);
                const CMatrix y = CMatrix::Random(basis.size(), 2);
                CHECK(max_abs_diff(basis.project(basis.lift(y)), y) < 1e-14);
            }
            CHECK(max_abs_diff(assembled, ops.sz2) < 1e-12);
        }
    }
}
