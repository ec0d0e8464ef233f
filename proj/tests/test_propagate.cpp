#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "helpers.hpp"
#include "lmgcd/experiments.hpp"
#include "lmgcd/linalg.hpp"
#include "lmgcd/observables.hpp"
#include "lmgcd/propagate.hpp"

using namespace lmgcd;
using lmgcd::testing::max_abs_diff;

TEST_CASE("Floquet operator without interaction") {
    const int n = 10;
    const double tau = 1.0, j = 1e-12;
    const auto ops = build_collective_ops(n);
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) { return 1.0 - schedule(t, tau).lambda; }, 0.0, 2 * tau, 15, 1e-14);
    const CMatrix expected = linalg::expm_hermitian(-2.0 * integral * ops.sx, 1.0);
    const CMatrix u = period_propagator(DriveConfig{n, j, tau, CdLevel::None, 1024});
    CHECK(max_abs_diff(u, expected) < 1e-8);
}

TEST_CASE("unitarity and step doubling") {
    for (CdLevel level : {CdLevel::None, CdLevel::CD1, CdLevel::CD2}) {
        const DriveConfig config{12, 3.125, 1.0, level, 256};
        const auto c = converged_period_propagator(config, 1e-8);
        CHECK(c.self_change < 1e-8);
        CHECK(linalg::unitarity_defect(c.u_f) < 1e-10);
        CHECK(max_abs_diff(assemble(c.sectors, 12), c.u_f) == 0.0);
    }
    CHECK_THROWS_AS(converged_period_propagator(DriveConfig{12, 3.125, 1.0, CdLevel::CD2, 16}, 1e-14, 64),
                    ConvergenceError);
}

TEST_CASE("sector blocks reproduce an unblocked integration") {
    const int n = 7;
    const auto ops = build_collective_ops(n);
    const DriveConfig config{n, 2.0, 1.0, CdLevel::CD2, 2048};
    const CMatrix u = period_propagator(config, Integrator::Midpoint);
    CMatrix direct = CMatrix::Identity(n + 1, n + 1);
    const double h = config.period() / config.steps_per_period;
    for (int s = 0; s < config.steps_per_period; ++s)
        direct = linalg::expm_hermitian(cd_hamiltonian(ops, config, (s + 0.5) * h), h) * direct;
    CHECK(max_abs_diff(u, direct) < 1e-11);
}

TEST_CASE("midpoint converges at second order, Magnus4 at fourth") {
    const DriveConfig base{10, 2.0, 1.0, CdLevel::CD1, 32};
    auto at = [&](int steps, Integrator integrator) {
        DriveConfig c = base;
        c.steps_per_period = steps;
        return period_propagator(c, integrator);
    };
    for (auto [integrator, order] : {std::pair{Integrator::Midpoint, 4.0}, std::pair{Integrator::Magnus4, 16.0}}) {
        std::vector<double> changes;
        CMatrix previous = at(32, integrator);
        for (int steps = 64; steps <= 512; steps *= 2) {
            const CMatrix next = at(steps, integrator);
            changes.push_back(max_abs_diff(next, previous));
            previous = next;
        }
        for (std::size_t i = 1; i < changes.size(); ++i) {
            const double ratio = changes[i - 1] / changes[i];
            CHECK(ratio > order / 1.5);
            CHECK(ratio < order * 1.5);
        }
    }
}

TEST_CASE("stroboscopic evolution") {
    const int n = 6;
    const auto ops = build_collective_ops(n);
    const DriveConfig config{n, 2.0, 1.0, CdLevel::CD1, 256};
    const CdDrive drive(ops, config.coupling, config.cd_level);
    const CMatrix u = period_propagator(drive, config);
    const auto psi0 = experiments::x_polarized(ops);

    const auto states = evolve_stroboscopic(u, psi0, 50);
    REQUIRE(states.size() == 51);
    CHECK(states[0].amplitudes == psi0.amplitudes);
    const auto direct = integrate_state(drive, config, psi0, 50 * config.period());
    CHECK((states[50].amplitudes - direct.amplitudes).norm() < 1e-7);
    CHECK(max_norm_drift(states) < 1e-12);

    const auto floquet = floquet_eigs(u, config.period(), config);
    const DickeState eigen{n, floquet.eigenvectors.col(3)};
    for (const auto& s : evolve_stroboscopic(u, eigen, 20)) CHECK(fidelity(s, eigen) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("micromotion") {
    const int n = 8;
    const auto ops = build_collective_ops(n);
    const DriveConfig config{n, 3.125, 1.0, CdLevel::CD2, 512};
    const CdDrive drive(ops, config.coupling, config.cd_level);
    const CMatrix u = period_propagator(drive, config);
    const auto psi0 = coherent_state(ops, 0.8, 0.3);
    const std::vector<double> times{0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.25, 6.0};
    const auto micro = micromotion(drive, config, u, psi0, times);
    const auto strobe = evolve_stroboscopic(u, psi0, 3);
    CHECK((micro[0].amplitudes - psi0.amplitudes).norm() == 0.0);
    for (int k = 1; k <= 3; ++k) CHECK(1.0 - fidelity(micro[2 * k + 1], strobe[k]) < 1e-10);
    CHECK(1.0 - fidelity(micro[3], strobe[1]) < 1e-10);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto direct = integrate_state(drive, config, psi0, times[i]);
        CHECK((micro[i].amplitudes - direct.amplitudes).norm() < 1e-8);
    }
    CHECK_THROWS_AS(micromotion(drive, config, u, psi0, {1.0, 0.5}), ParameterError);
}

TEST_CASE("annealing") {
    SUBCASE("slow sweep prepares the Dicke state") {
        const auto ops = build_collective_ops(8);
        const DriveConfig config{8, 2.0, 200.0, CdLevel::None, 8192};
        const auto out = anneal_half_period(config, experiments::x_polarized(ops));
        CHECK(dicke_overlap(out) > 0.99);
    }
    SUBCASE("fast sweep: CD enhances the Dicke overlap at small J") {
        const auto ops = build_collective_ops(100);
        const auto psi0 = experiments::x_polarized(ops);
        const double bare = dicke_overlap(anneal_half_period(DriveConfig{100, 0.25, 1.0, CdLevel::None, 1024}, psi0));
        const double cd1 = dicke_overlap(anneal_half_period(DriveConfig{100, 0.25, 1.0, CdLevel::CD1, 1024}, psi0));
        CHECK(bare < 0.1);
        CHECK(cd1 > bare);
    }
}
