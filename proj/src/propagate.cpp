#include "lmgcd/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lmgcd/linalg.hpp"

namespace lmgcd {

std::string to_string(Integrator integrator) {
    return integrator == Integrator::Midpoint ? "midpoint" : "magnus4";
}

Integrator parse_integrator(const std::string& text) {
    if (text == "midpoint") return Integrator::Midpoint;
    if (text == "magnus4") return Integrator::Magnus4;
    throw ParameterError("unknown integrator '" + text + "' (expected midpoint or magnus4)");
}

namespace {

using magnus4::kNode1;
using magnus4::kNode2;
using magnus4::kWeight1;
using magnus4::kWeight2;

// Both flip sectors advanced together; H_CD is flip-symmetric, so each sector
// evolves under its own block.
struct SectorState {
    ParityBasis even_basis;
    ParityBasis odd_basis;
    CMatrix even;
    CMatrix odd;
};

void apply_block(const ParityBasis& basis, const CMatrix& h, double dt, CMatrix& x) {
    if (x.rows() == 0) return;
    linalg::apply_hermitian_exp(basis.restrict(h), dt, x);
}

void substep(const CdDrive& drive, double tau, double t, double dt, Integrator integrator, SectorState& x) {
    if (integrator == Integrator::Midpoint) {
        const CMatrix h = drive.hamiltonian_at(t + 0.5 * dt, tau);
        apply_block(x.even_basis, h, dt, x.even);
        apply_block(x.odd_basis, h, dt, x.odd);
        return;
    }
    const CMatrix h1 = drive.hamiltonian_at(t + kNode1 * dt, tau);
    const CMatrix h2 = drive.hamiltonian_at(t + kNode2 * dt, tau);
    const CMatrix first = kWeight1 * h1 + kWeight2 * h2;
    const CMatrix second = kWeight2 * h1 + kWeight1 * h2;
    apply_block(x.even_basis, first, dt, x.even);
    apply_block(x.even_basis, second, dt, x.even);
    apply_block(x.odd_basis, first, dt, x.odd);
    apply_block(x.odd_basis, second, dt, x.odd);
}

void advance(const CdDrive& drive, double tau, int steps_per_period, double t0, double t1,
             Integrator integrator, SectorState& x) {
    if (t0 < 0.0 || t1 < t0) throw ParameterError("propagation interval must satisfy 0 <= t0 <= t1");
    const double h = 2.0 * tau / steps_per_period;
    const double eps = 1e-12 * h;
    double t = t0;
    while (t1 - t > eps) {
        const double cell = std::floor(t / h + 1e-9);
        double stop = (cell + 1.0) * h;
        if (stop - t <= eps) stop += h;
        if (stop >= t1 || t1 - stop <= eps) stop = t1;
        substep(drive, tau, t, stop - t, integrator, x);
        t = stop;
    }
}

SectorState sector_identity(const CdDrive& drive) {
    const int n = static_cast<int>(drive.dim()) - 1;
    SectorState x{ParityBasis(n, Parity::Even), ParityBasis(n, Parity::Odd), {}, {}};
    x.even = CMatrix::Identity(x.even_basis.size(), x.even_basis.size());
    x.odd = CMatrix::Identity(x.odd_basis.size(), x.odd_basis.size());
    return x;
}

// Columns of `states` advanced from t0 to t1.
void advance_states(const CdDrive& drive, double tau, int steps_per_period, double t0, double t1,
                    Integrator integrator, CMatrix& states) {
    const int n = static_cast<int>(drive.dim()) - 1;
    SectorState x{ParityBasis(n, Parity::Even), ParityBasis(n, Parity::Odd), {}, {}};
    x.even = x.even_basis.project(states);
    x.odd = x.odd_basis.project(states);
    advance(drive, tau, steps_per_period, t0, t1, integrator, x);
    states = x.even_basis.lift(x.even) + x.odd_basis.lift(x.odd);
}

CollectiveOps checked_ops(const DriveConfig& config) {
    config.validate();
    return build_collective_ops(config.n_particles);
}

}  // namespace

SectorPropagators sector_propagators(const CdDrive& drive, double tau, int steps_per_period, double t0, double t1,
                                     Integrator integrator) {
    SectorState x = sector_identity(drive);
    advance(drive, tau, steps_per_period, t0, t1, integrator, x);
    return {std::move(x.even), std::move(x.odd)};
}

CMatrix assemble(const SectorPropagators& sectors, int n_particles) {
    const ParityBasis even(n_particles, Parity::Even);
    const ParityBasis odd(n_particles, Parity::Odd);
    CMatrix u = CMatrix::Zero(even.full_dim(), even.full_dim());
    even.embed(sectors.even, u);
    if (odd.size() > 0) odd.embed(sectors.odd, u);
    return u;
}

CMatrix propagate_interval(const CdDrive& drive, double tau, int steps_per_period, double t0, double t1,
                           Integrator integrator) {
    return assemble(sector_propagators(drive, tau, steps_per_period, t0, t1, integrator),
                    static_cast<int>(drive.dim()) - 1);
}

CMatrix period_propagator(const CdDrive& drive, const DriveConfig& config, Integrator integrator) {
    config.validate();
    return propagate_interval(drive, config.tau, config.steps_per_period, 0.0, config.period(), integrator);
}

CMatrix period_propagator(const DriveConfig& config, Integrator integrator) {
    const CdDrive drive(checked_ops(config), config.coupling, config.cd_level);
    return period_propagator(drive, config, integrator);
}

ConvergedPropagator converged_period_propagator(const CdDrive& drive, const DriveConfig& config,
                                                double tolerance, int max_steps, Integrator integrator) {
    config.validate();
    int steps = config.steps_per_period;
    auto build = [&](int count) {
        return sector_propagators(drive, config.tau, count, 0.0, config.period(), integrator);
    };
    SectorPropagators previous = build(steps);
    CMatrix previous_full = assemble(previous, config.n_particles);
    double change = 0.0;
    while (true) {
        if (2 * steps > max_steps)
            throw ConvergenceError("U_F not converged to " + std::to_string(tolerance) + " within " +
                                   std::to_string(max_steps) + " steps per period (last change " +
                                   std::to_string(change) + ")");
        steps *= 2;
        SectorPropagators refined = build(steps);
        CMatrix refined_full = assemble(refined, config.n_particles);
        change = linalg::max_abs(refined_full - previous_full);
        if (change < tolerance) {
            const double raw = linalg::unitarity_defect(refined_full);
            refined.even = linalg::nearest_unitary(refined.even);
            if (refined.odd.size() > 0) refined.odd = linalg::nearest_unitary(refined.odd);
            return {assemble(refined, config.n_particles), std::move(refined), steps, change, raw};
        }
        previous = std::move(refined);
        previous_full = std::move(refined_full);
    }
}

ConvergedPropagator converged_period_propagator(const DriveConfig& config, double tolerance, int max_steps,
                                                Integrator integrator) {
    const CdDrive drive(checked_ops(config), config.coupling, config.cd_level);
    return converged_period_propagator(drive, config, tolerance, max_steps, integrator);
}

std::vector<DickeState> evolve_stroboscopic(const CMatrix& u_f, const DickeState& psi0, int n_periods) {
    if (u_f.rows() != psi0.amplitudes.size()) throw ParameterError("U_F and state dimensions differ");
    if (n_periods < 0) throw ParameterError("period count must be nonnegative");
    std::vector<DickeState> out;
    out.reserve(static_cast<std::size_t>(n_periods) + 1);
    out.push_back(psi0);
    for (int n = 0; n < n_periods; ++n) {
        DickeState next{psi0.n_particles, u_f * out.back().amplitudes};
        out.push_back(std::move(next));
    }
    return out;
}

double max_norm_drift(const std::vector<DickeState>& states) {
    double drift = 0.0;
    for (const auto& s : states) drift = std::max(drift, std::abs(s.norm() - 1.0));
    return drift;
}

std::vector<DickeState> micromotion(const CdDrive& drive, const DriveConfig& config, const CMatrix& u_f,
                                    const DickeState& psi0, const std::vector<double>& sample_times,
                                    Integrator integrator) {
    config.validate();
    if (psi0.amplitudes.size() != drive.dim()) throw ParameterError("state dimension mismatch");
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        if (!(sample_times[i] >= 0.0)) throw ParameterError("sample times must be nonnegative");
        if (i > 0 && sample_times[i] < sample_times[i - 1]) throw ParameterError("sample times must be sorted");
    }
    const double period = config.period();
    const double snap = 1e-12 * period;

    struct Slot {
        std::size_t index;
        long periods;
        double phase;
    };
    std::vector<Slot> slots;
    long max_periods = 0;
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        long n = static_cast<long>(std::floor(sample_times[i] / period));
        double phase = sample_times[i] - n * period;
        if (phase < snap) phase = 0.0;
        if (period - phase < snap) {
            ++n;
            phase = 0.0;
        }
        slots.push_back({i, n, phase});
        max_periods = std::max(max_periods, n);
    }

    std::vector<CVector> strobe;
    strobe.reserve(static_cast<std::size_t>(max_periods) + 1);
    strobe.push_back(psi0.amplitudes);
    for (long n = 0; n < max_periods; ++n) strobe.push_back(u_f * strobe.back());

    std::stable_sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) { return a.phase < b.phase; });
    std::vector<DickeState> out(sample_times.size());
    CMatrix u_phase = CMatrix::Identity(drive.dim(), drive.dim());
    double current = 0.0;
    for (const auto& slot : slots) {
        if (slot.phase > current) {
            const SectorPropagators step =
                sector_propagators(drive, config.tau, config.steps_per_period, current, slot.phase, integrator);
            u_phase = assemble(step, psi0.n_particles) * u_phase;
            current = slot.phase;
        }
        out[slot.index] = DickeState{psi0.n_particles, u_phase * strobe[static_cast<std::size_t>(slot.periods)]};
    }
    return out;
}

std::vector<DickeState> micromotion(const DriveConfig& config, const DickeState& psi0,
                                    const std::vector<double>& sample_times, Integrator integrator) {
    const CdDrive drive(checked_ops(config), config.coupling, config.cd_level);
    const CMatrix u_f = period_propagator(drive, config, integrator);
    return micromotion(drive, config, u_f, psi0, sample_times, integrator);
}

DickeState integrate_state(const CdDrive& drive, const DriveConfig& config, const DickeState& psi0,
                           double t_end, Integrator integrator) {
    config.validate();
    if (psi0.amplitudes.size() != drive.dim()) throw ParameterError("state dimension mismatch");
    CMatrix x = psi0.amplitudes;
    advance_states(drive, config.tau, config.steps_per_period, 0.0, t_end, integrator, x);
    return DickeState{psi0.n_particles, x.col(0)};
}

DickeState anneal_half_period(const DriveConfig& config, const DickeState& psi0, Integrator integrator) {
    const CdDrive drive(checked_ops(config), config.coupling, config.cd_level);
    return integrate_state(drive, config, psi0, config.tau, integrator);
}

}  // namespace lmgcd
