#include "lmgcd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "lmgcd/observables.hpp"
#include "lmgcd/oracle.hpp"

namespace lmgcd::experiments {

namespace {

std::vector<double> to_std(const RVector& v) { return {v.data(), v.data() + v.size()}; }

double mean_from(const std::vector<double>& v, std::size_t first) {
    if (first >= v.size()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(first), v.end(), 0.0) /
           static_cast<double>(v.size() - first);
}

SpacingStats stats_or_empty(const std::vector<double>& levels, double period, Sector sector) {
    if (levels.size() < 3) {
        SpacingStats empty;
        empty.sector = sector;
        empty.r_mean = std::numeric_limits<double>::quiet_NaN();
        return empty;
    }
    return r_statistics(levels, period, sector);
}

// States at (n + 1/2) T for n = 0 .. count - 1.
std::vector<DickeState> mid_period_states(const Propagator& p, const DickeState& psi0, int count,
                                          Integrator integrator) {
    std::vector<double> times(static_cast<std::size_t>(count));
    for (int n = 0; n < count; ++n) times[static_cast<std::size_t>(n)] = (n + 0.5) * p.config.period();
    return micromotion(p.drive, p.config, p.converged.u_f, psi0, times, integrator);
}

}  // namespace

DriveConfig DriveSettings::drive_config(double coupling, CdLevel level) const {
    DriveConfig c;
    c.n_particles = n_particles;
    c.coupling = coupling;
    c.tau = tau;
    c.cd_level = level;
    c.steps_per_period = steps_per_period;
    c.validate();
    return c;
}

Propagator converge(const CollectiveOps& ops, const DriveSettings& settings, double coupling, CdLevel level) {
    DriveConfig config = settings.drive_config(coupling, level);
    CdDrive drive(ops, coupling, level);
    ConvergedPropagator converged =
        converged_period_propagator(drive, config, settings.tolerance, settings.max_steps, settings.integrator);
    config.steps_per_period = converged.steps_per_period;
    return {std::move(drive), config, std::move(converged)};
}

DickeState x_polarized(const CollectiveOps& ops) { return coherent_state(ops, 0.5 * kPi, 0.0); }

SpectrumPoint spectrum_point(const CollectiveOps& ops, const DriveSettings& settings, double coupling, CdLevel level) {
    const Propagator p = converge(ops, settings, coupling, level);
    const double period = p.config.period();
    SpectrumPoint out;
    out.coupling = coupling;
    out.level = level;
    out.report = p.report();

    std::vector<double> even, odd;
    if (p.converged.sectors.even.rows() > 0) even = to_std(floquet_eigs(p.converged.sectors.even, period).quasienergies);
    if (p.converged.sectors.odd.rows() > 0) odd = to_std(floquet_eigs(p.converged.sectors.odd, period).quasienergies);
    std::vector<double> all = even;
    all.insert(all.end(), odd.begin(), odd.end());

    out.even = stats_or_empty(even, period, Sector::Even);
    out.odd = stats_or_empty(odd, period, Sector::Odd);
    out.all = stats_or_empty(all, period, Sector::Unresolved);
    const double we = std::isnan(out.even.r_mean) ? 0.0 : out.even.levels;
    const double wo = std::isnan(out.odd.r_mean) ? 0.0 : out.odd.levels;
    out.r_resolved = we + wo > 0.0 ? ((we > 0 ? we * out.even.r_mean : 0.0) + (wo > 0 ? wo * out.odd.r_mean : 0.0)) /
                                         (we + wo)
                                   : std::numeric_limits<double>::quiet_NaN();
    return out;
}

FreezePoint freeze_point(const CollectiveOps& ops, const DriveSettings& settings, double coupling, CdLevel level,
                         int periods) {
    if (periods < 1) throw ParameterError("periods must be positive");
    const Propagator p = converge(ops, settings, coupling, level);
    const DickeState psi0 = x_polarized(ops);
    const auto states = evolve_stroboscopic(p.converged.u_f, psi0, periods);

    FreezePoint out;
    out.coupling = coupling;
    out.level = level;
    out.report = p.report();
    out.norm_drift = max_norm_drift(states);
    out.fidelity.reserve(states.size());
    for (const auto& s : states) out.fidelity.push_back(fidelity(s, psi0));
    out.mean_fidelity = mean_from(out.fidelity, 1);
    out.max_overlap = max_eigenstate_overlap(psi0, floquet_eigs(p.converged.u_f, p.config.period(), p.config));
    return out;
}

EntangleRun entangle_run(const CollectiveOps& ops, const DriveSettings& settings, double coupling, CdLevel level,
                         int periods, int samples_per_period, const std::vector<int>& block_sizes, int block_stride,
                         int transient) {
    if (periods < 1 || samples_per_period < 1 || block_stride < 1 || transient < 0)
        throw ParameterError("entangle needs periods, samples_per_period, block_stride >= 1 and transient >= 0");
    for (int m : block_sizes)
        if (m < 1 || m > ops.n_particles - 1) throw ParameterError("block size out of range [1, N-1]");

    const Propagator p = converge(ops, settings, coupling, level);
    const DickeState psi0 = x_polarized(ops);
    const double period = p.config.period();

    EntangleRun out;
    out.coupling = coupling;
    out.level = level;
    out.report = p.report();
    out.block_sizes = block_sizes;

    const auto strobe = evolve_stroboscopic(p.converged.u_f, psi0, periods);
    for (const auto& s : strobe) out.strobe_entropy.push_back(one_spin_entropy(s, ops));

    // Interior samples of every period; strobe points are merged in below.
    std::vector<double> interior;
    for (int n = 0; n < periods; ++n)
        for (int j = 1; j < samples_per_period; ++j)
            interior.push_back((n + static_cast<double>(j) / samples_per_period) * period);
    const auto micro = micromotion(p.drive, p.config, p.converged.u_f, psi0, interior, settings.integrator);

    out.period_max.assign(static_cast<std::size_t>(periods), 0.0);
    std::size_t k = 0;
    for (int n = 0; n <= periods; ++n) {
        const double s_strobe = out.strobe_entropy[static_cast<std::size_t>(n)];
        out.micro_times.push_back(n * period);
        out.micro_entropy.push_back(s_strobe);
        if (n > 0) out.period_max[static_cast<std::size_t>(n - 1)] =
                       std::max(out.period_max[static_cast<std::size_t>(n - 1)], s_strobe);
        if (n == periods) break;
        out.period_max[static_cast<std::size_t>(n)] = std::max(out.period_max[static_cast<std::size_t>(n)], s_strobe);
        for (int j = 1; j < samples_per_period; ++j, ++k) {
            const double s = one_spin_entropy(micro[k], ops);
            out.micro_times.push_back(interior[k]);
            out.micro_entropy.push_back(s);
            out.period_max[static_cast<std::size_t>(n)] = std::max(out.period_max[static_cast<std::size_t>(n)], s);
        }
    }

    out.block_entropy.assign(block_sizes.size(), {});
    for (int n = 0; n <= periods; n += block_stride) {
        out.block_periods.push_back(n);
        for (std::size_t b = 0; b < block_sizes.size(); ++b)
            out.block_entropy[b].push_back(block_entropy(strobe[static_cast<std::size_t>(n)], block_sizes[b]));
    }

    out.late_mean = mean_from(out.strobe_entropy, static_cast<std::size_t>(transient));
    out.max_strobe = *std::max_element(out.strobe_entropy.begin() + 1, out.strobe_entropy.end());
    out.min_period_max = *std::min_element(out.period_max.begin(), out.period_max.end());
    return out;
}

SqueezeRun squeeze_run(const CollectiveOps& ops, const DriveSettings& settings, double coupling, CdLevel level,
                       int periods, int transient) {
    if (periods < 1 || transient < 0 || transient >= periods)
        throw ParameterError("squeeze needs periods >= 1 and 0 <= transient < periods");
    const Propagator p = converge(ops, settings, coupling, level);
    const auto mids = mid_period_states(p, x_polarized(ops), periods, settings.integrator);

    SqueezeRun out;
    out.coupling = coupling;
    out.level = level;
    out.report = p.report();
    out.min_xi2 = std::numeric_limits<double>::infinity();
    out.late_min_xi2 = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < mids.size(); ++n) {
        const double x = squeezing_xi2(mids[n], ops);
        out.p_mid.push_back(dicke_overlap(mids[n]));
        out.xi2.push_back(x);
        out.min_xi2 = std::min(out.min_xi2, x);
        if (n >= static_cast<std::size_t>(transient)) out.late_min_xi2 = std::min(out.late_min_xi2, x);
        if (x < 1.0) ++out.squeezed_points;
        if (x < 1.0 - 1e-6 && !(block_entropy(mids[n], 1) > 0.0)) ++out.witness_violations;
    }
    out.late_mean_xi2 = mean_from(out.xi2, static_cast<std::size_t>(transient));
    out.max_p_mid = *std::max_element(out.p_mid.begin(), out.p_mid.end());
    return out;
}

LocalizePoint localize_point(const CollectiveOps& ops, const DriveSettings& settings, double coupling, CdLevel level,
                             const PhaseSpaceGrid& grid, IprConvention convention) {
    const Propagator p = converge(ops, settings, coupling, level);
    const FloquetData floquet = floquet_eigs(p.converged.u_f, p.config.period(), p.config);
    LocalizePoint out;
    out.coupling = coupling;
    out.level = level;
    out.report = p.report();
    out.averages = eigenstate_averages(floquet, grid, convention);
    out.quasienergies = floquet.quasienergies;
    return out;
}

ChaosMapRun chaos_map(const CollectiveOps& ops, const DriveSettings& settings, double coupling, CdLevel level,
                      const AngleGrid& angles, int window_start, int window_end) {
    const Propagator p = converge(ops, settings, coupling, level);
    const FloquetData floquet = floquet_eigs(p.converged.u_f, p.config.period(), p.config);
    ChaosMapRun out;
    out.coupling = coupling;
    out.level = level;
    out.report = p.report();
    out.points = local_chaos_scan(floquet, ops, angles, window_start, window_end);
    int below = 0;
    for (const auto& pt : out.points) {
        out.mean += pt.mean_entropy;
        if (pt.mean_entropy < 0.1) ++below;
    }
    out.mean /= static_cast<double>(out.points.size());
    out.fraction_below = static_cast<double>(below) / static_cast<double>(out.points.size());
    return out;
}

AnnealPoint anneal_point(const CollectiveOps& ops, const DriveSettings& settings, double coupling, CdLevel level,
                         int cycles) {
    if (cycles < 1) throw ParameterError("cycles must be positive");
    const Propagator p = converge(ops, settings, coupling, level);
    const DickeState psi0 = x_polarized(ops);
    const auto mids = mid_period_states(p, psi0, cycles, settings.integrator);
    const DickeState annealed = integrate_state(p.drive, p.config, psi0, p.config.tau, settings.integrator);
    if (1.0 - fidelity(annealed, mids.front()) > 1e-10)
        throw NumericalError("annealed state disagrees with the first mid-period micromotion sample");

    AnnealPoint out;
    out.coupling = coupling;
    out.level = level;
    out.report = p.report();
    for (const auto& s : mids) {
        out.p_mid.push_back(dicke_overlap(s));
        out.xi2.push_back(squeezing_xi2(s, ops));
    }
    // The first mid-period point is the annealed state itself.
    out.p_qa = out.p_mid.front();
    out.xi2_qa = out.xi2.front();
    const auto best = std::max_element(out.p_mid.begin(), out.p_mid.end());
    out.p_max = *best;
    out.p_max_cycle = static_cast<int>(best - out.p_mid.begin());
    out.xi2_opt = *std::min_element(out.xi2.begin(), out.xi2.end());
    return out;
}

OracleCaseResult oracle_case(const OracleCase& spec, double coupling, double tau, int steps_per_period, int periods,
                             int husimi_angles, std::uint64_t seed) {
    DriveConfig config;
    config.n_particles = spec.n_particles;
    config.coupling = coupling;
    config.tau = tau;
    config.cd_level = spec.level;
    config.steps_per_period = steps_per_period;
    config.validate();

    const CollectiveOps ops = build_collective_ops(spec.n_particles);
    const oracle::FullOps full_ops = oracle::build_full_ops(spec.n_particles);
    const DickeState psi0 = x_polarized(ops);
    const oracle::OracleRun run = oracle::full_evolve_and_project(config, psi0, periods);

    const CdDrive drive(ops, coupling, spec.level);
    const CMatrix u_f = period_propagator(drive, config, Integrator::Magnus4);
    std::vector<double> times;
    for (int k = 0; k <= 2 * periods; ++k) times.push_back(k * tau);
    const auto sector = micromotion(drive, config, u_f, psi0, times, Integrator::Magnus4);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::pair<double, double>> angles;
    std::vector<oracle::FullState> full_coherent;
    std::vector<CVector> sector_coherent;
    for (int a = 0; a < husimi_angles; ++a) {
        const double theta = std::acos(1.0 - 2.0 * unit(rng));
        const double phi = 2.0 * kPi * unit(rng);
        angles.emplace_back(theta, phi);
        full_coherent.push_back(oracle::full_coherent_state(full_ops, theta, phi));
        sector_coherent.push_back(coherent_amplitudes(spec.n_particles, theta, phi));
    }

    const oracle::FullState full0 = run.full.front();
    OracleCaseResult out;
    out.spec = spec;
    out.coupling = coupling;
    out.max_leakage = run.max_leakage;
    const int n = spec.n_particles;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const DickeState& s = sector[k];
        const oracle::FullState& f = run.full[k];
        OracleSample sample;
        sample.t = times[k];
        sample.deficit = 1.0 - fidelity(run.projected[k], s);
        if (n >= 2) sample.d_one_spin = std::abs(oracle::full_one_spin_entropy(f) - one_spin_entropy(s, ops));
        if (n >= 3) sample.d_block = std::abs(oracle::full_block_entropy(f, 2) - block_entropy(s, 2));
        sample.d_xi2 = std::abs(oracle::full_squeezing_xi2(f, full_ops) - squeezing_xi2(s, ops));
        if (n % 2 == 0) sample.d_p_mid = std::abs(oracle::full_dicke_overlap(f) - dicke_overlap(s));
        sample.d_fidelity = std::abs(oracle::full_fidelity(f, full0) - fidelity(s, psi0));
        for (std::size_t a = 0; a < angles.size(); ++a) {
            const double q_full = oracle::full_fidelity(f, full_coherent[a]);
            const double q_sector = std::norm(sector_coherent[a].dot(s.amplitudes));
            sample.d_husimi = std::max(sample.d_husimi, std::abs(q_full - q_sector));
        }
        out.max_deficit = std::max(out.max_deficit, sample.deficit);
        out.max_observable_error =
            std::max({out.max_observable_error, sample.d_one_spin, sample.d_block, sample.d_xi2, sample.d_p_mid,
                      sample.d_fidelity, sample.d_husimi});
        out.samples.push_back(sample);
    }
    out.passed = out.max_deficit < kOracleDeficitTolerance && out.max_observable_error < kOracleObservableTolerance &&
                 out.max_leakage < 1e-10;
    return out;
}

}  // namespace lmgcd::experiments
