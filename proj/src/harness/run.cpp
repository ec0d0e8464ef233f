#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>

#include "lmgcd/harness.hpp"

#ifndef LMGCD_VERSION
#define LMGCD_VERSION "unknown"
#endif
#ifndef LMGCD_GIT_REVISION
#define LMGCD_GIT_REVISION "unknown"
#endif

namespace lmgcd::harness {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& title, std::vector<Column> columns)
    : path_(path), width_(columns.size()), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << "# " << title << '\n';
    for (const auto& c : columns)
        out_ << "# " << c.name << " [" << (c.unit.empty() ? "-" : c.unit) << "]: " << c.meaning << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << quote(columns[i].name);
    out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
    if (cells.size() != width_) throw std::logic_error("CSV row width mismatch in " + path_.string());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        std::visit(
            [&](const auto& v) {
                using V = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<V, double>)
                    out_ << format_double(v);
                else if constexpr (std::is_same_v<V, long long>)
                    out_ << v;
                else
                    out_ << quote(v);
            },
            cells[i]);
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("write failed for " + path_.string());
}

namespace {

using Column = CsvWriter::Column;
using experiments::ConvergenceReport;

struct Point {
    double coupling;
    CdLevel level;
};

std::vector<Point> sweep(const ExperimentConfig& c) {
    std::vector<Point> points;
    for (double j : c.couplings)
        for (CdLevel l : c.cd_levels) points.push_back({j, l});
    return points;
}

const Column kCoupling{"coupling", "-", "interaction strength J"};
const Column kLevel{"cd_level", "-", "counterdiabatic order: none, cd1 or cd2"};
const Column kSteps{"steps_per_period", "-", "integrator substeps per period after step doubling"};
const Column kChange{"self_change", "-", "max |U_F(steps) - U_F(steps/2)|"};

long long ll(int v) { return v; }

class Context {
public:
    Context(const ExperimentConfig& c, const RunOptions& o) : config(c), options(o) {
        std::filesystem::create_directories(o.out_dir);
    }

    CsvWriter csv(const std::string& name, const std::string& title, std::vector<Column> columns) {
        CsvWriter w(options.out_dir / name, title, std::move(columns));
        report.files.push_back(w.path());
        return w;
    }

    void converged(double coupling, CdLevel level, const ConvergenceReport& r) {
        convergence.push_back({{"coupling", coupling},
                               {"cd_level", to_string(level)},
                               {"steps_per_period", r.steps_per_period},
                               {"self_change", r.self_change},
                               {"raw_unitarity_defect", r.raw_unitarity_defect}});
    }

    const ExperimentConfig& config;
    const RunOptions& options;
    RunReport report;
    nlohmann::json convergence = nlohmann::json::array();
};

void run_spectrum(Context& ctx) {
    const auto& c = ctx.config;
    const CollectiveOps ops = build_collective_ops(c.drive.n_particles);
    const auto points = sweep(c);
    const auto results = parallel_map<experiments::SpectrumPoint>(points.size(), ctx.options.threads, [&](std::size_t i) {
        return experiments::spectrum_point(ops, c.drive, points[i].coupling, points[i].level);
    });
    auto w = ctx.csv("spectrum.csv", "Quasienergy level-spacing ratios <r> of U_F",
                     {kCoupling, kLevel,
                      {"r", "-", ctx.options.unresolved ? "headline <r>: unresolved spectrum (--unresolved)"
                                                        : "headline <r>: level-weighted mean of the two parity sectors"},
                      {"r_even", "-", "<r> in the even parity sector"},
                      {"r_odd", "-", "<r> in the odd parity sector"},
                      {"r_resolved", "-", "level-weighted mean of r_even and r_odd"},
                      {"r_unresolved", "-", "<r> of the merged spectrum"},
                      {"levels_even", "-", "distinct levels used in the even sector"},
                      {"levels_odd", "-", "distinct levels used in the odd sector"},
                      {"degeneracies", "-", "levels merged because they repeated within 1e-13 (all sectors)"},
                      kSteps, kChange});
    for (const auto& p : results) {
        ctx.converged(p.coupling, p.level, p.report);
        const double headline = ctx.options.unresolved ? p.all.r_mean : p.r_resolved;
        w.row({p.coupling, to_string(p.level), headline, p.even.r_mean, p.odd.r_mean, p.r_resolved, p.all.r_mean,
               ll(p.even.levels), ll(p.odd.levels), ll(p.even.degeneracies + p.odd.degeneracies + p.all.degeneracies),
               ll(p.report.steps_per_period), p.report.self_change});
    }
}

void run_freeze(Context& ctx) {
    const auto& c = ctx.config;
    const CollectiveOps ops = build_collective_ops(c.drive.n_particles);
    const auto points = sweep(c);
    const auto results = parallel_map<experiments::FreezePoint>(points.size(), ctx.options.threads, [&](std::size_t i) {
        return experiments::freeze_point(ops, c.drive, points[i].coupling, points[i].level, c.periods);
    });
    auto w = ctx.csv("freeze.csv", "Stroboscopic freezing of the x-polarised state",
                     {kCoupling, kLevel,
                      {"mean_fidelity", "-", "mean of |<psi(nT)|psi(0)>|^2 over n = 1..periods"},
                      {"max_overlap", "-", "max_n |<phi_n|psi(0)>|^2 over Floquet eigenvectors"},
                      {"norm_drift", "-", "max_n | ||psi(nT)|| - 1 |"},
                      {"periods", "-", "number of periods averaged"},
                      kSteps, kChange});
    for (const auto& p : results) {
        ctx.converged(p.coupling, p.level, p.report);
        w.row({p.coupling, to_string(p.level), p.mean_fidelity, p.max_overlap, p.norm_drift, ll(c.periods),
               ll(p.report.steps_per_period), p.report.self_change});
    }
    auto t = ctx.csv("freeze_trace.csv", "Fidelity F(nT) for the trace couplings",
                     {kCoupling, kLevel, {"n", "periods", "stroboscopic index"},
                      {"fidelity", "-", "|<psi(nT)|psi(0)>|^2"}});
    for (const auto& p : results) {
        bool traced = false;
        for (double j : c.trace_couplings) traced = traced || std::abs(j - p.coupling) <= 1e-12 * std::abs(j);
        if (!traced) continue;
        for (std::size_t n = 0; n < p.fidelity.size(); ++n)
            t.row({p.coupling, to_string(p.level), static_cast<long long>(n), p.fidelity[n]});
    }
}

void run_entangle(Context& ctx) {
    const auto& c = ctx.config;
    const CollectiveOps ops = build_collective_ops(c.drive.n_particles);
    const auto points = sweep(c);
    const auto results = parallel_map<experiments::EntangleRun>(points.size(), ctx.options.threads, [&](std::size_t i) {
        return experiments::entangle_run(ops, c.drive, points[i].coupling, points[i].level, c.periods,
                                         c.samples_per_period, c.block_sizes, c.block_stride, c.transient);
    });
    auto s = ctx.csv("entangle_strobe.csv", "One-spin entanglement entropy at stroboscopic times",
                     {kCoupling, kLevel, {"n", "periods", "stroboscopic index"},
                      {"s_ent", "nats", "-Tr rho ln rho of one spin, rho from the collective expectations"}});
    auto m = ctx.csv("entangle_micro.csv", "One-spin entanglement entropy along the micromotion",
                     {kCoupling, kLevel, {"t", "time", "time (period T = 2 tau)"},
                      {"s_ent", "nats", "one-spin entanglement entropy"}});
    auto b = ctx.csv("entangle_blocks.csv", "m:(N-m) block entanglement entropy at stroboscopic times",
                     {kCoupling, kLevel, {"n", "periods", "stroboscopic index"}, {"m", "-", "block size"},
                      {"s_block", "nats", "entropy of the m-spin block"},
                      {"bound", "nats", "ln(m + 1), the symmetric-block maximum"}});
    auto sum = ctx.csv("entangle_summary.csv", "Entanglement summary per drive",
                       {kCoupling, kLevel,
                        {"late_mean", "nats", "mean S_ent(nT) over n >= transient"},
                        {"max_strobe", "nats", "max S_ent(nT) over n >= 1"},
                        {"min_period_max", "nats", "min over periods of the max micromotion S_ent(t) in that period"},
                        {"transient", "periods", "first period of the late mean"},
                        {"samples_per_period", "-", "micromotion samples per period"},
                        kSteps, kChange});
    for (const auto& r : results) {
        ctx.converged(r.coupling, r.level, r.report);
        const std::string lvl = to_string(r.level);
        for (std::size_t n = 0; n < r.strobe_entropy.size(); ++n)
            s.row({r.coupling, lvl, static_cast<long long>(n), r.strobe_entropy[n]});
        for (std::size_t k = 0; k < r.micro_times.size(); ++k) m.row({r.coupling, lvl, r.micro_times[k], r.micro_entropy[k]});
        for (std::size_t k = 0; k < r.block_periods.size(); ++k)
            for (std::size_t q = 0; q < r.block_sizes.size(); ++q)
                b.row({r.coupling, lvl, ll(r.block_periods[k]), ll(r.block_sizes[q]), r.block_entropy[q][k],
                       std::log(r.block_sizes[q] + 1.0)});
        sum.row({r.coupling, lvl, r.late_mean, r.max_strobe, r.min_period_max, ll(c.transient), ll(c.samples_per_period),
                 ll(r.report.steps_per_period), r.report.self_change});
    }
}

void run_squeeze(Context& ctx) {
    const auto& c = ctx.config;
    const CollectiveOps ops = build_collective_ops(c.drive.n_particles);
    const auto points = sweep(c);
    const auto results = parallel_map<experiments::SqueezeRun>(points.size(), ctx.options.threads, [&](std::size_t i) {
        return experiments::squeeze_run(ops, c.drive, points[i].coupling, points[i].level, c.periods, c.transient);
    });
    auto s = ctx.csv("squeeze.csv", "Mid-period Dicke overlap and squeezing at t = (n + 1/2) T",
                     {kCoupling, kLevel, {"n", "periods", "period index"}, {"t", "time", "(n + 1/2) T"},
                      {"p_mid", "-", "|<S^z = 0|psi(t)>|^2"}, {"xi2", "-", "Var(S_z) / (N/4)"}});
    auto sum = ctx.csv("squeeze_summary.csv", "Squeezing summary per drive",
                       {kCoupling, kLevel, {"min_xi2", "-", "min xi2 over all mid-period points"},
                        {"late_min_xi2", "-", "min xi2 over n >= transient"},
                        {"late_mean_xi2", "-", "mean xi2 over n >= transient"},
                        {"max_p_mid", "-", "max P_mid over all mid-period points"},
                        {"squeezed_points", "-", "mid-period points with xi2 < 1"},
                        {"witness_violations", "-", "points with xi2 < 1 - 1e-6 but zero one-spin entropy"},
                        {"transient", "periods", "first period of the late statistics"}, kSteps, kChange});
    const double period = c.drive.tau * 2.0;
    for (const auto& r : results) {
        ctx.converged(r.coupling, r.level, r.report);
        const std::string lvl = to_string(r.level);
        for (std::size_t n = 0; n < r.xi2.size(); ++n)
            s.row({r.coupling, lvl, static_cast<long long>(n), (static_cast<double>(n) + 0.5) * period, r.p_mid[n],
                   r.xi2[n]});
        sum.row({r.coupling, lvl, r.min_xi2, r.late_min_xi2, r.late_mean_xi2, r.max_p_mid, ll(r.squeezed_points),
                 ll(r.witness_violations), ll(c.transient), ll(r.report.steps_per_period), r.report.self_change});
        if (r.witness_violations > 0)
            ctx.report.failures.push_back("squeezing witness: xi2 < 1 with zero one-spin entropy (" + lvl + ")");
    }
}

void run_localize(Context& ctx) {
    const auto& c = ctx.config;
    const int n = c.drive.n_particles;
    const CollectiveOps ops = build_collective_ops(n);
    const PhaseSpaceGrid grid = c.grid_theta > 0 || c.grid_phi > 0
                                    ? build_grid(n, c.grid_theta > 0 ? c.grid_theta : n + 8,
                                                 c.grid_phi > 0 ? c.grid_phi : 2 * n + 16)
                                    : default_grid(n);
    const IprConvention convention = ctx.options.ipr_as_printed ? IprConvention::AsPrinted : IprConvention::Normalized;
    const auto points = sweep(c);
    const auto results = parallel_map<experiments::LocalizePoint>(points.size(), ctx.options.threads, [&](std::size_t i) {
        return experiments::localize_point(ops, c.drive, points[i].coupling, points[i].level, grid, convention);
    });
    const std::string conv = convention == IprConvention::Normalized ? "normalized" : "as-printed";
    auto s = ctx.csv("localize.csv", "Floquet-eigenstate averaged Husimi localisation measures",
                     {kCoupling, kLevel,
                      {"mean_ipr", "-", "mean over eigenstates of the Husimi IPR (" + conv + " convention)"},
                      {"mean_l", "-", "mean over eigenstates of L = exp(S_w)/(N+1)"},
                      {"ipr_convention", "-", "normalized: [((N+1)^2/4pi) int Q^2]^-1; as-printed: ((N+1)^2/4pi)[int Q^2]^-1"},
                      {"n_theta", "-", "Gauss-Legendre nodes in cos(theta)"}, {"n_phi", "-", "uniform phi nodes"},
                      kSteps, kChange});
    auto e = ctx.csv("localize_states.csv", "Per-eigenstate localisation measures",
                     {kCoupling, kLevel, {"index", "-", "eigenstate index, ascending quasienergy"},
                      {"quasienergy", "1/time", "epsilon in (-pi/T, pi/T]"}, {"ipr", "-", "Husimi IPR"},
                      {"wehrl", "nats", "Wehrl entropy S_w"}, {"l", "-", "exp(S_w)/(N+1)"}});
    for (const auto& r : results) {
        ctx.converged(r.coupling, r.level, r.report);
        const std::string lvl = to_string(r.level);
        s.row({r.coupling, lvl, r.averages.mean_ipr, r.averages.mean_l, conv, ll(grid.n_theta), ll(grid.n_phi),
               ll(r.report.steps_per_period), r.report.self_change});
        for (std::size_t k = 0; k < r.averages.per_state.size(); ++k) {
            const auto& st = r.averages.per_state[k];
            e.row({r.coupling, lvl, static_cast<long long>(k), r.quasienergies(static_cast<Eigen::Index>(k)), st.ipr,
                   st.wehrl, st.measure_l});
        }
    }
}

void run_chaosmap(Context& ctx) {
    const auto& c = ctx.config;
    const CollectiveOps ops = build_collective_ops(c.drive.n_particles);
    const AngleGrid angles = uniform_angle_grid(c.map_theta, c.map_phi);
    const auto points = sweep(c);
    const auto results = parallel_map<experiments::ChaosMapRun>(points.size(), ctx.options.threads, [&](std::size_t i) {
        return experiments::chaos_map(ops, c.drive, points[i].coupling, points[i].level, angles, c.window_start,
                                      c.window_end);
    });
    auto s = ctx.csv("chaosmap.csv",
                     "Time-averaged one-spin entropy for coherent initial states, n in [" +
                         std::to_string(c.window_start) + ", " + std::to_string(c.window_end) + "]",
                     {kCoupling, kLevel, {"theta", "rad", "polar angle of the initial coherent state"},
                      {"phi", "rad", "azimuth of the initial coherent state"},
                      {"mean_s_ent", "nats", "mean of S_ent(nT) over the inclusive window"}});
    auto sum = ctx.csv("chaosmap_summary.csv", "Chaos-map summary per drive",
                       {kCoupling, kLevel, {"map_mean", "nats", "mean of mean_s_ent over the angle grid"},
                        {"fraction_below_0.1", "-", "share of grid points with mean_s_ent < 0.1"},
                        {"points", "-", "grid points"}, kSteps, kChange});
    for (const auto& r : results) {
        ctx.converged(r.coupling, r.level, r.report);
        const std::string lvl = to_string(r.level);
        for (const auto& p : r.points) s.row({r.coupling, lvl, p.theta, p.phi, p.mean_entropy});
        sum.row({r.coupling, lvl, r.mean, r.fraction_below, static_cast<long long>(r.points.size()),
                 ll(r.report.steps_per_period), r.report.self_change});
    }
}

void run_anneal(Context& ctx) {
    const auto& c = ctx.config;
    const CollectiveOps ops = build_collective_ops(c.drive.n_particles);
    const auto points = sweep(c);
    const auto results = parallel_map<experiments::AnnealPoint>(points.size(), ctx.options.threads, [&](std::size_t i) {
        return experiments::anneal_point(ops, c.drive, points[i].coupling, points[i].level, c.cycles);
    });
    auto s = ctx.csv("anneal.csv", "Annealing (single sweep to tau) vs Floquet Dicke-state preparation",
                     {kCoupling, kLevel, {"p_qa", "-", "|<S^z = 0|psi(tau)>|^2 after one sweep"},
                      {"xi2_qa", "-", "xi2 of psi(tau)"},
                      {"p_max", "-", "max of P_mid over (n + 1/2) T, n < cycles"},
                      {"p_max_cycle", "-", "n at which p_max occurs"},
                      {"xi2_opt", "-", "min xi2 over the same mid-period points"},
                      {"cycles", "-", "drive cycles searched"}, kSteps, kChange});
    auto t = ctx.csv("anneal_trace.csv", "Mid-period P_mid and xi2 over the searched cycles",
                     {kCoupling, kLevel, {"n", "periods", "period index"}, {"p_mid", "-", "|<S^z = 0|psi((n+1/2)T)>|^2"},
                      {"xi2", "-", "Var(S_z) / (N/4)"}});
    for (const auto& r : results) {
        ctx.converged(r.coupling, r.level, r.report);
        const std::string lvl = to_string(r.level);
        s.row({r.coupling, lvl, r.p_qa, r.xi2_qa, r.p_max, ll(r.p_max_cycle), r.xi2_opt, ll(c.cycles),
               ll(r.report.steps_per_period), r.report.self_change});
        for (std::size_t n = 0; n < r.p_mid.size(); ++n)
            t.row({r.coupling, lvl, static_cast<long long>(n), r.p_mid[n], r.xi2[n]});
    }
}

void run_oracle(Context& ctx) {
    const auto& c = ctx.config;
    std::vector<std::pair<experiments::OracleCase, double>> cases;
    for (double j : c.couplings)
        for (const auto& oc : c.oracle_cases) cases.emplace_back(oc, j);
    const auto results =
        parallel_map<experiments::OracleCaseResult>(cases.size(), ctx.options.threads, [&](std::size_t i) {
            return experiments::oracle_case(cases[i].first, cases[i].second, c.drive.tau, c.drive.steps_per_period,
                                            c.periods, c.husimi_angles, c.seed + i);
        });
    auto s = ctx.csv("oracle_check.csv", "Full 2^N evolution vs maximal-spin sector evolution at t = k tau",
                     {{"n_particles", "-", "N"}, kLevel, kCoupling, {"t", "time", "sample time"},
                      {"deficit", "-", "1 - |<sector|projected full>|^2"},
                      {"d_one_spin", "nats", "|S_ent(full SVD) - S_ent(sector)|"},
                      {"d_block", "nats", "|S_{2:N-2}(full SVD) - S_{2:N-2}(sector)|"},
                      {"d_xi2", "-", "|xi2(full) - xi2(sector)|"}, {"d_p_mid", "-", "|P_mid(full) - P_mid(sector)|"},
                      {"d_fidelity", "-", "|F(full) - F(sector)|"},
                      {"d_husimi", "-", "max over random angles of |Q(full) - Q(sector)|"}});
    auto sum = ctx.csv("oracle_summary.csv", "Oracle agreement per case",
                       {{"n_particles", "-", "N"}, kLevel, kCoupling, {"max_deficit", "-", "max overlap deficit"},
                        {"max_observable_error", "-", "max |difference| over all observables and samples"},
                        {"max_leakage", "-", "max weight outside the maximal-spin sector"},
                        {"passed", "-", "deficit < 1e-9, observables < 1e-8, leakage < 1e-10"}});
    for (const auto& r : results) {
        const std::string lvl = to_string(r.spec.level);
        for (const auto& x : r.samples)
            s.row({ll(r.spec.n_particles), lvl, r.coupling, x.t, x.deficit, x.d_one_spin, x.d_block, x.d_xi2, x.d_p_mid,
                   x.d_fidelity, x.d_husimi});
        sum.row({ll(r.spec.n_particles), lvl, r.coupling, r.max_deficit, r.max_observable_error, r.max_leakage,
                 std::string(r.passed ? "true" : "false")});
        if (!r.passed)
            ctx.report.failures.push_back("oracle equivalence at N = " + std::to_string(r.spec.n_particles) + ", " +
                                          lvl);
    }
}

}  // namespace

RunReport run(const ExperimentConfig& config, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    Context ctx(config, options);
    switch (config.experiment) {
        case Experiment::Spectrum: run_spectrum(ctx); break;
        case Experiment::Freeze: run_freeze(ctx); break;
        case Experiment::Entangle: run_entangle(ctx); break;
        case Experiment::Squeeze: run_squeeze(ctx); break;
        case Experiment::Localize: run_localize(ctx); break;
        case Experiment::ChaosMap: run_chaosmap(ctx); break;
        case Experiment::Anneal: run_anneal(ctx); break;
        case Experiment::OracleCheck: run_oracle(ctx); break;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    nlohmann::json manifest;
    manifest["experiment"] = to_string(config.experiment);
    manifest["config_file"] = config.source;
    manifest["config"] = config.echo;
    manifest["version"] = LMGCD_VERSION;
    manifest["git_revision"] = LMGCD_GIT_REVISION;
    manifest["options"] = {{"threads", options.threads},
                           {"unresolved", options.unresolved},
                           {"ipr_as_printed", options.ipr_as_printed}};
    manifest["integrator"] = to_string(config.drive.integrator);
    manifest["tolerance"] = config.drive.tolerance;
    manifest["convergence"] = ctx.convergence;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : ctx.report.files) files.push_back(f.filename().string());
    manifest["outputs"] = files;
    manifest["failures"] = ctx.report.failures;
    manifest["wall_time_seconds"] = wall;

    ctx.report.manifest = options.out_dir / "manifest.json";
    std::ofstream out(ctx.report.manifest, std::ios::binary);
    out << manifest.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + ctx.report.manifest.string());
    return ctx.report;
}

}  // namespace lmgcd::harness
