// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lmgcd/experiments.hpp"
#include "lmgcd/harness.hpp"
#include "lmgcd/linalg.hpp"
#include "lmgcd/observables.hpp"

using namespace lmgcd;
using namespace lmgcd::experiments;

namespace {

const double kLn2 = std::log(2.0);
constexpr double kJ = 3.125;
constexpr std::array kCd{CdLevel::CD1, CdLevel::CD2};
constexpr std::array kAll{CdLevel::None, CdLevel::CD1, CdLevel::CD2};

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [x]");
    }
};

std::string fmt(const char* f, double a) {
    char b[64];
    std::snprintf(b, sizeof b, f, a);
    return b;
}

std::string lv(CdLevel l) { return to_string(l); }

DriveSettings settings(int n) {
    DriveSettings s;
    s.n_particles = n;
    return s;
}

// Step-doubling results of every propagator built along the way.
double g_worst_self_change = 0.0;
void note(const ConvergenceReport& r) { g_worst_self_change = std::max(g_worst_self_change, r.self_change); }

// Spectrum points at N = 500 are shared by the level-statistics criteria.
std::map<std::pair<double, CdLevel>, SpectrumPoint> g_spectra;
const SpectrumPoint& spectrum500(double j, CdLevel level) {
    static const CollectiveOps ops = build_collective_ops(500);
    auto key = std::pair{j, level};
    auto it = g_spectra.find(key);
    if (it == g_spectra.end()) {
        it = g_spectra.emplace(key, spectrum_point(ops, settings(500), j, level)).first;
        note(it->second.report);
    }
    return it->second;
}

const CollectiveOps& ops100() {
    static const CollectiveOps ops = build_collective_ops(100);
    return ops;
}

Outcome level_statistics() {
    Outcome o;
    const auto& low = spectrum500(0.25, CdLevel::None);
    o.require(std::abs(low.r_resolved - 0.386) <= 0.03, "J=0.25 <r>=" + fmt("%.4f", low.r_resolved) + " (0.386+-0.03)");
    const auto& high = spectrum500(3.0, CdLevel::None);
    o.require(std::abs(high.even.r_mean - 0.531) <= 0.02 && std::abs(high.odd.r_mean - 0.531) <= 0.02,
              "J=3 even " + fmt("%.4f", high.even.r_mean) + ", odd " + fmt("%.4f", high.odd.r_mean) + " (0.531+-0.02)");
    return o;
}

Outcome crossover() {
    Outcome o;
    const double mid = (0.386 + 0.531) / 2;
    const std::vector<double> grid{0.25, 0.5, 0.75, 1.0, 1.5, 3.0};
    double crossing = NAN;
    for (std::size_t i = 1; i < grid.size() && std::isnan(crossing); ++i) {
        const double a = spectrum500(grid[i - 1], CdLevel::None).r_resolved;
        const double b = spectrum500(grid[i], CdLevel::None).r_resolved;
        if (a < mid && b >= mid) crossing = grid[i - 1] + (mid - a) / (b - a) * (grid[i] - grid[i - 1]);
    }
    o.require(crossing >= 0.6 && crossing <= 1.5, "<r> crosses " + fmt("%.4f", mid) + " at J=" + fmt("%.3f", crossing) +
                                                        " (in [0.6, 1.5])");
    return o;
}

Outcome freezing() {
    Outcome o;
    for (CdLevel l : kAll) {
        const auto f = freeze_point(ops100(), settings(100), kJ, l, 2000);
        note(f.report);
        if (l == CdLevel::None)
            o.require(f.mean_fidelity < 0.1, "none F=" + fmt("%.4f", f.mean_fidelity) + " (<0.1)");
        else
            o.require(f.mean_fidelity > 0.8, lv(l) + " F=" + fmt("%.4f", f.mean_fidelity) + " (>0.8)");
    }
    return o;
}

Outcome entanglement() {
    Outcome o;
    for (CdLevel l : kAll) {
        const auto e = entangle_run(ops100(), settings(100), kJ, l, 2000, 16, {}, 10, 50);
        note(e.report);
        if (l == CdLevel::None) {
            o.require(std::abs(e.late_mean - kLn2) <= 0.1 * kLn2,
                      "none mean S(nT>=50)=" + fmt("%.4f", e.late_mean) + " (ln2+-10%)");
        } else {
            o.require(e.max_strobe < 0.1, lv(l) + " max S(nT)=" + fmt("%.4f", e.max_strobe) + " (<0.1)");
            o.require(e.min_period_max > 0.3,
                      lv(l) + " min over periods of max S(t)=" + fmt("%.4f", e.min_period_max) + " (>0.3)");
        }
    }
    return o;
}

Outcome squeezing() {
    Outcome o;
    for (CdLevel l : kAll) {
        const auto s = squeeze_run(ops100(), settings(100), kJ, l, 2000, 50);
        note(s.report);
        if (l == CdLevel::None)
            o.require(s.late_min_xi2 >= 1.0, "none min xi2(n>=50)=" + fmt("%.4f", s.late_min_xi2) + " (>=1)");
        else
            o.require(s.min_xi2 < 1.0, lv(l) + " min xi2=" + fmt("%.4f", s.min_xi2) + " (<1)");
        o.require(s.witness_violations == 0, lv(l) + " witness violations=" + std::to_string(s.witness_violations));
    }
    return o;
}

Outcome localization() {
    Outcome o;
    const auto grid = default_grid(100);
    std::map<CdLevel, LocalizePoint> p;
    for (CdLevel l : kAll) {
        p[l] = localize_point(ops100(), settings(100), kJ, l, grid, IprConvention::Normalized);
        note(p[l].report);
    }
    const auto& none = p[CdLevel::None].averages;
    o.require(std::abs(none.mean_ipr - 0.5) <= 0.05, "none <IPR>=" + fmt("%.4f", none.mean_ipr) + " (0.5+-0.05)");
    o.require(std::abs(none.mean_l - 0.655) <= 0.05, "none <L>=" + fmt("%.4f", none.mean_l) + " (0.655+-0.05)");
    for (CdLevel l : kCd) {
        const double ri = 1 - p[l].averages.mean_ipr / none.mean_ipr;
        const double rl = 1 - p[l].averages.mean_l / none.mean_l;
        o.require(ri >= 0.3, lv(l) + " IPR reduction=" + fmt("%.1f%%", 100 * ri) + " (>=30%)");
        o.require(rl >= 0.3, lv(l) + " L reduction=" + fmt("%.1f%%", 100 * rl) + " (>=30%)");
    }
    for (CdLevel l : kCd) {
        const auto& s = spectrum500(kJ, l);
        o.require(s.r_resolved < 0.51, lv(l) + " N=500 <r>=" + fmt("%.4f", s.r_resolved) + " (<0.51; unresolved " +
                                           fmt("%.4f", s.all.r_mean) + ")");
    }
    return o;
}

Outcome chaos_map_criterion() {
    Outcome o;
    const auto angles = uniform_angle_grid(64, 128);
    for (CdLevel l : kAll) {
        const auto m = chaos_map(ops100(), settings(100), kJ, l, angles, 9500, 10500);
        note(m.report);
        if (l == CdLevel::None)
            o.require(std::abs(m.mean - kLn2) <= 0.05 * kLn2, "none map mean=" + fmt("%.4f", m.mean) + " (ln2+-5%)");
        else
            o.require(m.fraction_below >= 0.05,
                      lv(l) + " share <S><0.1=" + fmt("%.3f", m.fraction_below) + " (>=0.05)");
    }
    return o;
}

Outcome annealing() {
    Outcome o;
    const std::vector<double> grid{0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.125};
    double none_qa = 0, cd1_qa = 0;
    int violations = 0;
    for (double j : grid)
        for (CdLevel l : kAll) {
            const auto a = anneal_point(ops100(), settings(100), j, l, 40);
            note(a.report);
            if (a.p_max < a.p_qa) ++violations;
            if (j == 0.25 && l == CdLevel::None) none_qa = a.p_qa;
            if (j == 0.25 && l == CdLevel::CD1) cd1_qa = a.p_qa;
        }
    o.require(cd1_qa >= 10 * none_qa, "J=0.25 P_QA cd1/none=" + fmt("%.3f", cd1_qa) + "/" + fmt("%.3f", none_qa) +
                                          "=" + fmt("%.2f", cd1_qa / none_qa) + "x (>=10x)");
    o.require(violations == 0, "P_max<P_QA at " + std::to_string(violations) + " of " +
                                   std::to_string(grid.size() * 3) + " points");
    return o;
}

Outcome analytic_suite() {
    Outcome o;
    const int n = 100;
    const auto grid = default_grid(n);
    const auto c = coherent_state(n, 1.0, 2.0);
    const double sw = wehrl(c, grid).entropy;
    o.require(std::abs(sw - n / (n + 1.0)) <= 1e-6, "coherent S_w err=" + fmt("%.1e", std::abs(sw - n / (n + 1.0))));
    const double ip = ipr(c, grid), ip0 = (2.0 * n + 1) / ((n + 1.0) * (n + 1.0));
    o.require(std::abs(ip - ip0) <= 1e-6, "coherent IPR err=" + fmt("%.1e", std::abs(ip - ip0)));
    const double l = wehrl_from_husimi(RVector::Constant(grid.size(), 1.0 / (n + 1)), grid).measure_l;
    o.require(std::abs(l - 1) <= 1e-12, "uniform L=" + fmt("%.12f", l));
    std::mt19937_64 rng(20240917);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    std::vector<double> levels(100000);
    for (auto& x : levels) x = u(rng);
    const double r = r_statistics(levels, 1.0).r_mean;
    o.require(std::abs(r - 0.386) <= 0.005, "Poisson <r>=" + fmt("%.4f", r));
    const auto x = x_polarized(ops100());
    const double p = dicke_overlap(x), p0 = std::exp(log_binomial(100, 50) - 100 * std::log(2.0));
    o.require(std::abs(p - p0) <= 1e-12, "x-polarized P_mid err=" + fmt("%.1e", std::abs(p - p0)));
    const double xi = squeezing_xi2(x, ops100());
    o.require(std::abs(xi - 1) <= 1e-10, "x-polarized xi2 err=" + fmt("%.1e", std::abs(xi - 1)));
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    const std::vector<OracleCase> cases{{6, CdLevel::CD2}, {8, CdLevel::CD1}, {8, CdLevel::None}};
    for (const auto& c : cases) {
        const auto r = oracle_case(c, 2.0, 1.0, 256, 10, 10, 20240917);
        o.require(r.max_deficit < kOracleDeficitTolerance && r.max_observable_error < kOracleObservableTolerance,
                  "N=" + std::to_string(c.n_particles) + " " + lv(c.level) + " deficit " + fmt("%.1e", r.max_deficit) +
                      ", observables " + fmt("%.1e", r.max_observable_error));
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(wall <= 60, "suite " + fmt("%.1f s", wall) + " (<=60 s)");
    return o;
}

Outcome hygiene() {
    Outcome o;
    double worst_drift = 0, worst_defect = 0;
    for (CdLevel l : kAll) {
        const auto p = converge(ops100(), settings(100), kJ, l);
        note(p.report());
        const auto states = evolve_stroboscopic(p.converged.u_f, x_polarized(ops100()), 10000);
        worst_drift = std::max(worst_drift, max_norm_drift(states));
        worst_defect = std::max(worst_defect, linalg::unitarity_defect(p.converged.u_f));
    }
    o.require(worst_drift < 1e-10, "norm drift over 1e4 periods=" + fmt("%.1e", worst_drift));
    o.require(worst_defect < 1e-10, "|U_F^+U_F - 1|=" + fmt("%.1e", worst_defect));

    DriveConfig c{100, kJ, 1.0, CdLevel::CD2, 1024};
    const CMatrix u1 = period_propagator(c);
    c.steps_per_period = 2048;
    const double change = (period_propagator(c) - u1).cwiseAbs().maxCoeff();
    o.require(change < 1e-8, "CD2 1024->2048 change=" + fmt("%.1e", change));

    int violations = 0;
    for (double j : {0.5, 1.25, 3.125})
        for (int i = 0; i <= 100; ++i) {
            const auto one = solve_agp(ops100(), i / 100.0, j, CdLevel::CD1);
            const auto two = solve_agp(ops100(), i / 100.0, j, CdLevel::CD2);
            const double slack = 1e-12 * one.bare_action;
            if (one.action > one.bare_action + slack || two.action > one.action + slack) ++violations;
        }
    o.require(violations == 0, "action nesting violations=" + std::to_string(violations) + " of 303");
    return o;
}

Outcome step_doubling() {
    Outcome o;
    o.require(g_worst_self_change < 1e-8, "worst self-change of all converged U_F=" + fmt("%.1e", g_worst_self_change));
    return o;
}

struct Criterion {
    std::string name;
    std::function<Outcome()> check;
    double budget_seconds;  // 0 for none
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<std::string> only;
    app.add_option("--only", only, "Run only these criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {"analytic-properties", analytic_suite, 0},
        {"oracle-equivalence", oracle_equivalence, 60},
        {"level-statistics", level_statistics, 600},
        {"crossover", crossover, 0},
        {"freezing", freezing, 300},
        {"entanglement", entanglement, 0},
        {"squeezing", squeezing, 0},
        {"localization", localization, 0},
        {"chaos-map", chaos_map_criterion, 7200},
        {"annealing", annealing, 0},
        {"numerical-hygiene", hygiene, 0},
        {"step-doubling", step_doubling, 0},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.require(false, std::string("error: ") + e.what());
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0) o.require(wall <= c.budget_seconds, "runtime " + fmt("%.0f s", wall) + " (<=" + fmt("%.0f s)", c.budget_seconds));
        if (!o.pass) ++failures;
        std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), wall);
        std::fflush(stdout);
    }
    std::printf("%d criteria failed\n", failures);
    return failures ? 1 : 0;
}
