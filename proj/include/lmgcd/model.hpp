#pragma once

// Driven LMG Hamiltonian, its drive schedule, the Krylov counterdiabatic
// operators and the variational gauge-potential coefficients.
//
//   H(lambda) = -2 (1 - lambda) Sx + (4 lambda J / N) Sz^2
//   dH/dlambda = 2 Sx + (4 J / N) Sz^2           (constant)
//   O1 = i[H, dH],  O2 = i[H, [H, [H, dH]]]
//   H_CD(t) = H(lambda) + lambda_dot * sum_k alpha_k O_k

#include <array>
#include <string>
#include <vector>

#include "lmgcd/spin_core.hpp"

namespace lmgcd {

enum class CdLevel { None, CD1, CD2 };

std::string to_string(CdLevel level);
CdLevel parse_cd_level(const std::string& text);
inline int krylov_terms(CdLevel level) { return static_cast<int>(level); }

struct DriveConfig {
    int n_particles = 0;
    double coupling = 1.0;  // J
    double tau = 1.0;       // half period
    CdLevel cd_level = CdLevel::None;
    int steps_per_period = 512;

    double period() const { return 2.0 * tau; }
    /// Throws ParameterError on N < 1, J <= 0, tau <= 0 or fewer than 16 steps.
    void validate() const;
};

struct ScheduleSample {
    double t = 0.0;
    double lambda = 0.0;
    double lambda_dot = 0.0;
};

/// lambda(t) = sin^2[(pi/2) sin^2(pi t / 2tau)] with its analytic derivative.
/// t is reduced modulo the period 2 tau.
ScheduleSample schedule(double t, double tau);

CMatrix lmg_hamiltonian(const CollectiveOps& ops, double lambda, double coupling);
CMatrix lmg_lambda_derivative(const CollectiveOps& ops, double coupling);

/// O^(k) by explicit nested commutators (2k - 1 of them). k in {1, 2}.
CMatrix krylov_operator(const CollectiveOps& ops, double lambda, double coupling, int k);

struct AgpCoefficients {
    double lambda = 0.0;
    std::vector<double> alphas;  // one per Krylov term
    double action = 0.0;         // Tr[G^2] at alphas
    double bare_action = 0.0;    // Tr[G^2] at alpha = 0, i.e. Tr[(dH)^2]
    bool degenerate = false;     // Gram matrix rank-deficient at this lambda
};

/// Minimises Tr[(dH - i[H, sum_k alpha_k O_k])^2] over real alpha, with traces
/// over the maximal-spin sector. Solved as a linear least-squares problem in
/// the operator basis B_k = -i[H, O_k]; a Gram matrix rank-deficient beyond
/// 1e-12 relative to its norm returns the minimum-norm solution and sets
/// `degenerate`.
AgpCoefficients solve_agp(const CollectiveOps& ops, double lambda, double coupling, CdLevel level);

/// H_CD(t) assembled from `solve_agp` and `krylov_operator` at lambda(t).
CMatrix cd_hamiltonian(const CollectiveOps& ops, const DriveConfig& config, double t);

/// Precomputed form of the counterdiabatic Hamiltonian for fast repeated
/// evaluation inside the integrator.
///
/// H is affine in lambda, so every Krylov operator and every Gram entry is a
/// polynomial in lambda whose matrix/trace coefficients are computed once.
/// For CD2 the basis {O1, O2(lambda)} degenerates at lambda = 0 where
/// O2(0) = c O1 (c = 16 for this model). The second basis element is then
/// replaced by K2 = (O2(lambda) - c O1) / lambda, which spans the same space
/// for lambda > 0 and stays well conditioned down to lambda = 0; the
/// minimiser is unchanged.
class CdDrive {
public:
    CdDrive(const CollectiveOps& ops, double coupling, CdLevel level);

    CdLevel level() const { return level_; }
    double coupling() const { return coupling_; }
    Eigen::Index dim() const { return a_.rows(); }

    CMatrix bare(double lambda) const;
    /// Coefficients in the CdDrive basis {O1, K2}; returns {0, 0} at a rank-deficient point.
    std::array<double, 2> basis_coefficients(double lambda) const;
    /// The same minimiser expressed in the raw {O1, O2} basis (undefined at lambda = 0).
    std::vector<double> alphas(double lambda) const;
    /// sum_k alpha_k O_k at lambda.
    CMatrix gauge_potential(double lambda) const;
    CMatrix hamiltonian(double lambda, double lambda_dot) const;
    CMatrix hamiltonian_at(double t, double tau) const;
    bool deflated() const { return deflated_; }
    /// c in O2(0) = c O1 when deflated.
    double deflation() const { return deflation_; }

private:
    CdLevel level_;
    double coupling_;
    CMatrix a_;   // H(0)
    CMatrix b_;   // dH/dlambda
    CMatrix o1_;
    std::array<CMatrix, 3> o2_;  // O2 = o2_[0] + lambda o2_[1] + lambda^2 o2_[2]
    bool deflated_ = false;
    double deflation_ = 0.0;
    // Gram/rhs polynomial coefficients in lambda for the working basis.
    std::vector<double> g11_, g12_, g22_, r1_, r2_;
};

}  // namespace lmgcd
