#include "lmgcd/model.hpp"

#include <cmath>
#include <string>

#include "lmgcd/linalg.hpp"

namespace lmgcd {

using linalg::commutator;

std::string to_string(CdLevel level) {
    switch (level) {
        case CdLevel::None: return "none";
        case CdLevel::CD1: return "cd1";
        case CdLevel::CD2: return "cd2";
    }
    return "unknown";
}

CdLevel parse_cd_level(const std::string& text) {
    if (text == "none" || text == "None" || text == "NONE") return CdLevel::None;
    if (text == "cd1" || text == "CD1") return CdLevel::CD1;
    if (text == "cd2" || text == "CD2") return CdLevel::CD2;
    throw ParameterError("unknown CD level '" + text + "' (expected none, cd1 or cd2)");
}

void DriveConfig::validate() const {
    if (n_particles < 1 || n_particles > kMaxParticles)
        throw ParameterError("N must be in [1, " + std::to_string(kMaxParticles) + "]");
    if (!(coupling > 0.0)) throw ParameterError("J must be positive");
    if (!(tau > 0.0)) throw ParameterError("tau must be positive");
    if (steps_per_period < 16) throw ParameterError("steps_per_period must be at least 16");
}

ScheduleSample schedule(double t, double tau) {
    if (!(tau > 0.0)) throw ParameterError("tau must be positive");
    if (!(t >= 0.0)) throw ParameterError("schedule time must be nonnegative");
    const double period = 2.0 * tau;
    const double tr = t >= period ? std::fmod(t, period) : t;
    const double q = std::sin(kPi * tr / (2.0 * tau));
    const double s = q * q;
    const double outer = std::sin(0.5 * kPi * s);
    ScheduleSample out;
    out.t = t;
    out.lambda = outer * outer;
    out.lambda_dot = std::sin(kPi * s) * (kPi * kPi / (4.0 * tau)) * std::sin(kPi * tr / tau);
    return out;
}

CMatrix lmg_hamiltonian(const CollectiveOps& ops, double lambda, double coupling) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw ParameterError("lambda must lie in [0, 1], got " + std::to_string(lambda));
    const double n = ops.n_particles;
    return -2.0 * (1.0 - lambda) * ops.sx + (4.0 * lambda * coupling / n) * ops.sz2;
}

CMatrix lmg_lambda_derivative(const CollectiveOps& ops, double coupling) {
    return 2.0 * ops.sx + (4.0 * coupling / ops.n_particles) * ops.sz2;
}

CMatrix krylov_operator(const CollectiveOps& ops, double lambda, double coupling, int k) {
    if (k < 1) throw ParameterError("Krylov order must be >= 1");
    // Higher orders only need more nested commutators; the variational solve
    // and the deflated CdDrive basis are written for two terms.
    if (k > 2) throw UnsupportedOrderError("Krylov order " + std::to_string(k) + " is not supported (max 2)");
    const CMatrix h = lmg_hamiltonian(ops, lambda, coupling);
    CMatrix nested = lmg_lambda_derivative(ops, coupling);
    for (int depth = 0; depth < 2 * k - 1; ++depth) nested = commutator(h, nested);
    return kI * nested;
}

namespace {

double frobenius_sq(const CMatrix& m) { return m.squaredNorm(); }

}  // namespace

AgpCoefficients solve_agp(const CollectiveOps& ops, double lambda, double coupling, CdLevel level) {
    const int terms = krylov_terms(level);
    if (terms == 0) throw ParameterError("solve_agp needs CD1 or CD2");
    const CMatrix h = lmg_hamiltonian(ops, lambda, coupling);
    const CMatrix dh = lmg_lambda_derivative(ops, coupling);

    std::vector<CMatrix> krylov;
    std::vector<CMatrix> response;  // B_k = -i[H, O_k]
    for (int k = 1; k <= terms; ++k) {
        krylov.push_back(krylov_operator(ops, lambda, coupling, k));
        response.push_back(-kI * commutator(h, krylov.back()));
    }

    // min || dH + sum_k alpha_k B_k ||_F over real alpha, stacked as a real
    // least-squares problem on unit-normalised columns.
    const Eigen::Index len = h.size();
    RMatrix design(2 * len, terms);
    RVector scale(terms);
    for (int k = 0; k < terms; ++k) {
        const double norm = response[k].norm();
        scale(k) = norm > 0.0 ? norm : 1.0;
        const auto flat = response[k].reshaped();
        design.col(k).head(len) = flat.real() / scale(k);
        design.col(k).tail(len) = flat.imag() / scale(k);
    }
    RVector target(2 * len);
    target.head(len) = -dh.reshaped().real();
    target.tail(len) = -dh.reshaped().imag();

    Eigen::CompleteOrthogonalDecomposition<RMatrix> cod;
    // Relative pivot threshold 1e-6 on unit columns corresponds to a Gram
    // eigenvalue ratio of 1e-12.
    cod.setThreshold(1e-6);
    cod.compute(design);
    const RVector solution = cod.solve(target);

    AgpCoefficients out;
    out.lambda = lambda;
    out.degenerate = cod.rank() < terms;
    out.alphas.resize(terms);
    CMatrix g = dh;
    for (int k = 0; k < terms; ++k) {
        out.alphas[k] = solution(k) / scale(k);
        g += out.alphas[k] * response[k];
    }
    out.action = frobenius_sq(g);
    out.bare_action = frobenius_sq(dh);
    return out;
}

CMatrix cd_hamiltonian(const CollectiveOps& ops, const DriveConfig& config, double t) {
    config.validate();
    const ScheduleSample s = schedule(t, config.tau);
    CMatrix h = lmg_hamiltonian(ops, s.lambda, config.coupling);
    if (config.cd_level == CdLevel::None || s.lambda_dot == 0.0) return h;
    const AgpCoefficients agp = solve_agp(ops, s.lambda, config.coupling, config.cd_level);
    for (int k = 1; k <= krylov_terms(config.cd_level); ++k)
        h += (s.lambda_dot * agp.alphas[k - 1]) * krylov_operator(ops, s.lambda, config.coupling, k);
    return h;
}

// ---------------------------------------------------------------------------

namespace {

using Poly = std::vector<double>;

double eval(const Poly& p, double x) {
    double acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

// Coefficients of -i[H(lambda), X(lambda)] for X = sum_p lambda^p x[p].
std::vector<CMatrix> response_coeffs(const CMatrix& a, const CMatrix& b, const std::vector<CMatrix>& x) {
    std::vector<CMatrix> out(x.size() + 1, CMatrix::Zero(a.rows(), a.cols()));
    for (std::size_t p = 0; p < x.size(); ++p) {
        out[p] += -kI * commutator(a, x[p]);
        out[p + 1] += -kI * commutator(b, x[p]);
    }
    return out;
}

Poly trace_poly(const std::vector<CMatrix>& u, const std::vector<CMatrix>& v) {
    Poly out(u.size() + v.size() - 1, 0.0);
    for (std::size_t p = 0; p < u.size(); ++p)
        for (std::size_t q = 0; q < v.size(); ++q) out[p + q] += linalg::trace_product(u[p], v[q]).real();
    return out;
}

}  // namespace

CdDrive::CdDrive(const CollectiveOps& ops, double coupling, CdLevel level)
    : level_(level), coupling_(coupling) {
    if (!(coupling > 0.0)) throw ParameterError("J must be positive");
    a_ = lmg_hamiltonian(ops, 0.0, coupling);
    b_ = lmg_lambda_derivative(ops, coupling);
    if (level_ == CdLevel::None) return;

    o1_ = kI * commutator(a_, b_);
    const auto b1 = response_coeffs(a_, b_, {o1_});
    g11_ = trace_poly(b1, b1);
    r1_ = trace_poly(b1, {b_});
    for (auto& c : r1_) c = -c;
    if (level_ == CdLevel::CD1) return;

    const CMatrix ao1 = commutator(a_, o1_);
    const CMatrix bo1 = commutator(b_, o1_);
    o2_[0] = commutator(a_, ao1);
    o2_[1] = commutator(a_, bo1) + commutator(b_, ao1);
    o2_[2] = commutator(b_, bo1);

    std::vector<CMatrix> second;
    const double o1_sq = o1_.squaredNorm();
    if (o1_sq > 0.0) {
        deflation_ = linalg::trace_product(o1_, o2_[0]).real() / o1_sq;
        const double residual = (o2_[0] - deflation_ * o1_).norm();
        deflated_ = residual <= 1e-10 * o2_[0].norm();
    }
    if (deflated_) {
        second = {o2_[1], o2_[2]};
    } else {
        second = {o2_[0], o2_[1], o2_[2]};
    }
    const auto b2 = response_coeffs(a_, b_, second);
    g12_ = trace_poly(b1, b2);
    g22_ = trace_poly(b2, b2);
    r2_ = trace_poly(b2, {b_});
    for (auto& c : r2_) c = -c;
}

CMatrix CdDrive::bare(double lambda) const { return a_ + lambda * b_; }

std::array<double, 2> CdDrive::basis_coefficients(double lambda) const {
    std::array<double, 2> beta{0.0, 0.0};
    if (level_ == CdLevel::None) return beta;
    const double g11 = eval(g11_, lambda);
    const double r1 = eval(r1_, lambda);
    if (level_ == CdLevel::CD1) {
        if (g11 > 0.0) beta[0] = r1 / g11;
        return beta;
    }
    const double g12 = eval(g12_, lambda);
    const double g22 = eval(g22_, lambda);
    const double r2 = eval(r2_, lambda);
    // Jacobi-scaled 2x2 pseudo-inverse with relative eigenvalue cutoff 1e-12.
    const double d1 = g11 > 0.0 ? std::sqrt(g11) : 1.0;
    const double d2 = g22 > 0.0 ? std::sqrt(g22) : 1.0;
    Eigen::Matrix2d g;
    g << g11 / (d1 * d1), g12 / (d1 * d2), g12 / (d1 * d2), g22 / (d2 * d2);
    const Eigen::Vector2d r(r1 / d1, r2 / d2);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(g);
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::Vector2d x = Eigen::Vector2d::Zero();
    for (int i = 0; i < 2; ++i) {
        const double ev = eig.eigenvalues()(i);
        if (top > 0.0 && ev > 1e-12 * top)
            x += eig.eigenvectors().col(i) * (eig.eigenvectors().col(i).dot(r) / ev);
    }
    beta[0] = x(0) / d1;
    beta[1] = x(1) / d2;
    return beta;
}

std::vector<double> CdDrive::alphas(double lambda) const {
    const auto beta = basis_coefficients(lambda);
    switch (level_) {
        case CdLevel::None: return {};
        case CdLevel::CD1: return {beta[0]};
        case CdLevel::CD2: break;
    }
    if (!deflated_) return {beta[0], beta[1]};
    if (lambda == 0.0) {
        // span{O1, O2(0)} = span{O1}: the CD1 minimiser.
        const double g11 = eval(g11_, 0.0);
        return {g11 > 0.0 ? eval(r1_, 0.0) / g11 : 0.0, 0.0};
    }
    return {beta[0] - deflation_ * beta[1] / lambda, beta[1] / lambda};
}

CMatrix CdDrive::gauge_potential(double lambda) const {
    if (level_ == CdLevel::None) return CMatrix::Zero(a_.rows(), a_.cols());
    const auto beta = basis_coefficients(lambda);
    CMatrix out = beta[0] * o1_;
    if (level_ == CdLevel::CD2) {
        if (deflated_) {
            out += beta[1] * (o2_[1] + lambda * o2_[2]);
        } else {
            out += beta[1] * (o2_[0] + lambda * o2_[1] + lambda * lambda * o2_[2]);
        }
    }
    return out;
}

CMatrix CdDrive::hamiltonian(double lambda, double lambda_dot) const {
    if (level_ == CdLevel::None || lambda_dot == 0.0) return bare(lambda);
    return bare(lambda) + lambda_dot * gauge_potential(lambda);
}

CMatrix CdDrive::hamiltonian_at(double t, double tau) const {
    const ScheduleSample s = schedule(t, tau);
    return hamiltonian(s.lambda, s.lambda_dot);
}

}  // namespace lmgcd
