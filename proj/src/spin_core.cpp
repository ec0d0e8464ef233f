#include "lmgcd/spin_core.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lmgcd/linalg.hpp"

namespace lmgcd {

namespace {

constexpr double kRootHalf = std::numbers::sqrt2 / 2.0;

void check_particles(int n) {
    if (n < 1 || n > kMaxParticles)
        throw ParameterError("particle count must be in [1, " + std::to_string(kMaxParticles) +
                             "], got " + std::to_string(n));
}

void check_angles(double theta, double phi) {
    if (!(theta >= 0.0 && theta <= kPi))
        throw ParameterError("theta must lie in [0, pi], got " + std::to_string(theta));
    if (!(phi >= 0.0 && phi < 2.0 * kPi))
        throw ParameterError("phi must lie in [0, 2pi), got " + std::to_string(phi));
}

}  // namespace

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

CollectiveOps build_collective_ops(int n_particles) {
    check_particles(n_particles);
    const Eigen::Index dim = n_particles + 1;
    const double s = 0.5 * n_particles;

    CMatrix splus = CMatrix::Zero(dim, dim);
    for (Eigen::Index k = 1; k < dim; ++k) {
        const double m = s - static_cast<double>(k);
        splus(k - 1, k) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }

    CollectiveOps ops;
    ops.n_particles = n_particles;
    ops.sx = 0.5 * (splus + splus.adjoint());
    ops.sy = (splus - splus.adjoint()) / (2.0 * kI);
    ops.sz = CMatrix::Zero(dim, dim);
    ops.sz2 = CMatrix::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double m = s - static_cast<double>(k);
        ops.sz(k, k) = m;
        ops.sz2(k, k) = m * m;
    }
    return ops;
}

DickeState dicke_state(int n_particles, double m) {
    check_particles(n_particles);
    const double offset = 0.5 * n_particles - m;
    const double index = std::round(offset);
    if (std::abs(offset - index) > 1e-12 || index < 0 || index > n_particles)
        throw ParameterError("M = " + std::to_string(m) + " is not in {N/2, ..., -N/2} for N = " +
                             std::to_string(n_particles));
    DickeState out;
    out.n_particles = n_particles;
    out.amplitudes = CVector::Zero(n_particles + 1);
    out.amplitudes(static_cast<Eigen::Index>(index)) = 1.0;
    return out;
}

DickeState coherent_state(const CollectiveOps& ops, double theta, double phi) {
    check_angles(theta, phi);
    const CMatrix generator = std::sin(phi) * ops.sx - std::cos(phi) * ops.sy;
    DickeState out = dicke_state(ops.n_particles, ops.spin());
    // exp(+i theta G) = exp(-i G dt) with dt = -theta
    linalg::apply_hermitian_exp(generator, -theta, out.amplitudes);
    return out;
}

DickeState coherent_state(int n_particles, double theta, double phi) {
    return coherent_state(build_collective_ops(n_particles), theta, phi);
}

CVector coherent_amplitudes(int n_particles, double theta, double phi) {
    check_particles(n_particles);
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const double log_c = std::log(std::abs(c));
    const double log_s = std::log(std::abs(s));
    CVector amps(n_particles + 1);
    for (int k = 0; k <= n_particles; ++k) {
        const int pc = n_particles - k;
        double mag = 0.0;
        if ((pc == 0 || c != 0.0) && (k == 0 || s != 0.0)) {
            const double lg = 0.5 * log_binomial(n_particles, k) + (pc > 0 ? pc * log_c : 0.0) +
                              (k > 0 ? k * log_s : 0.0);
            mag = std::exp(lg);
            if (c < 0.0 && (pc % 2 == 1)) mag = -mag;
        }
        amps(k) = std::polar(1.0, k * phi) * mag;
    }
    return amps;
}

std::string to_string(Parity parity) { return parity == Parity::Even ? "even" : "odd"; }

ParityBasis::ParityBasis(int n_particles, Parity parity)
    : parity_(parity), full_dim_(n_particles + 1), sign_(parity == Parity::Even ? 1.0 : -1.0) {
    check_particles(n_particles);
    const Eigen::Index n = n_particles;
    for (Eigen::Index j = 0; 2 * j <= n; ++j) {
        if (2 * j == n && parity == Parity::Odd) break;
        first_.push_back(j);
        second_.push_back(n - j);
    }
}

CMatrix ParityBasis::restrict(const CMatrix& op) const {
    if (op.rows() != full_dim_ || op.cols() != full_dim_) throw ParameterError("operator dimension mismatch");
    const Eigen::Index m = size();
    CMatrix out(m, m);
    for (Eigen::Index b = 0; b < m; ++b) {
        const Eigen::Index p = first_[b], q = second_[b];
        for (Eigen::Index a = 0; a < m; ++a) {
            const Eigen::Index r = first_[a], s = second_[a];
            if (p == q && r == s) {
                out(a, b) = op(r, p);
            } else if (p == q) {
                out(a, b) = (op(r, p) + sign_ * op(s, p)) * kRootHalf;
            } else if (r == s) {
                out(a, b) = (op(r, p) + sign_ * op(r, q)) * kRootHalf;
            } else {
                out(a, b) = 0.5 * (op(r, p) + sign_ * (op(s, p) + op(r, q)) + op(s, q));
            }
        }
    }
    return out;
}

CMatrix ParityBasis::project(const CMatrix& x) const {
    if (x.rows() != full_dim_) throw ParameterError("state dimension mismatch");
    CMatrix out(size(), x.cols());
    for (Eigen::Index a = 0; a < size(); ++a) {
        const Eigen::Index r = first_[a], s = second_[a];
        if (r == s)
            out.row(a) = x.row(r);
        else
            out.row(a) = (x.row(r) + sign_ * x.row(s)) * kRootHalf;
    }
    return out;
}

CMatrix ParityBasis::lift(const CMatrix& y) const {
    if (y.rows() != size()) throw ParameterError("sector dimension mismatch");
    CMatrix out = CMatrix::Zero(full_dim_, y.cols());
    for (Eigen::Index a = 0; a < size(); ++a) {
        const Eigen::Index r = first_[a], s = second_[a];
        if (r == s) {
            out.row(r) = y.row(a);
        } else {
            out.row(r) = y.row(a) * kRootHalf;
            out.row(s) = sign_ * kRootHalf * y.row(a);
        }
    }
    return out;
}

void ParityBasis::embed(const CMatrix& block, CMatrix& target) const {
    if (block.rows() != size() || block.cols() != size()) throw ParameterError("block dimension mismatch");
    if (target.rows() != full_dim_ || target.cols() != full_dim_) throw ParameterError("target dimension mismatch");
    const CMatrix left = lift(block);  // Q B, full_dim x m
    target += lift(left.transpose()).transpose();
}

RMatrix ParityBasis::isometry() const {
    return lift(CMatrix::Identity(size(), size())).real();
}

}  // namespace lmgcd
