#include "lmgcd/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lmgcd {

namespace {

void check_same(const DickeState& a, const DickeState& b) {
    if (a.amplitudes.size() != b.amplitudes.size()) throw ParameterError("states have different dimensions");
}

void check_ops(const DickeState& psi, const CollectiveOps& ops) {
    if (psi.amplitudes.size() != ops.dim()) throw ParameterError("state and operators have different dimensions");
}

}  // namespace

double expectation(const DickeState& psi, const CMatrix& op) {
    return psi.amplitudes.dot(op * psi.amplitudes).real();
}

double fidelity(const DickeState& psi, const DickeState& psi0) {
    check_same(psi, psi0);
    return std::norm(psi0.amplitudes.dot(psi.amplitudes));
}

double entropy_from_eigenvalues(const RVector& eigenvalues, double tolerance) {
    double entropy = 0.0;
    for (const double raw : eigenvalues) {
        if (raw < -tolerance || raw > 1.0 + tolerance)
            throw NumericalError("reduced density matrix eigenvalue " + std::to_string(raw) +
                                 " outside [0, 1]");
        const double p = std::clamp(raw, 0.0, 1.0);
        if (p > 0.0) entropy -= p * std::log(p);
    }
    return entropy;
}

double one_spin_entropy(const DickeState& psi, const CollectiveOps& ops) {
    check_ops(psi, ops);
    const double n = ops.n_particles;
    const double x = expectation(psi, ops.sx) / n;
    const double y = expectation(psi, ops.sy) / n;
    const double z = expectation(psi, ops.sz) / n;
    Eigen::Matrix2cd rho;
    rho << 0.5 + z, cplx(x, -y), cplx(x, y), 0.5 - z;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eig(rho, Eigen::EigenvaluesOnly);
    return entropy_from_eigenvalues(eig.eigenvalues());
}

CMatrix block_reduced_matrix(const DickeState& psi, int block_size) {
    const int n = psi.n_particles;
    if (block_size < 1 || block_size > n - 1)
        throw ParameterError("block size must be in [1, N-1], got " + std::to_string(block_size));
    const int rest = n - block_size;
    CMatrix w(block_size + 1, rest + 1);
    for (int q = 0; q <= block_size; ++q)
        for (int p = 0; p <= rest; ++p) {
            const double lw = 0.5 * (log_binomial(block_size, q) + log_binomial(rest, p) - log_binomial(n, q + p));
            w(q, p) = psi.amplitudes(q + p) * std::exp(lw);
        }
    return w * w.adjoint();
}

double block_entropy(const DickeState& psi, int block_size) {
    const CMatrix rho = block_reduced_matrix(psi, block_size);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho, Eigen::EigenvaluesOnly);
    return entropy_from_eigenvalues(eig.eigenvalues());
}

double squeezing_xi2(const DickeState& psi, const CollectiveOps& ops) {
    check_ops(psi, ops);
    const double mean = expectation(psi, ops.sz);
    const double second = expectation(psi, ops.sz2);
    return (second - mean * mean) / (0.25 * ops.n_particles);
}

double dicke_overlap(const DickeState& psi) {
    if (psi.n_particles % 2 != 0) throw ParameterError("|S^z = 0> requires even N");
    return std::norm(psi.amplitudes(psi.n_particles / 2));
}

}  // namespace lmgcd
