#include "lmgcd/oracle.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "lmgcd/observables.hpp"

namespace lmgcd::oracle {

namespace {

void check_size(int n) {
    if (n < 1 || n > kMaxParticles)
        throw ParameterError("oracle supports 1 <= N <= " + std::to_string(kMaxParticles) + ", got " +
                             std::to_string(n));
}

Eigen::Index full_dim(int n) { return Eigen::Index{1} << n; }

Eigen::Matrix2cd pauli_x() { return (Eigen::Matrix2cd() << 0.0, 1.0, 1.0, 0.0).finished(); }
Eigen::Matrix2cd pauli_y() { return (Eigen::Matrix2cd() << 0.0, -kI, kI, 0.0).finished(); }
Eigen::Matrix2cd pauli_z() { return (Eigen::Matrix2cd() << 1.0, 0.0, 0.0, -1.0).finished(); }

CMatrix pauli_sum(int n, const Eigen::Matrix2cd& pauli) {
    CMatrix out = CMatrix::Zero(full_dim(n), full_dim(n));
    for (int i = 0; i < n; ++i) out += site_operator(n, i, pauli);
    return out;
}

CMatrix zz_double_sum(int n) {
    CMatrix out = CMatrix::Zero(full_dim(n), full_dim(n));
    for (int i = 0; i < n; ++i) {
        const CMatrix zi = site_operator(n, i, pauli_z());
        for (int j = 0; j < n; ++j) out += zi * site_operator(n, j, pauli_z());
    }
    return out;
}

// Max column sum.
double norm_one(const CMatrix& h) { return h.cwiseAbs().colwise().sum().maxCoeff(); }

}  // namespace

CMatrix site_operator(int n_particles, int site, const Eigen::Matrix2cd& pauli) {
    check_size(n_particles);
    if (site < 0 || site >= n_particles) throw ParameterError("site index out of range");
    CMatrix out = CMatrix::Ones(1, 1);
    for (int i = 0; i < n_particles; ++i) {
        const Eigen::Matrix2cd factor = i == site ? pauli : Eigen::Matrix2cd::Identity();
        CMatrix next(out.rows() * 2, out.cols() * 2);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                next.block(r * out.rows(), c * out.cols(), out.rows(), out.cols()) = factor(r, c) * out;
        out = std::move(next);
    }
    return out;
}

FullOps build_full_ops(int n_particles) {
    check_size(n_particles);
    FullOps ops;
    ops.n_particles = n_particles;
    ops.sx = 0.5 * pauli_sum(n_particles, pauli_x());
    ops.sy = 0.5 * pauli_sum(n_particles, pauli_y());
    ops.sz = 0.5 * pauli_sum(n_particles, pauli_z());
    return ops;
}

CMatrix full_hamiltonian(int n_particles, double lambda, double coupling) {
    check_size(n_particles);
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
    return -(1.0 - lambda) * pauli_sum(n_particles, pauli_x()) +
           (lambda * coupling / n_particles) * zz_double_sum(n_particles);
}

CMatrix full_lambda_derivative(int n_particles, double coupling) {
    check_size(n_particles);
    return pauli_sum(n_particles, pauli_x()) + (coupling / n_particles) * zz_double_sum(n_particles);
}

RMatrix dicke_embedding(int n_particles) {
    check_size(n_particles);
    RMatrix e = RMatrix::Zero(full_dim(n_particles), n_particles + 1);
    for (Eigen::Index idx = 0; idx < e.rows(); ++idx) {
        const int k = std::popcount(static_cast<unsigned>(idx));
        e(idx, k) = std::exp(-0.5 * log_binomial(n_particles, k));
    }
    return e;
}

FullState embed(const DickeState& psi) {
    return {psi.n_particles, dicke_embedding(psi.n_particles).cast<cplx>() * psi.amplitudes};
}

Projection project_to_sector(const FullState& psi) {
    const CMatrix e = dicke_embedding(psi.n_particles).cast<cplx>();
    Projection out;
    out.state = {psi.n_particles, e.transpose() * psi.amplitudes};
    out.leakage = (psi.amplitudes - e * out.state.amplitudes).squaredNorm();
    return out;
}

CVector taylor_expm_apply(const CMatrix& h, double dt, const CVector& v) {
    const double scale = norm_one(h) * std::abs(dt);
    const int pieces = std::max(1, static_cast<int>(std::ceil(scale / 0.5)));
    const cplx factor = -kI * (dt / pieces);
    CVector out = v;
    for (int p = 0; p < pieces; ++p) {
        CVector term = out;
        CVector sum = out;
        int k = 1;
        for (; k <= 60; ++k) {
            term = (factor / static_cast<double>(k)) * (h * term);
            sum += term;
            if (term.norm() <= 1e-17 * sum.norm()) break;
        }
        if (k > 60) throw NumericalError("Taylor series did not converge");
        out = std::move(sum);
    }
    return out;
}

FullCdDrive::FullCdDrive(const CdDrive& sector, int n_particles) : sector_(&sector) {
    check_size(n_particles);
    if (sector.dim() != n_particles + 1) throw ParameterError("sector drive built for a different N");
    const double j = sector.coupling();
    a_ = full_hamiltonian(n_particles, 0.0, j);
    b_ = full_lambda_derivative(n_particles, j);
    if (sector.level() == CdLevel::None) return;
    o1_ = kI * (a_ * b_ - b_ * a_);
    if (sector.level() == CdLevel::CD1) return;
    const CMatrix ao1 = a_ * o1_ - o1_ * a_;
    const CMatrix bo1 = b_ * o1_ - o1_ * b_;
    o2_[0] = a_ * ao1 - ao1 * a_;
    o2_[1] = a_ * bo1 - bo1 * a_ + b_ * ao1 - ao1 * b_;
    o2_[2] = b_ * bo1 - bo1 * b_;
    if (sector.deflated()) {
        const double residual = (o2_[0] - sector.deflation() * o1_).norm();
        if (residual > 1e-10 * o2_[0].norm())
            throw NumericalError("full-space O2(0) is not proportional to O1 (residual " + std::to_string(residual) +
                                 ")");
    }
}

CMatrix FullCdDrive::hamiltonian_at(double t, double tau) const {
    const ScheduleSample s = schedule(t, tau);
    CMatrix h = a_ + s.lambda * b_;
    if (sector_->level() == CdLevel::None || s.lambda_dot == 0.0) return h;
    const auto beta = sector_->basis_coefficients(s.lambda);
    CMatrix gauge = beta[0] * o1_;
    if (sector_->level() == CdLevel::CD2) {
        if (sector_->deflated())
            gauge += beta[1] * (o2_[1] + s.lambda * o2_[2]);
        else
            gauge += beta[1] * (o2_[0] + s.lambda * o2_[1] + s.lambda * s.lambda * o2_[2]);
    }
    return h + s.lambda_dot * gauge;
}

OracleRun full_evolve_and_project(const DriveConfig& config, const DickeState& psi0, int n_periods) {
    config.validate();
    check_size(config.n_particles);
    if (psi0.n_particles != config.n_particles) throw ParameterError("state built for a different N");
    if (n_periods < 0) throw ParameterError("period count must be nonnegative");
    if (config.steps_per_period % 2 != 0) throw ParameterError("steps_per_period must be even");

    const CdDrive sector(build_collective_ops(config.n_particles), config.coupling, config.cd_level);
    const FullCdDrive drive(sector, config.n_particles);
    const double h = config.period() / config.steps_per_period;
    const int half = config.steps_per_period / 2;

    OracleRun run;
    FullState psi = embed(psi0);
    auto record = [&]() {
        Projection p = project_to_sector(psi);
        if (p.leakage > 1e-10)
            throw NumericalError("state left the maximal-spin sector (leakage " + std::to_string(p.leakage) + ")");
        run.max_leakage = std::max(run.max_leakage, p.leakage);
        run.full.push_back(psi);
        run.projected.push_back(std::move(p.state));
    };
    record();
    for (int half_period = 0; half_period < 2 * n_periods; ++half_period) {
        for (int j = 0; j < half; ++j) {
            // Same cell times as the sector integrator: t = cell * h.
            const double t = static_cast<double>(half_period % 2 * half + j) * h;
            const CMatrix h1 = drive.hamiltonian_at(t + magnus4::kNode1 * h, config.tau);
            const CMatrix h2 = drive.hamiltonian_at(t + magnus4::kNode2 * h, config.tau);
            psi.amplitudes = taylor_expm_apply(magnus4::kWeight1 * h1 + magnus4::kWeight2 * h2, h, psi.amplitudes);
            psi.amplitudes = taylor_expm_apply(magnus4::kWeight2 * h1 + magnus4::kWeight1 * h2, h, psi.amplitudes);
        }
        record();
    }
    return run;
}

double full_block_entropy(const FullState& psi, int block_size) {
    const int n = psi.n_particles;
    check_size(n);
    if (block_size < 1 || block_size > n - 1) throw ParameterError("block size must be in [1, N-1]");
    const Eigen::Index rest = Eigen::Index{1} << (n - block_size);
    const Eigen::Index block = Eigen::Index{1} << block_size;
    // index = block_bits * rest + rest_bits; column-major map gives the transpose
    const Eigen::Map<const CMatrix> coeffs(psi.amplitudes.data(), rest, block);
    const Eigen::JacobiSVD<CMatrix> svd(coeffs);
    return entropy_from_eigenvalues(svd.singularValues().cwiseAbs2());
}

double full_one_spin_entropy(const FullState& psi) { return full_block_entropy(psi, 1); }

double full_squeezing_xi2(const FullState& psi, const FullOps& ops) {
    const CVector z = ops.sz * psi.amplitudes;
    const double mean = psi.amplitudes.dot(z).real();
    const double second = z.squaredNorm();
    return (second - mean * mean) / (0.25 * ops.n_particles);
}

double full_dicke_overlap(const FullState& psi) {
    if (psi.n_particles % 2 != 0) throw ParameterError("P_mid needs even N");
    const RMatrix e = dicke_embedding(psi.n_particles);
    return std::norm(e.col(psi.n_particles / 2).cast<cplx>().dot(psi.amplitudes));
}

double full_fidelity(const FullState& psi, const FullState& psi0) {
    return std::norm(psi0.amplitudes.dot(psi.amplitudes));
}

FullState full_coherent_state(const FullOps& ops, double theta, double phi) {
    const CMatrix generator = std::sin(phi) * ops.sx - std::cos(phi) * ops.sy;
    CVector up = CVector::Zero(ops.dim());
    up(0) = 1.0;
    return {ops.n_particles, taylor_expm_apply(generator, -theta, up)};
}

double full_husimi(const FullState& psi, const FullOps& ops, double theta, double phi) {
    return full_fidelity(psi, full_coherent_state(ops, theta, phi));
}

}  // namespace lmgcd::oracle
