#include "lmgcd/linalg.hpp"

#include <cmath>
#include <string>
#include <vector>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace lmgcd::linalg {

HermitianEigen eigh(const CMatrix& h) {
    const auto n = static_cast<lapack_int>(h.rows());
    if (h.cols() != h.rows()) throw ParameterError("eigh: matrix is not square");
    HermitianEigen out;
    out.vectors = h;
    out.values.resize(n);
    if (n == 0) return out;
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n,
                                           out.values.data());
    if (info != 0) throw NumericalError("zheevd failed with info=" + std::to_string(info));
    return out;
}

TridiagonalEigen eigh_tridiagonal(const RVector& diag, const RVector& offdiag) {
    const auto n = static_cast<lapack_int>(diag.size());
    if (offdiag.size() + 1 != diag.size() && !(n == 0 && offdiag.size() == 0))
        throw ParameterError("eigh_tridiagonal: offdiag must have length n-1");
    TridiagonalEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    if (n == 0) return out;
    if (n == 1) {
        out.values(0) = diag(0);
        out.vectors(0, 0) = 1.0;
        return out;
    }
    RVector d = diag;
    RVector e(n);
    e.head(n - 1) = offdiag;
    e(n - 1) = 0.0;
    lapack_int found = 0;
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    lapack_logical tryrac = 1;
    const lapack_int info =
        LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'A', n, d.data(), e.data(), 0.0, 0.0, 0, 0, &found,
                       out.values.data(), out.vectors.data(), n, n, support.data(), &tryrac);
    if (info != 0 || found != n)
        throw NumericalError("dstemr failed with info=" + std::to_string(info));
    return out;
}

Eigen::Index bandwidth(const CMatrix& h, double rel_tol) {
    const double cutoff = rel_tol * max_abs(h);
    Eigen::Index band = 0;
    for (Eigen::Index j = 0; j < h.cols(); ++j)
        for (Eigen::Index i = 0; i < h.rows(); ++i)
            if (std::abs(h(i, j)) > cutoff) band = std::max(band, std::abs(i - j));
    return band;
}

cplx trace_product(const CMatrix& a, const CMatrix& b) {
    // Tr(ab) = sum_ij a_ij b_ji
    return (a.array() * b.transpose().array()).sum();
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double unitarity_defect(const CMatrix& u) {
    const CMatrix g = u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols());
    return max_abs(g);
}

CMatrix nearest_unitary(const CMatrix& u) {
    Eigen::JacobiSVD<CMatrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

double hermiticity_defect(const CMatrix& h) { return max_abs(h - h.adjoint()); }

namespace {

// exp(-i h dt) = D V diag(phase) V^T D^dagger (tridiagonal) or V diag(phase) V^dagger (dense).
struct ExpFactor {
    bool tridiagonal = false;
    CVector gauge;  // D
    RMatrix real_vectors;
    CMatrix vectors;
    CVector phases;
};

ExpFactor factorize(const CMatrix& h, double dt) {
    const Eigen::Index n = h.rows();
    ExpFactor f;
    if (n > 2 && bandwidth(h) <= 1) {
        f.tridiagonal = true;
        RVector diag(n);
        RVector off(n - 1);
        f.gauge.resize(n);
        f.gauge(0) = 1.0;
        for (Eigen::Index k = 0; k < n; ++k) diag(k) = h(k, k).real();
        for (Eigen::Index k = 0; k + 1 < n; ++k) {
            const cplx e = h(k, k + 1);
            const double mag = std::abs(e);
            off(k) = mag;
            f.gauge(k + 1) = mag > 0.0 ? f.gauge(k) * std::conj(e) / mag : f.gauge(k);
        }
        auto eig = eigh_tridiagonal(diag, off);
        f.real_vectors = std::move(eig.vectors);
        f.phases = (eig.values.array() * (-dt)).unaryExpr([](double x) { return std::polar(1.0, x); });
        return f;
    }
    auto eig = eigh(h);
    f.vectors = std::move(eig.vectors);
    f.phases = (eig.values.array() * (-dt)).unaryExpr([](double x) { return std::polar(1.0, x); });
    return f;
}

void apply_factor(const ExpFactor& f, CMatrix& target) {
    if (f.tridiagonal) {
        const CMatrix x = f.gauge.conjugate().asDiagonal() * target;
        const RMatrix xr = x.real();
        const RMatrix xi = x.imag();
        const RMatrix yr = f.real_vectors.transpose() * xr;
        const RMatrix yi = f.real_vectors.transpose() * xi;
        CMatrix y(yr.rows(), yr.cols());
        y.real() = yr;
        y.imag() = yi;
        y = f.phases.asDiagonal() * y;
        const RMatrix zr = f.real_vectors * y.real();
        const RMatrix zi = f.real_vectors * y.imag();
        target.real() = zr;
        target.imag() = zi;
        target = f.gauge.asDiagonal() * target;
        return;
    }
    CMatrix y = f.vectors.adjoint() * target;
    y = f.phases.asDiagonal() * y;
    target.noalias() = f.vectors * y;
}

}  // namespace

CMatrix expm_hermitian(const CMatrix& h, double dt) {
    CMatrix out = CMatrix::Identity(h.rows(), h.cols());
    apply_hermitian_exp(h, dt, out);
    return out;
}

void apply_hermitian_exp(const CMatrix& h, double dt, CMatrix& target) {
    apply_factor(factorize(h, dt), target);
}

void apply_hermitian_exp(const CMatrix& h, double dt, CVector& target) {
    CMatrix m = target;
    apply_factor(factorize(h, dt), m);
    target = m.col(0);
}

}  // namespace lmgcd::linalg
