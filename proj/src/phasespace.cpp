#include "lmgcd/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/legendre.hpp>

#include "lmgcd/observables.hpp"

namespace lmgcd {

PhaseSpaceGrid build_grid(int n_particles, int n_theta, int n_phi) {
    if (n_particles < 1) throw ParameterError("particle count must be positive");
    if (2 * n_theta < n_particles + 8)
        throw ParameterError("n_theta = " + std::to_string(n_theta) + " is below N/2 + 4");
    if (n_phi < n_particles + 4) throw ParameterError("n_phi = " + std::to_string(n_phi) + " is below N + 4");

    // Gauss-Legendre in x = cos(theta).
    const auto positive = boost::math::legendre_p_zeros<double>(n_theta);
    std::vector<std::pair<double, double>> nodes;  // (x, weight)
    for (const double x : positive) {
        const double dp = boost::math::legendre_p_prime(n_theta, x);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes.emplace_back(x, w);
        if (x != 0.0) nodes.emplace_back(-x, w);
    }
    std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    PhaseSpaceGrid grid;
    grid.n_particles = n_particles;
    grid.n_theta = n_theta;
    grid.n_phi = n_phi;
    grid.theta.resize(n_theta);
    grid.phi.resize(n_phi);
    grid.weights.resize(static_cast<Eigen::Index>(n_theta) * n_phi);
    const double dphi = 2.0 * kPi / n_phi;
    for (int j = 0; j < n_phi; ++j) grid.phi(j) = j * dphi;
    for (int i = 0; i < n_theta; ++i) {
        grid.theta(i) = std::acos(nodes[static_cast<std::size_t>(i)].first);
        for (int j = 0; j < n_phi; ++j)
            grid.weights(static_cast<Eigen::Index>(i) * n_phi + j) = nodes[static_cast<std::size_t>(i)].second * dphi;
    }
    return grid;
}

PhaseSpaceGrid default_grid(int n_particles) { return build_grid(n_particles, n_particles + 8, 2 * n_particles + 16); }

RMatrix husimi_batch(const CMatrix& states, const PhaseSpaceGrid& grid) {
    const int n = grid.n_particles;
    if (states.rows() != n + 1) throw ParameterError("state dimension does not match the grid");
    const Eigen::Index count = states.cols();

    // <theta,phi|psi> = sum_k b_k(theta) exp(-i k phi) psi_k
    CMatrix fourier(grid.n_phi, n + 1);
    for (int j = 0; j < grid.n_phi; ++j)
        for (int k = 0; k <= n; ++k) fourier(j, k) = std::polar(1.0, -k * grid.phi(j));

    RMatrix q(grid.size(), count);
    for (int i = 0; i < grid.n_theta; ++i) {
        const RVector b = coherent_amplitudes(n, grid.theta(i), 0.0).real();
        const CMatrix weighted = b.asDiagonal() * states;
        const CMatrix amps = fourier * weighted;
        q.middleRows(static_cast<Eigen::Index>(i) * grid.n_phi, grid.n_phi) = amps.cwiseAbs2();
    }
    return q;
}

RVector husimi(const DickeState& psi, const PhaseSpaceGrid& grid) {
    return husimi_batch(psi.amplitudes, grid).col(0);
}

double integrate(const PhaseSpaceGrid& grid, const RVector& values) {
    if (values.size() != grid.size()) throw ParameterError("values do not match the grid");
    return grid.weights.dot(values);
}

double ipr_from_husimi(const RVector& q, const PhaseSpaceGrid& grid, IprConvention convention) {
    const double dim = grid.n_particles + 1.0;
    const double prefactor = dim * dim / (4.0 * kPi);
    const double second_moment = integrate(grid, q.cwiseAbs2());
    return convention == IprConvention::Normalized ? 1.0 / (prefactor * second_moment) : prefactor / second_moment;
}

double ipr(const DickeState& psi, const PhaseSpaceGrid& grid, IprConvention convention) {
    return ipr_from_husimi(husimi(psi, grid), grid, convention);
}

WehrlResult wehrl_from_husimi(const RVector& q, const PhaseSpaceGrid& grid) {
    const double dim = grid.n_particles + 1.0;
    const RVector integrand = q.unaryExpr([](double v) { return v < 1e-300 ? 0.0 : v * std::log(v); });
    WehrlResult out;
    out.entropy = -dim / (4.0 * kPi) * integrate(grid, integrand);
    out.measure_l = std::exp(out.entropy) / dim;
    return out;
}

WehrlResult wehrl(const DickeState& psi, const PhaseSpaceGrid& grid) { return wehrl_from_husimi(husimi(psi, grid), grid); }

EigenstateAverages eigenstate_averages(const CMatrix& eigenvectors, int n_particles, const PhaseSpaceGrid& grid,
                                       IprConvention convention) {
    if (grid.n_particles != n_particles) throw ParameterError("grid built for a different N");
    const RMatrix q = husimi_batch(eigenvectors, grid);
    EigenstateAverages out;
    out.per_state.reserve(static_cast<std::size_t>(q.cols()));
    for (Eigen::Index s = 0; s < q.cols(); ++s) {
        const RVector col = q.col(s);
        const WehrlResult w = wehrl_from_husimi(col, grid);
        out.per_state.push_back({ipr_from_husimi(col, grid, convention), w.entropy, w.measure_l});
        out.mean_ipr += out.per_state.back().ipr;
        out.mean_l += w.measure_l;
    }
    out.mean_ipr /= static_cast<double>(q.cols());
    out.mean_l /= static_cast<double>(q.cols());
    return out;
}

EigenstateAverages eigenstate_averages(const FloquetData& floquet, const PhaseSpaceGrid& grid,
                                       IprConvention convention) {
    return eigenstate_averages(floquet.eigenvectors, grid.n_particles, grid, convention);
}

AngleGrid uniform_angle_grid(int n_theta, int n_phi) {
    if (n_theta < 1 || n_phi < 1) throw ParameterError("angle grid must be non-empty");
    AngleGrid out;
    for (int i = 0; i < n_theta; ++i) out.theta.push_back((i + 0.5) * kPi / n_theta);
    for (int j = 0; j < n_phi; ++j) out.phi.push_back(2.0 * kPi * j / n_phi);
    return out;
}

RVector one_spin_entropy_batch(const CMatrix& states, const CollectiveOps& ops) {
    if (states.rows() != ops.dim()) throw ParameterError("state dimension mismatch");
    const Eigen::Index dim = ops.dim();
    const double n = ops.n_particles;
    RVector raise(dim > 1 ? dim - 1 : 0);  // <k-1|S+|k>
    for (Eigen::Index k = 1; k < dim; ++k) raise(k - 1) = 2.0 * ops.sx(k - 1, k).real();
    const RVector m = ops.sz.diagonal().real();

    RVector out(states.cols());
    for (Eigen::Index s = 0; s < states.cols(); ++s) {
        const auto psi = states.col(s);
        const double z = (psi.cwiseAbs2().array() * m.array()).sum();
        cplx plus = 0.0;  // <S+> = <Sx> + i <Sy>
        for (Eigen::Index k = 1; k < dim; ++k) plus += std::conj(psi(k - 1)) * raise(k - 1) * psi(k);
        const double radius = std::sqrt(std::norm(plus) + z * z) / n;
        out(s) = entropy_from_eigenvalues(RVector{{0.5 + radius, 0.5 - radius}});
    }
    return out;
}

std::vector<ChaosMapPoint> local_chaos_scan(const FloquetData& floquet, const CollectiveOps& ops,
                                            const AngleGrid& angles, int n_start, int n_end) {
    if (n_start < 0 || n_end < n_start) throw ParameterError("window must satisfy 0 <= n_start <= n_end");
    if (floquet.eigenvectors.rows() != ops.dim()) throw ParameterError("Floquet data and operators differ in N");
    const int n = ops.n_particles;
    const auto n_theta = static_cast<Eigen::Index>(angles.theta.size());
    const auto n_phi = static_cast<Eigen::Index>(angles.phi.size());
    const Eigen::Index count = n_theta * n_phi;

    CMatrix states(n + 1, count);
    for (Eigen::Index i = 0; i < n_theta; ++i)
        for (Eigen::Index j = 0; j < n_phi; ++j)
            states.col(i * n_phi + j) = coherent_amplitudes(n, angles.theta[static_cast<std::size_t>(i)],
                                                            angles.phi[static_cast<std::size_t>(j)]);

    const CVector phases = (floquet.quasienergies.array() * (-floquet.period * n_start))
                               .unaryExpr([](double x) { return std::polar(1.0, x); });
    states = floquet.eigenvectors * (phases.asDiagonal() * (floquet.eigenvectors.adjoint() * states));

    RVector sum = RVector::Zero(count);
    for (int step = n_start; step <= n_end; ++step) {
        sum += one_spin_entropy_batch(states, ops);
        if (step < n_end) states = floquet.u_f * states;
    }
    sum /= static_cast<double>(n_end - n_start + 1);

    std::vector<ChaosMapPoint> out;
    out.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < n_theta; ++i)
        for (Eigen::Index j = 0; j < n_phi; ++j)
            out.push_back({angles.theta[static_cast<std::size_t>(i)], angles.phi[static_cast<std::size_t>(j)],
                           sum(i * n_phi + j)});
    return out;
}

}  // namespace lmgcd
