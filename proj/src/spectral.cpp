#include "lmgcd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lmgcd/linalg.hpp"

namespace lmgcd {

std::string to_string(Sector sector) {
    switch (sector) {
        case Sector::Even: return "even";
        case Sector::Odd: return "odd";
        case Sector::Unresolved: return "all";
    }
    return "unknown";
}

namespace {

// -arg(z)/T in (-pi/T, pi/T]
double quasienergy_of(cplx z, double period) {
    double eps = -std::arg(z) / period;
    if (eps <= -kPi / period) eps = kPi / period;
    return eps;
}

}  // namespace

FloquetData floquet_eigs(const CMatrix& u_f, double period, const DriveConfig& config) {
    if (u_f.rows() != u_f.cols()) throw ParameterError("U_F must be square");
    if (!(period > 0.0)) throw ParameterError("period must be positive");
    const double defect = linalg::unitarity_defect(u_f);
    if (defect > 1e-8) throw ParameterError("U_F is not unitary (defect " + std::to_string(defect) + ")");

    Eigen::ComplexSchur<CMatrix> schur(u_f);
    if (schur.info() != Eigen::Success) throw NumericalError("complex Schur decomposition failed");
    const CMatrix& t = schur.matrixT();
    const CMatrix& z = schur.matrixU();
    const Eigen::Index n = u_f.rows();

    std::vector<double> eps(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) eps[static_cast<std::size_t>(i)] = quasienergy_of(t(i, i), period);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return eps[static_cast<std::size_t>(a)] < eps[static_cast<std::size_t>(b)]; });

    FloquetData out;
    out.u_f = u_f;
    out.period = period;
    out.config = config;
    out.quasienergies.resize(n);
    out.eigenvectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.quasienergies(i) = eps[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        out.eigenvectors.col(i) = z.col(order[static_cast<std::size_t>(i)]);
    }
    return out;
}

CMatrix parity_operator(const CollectiveOps& ops) {
    const cplx phase = std::polar(1.0, kPi * ops.spin());
    return phase * linalg::expm_hermitian(ops.sx, kPi);
}

ParityResolved parity_resolve(const FloquetData& floquet, const CollectiveOps& ops) {
    const CMatrix parity = parity_operator(ops);
    const Eigen::Index n = floquet.eigenvectors.cols();
    if (parity.rows() != n) throw ParameterError("operators and Floquet data have different dimensions");
    const double comm = linalg::max_abs(parity * floquet.u_f - floquet.u_f * parity);
    if (comm > 1e-8) throw ParameterError("parity does not commute with U_F (" + std::to_string(comm) + ")");

    const double period = floquet.period;
    if (!(period > 0.0)) throw ParameterError("Floquet data carries no period");
    const double zone = 2.0 * kPi / period;

    ParityResolved out;
    out.eigenvectors = floquet.eigenvectors;
    out.quasienergies = floquet.quasienergies;
    out.labels.assign(static_cast<std::size_t>(n), 0);

    auto label_of = [](double p) { return std::abs(p - 1.0) < 1e-6 ? 1 : (std::abs(p + 1.0) < 1e-6 ? -1 : 0); };
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = out.eigenvectors.col(i).dot(parity * out.eigenvectors.col(i)).real();
        out.labels[static_cast<std::size_t>(i)] = label_of(p);
    }

    auto circle_gap = [&](double a, double b) {
        const double d = std::fmod(std::abs(a - b), zone);
        return std::min(d, zone - d);
    };

    for (Eigen::Index i = 0; i < n; ++i) {
        if (out.labels[static_cast<std::size_t>(i)] != 0) continue;
        bool resolved = false;
        for (double width = 1e-12 * zone; width <= 1e-3 * zone && !resolved; width *= 10.0) {
            std::vector<Eigen::Index> members;
            for (Eigen::Index j = 0; j < n; ++j)
                if (circle_gap(out.quasienergies(i), out.quasienergies(j)) <= width) members.push_back(j);
            if (members.size() < 2) continue;
            const auto m = static_cast<Eigen::Index>(members.size());
            CMatrix basis(n, m);
            for (Eigen::Index k = 0; k < m; ++k) basis.col(k) = out.eigenvectors.col(members[static_cast<std::size_t>(k)]);
            const CMatrix restricted = basis.adjoint() * parity * basis;
            const auto eig = linalg::eigh(0.5 * (restricted + restricted.adjoint()));
            bool ok = true;
            for (Eigen::Index k = 0; k < m; ++k) ok = ok && label_of(eig.values(k)) != 0;
            if (!ok) continue;
            const CMatrix rotated = basis * eig.vectors;
            for (Eigen::Index k = 0; k < m; ++k) {
                const auto col = members[static_cast<std::size_t>(k)];
                out.eigenvectors.col(col) = rotated.col(k);
                out.labels[static_cast<std::size_t>(col)] = label_of(eig.values(k));
                const cplx rq = rotated.col(k).dot(floquet.u_f * rotated.col(k));
                out.quasienergies(col) = quasienergy_of(rq, period);
            }
            ++out.clusters_resolved;
            resolved = true;
        }
        if (!resolved)
            throw NumericalError("could not resolve the parity of Floquet eigenvector " + std::to_string(i));
    }

    for (Eigen::Index i = 0; i < n; ++i)
        (out.labels[static_cast<std::size_t>(i)] > 0 ? out.even : out.odd).push_back(out.quasienergies(i));
    std::sort(out.even.begin(), out.even.end());
    std::sort(out.odd.begin(), out.odd.end());
    return out;
}

SpacingStats r_statistics(std::vector<double> levels, double period, Sector sector) {
    if (levels.size() < 3) throw ParameterError("level statistics need at least 3 levels");
    if (!(period > 0.0)) throw ParameterError("period must be positive");
    const double zone = 2.0 * kPi / period;
    std::sort(levels.begin(), levels.end());

    SpacingStats out;
    out.sector = sector;
    std::vector<double> kept;
    kept.reserve(levels.size());
    for (const double e : levels) {
        if (!kept.empty() && e - kept.back() < 1e-13) {
            ++out.degeneracies;
            continue;
        }
        kept.push_back(e);
    }
    if (kept.size() > 1 && kept.front() + zone - kept.back() < 1e-13) {
        kept.pop_back();
        ++out.degeneracies;
    }
    if (kept.size() < 3) throw ParameterError("fewer than 3 distinct levels");

    const std::size_t n = kept.size();
    std::vector<double> gaps(n);
    for (std::size_t i = 0; i + 1 < n; ++i) gaps[i] = kept[i + 1] - kept[i];
    gaps[n - 1] = kept.front() + zone - kept.back();

    out.levels = static_cast<int>(n);
    out.r_values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = gaps[i];
        const double b = gaps[(i + 1) % n];
        out.r_values[i] = std::min(a, b) / std::max(a, b);
    }
    out.r_mean = std::accumulate(out.r_values.begin(), out.r_values.end(), 0.0) / static_cast<double>(n);
    return out;
}

RVector eigenstate_overlaps(const DickeState& psi, const FloquetData& floquet) {
    if (psi.amplitudes.size() != floquet.eigenvectors.rows()) throw ParameterError("state dimension mismatch");
    const CVector c = floquet.eigenvectors.adjoint() * psi.amplitudes;
    return c.cwiseAbs2();
}

double max_eigenstate_overlap(const DickeState& psi, const FloquetData& floquet) {
    return eigenstate_overlaps(psi, floquet).maxCoeff();
}

}  // namespace lmgcd
