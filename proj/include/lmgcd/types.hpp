#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lmgcd {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Input outside the documented domain of an operation.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Requested Krylov order has no implementation.
class UnsupportedOrderError : public std::invalid_argument {
public:
    explicit UnsupportedOrderError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computed quantity violated an internal consistency bound (unitarity,
/// eigenvalue range, sector leakage, parity classification).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Step refinement did not reach the requested self-convergence tolerance.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lmgcd
