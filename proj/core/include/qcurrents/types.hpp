#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qc {

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rmat = Eigen::MatrixXd;
using rvec = Eigen::VectorXd;

inline constexpr cplx I{0.0, 1.0};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Matrix is not diagonalizable to tolerance.
class DefectiveMatrixError : public Error {
public:
    using Error::Error;
};

// Linear system or Sylvester equation has no unique solution.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// Degenerate zero eigenspace: steady state not unique.
class MultipleSteadyStatesError : public Error {
public:
    using Error::Error;
};

class DarkChannelError : public Error {
public:
    using Error::Error;
};

class StabilityError : public Error {
public:
    using Error::Error;
};

class ContinuationError : public Error {
public:
    ContinuationError(const std::string& what, double chi_at)
        : Error(what), chi(chi_at) {}
    double chi;
};

class RootFindingError : public Error {
public:
    using Error::Error;
};

class CommensurabilityError : public Error {
public:
    using Error::Error;
};

class StepSizeError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace qc
