#pragma once

#include <optional>

#include "qcurrents/types.hpp"

namespace qc {

// Eigendecomposition m = X diag(values) Y with Y X = 1.
// Columns of `right` are |x_j>>, rows of `left` are <<y_j|.
struct SpectralDecomposition {
    cvec values;
    cmat right;
    cmat left;
    double condition = 1.0;  // ||X||_F ||Y||_F

    Eigen::Index size() const { return values.size(); }
    cmat reconstruct() const;
    // |x_j>><<y_j|
    cmat projector(Eigen::Index j) const;
};

cmat kron(const cmat& a, const cmat& b);

// Column-stacking vectorization and its inverse.
cvec vec(const cmat& m);
cmat unvec(const cvec& v, Eigen::Index rows);

// Eigenvalues sorted by descending real part, ties (within `tie_tol` scaled by
// the spectral radius) by descending imaginary part. Throws
// DefectiveMatrixError when the eigenvector condition exceeds `max_condition`.
SpectralDecomposition eig(const cmat& m, double max_condition = 1e8, double tie_tol = 1e-9);

// Square: LU with reciprocal-condition check. Rectangular (rows > cols):
// least squares via column-pivoted QR with a rank check.
cmat solve_linear(const cmat& a, const cmat& b, double rank_tol = 1e-12);
cvec solve_linear(const cmat& a, const cvec& b, double rank_tol = 1e-12);

// Solves a X + X b = c by Bartels-Stewart on complex Schur forms.
cmat solve_sylvester(const cmat& a, const cmat& b, const cmat& c);
// a X + X a^dagger = c
cmat solve_lyapunov(const cmat& a, const cmat& c);

cmat expm(const cmat& a);
cvec expm_action(const cmat& a, const cvec& v, double t);

// Repeated e^{A t} v for many t. Uses the spectral route when A is
// diagonalizable, falling back to the matrix exponential otherwise.
class Propagator {
public:
    explicit Propagator(cmat generator, double max_condition = 1e8);

    cvec apply(const cvec& v, double t) const;
    bool spectral() const { return spec_.has_value(); }
    const std::optional<SpectralDecomposition>& decomposition() const { return spec_; }
    const cmat& generator() const { return a_; }

private:
    cmat a_;
    std::optional<SpectralDecomposition> spec_;
};

}  // namespace qc
