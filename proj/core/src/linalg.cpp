#include "qcurrents/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

namespace qc {

cmat SpectralDecomposition::reconstruct() const {
    return right * values.asDiagonal() * left;
}

cmat SpectralDecomposition::projector(Eigen::Index j) const {
    return right.col(j) * left.row(j);
}

cmat kron(const cmat& a, const cmat& b) {
    const Eigen::Index ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
    cmat out(ar * br, ac * bc);
    for (Eigen::Index j = 0; j < ac; ++j) {
        for (Eigen::Index i = 0; i < ar; ++i) {
            out.block(i * br, j * bc, br, bc) = a(i, j) * b;
        }
    }
    return out;
}

cvec vec(const cmat& m) {
    return Eigen::Map<const cvec>(m.data(), m.size());
}

cmat unvec(const cvec& v, Eigen::Index rows) {
    if (rows <= 0 || v.size() % rows != 0) {
        throw DimensionError("unvec: vector length not divisible by row count");
    }
    return Eigen::Map<const cmat>(v.data(), rows, v.size() / rows);
}

SpectralDecomposition eig(const cmat& m, double max_condition, double tie_tol) {
    if (m.rows() != m.cols()) throw DimensionError("eig: matrix must be square");
    const Eigen::Index n = m.rows();
    SpectralDecomposition out;
    if (n == 0) return out;

    Eigen::ComplexEigenSolver<cmat> solver(m, true);
    if (solver.info() != Eigen::Success) {
        throw DefectiveMatrixError("eig: eigensolver failed to converge");
    }
    cvec vals = solver.eigenvalues();
    cmat x = solver.eigenvectors();
    for (Eigen::Index j = 0; j < n; ++j) {
        const double nrm = x.col(j).norm();
        if (nrm > 0) x.col(j) /= nrm;
    }

    const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
    const double tol = tie_tol * scale;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index p, Eigen::Index q) {
        return vals(p).real() > vals(q).real();
    });
    // Within runs of nearly equal real parts, order by imaginary part.
    for (std::size_t s = 0; s < order.size();) {
        std::size_t e = s + 1;
        while (e < order.size() &&
               std::abs(vals(order[e]).real() - vals(order[e - 1]).real()) <= tol) {
            ++e;
        }
        std::sort(order.begin() + static_cast<std::ptrdiff_t>(s),
                  order.begin() + static_cast<std::ptrdiff_t>(e),
                  [&](Eigen::Index p, Eigen::Index q) { return vals(p).imag() > vals(q).imag(); });
        s = e;
    }

    out.values.resize(n);
    out.right.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        out.values(j) = vals(order[static_cast<std::size_t>(j)]);
        out.right.col(j) = x.col(order[static_cast<std::size_t>(j)]);
    }

    Eigen::PartialPivLU<cmat> lu(out.right);
    const double rcond = lu.rcond();
    if (!(rcond > 1.0 / max_condition)) {
        std::ostringstream msg;
        msg << "eig: matrix is defective to tolerance (eigenvector condition ~"
            << (rcond > 0 ? 1.0 / rcond : INFINITY) << " > " << max_condition << ")";
        throw DefectiveMatrixError(msg.str());
    }
    out.left = lu.inverse();
    out.condition = out.right.norm() * out.left.norm();
    if (out.condition > max_condition) {
        std::ostringstream msg;
        msg << "eig: matrix is defective to tolerance (eigenvector condition "
            << out.condition << " > " << max_condition << ")";
        throw DefectiveMatrixError(msg.str());
    }
    return out;
}

cmat solve_linear(const cmat& a, const cmat& b, double rank_tol) {
    if (a.rows() != b.rows()) throw DimensionError("solve_linear: row mismatch between a and b");
    if (a.rows() < a.cols()) {
        throw DimensionError("solve_linear: underdetermined systems are not supported");
    }
    if (a.rows() == a.cols()) {
        Eigen::PartialPivLU<cmat> lu(a);
        const double rc = lu.rcond();
        // The rcond estimate is unreliable when a pivot is exactly zero.
        const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
        if (!(rc > rank_tol) || !(pivots.minCoeff() > rank_tol * pivots.maxCoeff())) {
            std::ostringstream msg;
            msg << "solve_linear: matrix is singular to tolerance (rcond " << rc << ")";
            throw SingularMatrixError(msg.str());
        }
        return lu.solve(b);
    }
    Eigen::ColPivHouseholderQR<cmat> qr(a);
    qr.setThreshold(rank_tol);
    if (qr.rank() < a.cols()) {
        std::ostringstream msg;
        msg << "solve_linear: least-squares system is rank deficient (rank " << qr.rank()
            << " of " << a.cols() << ")";
        throw SingularMatrixError(msg.str());
    }
    return qr.solve(b);
}

cvec solve_linear(const cmat& a, const cvec& b, double rank_tol) {
    return solve_linear(a, cmat(b), rank_tol).col(0);
}

cmat solve_sylvester(const cmat& a, const cmat& b, const cmat& c) {
    if (a.rows() != a.cols() || b.rows() != b.cols()) {
        throw DimensionError("solve_sylvester: a and b must be square");
    }
    if (c.rows() != a.rows() || c.cols() != b.rows()) {
        throw DimensionError("solve_sylvester: c has incompatible shape");
    }
    const Eigen::Index m = a.rows(), n = b.rows();
    // a = U T U^dagger (upper), b = V S V^dagger (upper).
    Eigen::ComplexSchur<cmat> sa(a), sb(b);
    const cmat& t = sa.matrixT();
    const cmat& s = sb.matrixT();
    const cmat& u = sa.matrixU();
    const cmat& v = sb.matrixU();
    const cmat f = u.adjoint() * c * v;

    const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
    cmat y = cmat::Zero(m, n);
    // Column k: (T + S_kk) y_k = f_k - sum_{l<k} S_lk y_l
    for (Eigen::Index k = 0; k < n; ++k) {
        cvec rhs = f.col(k);
        for (Eigen::Index l = 0; l < k; ++l) rhs -= s(l, k) * y.col(l);
        for (Eigen::Index i = m - 1; i >= 0; --i) {
            cplx acc = rhs(i);
            for (Eigen::Index j = i + 1; j < m; ++j) acc -= t(i, j) * y(j, k);
            const cplx piv = t(i, i) + s(k, k);
            if (std::abs(piv) <= 1e-14 * scale) {
                throw SingularMatrixError(
                    "solve_sylvester: spectra of a and -b overlap; equation is singular");
            }
            y(i, k) = acc / piv;
        }
    }
    return u * y * v.adjoint();
}

cmat solve_lyapunov(const cmat& a, const cmat& c) {
    return solve_sylvester(a, a.adjoint(), c);
}

cmat expm(const cmat& a) {
    if (a.rows() != a.cols()) throw DimensionError("expm: matrix must be square");
    cmat out = a.exp();
    if (!out.allFinite()) throw Error("expm: overflow in matrix exponential");
    return out;
}

cvec expm_action(const cmat& a, const cvec& v, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw Error("expm_action: t must be finite and >= 0");
    if (a.cols() != v.size()) throw DimensionError("expm_action: size mismatch");
    if (t == 0.0) return v;
    const Eigen::Index n = a.rows();
    const auto nnz = (a.array() != cplx(0.0)).count();
    if (n < 32 || nnz > n * n / 5) return expm(a * t) * v;

    // Sparse generator: shifted, scaled Taylor series applied to v.
    const cplx mu = a.trace() / static_cast<double>(n);
    const cmat shifted = (a - mu * cmat::Identity(n, n)) * t;
    const double norm = shifted.cwiseAbs().colwise().sum().maxCoeff();
    const Eigen::SparseMatrix<cplx> b = shifted.sparseView();
    const auto steps = static_cast<int>(std::max(1.0, std::ceil(norm / 2.0)));
    const cplx step_shift = std::exp(mu * t / static_cast<double>(steps));
    cvec f = v;
    for (int s = 0; s < steps; ++s) {
        cvec term = f;
        cvec sum = f;
        double prev = term.cwiseAbs().maxCoeff();
        for (int k = 1; k <= 80; ++k) {
            term = (b * term) / static_cast<double>(k * steps);
            sum += term;
            const double cur = term.cwiseAbs().maxCoeff();
            if (cur + prev <= 1e-17 * sum.cwiseAbs().maxCoeff()) break;
            prev = cur;
        }
        f = step_shift * sum;
    }
    if (!f.allFinite()) throw Error("expm_action: overflow");
    return f;
}

Propagator::Propagator(cmat generator, double max_condition) : a_(std::move(generator)) {
    try {
        spec_ = eig(a_, max_condition);
    } catch (const DefectiveMatrixError&) {
        spec_.reset();
    }
}

cvec Propagator::apply(const cvec& v, double t) const {
    if (!spec_) return expm_action(a_, v, t);
    const cvec coeff = spec_->left * v;
    cvec scaled(coeff.size());
    for (Eigen::Index j = 0; j < coeff.size(); ++j) {
        scaled(j) = std::exp(spec_->values(j) * t) * coeff(j);
    }
    return spec_->right * scaled;
}

}  // namespace qc
