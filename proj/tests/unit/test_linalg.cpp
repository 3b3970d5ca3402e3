#include <random>

#include <gtest/gtest.h>

#include "qcurrents/linalg.hpp"

using namespace qc;

namespace {

cmat random_matrix(Eigen::Index n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    cmat m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

}  // namespace

TEST(Linalg, VecUnvecRoundTrip) {
    const cmat m = random_matrix(4, 1);
    const cvec v = vec(m);
    EXPECT_EQ(v(1), m(1, 0));
    EXPECT_EQ(v(4), m(0, 1));
    EXPECT_LT((unvec(v, 4) - m).norm(), 1e-15);
}

TEST(Linalg, KronVecIdentity) {
    // vec(A X B) = (B^T (x) A) vec(X)
    const cmat a = random_matrix(3, 2), x = random_matrix(3, 3), b = random_matrix(3, 4);
    EXPECT_LT((vec(a * x * b) - kron(b.transpose(), a) * vec(x)).norm(), 1e-12);
}

TEST(Linalg, EigReconstructsAndIsBiorthogonal) {
    const cmat m = random_matrix(6, 5);
    const auto s = eig(m);
    EXPECT_LT((s.reconstruct() - m).norm() / m.norm(), 1e-12);
    EXPECT_LT((s.left * s.right - cmat::Identity(6, 6)).norm(), 1e-10);
    for (Eigen::Index j = 1; j < s.size(); ++j) EXPECT_GE(s.values(j - 1).real(), s.values(j).real() - 1e-12);
    cmat sum = cmat::Zero(6, 6);
    for (Eigen::Index j = 0; j < s.size(); ++j) sum += s.projector(j);
    EXPECT_LT((sum - cmat::Identity(6, 6)).norm(), 1e-10);
}

TEST(Linalg, EigRejectsJordanBlock) {
    cmat m = cmat::Zero(2, 2);
    m(0, 1) = 1.0;
    EXPECT_THROW(eig(m), DefectiveMatrixError);
}

TEST(Linalg, SolveLinearSquareAndSingular) {
    const cmat a = random_matrix(5, 7);
    const cvec x = random_matrix(5, 8).col(0);
    EXPECT_LT((solve_linear(a, cvec(a * x)) - x).norm(), 1e-10);
    cmat s = a;
    s.row(4) = s.row(3);
    EXPECT_THROW(solve_linear(s, cvec(a * x)), SingularMatrixError);
}

TEST(Linalg, SolveLinearLeastSquares) {
    const cmat a = random_matrix(6, 9).leftCols(4);
    const cvec x = random_matrix(4, 10).col(0);
    EXPECT_LT((solve_linear(a, cvec(a * x)) - x).norm(), 1e-10);
}

TEST(Linalg, SylvesterAndLyapunov) {
    const cmat a = random_matrix(4, 11) - 6.0 * cmat::Identity(4, 4);
    const cmat b = random_matrix(3, 12) - 6.0 * cmat::Identity(3, 3);
    const cmat c = random_matrix(4, 13).leftCols(3);
    const cmat x = solve_sylvester(a, b, c);
    EXPECT_LT((a * x + x * b - c).norm(), 1e-10);

    const cmat cl = random_matrix(4, 14);
    const cmat h = cl + cl.adjoint();
    const cmat y = solve_lyapunov(a, h);
    EXPECT_LT((a * y + y * a.adjoint() - h).norm(), 1e-10);
    EXPECT_LT((y - y.adjoint()).norm(), 1e-10);
}

TEST(Linalg, SylvesterSingularThrows) {
    const cmat a = cmat::Identity(2, 2);
    EXPECT_THROW(solve_sylvester(a, -a, a), SingularMatrixError);
}

TEST(Linalg, ExpmMatchesRotation) {
    cmat g = cmat::Zero(2, 2);
    g(0, 1) = -1.0;
    g(1, 0) = 1.0;
    const double t = 0.7;
    const cmat e = expm(g * t);
    EXPECT_NEAR(e(0, 0).real(), std::cos(t), 1e-14);
    EXPECT_NEAR(e(1, 0).real(), std::sin(t), 1e-14);
}

TEST(Linalg, ExpmActionSparseMatchesDense) {
    // Tridiagonal generator large enough to take the sparse path.
    const Eigen::Index n = 64;
    cmat a = cmat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = cplx(-1.0 - 0.01 * i, 0.3);
        if (i + 1 < n) {
            a(i + 1, i) = 0.5;
            a(i, i + 1) = cplx(0.2, -0.1);
        }
    }
    cvec v = cvec::Zero(n);
    v(3) = 1.0;
    v(40) = cplx(0.0, 2.0);
    for (double t : {0.1, 1.0, 7.5}) {
        const cvec got = expm_action(a, v, t);
        const cvec want = expm(a * t) * v;
        EXPECT_LT((got - want).norm(), 1e-11 * std::max(1.0, want.norm())) << "t=" << t;
    }
}

TEST(Linalg, PropagatorSpectralAndFallback) {
    const cmat a = random_matrix(4, 20) - 3.0 * cmat::Identity(4, 4);
    const Propagator p(a);
    EXPECT_TRUE(p.spectral());
    const cvec v = random_matrix(4, 21).col(0);
    EXPECT_LT((p.apply(v, 0.8) - expm(a * 0.8) * v).norm(), 1e-10);

    cmat j = cmat::Zero(2, 2);
    j(0, 0) = j(1, 1) = -1.0;
    j(0, 1) = 1.0;
    const Propagator q(j);
    EXPECT_FALSE(q.spectral());
    const cvec w = cvec::Ones(2);
    EXPECT_LT((q.apply(w, 2.0) - expm(j * 2.0) * w).norm(), 1e-13);
}
