#include <gtest/gtest.h>

#include "qcurrents/lindblad.hpp"
#include "qcurrents/models.hpp"

using namespace qc;

TEST(Lindblad, SuperoperatorsMatchMatrixAction) {
    cmat a(2, 2), b(2, 2), rho(2, 2);
    a << 1.0, cplx(0, 2), 3.0, -1.0;
    b << 0.5, 1.0, cplx(0, -1), 2.0;
    rho << 0.6, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.4;
    const cvec r = vec(rho);
    EXPECT_LT((unvec(left_action(a) * r, 2) - a * rho).norm(), 1e-14);
    EXPECT_LT((unvec(right_action(b) * r, 2) - rho * b).norm(), 1e-14);
    EXPECT_LT((unvec(sandwich(a, b) * r, 2) - a * rho * b).norm(), 1e-14);
    const cmat d = a * rho * a.adjoint() - 0.5 * (a.adjoint() * a * rho + rho * a.adjoint() * a);
    EXPECT_LT((unvec(dissipator(a) * r, 2) - d).norm(), 1e-14);
    EXPECT_LT((unvec(hamiltonian_superop(b + b.adjoint()) * r, 2) -
               (-I * ((b + b.adjoint()) * rho - rho * (b + b.adjoint())))).norm(), 1e-14);
}

TEST(Lindblad, TracePreservingForAllModels) {
    const std::vector<LindbladModel> models{build(ExampleA{0.3, 1.0, 0.7, 0.2}), build(ExampleB{}),
                                            build(ExampleC{0.1, 1.0, 0.4}),
                                            build(ExampleD{cplx(0.0, 0.2), 0.1, 0.0, 1.0, 12})};
    for (const auto& m : models) {
        const Liouvillian l(m);
        EXPECT_LT(l.trace_residual(), 1e-12);
    }
}

TEST(Lindblad, SteadyStateIsValidDensityMatrix) {
    const Liouvillian l(build(ExampleA{0.2, 1.3, 1.0, 0.4}));
    const cmat rho = l.steady_state();
    EXPECT_NO_THROW(validate_density_matrix(rho));
    EXPECT_LT((l.matrix() * l.steady_state_vec()).norm(), 1e-12);
}

TEST(Lindblad, DrazinInverseProperties) {
    const Liouvillian l(build(ExampleA{0.2, 1.0, 1.0, 0.3}));
    const cmat& lp = l.drazin();
    const cmat& lm = l.matrix();
    const Eigen::Index n = lm.rows();
    const cmat p = cmat::Identity(n, n) - l.steady_state_vec() * trace_row(2).transpose();
    EXPECT_LT((lm * lp - p).norm(), 1e-10);
    EXPECT_LT((lp * lm - p).norm(), 1e-10);
    EXPECT_LT((lp * lm * lp - lp).norm(), 1e-10);
    EXPECT_LT((trace_row(2).transpose() * lp).norm(), 1e-12);
    EXPECT_LT((lp * l.steady_state_vec()).norm(), 1e-12);
    const cvec v = cvec::LinSpaced(n, 0.0, 1.0);
    EXPECT_LT((l.drazin_apply(v) - lp * v).norm(), 1e-10);
}

TEST(Lindblad, DrazinMatchesClosedForm) {
    const Liouvillian l(build(ExampleA{0.0, 0.7, 1.3, 0.0}));
    EXPECT_LT((l.drazin() - oracle::example_a_drazin(1.3, 0.7)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Lindblad, PropagationRelaxesToSteadyState) {
    const Liouvillian l(build(ExampleA{0.0, 1.0, 1.0, 0.0}));
    cmat rho0 = cmat::Zero(2, 2);
    rho0(1, 1) = 1.0;
    const cmat late = l.propagate(rho0, 60.0);
    EXPECT_LT((late - l.steady_state()).norm(), 1e-10);
    const cmat mid = l.propagate(rho0, 0.5);
    EXPECT_NEAR(mid.trace().real(), 1.0, 1e-13);
}

TEST(Lindblad, AdjointEvolutionDuality) {
    const Liouvillian l(build(ExampleC{0.2, 1.0, 0.5}));
    cmat rho0 = cmat::Zero(2, 2);
    rho0(0, 0) = 1.0;
    const cmat a = sigma_x();
    const double t = 1.7;
    const cplx schr = (a * l.propagate(rho0, t)).trace();
    const cplx heis = (evolve_adjoint(l, a, t) * rho0).trace();
    EXPECT_LT(std::abs(schr - heis), 1e-12);
}

TEST(Lindblad, EfficiencySplitsChannel) {
    JumpChannel c{"emit", sigma_minus(), 1.0, 0.0, true, 0.25};
    const LindbladModel m(cmat::Zero(2, 2), {c});
    ASSERT_EQ(m.expanded_channels().size(), 2u);
    EXPECT_EQ(m.origin()[0], 0u);
    EXPECT_EQ(m.origin()[1], 0u);
    const Liouvillian split(m);
    c.efficiency = 1.0;
    const Liouvillian full(LindbladModel(cmat::Zero(2, 2), {c}));
    EXPECT_LT((split.matrix() - full.matrix()).norm(), 1e-14);
}

TEST(Lindblad, RejectsBadInput) {
    EXPECT_THROW(LindbladModel(cmat::Zero(2, 3), {}), Error);
    cmat h = cmat::Zero(2, 2);
    h(0, 1) = 1.0;
    EXPECT_THROW(LindbladModel(h, {}), Error);
    cmat rho = cmat::Identity(2, 2);
    EXPECT_THROW(validate_density_matrix(rho), Error);
}

TEST(Lindblad, MultipleSteadyStatesDetected) {
    const Liouvillian l(LindbladModel(cmat::Zero(2, 2), {{"dephase", sigma_z(), 1.0}}));
    EXPECT_THROW(l.steady_state_vec(), MultipleSteadyStatesError);
}
