#include <cmath>

#include <gtest/gtest.h>

#include "qcurrents/models.hpp"
#include "qcurrents/wtd.hpp"
#include "../common/stats.hpp"

using namespace qc;

TEST(Wtd, PoissonSourceIsExponential) {
    const LindbladModel m = bidirectional_poisson_source(2.0, 0.0);
    const NoJumpGenerator gen(m, {0});
    const auto w = wtd_between(gen, 0, {0.0, 0.5, 1.0});
    for (std::size_t i = 0; i < w.t.size(); ++i) EXPECT_NEAR(w.w[0][i], 2.0 * std::exp(-2.0 * w.t[i]), 1e-12);
    const auto mom = wtd_moments(gen, cmat(cmat::Identity(1, 1)), 2);
    EXPECT_NEAR(mom.moment[0], 0.5, 1e-12);
    EXPECT_NEAR(mom.moment[1], 0.5, 1e-12);
}

TEST(Wtd, NormalizationAndMeanWaitingTime) {
    const ExampleA p{0.0, 1.0, 1.0, 0.0};
    const LindbladModel m = build(p);
    const std::size_t emit = m.channel_index("emit");
    const NoJumpGenerator gen(m, {emit});
    const auto w = wtd_between(gen, 0, qc::testing::linspace(0.0, 60.0, 6001));
    double integral = 0.0;
    for (std::size_t i = 1; i < w.t.size(); ++i) integral += 0.5 * (w.w[0][i] + w.w[0][i - 1]) * (w.t[i] - w.t[i - 1]);
    EXPECT_NEAR(integral, 1.0, 1e-6);
    EXPECT_NEAR(w.w[0][0], 0.0, 1e-12);
    const auto ss = jump_steady_state(gen);
    const auto mom = wtd_moments(gen, ss.pi, 1);
    EXPECT_NEAR(mom.moment[0], 1.0 / ss.activity, 1e-10);
    EXPECT_NEAR(ss.activity, std::abs(oracle::example_a_emission_current(1.0, 1.0)), 1e-12);
}

TEST(Wtd, RenewalNoiseMatchesLiouvillian) {
    const LindbladModel m = build(ExampleA{0.0, 1.3, 1.0, 0.0});
    const NoJumpGenerator gen(m, {m.channel_index("emit")});
    const auto r = renewal_check(gen);
    ASSERT_TRUE(r.applicable);
    EXPECT_NEAR(r.wtd_noise, r.noise, 1e-10);
}

TEST(Wtd, TransitionMatrixIsStochastic) {
    const LindbladModel m = build(ExampleB{0.0, 1.0, 0.5, 0.3, 0.6});
    const NoJumpGenerator gen(m);
    const rmat t = jump_transition_matrix(gen);
    for (Eigen::Index q = 0; q < t.cols(); ++q) EXPECT_NEAR(t.col(q).sum(), 1.0, 1e-12);
    EXPECT_TRUE((t.array() >= -1e-14).all());
    const auto ss = jump_steady_state(gen);
    EXPECT_LT(ss.fixed_point_residual, 1e-10);
    double psum = 0.0;
    for (double x : ss.probability) psum += x;
    EXPECT_NEAR(psum, 1.0, 1e-12);
}

TEST(Wtd, DarkStateSurvivalAndSingularSolve) {
    const LindbladModel m = build(ExampleA{0.0, 0.0, 1.0, 0.0});
    const NoJumpGenerator gen(m, {m.channel_index("emit")});
    EXPECT_FALSE(gen.invertible());
    cmat rho = cmat::Zero(2, 2);
    rho(1, 1) = 1.0;
    const auto s = survival(gen, rho, {0.0, 10.0});
    EXPECT_NEAR(s.p_no[1], 1.0, 1e-12);
    EXPECT_NEAR(s.p_infinity, 1.0, 1e-12);
    EXPECT_THROW(gen.solve(vec(rho)), SingularMatrixError);
}

TEST(Wtd, FirstPassageFromExcitedState) {
    const LindbladModel m = build(ExampleA{0.0, 0.0, 0.8, 0.0});
    const NoJumpGenerator gen(m, {m.channel_index("emit")});
    cmat rho = cmat::Zero(2, 2);
    rho(0, 0) = 1.0;
    const auto w = wtd_first(gen, rho, {0.0, 1.0, 2.0});
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(w.w[0][i], 0.8 * std::exp(-0.8 * w.t[i]), 1e-12);
}

TEST(Wtd, DefaultGridSpansTimeScales) {
    const LindbladModel m = build(ExampleA{0.0, 1.0, 1.0, 0.0});
    const NoJumpGenerator gen(m);
    const auto g = default_wtd_grid(gen, 100);
    ASSERT_EQ(g.size(), 100u);
    EXPECT_LT(g.front(), 0.01);
    EXPECT_GT(g.back(), 10.0);
}
