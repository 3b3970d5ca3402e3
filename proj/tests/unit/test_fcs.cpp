#include <cmath>

#include <gtest/gtest.h>

#include "qcurrents/fcs.hpp"
#include "qcurrents/models.hpp"
#include "../common/stats.hpp"

using namespace qc;
using qc::testing::linspace;
using qc::testing::rel_err;

TEST(Fcs, ScgfVanishesAtOriginAndMatchesDot) {
    const ExampleB p{0.0, 1.0, 0.3, 0.25, 0.75};
    const LindbladModel m = build(p);
    const auto t = tilted_jump(m, default_spec(m));
    EXPECT_LT(std::abs(scgf_at(t, 0.0)), 1e-14);
    for (double chi : {-2.0, 0.4, 3.0}) EXPECT_LT(std::abs(scgf_at(t, chi) - oracle::example_b_scgf(p, chi)), 1e-11);
}

TEST(Fcs, RecursiveCumulantsMatchFiniteDifferences) {
    const LindbladModel m = build(ExampleA{0.2, 1.0, 1.0, 0.3});
    const auto tilted = tilted_jump(m, default_spec(m));
    const auto c = cumulants_recursive(tilted, 3);
    const auto phi = scgf_real_tilt(tilted);
    const double h = 1e-3;
    const double d1 = (phi(h) - phi(-h)) / (2 * h);
    const double d2 = (phi(h) - 2 * phi(0.0) + phi(-h)) / (h * h);
    const double d3 = (phi(2 * h) - 2 * phi(h) + 2 * phi(-h) - phi(-2 * h)) / (2 * h * h * h);
    EXPECT_NEAR(c[0], d1, 1e-6);
    EXPECT_NEAR(c[1], d2, 1e-5);
    EXPECT_NEAR(c[2], d3, 1e-4);
}

TEST(Fcs, CumulantsAgreeWithCurrentRoutes) {
    const OpenSystem sys(build(ExampleA{0.1, 1.4, 0.8, 0.5}));
    const auto spec = default_spec(sys.model);
    const auto c = cumulants_recursive(tilted_jump(sys.model, spec), 2);
    const auto n = noise(sys, spec);
    EXPECT_NEAR(c[0], n.J, 1e-12);
    EXPECT_NEAR(c[1], n.D, 1e-11);
}

TEST(Fcs, DiffusiveCumulantsAgreeWithNoise) {
    const OpenSystem sys(build(ExampleC{0.0, 1.0, 0.5}));
    const auto spec = default_spec(sys.model, CurrentKind::diffusive);
    const auto c = cumulants_recursive(tilted_diffusive(sys.model, spec), 2);
    EXPECT_NEAR(c[1], noise(sys, spec).D, 1e-10);
}

TEST(Fcs, LatticeDistributionNormalizedWithRightMoments) {
    const ExampleB p{0.0, 1.0, 1.0, 0.1, 0.9};
    const LindbladModel m = build(p);
    const auto tilted = tilted_jump(m, default_spec(m));
    const cmat rho = Liouvillian(m).steady_state();
    const double t = 30.0;
    const auto d = charge_distribution(tilted, rho, t);
    EXPECT_TRUE(d.lattice);
    EXPECT_NEAR(d.normalization(), 1.0, 1e-10);
    EXPECT_NEAR(d.mean(), oracle::example_b_current(p) * t, 1e-8);
    // Variance grows as D t plus a bounded transient.
    EXPECT_NEAR(d.variance() / t, oracle::example_b_noise(p), 0.05);
    EXPECT_GT(d.min_value, -1e-12);
}

TEST(Fcs, UnidirectionalPoissonDistribution) {
    const LindbladModel m = bidirectional_poisson_source(0.7, 0.0);
    const auto tilted = tilted_jump(m, default_spec(m));
    const auto d = charge_distribution(tilted, cmat(cmat::Identity(1, 1)), 4.0);
    for (int n = 0; n < 10; ++n) EXPECT_NEAR(d.at(n), oracle::poisson(n, 2.8), 1e-12);
}

TEST(Fcs, BidirectionalPoissonExact) {
    const LindbladModel m = bidirectional_poisson_source(1.2, 0.5);
    const auto tilted = tilted_jump(m, default_spec(m));
    const double t = 6.0;
    const auto d = charge_distribution(tilted, cmat(cmat::Identity(1, 1)), t);
    for (int n = -5; n <= 15; ++n) EXPECT_NEAR(d.at(n), oracle::bidirectional_poisson(n, t, 1.2, 0.5), 1e-12);
    const auto lt = long_time_distribution(tilted, {-2.0, 0.0, 4.0}, t);
    EXPECT_NEAR(lt[0], oracle::bidirectional_poisson(-2, t, 1.2, 0.5), 1e-12);
    EXPECT_NEAR(lt[2], oracle::bidirectional_poisson(4, t, 1.2, 0.5), 1e-12);
}

TEST(Fcs, FluctuationTheoremForBidirectionalSource) {
    const LindbladModel m = bidirectional_poisson_source(2.0, 0.5);
    const auto tilted = tilted_jump(m, default_spec(m));
    const auto check = fluctuation_theorem_check(tilted, std::log(2.0 / 0.5), linspace(-2.0, 2.0, 21));
    EXPECT_LT(check.max_asymmetry, 1e-12);
}

TEST(Fcs, ChargeQuantumDetection) {
    const LindbladModel m = build(ExampleA{});
    EXPECT_NEAR(*tilted_jump(m, CurrentSpec::jump({-0.5, 1.0})).charge_quantum(), 0.5, 1e-12);
    EXPECT_FALSE(tilted_jump(m, CurrentSpec::jump({1.0, std::sqrt(2.0)})).charge_quantum().has_value());
}

TEST(Fcs, RealGridDistributionForDiffusiveCurrent) {
    const LindbladModel m = build(ExampleC{0.0, 1.0, 1.0});
    const auto tilted = tilted_diffusive(m, default_spec(m, CurrentKind::diffusive));
    const cmat rho = Liouvillian(m).steady_state();
    const auto d = charge_distribution(tilted, rho, 5.0);
    EXPECT_FALSE(d.lattice);
    EXPECT_NEAR(d.normalization(), 1.0, 1e-6);
}

TEST(Fcs, ClassicalTiltMatchesQuantumPauli) {
    rmat rates(2, 2), weights(2, 2);
    rates << 0.0, 0.4, 1.1, 0.0;
    weights << 0.0, -1.0, 1.0, 0.0;
    const auto cl = tilted_classical(rates, weights);
    const LindbladModel m = build(ClassicalPauli{rates, weights});
    const auto qu = tilted_jump(m, default_spec(m));
    for (double chi : {0.3, 1.7}) EXPECT_LT(std::abs(scgf_at(cl, chi) - scgf_at(qu, chi)), 1e-12);
}

TEST(Fcs, SaddlePointApproachesExact) {
    const double gt = 40.0;
    for (int n : {10, 20, 30}) {
        EXPECT_LT(rel_err(oracle::symmetric_dot_saddle(n, gt), oracle::symmetric_dot_exact(n, gt)), 0.05) << n;
    }
}

TEST(Fcs, MultiFieldTiltReducesToSingle) {
    const LindbladModel m = build(ExampleB{0.0, 1.0, 0.5, 0.2, 0.8});
    const CurrentSpec a = CurrentSpec::jump({1.0, -1.0, 0.0, 0.0});
    const CurrentSpec b = CurrentSpec::jump({0.0, 0.0, 1.0, -1.0});
    const auto two = tilted_jump(m, std::vector<CurrentSpec>{a, b});
    const auto one = tilted_jump(m, a);
    EXPECT_LT((two.evaluate(std::vector<cplx>{0.7, 0.0}) - one.evaluate(cplx(0.7))).norm(), 1e-14);
}
