#include <cmath>

#include <gtest/gtest.h>

#include "qcurrents/models.hpp"
#include "qcurrents/trajectories.hpp"
#include "../common/stats.hpp"

using namespace qc;
using qc::testing::ks_pvalue;
using qc::testing::mean;

TEST(Trajectories, StreamSeedsAreDistinctAndStable) {
    EXPECT_EQ(stream_seed(7, 3), stream_seed(7, 3));
    EXPECT_NE(stream_seed(7, 3), stream_seed(7, 4));
    EXPECT_NE(stream_seed(7, 3), stream_seed(8, 3));
}

TEST(Trajectories, SameSeedSameTrajectory) {
    const LindbladModel m = build(ExampleA{0.0, 1.0, 1.0, 0.2});
    const cmat rho = Liouvillian(m).steady_state();
    const auto a = mcwf_simulate(m, rho, 50.0, 11);
    const auto b = mcwf_simulate(m, rho, 50.0, 11);
    ASSERT_EQ(a.events.size(), b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        EXPECT_EQ(a.events[i].time, b.events[i].time);
        EXPECT_EQ(a.events[i].channel, b.events[i].channel);
    }
}

TEST(Trajectories, PoissonSourceWaitingTimesAreExponential) {
    const double rate = 1.5;
    const LindbladModel m = bidirectional_poisson_source(rate, 0.0);
    const auto rec = mcwf_simulate(m, cvec(cvec::Ones(1)), 2000.0, 5);
    std::vector<double> waits;
    double prev = 0.0;
    for (const auto& e : rec.events) {
        waits.push_back(e.time - prev);
        prev = e.time;
    }
    ASSERT_GT(waits.size(), 2000u);
    EXPECT_GT(ks_pvalue(waits, [&](double x) { return 1.0 - std::exp(-rate * x); }), 1e-3);
}

TEST(Trajectories, EnsembleMeanCurrentMatchesLiouvillian) {
    const ExampleA p{0.0, 1.0, 1.0, 0.0};
    const LindbladModel m = build(p);
    const cmat rho = Liouvillian(m).steady_state();
    const auto ens = mcwf_ensemble(m, rho, 100.0, 200, 42);
    std::vector<double> j;
    for (const auto& r : ens) j.push_back(jump_counting(r, default_spec(m)).mean_current);
    const double se = std::sqrt(qc::testing::variance(j) / j.size());
    EXPECT_NEAR(mean(j), oracle::example_a_current(p), 5.0 * se);
}

TEST(Trajectories, ConditionalExpectationsAverageToUnconditional) {
    const LindbladModel m = build(ExampleA{0.0, 1.0, 1.0, 0.0});
    const Liouvillian l(m);
    cmat rho0 = cmat::Zero(2, 2);
    rho0(1, 1) = 1.0;
    McwfOptions opts;
    opts.sample_times = {1.0, 3.0};
    opts.observables = {sigma_z()};
    const auto ens = mcwf_ensemble(m, rho0, 3.0, 2000, 9, opts);
    for (std::size_t k = 0; k < 2; ++k) {
        std::vector<double> z;
        for (const auto& r : ens) z.push_back(r.samples[0][k]);
        const double want = (sigma_z() * l.propagate(rho0, opts.sample_times[k])).trace().real();
        const double se = std::sqrt(qc::testing::variance(z) / z.size());
        EXPECT_NEAR(mean(z), want, 5.0 * se + 1e-3);
    }
}

TEST(Trajectories, DarkStateFlagged) {
    // Decay without drive: after one emission no further jumps.
    const LindbladModel m = build(ExampleA{0.0, 0.0, 1.0, 0.0});
    cvec psi = cvec::Zero(2);
    psi(0) = 1.0;
    const auto rec = mcwf_simulate(m, psi, 100.0, 3);
    EXPECT_EQ(rec.events.size(), 1u);
    EXPECT_TRUE(rec.dark);
}

TEST(Trajectories, DiffusiveReproducibleAndTracePreserving) {
    const LindbladModel m = build(ExampleC{0.0, 1.0, 0.5});
    const auto spec = default_spec(m, CurrentKind::diffusive);
    const cmat rho = Liouvillian(m).steady_state();
    const auto a = diffusive_simulate(m, spec, rho, 1e-3, 5.0, 77);
    const auto b = diffusive_simulate(m, spec, rho, 1e-3, 5.0, 77);
    EXPECT_EQ(a.current, b.current);
    EXPECT_NEAR(a.final_state.trace().real(), 1.0, 1e-6);
    EXPECT_EQ(a.current.size(), 5000u);
}

TEST(Trajectories, ButterworthResponse) {
    FilterSpec low{FilterKind::low, 3, 2.0};
    EXPECT_NEAR(std::abs(butterworth_response(low, 0.0)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(butterworth_response(low, 2.0)), 1.0 / std::sqrt(2.0), 1e-12);
    for (double w : {0.5, 4.0, 10.0})
        EXPECT_NEAR(std::norm(butterworth_response(low, w)), 1.0 / (1.0 + std::pow(w / 2.0, 6)), 1e-12);
    FilterSpec high{FilterKind::high, 2, 1.0};
    EXPECT_NEAR(std::abs(butterworth_response(high, 0.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(butterworth_response(high, 1.0)), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Trajectories, RabiBandCentredOnTwiceOmega) {
    const FilterSpec f = FilterSpec::rabi_band(2.0);
    EXPECT_EQ(f.kind, FilterKind::band);
    const double peak = std::abs(butterworth_response(f, std::sqrt(f.band_low * f.band_high)));
    EXPECT_NEAR(peak, 1.0, 1e-12);
    EXPECT_LT(std::abs(butterworth_response(f, 0.5)), 0.2);
    EXPECT_LT(std::abs(butterworth_response(f, 20.0)), 0.2);
}

TEST(Trajectories, ButterworthFilterPassesDcAndRejectsHighFrequency) {
    const double dt = 1e-3;
    std::vector<double> dc(20000, 1.0), fast(20000);
    for (std::size_t i = 0; i < fast.size(); ++i) fast[i] = std::sin(200.0 * i * dt);
    const FilterSpec f{FilterKind::low, 2, 1.0};
    EXPECT_NEAR(butterworth(dc, dt, f).back(), 1.0, 1e-3);
    double peak = 0.0;
    const auto out = butterworth(fast, dt, f);
    for (std::size_t i = 10000; i < out.size(); ++i) peak = std::max(peak, std::abs(out[i]));
    EXPECT_LT(peak, 1e-3);
}

TEST(Trajectories, EmpiricalSpectrumOfWhiteNoise) {
    auto rng = make_rng(123);
    std::normal_distribution<double> g;
    const double dt = 0.01;
    std::vector<std::vector<double>> records(4, std::vector<double>(40000));
    for (auto& r : records)
        for (auto& x : r) x = 2.0 * g(rng) / std::sqrt(dt);  // S = 4
    const auto s = empirical_spectrum(records, dt, 20);
    ASSERT_FALSE(s.S.empty());
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 1; i < s.S.size(); ++i, ++count) acc += s.S[i];
    EXPECT_NEAR(acc / count, 4.0, 0.1);
}
