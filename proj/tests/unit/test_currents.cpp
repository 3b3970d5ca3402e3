#include <cmath>

#include <gtest/gtest.h>

#include "qcurrents/currents.hpp"
#include "qcurrents/models.hpp"
#include "../common/stats.hpp"

using namespace qc;
using qc::testing::linspace;
using qc::testing::rel_err;

namespace {

// S(omega) = K + 2 int_0^inf cos(omega tau) F(tau) d tau by composite Simpson.
double spectrum_from_two_point(const OpenSystem& sys, const CurrentSpec& spec, double omega, double tmax,
                               std::size_t n) {
    const auto tau = linspace(0.0, tmax, n);
    const auto f = two_point_function(sys, spec, tau);
    const double h = tau[1] - tau[0];
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i + 1 == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * std::cos(omega * tau[i]) * f.regular[i];
    }
    return f.delta_weight + 2.0 * acc * h / 3.0;
}

}  // namespace

TEST(Currents, ExampleACurrentMatchesClosedForm) {
    for (double nbar : {0.0, 0.2, 1.5}) {
        const ExampleA p{0.3, 0.8, 1.1, nbar};
        const OpenSystem sys(build(p));
        EXPECT_NEAR(average_current(sys, default_spec(sys.model)), oracle::example_a_current(p), 1e-12);
    }
}

TEST(Currents, ExampleBCurrentAndNoise) {
    const ExampleB p{0.0, 1.0, 0.4, 0.2, 0.7};
    const OpenSystem sys(build(p));
    const auto n = noise(sys, default_spec(sys.model));
    EXPECT_NEAR(n.J, oracle::example_b_current(p), 1e-12);
    EXPECT_NEAR(n.D, oracle::example_b_noise(p), 1e-12);
    ASSERT_TRUE(n.fano.has_value());
    EXPECT_NEAR(*n.fano, n.D / std::abs(n.J), 1e-12);
}

TEST(Currents, ZeroFrequencySpectrumEqualsNoise) {
    const OpenSystem sys(build(ExampleA{0.4, 1.2, 1.0, 0.3}));
    const auto spec = default_spec(sys.model);
    const double d = noise(sys, spec).D;
    EXPECT_NEAR(power_spectrum(sys, spec, {0.0})[0], d, 1e-12);
}

TEST(Currents, SpectrumIsFourierTransformOfTwoPoint) {
    const OpenSystem sys(build(ExampleA{0.2, 1.0, 1.0, 0.1}));
    const auto spec = default_spec(sys.model);
    for (double w : {0.0, 0.5, 1.3}) {
        const double direct = power_spectrum(sys, spec, {w})[0];
        EXPECT_NEAR(spectrum_from_two_point(sys, spec, w, 40.0, 8001), direct, 1e-7) << "omega=" << w;
    }
}

TEST(Currents, ExampleCDiffusiveClosedForms) {
    const ExampleC p{0.0, 1.0, 0.6};
    const OpenSystem sys(build(p));
    const auto spec = default_spec(sys.model, CurrentKind::diffusive);
    const auto f = two_point_function(sys, spec, {0.0, 0.5, 3.0});
    EXPECT_NEAR(f.delta_weight, 1.0, 1e-14);
    for (std::size_t i = 0; i < f.tau.size(); ++i)
        EXPECT_NEAR(f.regular[i], oracle::example_c_two_point(p, f.tau[i]), 1e-12);
    EXPECT_NEAR(noise(sys, spec).D, oracle::example_c_noise(p), 1e-12);
    for (double w : {0.0, 1.0, 2.0, 4.0})
        EXPECT_LT(rel_err(power_spectrum(sys, spec, {w})[0], oracle::example_c_spectrum(p, w)), 1e-10);
}

TEST(Currents, QpcClosedForms) {
    QpcParams p;
    p.leads = ExampleB{0.0, 0.3, 0.5, 0.8, 0.1};
    p.T = 1.0;
    p.chi = -0.4;
    const OpenSystem sys(build(p));
    const auto spec = CurrentSpec::channel(sys.model.channel_count(), sys.model.channel_index("qpc"));
    const auto n = noise(sys, spec);
    EXPECT_NEAR(n.J, oracle::qpc_current(p), 1e-12);
    EXPECT_NEAR(n.D, oracle::qpc_noise(p), 1e-12);
    const auto f = two_point_function(sys, spec, {0.3, 2.0});
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(f.regular[i], oracle::qpc_two_point(p, f.tau[i]), 1e-12);
}

TEST(Currents, NoiseTransientApproachesStationaryNoise) {
    const OpenSystem sys(build(ExampleA{0.0, 1.0, 1.0, 0.0}));
    const auto spec = default_spec(sys.model);
    const auto d = noise_transient(sys, spec, sys.liou.steady_state(), {0.0, 80.0});
    EXPECT_NEAR(d[0], dynamical_activity(sys, spec), 1e-9);
    EXPECT_NEAR(d[1], noise(sys, spec).D, 1e-7);
}

TEST(Currents, CrossStatisticsConsistent) {
    const OpenSystem sys(build(ExampleB{0.0, 1.0, 0.5, 0.3, 0.6}));
    const auto& m = sys.model;
    CurrentSpec left = CurrentSpec::jump({1.0, -1.0, 0.0, 0.0});
    CurrentSpec right = CurrentSpec::jump({0.0, 0.0, 1.0, -1.0});
    const auto cs = cross_statistics(sys, {left, right}, {0.0, 0.7});
    EXPECT_NEAR(cs.J[0], average_current(sys, left), 1e-12);
    EXPECT_NEAR(cs.J[0] + cs.J[1], 0.0, 1e-12);
    EXPECT_NEAR(cs.D(0, 0), noise(sys, left).D, 1e-12);
    EXPECT_NEAR(cs.D(0, 1), cs.D(1, 0), 1e-12);
    EXPECT_NEAR(cs.S[0](0, 0).real(), cs.D(0, 0), 1e-12);
    // Charge conservation in the long-time limit: total current has no noise at zero frequency.
    CurrentSpec total = CurrentSpec::jump({1.0, -1.0, 1.0, -1.0});
    EXPECT_NEAR(noise(sys, total).D, 0.0, 1e-12);
    EXPECT_NEAR(cs.D(0, 0) + 2.0 * cs.D(0, 1) + cs.D(1, 1), 0.0, 1e-12);
    for (double c : cs.coherence[1].reshaped()) EXPECT_LE(c, 1.0 + 1e-12);
    (void)m;
}

TEST(Currents, ComposeDiffusionMatrix) {
    rmat elem(2, 2);
    elem << 2.0, 0.3, 0.3, 1.0;
    rmat w(1, 2);
    w << 1.0, -1.0;
    EXPECT_NEAR(compose_diffusion_matrix(elem, w)(0, 0), 2.0 - 0.6 + 1.0, 1e-14);
}

TEST(Currents, G2OfSingleEmitterIsAntibunched) {
    const OpenSystem sys(build(ExampleA{0.0, 1.0, 1.0, 0.0}));
    const auto g = g2(sys, {0.0, 50.0}, sys.model.channel_index("emit"));
    EXPECT_NEAR(g[0], 0.0, 1e-12);
    EXPECT_NEAR(g[1], 1.0, 1e-8);
}

TEST(Currents, MultiTimeCorrelationSinglePointIsCurrent) {
    const OpenSystem sys(build(ExampleA{0.1, 0.9, 1.0, 0.2}));
    const auto spec = default_spec(sys.model);
    const cplx c = multi_time_correlation(sys, {spec}, {1.0}, sys.liou.steady_state());
    EXPECT_NEAR(c.real(), average_current(sys, spec), 1e-12);
}

TEST(Currents, EmissionSpectrumWeights) {
    const OpenSystem sys(build(ExampleA{0.0, 1.0, 1.0, 0.0}));
    const std::size_t k = sys.model.channel_index("emit");
    const auto e = emission_spectrum(sys, k, linspace(-20.0, 20.0, 4001));
    const cmat rho = sys.liou.steady_state();
    const cmat l = sys.model.channels()[k].op;
    EXPECT_NEAR(e.total_flux, (l.adjoint() * l * rho).trace().real(), 1e-12);
    // Integral of the spectrum plus the elastic weight equals the flux.
    double integral = 0.0;
    for (std::size_t i = 1; i < e.omega.size(); ++i)
        integral += 0.5 * (e.regular[i] + e.regular[i - 1]) * (e.omega[i] - e.omega[i - 1]);
    EXPECT_NEAR(integral + e.elastic_weight, e.total_flux, 1e-4);
}

TEST(Currents, WeakDissipationLinesFromBohrFrequencies) {
    // H = Omega sigma_x has Bohr frequencies +-2 Omega.
    ExampleA p{0.0, 2.0, 0.05, 0.0};
    const auto lines = weak_dissipation_lines(build(p));
    bool found = false;
    for (const auto& l : lines)
        if (std::abs(std::abs(l.omega) - 4.0) < 1e-9) {
            found = true;
            EXPECT_GT(l.width, 0.0);
        }
    EXPECT_TRUE(found);
}

TEST(Currents, SpecValidation) {
    const LindbladModel m = build(ExampleA{});
    EXPECT_THROW(validate_spec(m, CurrentSpec::jump({1.0})), Error);
}
