#include <cmath>
#include <functional>

#include "cli.hpp"

namespace qc::cli {

namespace {

struct Golden {
    std::string name;
    std::function<double()> computed;
    std::function<double()> expected;
    double tol;  // relative, absolute when the reference vanishes
};

std::vector<Golden> goldens() {
    std::vector<Golden> g;
    const ExampleA a{0.0, 1.0, 1.0, 0.2};
    g.push_back({"exampleA current", [a] {
                     const OpenSystem s(build(a));
                     return average_current(s, default_spec(s.model));
                 },
                 [a] { return oracle::example_a_current(a); }, 1e-10});
    g.push_back({"exampleA Drazin inverse (max entry error)", [] {
                     const OpenSystem s(build(ExampleA{0.0, 1.0, 1.0, 0.0}));
                     return (s.liou.drazin() - oracle::example_a_drazin(1.0, 1.0)).cwiseAbs().maxCoeff();
                 },
                 [] { return 0.0; }, 1e-10});
    g.push_back({"exampleA emission noise", [] {
                     const OpenSystem s(build(ExampleA{0.0, 0.7, 1.0, 0.0}));
                     return noise(s, CurrentSpec::channel(2, 0)).D;
                 },
                 [] { return oracle::example_a_emission_noise(1.0, 0.7); }, 1e-10});
    g.push_back({"exampleA Hasegawa f", [] { return hasegawa_f(OpenSystem(build(ExampleA{0.0, 0.7, 1.0, 0.0}))); },
                 [] { return oracle::example_a_hasegawa_f(1.0, 0.7); }, 1e-10});
    g.push_back({"exampleA QFI, theta = Omega", [] {
                     const LindbladModel m = build(ExampleA{0.0, 0.7, 1.0, 0.0});
                     return qfi_rate(ParametrizedModel{m, "omega", sigma_x(), {cmat::Zero(2, 2), cmat::Zero(2, 2)}});
                 },
                 [] { return oracle::example_a_qfi_omega(1.0); }, 1e-10});
    g.push_back({"exampleA QFI, theta = gamma", [] {
                     const LindbladModel m = build(ExampleA{0.0, 0.7, 1.0, 0.0});
                     return qfi_rate(ParametrizedModel{m, "gamma", cmat::Zero(2, 2), {0.5 * sigma_minus(), cmat::Zero(2, 2)}});
                 },
                 [] { return oracle::example_a_qfi_gamma(1.0, 0.7); }, 1e-10});

    ExampleB b;
    b.gamma_L = 1.0;
    b.gamma_R = 0.4;
    b.f_L = 0.2;
    b.f_R = 0.9;
    g.push_back({"exampleB current", [b] {
                     const OpenSystem s(build(b));
                     return average_current(s, default_spec(s.model));
                 },
                 [b] { return oracle::example_b_current(b); }, 1e-10});
    g.push_back({"exampleB noise", [b] {
                     const OpenSystem s(build(b));
                     return noise(s, default_spec(s.model)).D;
                 },
                 [b] { return oracle::example_b_noise(b); }, 1e-10});
    g.push_back({"exampleB Re C(chi = 1)", [b] {
                     const LindbladModel m = build(b);
                     return scgf_at(tilted_jump(m, default_spec(m)), 1.0).real();
                 },
                 [b] { return oracle::example_b_scgf(b, 1.0).real(); }, 1e-10});
    g.push_back({"exampleB Im C(chi = 1)", [b] {
                     const LindbladModel m = build(b);
                     return scgf_at(tilted_jump(m, default_spec(m)), 1.0).imag();
                 },
                 [b] { return oracle::example_b_scgf(b, 1.0).imag(); }, 1e-10});
    g.push_back({"symmetric dot saddle point, n = 2, gamma t = 20", [] {
                     ExampleB s;
                     s.f_L = 0.0;
                     s.f_R = 1.0;
                     const LindbladModel m = build(s);
                     return saddle_point(scgf_real_tilt(tilted_jump(m, default_spec(m))), 2.0, 20.0).probability;
                 },
                 [] { return oracle::symmetric_dot_saddle(2, 20.0); }, 1e-6});

    const ExampleC c{0.0, 1.0, 0.2};
    g.push_back({"exampleC S(omega = 2)", [c] {
                     const OpenSystem s(build(c));
                     return power_spectrum(s, default_spec(s.model, CurrentKind::diffusive), {2.0})[0];
                 },
                 [] { return 5.0; }, 1e-10});
    g.push_back({"exampleC noise", [c] {
                     const OpenSystem s(build(c));
                     return noise(s, default_spec(s.model, CurrentKind::diffusive)).D;
                 },
                 [c] { return oracle::example_c_noise(c); }, 1e-10});
    g.push_back({"exampleC F(tau = 0.7)", [c] {
                     const OpenSystem s(build(c));
                     return two_point_function(s, default_spec(s.model, CurrentKind::diffusive), {0.7}).regular[0];
                 },
                 [c] { return oracle::example_c_two_point(c, 0.7); }, 1e-10});

    ExampleD d;
    d.G = cplx(0.2, 0.1);
    d.delta = 0.3;
    d.kappa = 1.0;
    g.push_back({"exampleD <a^dag a> (Gaussian)", [d] { return mode_moments(Statistics::boson, steady_covariance(build_gaussian(d))).C(0, 0).real(); },
                 [d] { return oracle::example_d_occupation(d); }, 1e-10});
    g.push_back({"exampleD |<a a>| (Gaussian)", [d] { return std::abs(mode_moments(Statistics::boson, steady_covariance(build_gaussian(d))).Cp(0, 0)); },
                 [d] { return std::abs(oracle::example_d_anomalous(d)); }, 1e-10});
    ExampleD po;
    po.G = cplx(0.0, 0.25);
    po.kappa = 1.0;
    g.push_back({"parametric oscillator D_q at G = kappa/4", [po] { return gaussian_diffusion_stats(build_gaussian(po), {}).D; },
                 [] { return 9.0; }, 1e-10});
    g.push_back({"parametric oscillator jump noise", [po] { return gaussian_jump_stats(build_gaussian(po), {}).D; },
                 [] { return oracle::parametric_jump_noise(0.25, 1.0); }, 1e-10});
    g.push_back({"parametric oscillator g2(0.5)", [po] { return gaussian_g2(build_gaussian(po), {0.5})[0]; },
                 [] { return oracle::parametric_g2(0.25, 1.0, 0.5); }, 1e-10});

    QpcParams q;
    q.leads = b;
    q.T = 0.8;
    q.chi = -0.3;
    const CurrentSpec qs = CurrentSpec::channel(5, 4);
    g.push_back({"QPC current", [q, qs] { return average_current(OpenSystem(build(q)), qs); },
                 [q] { return oracle::qpc_current(q); }, 1e-10});
    g.push_back({"QPC noise", [q, qs] { return noise(OpenSystem(build(q)), qs).D; }, [q] { return oracle::qpc_noise(q); }, 1e-10});
    g.push_back({"QPC F(tau = 0.5)", [q, qs] { return two_point_function(OpenSystem(build(q)), qs, {0.5}).regular[0]; },
                 [q] { return oracle::qpc_two_point(q, 0.5); }, 1e-10});
    return g;
}

}  // namespace

std::pair<Table, bool> oracle_check() {
    Table t;
    t.columns = {"check", "computed", "expected", "error", "tolerance", "status"};
    bool all = true;
    for (const auto& g : goldens()) {
        double got = std::nan(""), want = std::nan("");
        std::string status;
        try {
            got = g.computed();
            want = g.expected();
        } catch (const std::exception& e) {
            status = std::string("ERROR ") + e.what();
        }
        const double err = want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
        const bool ok = status.empty() && err <= g.tol;
        if (status.empty()) status = ok ? "PASS" : "FAIL";
        all = all && ok;
        t.rows.push_back({g.name, got, want, err, g.tol, status});
    }
    t.meta["passed"] = all;
    return {t, all};
}

}  // namespace qc::cli
