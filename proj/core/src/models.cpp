#include "qcurrents/models.hpp"

#include <cmath>
#include <string>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/hypergeometric_pFq.hpp>
#include <boost/math/special_functions/laguerre.hpp>

namespace qc {

namespace {

constexpr double pi = 3.14159265358979323846;

cmat qubit(cplx a, cplx b, cplx c, cplx d) {
    cmat m(2, 2);
    m << a, b, c, d;
    return m;
}

JumpChannel channel(std::string label, cmat op, double weight, bool monitored = true) {
    JumpChannel c;
    c.label = std::move(label);
    c.op = std::move(op);
    c.weight = weight;
    c.monitored = monitored;
    return c;
}

}  // namespace

double fermi(double beta, double energy, double mu) {
    const double x = beta * (energy - mu);
    if (x > 0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (std::exp(x) + 1.0);
}

double bose_einstein(double beta, double energy) {
    if (beta * energy <= 0) throw Error("Bose-Einstein occupation requires beta * energy > 0");
    return 1.0 / std::expm1(beta * energy);
}

cmat sigma_minus() { return qubit(0, 0, 1, 0); }
cmat sigma_plus() { return qubit(0, 1, 0, 0); }
cmat sigma_x() { return qubit(0, 1, 1, 0); }
cmat sigma_y() { return qubit(0, -I, I, 0); }
cmat sigma_z() { return qubit(1, 0, 0, -1); }

cmat annihilation(Eigen::Index cutoff) {
    if (cutoff < 1) throw DimensionError("annihilation: cutoff must be positive");
    cmat a = cmat::Zero(cutoff, cutoff);
    for (Eigen::Index n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

ExampleB ExampleB::thermal(double omega, double gamma_L, double gamma_R, double beta_L, double beta_R,
                           double mu_L, double mu_R) {
    ExampleB p;
    p.omega = omega;
    p.gamma_L = gamma_L;
    p.gamma_R = gamma_R;
    p.f_L = fermi(beta_L, omega, mu_L);
    p.f_R = fermi(beta_R, omega, mu_R);
    return p;
}

LindbladModel build(const ExampleA& p) {
    if (p.gamma < 0 || p.nbar < 0) throw Error("example A: gamma and nbar must be non-negative");
    const cmat h = 0.5 * p.delta * sigma_z() + p.omega * sigma_x();
    std::vector<JumpChannel> ch;
    ch.push_back(channel("emit", std::sqrt(p.gamma * (p.nbar + 1.0)) * sigma_minus(), -1.0));
    ch.push_back(channel("absorb", std::sqrt(p.gamma * p.nbar) * sigma_plus(), 1.0));
    return LindbladModel(h, std::move(ch));
}

LindbladModel build(const ExampleB& p) {
    const auto check = [](double f) {
        if (f < 0 || f > 1) throw Error("example B: occupations must lie in [0, 1]");
    };
    check(p.f_L);
    check(p.f_R);
    if (p.gamma_L < 0 || p.gamma_R < 0) throw Error("example B: rates must be non-negative");
    const cmat c = sigma_minus();
    const cmat h = p.omega * (sigma_plus() * c);
    std::vector<JumpChannel> ch;
    ch.push_back(channel("L_out", std::sqrt(p.gamma_L * (1.0 - p.f_L)) * c, 1.0));
    ch.push_back(channel("L_in", std::sqrt(p.gamma_L * p.f_L) * c.adjoint(), -1.0));
    ch.push_back(channel("R_out", std::sqrt(p.gamma_R * (1.0 - p.f_R)) * c, 0.0));
    ch.push_back(channel("R_in", std::sqrt(p.gamma_R * p.f_R) * c.adjoint(), 0.0));
    return LindbladModel(h, std::move(ch));
}

LindbladModel build(const ExampleC& p) {
    if (p.Gamma < 0) throw Error("example C: Gamma must be non-negative");
    const cmat h = 0.5 * p.delta * sigma_z() + p.omega * sigma_x();
    std::vector<JumpChannel> ch;
    ch.push_back(channel("dephase", std::sqrt(p.Gamma) * sigma_z(), 1.0));
    return LindbladModel(h, std::move(ch));
}

LindbladModel build(const ExampleD& p) {
    if (p.fock_cutoff < 4) throw DimensionError("example D: Fock cutoff must be at least 4");
    if (p.kappa < 0) throw Error("example D: kappa must be non-negative");
    const cmat a = annihilation(p.fock_cutoff);
    const cmat ad = a.adjoint();
    const cmat h = p.delta * ad * a + 0.5 * (p.G * ad * ad + std::conj(p.G) * a * a) +
                   0.5 * p.U * ad * ad * a * a;
    std::vector<JumpChannel> ch;
    ch.push_back(channel("loss", std::sqrt(p.kappa) * a, 1.0));
    return LindbladModel(h, std::move(ch), true);
}

LindbladModel build(const QpcParams& p) {
    const LindbladModel dot = build(p.leads);
    std::vector<JumpChannel> ch = dot.channels();
    for (auto& c : ch) {
        c.monitored = p.monitor_leads;
        c.weight = 0.0;
    }
    const cmat n = sigma_plus() * sigma_minus();
    ch.push_back(channel("qpc", p.T * cmat::Identity(2, 2) + p.chi * n, 1.0));
    return LindbladModel(dot.hamiltonian(), std::move(ch));
}

LindbladModel build(const ClassicalPauli& p) {
    const Eigen::Index d = p.rates.rows();
    if (d == 0 || p.rates.cols() != d) throw DimensionError("classical model: rates must be square");
    const bool weighted = p.weights.size() != 0;
    if (weighted && (p.weights.rows() != d || p.weights.cols() != d))
        throw DimensionError("classical model: weights must match rates");
    std::vector<JumpChannel> ch;
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index n = 0; n < d; ++n) {
            if (n == j || p.rates(n, j) == 0.0) continue;
            if (p.rates(n, j) < 0) throw Error("classical model: rates must be non-negative");
            cmat op = cmat::Zero(d, d);
            op(n, j) = std::sqrt(p.rates(n, j));
            ch.push_back(channel("W_" + std::to_string(n) + "_" + std::to_string(j), op,
                                 weighted ? p.weights(n, j) : 0.0));
        }
    }
    return LindbladModel(cmat::Zero(d, d), std::move(ch));
}

GaussianModel build_gaussian(const ExampleD& p) {
    if (p.U != 0.0) throw Error("example D is Gaussian only for U = 0");
    GaussianModel g;
    g.statistics = Statistics::boson;
    g.A = cmat::Constant(1, 1, p.delta);
    g.B = cmat::Constant(1, 1, p.G);
    g.eps = cvec::Zero(1);
    g.channels.push_back(GaussianChannel{0, false, p.kappa, 1.0, 0.0});
    return g;
}

GaussianModel build_gaussian(const ExampleB& p) {
    GaussianModel g;
    g.statistics = Statistics::fermion;
    g.A = cmat::Constant(1, 1, p.omega);
    g.B = cmat::Zero(1, 1);
    g.eps = cvec::Zero(1);
    g.channels.push_back(GaussianChannel{0, false, p.gamma_L * (1.0 - p.f_L), 1.0, 0.0});
    g.channels.push_back(GaussianChannel{0, true, p.gamma_L * p.f_L, -1.0, 0.0});
    g.channels.push_back(GaussianChannel{0, false, p.gamma_R * (1.0 - p.f_R), 0.0, 0.0});
    g.channels.push_back(GaussianChannel{0, true, p.gamma_R * p.f_R, 0.0, 0.0});
    return g;
}

CurrentSpec default_spec(const LindbladModel& model, CurrentKind kind) {
    std::vector<double> w;
    std::vector<double> ph;
    for (const auto& c : model.channels()) {
        w.push_back(c.weight);
        ph.push_back(c.phase);
    }
    return kind == CurrentKind::jump ? CurrentSpec::jump(w) : CurrentSpec::diffusive(w, ph);
}

LindbladModel bidirectional_poisson_source(double forward_rate, double backward_rate) {
    if (forward_rate < 0 || backward_rate < 0) throw Error("Poisson source: rates must be non-negative");
    std::vector<JumpChannel> ch;
    ch.push_back(channel("forward", cmat::Constant(1, 1, std::sqrt(forward_rate)), 1.0));
    ch.push_back(channel("backward", cmat::Constant(1, 1, std::sqrt(backward_rate)), -1.0));
    return LindbladModel(cmat::Zero(1, 1), std::move(ch));
}

cvec coherent_state(cplx alpha, Eigen::Index cutoff) {
    cvec v(cutoff);
    cplx term = 1.0;
    for (Eigen::Index n = 0; n < cutoff; ++n) {
        v(n) = term;
        term *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    return v / v.norm();
}

cvec fock_state(Eigen::Index n, Eigen::Index cutoff) {
    if (n < 0 || n >= cutoff) throw DimensionError("fock_state: level outside the cutoff");
    cvec v = cvec::Zero(cutoff);
    v(n) = 1.0;
    return v;
}

std::vector<std::vector<double>> wigner_grid(const cmat& rho, const std::vector<double>& q,
                                             const std::vector<double>& p) {
    const Eigen::Index d = rho.rows();
    if (rho.cols() != d) throw DimensionError("wigner_grid: rho must be square");
    // sqrt(n!/m!) for n <= m, kept in log form.
    std::vector<double> lf(static_cast<std::size_t>(d) + 1, 0.0);
    for (Eigen::Index k = 1; k <= d; ++k) lf[k] = lf[k - 1] + std::log(static_cast<double>(k));
    std::vector<std::vector<double>> out(q.size(), std::vector<double>(p.size(), 0.0));
    for (std::size_t iq = 0; iq < q.size(); ++iq) {
        for (std::size_t ip = 0; ip < p.size(); ++ip) {
            const cplx alpha = cplx(q[iq], p[ip]) / std::sqrt(2.0);
            const double r2 = std::norm(alpha);
            const cplx two_ac = 2.0 * std::conj(alpha);
            cplx total = 0.0;
            for (Eigen::Index n = 0; n < d; ++n) {
                cplx power = 1.0;
                for (Eigen::Index m = n; m < d; ++m) {
                    const auto k = static_cast<unsigned>(m - n);
                    const double lag = boost::math::laguerre(static_cast<unsigned>(n), k, 4.0 * r2);
                    const double scale = std::exp(0.5 * (lf[n] - lf[m]));
                    const cplx w = (n % 2 == 0 ? 1.0 : -1.0) * scale * power * lag;
                    // |m><n| has symbol w, |n><m| has conj(w).
                    total += rho(m, n) * w;
                    if (m != n) total += rho(n, m) * std::conj(w);
                    power *= two_ac;
                }
            }
            out[iq][ip] = (total.real() * std::exp(-2.0 * r2)) / pi;
        }
    }
    return out;
}

namespace oracle {

double example_a_current(const ExampleA& p) {
    const double g = p.gamma, o = p.omega, d = p.delta, n = p.nbar;
    const double a = g * (n + 0.5);
    return -g * o * o / (d * d + 2.0 * o * o + a * a);
}

cmat example_a_drazin(double g, double o) {
    const double s = g * g + 8.0 * o * o;
    const double s2 = s * s;
    const cplx a = -g * (g * g - 4.0 * o * o) / s2;
    const cplx b = 2.0 * I * o / s;
    const cplx c = 12.0 * g * o * o / s2;
    const cplx e = 8.0 * I * o * (g * g + 2.0 * o * o) / s2;
    const cplx f = -g / s - 1.0 / g;
    const cplx h = -8.0 * o * o / (g * s);
    const cplx k = 4.0 * I * o * (g * g - 4.0 * o * o) / s2;
    cmat m(4, 4);
    m << a, b, -b, c,
         e, f, h, k,
         -e, h, f, -k,
         -a, -b, b, -c;
    return m;
}

double example_a_emission_current(double g, double o) { return 4.0 * g * o * o / (g * g + 8.0 * o * o); }

double example_a_emission_noise(double g, double o) {
    const double s = g * g + 8.0 * o * o;
    const double o2 = o * o;
    return 4.0 * g * o2 * (g * g * g * g - 8.0 * g * g * o2 + 64.0 * o2 * o2) / (s * s * s);
}

double example_a_hasegawa_f(double g, double o) {
    return 4.0 * o * o * (g * g + 32.0 * o * o) / (g * g * g + 8.0 * g * o * o);
}

double example_a_qfi_omega(double g) { return 16.0 / g; }

double example_a_qfi_gamma(double g, double o) { return 4.0 * o * o / (g * g * g + 8.0 * g * o * o); }

double example_b_occupation(const ExampleB& p) {
    return (p.gamma_L * p.f_L + p.gamma_R * p.f_R) / (p.gamma_L + p.gamma_R);
}

double example_b_current(const ExampleB& p) {
    return p.gamma_L * p.gamma_R * (p.f_R - p.f_L) / (p.gamma_L + p.gamma_R);
}

double example_b_noise(const ExampleB& p) {
    const double gl = p.gamma_L, gr = p.gamma_R, s = gl + gr;
    const double df = p.f_R - p.f_L;
    return gl * gr / (s * s * s) *
           (s * s * (p.f_L * (1 - p.f_L) + p.f_R * (1 - p.f_R)) + (gl * gl + gr * gr) * df * df);
}

cplx example_b_scgf(const ExampleB& p, cplx chi) {
    const double half = 0.5 * (p.gamma_L + p.gamma_R);
    const cplx tilt = (std::exp(I * chi) - 1.0) * p.f_R * (1 - p.f_L) +
                      (std::exp(-I * chi) - 1.0) * p.f_L * (1 - p.f_R);
    return -half + std::sqrt(half * half + p.gamma_L * p.gamma_R * tilt);
}

cplx example_b_scgf_bottleneck(const ExampleB& p, cplx chi) {
    const double g = std::min(p.gamma_L, p.gamma_R);
    return g * ((std::exp(I * chi) - 1.0) * p.f_R * (1 - p.f_L) +
                (std::exp(-I * chi) - 1.0) * p.f_L * (1 - p.f_R));
}

double poisson(int n, double mean) {
    if (n < 0) return 0.0;
    if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

double bidirectional_poisson(int n, double t, double a, double b) {
    if (b == 0.0) return poisson(n, a * t);
    if (a == 0.0) return poisson(-n, b * t);
    const double x = 2.0 * t * std::sqrt(a * b);
    // Scaled Bessel keeps exp(-(a+b)t) I_n(x) finite for large t.
    const double log_i = std::log(boost::math::cyl_bessel_i(std::abs(n), x) * std::exp(-x)) + x;
    return std::exp(-(a + b) * t + 0.5 * n * std::log(a / b) + log_i);
}

double example_b_bidirectional(const ExampleB& p, int n, double t) {
    const double g = std::min(p.gamma_L, p.gamma_R);
    return bidirectional_poisson(n, t, g * p.f_R * (1 - p.f_L), g * p.f_L * (1 - p.f_R));
}

double symmetric_dot_exact(int n, double gt) {
    if (n < 0) throw Error("symmetric_dot_exact: n must be non-negative");
    const double nd = n;
    const double first = std::exp(2.0 * nd * std::log(gt) - std::lgamma(2.0 * nd + 1.0));
    const double hyp = boost::math::hypergeometric_pFq({0.5 - nd}, {1.5, 1.5 - nd}, -0.25 * gt * gt);
    const double second = 2.0 * gt * (n % 2 == 0 ? 1.0 : -1.0) / ((2.0 * nd - 1.0) * pi) * hyp;
    return std::exp(-gt) * (first - second);
}

double symmetric_dot_saddle(int n, double gt) {
    if (n < 1) throw Error("symmetric_dot_saddle: n must be positive");
    const double nd = n;
    return std::exp(2.0 * nd - gt + 2.0 * nd * std::log(gt / (2.0 * nd))) / std::sqrt(nd * pi);
}

double example_b_onsager(double gl, double gr, double f) { return gl * gr / (gl + gr) * f * (1 - f); }

double example_b_affinity(double omega, double bl, double br, double ml, double mr) {
    return bl * (omega - ml) - br * (omega - mr);
}

double example_c_two_point(const ExampleC& p, double tau) {
    const double g = p.Gamma;
    const cplx w = std::sqrt(cplx(g * g - 4.0 * p.omega * p.omega));
    const double t = std::abs(tau);
    cplx sinc_term = std::abs(w) < 1e-12 ? cplx(t) : std::sinh(w * t) / w;
    return (4.0 * g * std::exp(-g * t) * (g * sinc_term + std::cosh(w * t))).real();
}

double example_c_spectrum(const ExampleC& p, double w) {
    const double g = p.Gamma, o = p.omega;
    const double x = w * w - 4.0 * o * o;
    return 1.0 + 64.0 * g * g * o * o / (4.0 * g * g * w * w + x * x);
}

double example_c_noise(const ExampleC& p) { return 1.0 + 4.0 * p.Gamma * p.Gamma / (p.omega * p.omega); }

double example_d_occupation(const ExampleD& p) {
    const double g2 = std::norm(p.G);
    return 2.0 * g2 / (p.kappa * p.kappa + 4.0 * p.delta * p.delta - 4.0 * g2);
}

cplx example_d_anomalous(const ExampleD& p) {
    const double g2 = std::norm(p.G);
    return -p.G * (2.0 * p.delta + I * p.kappa) / (p.kappa * p.kappa + 4.0 * p.delta * p.delta - 4.0 * g2);
}

double parametric_sq(double G, double k, double w) {
    const double x = G - 0.5 * k;
    return 1.0 + 2.0 * G * k / (w * w + x * x);
}

double parametric_sp(double G, double k, double w) {
    const double x = G + 0.5 * k;
    return 1.0 - 2.0 * G * k / (w * w + x * x);
}

double parametric_dq(double G, double k) {
    const double r = (k + 2.0 * G) / (k - 2.0 * G);
    return r * r;
}

double parametric_dp(double G, double k) {
    const double r = (k - 2.0 * G) / (k + 2.0 * G);
    return r * r;
}

double parametric_jump_current(double G, double k) { return 2.0 * k * G * G / (k * k - 4.0 * G * G); }

double parametric_jump_spectrum(double G, double k, double w) {
    const double a = 2.0 * G + k, b = 2.0 * G - k;
    const double gk = G * G * k * k;
    return parametric_jump_current(G, k) + gk / (a * a * a + a * w * w) - gk / (b * b * b + b * w * w);
}

double parametric_jump_noise(double G, double k) {
    const double g2 = G * G;
    const double den = k * k - 4.0 * g2;
    return 4.0 * g2 * k * (8.0 * g2 * g2 + 2.0 * g2 * k * k + k * k * k * k) / (den * den * den);
}

double parametric_g2(double G, double k, double tau) {
    const double t = std::abs(tau);
    const double a = k - 2.0 * G, b = k + 2.0 * G;
    return 1.0 + (a * a * std::exp(-t * b) + b * b * std::exp(-t * a)) / (8.0 * G * G);
}

namespace {
struct QpcParts {
    double P, Pp, n;
};
QpcParts qpc_parts(const QpcParams& p) {
    return {std::norm(p.T), std::norm(p.T + p.chi), example_b_occupation(p.leads)};
}
}  // namespace

double qpc_current(const QpcParams& p) {
    const auto q = qpc_parts(p);
    return q.P + (q.Pp - q.P) * q.n;
}

double qpc_two_point(const QpcParams& p, double tau) {
    const auto q = qpc_parts(p);
    const double dp = q.Pp - q.P;
    return std::exp(-(p.leads.gamma_L + p.leads.gamma_R) * std::abs(tau)) * dp * dp * q.n * (1 - q.n);
}

double qpc_noise(const QpcParams& p) {
    const auto q = qpc_parts(p);
    const double dp = q.Pp - q.P;
    return qpc_current(p) + 2.0 / (p.leads.gamma_L + p.leads.gamma_R) * dp * dp * q.n * (1 - q.n);
}

}  // namespace oracle

}  // namespace qc
