#pragma once

#include <complex>
#include <vector>

#include "qcurrents/currents.hpp"
#include "qcurrents/gaussian.hpp"

namespace qc {

double fermi(double beta, double energy, double mu);
double bose_einstein(double beta, double energy);

// Qubit basis: index 0 is the excited / occupied state.
cmat sigma_minus();
cmat sigma_plus();
cmat sigma_x();
cmat sigma_y();
cmat sigma_z();
// Truncated bosonic annihilation operator on {|0>, ..., |cutoff-1>}.
cmat annihilation(Eigen::Index cutoff);

// Driven qubit with a thermal bath. Channels: "emit" (nu = -1), "absorb" (nu = +1).
struct ExampleA {
    double delta = 0.0;
    double omega = 1.0;
    double gamma = 1.0;
    double nbar = 0.0;
};
// Dot between two leads. Channels: "L_out", "L_in", "R_out", "R_in"; default weights count
// particles entering the left lead (L_out +1, L_in -1).
struct ExampleB {
    double omega = 0.0;
    double gamma_L = 1.0;
    double gamma_R = 1.0;
    double f_L = 0.0;
    double f_R = 1.0;
    static ExampleB thermal(double omega, double gamma_L, double gamma_R, double beta_L, double beta_R,
                            double mu_L, double mu_R);
};
// Driven qubit with dephasing. Channel: "dephase" (sqrt(Gamma) sigma_z, nu = 1).
struct ExampleC {
    double delta = 0.0;
    double omega = 1.0;
    double Gamma = 1.0;
};
// Parametrically driven Kerr cavity. Channel: "loss" (sqrt(kappa) a).
struct ExampleD {
    std::complex<double> G = 0.0;
    double U = 0.0;
    double delta = 0.0;
    double kappa = 1.0;
    Eigen::Index fock_cutoff = 30;
};
// Dot with a charge-sensing point contact. Channels of ExampleB plus "qpc" (T + chi c^dag c).
struct QpcParams {
    ExampleB leads;
    std::complex<double> T = 1.0;
    std::complex<double> chi = 0.0;
    bool monitor_leads = false;
};
// Classical master equation, rates(n, j) for j -> n. Channels "W_n_j" with jump |n><j|.
struct ClassicalPauli {
    rmat rates;
    rmat weights;
};

LindbladModel build(const ExampleA& p);
LindbladModel build(const ExampleB& p);
LindbladModel build(const ExampleC& p);
LindbladModel build(const ExampleD& p);
LindbladModel build(const QpcParams& p);
LindbladModel build(const ClassicalPauli& p);
GaussianModel build_gaussian(const ExampleD& p);
// Single dot as a one-mode fermionic Gaussian model; channels ordered L_out, L_in, R_out, R_in.
GaussianModel build_gaussian(const ExampleB& p);

// Current spec with weights taken from the channels' default weights.
CurrentSpec default_spec(const LindbladModel& model, CurrentKind kind = CurrentKind::jump);

// Exactly bidirectional Poisson source: a one-dimensional model with channels "forward"
// (rate a, nu = +1) and "backward" (rate b, nu = -1).
LindbladModel bidirectional_poisson_source(double forward_rate, double backward_rate);

// Coherent state truncated to `cutoff` levels and renormalized.
cvec coherent_state(std::complex<double> alpha, Eigen::Index cutoff);
cvec fock_state(Eigen::Index n, Eigen::Index cutoff);

// Wigner function W(q, p) of a Fock-basis state, q = (a + a^dag)/sqrt 2, p = i(a^dag - a)/sqrt 2,
// normalized so that the integral over dq dp is one. Returned as grid[iq][ip].
std::vector<std::vector<double>> wigner_grid(const cmat& rho, const std::vector<double>& q,
                                             const std::vector<double>& p);

namespace oracle {

// Example A
double example_a_current(const ExampleA& p);
cmat example_a_drazin(double gamma, double omega);  // nbar = delta = 0
double example_a_emission_current(double gamma, double omega);
double example_a_emission_noise(double gamma, double omega);
double example_a_hasegawa_f(double gamma, double omega);
double example_a_qfi_omega(double gamma);
double example_a_qfi_gamma(double gamma, double omega);

// Example B
double example_b_occupation(const ExampleB& p);
double example_b_current(const ExampleB& p);
double example_b_noise(const ExampleB& p);
std::complex<double> example_b_scgf(const ExampleB& p, std::complex<double> chi);
std::complex<double> example_b_scgf_bottleneck(const ExampleB& p, std::complex<double> chi);
double poisson(int n, double mean);
double bidirectional_poisson(int n, double t, double forward_rate, double backward_rate);
double example_b_bidirectional(const ExampleB& p, int n, double t);
double symmetric_dot_exact(int n, double gamma_t);
double symmetric_dot_saddle(int n, double gamma_t);
double example_b_onsager(double gamma_L, double gamma_R, double f_eq);
double example_b_affinity(double omega, double beta_L, double beta_R, double mu_L, double mu_R);

// Example C
double example_c_two_point(const ExampleC& p, double tau);  // regular part
double example_c_spectrum(const ExampleC& p, double w);
double example_c_noise(const ExampleC& p);

// Example D (delta may be nonzero for the moments)
double example_d_occupation(const ExampleD& p);
std::complex<double> example_d_anomalous(const ExampleD& p);  // <a a>

// Parametric oscillator: delta = 0, pump i G with real G.
double parametric_sq(double G, double kappa, double w);
double parametric_sp(double G, double kappa, double w);
double parametric_dq(double G, double kappa);
double parametric_dp(double G, double kappa);
double parametric_jump_current(double G, double kappa);
double parametric_jump_spectrum(double G, double kappa, double w);
double parametric_jump_noise(double G, double kappa);
double parametric_g2(double G, double kappa, double tau);

// Point contact
double qpc_current(const QpcParams& p);
double qpc_two_point(const QpcParams& p, double tau);  // regular part
double qpc_noise(const QpcParams& p);

}  // namespace oracle

}  // namespace qc
