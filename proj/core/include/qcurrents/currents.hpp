#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qcurrents/lindblad.hpp"

namespace qc {

enum class CurrentKind { jump, diffusive };

// One observed current N(t) = sum_k nu_k N_k(t). Weights and phases are
// indexed by the model's (unexpanded) channels; unmonitored channels carry
// no weight regardless of what is set here.
struct CurrentSpec {
    CurrentKind kind = CurrentKind::jump;
    std::vector<double> weights;
    std::vector<double> phases;

    static CurrentSpec jump(std::vector<double> weights);
    static CurrentSpec diffusive(std::vector<double> weights, std::vector<double> phases = {});
    // Unit weight on a single channel.
    static CurrentSpec channel(std::size_t n_channels, std::size_t k,
                               CurrentKind kind = CurrentKind::jump);
};

// A model together with its Liouvillian. Copies share the lazy caches.
struct OpenSystem {
    OpenSystem(const LindbladModel& m) : model(m), liou(m) {}  // NOLINT(implicit)
    LindbladModel model;
    Liouvillian liou;
};

void validate_spec(const LindbladModel& model, const CurrentSpec& spec);

// J superoperator sum_k nu_k^power L_k* (x) L_k, or the diffusion
// superoperator H (power 1 only) for diffusive currents.
cmat current_superop(const LindbladModel& model, const CurrentSpec& spec, int power = 1);
// K_diff = sum_k nu_k^2 over monitored channels.
double diffusive_activity(const LindbladModel& model, const CurrentSpec& spec);

double average_current(const OpenSystem& sys, const CurrentSpec& spec,
                       const std::optional<cmat>& rho = std::nullopt);
double dynamical_activity(const OpenSystem& sys, const CurrentSpec& spec,
                          const std::optional<cmat>& rho = std::nullopt);

struct TwoPointFunction {
    double delta_weight = 0.0;  // coefficient of delta(tau)
    std::vector<double> tau;
    std::vector<double> regular;
};
TwoPointFunction two_point_function(const OpenSystem& sys, const CurrentSpec& spec,
                                    const std::vector<double>& tau);

std::vector<double> power_spectrum(const OpenSystem& sys, const CurrentSpec& spec,
                                   const std::vector<double>& omega);

struct NoiseResult {
    double D = 0.0;
    double J = 0.0;
    double K = 0.0;
    std::optional<double> fano;  // empty when J vanishes
};
NoiseResult noise(const OpenSystem& sys, const CurrentSpec& spec);

// Time-local noise D(t) = K(t) + 2 tr{J sigma(t)} from the auxiliary
// sigma equation, integrated alongside rho(t).
std::vector<double> noise_transient(const OpenSystem& sys, const CurrentSpec& spec,
                                    const cmat& rho0, const std::vector<double>& t,
                                    double tol = 1e-12);

std::vector<double> g2(const OpenSystem& sys, const std::vector<double>& tau, std::size_t channel);
std::vector<cplx> g1(const OpenSystem& sys, const std::vector<double>& tau, std::size_t channel,
                     bool normalize = true);

struct CrossStatistics {
    std::vector<double> J;                  // J_alpha
    rmat D;                                 // D_alpha,beta
    std::vector<double> omega;
    std::vector<cmat> S;                    // S_alpha,beta(omega)
    std::vector<rmat> coherence;            // |S_ab|^2 / (S_aa S_bb)
    std::vector<double> tau;
    std::vector<rmat> F;                    // regular part F_ab(tau)
    rmat delta_weight;                      // K_ab
};
CrossStatistics cross_statistics(const OpenSystem& sys, const std::vector<CurrentSpec>& specs,
                                 const std::vector<double>& omega,
                                 const std::vector<double>& tau = {});
// D_ab = sum nu_ak D_kq nu_bq from elementary channel statistics.
rmat compose_diffusion_matrix(const rmat& elementary, const rmat& weights);

// E[I_{k_M}(t_M) ... I_{k_1}(t_1)] for strictly increasing times, starting from rho0 at t = 0.
cplx multi_time_correlation(const OpenSystem& sys, const std::vector<CurrentSpec>& currents,
                            const std::vector<double>& times, const cmat& rho0);

struct EmissionSpectrum {
    std::vector<double> omega;
    std::vector<double> regular;
    double elastic_weight = 0.0;  // |<L>|^2 at omega = 0
    double total_flux = 0.0;      // <L^dagger L>
};
// Frequencies are offsets from the frame the model is written in.
EmissionSpectrum emission_spectrum(const OpenSystem& sys, std::size_t channel,
                                   const std::vector<double>& omega);
EmissionSpectrum incoherent_absorption(const OpenSystem& sys, std::size_t channel,
                                       const std::vector<double>& omega);
// W(omega_d) = i Omega <c - c^dagger> in the steady state of builder(omega_d).
std::vector<double> coherent_absorption(const std::function<LindbladModel(double)>& builder,
                                        const cmat& c, double rabi,
                                        const std::vector<double>& omega_d);

struct BohrLine {
    double omega;  // E_n - E_m
    double width;  // -Re <<y_nm| L_D |x_nm>>
    Eigen::Index n, m;
};
// First-order weak-dissipation prediction of spectral feature positions and widths.
std::vector<BohrLine> weak_dissipation_lines(const LindbladModel& model, double degeneracy_tol = 1e-9);

}  // namespace qc
