#pragma once

#include <memory>
#include <vector>

#include "qcurrents/currents.hpp"

namespace qc {

// L0 = L - sum over monitored channels of their jump superoperators.
// `monitored` lists model channel indices; empty means every monitored channel.
class NoJumpGenerator {
public:
    NoJumpGenerator(const LindbladModel& model, std::vector<std::size_t> monitored = {});

    const LindbladModel& model() const { return model_; }
    const cmat& matrix() const { return l0_; }
    const std::vector<std::size_t>& monitored() const { return monitored_; }
    // Sum of jump superoperators of expanded channels originating from monitored channel i.
    const cmat& jump(std::size_t i) const { return jumps_.at(i); }
    cmat total_jump() const;
    // True when the spectral gap of L0 is away from zero (no dark states).
    bool invertible() const;
    // L0^{-1} v; throws SingularMatrixError when a dark state exists.
    cvec solve(const cvec& v) const;
    cvec evolve(const cvec& v, double t) const;
    // Largest real part of the spectrum (slowest decay).
    double slowest_rate() const;

private:
    struct Cache;
    LindbladModel model_;
    std::vector<std::size_t> monitored_;
    cmat l0_;
    std::vector<cmat> jumps_;
    std::shared_ptr<Cache> cache_;
};

// Log-spaced grid from 1e-3/K to 30/|Re lambda_slowest(L0)|.
std::vector<double> default_wtd_grid(const NoJumpGenerator& gen, std::size_t points = 400);

struct Survival {
    std::vector<double> t;
    std::vector<double> p_no;
    double p_infinity = 0.0;  // weight left in dark states
};
Survival survival(const NoJumpGenerator& gen, const cmat& rho0, const std::vector<double>& t_grid);

struct WaitingTimes {
    std::vector<double> t;
    std::vector<std::vector<double>> w;  // [monitored channel][time]
    std::vector<double> total;           // integrated weight per channel
};
WaitingTimes wtd_first(const NoJumpGenerator& gen, const cmat& rho0, const std::vector<double>& t_grid);
// Seeded with L_q rho_ss / tr(L_q rho_ss); q indexes the monitored list.
WaitingTimes wtd_between(const NoJumpGenerator& gen, std::size_t q, const std::vector<double>& t_grid);
// M(k, q) = probability that a q jump is followed by a k jump.
rmat jump_transition_matrix(const NoJumpGenerator& gen);

struct WaitingMoments {
    std::vector<double> moment;                    // E(T^n), n = 1..order
    std::vector<std::vector<double>> conditional;  // [channel][n-1] E(T^n | k)
    std::vector<double> channel_probability;       // integrated W(k), sums to 1 - P_no(infinity)
};
WaitingMoments wtd_moments(const NoJumpGenerator& gen, const cmat& rho0, int order);

struct JumpSteadyState {
    cmat pi;
    std::vector<double> probability;  // p_k per monitored channel
    double activity = 0.0;            // K = tr(J rho_ss)
    double fixed_point_residual = 0.0;
};
JumpSteadyState jump_steady_state(const NoJumpGenerator& gen);

// Eigenvalues of -J L0^{-1}, sorted by decreasing modulus. Diagnostic only.
cvec jump_map_spectrum(const NoJumpGenerator& gen);

struct RenewalReport {
    std::vector<bool> is_renewal;  // per monitored channel
    bool applicable = false;       // single monitored renewal channel
    double noise = 0.0;            // D from the Liouvillian
    double wtd_noise = 0.0;        // sigma^2 / mu^3
    double residual = 0.0;
};
RenewalReport renewal_check(const NoJumpGenerator& gen, double sv_tol = 1e-10);

}  // namespace qc
