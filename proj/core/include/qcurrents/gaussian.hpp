#pragma once

#include <vector>

#include "qcurrents/types.hpp"

namespace qc {

enum class Statistics { boson, fermion };

// One dissipative channel: rate * D[b_mode] (extract) or rate * D[b_mode^dagger] (inject).
struct GaussianChannel {
    std::size_t mode = 0;
    bool inject = false;
    double rate = 0.0;
    double nu = 1.0;     // charge per click / diffusive weight
    double phase = 0.0;  // homodyne angle
};

// H = sum A_ij b_i^dag b_j + (1/2)(B_ij b_i^dag b_j^dag + h.c.) + sum (eps_i b_i^dag + h.c.)
struct GaussianModel {
    Statistics statistics = Statistics::boson;
    cmat A;
    cmat B;
    cvec eps;
    std::vector<GaussianChannel> channels;

    std::size_t modes() const { return static_cast<std::size_t>(A.rows()); }
    rvec gamma_minus() const;
    rvec gamma_plus() const;
    void validate() const;
};

// Ordering R = (q_1..q_N, p_1..p_N).
cmat symplectic_form(Statistics s, std::size_t n);
cmat phi_matrix(std::size_t n);  // phi (x) 1_N

struct DriftDiffusion {
    cmat W;
    cmat Upsilon;
    cmat OmegaH;
};
DriftDiffusion drift_and_diffusion(const GaussianModel& model);

struct CovarianceState {
    cvec r;       // real entries
    cmat Theta;
    cmat W;
    cmat Upsilon;
    cmat Omega;
    cmat theta_tilde() const;  // Theta - i Omega / 2
};
CovarianceState steady_covariance(const GaussianModel& model);

struct GaussianStats {
    double J = 0.0;
    double K = 0.0;
    double D = 0.0;
    std::vector<double> omega;
    std::vector<double> S;
    std::vector<double> tau;
    std::vector<double> F;  // regular part of F(tau)
};
GaussianStats gaussian_diffusion_stats(const GaussianModel& model, const std::vector<double>& omega,
                                       const std::vector<double>& tau = {});
GaussianStats gaussian_jump_stats(const GaussianModel& model, const std::vector<double>& omega,
                                  const std::vector<double>& tau = {});
// g2(tau) of the jump current with its weights: 1 + F_reg(tau)/J^2.
std::vector<double> gaussian_g2(const GaussianModel& model, const std::vector<double>& tau);

// mu_i = <b_i>, C_ij = <b_j^dag b_i> - <b_j^dag><b_i>, Cp_ij = <b_i b_j> - <b_i><b_j>.
struct ModeMoments {
    cvec mu;
    cmat C;
    cmat Cp;
};
CovarianceState quadrature_transform(Statistics s, const ModeMoments& m);
ModeMoments mode_moments(Statistics s, const CovarianceState& state);

}  // namespace qc
