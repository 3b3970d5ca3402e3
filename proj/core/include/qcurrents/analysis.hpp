#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qcurrents/currents.hpp"

namespace qc {

// A model depending on a scalar parameter theta, with dH/dtheta and dL_k/dtheta at the
// working point. Derivatives are indexed by the model's (unexpanded) channels.
struct ParametrizedModel {
    LindbladModel base;
    std::string parameter;
    cmat dH;
    std::vector<cmat> dL;
    double fd_error = 0.0;  // Richardson error estimate when built by finite differences

    void validate() const;

    // Central differences with step rel_step * max(|theta|, 1), refined by one Richardson step.
    static ParametrizedModel finite_difference(const std::function<LindbladModel(double)>& builder,
                                               double theta, std::string name, double rel_step = 1e-6);
};

// Quantum Fisher information rate F/tau of the full output (system plus environment).
double qfi_rate(const ParametrizedModel& pm);
// Hamiltonian-only form -4 tr[dH L^+({rho_ss, dH})].
double qfi_rate_hamiltonian(const OpenSystem& sys, const cmat& dH);

struct HasegawaBound {
    double lhs = 0.0;  // D / J^2
    double rhs = 0.0;  // h0' / f
    double f = 0.0;
    double h0 = 1.0;
    double J = 0.0;
    double D = 0.0;
    bool satisfied = false;
};
// f = K - 4 <<1|L_L L^+ L_R|rho>> - 4 <<1|L_R L^+ L_L|rho>>, with
// L_L rho = -i H_eff rho + (1/2) sum L rho L^dag and L_R rho = i rho H_eff^dag + (1/2) sum L rho L^dag.
double hasegawa_f(const OpenSystem& sys);
HasegawaBound hasegawa_bound(const OpenSystem& sys, const CurrentSpec& spec);

struct TurCheck {
    double J = 0.0;
    double D = 0.0;
    double ratio = 0.0;               // D / J^2
    double entropy_production = 0.0;  // sigma-dot
    double activity = 0.0;            // K = sum W_nj p_j
    double tur_rhs = 0.0;             // 2 / sigma-dot
    double kur_rhs = 0.0;             // 1 / K
    bool tur_holds = false;
    bool kur_holds = false;
    rvec populations;
};
// Stationary populations of a Pauli master equation, rates(n, j) for j -> n.
rvec pauli_steady_state(const rmat& rates);
double entropy_production(const rmat& rates, const rvec& p);
TurCheck classical_tur_check(const rmat& rates, const rmat& weights);

struct OnsagerCheck {
    rmat L;                    // L(a, b) = dJ_a / d delta_b at equilibrium
    rmat D;                    // D(a, b)
    double symmetry_residual = 0.0;  // |L_LR - L_RL|
    double fdt_residual = 0.0;       // max |D - 2 L|
    double analytic_residual = 0.0;  // max |L - closed form|
    double min_eigenvalue = 0.0;     // of the symmetric part of L
};
// Dot between two leads at equilibrium occupation 1 / (e^{-sigma_eq} + 1). J_a counts particles
// entering the dot from lead a; delta_a shifts lead a's affinity.
OnsagerCheck onsager_fdt_check(double gamma_L, double gamma_R, double sigma_eq, double step = 1e-4);

}  // namespace qc
