#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "qcurrents/currents.hpp"

namespace qc {

enum class TiltKind { jump, diffusive, classical };

// L_chi = base + sum_t e^{i chi.nu_t} op_t + i sum_a chi_a H_a - (1/2) chi^T K chi.
// For one counting field chi is a scalar; several fields use the vector overload.
class TiltedLiouvillian {
public:
    struct Term {
        cmat op;
        rvec nu;  // one weight per counting field
    };

    TiltedLiouvillian(TiltKind kind, cmat base, std::vector<Term> terms, std::vector<cmat> drift,
                      rmat white, cvec trace, Eigen::Index hilbert_dim);

    TiltKind kind() const { return kind_; }
    std::size_t fields() const { return fields_; }
    Eigen::Index size() const { return base_.rows(); }
    Eigen::Index hilbert_dim() const { return d_; }
    const cvec& trace() const { return trace_; }

    cmat evaluate(cplx chi) const;
    cmat evaluate(const std::vector<cplx>& chi) const;

    // m-th derivative with respect to s = i chi (field 0) at chi = 0.
    cmat derivative_s(int m) const;
    // m-th derivative with respect to chi, i^m derivative_s(m).
    cmat derivative_chi(int m) const { return std::pow(I, m) * derivative_s(m); }

    // Steady state of L_0 normalized by the trace functional.
    const cvec& steady_state() const;
    // Drazin inverse of L_0 applied to v, via the augmented least-squares system.
    cvec drazin_apply(const cvec& v) const;

    // Same generator without the -(1/2) chi^2 K_diff white-noise term.
    TiltedLiouvillian without_white_noise() const;
    // Charge quantum q such that every nonzero weight of field 0 is an integer multiple of q.
    std::optional<double> charge_quantum(double tol = 1e-9) const;

private:
    struct Cache;
    TiltKind kind_;
    std::size_t fields_;
    cmat base_;
    std::vector<Term> terms_;
    std::vector<cmat> drift_;
    rmat white_;
    cvec trace_;
    Eigen::Index d_;
    std::shared_ptr<Cache> cache_;
};

TiltedLiouvillian tilted_jump(const LindbladModel& model, const CurrentSpec& spec);
TiltedLiouvillian tilted_jump(const LindbladModel& model, const std::vector<CurrentSpec>& specs);
TiltedLiouvillian tilted_diffusive(const LindbladModel& model, const CurrentSpec& spec);
TiltedLiouvillian tilted_diffusive(const LindbladModel& model, const std::vector<CurrentSpec>& specs);
// rates(n, j): transition j -> n (diagonal ignored); weights(n, j): charge of that transition.
TiltedLiouvillian tilted_classical(const rmat& rates, const rmat& weights);

struct ChargeDistribution {
    bool lattice = true;
    double quantum = 1.0;       // lattice spacing, or grid spacing for real support
    std::vector<double> n;
    std::vector<double> p;      // probabilities (lattice) or densities (real grid)
    double t = 0.0;
    double min_value = 0.0;
    bool negative_excursion = false;

    double normalization() const;
    double mean() const;
    double variance() const;
    double at(double charge) const;  // lattice lookup, 0 when outside support
};

struct DistributionOptions {
    std::size_t points = 1024;           // chi grid size
    std::optional<double> quantum;       // lattice quantum override
    bool force_real_grid = false;
    double window_sigmas = 8.0;          // real grid: chi in +-window/sqrt(D t)
    std::optional<double> chi_window;    // explicit real-grid half window
    bool coherent_limit = false;         // drop the -chi^2 K_diff / 2 term
};

ChargeDistribution charge_distribution(const TiltedLiouvillian& tilted, const cmat& rho0, double t,
                                       const DistributionOptions& opts = {});
// Population-vector initial condition for classical generators.
ChargeDistribution charge_distribution(const TiltedLiouvillian& tilted, const cvec& state0, double t,
                                       const DistributionOptions& opts = {});

// Leading eigenvalue of L_chi continued from chi = 0 along the grid.
std::vector<cplx> scgf(const TiltedLiouvillian& tilted, const std::vector<cplx>& chi);
std::vector<cplx> scgf(const TiltedLiouvillian& tilted, const std::vector<double>& chi);
cplx scgf_at(const TiltedLiouvillian& tilted, cplx chi);
// phi(k) = C(-i k) for real k: the leading real eigenvalue of the exponentially tilted generator.
std::function<double(double)> scgf_real_tilt(const TiltedLiouvillian& tilted);

// Scaled cumulants of orders 1..order (order <= 8).
std::vector<double> cumulants_recursive(const TiltedLiouvillian& tilted, int order);

struct SaddlePointOptions {
    double bracket = 50.0;
    bool renormalize = false;  // divide by the sum over the supplied lattice
    double fd_step = 1e-3;
};
struct SaddlePoint {
    double k = 0.0;
    double probability = 0.0;
    double curvature = 0.0;  // phi''(k)
};
SaddlePoint saddle_point(const std::function<double(double)>& phi, double n, double t,
                         const SaddlePointOptions& opts = {});

// (1/2 pi q) int_{-pi/q}^{pi/q} e^{-i n chi + C(chi) t} d chi using composite Gauss-Legendre,
// with C(chi) continued from chi = 0.
std::vector<double> long_time_distribution(const TiltedLiouvillian& tilted, const std::vector<double>& n,
                                           double t, std::size_t panels = 64);

struct FluctuationCheck {
    double max_asymmetry = 0.0;
    double at_chi = 0.0;
};
FluctuationCheck fluctuation_theorem_check(const TiltedLiouvillian& tilted, double sigma,
                                           const std::vector<double>& chi);

}  // namespace qc
