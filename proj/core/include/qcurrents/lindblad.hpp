#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qcurrents/linalg.hpp"

namespace qc {

struct JumpChannel {
    std::string label;
    cmat op;                 // L_k, d x d
    double weight = 1.0;     // nu_k, charge per click
    double phase = 0.0;      // phi_k, homodyne angle
    bool monitored = true;
    double efficiency = 1.0; // eta_k in [0, 1]
};

class LindbladModel {
public:
    LindbladModel() = default;
    LindbladModel(cmat hamiltonian, std::vector<JumpChannel> channels, bool fock_truncated = false);

    Eigen::Index dimension() const { return h_.rows(); }
    const cmat& hamiltonian() const { return h_; }
    const std::vector<JumpChannel>& channels() const { return channels_; }
    std::size_t channel_count() const { return channels_.size(); }
    std::size_t channel_index(const std::string& label) const;
    bool fock_truncated() const { return fock_truncated_; }

    // Channels after splitting eta < 1 into a monitored sqrt(eta) L part and an
    // unmonitored sqrt(1 - eta) L part. origin()[k] is the index of the
    // user channel that expanded channel k came from.
    const std::vector<JumpChannel>& expanded_channels() const { return expanded_; }
    const std::vector<std::size_t>& origin() const { return origin_; }

    LindbladModel with_hamiltonian(cmat h) const;
    LindbladModel with_channels(std::vector<JumpChannel> channels) const;

private:
    void validate() const;
    void expand();

    cmat h_;
    std::vector<JumpChannel> channels_;
    std::vector<JumpChannel> expanded_;
    std::vector<std::size_t> origin_;
    bool fock_truncated_ = false;
};

// Superoperator building blocks (column-stacking convention).
cmat left_action(const cmat& a);              // rho -> a rho
cmat right_action(const cmat& b);             // rho -> rho b
cmat sandwich(const cmat& a, const cmat& b);  // rho -> a rho b
cmat jump_superop(const cmat& l);             // rho -> l rho l^dagger
cmat dissipator(const cmat& l);               // D[l]
cmat hamiltonian_superop(const cmat& h);      // -i[h, .]
cvec trace_row(Eigen::Index d);               // <<1| as a column (use transpose)
cplx trace_of(const cvec& v, Eigen::Index d);

// Throws if rho is not a unit-trace Hermitian PSD matrix to `tol`.
void validate_density_matrix(const cmat& rho, double tol = 1e-10);
cmat hermitize_normalize(const cmat& rho);

class Liouvillian {
public:
    Liouvillian() = default;
    explicit Liouvillian(const LindbladModel& model);
    // Wrap an already vectorized generator acting on d x d matrices.
    Liouvillian(cmat matrix, Eigen::Index hilbert_dim, bool fock_truncated = false);

    const cmat& matrix() const { return m_; }
    Eigen::Index hilbert_dim() const { return d_; }
    Eigen::Index size() const { return m_.rows(); }

    // max |<<1| L|
    double trace_residual() const;

    const SpectralDecomposition& spectrum() const;
    const cvec& steady_state_vec() const;
    cmat steady_state() const;
    bool leakage_warning() const;
    const cmat& drazin() const;
    cvec drazin_apply(const cvec& v) const;
    cmat propagate(const cmat& rho0, double t) const;
    cvec propagate_vec(const cvec& v, double t) const;
    Liouvillian adjoint() const;

private:
    struct Cache;
    cmat m_;
    Eigen::Index d_ = 0;
    bool fock_ = false;
    std::shared_ptr<Cache> cache_;
};

Liouvillian vectorize(const LindbladModel& model);

// Heisenberg-picture evolution of an operator: e^{L^dagger t}(a).
cmat evolve_adjoint(const Liouvillian& liou, const cmat& a, double t);

}  // namespace qc
