#include "qcurrents/lindblad.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include <spdlog/spdlog.h>

namespace qc {

namespace {

double max_abs(const cmat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

LindbladModel::LindbladModel(cmat hamiltonian, std::vector<JumpChannel> channels, bool fock_truncated)
    : h_(std::move(hamiltonian)), channels_(std::move(channels)), fock_truncated_(fock_truncated) {
    validate();
    expand();
}

void LindbladModel::validate() const {
    if (h_.rows() != h_.cols() || h_.rows() == 0) {
        throw DimensionError("model: Hamiltonian must be a nonempty square matrix");
    }
    if (!h_.allFinite()) throw Error("model: Hamiltonian has non-finite entries");
    const double herm = max_abs(h_ - h_.adjoint());
    if (herm > 1e-12 * std::max(1.0, max_abs(h_))) {
        throw Error("model: Hamiltonian is not Hermitian");
    }
    for (const auto& ch : channels_) {
        if (ch.op.rows() != h_.rows() || ch.op.cols() != h_.cols()) {
            throw DimensionError("model: channel '" + ch.label + "' has wrong dimension");
        }
        if (!ch.op.allFinite()) throw Error("model: channel '" + ch.label + "' has non-finite entries");
        if (!(ch.efficiency >= 0.0 && ch.efficiency <= 1.0)) {
            throw Error("model: channel '" + ch.label + "' efficiency outside [0, 1]");
        }
        if (!std::isfinite(ch.weight) || !std::isfinite(ch.phase)) {
            throw Error("model: channel '" + ch.label + "' has non-finite weight or phase");
        }
    }
}

void LindbladModel::expand() {
    expanded_.clear();
    origin_.clear();
    for (std::size_t k = 0; k < channels_.size(); ++k) {
        const auto& ch = channels_[k];
        if (!ch.monitored || ch.efficiency >= 1.0) {
            expanded_.push_back(ch);
            if (!ch.monitored) expanded_.back().weight = 0.0;
            expanded_.back().efficiency = 1.0;
            origin_.push_back(k);
            continue;
        }
        JumpChannel seen = ch;
        seen.op = std::sqrt(ch.efficiency) * ch.op;
        seen.efficiency = 1.0;
        JumpChannel missed = ch;
        missed.label = ch.label + ":missed";
        missed.op = std::sqrt(1.0 - ch.efficiency) * ch.op;
        missed.monitored = false;
        missed.weight = 0.0;
        missed.efficiency = 1.0;
        if (ch.efficiency > 0.0) {
            expanded_.push_back(std::move(seen));
            origin_.push_back(k);
        }
        expanded_.push_back(std::move(missed));
        origin_.push_back(k);
    }
}

std::size_t LindbladModel::channel_index(const std::string& label) const {
    for (std::size_t k = 0; k < channels_.size(); ++k) {
        if (channels_[k].label == label) return k;
    }
    throw Error("model: no channel labelled '" + label + "'");
}

LindbladModel LindbladModel::with_hamiltonian(cmat h) const {
    return LindbladModel(std::move(h), channels_, fock_truncated_);
}

LindbladModel LindbladModel::with_channels(std::vector<JumpChannel> channels) const {
    return LindbladModel(h_, std::move(channels), fock_truncated_);
}

cmat left_action(const cmat& a) {
    return kron(cmat::Identity(a.cols(), a.cols()), a);
}

cmat right_action(const cmat& b) {
    return kron(b.transpose(), cmat::Identity(b.rows(), b.rows()));
}

cmat sandwich(const cmat& a, const cmat& b) { return kron(b.transpose(), a); }

cmat jump_superop(const cmat& l) { return kron(l.conjugate(), l); }

cmat dissipator(const cmat& l) {
    const cmat ldl = l.adjoint() * l;
    return jump_superop(l) - 0.5 * left_action(ldl) - 0.5 * right_action(ldl);
}

cmat hamiltonian_superop(const cmat& h) {
    return -I * (left_action(h) - right_action(h));
}

cvec trace_row(Eigen::Index d) {
    cvec t = cvec::Zero(d * d);
    for (Eigen::Index i = 0; i < d; ++i) t(i * (d + 1)) = 1.0;
    return t;
}

cplx trace_of(const cvec& v, Eigen::Index d) {
    cplx s = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) s += v(i * (d + 1));
    return s;
}

void validate_density_matrix(const cmat& rho, double tol) {
    if (rho.rows() != rho.cols()) throw DimensionError("density matrix must be square");
    if (max_abs(rho - rho.adjoint()) > std::max(tol, 1e-12)) {
        throw Error("density matrix is not Hermitian");
    }
    if (std::abs(rho.trace() - 1.0) > tol) throw Error("density matrix trace differs from 1");
    const cmat h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<cmat> es(h, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) throw Error("density matrix is not positive semidefinite");
}

cmat hermitize_normalize(const cmat& rho) {
    cmat h = 0.5 * (rho + rho.adjoint());
    const cplx tr = h.trace();
    if (std::abs(tr) == 0.0) throw Error("cannot normalize a traceless matrix");
    return h / tr.real();
}

struct Liouvillian::Cache {
    std::once_flag spec_once, ss_once, drazin_once;
    SpectralDecomposition spec;
    Eigen::ColPivHouseholderQR<cmat> augmented;
    cvec ss;
    bool leakage = false;
    cmat drazin;
};

Liouvillian::Liouvillian(const LindbladModel& model)
    : d_(model.dimension()), fock_(model.fock_truncated()), cache_(std::make_shared<Cache>()) {
    m_ = hamiltonian_superop(model.hamiltonian());
    for (const auto& ch : model.expanded_channels()) m_ += dissipator(ch.op);
}

Liouvillian::Liouvillian(cmat matrix, Eigen::Index hilbert_dim, bool fock_truncated)
    : m_(std::move(matrix)), d_(hilbert_dim), fock_(fock_truncated), cache_(std::make_shared<Cache>()) {
    if (m_.rows() != m_.cols() || m_.rows() != d_ * d_) {
        throw DimensionError("Liouvillian: matrix must be d^2 x d^2");
    }
}

double Liouvillian::trace_residual() const {
    return (trace_row(d_).transpose() * m_).cwiseAbs().maxCoeff();
}

const SpectralDecomposition& Liouvillian::spectrum() const {
    std::call_once(cache_->spec_once, [&] { cache_->spec = eig(m_); });
    return cache_->spec;
}

const cvec& Liouvillian::steady_state_vec() const {
    std::call_once(cache_->ss_once, [&] {
        const Eigen::Index n = m_.rows();
        cmat aug(n + 1, n);
        aug.topRows(n) = m_;
        aug.row(n) = trace_row(d_).transpose();
        cache_->augmented.setThreshold(1e-10);
        cache_->augmented.compute(aug);
        if (cache_->augmented.rank() < n) {
            std::ostringstream msg;
            msg << "steady state is not unique (zero eigenspace of dimension "
                << (n - cache_->augmented.rank() + 1) << ")";
            throw MultipleSteadyStatesError(msg.str());
        }
        cvec rhs = cvec::Zero(n + 1);
        rhs(n) = 1.0;
        const cvec z = cache_->augmented.solve(rhs);
        cache_->ss = vec(hermitize_normalize(unvec(z, d_)));
        const double res = (m_ * cache_->ss).norm();
        const double scale = std::max(1.0, max_abs(m_));
        if (res > 1e-9 * scale) {
            std::ostringstream msg;
            msg << "steady state residual " << res << " too large; zero eigenspace may be degenerate";
            throw MultipleSteadyStatesError(msg.str());
        }
        if (fock_ && d_ >= 2) {
            const double top = std::abs(cache_->ss((d_ - 1) * (d_ + 1))) +
                               std::abs(cache_->ss((d_ - 2) * (d_ + 1)));
            if (top > 1e-6) {
                cache_->leakage = true;
                spdlog::warn("Fock truncation leakage: top two levels hold population {:.3g}", top);
            }
        }
    });
    return cache_->ss;
}

cmat Liouvillian::steady_state() const { return unvec(steady_state_vec(), d_); }

bool Liouvillian::leakage_warning() const {
    steady_state_vec();
    return cache_->leakage;
}

const cmat& Liouvillian::drazin() const {
    std::call_once(cache_->drazin_once, [&] {
        steady_state_vec();
        const auto& sp = spectrum();
        const double scale = std::max(1.0, sp.values.cwiseAbs().maxCoeff());
        if (sp.size() > 1 && std::abs(sp.values(1)) <= 1e-9 * scale) {
            throw MultipleSteadyStatesError("Drazin inverse: degenerate zero eigenvalue");
        }
        cvec inv = cvec::Zero(sp.size());
        for (Eigen::Index j = 1; j < sp.size(); ++j) inv(j) = 1.0 / sp.values(j);
        cache_->drazin = sp.right * inv.asDiagonal() * sp.left;
    });
    return cache_->drazin;
}

cvec Liouvillian::drazin_apply(const cvec& v) const {
    if (v.size() != m_.rows()) throw DimensionError("drazin_apply: vector size mismatch");
    const cvec& ss = steady_state_vec();
    const Eigen::Index n = m_.rows();
    cvec rhs(n + 1);
    rhs.head(n) = v - ss * trace_of(v, d_);
    rhs(n) = 0.0;
    return cache_->augmented.solve(rhs);
}

cvec Liouvillian::propagate_vec(const cvec& v, double t) const {
    return expm_action(m_, v, t);
}

cmat Liouvillian::propagate(const cmat& rho0, double t) const {
    if (rho0.rows() != d_ || rho0.cols() != d_) throw DimensionError("propagate: state dimension mismatch");
    return unvec(propagate_vec(vec(rho0), t), d_);
}

Liouvillian Liouvillian::adjoint() const {
    return Liouvillian(cmat(m_.adjoint()), d_, fock_);
}

Liouvillian vectorize(const LindbladModel& model) { return Liouvillian(model); }

cmat evolve_adjoint(const Liouvillian& liou, const cmat& a, double t) {
    return unvec(expm_action(cmat(liou.matrix().adjoint()), vec(a), t), liou.hilbert_dim());
}

}  // namespace qc
