#include "qcurrents/gaussian.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qcurrents/linalg.hpp"

namespace qc {

namespace {

cmat pauli_x() { return (cmat(2, 2) << 0, 1, 1, 0).finished(); }
cmat pauli_y() { return (cmat(2, 2) << 0, -I, I, 0).finished(); }
cmat pauli_z() { return (cmat(2, 2) << 1, 0, 0, -1).finished(); }
cmat eye(Eigen::Index n) { return cmat::Identity(n, n); }

double sign_of(Statistics s) { return s == Statistics::boson ? 1.0 : -1.0; }

}  // namespace

rvec GaussianModel::gamma_minus() const {
    rvec g = rvec::Zero(static_cast<Eigen::Index>(modes()));
    for (const auto& c : channels) {
        if (!c.inject) g(static_cast<Eigen::Index>(c.mode)) += c.rate;
    }
    return g;
}

rvec GaussianModel::gamma_plus() const {
    rvec g = rvec::Zero(static_cast<Eigen::Index>(modes()));
    for (const auto& c : channels) {
        if (c.inject) g(static_cast<Eigen::Index>(c.mode)) += c.rate;
    }
    return g;
}

void GaussianModel::validate() const {
    const Eigen::Index n = A.rows();
    if (n == 0 || A.cols() != n) throw DimensionError("Gaussian model: A must be square and nonempty");
    if (B.rows() != n || B.cols() != n) throw DimensionError("Gaussian model: B must match A");
    if (eps.size() != 0 && eps.size() != n) throw DimensionError("Gaussian model: eps must have one entry per mode");
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if ((A - A.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw Error("Gaussian model: A must be Hermitian");
    const double sb = std::max(1.0, B.cwiseAbs().maxCoeff());
    const cmat bt = B.transpose();
    const double sym = statistics == Statistics::boson ? (B - bt).cwiseAbs().maxCoeff() : (B + bt).cwiseAbs().maxCoeff();
    if (sym > 1e-12 * sb) {
        throw Error(statistics == Statistics::boson ? "Gaussian model: bosonic B must be symmetric"
                                                    : "Gaussian model: fermionic B must be antisymmetric");
    }
    if (statistics == Statistics::fermion && eps.size() != 0 && eps.cwiseAbs().maxCoeff() > 0.0) {
        throw Error("Gaussian model: fermionic models cannot have linear drive terms");
    }
    for (const auto& c : channels) {
        if (c.mode >= static_cast<std::size_t>(n)) throw DimensionError("Gaussian channel refers to a missing mode");
        if (!(c.rate >= 0.0) || !std::isfinite(c.nu) || !std::isfinite(c.phase)) {
            throw Error("Gaussian channel has an invalid rate, weight or phase");
        }
    }
}

cmat symplectic_form(Statistics s, std::size_t n) {
    const auto m = static_cast<Eigen::Index>(n);
    if (s == Statistics::boson) return kron(I * pauli_y(), eye(m));
    return -I * eye(2 * m);
}

cmat phi_matrix(std::size_t n) {
    cmat phi(2, 2);
    phi << 1, 1, -I, I;
    phi /= std::sqrt(2.0);
    return kron(phi, eye(static_cast<Eigen::Index>(n)));
}

DriftDiffusion drift_and_diffusion(const GaussianModel& model) {
    model.validate();
    const cmat& a = model.A;
    const cmat& b = model.B;
    const cmat at = a.transpose();
    DriftDiffusion out;
    out.OmegaH = -0.5 * I *
                 (kron(eye(2), a - at) - kron(pauli_y(), a + at) - I * kron(pauli_x(), b + b.conjugate()) +
                  kron(pauli_z(), b - b.conjugate()));
    const rvec gm = model.gamma_minus();
    const rvec gp = model.gamma_plus();
    const double pm = sign_of(model.statistics);
    const cmat gamma = (gm - pm * gp).cast<cplx>().asDiagonal();
    out.W = -out.OmegaH + 0.5 * kron(eye(2), gamma);
    if (model.statistics == Statistics::boson) {
        out.Upsilon = 0.5 * kron(eye(2), cmat((gp + gm).cast<cplx>().asDiagonal()));
    } else {
        out.Upsilon = -0.5 * kron(pauli_y(), cmat((gm - gp).cast<cplx>().asDiagonal()));
    }
    return out;
}

cmat CovarianceState::theta_tilde() const { return Theta - 0.5 * I * Omega; }

CovarianceState steady_covariance(const GaussianModel& model) {
    const DriftDiffusion dd = drift_and_diffusion(model);
    Eigen::ComplexEigenSolver<cmat> es(dd.W, false);
    const double minre = es.eigenvalues().real().minCoeff();
    if (!(minre > 1e-12 * std::max(1.0, dd.W.cwiseAbs().maxCoeff()))) {
        std::ostringstream msg;
        msg << "Gaussian drift matrix is not stable (min Re eigenvalue " << minre << ")";
        throw StabilityError(msg.str());
    }
    CovarianceState st;
    st.W = dd.W;
    st.Upsilon = dd.Upsilon;
    st.Omega = symplectic_form(model.statistics, model.modes());
    st.Theta = solve_lyapunov(dd.W, dd.Upsilon);
    st.Theta = 0.5 * (st.Theta + st.Theta.adjoint()).eval();
    const auto n = static_cast<Eigen::Index>(model.modes());
    cvec e = model.eps.size() ? model.eps : cvec::Zero(n);
    cvec ee(2 * n);
    ee << e, e.conjugate();
    const cvec f = phi_matrix(model.modes()) * ee;
    st.r = solve_linear(dd.W, cvec(st.Omega * f));
    return st;
}

namespace {

cmat jump_v(const GaussianModel& model, int power) {
    const auto n = static_cast<Eigen::Index>(model.modes());
    rvec plus = rvec::Zero(n), minus = rvec::Zero(n);
    for (const auto& c : model.channels) {
        const double w = std::pow(c.nu, power) * c.rate;
        (c.inject ? plus : minus)(static_cast<Eigen::Index>(c.mode)) += w;
    }
    return 0.5 * kron(eye(2), cmat((plus + minus).cast<cplx>().asDiagonal())) +
           0.5 * kron(pauli_y(), cmat((plus - minus).cast<cplx>().asDiagonal()));
}

double jump_mean(const GaussianModel& model, const CovarianceState& st, const cmat& v) {
    const double pm = sign_of(model.statistics);
    const cvec r = st.r;
    return (pm * (v * st.theta_tilde()).trace() + cplx(r.transpose() * v * r)).real();
}

// W / (W^2 + omega^2) applied to a vector.
cvec resolvent_sym(const cmat& w, double omega, const cvec& rhs) {
    const cmat m = w * w + omega * omega * eye(w.rows());
    return solve_linear(m, cvec(w * rhs));
}

}  // namespace

GaussianStats gaussian_diffusion_stats(const GaussianModel& model, const std::vector<double>& omega,
                                       const std::vector<double>& tau) {
    if (model.statistics != Statistics::boson) throw Error("Gaussian diffusion statistics are defined for bosons only");
    const CovarianceState st = steady_covariance(model);
    const auto n = static_cast<Eigen::Index>(model.modes());
    cmat v = cmat::Zero(2 * n, 2 * n);
    double k = 0.0;
    for (const auto& c : model.channels) {
        if (c.rate == 0.0) continue;
        const auto i = static_cast<Eigen::Index>(c.mode);
        const cplx z = std::exp(-I * c.phase) * c.nu * std::sqrt(c.rate) / std::sqrt(2.0);
        v(i, i) += z;
        v(i + n, i + n) += (c.inject ? -I : I) * z;
        k += c.nu * c.nu;
    }
    const cvec o = cvec::Ones(2 * n);
    const cmat vv = v + v.conjugate();
    const cvec right = st.theta_tilde() * (v.conjugate() * o);
    const cvec left = (o.transpose() * vv).transpose();

    GaussianStats out;
    out.K = k;
    out.J = cplx(left.transpose() * st.r).real();
    out.D = k + 4.0 * cplx(left.transpose() * solve_linear(st.W, right)).real();
    out.omega = omega;
    for (double w : omega) {
        out.S.push_back(k + 4.0 * cplx(left.transpose() * resolvent_sym(st.W, w, right)).real());
    }
    out.tau = tau;
    for (double t : tau) {
        out.F.push_back(2.0 * cplx(left.transpose() * (expm(-st.W * t) * right)).real());
    }
    return out;
}

GaussianStats gaussian_jump_stats(const GaussianModel& model, const std::vector<double>& omega,
                                  const std::vector<double>& tau) {
    const CovarianceState st = steady_covariance(model);
    const double pm = sign_of(model.statistics);
    const cmat v = jump_v(model, 1);
    const cmat v2 = jump_v(model, 2);
    const cmat tt = st.theta_tilde();
    const cmat m = tt * v * tt;
    const cmat vs = v.transpose() + pm * v;
    const cvec r = st.r;
    const cvec left = (r.transpose() * (v + v.transpose())).transpose();
    const cvec right = tt * (v * r);
    const cmat wd = st.W.adjoint();
    const cmat id = eye(st.W.rows());

    GaussianStats out;
    out.J = jump_mean(model, st, v);
    out.K = jump_mean(model, st, v2);
    const cmat q0 = solve_lyapunov(st.W, m);
    out.D = out.K + (2.0 * (vs * q0).trace()).real() +
            4.0 * cplx(left.transpose() * solve_linear(st.W, right)).real();
    out.omega = omega;
    for (double w : omega) {
        // Q(w) = int_0^inf e^{-i w t} G M G^dagger satisfies (W + i w/2) Q + Q (W^dagger + i w/2) = M.
        const cmat qp = solve_sylvester(st.W + 0.5 * I * w * id, wd + 0.5 * I * w * id, m);
        const cmat qm = solve_sylvester(st.W - 0.5 * I * w * id, wd - 0.5 * I * w * id, m);
        out.S.push_back(out.K + (vs * (qp + qm)).trace().real() +
                        4.0 * cplx(left.transpose() * resolvent_sym(st.W, w, right)).real());
    }
    out.tau = tau;
    for (double t : tau) {
        const cmat g = expm(-st.W * t);
        out.F.push_back((g.adjoint() * vs * g * m).trace().real() +
                        2.0 * cplx(left.transpose() * (g * right)).real());
    }
    return out;
}

std::vector<double> gaussian_g2(const GaussianModel& model, const std::vector<double>& tau) {
    const auto s = gaussian_jump_stats(model, {}, tau);
    if (!(std::abs(s.J) > 1e-14)) throw DarkChannelError("jump current vanishes; g2 is undefined");
    std::vector<double> out;
    for (double f : s.F) out.push_back(1.0 + f / (s.J * s.J));
    return out;
}

CovarianceState quadrature_transform(Statistics s, const ModeMoments& mm) {
    const Eigen::Index n = mm.mu.size();
    if (mm.C.rows() != n || mm.C.cols() != n || mm.Cp.rows() != n || mm.Cp.cols() != n) {
        throw DimensionError("mode moments have inconsistent sizes");
    }
    const double pm = sign_of(s);
    const cmat phi = phi_matrix(static_cast<std::size_t>(n));
    cmat m(2 * n, 2 * n);
    m.topLeftCorner(n, n) = mm.Cp;
    m.topRightCorner(n, n) = eye(n) + pm * mm.C;
    m.bottomLeftCorner(n, n) = mm.C.transpose();
    m.bottomRightCorner(n, n) = mm.Cp.transpose().conjugate();
    // <dR dR^T> = phi M phi^T
    const cmat rr = phi * m * phi.transpose();
    CovarianceState st;
    st.Omega = symplectic_form(s, static_cast<std::size_t>(n));
    st.Theta = 0.5 * I * st.Omega + pm * rr.transpose();
    cvec mu2(2 * n);
    mu2 << mm.mu, mm.mu.conjugate();
    st.r = phi * mu2;
    return st;
}

ModeMoments mode_moments(Statistics s, const CovarianceState& state) {
    const Eigen::Index n = state.Theta.rows() / 2;
    const double pm = sign_of(s);
    const cmat phi = phi_matrix(static_cast<std::size_t>(n));
    const cmat rr = pm * (state.Theta - 0.5 * I * state.Omega).transpose();
    const cmat m = phi.adjoint() * rr * phi.adjoint().transpose();
    ModeMoments out;
    out.Cp = m.topLeftCorner(n, n);
    out.C = pm * (m.topRightCorner(n, n) - eye(n));
    out.mu = (phi.adjoint() * state.r).head(n);
    return out;
}

}  // namespace qc
