#include <cmath>
#include <numbers>

#include "detail.hpp"
#include "qcurrents/currents.hpp"

namespace qc {

namespace {

// (1/pi) Re of the one-sided transform of tr{A e^{L tau} w} with kernel
// e^{sign * i omega tau}, where w is traceless.
std::vector<double> one_sided_transform(const Liouvillian& liou, const cvec& a, const cvec& w,
                                        const std::vector<double>& omega, double sign) {
    const cmat& l = liou.matrix();
    std::vector<double> out;
    out.reserve(omega.size());
    for (double om : omega) {
        cvec z;
        if (om == 0.0) {
            z = liou.drazin_apply(w);
        } else {
            cmat m = l;
            m.diagonal().array() += sign * I * om;
            z = Eigen::PartialPivLU<cmat>(m).solve(w);
        }
        out.push_back(-(a.transpose() * z)(0).real() / std::numbers::pi);
    }
    return out;
}

}  // namespace

EmissionSpectrum emission_spectrum(const OpenSystem& sys, std::size_t channel, const std::vector<double>& omega) {
    if (channel >= sys.model.channel_count()) throw Error("emission_spectrum: channel index out of range");
    const cmat& op = sys.model.channels()[channel].op;
    const cmat rho = sys.liou.steady_state();
    const cplx mean = (op * rho).trace();
    const cvec w = vec(cmat(op * rho - mean * rho));
    const cvec a = detail::trace_functional(op.adjoint());
    EmissionSpectrum out;
    out.omega = omega;
    // int_0^inf e^{-i w tau} e^{L tau} = -(L - i w)^{-1}
    out.regular = one_sided_transform(sys.liou, a, w, omega, -1.0);
    out.elastic_weight = std::norm(mean);
    out.total_flux = (op.adjoint() * op * rho).trace().real();
    return out;
}

EmissionSpectrum incoherent_absorption(const OpenSystem& sys, std::size_t channel, const std::vector<double>& omega) {
    if (channel >= sys.model.channel_count()) throw Error("incoherent_absorption: channel index out of range");
    const cmat& op = sys.model.channels()[channel].op;
    const cmat rho = sys.liou.steady_state();
    const cplx mean_dag = (op.adjoint() * rho).trace();
    const cvec w = vec(cmat(op.adjoint() * rho - mean_dag * rho));
    const cvec a = detail::trace_functional(op);
    EmissionSpectrum out;
    out.omega = omega;
    out.regular = one_sided_transform(sys.liou, a, w, omega, +1.0);
    out.elastic_weight = std::norm(mean_dag);
    out.total_flux = (op * op.adjoint() * rho).trace().real();
    return out;
}

std::vector<double> coherent_absorption(const std::function<LindbladModel(double)>& builder, const cmat& c,
                                        double rabi, const std::vector<double>& omega_d) {
    std::vector<double> out;
    out.reserve(omega_d.size());
    for (double wd : omega_d) {
        const LindbladModel m = builder(wd);
        if (c.rows() != m.dimension()) throw DimensionError("coherent_absorption: drive operator dimension mismatch");
        const cmat rho = Liouvillian(m).steady_state();
        out.push_back((I * rabi * ((c - c.adjoint()) * rho).trace()).real());
    }
    return out;
}

std::vector<BohrLine> weak_dissipation_lines(const LindbladModel& model, double degeneracy_tol) {
    const Eigen::Index d = model.dimension();
    Eigen::SelfAdjointEigenSolver<cmat> es(model.hamiltonian());
    const rvec e = es.eigenvalues();
    const cmat u = es.eigenvectors();
    cmat ld = cmat::Zero(d * d, d * d);
    for (const auto& ch : model.expanded_channels()) ld += dissipator(ch.op);

    const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
    std::vector<BohrLine> out;
    for (Eigen::Index n = 0; n < d; ++n) {
        for (Eigen::Index m = 0; m < d; ++m) {
            if (n == m) continue;
            const double w = e(n) - e(m);
            if (std::abs(w) <= degeneracy_tol * scale) continue;
            bool degenerate = false;
            for (Eigen::Index p = 0; p < d && !degenerate; ++p) {
                for (Eigen::Index q = 0; q < d; ++q) {
                    if ((p == n && q == m) || p == q) continue;
                    if (std::abs(e(p) - e(q) - w) <= degeneracy_tol * scale) {
                        degenerate = true;
                        break;
                    }
                }
            }
            if (degenerate) continue;
            const cvec x = vec(cmat(u.col(n) * u.col(m).adjoint()));
            const double width = -(x.adjoint() * ld * x)(0).real();
            out.push_back({w, width, n, m});
        }
    }
    return out;
}

}  // namespace qc
