#include "qcurrents/analysis.hpp"

#include <cmath>
#include <limits>

#include "qcurrents/fcs.hpp"
#include "qcurrents/models.hpp"

namespace qc {

namespace {

// 4 (sum <dL^dag dL> - <<1|L_L L^+ L_R|rho>> - <<1|L_R L^+ L_L|rho>>) for given left / right maps.
double fisher_form(const Liouvillian& liou, double direct, const std::function<cmat(const cmat&)>& left,
                   const std::function<cmat(const cmat&)>& right) {
    const Eigen::Index d = liou.hilbert_dim();
    const cmat rho = liou.steady_state();
    const cmat a = unvec(liou.drazin_apply(vec(right(rho))), d);
    const cmat b = unvec(liou.drazin_apply(vec(left(rho))), d);
    const cplx cross = left(a).trace() + right(b).trace();
    return 4.0 * (direct - cross.real());
}

}  // namespace

void ParametrizedModel::validate() const {
    const Eigen::Index d = base.dimension();
    if (dH.rows() != d || dH.cols() != d) throw DimensionError("parametrized model: dH has the wrong shape");
    if (dL.size() != base.channel_count())
        throw DimensionError("parametrized model: one dL per channel is required");
    for (const auto& m : dL)
        if (m.rows() != d || m.cols() != d) throw DimensionError("parametrized model: dL has the wrong shape");
}

ParametrizedModel ParametrizedModel::finite_difference(const std::function<LindbladModel(double)>& builder,
                                                       double theta, std::string name, double rel_step) {
    const double h = rel_step * std::max(std::abs(theta), 1.0);
    const LindbladModel base = builder(theta);
    const auto central = [&](double step, cmat& dh, std::vector<cmat>& dl) {
        const LindbladModel p = builder(theta + step);
        const LindbladModel m = builder(theta - step);
        if (p.channel_count() != base.channel_count() || m.channel_count() != base.channel_count())
            throw DimensionError("parametrized model: builder changed the channel count");
        dh = (p.hamiltonian() - m.hamiltonian()) / (2.0 * step);
        dl.clear();
        for (std::size_t k = 0; k < base.channel_count(); ++k)
            dl.push_back((p.channels()[k].op - m.channels()[k].op) / (2.0 * step));
    };
    cmat dh1, dh2;
    std::vector<cmat> dl1, dl2;
    central(h, dh1, dl1);
    central(2.0 * h, dh2, dl2);
    ParametrizedModel pm;
    pm.base = base;
    pm.parameter = std::move(name);
    pm.dH = (4.0 * dh1 - dh2) / 3.0;
    double err = (dh1 - dh2).cwiseAbs().maxCoeff();
    for (std::size_t k = 0; k < dl1.size(); ++k) {
        pm.dL.push_back((4.0 * dl1[k] - dl2[k]) / 3.0);
        err = std::max(err, (dl1[k] - dl2[k]).cwiseAbs().maxCoeff());
    }
    pm.fd_error = err / 3.0;
    return pm;
}

double qfi_rate(const ParametrizedModel& pm) {
    pm.validate();
    const Liouvillian liou(pm.base);
    const cmat rho = liou.steady_state();
    const auto& ch = pm.base.channels();
    cmat dheff = pm.dH;
    double direct = 0.0;
    for (std::size_t k = 0; k < ch.size(); ++k) {
        const cmat& l = ch[k].op;
        const cmat& dl = pm.dL[k];
        dheff -= 0.5 * I * (dl.adjoint() * l + l.adjoint() * dl);
        direct += (dl.adjoint() * dl * rho).trace().real();
    }
    const auto left = [&](const cmat& x) {
        cmat out = -I * dheff * x;
        for (std::size_t k = 0; k < ch.size(); ++k) out += pm.dL[k] * x * ch[k].op.adjoint();
        return out;
    };
    const auto right = [&](const cmat& x) {
        cmat out = I * x * dheff.adjoint();
        for (std::size_t k = 0; k < ch.size(); ++k) out += ch[k].op * x * pm.dL[k].adjoint();
        return out;
    };
    return fisher_form(liou, direct, left, right);
}

double qfi_rate_hamiltonian(const OpenSystem& sys, const cmat& dH) {
    const Eigen::Index d = sys.liou.hilbert_dim();
    if (dH.rows() != d || dH.cols() != d) throw DimensionError("qfi_rate_hamiltonian: dH has the wrong shape");
    const cmat rho = sys.liou.steady_state();
    const cmat anti = rho * dH + dH * rho;
    const cmat x = unvec(sys.liou.drazin_apply(vec(anti)), d);
    return -4.0 * (dH * x).trace().real();
}

double hasegawa_f(const OpenSystem& sys) {
    const auto& ch = sys.model.channels();
    cmat heff = sys.model.hamiltonian();
    const cmat rho = sys.liou.steady_state();
    double k = 0.0;
    for (const auto& c : ch) {
        heff -= 0.5 * I * c.op.adjoint() * c.op;
        k += (c.op.adjoint() * c.op * rho).trace().real();
    }
    const auto jumps = [&](const cmat& x) {
        cmat out = cmat::Zero(x.rows(), x.cols());
        for (const auto& c : ch) out += c.op * x * c.op.adjoint();
        return out;
    };
    const auto left = [&](const cmat& x) -> cmat { return -I * heff * x + 0.5 * jumps(x); };
    const auto right = [&](const cmat& x) -> cmat { return I * x * heff.adjoint() + 0.5 * jumps(x); };
    // fisher_form multiplies the direct term by 4; K enters with unit weight.
    return fisher_form(sys.liou, 0.25 * k, left, right);
}

HasegawaBound hasegawa_bound(const OpenSystem& sys, const CurrentSpec& spec) {
    HasegawaBound b;
    const NoiseResult nr = noise(sys, spec);
    b.J = nr.J;
    b.D = nr.D;
    b.h0 = spec.kind == CurrentKind::jump ? 1.0 : 0.5;
    b.f = hasegawa_f(sys);
    b.rhs = b.h0 / b.f;
    b.lhs = b.J == 0.0 ? std::numeric_limits<double>::infinity() : b.D / (b.J * b.J);
    b.satisfied = b.lhs >= b.rhs * (1.0 - 1e-10);
    return b;
}

rvec pauli_steady_state(const rmat& rates) {
    const Eigen::Index d = rates.rows();
    if (d == 0 || rates.cols() != d) throw DimensionError("pauli_steady_state: rates must be square");
    rmat w = rates;
    w.diagonal().setZero();
    rmat gen = w;
    for (Eigen::Index j = 0; j < d; ++j) gen(j, j) = -w.col(j).sum();
    rmat aug(d + 1, d);
    aug.topRows(d) = gen;
    aug.row(d).setOnes();
    rvec rhs = rvec::Zero(d + 1);
    rhs(d) = 1.0;
    const rvec p = aug.colPivHouseholderQr().solve(rhs);
    if ((aug * p - rhs).norm() > 1e-9) throw MultipleSteadyStatesError("Pauli generator has no unique steady state");
    return p;
}

double entropy_production(const rmat& rates, const rvec& p) {
    const Eigen::Index d = rates.rows();
    double s = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index n = 0; n < d; ++n) {
            if (n == j || rates(n, j) == 0.0) continue;
            const double fwd = rates(n, j) * p(j);
            const double bwd = rates(j, n) * p(n);
            if (fwd > 0.0) s += fwd * std::log(fwd / bwd);
        }
    }
    return s;
}

TurCheck classical_tur_check(const rmat& rates, const rmat& weights) {
    const Eigen::Index d = rates.rows();
    if (rates.cols() != d || weights.rows() != d || weights.cols() != d)
        throw DimensionError("classical_tur_check: rates and weights must be square and of equal size");
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index n = 0; n < d; ++n)
            if (n != j && (rates(n, j) > 0.0) != (rates(j, n) > 0.0))
                throw Error("classical_tur_check: every transition needs its reverse");
    TurCheck r;
    r.populations = pauli_steady_state(rates);
    r.entropy_production = entropy_production(rates, r.populations);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index n = 0; n < d; ++n)
            if (n != j) r.activity += rates(n, j) * r.populations(j);
    const auto c = cumulants_recursive(tilted_classical(rates, weights), 2);
    r.J = c[0];
    r.D = c[1];
    r.ratio = r.J == 0.0 ? std::numeric_limits<double>::infinity() : r.D / (r.J * r.J);
    r.tur_rhs = r.entropy_production > 0.0 ? 2.0 / r.entropy_production : std::numeric_limits<double>::infinity();
    r.kur_rhs = 1.0 / r.activity;
    r.tur_holds = r.J == 0.0 || r.ratio >= r.tur_rhs * (1.0 - 1e-10);
    r.kur_holds = r.J == 0.0 || r.ratio >= r.kur_rhs * (1.0 - 1e-10);
    return r;
}

OnsagerCheck onsager_fdt_check(double gamma_L, double gamma_R, double sigma_eq, double step) {
    const auto occupation = [&](double delta) { return 1.0 / (std::exp(-(sigma_eq + delta)) + 1.0); };
    // J_a: L_in +1, L_out -1 for a = L; likewise for R. Channel order L_out, L_in, R_out, R_in.
    const std::vector<CurrentSpec> specs{CurrentSpec::jump({-1.0, 1.0, 0.0, 0.0}),
                                         CurrentSpec::jump({0.0, 0.0, -1.0, 1.0})};
    const auto currents = [&](double dl, double dr) {
        ExampleB p;
        p.gamma_L = gamma_L;
        p.gamma_R = gamma_R;
        p.f_L = occupation(dl);
        p.f_R = occupation(dr);
        const OpenSystem sys(build(p));
        return rvec{{average_current(sys, specs[0]), average_current(sys, specs[1])}};
    };
    OnsagerCheck out;
    out.L = rmat(2, 2);
    for (int b = 0; b < 2; ++b) {
        const double dl = b == 0 ? step : 0.0;
        const double dr = b == 1 ? step : 0.0;
        out.L.col(b) = (currents(dl, dr) - currents(-dl, -dr)) / (2.0 * step);
    }
    ExampleB eq;
    eq.gamma_L = gamma_L;
    eq.gamma_R = gamma_R;
    eq.f_L = eq.f_R = occupation(0.0);
    const OpenSystem sys(build(eq));
    out.D = cross_statistics(sys, specs, {}).D;
    out.symmetry_residual = std::abs(out.L(0, 1) - out.L(1, 0));
    out.fdt_residual = (out.D - 2.0 * out.L).cwiseAbs().maxCoeff();
    const double l = oracle::example_b_onsager(gamma_L, gamma_R, eq.f_L);
    rmat expect(2, 2);
    expect << l, -l, -l, l;
    out.analytic_residual = (out.L - expect).cwiseAbs().maxCoeff();
    const rmat sym = 0.5 * (out.L + out.L.transpose());
    out.min_eigenvalue = Eigen::SelfAdjointEigenSolver<rmat>(sym).eigenvalues().minCoeff();
    return out;
}

}  // namespace qc
