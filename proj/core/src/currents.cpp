#include "qcurrents/currents.hpp"

#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "detail.hpp"

namespace qc {

namespace detail {

ExpandedWeights expand_weights(const LindbladModel& model, const CurrentSpec& spec) {
    validate_spec(model, spec);
    ExpandedWeights out;
    const auto& ex = model.expanded_channels();
    const auto& org = model.origin();
    out.nu.resize(ex.size());
    out.phi.resize(ex.size());
    for (std::size_t k = 0; k < ex.size(); ++k) {
        out.nu[k] = ex[k].monitored ? spec.weights[org[k]] : 0.0;
        out.phi[k] = spec.phases.empty() ? 0.0 : spec.phases[org[k]];
    }
    return out;
}

cvec trace_functional(const cmat& a) { return vec(cmat(a.transpose())); }

Evolver::Evolver(const Liouvillian& liou) : liou_(liou) {
    try {
        spec_ = &liou.spectrum();
    } catch (const DefectiveMatrixError&) {
        spec_ = nullptr;
    }
}

cvec Evolver::operator()(const cvec& v, double t) const {
    if (!spec_) return liou_.propagate_vec(v, t);
    const cvec c = spec_->left * v;
    cvec s(c.size());
    for (Eigen::Index j = 0; j < c.size(); ++j) s(j) = std::exp(spec_->values(j) * t) * c(j);
    return spec_->right * s;
}

double relative_scale(const cmat& m) { return std::max(1.0, m.size() ? m.cwiseAbs().maxCoeff() : 0.0); }

}  // namespace detail

CurrentSpec CurrentSpec::jump(std::vector<double> weights) {
    return CurrentSpec{CurrentKind::jump, std::move(weights), {}};
}

CurrentSpec CurrentSpec::diffusive(std::vector<double> weights, std::vector<double> phases) {
    return CurrentSpec{CurrentKind::diffusive, std::move(weights), std::move(phases)};
}

CurrentSpec CurrentSpec::channel(std::size_t n_channels, std::size_t k, CurrentKind kind) {
    if (k >= n_channels) throw Error("CurrentSpec::channel: index out of range");
    std::vector<double> w(n_channels, 0.0);
    w[k] = 1.0;
    return CurrentSpec{kind, std::move(w), {}};
}

void validate_spec(const LindbladModel& model, const CurrentSpec& spec) {
    if (spec.weights.size() != model.channel_count()) {
        std::ostringstream msg;
        msg << "current spec has " << spec.weights.size() << " weights but the model has "
            << model.channel_count() << " channels";
        throw DimensionError(msg.str());
    }
    if (!spec.phases.empty() && spec.phases.size() != model.channel_count()) {
        throw DimensionError("current spec phase count does not match channel count");
    }
    for (double w : spec.weights) {
        if (!std::isfinite(w)) throw Error("current spec has a non-finite weight");
    }
}

cmat current_superop(const LindbladModel& model, const CurrentSpec& spec, int power) {
    const auto w = detail::expand_weights(model, spec);
    const auto& ex = model.expanded_channels();
    const Eigen::Index n = model.dimension() * model.dimension();
    cmat out = cmat::Zero(n, n);
    if (spec.kind == CurrentKind::jump) {
        for (std::size_t k = 0; k < ex.size(); ++k) {
            if (w.nu[k] == 0.0) continue;
            out += std::pow(w.nu[k], power) * jump_superop(ex[k].op);
        }
        return out;
    }
    if (power != 1) throw Error("current_superop: diffusive currents only have a first-order superoperator");
    for (std::size_t k = 0; k < ex.size(); ++k) {
        if (w.nu[k] == 0.0) continue;
        const cplx ph = std::exp(-I * w.phi[k]);
        out += w.nu[k] * (left_action(ph * ex[k].op) + right_action(std::conj(ph) * ex[k].op.adjoint()));
    }
    return out;
}

double diffusive_activity(const LindbladModel& model, const CurrentSpec& spec) {
    const auto w = detail::expand_weights(model, spec);
    double k = 0.0;
    for (double nu : w.nu) k += nu * nu;
    return k;
}

double average_current(const OpenSystem& sys, const CurrentSpec& spec, const std::optional<cmat>& rho) {
    const cvec r = rho ? vec(*rho) : sys.liou.steady_state_vec();
    const cmat j = current_superop(sys.model, spec, 1);
    return trace_of(j * r, sys.model.dimension()).real();
}

double dynamical_activity(const OpenSystem& sys, const CurrentSpec& spec, const std::optional<cmat>& rho) {
    if (spec.kind == CurrentKind::diffusive) return diffusive_activity(sys.model, spec);
    const cvec r = rho ? vec(*rho) : sys.liou.steady_state_vec();
    const cmat j2 = current_superop(sys.model, spec, 2);
    return trace_of(j2 * r, sys.model.dimension()).real();
}

TwoPointFunction two_point_function(const OpenSystem& sys, const CurrentSpec& spec,
                                    const std::vector<double>& tau) {
    const Eigen::Index d = sys.model.dimension();
    const cmat j = current_superop(sys.model, spec, 1);
    const cvec& ss = sys.liou.steady_state_vec();
    const cvec a = (trace_row(d).transpose() * j).transpose();
    const cvec b = j * ss;
    const double jav = trace_of(b, d).real();

    TwoPointFunction out;
    out.delta_weight = dynamical_activity(sys, spec);
    out.tau = tau;
    out.regular.reserve(tau.size());

    detail::Evolver evolve(sys.liou);
    if (evolve.spectral()) {
        const auto& sp = *evolve.spectrum();
        const cvec ax = (a.transpose() * sp.right).transpose();
        const cvec yb = sp.left * b;
        for (double t : tau) {
            if (t < 0) throw Error("two_point_function: tau must be >= 0");
            cplx f = 0.0;
            for (Eigen::Index k = 1; k < sp.size(); ++k) f += std::exp(sp.values(k) * t) * ax(k) * yb(k);
            out.regular.push_back(f.real());
        }
    } else {
        for (double t : tau) {
            if (t < 0) throw Error("two_point_function: tau must be >= 0");
            const cplx f = (a.transpose() * evolve(b, t))(0);
            out.regular.push_back(f.real() - jav * jav);
        }
    }
    return out;
}

NoiseResult noise(const OpenSystem& sys, const CurrentSpec& spec) {
    const Eigen::Index d = sys.model.dimension();
    const cmat j = current_superop(sys.model, spec, 1);
    const cvec& ss = sys.liou.steady_state_vec();
    const cvec b = j * ss;
    NoiseResult out;
    out.J = trace_of(b, d).real();
    out.K = dynamical_activity(sys, spec);
    const cvec z = sys.liou.drazin_apply(b);
    out.D = out.K - 2.0 * trace_of(j * z, d).real();
    if (std::abs(out.J) > 1e-14 * std::max(1.0, out.K)) out.fano = out.D / out.J;
    return out;
}

std::vector<double> power_spectrum(const OpenSystem& sys, const CurrentSpec& spec,
                                   const std::vector<double>& omega) {
    const Eigen::Index d = sys.model.dimension();
    const cmat& l = sys.liou.matrix();
    const cmat j = current_superop(sys.model, spec, 1);
    const cvec b = j * sys.liou.steady_state_vec();
    const double k = dynamical_activity(sys, spec);
    const cvec row = (trace_row(d).transpose() * j * l).transpose();
    const cmat l2 = l * l;

    std::optional<double> d0;
    std::vector<double> out;
    out.reserve(omega.size());
    for (double w : omega) {
        if (w == 0.0) {
            if (!d0) d0 = noise(sys, spec).D;
            out.push_back(*d0);
            continue;
        }
        cmat m = l2;
        m.diagonal().array() += w * w;
        const cvec z = Eigen::PartialPivLU<cmat>(m).solve(b);
        out.push_back(k - 2.0 * (row.transpose() * z)(0).real());
    }
    return out;
}

std::vector<double> noise_transient(const OpenSystem& sys, const CurrentSpec& spec, const cmat& rho0,
                                    const std::vector<double>& t, double tol) {
    namespace odeint = boost::numeric::odeint;
    using state_t = std::vector<cplx>;

    const Eigen::Index d = sys.model.dimension();
    const Eigen::Index n = d * d;
    const cmat& l = sys.liou.matrix();
    const cmat j = current_superop(sys.model, spec, 1);
    const bool jump = spec.kind == CurrentKind::jump;
    const cmat j2 = jump ? current_superop(sys.model, spec, 2) : cmat();
    const double kdiff = jump ? 0.0 : diffusive_activity(sys.model, spec);
    if (rho0.rows() != d) throw DimensionError("noise_transient: initial state dimension mismatch");

    auto rhs = [&](const state_t& x, state_t& dx, double /*t*/) {
        Eigen::Map<const cvec> rho(x.data(), n), sig(x.data() + n, n);
        Eigen::Map<cvec> drho(dx.data(), n), dsig(dx.data() + n, n);
        const cvec jr = j * rho;
        const cplx trj = trace_of(jr, d);
        drho = l * rho;
        dsig = l * sig + jr - rho * trj;
    };

    state_t x(static_cast<std::size_t>(2 * n), cplx(0.0));
    const cvec r0 = vec(rho0);
    for (Eigen::Index i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = r0(i);

    std::vector<double> out;
    out.reserve(t.size());
    auto observe = [&](const state_t& s, double /*time*/) {
        Eigen::Map<const cvec> rho(s.data(), n), sig(s.data() + n, n);
        const double k = jump ? trace_of(j2 * rho, d).real() : kdiff;
        out.push_back(k + 2.0 * trace_of(j * sig, d).real());
    };
    if (t.empty()) return out;
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) throw Error("noise_transient: time grid must be strictly increasing");
    }
    if (t.front() < 0) throw Error("noise_transient: times must be >= 0");

    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<state_t, double, state_t, double>());
    if (t.front() > 0) {
        std::vector<double> grid{0.0};
        grid.insert(grid.end(), t.begin(), t.end());
        bool first = true;
        odeint::integrate_times(stepper, rhs, x, grid.begin(), grid.end(), 1e-3 * (grid[1] - grid[0]),
                                [&](const state_t& s, double time) {
                                    if (first) {
                                        first = false;
                                        return;
                                    }
                                    observe(s, time);
                                });
    } else {
        const double dt0 = t.size() > 1 ? 1e-3 * (t[1] - t[0]) : 1e-3;
        odeint::integrate_times(stepper, rhs, x, t.begin(), t.end(), dt0, observe);
    }
    return out;
}

std::vector<double> g2(const OpenSystem& sys, const std::vector<double>& tau, std::size_t channel) {
    if (channel >= sys.model.channel_count()) throw Error("g2: channel index out of range");
    const Eigen::Index d = sys.model.dimension();
    const cmat jk = jump_superop(sys.model.channels()[channel].op);
    const cvec b = jk * sys.liou.steady_state_vec();
    const double jv = trace_of(b, d).real();
    if (!(jv > 1e-14)) {
        throw DarkChannelError("g2: channel '" + sys.model.channels()[channel].label + "' has no steady-state current");
    }
    const cvec a = (trace_row(d).transpose() * jk).transpose();
    detail::Evolver evolve(sys.liou);
    std::vector<double> out;
    out.reserve(tau.size());
    for (double t : tau) {
        if (t < 0) throw Error("g2: tau must be >= 0");
        out.push_back((a.transpose() * evolve(b, t))(0).real() / (jv * jv));
    }
    return out;
}

std::vector<cplx> g1(const OpenSystem& sys, const std::vector<double>& tau, std::size_t channel, bool normalize) {
    if (channel >= sys.model.channel_count()) throw Error("g1: channel index out of range");
    const cmat& op = sys.model.channels()[channel].op;
    const cmat rho = sys.liou.steady_state();
    const cplx mean = (op * rho).trace();
    const double norm = std::norm(mean);
    const bool do_norm = normalize && norm > 1e-14;
    const cvec b = vec(cmat(op * rho));
    const cvec a = detail::trace_functional(op.adjoint());
    detail::Evolver evolve(sys.liou);
    std::vector<cplx> out;
    out.reserve(tau.size());
    for (double t : tau) {
        if (t < 0) throw Error("g1: tau must be >= 0");
        const cplx v = (a.transpose() * evolve(b, t))(0);
        out.push_back(do_norm ? v / norm : v);
    }
    return out;
}

CrossStatistics cross_statistics(const OpenSystem& sys, const std::vector<CurrentSpec>& specs,
                                 const std::vector<double>& omega, const std::vector<double>& tau) {
    const std::size_t m = specs.size();
    if (m == 0) throw Error("cross_statistics: no currents given");
    const Eigen::Index d = sys.model.dimension();
    const cmat& l = sys.liou.matrix();
    const cvec& ss = sys.liou.steady_state_vec();

    std::vector<cmat> sup(m);
    std::vector<cvec> a(m), b(m), qb(m);
    CrossStatistics out;
    out.J.resize(m);
    out.delta_weight = rmat::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    const auto kind = specs.front().kind;
    for (std::size_t i = 0; i < m; ++i) {
        if (specs[i].kind != kind) throw Error("cross_statistics: mixed jump and diffusive currents");
        sup[i] = current_superop(sys.model, specs[i], 1);
        a[i] = (trace_row(d).transpose() * sup[i]).transpose();
        b[i] = sup[i] * ss;
        out.J[i] = trace_of(b[i], d).real();
        qb[i] = b[i] - ss * trace_of(b[i], d);
    }
    // K_ab: shared white noise / simultaneous clicks.
    for (std::size_t p = 0; p < m; ++p) {
        const auto wp = detail::expand_weights(sys.model, specs[p]);
        for (std::size_t q = 0; q < m; ++q) {
            const auto wq = detail::expand_weights(sys.model, specs[q]);
            double k = 0.0;
            const auto& ex = sys.model.expanded_channels();
            for (std::size_t c = 0; c < ex.size(); ++c) {
                const double ww = wp.nu[c] * wq.nu[c];
                if (ww == 0.0) continue;
                if (kind == CurrentKind::jump) {
                    k += ww * trace_of(jump_superop(ex[c].op) * ss, d).real();
                } else {
                    k += ww;
                }
            }
            out.delta_weight(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = k;
        }
    }

    const auto mi = static_cast<Eigen::Index>(m);
    std::vector<cvec> zd(m);
    for (std::size_t q = 0; q < m; ++q) zd[q] = sys.liou.drazin_apply(b[q]);
    out.D = rmat::Zero(mi, mi);
    for (std::size_t p = 0; p < m; ++p) {
        for (std::size_t q = 0; q < m; ++q) {
            const double v = out.delta_weight(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) -
                             (a[p].transpose() * zd[q])(0).real() - (a[q].transpose() * zd[p])(0).real();
            out.D(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = v;
        }
    }

    out.omega = omega;
    for (double w : omega) {
        cmat s(mi, mi);
        if (w == 0.0) {
            s = out.D.cast<cplx>();
        } else {
            cmat lp = l, lm = l;
            lp.diagonal().array() += I * w;
            lm.diagonal().array() -= I * w;
            Eigen::PartialPivLU<cmat> fp(lp), fm(lm);
            std::vector<cvec> zp(m), zm(m);
            for (std::size_t q = 0; q < m; ++q) {
                zp[q] = fp.solve(qb[q]);
                zm[q] = fm.solve(qb[q]);
            }
            for (std::size_t p = 0; p < m; ++p) {
                for (std::size_t q = 0; q < m; ++q) {
                    s(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) =
                        out.delta_weight(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) -
                        (a[p].transpose() * zp[q])(0) - (a[q].transpose() * zm[p])(0);
                }
            }
        }
        rmat coh(mi, mi);
        for (Eigen::Index p = 0; p < mi; ++p) {
            for (Eigen::Index q = 0; q < mi; ++q) {
                coh(p, q) = std::norm(s(p, q)) / (s(p, p).real() * s(q, q).real());
            }
        }
        out.S.push_back(std::move(s));
        out.coherence.push_back(std::move(coh));
    }
    out.tau = tau;
    if (!tau.empty()) {
        detail::Evolver evolve(sys.liou);
        for (double t : tau) {
            if (t < 0) throw Error("cross_statistics: tau must be >= 0");
            rmat f(mi, mi);
            for (std::size_t q = 0; q < m; ++q) {
                const cvec e = evolve(b[q], t);
                for (std::size_t p = 0; p < m; ++p) {
                    f(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) =
                        (a[p].transpose() * e)(0).real() - out.J[p] * out.J[q];
                }
            }
            out.F.push_back(std::move(f));
        }
    }
    return out;
}

rmat compose_diffusion_matrix(const rmat& elementary, const rmat& weights) {
    if (weights.cols() != elementary.rows()) throw DimensionError("compose_diffusion_matrix: shape mismatch");
    return weights * elementary * weights.transpose();
}

cplx multi_time_correlation(const OpenSystem& sys, const std::vector<CurrentSpec>& currents,
                            const std::vector<double>& times, const cmat& rho0) {
    if (currents.size() != times.size() || currents.empty()) {
        throw Error("multi_time_correlation: need one time per current");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0) throw Error("multi_time_correlation: times must be >= 0");
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw Error(
                "multi_time_correlation: times must be strictly increasing; coincident times carry the "
                "delta(tau) contact term reported by two_point_function");
        }
    }
    const Eigen::Index d = sys.model.dimension();
    detail::Evolver evolve(sys.liou);
    cvec v = vec(rho0);
    double prev = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        v = evolve(v, times[i] - prev);
        v = current_superop(sys.model, currents[i], 1) * v;
        prev = times[i];
    }
    return trace_of(v, d);
}

}  // namespace qc
