#include "qcurrents/wtd.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "detail.hpp"

namespace qc {

struct NoJumpGenerator::Cache {
    std::once_flag lu_once;
    Eigen::PartialPivLU<cmat> lu;
    bool invertible = false;
    std::once_flag prop_once;
    std::optional<Propagator> prop;
    std::once_flag eig_once;
    cvec values;
};

NoJumpGenerator::NoJumpGenerator(const LindbladModel& model, std::vector<std::size_t> monitored)
    : model_(model), monitored_(std::move(monitored)), cache_(std::make_shared<Cache>()) {
    const auto& ex = model_.expanded_channels();
    const auto& org = model_.origin();
    if (monitored_.empty()) {
        for (std::size_t c = 0; c < model_.channel_count(); ++c) {
            if (model_.channels()[c].monitored) monitored_.push_back(c);
        }
    }
    for (std::size_t c : monitored_) {
        if (c >= model_.channel_count()) throw DimensionError("monitored channel index out of range");
        if (!model_.channels()[c].monitored) throw Error("channel '" + model_.channels()[c].label + "' is not monitored");
    }
    if (monitored_.empty()) throw Error("no monitored channels");
    const Eigen::Index n = model_.dimension() * model_.dimension();
    l0_ = Liouvillian(model_).matrix();
    jumps_.assign(monitored_.size(), cmat::Zero(n, n));
    for (std::size_t k = 0; k < ex.size(); ++k) {
        if (!ex[k].monitored) continue;
        const auto it = std::find(monitored_.begin(), monitored_.end(), org[k]);
        if (it == monitored_.end()) continue;
        const cmat j = jump_superop(ex[k].op);
        jumps_[static_cast<std::size_t>(it - monitored_.begin())] += j;
        l0_ -= j;
    }
}

cmat NoJumpGenerator::total_jump() const {
    cmat s = cmat::Zero(l0_.rows(), l0_.cols());
    for (const auto& j : jumps_) s += j;
    return s;
}

bool NoJumpGenerator::invertible() const {
    std::call_once(cache_->lu_once, [this] {
        cache_->lu.compute(l0_);
        const cvec& v = [this]() -> const cvec& {
            std::call_once(cache_->eig_once, [this] {
                Eigen::ComplexEigenSolver<cmat> es(l0_, false);
                cache_->values = es.eigenvalues();
            });
            return cache_->values;
        }();
        const double mx = v.cwiseAbs().maxCoeff();
        const double mn = v.cwiseAbs().minCoeff();
        cache_->invertible = mn > 1e-10 * std::max(mx, 1e-300);
    });
    return cache_->invertible;
}

cvec NoJumpGenerator::solve(const cvec& v) const {
    if (!invertible()) throw SingularMatrixError("no-jump generator is singular: the system has a dark state");
    return cache_->lu.solve(v);
}

cvec NoJumpGenerator::evolve(const cvec& v, double t) const {
    std::call_once(cache_->prop_once, [this] { cache_->prop.emplace(l0_); });
    return cache_->prop->apply(v, t);
}

double NoJumpGenerator::slowest_rate() const {
    std::call_once(cache_->eig_once, [this] {
        Eigen::ComplexEigenSolver<cmat> es(l0_, false);
        cache_->values = es.eigenvalues();
    });
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < cache_->values.size(); ++j) best = std::max(best, cache_->values(j).real());
    return best;
}

std::vector<double> default_wtd_grid(const NoJumpGenerator& gen, std::size_t points) {
    if (points < 2) throw Error("grid needs at least two points");
    const OpenSystem sys(gen.model());
    const double k = cplx(trace_row(gen.model().dimension()).transpose() * (gen.total_jump() * sys.liou.steady_state_vec())).real();
    const double slow = std::abs(gen.slowest_rate());
    if (!(k > 0.0)) throw DarkChannelError("monitored channels have zero steady-state activity");
    const double lo = 1e-3 / k;
    const double hi = slow > 1e-14 ? 30.0 / slow : 30.0 / k;
    std::vector<double> t(points);
    for (std::size_t i = 0; i < points; ++i) {
        t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(points - 1));
    }
    return t;
}

namespace {

double dark_mass(const NoJumpGenerator& gen, const cvec& v) {
    if (gen.invertible()) return 0.0;
    const auto sp = eig(gen.matrix());
    const double scale = sp.values.cwiseAbs().maxCoeff();
    cvec acc = cvec::Zero(v.size());
    for (Eigen::Index j = 0; j < sp.size(); ++j) {
        if (std::abs(sp.values(j)) <= 1e-10 * scale) acc += sp.right.col(j) * cplx(sp.left.row(j) * v);
    }
    return trace_of(acc, gen.model().dimension()).real();
}

WaitingTimes waiting_from(const NoJumpGenerator& gen, const cvec& seed, const std::vector<double>& t_grid) {
    const Eigen::Index d = gen.model().dimension();
    const std::size_t m = gen.monitored().size();
    WaitingTimes out;
    out.t = t_grid;
    out.w.assign(m, {});
    std::vector<cvec> rows(m);
    for (std::size_t k = 0; k < m; ++k) rows[k] = (trace_row(d).transpose() * gen.jump(k)).transpose();
    for (double t : t_grid) {
        const cvec v = gen.evolve(seed, t);
        for (std::size_t k = 0; k < m; ++k) out.w[k].push_back(cplx(rows[k].transpose() * v).real());
    }
    out.total.resize(m);
    if (gen.invertible()) {
        const cvec x = gen.solve(seed);
        for (std::size_t k = 0; k < m; ++k) out.total[k] = -cplx(rows[k].transpose() * x).real();
    } else {
        for (std::size_t k = 0; k < m; ++k) out.total[k] = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

cvec checked_state(const NoJumpGenerator& gen, const cmat& rho0) {
    const Eigen::Index d = gen.model().dimension();
    if (rho0.rows() != d || rho0.cols() != d) throw DimensionError("initial state does not match the model dimension");
    validate_density_matrix(rho0, 1e-8);
    return vec(rho0);
}

cvec post_jump_state(const NoJumpGenerator& gen, std::size_t q) {
    if (q >= gen.monitored().size()) throw DimensionError("channel index outside the monitored list");
    const OpenSystem sys(gen.model());
    const cvec v = gen.jump(q) * sys.liou.steady_state_vec();
    const double n = trace_of(v, gen.model().dimension()).real();
    if (!(n > 1e-14)) throw DarkChannelError("channel has zero steady-state jump rate");
    return v / n;
}

}  // namespace

Survival survival(const NoJumpGenerator& gen, const cmat& rho0, const std::vector<double>& t_grid) {
    const cvec v = checked_state(gen, rho0);
    const Eigen::Index d = gen.model().dimension();
    Survival out;
    out.t = t_grid;
    for (double t : t_grid) out.p_no.push_back(trace_of(gen.evolve(v, t), d).real());
    out.p_infinity = dark_mass(gen, v);
    return out;
}

WaitingTimes wtd_first(const NoJumpGenerator& gen, const cmat& rho0, const std::vector<double>& t_grid) {
    return waiting_from(gen, checked_state(gen, rho0), t_grid);
}

WaitingTimes wtd_between(const NoJumpGenerator& gen, std::size_t q, const std::vector<double>& t_grid) {
    return waiting_from(gen, post_jump_state(gen, q), t_grid);
}

rmat jump_transition_matrix(const NoJumpGenerator& gen) {
    const std::size_t m = gen.monitored().size();
    const Eigen::Index d = gen.model().dimension();
    rmat out = rmat::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t q = 0; q < m; ++q) {
        cvec seed;
        try {
            seed = post_jump_state(gen, q);
        } catch (const DarkChannelError&) {
            continue;
        }
        const cvec x = gen.solve(seed);
        for (std::size_t k = 0; k < m; ++k) {
            out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(q)) = -trace_of(gen.jump(k) * x, d).real();
        }
    }
    return out;
}

WaitingMoments wtd_moments(const NoJumpGenerator& gen, const cmat& rho0, int order) {
    if (order < 1) throw Error("moment order must be positive");
    const cvec v = checked_state(gen, rho0);
    const Eigen::Index d = gen.model().dimension();
    const std::size_t m = gen.monitored().size();
    // powers[n] = L0^{-n} rho0
    std::vector<cvec> powers{v};
    for (int n = 1; n <= order + 1; ++n) powers.push_back(gen.solve(powers.back()));
    WaitingMoments out;
    double fact = 1.0;
    for (int n = 1; n <= order; ++n) {
        fact *= n;
        const double sign = n % 2 == 0 ? 1.0 : -1.0;
        out.moment.push_back(sign * fact * trace_of(powers[static_cast<std::size_t>(n)], d).real());
    }
    out.conditional.assign(m, {});
    out.channel_probability.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double wk = -trace_of(gen.jump(k) * powers[1], d).real();
        out.channel_probability[k] = wk;
        double f = 1.0;
        for (int n = 1; n <= order; ++n) {
            f *= n;
            const double sign = (n + 1) % 2 == 0 ? 1.0 : -1.0;
            const double num = sign * f * trace_of(gen.jump(k) * powers[static_cast<std::size_t>(n + 1)], d).real();
            out.conditional[k].push_back(wk > 0.0 ? num / wk : std::numeric_limits<double>::quiet_NaN());
        }
    }
    return out;
}

JumpSteadyState jump_steady_state(const NoJumpGenerator& gen) {
    const OpenSystem sys(gen.model());
    const Eigen::Index d = gen.model().dimension();
    const cvec& ss = sys.liou.steady_state_vec();
    const cmat jt = gen.total_jump();
    const cvec jr = jt * ss;
    JumpSteadyState out;
    out.activity = trace_of(jr, d).real();
    if (!(out.activity > 1e-14)) throw DarkChannelError("monitored channels have zero steady-state activity");
    const cvec pi = jr / out.activity;
    out.pi = hermitize_normalize(unvec(pi, d));
    for (std::size_t k = 0; k < gen.monitored().size(); ++k) {
        out.probability.push_back(trace_of(gen.jump(k) * ss, d).real() / out.activity);
    }
    if (gen.invertible()) out.fixed_point_residual = (-(jt * gen.solve(pi)) - pi).cwiseAbs().maxCoeff();
    return out;
}

cvec jump_map_spectrum(const NoJumpGenerator& gen) {
    const cmat l0inv_cols = [&] {
        const Eigen::Index n = gen.matrix().rows();
        cmat out(n, n);
        for (Eigen::Index j = 0; j < n; ++j) out.col(j) = gen.solve(cvec::Unit(n, j));
        return out;
    }();
    Eigen::ComplexEigenSolver<cmat> es(-gen.total_jump() * l0inv_cols, false);
    cvec v = es.eigenvalues();
    std::sort(v.data(), v.data() + v.size(), [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
    return v;
}

RenewalReport renewal_check(const NoJumpGenerator& gen, double sv_tol) {
    RenewalReport out;
    for (std::size_t k = 0; k < gen.monitored().size(); ++k) {
        Eigen::JacobiSVD<cmat> svd(gen.jump(k));
        const auto& s = svd.singularValues();
        Eigen::Index rank = 0;
        for (Eigen::Index j = 0; j < s.size(); ++j) {
            if (s(j) > sv_tol * std::max(1.0, s(0))) ++rank;
        }
        out.is_renewal.push_back(rank == 1);
    }
    out.applicable = out.is_renewal.size() == 1 && out.is_renewal[0];
    if (!out.applicable) return out;
    const JumpSteadyState js = jump_steady_state(gen);
    const auto mom = wtd_moments(gen, js.pi, 2);
    const double mu = mom.moment[0];
    const double var = mom.moment[1] - mu * mu;
    out.wtd_noise = var / (mu * mu * mu);
    const OpenSystem sys(gen.model());
    const CurrentSpec spec = CurrentSpec::channel(gen.model().channel_count(), gen.monitored()[0]);
    out.noise = noise(sys, spec).D;
    out.residual = std::abs(out.noise - out.wtd_noise);
    return out;
}

}  // namespace qc
