#include "qcurrents/fcs.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <Eigen/Eigenvalues>

#include "detail.hpp"

namespace qc {

struct TiltedLiouvillian::Cache {
    std::once_flag once;
    Eigen::ColPivHouseholderQR<cmat> qr;
    cvec ss;
};

TiltedLiouvillian::TiltedLiouvillian(TiltKind kind, cmat base, std::vector<Term> terms, std::vector<cmat> drift,
                                     rmat white, cvec trace, Eigen::Index hilbert_dim)
    : kind_(kind),
      base_(std::move(base)),
      terms_(std::move(terms)),
      drift_(std::move(drift)),
      white_(std::move(white)),
      trace_(std::move(trace)),
      d_(hilbert_dim),
      cache_(std::make_shared<Cache>()) {
    fields_ = std::max<std::size_t>(drift_.size(), terms_.empty() ? 0 : static_cast<std::size_t>(terms_[0].nu.size()));
    if (fields_ == 0) fields_ = 1;
    if (base_.rows() != base_.cols() || trace_.size() != base_.rows()) {
        throw DimensionError("tilted generator and trace functional sizes disagree");
    }
    for (const auto& t : terms_) {
        if (t.op.rows() != base_.rows() || static_cast<std::size_t>(t.nu.size()) != fields_) {
            throw DimensionError("tilted generator term has the wrong shape");
        }
    }
    if (!drift_.empty() && (white_.rows() != static_cast<Eigen::Index>(fields_) || white_.cols() != white_.rows())) {
        throw DimensionError("white-noise matrix does not match the number of counting fields");
    }
}

cmat TiltedLiouvillian::evaluate(cplx chi) const {
    std::vector<cplx> c(fields_, 0.0);
    c[0] = chi;
    return evaluate(c);
}

cmat TiltedLiouvillian::evaluate(const std::vector<cplx>& chi) const {
    if (chi.size() != fields_) throw DimensionError("counting field has the wrong number of components");
    cmat out = base_;
    for (const auto& t : terms_) {
        cplx phase = 0.0;
        for (std::size_t a = 0; a < fields_; ++a) phase += chi[a] * t.nu(static_cast<Eigen::Index>(a));
        out += std::exp(I * phase) * t.op;
    }
    if (!drift_.empty()) {
        cplx quad = 0.0;
        for (std::size_t a = 0; a < fields_; ++a) {
            out += I * chi[a] * drift_[a];
            for (std::size_t b = 0; b < fields_; ++b) {
                quad += chi[a] * chi[b] * white_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            }
        }
        out.diagonal().array() -= 0.5 * quad;
    }
    return out;
}

cmat TiltedLiouvillian::derivative_s(int m) const {
    if (m < 0) throw Error("derivative order must be non-negative");
    if (m == 0) return evaluate(cplx(0.0));
    cmat out = cmat::Zero(size(), size());
    for (const auto& t : terms_) {
        const double nu = t.nu(0);
        if (nu != 0.0) out += std::pow(nu, m) * t.op;
    }
    if (!drift_.empty()) {
        if (m == 1) out += drift_[0];
        if (m == 2) out.diagonal().array() += white_(0, 0);
    }
    return out;
}

const cvec& TiltedLiouvillian::steady_state() const {
    std::call_once(cache_->once, [this] {
        const cmat l0 = evaluate(cplx(0.0));
        const Eigen::Index n = l0.rows();
        cmat aug(n + 1, n);
        aug.topRows(n) = l0;
        aug.row(n) = trace_.transpose();
        cache_->qr.setThreshold(1e-10);
        cache_->qr.compute(aug);
        if (cache_->qr.rank() < n) {
            throw MultipleSteadyStatesError("tilted generator at chi = 0 has a degenerate steady state");
        }
        cvec rhs = cvec::Zero(n + 1);
        rhs(n) = 1.0;
        cache_->ss = cache_->qr.solve(rhs);
        const cplx tr = trace_.transpose() * cache_->ss;
        cache_->ss /= tr;
    });
    return cache_->ss;
}

cvec TiltedLiouvillian::drazin_apply(const cvec& v) const {
    const cvec& ss = steady_state();
    const Eigen::Index n = size();
    const cplx tr = trace_.transpose() * v;
    cvec rhs = cvec::Zero(n + 1);
    rhs.head(n) = v - tr * ss;
    return cache_->qr.solve(rhs);
}

TiltedLiouvillian TiltedLiouvillian::without_white_noise() const {
    return TiltedLiouvillian(kind_, base_, terms_, drift_, rmat::Zero(white_.rows(), white_.cols()), trace_, d_);
}

std::optional<double> TiltedLiouvillian::charge_quantum(double tol) const {
    if (!drift_.empty()) return std::nullopt;
    double q = 0.0;
    for (const auto& t : terms_) {
        const double a = std::abs(t.nu(0));
        if (a > 0.0 && (q == 0.0 || a < q)) q = a;
    }
    if (q == 0.0) return 1.0;
    for (const auto& t : terms_) {
        const double r = std::abs(t.nu(0)) / q;
        if (std::abs(r - std::round(r)) > tol * std::max(1.0, r)) return std::nullopt;
    }
    return q;
}

namespace {

struct ExpandedSpecs {
    std::vector<std::vector<double>> nu;   // [field][expanded channel]
    std::vector<std::vector<double>> phi;
};

ExpandedSpecs expand_all(const LindbladModel& model, const std::vector<CurrentSpec>& specs, CurrentKind kind) {
    if (specs.empty()) throw Error("at least one current is required");
    ExpandedSpecs out;
    for (const auto& s : specs) {
        if (s.kind != kind) throw Error("all currents of a tilted generator must share the same kind");
        auto w = detail::expand_weights(model, s);
        out.nu.push_back(std::move(w.nu));
        out.phi.push_back(std::move(w.phi));
    }
    return out;
}

}  // namespace

TiltedLiouvillian tilted_jump(const LindbladModel& model, const CurrentSpec& spec) {
    return tilted_jump(model, std::vector<CurrentSpec>{spec});
}

TiltedLiouvillian tilted_jump(const LindbladModel& model, const std::vector<CurrentSpec>& specs) {
    const auto w = expand_all(model, specs, CurrentKind::jump);
    const auto& ex = model.expanded_channels();
    const Eigen::Index d = model.dimension();
    cmat base = Liouvillian(model).matrix();
    std::vector<TiltedLiouvillian::Term> terms;
    for (std::size_t k = 0; k < ex.size(); ++k) {
        rvec nu(static_cast<Eigen::Index>(specs.size()));
        bool any = false;
        for (std::size_t a = 0; a < specs.size(); ++a) {
            nu(static_cast<Eigen::Index>(a)) = w.nu[a][k];
            any = any || w.nu[a][k] != 0.0;
        }
        if (!any) continue;
        cmat op = jump_superop(ex[k].op);
        base -= op;
        terms.push_back({std::move(op), std::move(nu)});
    }
    return TiltedLiouvillian(TiltKind::jump, std::move(base), std::move(terms), {}, rmat(), trace_row(d), d);
}

TiltedLiouvillian tilted_diffusive(const LindbladModel& model, const CurrentSpec& spec) {
    return tilted_diffusive(model, std::vector<CurrentSpec>{spec});
}

TiltedLiouvillian tilted_diffusive(const LindbladModel& model, const std::vector<CurrentSpec>& specs) {
    const auto w = expand_all(model, specs, CurrentKind::diffusive);
    const Eigen::Index d = model.dimension();
    const auto f = static_cast<Eigen::Index>(specs.size());
    std::vector<cmat> drift;
    rmat white = rmat::Zero(f, f);
    for (Eigen::Index a = 0; a < f; ++a) {
        drift.push_back(current_superop(model, specs[static_cast<std::size_t>(a)], 1));
        for (Eigen::Index b = 0; b < f; ++b) {
            double s = 0.0;
            for (std::size_t k = 0; k < w.nu[0].size(); ++k) {
                s += w.nu[static_cast<std::size_t>(a)][k] * w.nu[static_cast<std::size_t>(b)][k];
            }
            white(a, b) = s;
        }
    }
    return TiltedLiouvillian(TiltKind::diffusive, Liouvillian(model).matrix(), {}, std::move(drift),
                             std::move(white), trace_row(d), d);
}

TiltedLiouvillian tilted_classical(const rmat& rates, const rmat& weights) {
    const Eigen::Index n = rates.rows();
    if (rates.cols() != n || weights.rows() != n || weights.cols() != n) {
        throw DimensionError("classical rate and weight matrices must be square and of equal size");
    }
    cmat base = cmat::Zero(n, n);
    std::vector<TiltedLiouvillian::Term> terms;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == j) continue;
            const double r = rates(i, j);
            if (r < 0.0 || !std::isfinite(r)) throw Error("classical rates must be finite and non-negative");
            if (r == 0.0) continue;
            base(j, j) -= r;
            if (weights(i, j) == 0.0) {
                base(i, j) += r;
            } else {
                cmat op = cmat::Zero(n, n);
                op(i, j) = r;
                rvec nu(1);
                nu(0) = weights(i, j);
                terms.push_back({std::move(op), std::move(nu)});
            }
        }
    }
    return TiltedLiouvillian(TiltKind::classical, std::move(base), std::move(terms), {}, rmat(), cvec::Ones(n), 0);
}

double ChargeDistribution::normalization() const {
    double s = 0.0;
    for (double v : p) s += v;
    return lattice ? s : s * quantum;
}

double ChargeDistribution::mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += n[i] * p[i];
    return (lattice ? s : s * quantum) / normalization();
}

double ChargeDistribution::variance() const {
    const double m = mean();
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (n[i] - m) * (n[i] - m) * p[i];
    return (lattice ? s : s * quantum) / normalization();
}

double ChargeDistribution::at(double charge) const {
    if (n.empty()) return 0.0;
    const double idx = (charge - n.front()) / quantum;
    const double r = std::round(idx);
    if (std::abs(idx - r) > 1e-6 || r < 0 || r >= static_cast<double>(n.size())) return 0.0;
    return p[static_cast<std::size_t>(r)];
}

namespace {

cplx generating_function(const TiltedLiouvillian& tilted, cplx chi, const cvec& v0, double t) {
    return tilted.trace().transpose() * expm_action(tilted.evaluate(chi), v0, t);
}

void finalize(ChargeDistribution& out) {
    out.min_value = *std::min_element(out.p.begin(), out.p.end());
    out.negative_excursion = out.min_value < -1e-6 * std::max(1.0, *std::max_element(out.p.begin(), out.p.end()));
}

}  // namespace

ChargeDistribution charge_distribution(const TiltedLiouvillian& tilted, const cmat& rho0, double t,
                                       const DistributionOptions& opts) {
    if (tilted.kind() == TiltKind::classical) {
        if (rho0.cols() != 1) throw DimensionError("classical generators take a population vector");
        return charge_distribution(tilted, cvec(rho0.col(0)), t, opts);
    }
    if (rho0.rows() != tilted.hilbert_dim() || rho0.cols() != tilted.hilbert_dim()) {
        throw DimensionError("initial state does not match the model dimension");
    }
    validate_density_matrix(rho0, 1e-8);
    return charge_distribution(tilted, vec(rho0), t, opts);
}

ChargeDistribution charge_distribution(const TiltedLiouvillian& tilted, const cvec& state0, double t,
                                       const DistributionOptions& opts) {
    if (state0.size() != tilted.size()) throw DimensionError("initial state does not match the generator size");
    if (t < 0.0) throw Error("counting time must be non-negative");
    if (opts.points < 4) throw Error("at least four counting-field points are required");
    if (tilted.fields() != 1) throw Error("charge_distribution counts a single current");
    const TiltedLiouvillian gen = opts.coherent_limit ? tilted.without_white_noise() : tilted;
    const auto m = static_cast<long>(opts.points);

    std::optional<double> q = opts.quantum ? opts.quantum : gen.charge_quantum();
    const bool real_grid = opts.force_real_grid || tilted.kind() == TiltKind::diffusive;
    ChargeDistribution out;
    out.t = t;

    if (!real_grid) {
        if (!q) {
            throw CommensurabilityError(
                "current weights are not commensurate; use a real-valued grid for this current");
        }
        out.lattice = true;
        out.quantum = *q;
        if (t == 0.0) {
            const double mass = cplx(gen.trace().transpose() * state0).real();
            for (long k = -m / 2; k < m / 2; ++k) {
                out.n.push_back(static_cast<double>(k) * *q);
                out.p.push_back(k == 0 ? mass : 0.0);
            }
            finalize(out);
            return out;
        }
        std::vector<cplx> z(static_cast<std::size_t>(m));
        std::vector<double> theta(static_cast<std::size_t>(m));
        for (long j = 0; j < m; ++j) {
            theta[static_cast<std::size_t>(j)] = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
            z[static_cast<std::size_t>(j)] = generating_function(gen, theta[static_cast<std::size_t>(j)] / *q, state0, t);
        }
        for (long k = -m / 2; k < m / 2; ++k) {
            cplx s = 0.0;
            for (long j = 0; j < m; ++j) {
                s += z[static_cast<std::size_t>(j)] * std::exp(-I * static_cast<double>(k) * theta[static_cast<std::size_t>(j)]);
            }
            out.n.push_back(static_cast<double>(k) * *q);
            out.p.push_back(s.real() / static_cast<double>(m));
        }
        finalize(out);
        return out;
    }

    // Real-valued charge: trapezoid in chi over a window set by the spread.
    const auto c = cumulants_recursive(gen, 2);
    const double sigma = std::sqrt(std::max(c[1] * t, 1e-12));
    const double centre = c[0] * t;
    const double x = opts.chi_window ? *opts.chi_window : opts.window_sigmas / sigma;
    const double dchi = 2.0 * x / static_cast<double>(m - 1);
    const double span = (opts.window_sigmas + 4.0) * sigma;
    const double dn = 2.0 * span / static_cast<double>(m - 1);
    std::vector<cplx> z(static_cast<std::size_t>(m));
    std::vector<double> chi(static_cast<std::size_t>(m));
    for (long j = 0; j < m; ++j) {
        chi[static_cast<std::size_t>(j)] = -x + dchi * static_cast<double>(j);
        const double w = (j == 0 || j == m - 1) ? 0.5 : 1.0;
        z[static_cast<std::size_t>(j)] = w * generating_function(gen, chi[static_cast<std::size_t>(j)], state0, t);
    }
    out.lattice = false;
    out.quantum = dn;
    for (long k = 0; k < m; ++k) {
        const double nk = centre - span + dn * static_cast<double>(k);
        cplx s = 0.0;
        for (long j = 0; j < m; ++j) s += z[static_cast<std::size_t>(j)] * std::exp(-I * chi[static_cast<std::size_t>(j)] * nk);
        out.n.push_back(nk);
        out.p.push_back(s.real() * dchi / (2.0 * std::numbers::pi));
    }
    finalize(out);
    return out;
}

namespace {

struct Tracked {
    cplx value;
    cvec vector;
};

Tracked leading_at_zero(const TiltedLiouvillian& tilted) {
    const cvec ss = tilted.steady_state();
    return {0.0, ss / ss.norm()};
}

// Follow one eigenvalue from chi_a to chi_b by eigenvector overlap, halving steps when ambiguous.
Tracked track(const TiltedLiouvillian& tilted, Tracked cur, cplx a, cplx b) {
    const double max_stride = 0.05;
    const double len = std::abs(b - a);
    if (len == 0.0) return cur;
    double s = 0.0;
    double h = std::min(1.0, max_stride / len);
    Eigen::ComplexEigenSolver<cmat> solver;
    while (s < 1.0) {
        const double step = std::min(h, 1.0 - s);
        const cplx chi = a + (s + step) * (b - a);
        solver.compute(tilted.evaluate(chi));
        if (solver.info() != Eigen::Success) throw ContinuationError("eigensolver failed", chi.real());
        const auto& vals = solver.eigenvalues();
        const auto& vecs = solver.eigenvectors();
        double best = -1.0, second = -1.0;
        Eigen::Index bi = 0;
        for (Eigen::Index j = 0; j < vals.size(); ++j) {
            const double ov = std::abs(cur.vector.dot(vecs.col(j))) / vecs.col(j).norm();
            if (ov > best) {
                second = best;
                best = ov;
                bi = j;
            } else if (ov > second) {
                second = ov;
            }
        }
        if (best < 0.5 || best - second < 0.05) {
            h = step / 2.0;
            if (h * len < 1e-9) {
                std::ostringstream msg;
                msg << "leading eigenvalue could not be tracked through chi = " << chi;
                throw ContinuationError(msg.str(), chi.real());
            }
            continue;
        }
        cvec v = vecs.col(bi);
        v /= v.norm();
        cur = {vals(bi), v};
        s += step;
        h = std::min(1.0, std::min(2.0 * step, max_stride / len));
    }
    return cur;
}

}  // namespace

std::vector<cplx> scgf(const TiltedLiouvillian& tilted, const std::vector<cplx>& chi) {
    std::vector<cplx> out;
    out.reserve(chi.size());
    Tracked cur = leading_at_zero(tilted);
    cplx at = 0.0;
    for (cplx c : chi) {
        cur = track(tilted, cur, at, c);
        at = c;
        out.push_back(cur.value);
    }
    return out;
}

std::vector<cplx> scgf(const TiltedLiouvillian& tilted, const std::vector<double>& chi) {
    return scgf(tilted, std::vector<cplx>(chi.begin(), chi.end()));
}

cplx scgf_at(const TiltedLiouvillian& tilted, cplx chi) { return scgf(tilted, std::vector<cplx>{chi}).front(); }

std::function<double(double)> scgf_real_tilt(const TiltedLiouvillian& tilted) {
    return [tilted](double k) {
        Eigen::ComplexEigenSolver<cmat> solver(tilted.evaluate(cplx(0.0, -k)), false);
        const auto& v = solver.eigenvalues();
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < v.size(); ++j) best = std::max(best, v(j).real());
        return best;
    };
}

std::vector<double> cumulants_recursive(const TiltedLiouvillian& tilted, int order) {
    if (order < 1 || order > 8) throw Error("cumulant order must be between 1 and 8");
    const cvec& tr = tilted.trace();
    std::vector<cmat> lder(static_cast<std::size_t>(order) + 1);
    for (int m = 1; m <= order; ++m) lder[static_cast<std::size_t>(m)] = tilted.derivative_s(m);
    auto binom = [](int n, int k) {
        double r = 1.0;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    };
    std::vector<cvec> rho{tilted.steady_state()};
    std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
    for (int n = 1; n <= order; ++n) {
        cplx cn = 0.0;
        for (int m = 1; m <= n; ++m) {
            cn += binom(n, m) * cplx(tr.transpose() * (lder[static_cast<std::size_t>(m)] * rho[static_cast<std::size_t>(n - m)]));
        }
        c[static_cast<std::size_t>(n)] = cn.real();
        if (n == order) break;
        cvec src = cvec::Zero(tilted.size());
        for (int m = 1; m <= n; ++m) {
            const auto& r = rho[static_cast<std::size_t>(n - m)];
            src += binom(n, m) * (c[static_cast<std::size_t>(m)] * r - lder[static_cast<std::size_t>(m)] * r);
        }
        rho.push_back(tilted.drazin_apply(src));
    }
    return {c.begin() + 1, c.end()};
}

SaddlePoint saddle_point(const std::function<double(double)>& phi, double n, double t,
                         const SaddlePointOptions& opts) {
    if (t <= 0.0) throw Error("saddle point needs a positive time");
    const double h = opts.fd_step;
    auto d1 = [&](double k) { return (phi(k + h) - phi(k - h)) / (2.0 * h); };
    auto d2 = [&](double k) { return (phi(k + h) - 2.0 * phi(k) + phi(k - h)) / (h * h); };
    const double target = n / t;
    auto f = [&](double k) { return d1(k) - target; };
    double lo = -opts.bracket, hi = opts.bracket;
    double flo = f(lo), fhi = f(hi);
    for (int i = 0; i < 4 && flo * fhi > 0.0; ++i) {
        lo *= 2.0;
        hi *= 2.0;
        flo = f(lo);
        fhi = f(hi);
    }
    if (!(flo * fhi <= 0.0) || !std::isfinite(flo) || !std::isfinite(fhi)) {
        std::ostringstream msg;
        msg << "no saddle point for n/t = " << target << " within k in [" << lo << ", " << hi << "]";
        throw RootFindingError(msg.str());
    }
    std::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(50);
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    const double k = 0.5 * (r.first + r.second);
    SaddlePoint out;
    out.k = k;
    out.curvature = d2(k);
    if (!(out.curvature > 0.0)) throw RootFindingError("saddle point curvature is not positive");
    out.probability = std::exp(-n * k + phi(k) * t) / std::sqrt(2.0 * std::numbers::pi * out.curvature * t);
    return out;
}

std::vector<double> long_time_distribution(const TiltedLiouvillian& tilted, const std::vector<double>& n,
                                           double t, std::size_t panels) {
    using rule = boost::math::quadrature::gauss<double, 20>;
    const double q = tilted.charge_quantum().value_or(1.0);
    const double a = -std::numbers::pi / q;
    const double width = 2.0 * std::numbers::pi / q / static_cast<double>(panels);
    std::vector<double> nodes, weights;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + width * (static_cast<double>(p) + 0.5);
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0.0) {
                pts.emplace_back(mid, w[i]);
            } else {
                pts.emplace_back(mid - 0.5 * width * x[i], w[i]);
                pts.emplace_back(mid + 0.5 * width * x[i], w[i]);
            }
        }
        std::sort(pts.begin(), pts.end());
        for (auto& [xx, ww] : pts) {
            nodes.push_back(xx);
            weights.push_back(0.5 * width * ww);
        }
    }
    // Continue outward from chi = 0 in both directions.
    std::vector<double> right, left;
    for (double c : nodes) (c >= 0.0 ? right : left).push_back(c);
    std::reverse(left.begin(), left.end());
    const auto cr = scgf(tilted, right);
    const auto cl = scgf(tilted, left);
    std::vector<cplx> cvals;
    for (auto it = cl.rbegin(); it != cl.rend(); ++it) cvals.push_back(*it);
    cvals.insert(cvals.end(), cr.begin(), cr.end());

    std::vector<double> out;
    out.reserve(n.size());
    for (double nn : n) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < nodes.size(); ++j) s += weights[j] * std::exp(-I * nn * nodes[j] + cvals[j] * t);
        out.push_back(q * s.real() / (2.0 * std::numbers::pi));
    }
    return out;
}

FluctuationCheck fluctuation_theorem_check(const TiltedLiouvillian& tilted, double sigma,
                                           const std::vector<double>& chi) {
    std::vector<cplx> mirror;
    mirror.reserve(chi.size());
    for (double c : chi) mirror.emplace_back(-c, sigma);
    const auto direct = scgf(tilted, chi);
    const auto reflected = scgf(tilted, mirror);
    FluctuationCheck out;
    for (std::size_t j = 0; j < chi.size(); ++j) {
        const double a = std::abs(direct[j] - reflected[j]);
        if (a > out.max_asymmetry) {
            out.max_asymmetry = a;
            out.at_chi = chi[j];
        }
    }
    return out;
}

}  // namespace qc
