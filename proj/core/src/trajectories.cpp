#include "qcurrents/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "detail.hpp"

namespace qc {

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(master) ^ (index * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

std::mt19937_64 make_rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return std::mt19937_64(seq);
}

namespace {

double uniform01(std::mt19937_64& rng) {
    // (0, 1]: never returns zero so that the survival threshold is always reachable.
    return 1.0 - std::generate_canonical<double, 64>(rng);
}

double default_step(const LindbladModel& model, double final_time) {
    double gmax = 0.0;
    for (const auto& ch : model.expanded_channels()) {
        const cmat g = ch.op.adjoint() * ch.op;
        gmax = std::max(gmax, g.cwiseAbs().rowwise().sum().maxCoeff());
    }
    double dt = final_time / 1e4;
    if (gmax > 0.0) dt = std::min(dt, 1e-3 / gmax);
    return dt;
}

bool all_monitored(const LindbladModel& model) {
    for (const auto& ch : model.expanded_channels()) {
        if (!ch.monitored) return false;
    }
    return true;
}

// e^{A s} for a fixed generator, spectral when well conditioned.
class FlowMap {
public:
    explicit FlowMap(const cmat& a) : prop_(a) {}
    cvec operator()(const cvec& v, double s) const { return prop_.apply(v, s); }

private:
    Propagator prop_;
};

// Dense small matrix-vector product with split real arithmetic.
struct RealMat {
    Eigen::Index n = 0;
    std::vector<double> re, im;
    explicit RealMat(const cmat& m) : n(m.rows()), re(static_cast<std::size_t>(m.size())), im(re.size()) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                re[static_cast<std::size_t>(i * n + j)] = m(i, j).real();
                im[static_cast<std::size_t>(i * n + j)] = m(i, j).imag();
            }
        }
    }
    // out = M in; returns |out|^2
    double apply(const double* xr, const double* xi, double* yr, double* yi) const {
        double norm = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double sr = 0.0, si = 0.0;
            const double* ar = &re[static_cast<std::size_t>(i * n)];
            const double* ai = &im[static_cast<std::size_t>(i * n)];
            for (Eigen::Index j = 0; j < n; ++j) {
                sr += ar[j] * xr[j] - ai[j] * xi[j];
                si += ar[j] * xi[j] + ai[j] * xr[j];
            }
            yr[i] = sr;
            yi[i] = si;
            norm += sr * sr + si * si;
        }
        return norm;
    }
};

std::size_t pick_channel(const std::vector<double>& p, std::mt19937_64& rng) {
    double total = 0.0;
    for (double x : p) total += x;
    const double u = uniform01(rng) * total;
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        acc += p[k];
        if (u <= acc && p[k] > 0.0) return k;
    }
    for (std::size_t k = p.size(); k-- > 0;) {
        if (p[k] > 0.0) return k;
    }
    throw Error("jump requested but every channel has zero probability");
}

void check_times(const McwfOptions& opts, double final_time) {
    if (!(final_time > 0.0)) throw Error("final time must be positive");
    if (opts.dt && !(*opts.dt > 0.0)) throw Error("march step must be positive");
    if (!std::is_sorted(opts.sample_times.begin(), opts.sample_times.end())) {
        throw Error("sample times must be sorted");
    }
    if (!opts.sample_times.empty() && (opts.sample_times.front() < 0.0 || opts.sample_times.back() > final_time)) {
        throw Error("sample times must lie within [0, final_time]");
    }
}

TrajectoryRecord pure_path(const LindbladModel& model, const cvec& psi0, double final_time, std::uint64_t seed,
                           const McwfOptions& opts) {
    const auto& ex = model.expanded_channels();
    const auto& org = model.origin();
    const Eigen::Index d = model.dimension();
    cmat heff = model.hamiltonian();
    for (const auto& ch : ex) heff -= 0.5 * I * ch.op.adjoint() * ch.op;
    const cmat gen = -I * heff;
    const double dt = opts.dt.value_or(default_step(model, final_time));
    const RealMat u(expm(gen * dt));
    const RealMat uh(expm(gen * (0.5 * dt)));
    const FlowMap flow(gen);
    cmat decay = cmat::Zero(d, d);
    for (const auto& ch : ex) decay += ch.op.adjoint() * ch.op;
    const double gmax = std::max(1e-300, decay.cwiseAbs().rowwise().sum().maxCoeff());

    TrajectoryRecord rec;
    rec.seed = seed;
    rec.final_time = final_time;
    rec.sample_times = opts.sample_times;
    rec.samples.assign(opts.observables.size(), {});
    auto rng = make_rng(seed);

    std::size_t next_sample = 0;
    auto sample_until = [&](const cvec& base, double t_base, double t_end, bool inclusive) {
        while (next_sample < opts.sample_times.size()) {
            const double ts = opts.sample_times[next_sample];
            if (inclusive ? ts > t_end : ts >= t_end) break;
            const cvec v = ts > t_base ? flow(base, ts - t_base) : base;
            const double nn = v.squaredNorm();
            for (std::size_t o = 0; o < opts.observables.size(); ++o) {
                rec.samples[o].push_back(cplx(v.dot(opts.observables[o] * v)).real() / nn);
            }
            ++next_sample;
        }
    };

    cvec psi = psi0 / psi0.norm();
    std::vector<double> xr(static_cast<std::size_t>(d)), xi(xr.size()), yr(xr.size()), yi(xr.size()), hr(xr.size()),
        hi(xr.size());
    auto load = [&](const cvec& v) {
        for (Eigen::Index i = 0; i < d; ++i) {
            xr[static_cast<std::size_t>(i)] = v(i).real();
            xi[static_cast<std::size_t>(i)] = v(i).imag();
        }
    };
    auto store = [&](const std::vector<double>& r, const std::vector<double>& im) {
        cvec v(d);
        for (Eigen::Index i = 0; i < d; ++i) v(i) = cplx(r[static_cast<std::size_t>(i)], im[static_cast<std::size_t>(i)]);
        return v;
    };

    double t = 0.0;
    double threshold = uniform01(rng);
    double norm = 1.0;
    load(psi);
    double quiet_since = -1.0;
    std::size_t step_count = 0;

    while (t < final_time) {
        const double h = std::min(dt, final_time - t);
        const bool full = h == dt;
        double nnext;
        cvec cur;
        if (full) {
            nnext = u.apply(xr.data(), xi.data(), yr.data(), yi.data());
        } else {
            cur = store(xr, xi);
            const cvec nx = flow(cur, h);
            for (Eigen::Index i = 0; i < d; ++i) {
                yr[static_cast<std::size_t>(i)] = nx(i).real();
                yi[static_cast<std::size_t>(i)] = nx(i).imag();
            }
            nnext = nx.squaredNorm();
        }
        if (nnext >= threshold) {
            if (next_sample < opts.sample_times.size() && opts.sample_times[next_sample] <= t + h) {
                sample_until(store(xr, xi), t, t + h, true);
            }
            std::swap(xr, yr);
            std::swap(xi, yi);
            norm = nnext;
            t += h;
            if (++step_count % 1024 == 0) {
                const cvec v = store(xr, xi);
                const double rate = cplx(v.dot(decay * v)).real() / v.squaredNorm();
                if (rate < 1e-12 * gmax) {
                    if (quiet_since < 0.0) quiet_since = t;
                    if (t - quiet_since > 50.0 / gmax) {
                        rec.dark = true;
                        sample_until(v, t, final_time, true);
                        return rec;
                    }
                } else {
                    quiet_since = -1.0;
                }
            }
            continue;
        }
        // Crossing inside (t, t + h]: one bisection, then linear interpolation in the survival.
        double ta = t, tb = t + h, na = norm, nb = nnext;
        cvec base = store(xr, xi);
        cvec mid;
        double nmid;
        if (full) {
            nmid = uh.apply(xr.data(), xi.data(), hr.data(), hi.data());
            mid = store(hr, hi);
        } else {
            mid = flow(base, 0.5 * h);
            nmid = mid.squaredNorm();
        }
        cvec from = base;
        if (nmid < threshold) {
            tb = t + 0.5 * h;
            nb = nmid;
        } else {
            ta = t + 0.5 * h;
            na = nmid;
            from = mid;
        }
        const double tj = ta + (na - threshold) / (na - nb) * (tb - ta);
        sample_until(base, t, tj, true);
        const cvec pj = tj > ta ? flow(from, tj - ta) : from;
        std::vector<double> p(ex.size());
        for (std::size_t k = 0; k < ex.size(); ++k) p[k] = (ex[k].op * pj).squaredNorm();
        const std::size_t k = pick_channel(p, rng);
        rec.events.push_back({tj, org[k]});
        if (rec.events.size() >= opts.max_jumps) {
            rec.final_time = tj;
            return rec;
        }
        cvec after = ex[k].op * pj;
        after /= after.norm();
        load(after);
        norm = 1.0;
        t = tj;
        threshold = uniform01(rng);
        quiet_since = -1.0;
        sample_until(after, t, t, true);
    }
    sample_until(store(xr, xi), t, final_time, true);
    return rec;
}

TrajectoryRecord density_path(const LindbladModel& model, const cmat& rho0, double final_time,
                              std::uint64_t seed, const McwfOptions& opts) {
    const auto& ex = model.expanded_channels();
    const auto& org = model.origin();
    const Eigen::Index d = model.dimension();
    cmat l0 = Liouvillian(model).matrix();
    std::vector<cmat> jumps(ex.size());
    for (std::size_t k = 0; k < ex.size(); ++k) {
        if (!ex[k].monitored) continue;
        jumps[k] = jump_superop(ex[k].op);
        l0 -= jumps[k];
    }
    const double dt = opts.dt.value_or(default_step(model, final_time));
    const cmat e = expm(l0 * dt);
    const cmat eh = expm(l0 * (0.5 * dt));
    const FlowMap flow(l0);
    const cvec tr = trace_row(d);
    auto ptrace = [&](const cvec& v) { return cplx(tr.transpose() * v).real(); };

    TrajectoryRecord rec;
    rec.seed = seed;
    rec.final_time = final_time;
    rec.sample_times = opts.sample_times;
    rec.samples.assign(opts.observables.size(), {});
    std::vector<cvec> obs;
    for (const auto& o : opts.observables) obs.push_back(detail::trace_functional(o));
    auto rng = make_rng(seed);

    std::size_t next_sample = 0;
    auto sample_until = [&](const cvec& base, double t_base, double t_end) {
        while (next_sample < opts.sample_times.size() && opts.sample_times[next_sample] <= t_end) {
            const double ts = opts.sample_times[next_sample];
            const cvec v = ts > t_base ? flow(base, ts - t_base) : base;
            const double n = ptrace(v);
            for (std::size_t o = 0; o < obs.size(); ++o) rec.samples[o].push_back(cplx(obs[o].transpose() * v).real() / n);
            ++next_sample;
        }
    };

    cvec rho = vec(rho0);
    double t = 0.0;
    double threshold = uniform01(rng);
    while (t < final_time) {
        const double h = std::min(dt, final_time - t);
        const cvec nx = h == dt ? cvec(e * rho) : flow(rho, h);
        const double nn = ptrace(nx);
        if (nn >= threshold) {
            sample_until(rho, t, t + h);
            rho = nx;
            t += h;
            continue;
        }
        const double n0 = ptrace(rho);
        const cvec mid = h == dt ? cvec(eh * rho) : flow(rho, 0.5 * h);
        const double nm = ptrace(mid);
        double ta = t, tb = t + h, na = n0, nb = nn;
        cvec from = rho;
        if (nm < threshold) {
            tb = t + 0.5 * h;
            nb = nm;
        } else {
            ta = t + 0.5 * h;
            na = nm;
            from = mid;
        }
        const double tj = ta + (na - threshold) / (na - nb) * (tb - ta);
        sample_until(rho, t, tj);
        const cvec rj = tj > ta ? flow(from, tj - ta) : from;
        std::vector<double> p(ex.size(), 0.0);
        for (std::size_t k = 0; k < ex.size(); ++k) {
            if (ex[k].monitored) p[k] = std::max(0.0, ptrace(jumps[k] * rj));
        }
        const std::size_t k = pick_channel(p, rng);
        rec.events.push_back({tj, org[k]});
        if (rec.events.size() >= opts.max_jumps) {
            rec.final_time = tj;
            return rec;
        }
        rho = jumps[k] * rj;
        rho /= ptrace(rho);
        rho = vec(hermitize_normalize(unvec(rho, d)));
        t = tj;
        threshold = uniform01(rng);
        sample_until(rho, t, t);
    }
    sample_until(rho, t, final_time);
    return rec;
}

}  // namespace

TrajectoryRecord mcwf_simulate(const LindbladModel& model, const cvec& psi0, double final_time,
                               std::uint64_t seed, const McwfOptions& opts) {
    if (psi0.size() != model.dimension()) throw DimensionError("initial state does not match the model dimension");
    if (!(psi0.norm() > 0.0)) throw Error("initial state vector is zero");
    check_times(opts, final_time);
    if (!all_monitored(model) || opts.force_density_matrix) {
        const cvec p = psi0 / psi0.norm();
        return density_path(model, p * p.adjoint(), final_time, seed, opts);
    }
    return pure_path(model, psi0, final_time, seed, opts);
}

TrajectoryRecord mcwf_simulate(const LindbladModel& model, const cmat& rho0, double final_time,
                               std::uint64_t seed, const McwfOptions& opts) {
    if (rho0.rows() != model.dimension() || rho0.cols() != model.dimension()) {
        throw DimensionError("initial state does not match the model dimension");
    }
    validate_density_matrix(rho0, 1e-8);
    check_times(opts, final_time);
    if (all_monitored(model) && !opts.force_density_matrix) {
        Eigen::SelfAdjointEigenSolver<cmat> es(rho0);
        const Eigen::Index top = es.eigenvalues().size() - 1;
        if (std::abs(es.eigenvalues()(top) - 1.0) < 1e-10) {
            return pure_path(model, es.eigenvectors().col(top), final_time, seed, opts);
        }
    }
    return density_path(model, rho0, final_time, seed, opts);
}

std::vector<TrajectoryRecord> mcwf_ensemble(const LindbladModel& model, const cmat& rho0, double final_time,
                                            std::size_t count, std::uint64_t master_seed,
                                            const McwfOptions& opts) {
    std::vector<TrajectoryRecord> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(mcwf_simulate(model, rho0, final_time, stream_seed(master_seed, i), opts));
    }
    return out;
}

CountingResult jump_counting(const TrajectoryRecord& record, const CurrentSpec& spec,
                             const std::vector<double>& t_grid) {
    if (spec.kind != CurrentKind::jump) throw Error("jump_counting needs a jump current");
    CountingResult out;
    auto weight = [&](std::size_t k) {
        if (k >= spec.weights.size()) throw DimensionError("event channel outside the current weights");
        return spec.weights[k];
    };
    if (t_grid.empty()) {
        double n = 0.0;
        out.t.push_back(0.0);
        out.n.push_back(0.0);
        for (const auto& e : record.events) {
            n += weight(e.channel);
            out.t.push_back(e.time);
            out.n.push_back(n);
        }
        out.mean_current = n / record.final_time;
        return out;
    }
    std::size_t j = 0;
    double n = 0.0;
    for (double tg : t_grid) {
        while (j < record.events.size() && record.events[j].time <= tg) n += weight(record.events[j++].channel);
        out.t.push_back(tg);
        out.n.push_back(n);
    }
    double total = 0.0;
    for (const auto& e : record.events) total += weight(e.channel);
    out.mean_current = total / record.final_time;
    return out;
}

DiffusiveRecord diffusive_simulate(const LindbladModel& model, const CurrentSpec& spec, const cmat& rho0,
                                   double dt, double final_time, std::uint64_t seed,
                                   const DiffusiveOptions& opts) {
    if (spec.kind != CurrentKind::diffusive) throw Error("diffusive_simulate needs a diffusive current");
    if (!(dt > 0.0) || !(final_time > 0.0)) throw Error("time step and final time must be positive");
    if (opts.record_stride == 0) throw Error("record stride must be positive");
    validate_density_matrix(rho0, 1e-8);
    const auto w = detail::expand_weights(model, spec);
    const auto& ex = model.expanded_channels();

    cmat heff = model.hamiltonian();
    for (const auto& ch : ex) heff -= 0.5 * I * ch.op.adjoint() * ch.op;
    std::vector<cmat> c;
    std::vector<double> nu;
    for (std::size_t k = 0; k < ex.size(); ++k) {
        if (!ex[k].monitored) continue;
        c.push_back(std::exp(-I * w.phi[k]) * ex[k].op);
        nu.push_back(w.nu[k]);
    }

    const auto steps = static_cast<std::size_t>(std::llround(final_time / dt));
    DiffusiveRecord rec;
    rec.seed = seed;
    rec.dt = dt;
    rec.record_stride = opts.record_stride;
    rec.current.reserve(steps);
    rec.observables.assign(opts.observables.size(), {});
    auto rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    Eigen::SelfAdjointEigenSolver<cmat> es;

    cmat rho = rho0;
    std::vector<double> dw(c.size());
    for (std::size_t j = 0; j < steps; ++j) {
        if (j % opts.record_stride == 0) {
            for (std::size_t o = 0; o < opts.observables.size(); ++o) {
                rec.observables[o].push_back((opts.observables[o] * rho).trace().real());
            }
        }
        cmat drho = -I * (heff * rho - rho * heff.adjoint());
        for (const auto& ch : ex) drho += ch.op * rho * ch.op.adjoint();
        drho *= dt;
        double current = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            dw[k] = normal(rng);
            const cmat cr = c[k] * rho;
            const double x = 2.0 * cr.trace().real();
            current += nu[k] * (x + dw[k] / dt);
            drho += (cr + cr.adjoint() - x * rho) * dw[k];
        }
        rec.current.push_back(current);
        rho += drho;
        const double drift = std::abs(rho.trace().real() - 1.0);
        if (drift > opts.max_trace_drift || !std::isfinite(drift)) {
            std::ostringstream msg;
            msg << "trace drift " << drift << " at step " << j << "; reduce dt";
            throw StepSizeError(msg.str());
        }
        rho = 0.5 * (rho + rho.adjoint()).eval();
        rho /= rho.trace().real();
        es.compute(rho);
        if (es.eigenvalues().minCoeff() < opts.clip) {
            rvec ev = es.eigenvalues().cwiseMax(0.0);
            rho = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
            rho /= rho.trace().real();
            ++rec.clipped_steps;
        }
    }
    rec.final_state = rho;
    return rec;
}

}  // namespace qc
