#include <algorithm>
#include <cmath>
#include <sstream>

#include "cli.hpp"

namespace qc::cli {

namespace {

std::vector<double> grid(const RunConfig& cfg, const std::string& key) {
    const auto it = cfg.grids.find(key);
    if (it == cfg.grids.end()) return {};
    return parse_grid(it->second).values();
}

std::vector<double> require_grid(const RunConfig& cfg, const std::string& key) {
    auto g = grid(cfg, key);
    if (g.empty()) throw ConfigError(cfg.command + " needs --" + key + " start:stop:points");
    return g;
}

cmat initial_state(const RunConfig& cfg, const OpenSystem& sys) {
    if (cfg.initial == "steady") return sys.liou.steady_state();
    if (cfg.initial.rfind("basis:", 0) == 0) {
        const auto k = static_cast<Eigen::Index>(std::stol(cfg.initial.substr(6)));
        const Eigen::Index d = sys.model.dimension();
        if (k < 0 || k >= d) throw ConfigError("--initial basis index outside the Hilbert space");
        cmat rho = cmat::Zero(d, d);
        rho(k, k) = 1.0;
        return rho;
    }
    throw ConfigError("--initial must be 'steady' or 'basis:k'");
}

std::vector<std::size_t> monitored(const RunConfig& cfg, const LindbladModel& model) {
    std::vector<std::size_t> out;
    std::stringstream ss(cfg.monitor);
    std::string label;
    while (std::getline(ss, label, ',')) out.push_back(model.channel_index(label));
    return out;
}

void meta_cell(Table& t, const std::string& key, double v) { t.meta[key] = v; }

Table steady(const RunConfig& cfg, const LoadedModel& m, const OpenSystem& sys) {
    Table t;
    const cmat rho = sys.liou.steady_state();
    const CurrentSpec spec = make_spec(cfg, m);
    meta_cell(t, "J", average_current(sys, spec));
    meta_cell(t, "K", dynamical_activity(sys, spec));
    meta_cell(t, "trace_residual", sys.liou.trace_residual());
    t.meta["leakage_warning"] = sys.liou.leakage_warning();
    t.columns = {"row", "col", "re", "im"};
    for (Eigen::Index j = 0; j < rho.cols(); ++j)
        for (Eigen::Index i = 0; i < rho.rows(); ++i)
            t.rows.push_back({static_cast<long long>(i), static_cast<long long>(j), rho(i, j).real(), rho(i, j).imag()});
    return t;
}

Table spectrum(const RunConfig& cfg, const LoadedModel& m, const OpenSystem& sys) {
    Table t;
    const CurrentSpec spec = make_spec(cfg, m);
    const auto omega = grid(cfg, "omega");
    const auto tau = grid(cfg, "tau");
    if (omega.empty() == tau.empty()) throw ConfigError("spectrum needs exactly one of --omega or --tau");
    if (!omega.empty()) {
        const auto s = power_spectrum(sys, spec, omega);
        t.columns = {"omega", "S"};
        for (std::size_t i = 0; i < omega.size(); ++i) t.rows.push_back({omega[i], s[i]});
    } else {
        const auto f = two_point_function(sys, spec, tau);
        meta_cell(t, "delta_weight", f.delta_weight);
        t.columns = {"tau", "F_regular"};
        for (std::size_t i = 0; i < tau.size(); ++i) t.rows.push_back({tau[i], f.regular[i]});
    }
    return t;
}

Table noise_table(const RunConfig& cfg, const LoadedModel& m, const OpenSystem& sys) {
    Table t;
    const NoiseResult r = noise(sys, make_spec(cfg, m));
    t.columns = {"quantity", "value"};
    t.rows.push_back({std::string("J"), r.J});
    t.rows.push_back({std::string("D"), r.D});
    t.rows.push_back({std::string("K"), r.K});
    if (r.fano) t.rows.push_back({std::string("fano"), *r.fano});
    else t.rows.push_back({std::string("fano"), std::string("undefined")});
    return t;
}

TiltedLiouvillian tilted_for(const RunConfig& cfg, const LoadedModel& m) {
    const CurrentSpec spec = make_spec(cfg, m);
    return spec.kind == CurrentKind::jump ? tilted_jump(m.model, spec) : tilted_diffusive(m.model, spec);
}

Table fcs(const RunConfig& cfg, const LoadedModel& m, const OpenSystem& sys) {
    if (!cfg.t_set) throw ConfigError("fcs needs --t");
    DistributionOptions opts;
    opts.points = cfg.points;
    const auto dist = charge_distribution(tilted_for(cfg, m), initial_state(cfg, sys), cfg.t, opts);
    Table t;
    t.meta["lattice"] = dist.lattice;
    meta_cell(t, "quantum", dist.quantum);
    meta_cell(t, "t", dist.t);
    meta_cell(t, "normalization", dist.normalization());
    meta_cell(t, "mean", dist.mean());
    meta_cell(t, "variance", dist.variance());
    t.columns = {"n", dist.lattice ? "P" : "density"};
    for (std::size_t i = 0; i < dist.n.size(); ++i) t.rows.push_back({dist.n[i], dist.p[i]});
    return t;
}

Table scgf_table(const RunConfig& cfg, const LoadedModel& m, const OpenSystem&) {
    const auto chi = require_grid(cfg, "chi");
    const auto c = scgf(tilted_for(cfg, m), chi);
    Table t;
    t.columns = {"chi", "re_C", "im_C"};
    for (std::size_t i = 0; i < chi.size(); ++i) t.rows.push_back({chi[i], c[i].real(), c[i].imag()});
    return t;
}

Table cumulants(const RunConfig& cfg, const LoadedModel& m, const OpenSystem&) {
    const auto c = cumulants_recursive(tilted_for(cfg, m), cfg.order);
    Table t;
    t.columns = {"order", "value"};
    for (std::size_t i = 0; i < c.size(); ++i) t.rows.push_back({static_cast<long long>(i + 1), c[i]});
    return t;
}

Table trajectory(const RunConfig& cfg, const LoadedModel& m, const OpenSystem& sys) {
    if (!(cfg.final_time > 0)) throw ConfigError("trajectory needs --T > 0");
    McwfOptions opts;
    if (cfg.dt > 0) opts.dt = cfg.dt;
    const auto records = mcwf_ensemble(sys.model, initial_state(cfg, sys), cfg.final_time, cfg.count, cfg.seed, opts);
    const CurrentSpec spec = make_spec(cfg, m);
    const auto times = grid(cfg, "times");
    Table t;
    double mean_current = 0.0;
    for (const auto& r : records) mean_current += jump_counting(r, spec).mean_current / static_cast<double>(records.size());
    meta_cell(t, "mean_current", mean_current);
    if (!times.empty()) {
        t.columns = {"trajectory", "t", "N"};
        for (std::size_t k = 0; k < records.size(); ++k) {
            const auto c = jump_counting(records[k], spec, times);
            for (std::size_t i = 0; i < c.t.size(); ++i) t.rows.push_back({static_cast<long long>(k), c.t[i], c.n[i]});
        }
        return t;
    }
    t.columns = {"trajectory", "time", "channel", "label"};
    for (std::size_t k = 0; k < records.size(); ++k)
        for (const auto& e : records[k].events)
            t.rows.push_back({static_cast<long long>(k), e.time, static_cast<long long>(e.channel),
                              sys.model.channels()[e.channel].label});
    return t;
}

Table diffusive(const RunConfig& cfg, const LoadedModel& m, const OpenSystem& sys) {
    if (!(cfg.final_time > 0) || !(cfg.dt > 0)) throw ConfigError("diffusive needs --T > 0 and --dt > 0");
    RunConfig c = cfg;
    c.kind = "diffusive";
    DiffusiveOptions opts;
    opts.record_stride = cfg.stride;
    const auto rec = diffusive_simulate(sys.model, make_spec(c, m), initial_state(cfg, sys), cfg.dt,
                                        cfg.final_time, cfg.seed, opts);
    Table t;
    meta_cell(t, "dt", rec.dt);
    t.meta["clipped_steps"] = rec.clipped_steps;
    t.columns = {"t", "current"};
    for (std::size_t i = 0; i < rec.current.size(); i += cfg.stride)
        t.rows.push_back({static_cast<double>(i) * rec.dt, rec.current[i]});
    return t;
}

Table wtd(const RunConfig& cfg, const LoadedModel&, const OpenSystem& sys) {
    const NoJumpGenerator gen(sys.model, monitored(cfg, sys.model));
    auto times = grid(cfg, "times");
    if (times.empty()) times = default_wtd_grid(gen);
    const auto ss = jump_steady_state(gen);
    Table t;
    meta_cell(t, "K", ss.activity);
    t.meta["p_k"] = ss.probability;
    WaitingTimes w;
    cmat start;
    if (!cfg.between.empty()) {
        const std::size_t label = sys.model.channel_index(cfg.between);
        const auto& mon = gen.monitored();
        const auto pos = std::find(mon.begin(), mon.end(), label);
        if (pos == mon.end()) throw ConfigError("--between channel is not monitored");
        const auto q = static_cast<std::size_t>(pos - mon.begin());
        w = wtd_between(gen, q, times);
        const cvec seed = gen.jump(label) * vec(sys.liou.steady_state());
        start = unvec(seed / trace_of(seed, sys.model.dimension()), sys.model.dimension());
    } else {
        start = initial_state(cfg, sys);
        w = wtd_first(gen, start, times);
    }
    meta_cell(t, "mean_waiting_time", wtd_moments(gen, start, 1).moment[0]);
    t.columns = {"t"};
    for (std::size_t k : gen.monitored()) t.columns.push_back("W_" + sys.model.channels()[k].label);
    for (std::size_t i = 0; i < w.t.size(); ++i) {
        std::vector<Cell> row{w.t[i]};
        for (const auto& col : w.w) row.emplace_back(col[i]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table gaussian(const RunConfig& cfg, const LoadedModel& m) {
    if (!m.gaussian) throw ConfigError("model has no Gaussian form");
    const auto omega = grid(cfg, "omega");
    const auto tau = grid(cfg, "tau");
    GaussianStats s;
    if (cfg.unravelling == "jump") s = gaussian_jump_stats(*m.gaussian, omega, tau);
    else if (cfg.unravelling == "diffusive") s = gaussian_diffusion_stats(*m.gaussian, omega, tau);
    else throw ConfigError("--unravelling must be jump or diffusive");
    Table t;
    meta_cell(t, "J", s.J);
    meta_cell(t, "K", s.K);
    meta_cell(t, "D", s.D);
    if (!omega.empty()) {
        t.columns = {"omega", "S"};
        for (std::size_t i = 0; i < omega.size(); ++i) t.rows.push_back({omega[i], s.S[i]});
    } else if (!tau.empty()) {
        t.columns = {"tau", "F_regular"};
        for (std::size_t i = 0; i < tau.size(); ++i) t.rows.push_back({tau[i], s.F[i]});
    }
    return t;
}

Table analyze(const RunConfig& cfg, const LoadedModel& m) {
    Table t;
    t.meta["check"] = cfg.check;
    if (cfg.check == "qfi") {
        if (m.builder.empty()) throw ConfigError("qfi needs a builder model");
        // Accept either the flag spelling (Omega, gamma-L) or the builder key (omega, gamma_L).
        std::string key = cfg.parameter;
        if (key == "Delta") key = "delta";
        else if (key == "Omega" || key == "dot-energy") key = "omega";
        for (auto& c : key)
            if (c == '-') c = '_';
        if (key.empty() || !m.params.contains(key) || !m.params[key].is_number())
            throw ConfigError("qfi needs --parameter naming a real builder parameter that was set explicitly");
        const double theta = m.params[key].get<double>();
        const auto builder = [&](double x) {
            nlohmann::json p = m.params;
            p[key] = x;
            return build_named(m.builder, p);
        };
        const auto pm = ParametrizedModel::finite_difference(builder, theta, key);
        t.meta["parameter"] = cfg.parameter;
        meta_cell(t, "value", theta);
        meta_cell(t, "qfi_rate", qfi_rate(pm));
        meta_cell(t, "fd_error", pm.fd_error);
    } else if (cfg.check == "hasegawa") {
        const OpenSystem sys(m.model);
        const auto b = hasegawa_bound(sys, make_spec(cfg, m));
        meta_cell(t, "lhs", b.lhs);
        meta_cell(t, "rhs", b.rhs);
        meta_cell(t, "f", b.f);
        meta_cell(t, "h0", b.h0);
        meta_cell(t, "J", b.J);
        meta_cell(t, "D", b.D);
        t.meta["satisfied"] = b.satisfied;
    } else if (cfg.check == "tur") {
        if (m.builder != "pauli") throw ConfigError("tur needs --builder pauli with --rates and --rate-weights");
        const rmat rates = matrix_from_json(m.params["rates"]).real();
        const rmat weights = m.params.contains("weights") ? rmat(matrix_from_json(m.params["weights"]).real())
                                                           : rmat::Zero(rates.rows(), rates.cols());
        const auto r = classical_tur_check(rates, weights);
        meta_cell(t, "J", r.J);
        meta_cell(t, "D", r.D);
        meta_cell(t, "ratio", r.ratio);
        meta_cell(t, "entropy_production", r.entropy_production);
        meta_cell(t, "activity", r.activity);
        meta_cell(t, "tur_rhs", r.tur_rhs);
        meta_cell(t, "kur_rhs", r.kur_rhs);
        t.meta["tur_holds"] = r.tur_holds;
        t.meta["kur_holds"] = r.kur_holds;
    } else if (cfg.check == "onsager") {
        if (m.builder != "exampleB") throw ConfigError("onsager needs --builder exampleB");
        const auto c = onsager_fdt_check(m.params.value("gamma_L", 1.0), m.params.value("gamma_R", 1.0), cfg.sigma_eq);
        const auto mat = [](const rmat& x) {
            return nlohmann::ordered_json::array({{x(0, 0), x(0, 1)}, {x(1, 0), x(1, 1)}});
        };
        t.meta["L"] = mat(c.L);
        t.meta["D"] = mat(c.D);
        meta_cell(t, "symmetry_residual", c.symmetry_residual);
        meta_cell(t, "fdt_residual", c.fdt_residual);
        meta_cell(t, "analytic_residual", c.analytic_residual);
        meta_cell(t, "min_eigenvalue", c.min_eigenvalue);
    } else {
        throw ConfigError("--check must be qfi, hasegawa, tur or onsager");
    }
    return t;
}

}  // namespace

Table execute(const RunConfig& cfg, const LoadedModel& m) {
    if (cfg.command == "gaussian") return gaussian(cfg, m);
    if (cfg.command == "analyze") return analyze(cfg, m);
    const OpenSystem sys(m.model);
    if (cfg.command == "steady") return steady(cfg, m, sys);
    if (cfg.command == "spectrum") return spectrum(cfg, m, sys);
    if (cfg.command == "noise") return noise_table(cfg, m, sys);
    if (cfg.command == "fcs") return fcs(cfg, m, sys);
    if (cfg.command == "scgf") return scgf_table(cfg, m, sys);
    if (cfg.command == "cumulants") return cumulants(cfg, m, sys);
    if (cfg.command == "trajectory") return trajectory(cfg, m, sys);
    if (cfg.command == "diffusive") return diffusive(cfg, m, sys);
    if (cfg.command == "wtd") return wtd(cfg, m, sys);
    throw ConfigError("unknown command " + cfg.command);
}

}  // namespace qc::cli
