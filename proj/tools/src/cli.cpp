#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

namespace qc::cli {

namespace {

struct ParamFlag {
    const char* flag;
    const char* help;
};

const std::vector<ParamFlag> param_flags{
    {"Delta", "detuning"},
    {"Omega", "Rabi frequency"},
    {"gamma", "decay rate (sets both lead rates for exampleB)"},
    {"nbar", "thermal occupation"},
    {"Gamma", "dephasing rate"},
    {"gamma-L", "left lead rate"},
    {"gamma-R", "right lead rate"},
    {"f-L", "left lead occupation"},
    {"f-R", "right lead occupation"},
    {"T-L", "left lead temperature"},
    {"T-R", "right lead temperature"},
    {"beta-L", "left lead inverse temperature"},
    {"beta-R", "right lead inverse temperature"},
    {"mu-L", "left chemical potential"},
    {"mu-R", "right chemical potential"},
    {"dot-energy", "dot level energy"},
    {"G", "two-photon pump, number or re,im"},
    {"U", "Kerr nonlinearity"},
    {"kappa", "cavity loss rate"},
    {"cutoff", "Fock cutoff"},
    {"qpc-T", "point-contact tunnelling amplitude, number or re,im"},
    {"qpc-chi", "point-contact coupling, number or re,im"},
    {"rates", "Pauli rate matrix as JSON rows"},
    {"rate-weights", "Pauli weight matrix as JSON rows"},
};

double to_double(const std::string& name, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("--" + name + ": expected a number, got '" + text + "'");
    }
    if (used != text.size()) throw ConfigError("--" + name + ": expected a number, got '" + text + "'");
    return v;
}

nlohmann::json complex_json(const std::string& name, const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) return to_double(name, text);
    return nlohmann::json::array({to_double(name, text.substr(0, comma)), to_double(name, text.substr(comma + 1))});
}

std::vector<double> number_list(const std::string& name, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(name, item));
    if (out.empty()) throw ConfigError("--" + name + ": empty list");
    return out;
}

nlohmann::json builder_params(const RunConfig& cfg) {
    nlohmann::json p = nlohmann::json::object();
    const bool dot = cfg.builder == "exampleB" || cfg.builder == "qpc";
    for (const auto& [flag, raw] : cfg.params) {
        if (flag == "G" || flag == "qpc-T" || flag == "qpc-chi") {
            p[flag == "G" ? "G" : flag == "qpc-T" ? "T" : "chi"] = complex_json(flag, raw);
        } else if (flag == "rates" || flag == "rate-weights") {
            try {
                p[flag == "rates" ? "rates" : "weights"] = nlohmann::json::parse(raw);
            } catch (const nlohmann::json::exception&) {
                throw ConfigError("--" + flag + ": expected a JSON matrix");
            }
        } else if (flag == "gamma" && dot) {
            const double g = to_double(flag, raw);
            if (!cfg.params.count("gamma-L")) p["gamma_L"] = g;
            if (!cfg.params.count("gamma-R")) p["gamma_R"] = g;
        } else if (flag == "dot-energy") {
            p["omega"] = to_double(flag, raw);
        } else {
            std::string key = flag;
            if (key == "Delta") key = "delta";
            else if (key == "Omega") key = "omega";
            else if (key == "cutoff") key = "fock_cutoff";
            for (auto& c : key)
                if (c == '-') c = '_';
            p[key] = to_double(flag, raw);
        }
    }
    if (cfg.symmetric_large_bias) {
        if (!dot) throw ConfigError("--symmetric-large-bias applies to exampleB and qpc");
        p["f_L"] = 0.0;
        p["f_R"] = 1.0;
        const double g = cfg.params.count("gamma") ? to_double("gamma", cfg.params.at("gamma")) : 1.0;
        p["gamma_L"] = g;
        p["gamma_R"] = g;
    }
    if (cfg.monitor_leads) p["monitor_leads"] = true;
    return p;
}

}  // namespace

std::vector<double> Grid::values() const {
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double f = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
        out[i] = spacing == Spacing::lin ? start + (stop - start) * f
                                         : std::exp(std::log(start) + (std::log(stop) - std::log(start)) * f);
    }
    if (points > 1) out.back() = stop;
    return out;
}

Grid parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3 && parts.size() != 4) throw ConfigError("grid '" + text + "' must be start:stop:points[:log]");
    Grid g;
    g.start = to_double("grid", parts[0]);
    g.stop = to_double("grid", parts[1]);
    const double n = to_double("grid", parts[2]);
    if (n < 1 || n > 1e6 || n != std::floor(n)) throw ConfigError("grid '" + text + "': points must be in 1..1000000");
    g.points = static_cast<std::size_t>(n);
    if (parts.size() == 4) {
        if (parts[3] == "log") g.spacing = Spacing::log;
        else if (parts[3] != "lin") throw ConfigError("grid '" + text + "': spacing must be lin or log");
    }
    if (g.spacing == Spacing::log && (g.start <= 0 || g.stop <= 0))
        throw ConfigError("grid '" + text + "': log spacing needs positive end points");
    return g;
}

LoadedModel load(const RunConfig& cfg) {
    LoadedModel m;
    if (!cfg.model_path.empty() && !cfg.builder.empty()) throw ConfigError("use either --model or --builder, not both");
    if (!cfg.model_path.empty()) {
        ModelFile f = load_model(cfg.model_path);
        m.model = std::move(f.model);
        m.gaussian = std::move(f.gaussian);
        m.builder = f.builder;
        m.params = f.params;
        return m;
    }
    if (cfg.builder.empty()) throw ConfigError("a model is required: pass --model FILE or --builder NAME");
    m.builder = cfg.builder;
    m.params = builder_params(cfg);
    m.model = build_named(cfg.builder, m.params);
    m.gaussian = build_named_gaussian(cfg.builder, m.params);
    return m;
}

CurrentSpec make_spec(const RunConfig& cfg, const LoadedModel& loaded) {
    const LindbladModel& model = loaded.model;
    const std::string k = cfg.kind.empty() ? (loaded.builder == "exampleC" ? "diffusive" : "jump") : cfg.kind;
    CurrentKind kind;
    if (k == "jump") kind = CurrentKind::jump;
    else if (k == "diffusive") kind = CurrentKind::diffusive;
    else throw ConfigError("--kind must be jump or diffusive");
    CurrentSpec spec;
    if (!cfg.channel.empty()) {
        spec = CurrentSpec::channel(model.channel_count(), model.channel_index(cfg.channel), kind);
    } else if (!cfg.weights.empty()) {
        const auto w = number_list("weights", cfg.weights);
        std::vector<double> ph;
        if (!cfg.phases.empty()) ph = number_list("phases", cfg.phases);
        spec = kind == CurrentKind::jump ? CurrentSpec::jump(w) : CurrentSpec::diffusive(w, ph);
    } else {
        spec = default_spec(model, kind);
        if (!cfg.phases.empty()) spec.phases = number_list("phases", cfg.phases);
    }
    validate_spec(model, spec);
    return spec;
}

std::string model_hash(const LoadedModel& m) {
    nlohmann::json j = model_to_json(m.model);
    if (m.gaussian) j["gaussian"] = gaussian_to_json(*m.gaussian);
    const std::string text = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return fmt::format("fnv1a64:{:016x}", h);
}

int run(int argc, char** argv) {
    RunConfig cfg;
    for (int i = 0; i < argc; ++i) cfg.command_line += (i ? " " : "") + std::string(argv[i]);

    CLI::App app{"Statistics of currents in continuously measured open quantum systems", "qcurrents"};
    app.require_subcommand(1);
    if (const char* env = std::getenv("QCURRENTS_THREADS")) cfg.threads = std::atoi(env);

    const std::vector<std::pair<const char*, const char*>> commands{
        {"steady", "steady state and mean current"},
        {"spectrum", "power spectrum S(omega) or two-point function F(tau)"},
        {"noise", "mean current, noise, activity and Fano factor"},
        {"fcs", "full counting distribution P(n, t)"},
        {"scgf", "scaled cumulant generating function C(chi)"},
        {"cumulants", "scaled cumulants from the recursive scheme"},
        {"trajectory", "quantum-jump trajectories"},
        {"diffusive", "homodyne-type diffusive record"},
        {"wtd", "waiting-time distributions"},
        {"gaussian", "Gaussian-model statistics"},
        {"analyze", "Fisher information, uncertainty bounds, Onsager checks"},
        {"oracle-check", "compare engine results with closed-form references"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->callback([&cfg, n = std::string(name)] { cfg.command = n; });
        if (std::string(name) == "oracle-check") {
            sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
            continue;
        }
        sub->add_option("--model", cfg.model_path, "model file (JSON)");
        sub->add_option("--builder", cfg.builder, "exampleA, exampleB, exampleC, exampleD, qpc or pauli");
        for (const auto& pf : param_flags) {
            const std::string flag = pf.flag;
            sub->add_option_function<std::string>("--" + flag, [&cfg, flag](const std::string& v) { cfg.params[flag] = v; },
                                                  pf.help);
        }
        sub->add_flag("--symmetric-large-bias", cfg.symmetric_large_bias, "exampleB with f_L = 0, f_R = 1 and equal rates");
        sub->add_flag("--monitor-leads", cfg.monitor_leads, "qpc: also monitor the lead channels");
        sub->add_option("--kind", cfg.kind, "jump or diffusive (default diffusive for exampleC)");
        sub->add_option("--weights", cfg.weights, "comma-separated channel weights");
        sub->add_option("--phases", cfg.phases, "comma-separated homodyne phases");
        sub->add_option("--channel", cfg.channel, "count a single channel by label");
        for (const char* g : {"omega", "tau", "chi", "times"}) {
            const std::string key = g;
            sub->add_option_function<std::string>("--" + key, [&cfg, key](const std::string& v) { cfg.grids[key] = v; },
                                                  "grid start:stop:points[:log]");
        }
        sub->add_option_function<std::uint64_t>("--seed", [&cfg](std::uint64_t s) { cfg.seed = s; cfg.seed_set = true; },
                                                "random seed");
        sub->add_option("-o,--output", cfg.output, "output file (default stdout)");
        sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", cfg.threads, "worker cap");
        sub->add_option_function<double>("--t", [&cfg](double v) { cfg.t = v; cfg.t_set = true; }, "time");
        sub->add_option("--T", cfg.final_time, "final time");
        sub->add_option("--dt", cfg.dt, "time step");
        sub->add_option("--count", cfg.count, "number of trajectories");
        sub->add_option("--points", cfg.points, "counting-field grid size");
        sub->add_option("--stride", cfg.stride, "record every n-th step");
        sub->add_option("--order", cfg.order, "highest cumulant order");
        sub->add_option("--initial", cfg.initial, "steady or basis:k");
        sub->add_option("--monitor", cfg.monitor, "comma-separated monitored channel labels");
        sub->add_option("--between", cfg.between, "waiting times after a jump in this channel");
        sub->add_option("--unravelling", cfg.unravelling, "jump or diffusive");
        sub->add_option("--check", cfg.check, "qfi, hasegawa, tur or onsager");
        sub->add_option("--parameter", cfg.parameter, "builder parameter for the Fisher information");
        sub->add_option("--sigma-eq", cfg.sigma_eq, "equilibrium affinity for the Onsager check");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ExtrasError& e) {
        std::cerr << "qcurrents: " << e.what() << "\n" << app.help();
        return 64;
    } catch (const CLI::ParseError& e) {
        if (std::string(e.get_name()) == "RequiredError" && cfg.command.empty() && argc > 1) {
            std::cerr << "qcurrents: unknown command '" << argv[1] << "'\n" << app.help();
            return 64;
        }
        std::cerr << "qcurrents: " << e.what() << "\n";
        return 2;
    }

    try {
        if (cfg.threads > 0) Eigen::setNbThreads(cfg.threads);
        Table table;
        RunInfo info{cfg.command_line, "none", cfg.seed_set ? std::to_string(cfg.seed) : "none"};
        int code = 0;
        if (cfg.command == "oracle-check") {
            auto [t, ok] = oracle_check();
            table = std::move(t);
            code = ok ? 0 : 1;
        } else {
            const LoadedModel model = load(cfg);
            info.model_hash = model_hash(model);
            table = execute(cfg, model);
        }
        std::ofstream file;
        if (!cfg.output.empty()) {
            file.open(cfg.output);
            if (!file) throw ConfigError("cannot write " + cfg.output);
        }
        std::ostream& os = cfg.output.empty() ? std::cout : file;
        if (cfg.format == "json") write_json(os, table, info);
        else write_csv(os, table, info);
        return code;
    } catch (const qc::Error& e) {
        std::cerr << "qcurrents: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "qcurrents: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "qcurrents: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace qc::cli
