#include "qcurrents/model_io.hpp"

#include <fstream>
#include <initializer_list>

#include "qcurrents/models.hpp"

namespace qc {

namespace {

using nlohmann::json;

cplx scalar(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError("expected a number or a [re, im] pair, got " + j.dump());
}

json scalar_json(cplx z) { return json::array({z.real(), z.imag()}); }

double number(const json& p, const char* key, double fallback) {
    if (!p.contains(key)) return fallback;
    if (!p[key].is_number()) throw ConfigError(std::string("parameter '") + key + "' must be a number");
    return p[key].get<double>();
}

cvec vector_from_json(const json& j) {
    if (!j.is_array()) throw ConfigError("expected an array of complex entries");
    cvec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = scalar(j[i]);
    return v;
}

rmat real_matrix(const json& j) {
    const cmat m = matrix_from_json(j);
    if (m.imag().cwiseAbs().maxCoeff() > 0.0) throw ConfigError("expected a real matrix");
    return m.real();
}

ExampleB example_b_params(const json& p) {
    const double omega = number(p, "omega", 0.0);
    const double gl = number(p, "gamma_L", 1.0);
    const double gr = number(p, "gamma_R", 1.0);
    if (p.contains("T_L") || p.contains("T_R") || p.contains("beta_L") || p.contains("beta_R")) {
        const auto beta = [&](const char* t, const char* b) {
            if (p.contains(b)) return number(p, b, 1.0);
            const double temp = number(p, t, 1.0);
            if (temp <= 0) throw ConfigError("temperatures must be positive");
            return 1.0 / temp;
        };
        return ExampleB::thermal(omega, gl, gr, beta("T_L", "beta_L"), beta("T_R", "beta_R"),
                                 number(p, "mu_L", 0.0), number(p, "mu_R", 0.0));
    }
    ExampleB b;
    b.omega = omega;
    b.gamma_L = gl;
    b.gamma_R = gr;
    b.f_L = number(p, "f_L", 0.0);
    b.f_R = number(p, "f_R", 1.0);
    return b;
}

ExampleD example_d_params(const json& p) {
    ExampleD d;
    if (p.contains("G")) d.G = scalar(p["G"]);
    d.U = number(p, "U", 0.0);
    d.delta = number(p, "delta", 0.0);
    d.kappa = number(p, "kappa", 1.0);
    d.fock_cutoff = static_cast<Eigen::Index>(number(p, "fock_cutoff", 30));
    return d;
}

void check_keys(const std::string& builder, const json& p, std::initializer_list<const char*> allowed) {
    if (!p.is_object()) return;
    for (const auto& item : p.items()) {
        bool known = false;
        for (const char* k : allowed) known = known || item.key() == k;
        if (!known) throw ConfigError("unknown parameter '" + item.key() + "' for builder " + builder);
    }
}

}  // namespace

cmat matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError("expected a matrix as an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    cmat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ConfigError("matrix rows must all have the same length");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = scalar(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

json matrix_to_json(const cmat& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(scalar_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

LindbladModel build_named(const std::string& builder, const json& p) {
    if (!p.is_object() && !p.is_null()) throw ConfigError("builder parameters must be an object");
    const auto dot_keys = {"omega", "gamma_L", "gamma_R", "f_L", "f_R", "T_L", "T_R", "beta_L", "beta_R", "mu_L", "mu_R"};
    if (builder == "exampleA") {
        check_keys(builder, p, {"delta", "omega", "gamma", "nbar"});
        ExampleA a;
        a.delta = number(p, "delta", 0.0);
        a.omega = number(p, "omega", 1.0);
        a.gamma = number(p, "gamma", 1.0);
        a.nbar = number(p, "nbar", 0.0);
        return build(a);
    }
    if (builder == "exampleB") {
        check_keys(builder, p, dot_keys);
        return build(example_b_params(p));
    }
    if (builder == "exampleC") {
        check_keys(builder, p, {"delta", "omega", "Gamma"});
        ExampleC c;
        c.delta = number(p, "delta", 0.0);
        c.omega = number(p, "omega", 1.0);
        c.Gamma = number(p, "Gamma", 1.0);
        return build(c);
    }
    if (builder == "exampleD") {
        check_keys(builder, p, {"G", "U", "delta", "kappa", "fock_cutoff"});
        return build(example_d_params(p));
    }
    if (builder == "qpc") {
        if (p.is_object()) {
            json lead = p;
            for (const char* k : {"T", "chi", "monitor_leads"}) lead.erase(k);
            check_keys(builder, lead, dot_keys);
        }
        QpcParams q;
        q.leads = example_b_params(p);
        if (p.contains("T")) q.T = scalar(p["T"]);
        if (p.contains("chi")) q.chi = scalar(p["chi"]);
        q.monitor_leads = p.value("monitor_leads", false);
        return build(q);
    }
    if (builder == "pauli") {
        check_keys(builder, p, {"rates", "weights"});
        if (!p.contains("rates")) throw ConfigError("pauli builder needs a 'rates' matrix");
        ClassicalPauli c;
        c.rates = real_matrix(p["rates"]);
        if (p.contains("weights")) c.weights = real_matrix(p["weights"]);
        return build(c);
    }
    throw ConfigError("unknown builder '" + builder + "'");
}

std::optional<GaussianModel> build_named_gaussian(const std::string& builder, const json& p) {
    if (builder == "exampleB") return build_gaussian(example_b_params(p));
    if (builder == "exampleD") {
        const ExampleD d = example_d_params(p);
        if (d.U == 0.0) return build_gaussian(d);
    }
    return std::nullopt;
}

GaussianModel gaussian_from_json(const json& j) {
    GaussianModel g;
    const std::string stats = j.value("statistics", "boson");
    if (stats == "boson") g.statistics = Statistics::boson;
    else if (stats == "fermion") g.statistics = Statistics::fermion;
    else throw ConfigError("gaussian statistics must be 'boson' or 'fermion'");
    if (!j.contains("A")) throw ConfigError("gaussian section needs an 'A' matrix");
    g.A = matrix_from_json(j["A"]);
    const Eigen::Index n = g.A.rows();
    g.B = j.contains("B") ? matrix_from_json(j["B"]) : cmat::Zero(n, n);
    g.eps = j.contains("eps") ? vector_from_json(j["eps"]) : cvec::Zero(n);
    for (const auto& c : j.value("channels", json::array())) {
        GaussianChannel ch;
        ch.mode = c.value("mode", std::size_t{0});
        ch.inject = c.value("inject", false);
        ch.rate = c.value("rate", 0.0);
        ch.nu = c.value("nu", 1.0);
        ch.phase = c.value("phase", 0.0);
        g.channels.push_back(ch);
    }
    g.validate();
    return g;
}

json gaussian_to_json(const GaussianModel& g) {
    json j;
    j["statistics"] = g.statistics == Statistics::boson ? "boson" : "fermion";
    j["A"] = matrix_to_json(g.A);
    j["B"] = matrix_to_json(g.B);
    json eps = json::array();
    for (Eigen::Index i = 0; i < g.eps.size(); ++i) eps.push_back(scalar_json(g.eps(i)));
    j["eps"] = eps;
    json ch = json::array();
    for (const auto& c : g.channels)
        ch.push_back({{"mode", c.mode}, {"inject", c.inject}, {"rate", c.rate}, {"nu", c.nu}, {"phase", c.phase}});
    j["channels"] = ch;
    return j;
}

ModelFile model_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("model file must be a JSON object");
    ModelFile f;
    if (j.contains("builder")) {
        const json& b = j["builder"];
        f.builder = b.is_string() ? b.get<std::string>() : b.value("name", std::string());
        f.params = b.is_object() ? b.value("params", json::object()) : j.value("params", json::object());
        f.model = build_named(f.builder, f.params);
        f.gaussian = build_named_gaussian(f.builder, f.params);
    } else {
        if (!j.contains("hamiltonian")) throw ConfigError("model file needs 'hamiltonian' or 'builder'");
        const cmat h = matrix_from_json(j["hamiltonian"]);
        if (j.contains("dimension") && j["dimension"].get<Eigen::Index>() != h.rows())
            throw DimensionError("model file: 'dimension' does not match the Hamiltonian");
        std::vector<JumpChannel> channels;
        for (const auto& c : j.value("channels", json::array())) {
            JumpChannel ch;
            ch.label = c.value("label", "L" + std::to_string(channels.size()));
            if (!c.contains("matrix")) throw ConfigError("channel '" + ch.label + "' has no matrix");
            ch.op = matrix_from_json(c["matrix"]);
            ch.weight = c.value("weight", 1.0);
            ch.phase = c.value("phase", 0.0);
            ch.efficiency = c.value("efficiency", 1.0);
            ch.monitored = c.value("monitored", true);
            channels.push_back(std::move(ch));
        }
        f.model = LindbladModel(h, std::move(channels), j.value("fock_truncated", false));
    }
    if (j.contains("gaussian")) f.gaussian = gaussian_from_json(j["gaussian"]);
    return f;
}

json model_to_json(const LindbladModel& model) {
    json j;
    j["dimension"] = model.dimension();
    j["hamiltonian"] = matrix_to_json(model.hamiltonian());
    json ch = json::array();
    for (const auto& c : model.channels()) {
        ch.push_back({{"label", c.label},
                      {"matrix", matrix_to_json(c.op)},
                      {"weight", c.weight},
                      {"phase", c.phase},
                      {"efficiency", c.efficiency},
                      {"monitored", c.monitored}});
    }
    j["channels"] = ch;
    j["fock_truncated"] = model.fock_truncated();
    return j;
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("model file " + path.string() + ": " + e.what());
    }
    try {
        return model_from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError("model file " + path.string() + ": " + e.what());
    }
}

void save_model(const std::filesystem::path& path, const LindbladModel& model,
                const std::optional<GaussianModel>& gaussian) {
    json j = model_to_json(model);
    if (gaussian) j["gaussian"] = gaussian_to_json(*gaussian);
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write model file " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace qc
