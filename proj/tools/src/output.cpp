#include "output.hpp"

#include <fmt/core.h>

namespace qc::cli {

namespace {

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<long long>(&c)) return *i;
    return std::get<std::string>(c);
}

std::string meta_text(const nlohmann::ordered_json& v) {
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string out;
        for (const auto& x : v) out += (out.empty() ? "" : " ") + meta_text(x);
        return out;
    }
    return v.dump();
}

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

void write_csv(std::ostream& os, const Table& t, const RunInfo& info) {
    os << "# command: " << info.command_line << '\n';
    os << "# model: " << info.model_hash << '\n';
    os << "# seed: " << info.seed << '\n';
    for (const auto& [k, v] : t.meta.items()) os << "# " << k << ": " << meta_text(v) << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    if (!t.columns.empty()) os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
        os << '\n';
    }
}

void write_json(std::ostream& os, const Table& t, const RunInfo& info) {
    nlohmann::ordered_json j;
    j["command"] = info.command_line;
    j["model"] = info.model_hash;
    j["seed"] = info.seed;
    j["meta"] = t.meta;
    if (!t.columns.empty()) {
        j["columns"] = t.columns;
        auto rows = nlohmann::ordered_json::array();
        for (const auto& row : t.rows) {
            auto r = nlohmann::ordered_json::array();
            for (const auto& c : row) r.push_back(cell_json(c));
            rows.push_back(r);
        }
        j["rows"] = rows;
    }
    os << j.dump(2) << '\n';
}

}  // namespace qc::cli
