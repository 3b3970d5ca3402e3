#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace qc::cli {

using Cell = std::variant<double, long long, std::string>;

// Tabular result with scalar metadata. Written as CSV with '#' header lines or as JSON.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
};

struct RunInfo {
    std::string command_line;
    std::string model_hash;
    std::string seed;
};

std::string format_double(double x);
void write_csv(std::ostream& os, const Table& t, const RunInfo& info);
void write_json(std::ostream& os, const Table& t, const RunInfo& info);

}  // namespace qc::cli
