#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "output.hpp"
#include "qcurrents/qcurrents.hpp"

namespace qc::cli {

enum class Spacing { lin, log };

struct Grid {
    double start = 0.0;
    double stop = 0.0;
    std::size_t points = 0;
    Spacing spacing = Spacing::lin;
    std::vector<double> values() const;
};
// "start:stop:points" with an optional ":log" suffix.
Grid parse_grid(const std::string& text);

struct RunConfig {
    std::string command;
    std::string command_line;
    std::string model_path;
    std::string builder;
    std::map<std::string, std::string> params;  // flag name -> raw value
    bool symmetric_large_bias = false;
    bool monitor_leads = false;
    std::string kind;  // empty: diffusive for exampleC, jump otherwise
    std::string weights;
    std::string phases;
    std::string channel;
    std::map<std::string, std::string> grids;  // omega, tau, chi, t
    std::uint64_t seed = 1;
    bool seed_set = false;
    std::string output;
    std::string format = "csv";
    int threads = 0;
    // Command-specific knobs.
    double t = 0.0;
    bool t_set = false;
    double dt = 0.0;
    double final_time = 0.0;
    std::size_t count = 1;
    std::size_t points = 1024;
    std::size_t stride = 1;
    int order = 4;
    std::string initial = "steady";
    std::string monitor;
    std::string between;
    std::string unravelling = "jump";
    std::string check;
    std::string parameter;
    double sigma_eq = 0.0;
};

struct LoadedModel {
    LindbladModel model;
    std::optional<GaussianModel> gaussian;
    nlohmann::json params;
    std::string builder;
};

LoadedModel load(const RunConfig& cfg);
CurrentSpec make_spec(const RunConfig& cfg, const LoadedModel& model);
std::string model_hash(const LoadedModel& m);

Table execute(const RunConfig& cfg, const LoadedModel& model);
// Golden comparisons of engine results against closed forms. Returns the table and a pass flag.
std::pair<Table, bool> oracle_check();

int run(int argc, char** argv);

}  // namespace qc::cli
