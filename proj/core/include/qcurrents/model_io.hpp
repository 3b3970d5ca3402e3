#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "qcurrents/gaussian.hpp"
#include "qcurrents/lindblad.hpp"

namespace qc {

// Model file contents. Either an explicit `hamiltonian` / `channels` pair or a `builder`
// section naming one of exampleA, exampleB, exampleC, exampleD, qpc, pauli with parameters.
// An optional `gaussian` section holds a quadratic model of the same system.
struct ModelFile {
    LindbladModel model;
    std::optional<GaussianModel> gaussian;
    std::string builder;      // empty for explicit models
    nlohmann::json params;    // builder parameters as given
};

// Complex scalars are [re, im] pairs or plain numbers; matrices are arrays of rows.
cmat matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const cmat& m);

LindbladModel build_named(const std::string& builder, const nlohmann::json& params);
std::optional<GaussianModel> build_named_gaussian(const std::string& builder, const nlohmann::json& params);

ModelFile model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const LindbladModel& model);
nlohmann::json gaussian_to_json(const GaussianModel& model);
GaussianModel gaussian_from_json(const nlohmann::json& j);

ModelFile load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const LindbladModel& model,
                const std::optional<GaussianModel>& gaussian = std::nullopt);

}  // namespace qc
