#pragma once

#include <stdexcept>
#include <string>

#include "helmecs/bicgstab.hpp"
#include "helmecs/preconditioner.hpp"

namespace helmecs {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputPaths {
    std::string report;
    std::string field;
    std::string spectrum;

    bool operator==(const OutputPaths&) const = default;
};

/// One experiment: model + grid, preconditioner, cycle and solver tunables,
/// output destinations. Serializes to a single JSON document; every field is
/// written explicitly so parse(serialize(c)) == c.
struct ExperimentConfig {
    std::string label;
    ModelProblem model;
    PreconditionerSpec preconditioner;
    MgConfig mg;
    KrylovConfig krylov;
    OutputPaths outputs;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const std::string& json_text);
std::string serialize_config(const ExperimentConfig& config);

ExperimentConfig load_config_file(const std::string& path);
void save_config_file(const ExperimentConfig& config, const std::string& path);

}  // namespace helmecs
