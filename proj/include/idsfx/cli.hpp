#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "idsfx/classifiers.hpp"
#include "idsfx/data_ingest.hpp"
#include "idsfx/pipeline.hpp"

namespace idsfx {

struct RunConfig {
    std::filesystem::path dataset;
    Profile profile = Profile::NslKdd;
    std::string dataset_id;  // defaults to the dataset file stem
    PipelineConfig pipeline;
    std::vector<ClassifierSpec> classifiers;  // defaults to all six
    double test_fraction = 0.25;
    std::uint64_t seed = 0;
    std::filesystem::path out = "idsfx-out";
    std::optional<std::filesystem::path> pipeline_file;  // transform only

    // Copies the run seed into the pipeline and every classifier, then checks
    // ranges. ConfigError on any invalid value.
    void resolve();
};

nlohmann::ordered_json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);

// CRC-32 of the resolved config without the output directory, as 8 hex digits.
std::string config_hash(const RunConfig& cfg);

// Entry point of the idsfx tool. args excludes the program name. Returns the
// process exit code: 0 success, 2 usage or config error, 1 runtime error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace idsfx
