#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "idsfx/data_ingest.hpp"
#include "idsfx/matrix.hpp"
#include "idsfx/nmf.hpp"
#include "idsfx/preprocess.hpp"
#include "idsfx/select.hpp"

namespace idsfx {

struct PipelineConfig {
    int components = 30;  // U
    int select = 20;      // V
    double drop_threshold = 0.01;
    bool tfidf_enabled = true;
    // components and seed here are overridden by the fields above.
    NmfConfig nmf;
    std::uint64_t seed = 0;

    // ConfigError unless 1 <= V <= U.
    void validate() const;
};

nlohmann::ordered_json to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_config_from_json(const nlohmann::json& j, PipelineConfig base = {});

// Identifies the feature schema a pipeline was fitted on.
struct DatasetFingerprint {
    std::size_t rows = 0;
    std::vector<ColumnSpec> schema;  // feature columns only, file order
    std::string schema_hash;         // CRC-32 of "name:kind" lines

    static DatasetFingerprint of(const Dataset& features);
};

struct FittedPipeline {
    std::string format_version;
    PipelineConfig config;
    DatasetFingerprint fingerprint;

    // Stages, in the order they run.
    std::vector<std::string> dropped;  // near-zero-mean columns
    ImputeModel impute;
    CategoricalEncoder encoder;
    LabelEncoder labels;
    std::vector<std::string> encoded_names;  // columns entering TF-IDF/NMF
    std::optional<TfidfModel> tfidf;
    NmfModel nmf;
    std::vector<std::string> component_names;
    Chi2Report chi2;

    std::vector<std::string> output_names() const;
};

struct PipelineFit {
    FittedPipeline pipeline;
    FeatureMatrix features;  // p x V
    std::vector<int> labels;
};

// describe -> drop near-zero-mean -> impute -> encode -> TF-IDF -> NMF(U) ->
// chi-square SelectKBest(V) over the NMF components. U is reduced (with a
// warning) when the encoded matrix has fewer rows or columns than U.
PipelineFit pipeline_fit(const Dataset& d, const PipelineConfig& cfg);

// Applies the fitted stages to new rows. Label and ignored columns in d are
// skipped; the remaining columns must match the fitted schema by name and kind
// (any order).
FeatureMatrix pipeline_transform(const FittedPipeline& fp, const Dataset& d);

nlohmann::ordered_json to_json(const FittedPipeline& fp);
FittedPipeline pipeline_from_json(const nlohmann::ordered_json& j);

void pipeline_save(const FittedPipeline& fp, const std::filesystem::path& path);
FittedPipeline pipeline_load(const std::filesystem::path& path);

// Baseline features for comparison runs: impute, encode and optionally TF-IDF
// every feature column, with no dropping and no factorization.
struct BaselineModel {
    ImputeModel impute;
    CategoricalEncoder encoder;
    std::optional<TfidfModel> tfidf;
};

std::pair<BaselineModel, FeatureMatrix> baseline_fit(const Dataset& features, bool tfidf);
FeatureMatrix baseline_apply(const BaselineModel& model, const Dataset& features);

}  // namespace idsfx
