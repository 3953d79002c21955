#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "idsfx/classifiers.hpp"
#include "idsfx/matrix.hpp"

namespace idsfx {

double accuracy(std::span<const int> pred, std::span<const int> truth);

using Confusion = std::vector<std::vector<std::size_t>>;

// Entry [t][p] counts rows with truth t predicted as p.
Confusion confusion(std::span<const int> pred, std::span<const int> truth, std::size_t k);

struct CorrMatrix {
    Matrix values;  // q x q
    std::vector<std::string> names;
    // Constant columns: diagonal 1, every other entry in their row/column 0.
    std::vector<bool> constant;
};

CorrMatrix pearson_corr(const FeatureMatrix& x);

struct ClassifierResult {
    Algorithm algorithm = Algorithm::GaussianNB;
    std::string variant;  // "baseline" or "extracted"
    std::size_t features = 0;
    double accuracy = 0.0;
    Confusion confusion;

    friend bool operator==(const ClassifierResult&, const ClassifierResult&) = default;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;  // rounded to milliseconds

    friend bool operator==(const StageTiming&, const StageTiming&) = default;
};

struct EvalReport {
    std::string dataset_id;
    nlohmann::ordered_json config;
    std::vector<std::string> classes;  // decoded class names, code order
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::vector<ClassifierResult> results;
    std::vector<StageTiming> timings;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

enum class ReportFormat { Csv, Json };

// CSV: one (classifier, variant, features, accuracy) row per result.
// JSON: the whole report. Floats carry 9 significant digits. Timings are
// written only when present.
void export_report(const EvalReport& report, const std::filesystem::path& path, ReportFormat format);
// CSV: square table with a header row and a leading name column.
void export_report(const CorrMatrix& corr, const std::filesystem::path& path, ReportFormat format);

nlohmann::ordered_json to_json(const EvalReport& report);
// Accuracy is recomputed from the stored confusion matrix.
EvalReport eval_report_from_json(const nlohmann::ordered_json& j);
EvalReport import_report_json(const std::filesystem::path& path);

CorrMatrix import_corr_csv(const std::filesystem::path& path);

// Rounds to 9 significant digits (the precision used in exported files).
double round9(double value);

}  // namespace idsfx
