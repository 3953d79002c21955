#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "idsfx/data_ingest.hpp"
#include "idsfx/matrix.hpp"

namespace idsfx {

// describe(): per-column statistics over non-missing cells. Categorical
// columns report a distinct-token count instead of moments.
struct ColumnStats {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    std::size_t count = 0;
    std::size_t missing = 0;
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, 0 below two cells
    double min = 0.0;
    double max = 0.0;
    std::size_t distinct = 0;
};

struct SummaryStats {
    std::size_t rows = 0;
    std::vector<ColumnStats> columns;

    const ColumnStats* find(std::string_view name) const;
};

SummaryStats describe(const Dataset& x);

// Mean used for the near-zero test: mean / max when max > 0, else the raw mean.
double scaled_mean(const ColumnStats& s);

struct DropResult {
    Dataset data;
    std::vector<std::string> dropped;  // schema order
};

// Removes numeric columns whose |scaled mean| <= threshold. Categorical
// columns are never dropped. Throws PipelineError if every numeric column
// would go.
DropResult drop_near_zero_mean(const Dataset& x, const SummaryStats& stats, double threshold);

// Mean imputation for numeric columns, most-frequent token for categorical ones.
struct ImputeModel {
    struct NumericFill {
        std::string column;
        double mean = 0.0;
    };
    struct TokenFill {
        std::string column;
        std::string token;
    };
    std::vector<NumericFill> numeric;
    std::vector<TokenFill> categorical;
};

ImputeModel impute_fit(const Dataset& x);
// Replaces missing cells with fitted values; never recomputes statistics.
Dataset impute_apply(const ImputeModel& model, const Dataset& x);

// Lexicographically ordered token -> code table.
class TokenTable {
public:
    TokenTable() = default;
    explicit TokenTable(std::vector<std::string> sorted_unique_tokens);

    // Builds the table from arbitrary tokens (sorted, de-duplicated).
    static TokenTable fit(const std::vector<std::string>& tokens);

    std::optional<int> code(std::string_view token) const;
    const std::string& token(int code) const;
    std::size_t size() const noexcept { return tokens_.size(); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    friend bool operator==(const TokenTable&, const TokenTable&) = default;

private:
    std::vector<std::string> tokens_;
};

using LabelEncoder = TokenTable;

std::pair<std::vector<int>, LabelEncoder> encode_labels(const LabelVector& y);
// Encodes with a fitted encoder; unknown labels raise SchemaError.
std::vector<int> apply_labels(const LabelEncoder& enc, const LabelVector& y);
LabelVector decode_labels(const LabelEncoder& enc, const std::vector<int>& codes);

struct CategoricalEncoder {
    struct Entry {
        std::string column;
        TokenTable table;
    };
    std::vector<Entry> columns;

    const TokenTable* find(std::string_view column) const;
};

// Turns a fully imputed feature dataset into a numeric matrix in schema order.
// Categorical columns become ordinal codes. With a fitted encoder, tokens it has
// never seen get the reserved code table.size() and a warning is logged.
std::pair<FeatureMatrix, CategoricalEncoder> encode_categoricals(
    const Dataset& x, const std::optional<CategoricalEncoder>& fitted = std::nullopt);

// Smoothed TF-IDF over numeric cells: idf(j) = ln((1+p)/(1+df(j))) + 1 with
// df(j) the number of rows where the (shifted) value is > 0, then optional row
// L2 normalisation. Negative columns are shifted up by their fitted minimum.
struct TfidfModel {
    std::vector<double> idf;
    std::vector<double> shift;
    bool l2_normalize = true;
};

TfidfModel tfidf_fit(const FeatureMatrix& x, bool l2_normalize = true);
FeatureMatrix tfidf_apply(const TfidfModel& model, const FeatureMatrix& x);

}  // namespace idsfx
