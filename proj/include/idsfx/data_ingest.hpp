#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace idsfx {

enum class ColumnKind { Numeric, Categorical, Label, Ignored };

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;

    friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

std::string_view to_string(ColumnKind kind);

// Which built-in schema the loader applies.
//   NslKdd, MilitaryKaggle: the 41 KDD features + label, optional trailing
//     difficulty column (marked Ignored), header optional.
//   Cicids2017: header required, names trimmed, "Label" column is the label.
//   Generic: header required, label column named "label"/"class" or given
//     explicitly, kinds inferred from the cells.
enum class Profile { NslKdd, Cicids2017, MilitaryKaggle, Generic };

std::string_view to_string(Profile profile);
Profile parse_profile(std::string_view name);

enum class TextEncoding {
    Utf8Strict,
    // Invalid UTF-8 bytes are read as Windows-1252 and transcoded. The public
    // CICIDS-2017 CSVs contain a raw 0x96 (en dash) in their web-attack labels.
    Utf8WithWindows1252Fallback,
};

struct LoadOptions {
    std::optional<std::string> label_column;
    std::vector<std::string> categorical_columns;
    std::vector<std::string> ignored_columns;
    // Defaults per profile: Cicids2017 falls back to Windows-1252, the rest are strict.
    std::optional<TextEncoding> encoding;
};

// The 41 canonical KDD feature names in file order.
const std::vector<std::string>& kdd_feature_names();
bool is_kdd_categorical(std::string_view name);

// Column-oriented table. Numeric cells are finite or Missing; token cells
// (categorical, label, ignored) are text or Missing. Immutable once built.
class Dataset {
public:
    struct Column {
        ColumnSpec spec;
        // Numeric columns use values/missing; all other kinds use tokens.
        std::vector<double> values;
        std::vector<bool> missing;
        std::vector<std::optional<std::string>> tokens;

        bool is_numeric() const { return spec.kind == ColumnKind::Numeric; }
        std::optional<double> number(std::size_t row) const {
            if (missing[row]) return std::nullopt;
            return values[row];
        }
    };

    Dataset() = default;
    // Validates cell counts and name uniqueness. A Label column, when present,
    // must be unique and have no missing cells.
    Dataset(std::vector<Column> columns, std::size_t rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t column_count() const noexcept { return columns_.size(); }
    const std::vector<Column>& columns() const noexcept { return columns_; }
    const Column& column(std::size_t i) const { return columns_.at(i); }
    std::vector<ColumnSpec> schema() const;

    std::optional<std::size_t> find(std::string_view name) const;
    std::optional<std::size_t> label_index() const;
    std::size_t count_kind(ColumnKind kind) const;

    Dataset select_rows(std::span<const std::size_t> indices) const;
    Dataset drop_columns(std::span<const std::size_t> indices) const;

private:
    std::vector<Column> columns_;
    std::size_t rows_ = 0;
};

using LabelVector = std::vector<std::string>;

Dataset load_csv(const std::filesystem::path& path, Profile profile,
                 const LoadOptions& options = {});
Dataset parse_csv(std::string_view text, Profile profile, const LoadOptions& options = {});

// Writes a header row followed by every row. Missing cells are written empty,
// numbers in shortest round-trip form.
void write_csv(const Dataset& d, std::ostream& out);

// Features-only dataset (Label and Ignored columns removed) plus the labels.
std::pair<Dataset, LabelVector> split_xy(const Dataset& d);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Deterministic split of row indices. Stratified by label when every class has
// at least two members, plain shuffle otherwise (with a warning). Both index
// lists are returned in ascending order.
SplitIndices split_indices(std::span<const std::string> labels, double test_fraction,
                           std::uint64_t seed);

// Splits on the label column when there is one, plain shuffle otherwise.
std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double test_fraction,
                                             std::uint64_t seed);

}  // namespace idsfx
