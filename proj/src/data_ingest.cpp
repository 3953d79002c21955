#include "idsfx/data_ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "idsfx/error.hpp"
#include "idsfx/log.hpp"
#include "idsfx/random.hpp"

namespace idsfx {

namespace {

constexpr std::array<std::string_view, 41> kKddNames = {
    "duration",
    "protocol_type",
    "service",
    "flag",
    "src_bytes",
    "dst_bytes",
    "land",
    "wrong_fragment",
    "urgent",
    "hot",
    "num_failed_logins",
    "logged_in",
    "num_compromised",
    "root_shell",
    "su_attempted",
    "num_root",
    "num_file_creations",
    "num_shells",
    "num_access_files",
    "num_outbound_cmds",
    "is_host_login",
    "is_guest_login",
    "count",
    "srv_count",
    "serror_rate",
    "srv_serror_rate",
    "rerror_rate",
    "srv_rerror_rate",
    "same_srv_rate",
    "diff_srv_rate",
    "srv_diff_host_rate",
    "dst_host_count",
    "dst_host_srv_count",
    "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate",
    "dst_host_srv_serror_rate",
    "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
};

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_missing_marker(std::string_view raw) {
    const auto s = trim(raw);
    if (s.empty()) return true;
    if (s.size() > 9) return false;
    const auto l = lower(s);
    return l == "nan" || l == "infinity" || l == "-infinity" || l == "+infinity";
}

// Parses a numeric cell. Missing markers and non-finite values give nullopt;
// anything unparsable sets ok=false.
std::optional<double> parse_number(std::string_view raw, bool& ok) {
    ok = true;
    if (is_missing_marker(raw)) return std::nullopt;
    auto s = trim(raw);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        ok = false;
        return std::nullopt;
    }
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

// Length of the UTF-8 sequence starting at data[i], or 0 when invalid.
std::size_t utf8_sequence_length(std::string_view data, std::size_t i) {
    const auto b0 = static_cast<unsigned char>(data[i]);
    if (b0 < 0x80) return 1;
    std::size_t len = 0;
    std::uint32_t min_cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        min_cp = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        min_cp = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        min_cp = 0x10000;
    } else {
        return 0;
    }
    if (i + len > data.size()) return 0;
    std::uint32_t cp = b0 & (0x7F >> len);
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(data[i + k]);
        if ((b & 0xC0) != 0x80) return 0;
        cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
    return len;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::uint32_t windows1252_code_point(unsigned char b) {
    // 0x80-0x9F differ from Latin-1; undefined slots map to U+FFFD.
    static constexpr std::array<std::uint16_t, 32> kHigh = {
        0x20AC, 0xFFFD, 0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
        0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0xFFFD, 0x017D, 0xFFFD,
        0xFFFD, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
        0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0xFFFD, 0x017E, 0x0178,
    };
    if (b >= 0x80 && b <= 0x9F) return kHigh[b - 0x80];
    return b;
}

// Returns the text as valid UTF-8 (with the BOM stripped), or throws DecodeError.
std::string decode_text(std::string_view raw, TextEncoding encoding) {
    std::size_t start = 0;
    if (raw.substr(0, 3) == "\xEF\xBB\xBF") start = 3;
    std::string out;
    out.reserve(raw.size() - start);
    for (std::size_t i = start; i < raw.size();) {
        const std::size_t len = utf8_sequence_length(raw, i);
        if (len > 0) {
            out.append(raw.substr(i, len));
            i += len;
            continue;
        }
        if (encoding == TextEncoding::Utf8Strict) {
            std::ostringstream msg;
            msg << "invalid UTF-8 at byte offset " << i;
            throw DecodeError(msg.str(), i);
        }
        append_utf8(out, windows1252_code_point(static_cast<unsigned char>(raw[i])));
        ++i;
    }
    return out;
}

// RFC-4180 record reader over an in-memory buffer. Quoted fields may contain
// commas, doubled quotes and line breaks. Blank lines are skipped.
class CsvReader {
public:
    explicit CsvReader(std::string_view text) : text_(text) {}

    // Reads the next record into fields. Returns false at end of input.
    bool next(std::vector<std::string>& fields) {
        while (pos_ < text_.size() && (text_[pos_] == '\n' || text_[pos_] == '\r')) {
            if (text_[pos_] == '\n') ++line_;
            ++pos_;
        }
        if (pos_ >= text_.size()) return false;
        record_line_ = line_;
        fields.clear();
        std::string field;
        bool in_quotes = false;
        bool field_was_quoted = false;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (in_quotes) {
                if (c == '"') {
                    if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
                        field.push_back('"');
                        pos_ += 2;
                        continue;
                    }
                    in_quotes = false;
                    ++pos_;
                    continue;
                }
                if (c == '\n') ++line_;
                field.push_back(c);
                ++pos_;
                continue;
            }
            if (c == '"' && !field_was_quoted && trim(field).empty()) {
                field.clear();
                in_quotes = true;
                field_was_quoted = true;
                ++pos_;
                continue;
            }
            if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
                field_was_quoted = false;
                ++pos_;
                continue;
            }
            if (c == '\r' || c == '\n') {
                if (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') ++pos_;
                ++pos_;
                ++line_;
                break;
            }
            field.push_back(c);
            ++pos_;
        }
        if (in_quotes) {
            throw ParseError("unterminated quoted field starting on line " +
                             std::to_string(record_line_));
        }
        fields.push_back(std::move(field));
        return true;
    }

    // 1-based line number where the last record began.
    std::size_t record_line() const { return record_line_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t record_line_ = 1;
};

bool all_empty(const std::vector<std::string>& fields) {
    return std::all_of(fields.begin(), fields.end(),
                       [](const std::string& f) { return trim(f).empty(); });
}

bool contains(const std::vector<std::string>& names, std::string_view name) {
    return std::find(names.begin(), names.end(), name) != names.end();
}

// Makes names unique by appending ".1", ".2", ... to later duplicates.
void deduplicate_names(std::vector<std::string>& names) {
    std::set<std::string> seen;
    for (auto& name : names) {
        if (seen.insert(name).second) continue;
        for (int k = 1;; ++k) {
            std::string candidate = name + "." + std::to_string(k);
            if (seen.insert(candidate).second) {
                log::warn("duplicate column name '" + name + "' renamed to '" + candidate + "'");
                name = std::move(candidate);
                break;
            }
        }
    }
}

struct ResolvedSchema {
    std::vector<ColumnSpec> columns;
    bool has_header = false;
    // Kinds still to be inferred from cell contents (header-based profiles).
    std::vector<bool> infer;
};

ResolvedSchema resolve_kdd_schema(const std::vector<std::string>& first, Profile profile,
                                  const LoadOptions& options) {
    ResolvedSchema schema;
    const std::size_t n = first.size();
    if (n != 42 && n != 43) {
        throw ParseError("record 0 (line 1): expected 42 or 43 cells for " +
                         std::string(to_string(profile)) + ", found " + std::to_string(n));
    }
    schema.has_header = lower(trim(first.front())) == "duration";
    for (auto name : kKddNames) {
        const bool categorical = is_kdd_categorical(name) || contains(options.categorical_columns,
                                                                      std::string(name));
        const bool ignored = contains(options.ignored_columns, std::string(name));
        schema.columns.push_back({std::string(name), ignored       ? ColumnKind::Ignored
                                                     : categorical ? ColumnKind::Categorical
                                                                   : ColumnKind::Numeric});
    }
    std::string label_name = profile == Profile::MilitaryKaggle ? "class" : "label";
    if (schema.has_header) label_name = std::string(trim(first[41]));
    schema.columns.push_back({label_name, ColumnKind::Label});
    if (n == 43) {
        std::string extra = schema.has_header ? std::string(trim(first[42])) : "difficulty";
        schema.columns.push_back({extra, ColumnKind::Ignored});
    }
    schema.infer.assign(schema.columns.size(), false);
    return schema;
}

ResolvedSchema resolve_header_schema(const std::vector<std::string>& header, Profile profile,
                                     const LoadOptions& options) {
    ResolvedSchema schema;
    schema.has_header = true;
    std::vector<std::string> names;
    for (const auto& raw : header) names.emplace_back(trim(raw));
    deduplicate_names(names);

    std::optional<std::size_t> label;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (options.label_column) {
            if (names[i] == *options.label_column) label = i;
        } else if (profile == Profile::Cicids2017) {
            if (names[i] == "Label") label = i;
        } else {
            const auto l = lower(names[i]);
            if (!label && (l == "label" || l == "class")) label = i;
        }
    }
    if (!label) {
        throw SchemaError("no label column found (expected " +
                          (options.label_column ? "'" + *options.label_column + "'"
                           : profile == Profile::Cicids2017 ? std::string("'Label'")
                                                             : std::string("'label' or 'class'")) +
                          ")");
    }

    for (std::size_t i = 0; i < names.size(); ++i) {
        ColumnSpec spec{names[i], ColumnKind::Numeric};
        bool infer = true;
        if (i == *label) {
            spec.kind = ColumnKind::Label;
            infer = false;
        } else if (contains(options.ignored_columns, names[i])) {
            spec.kind = ColumnKind::Ignored;
            infer = false;
        } else if (contains(options.categorical_columns, names[i])) {
            spec.kind = ColumnKind::Categorical;
            infer = false;
        }
        schema.columns.push_back(std::move(spec));
        schema.infer.push_back(infer);
    }
    return schema;
}

std::string record_context(std::size_t record, std::size_t line) {
    return "record " + std::to_string(record) + " (line " + std::to_string(line) + ")";
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::Numeric: return "numeric";
        case ColumnKind::Categorical: return "categorical";
        case ColumnKind::Label: return "label";
        case ColumnKind::Ignored: return "ignored";
    }
    return "?";
}

std::string_view to_string(Profile profile) {
    switch (profile) {
        case Profile::NslKdd: return "nsl-kdd";
        case Profile::Cicids2017: return "cicids2017";
        case Profile::MilitaryKaggle: return "military-kaggle";
        case Profile::Generic: return "generic";
    }
    return "?";
}

Profile parse_profile(std::string_view name) {
    const auto l = lower(trim(name));
    if (l == "nsl-kdd" || l == "nslkdd" || l == "nsl_kdd") return Profile::NslKdd;
    if (l == "cicids2017" || l == "cicids-2017" || l == "cicids") return Profile::Cicids2017;
    if (l == "military-kaggle" || l == "militarykaggle" || l == "military" || l == "kaggle") {
        return Profile::MilitaryKaggle;
    }
    if (l == "generic") return Profile::Generic;
    throw ArgumentError("unknown dataset profile '" + std::string(name) +
                        "' (expected nsl-kdd, cicids2017, military-kaggle or generic)");
}

const std::vector<std::string>& kdd_feature_names() {
    static const std::vector<std::string> names(kKddNames.begin(), kKddNames.end());
    return names;
}

bool is_kdd_categorical(std::string_view name) {
    return name == "protocol_type" || name == "service" || name == "flag";
}

Dataset::Dataset(std::vector<Column> columns, std::size_t rows)
    : columns_(std::move(columns)), rows_(rows) {
    std::set<std::string_view> names;
    std::size_t labels = 0;
    for (const auto& c : columns_) {
        if (!names.insert(c.spec.name).second) {
            throw SchemaError("duplicate column name '" + c.spec.name + "'");
        }
        const bool numeric = c.is_numeric();
        const std::size_t n = numeric ? c.values.size() : c.tokens.size();
        if (n != rows_ || (numeric && c.missing.size() != rows_)) {
            throw SchemaError("column '" + c.spec.name + "' has " + std::to_string(n) +
                              " cells, expected " + std::to_string(rows_));
        }
        if (c.spec.kind == ColumnKind::Label) {
            ++labels;
            for (std::size_t r = 0; r < rows_; ++r) {
                if (!c.tokens[r]) {
                    throw SchemaError("missing label in row " + std::to_string(r));
                }
            }
        }
    }
    if (labels > 1) throw SchemaError("more than one label column");
}

std::vector<ColumnSpec> Dataset::schema() const {
    std::vector<ColumnSpec> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) out.push_back(c.spec);
    return out;
}

std::optional<std::size_t> Dataset::find(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].spec.name == name) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> Dataset::label_index() const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].spec.kind == ColumnKind::Label) return i;
    }
    return std::nullopt;
}

std::size_t Dataset::count_kind(ColumnKind kind) const {
    return static_cast<std::size_t>(std::count_if(
        columns_.begin(), columns_.end(), [kind](const Column& c) { return c.spec.kind == kind; }));
}

Dataset Dataset::select_rows(std::span<const std::size_t> indices) const {
    std::vector<Column> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) {
        Column nc{c.spec, {}, {}, {}};
        if (c.is_numeric()) {
            nc.values.reserve(indices.size());
            nc.missing.reserve(indices.size());
            for (auto r : indices) {
                nc.values.push_back(c.values.at(r));
                nc.missing.push_back(c.missing.at(r));
            }
        } else {
            nc.tokens.reserve(indices.size());
            for (auto r : indices) nc.tokens.push_back(c.tokens.at(r));
        }
        out.push_back(std::move(nc));
    }
    return Dataset(std::move(out), indices.size());
}

Dataset Dataset::drop_columns(std::span<const std::size_t> indices) const {
    std::vector<Column> out;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (std::find(indices.begin(), indices.end(), i) == indices.end()) {
            out.push_back(columns_[i]);
        }
    }
    return Dataset(std::move(out), rows_);
}

Dataset parse_csv(std::string_view raw_text, Profile profile, const LoadOptions& options) {
    const TextEncoding encoding = options.encoding.value_or(
        profile == Profile::Cicids2017 ? TextEncoding::Utf8WithWindows1252Fallback
                                       : TextEncoding::Utf8Strict);
    const std::string text = decode_text(raw_text, encoding);

    CsvReader reader(text);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw EmptyDatasetError("empty dataset");

    const bool kdd = profile == Profile::NslKdd || profile == Profile::MilitaryKaggle;
    ResolvedSchema schema = kdd ? resolve_kdd_schema(fields, profile, options)
                                : resolve_header_schema(fields, profile, options);
    const std::size_t width = schema.columns.size();

    // Pass 1: validate cell counts and infer numeric vs categorical where needed.
    std::vector<bool> numeric_ok(width, true);
    std::size_t records = 0;
    std::size_t skipped_empty = 0;
    {
        CsvReader pass(text);
        if (schema.has_header) pass.next(fields);
        while (pass.next(fields)) {
            if (fields.size() != width) {
                if (all_empty(fields)) {
                    ++skipped_empty;
                    continue;
                }
                throw ParseError(record_context(records, pass.record_line()) + ": expected " +
                                 std::to_string(width) + " cells, found " +
                                 std::to_string(fields.size()));
            }
            if (all_empty(fields)) {
                ++skipped_empty;
                continue;
            }
            for (std::size_t c = 0; c < width; ++c) {
                if (!schema.infer[c] || !numeric_ok[c]) continue;
                bool ok = true;
                parse_number(fields[c], ok);
                numeric_ok[c] = ok;
            }
            ++records;
        }
    }
    if (records == 0) throw EmptyDatasetError("empty dataset");
    if (skipped_empty > 0) {
        log::warn("skipped " + std::to_string(skipped_empty) + " all-empty records");
    }
    for (std::size_t c = 0; c < width; ++c) {
        if (schema.infer[c] && !numeric_ok[c]) schema.columns[c].kind = ColumnKind::Categorical;
    }

    // Pass 2: store cells.
    std::vector<Dataset::Column> columns;
    columns.reserve(width);
    for (const auto& spec : schema.columns) {
        Dataset::Column col{spec, {}, {}, {}};
        if (col.is_numeric()) {
            col.values.reserve(records);
            col.missing.reserve(records);
        } else {
            col.tokens.reserve(records);
        }
        columns.push_back(std::move(col));
    }

    CsvReader pass(text);
    if (schema.has_header) pass.next(fields);
    std::size_t record = 0;
    while (pass.next(fields)) {
        if (all_empty(fields)) continue;
        for (std::size_t c = 0; c < width; ++c) {
            auto& col = columns[c];
            if (col.is_numeric()) {
                bool ok = true;
                const auto v = parse_number(fields[c], ok);
                if (!ok) {
                    throw ParseError(record_context(record, pass.record_line()) + ": column '" +
                                     col.spec.name + "' holds non-numeric value '" + fields[c] +
                                     "'");
                }
                col.values.push_back(v.value_or(0.0));
                col.missing.push_back(!v.has_value());
            } else {
                const auto t = trim(fields[c]);
                if (t.empty()) {
                    if (col.spec.kind == ColumnKind::Label) {
                        throw SchemaError(record_context(record, pass.record_line()) +
                                          ": missing label");
                    }
                    col.tokens.emplace_back(std::nullopt);
                } else if (col.spec.kind == ColumnKind::Categorical && is_missing_marker(t)) {
                    col.tokens.emplace_back(std::nullopt);
                } else {
                    col.tokens.emplace_back(std::string(t));
                }
            }
        }
        ++record;
    }
    return Dataset(std::move(columns), records);
}

Dataset load_csv(const std::filesystem::path& path, Profile profile, const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string raw = std::move(buffer).str();
    if (trim(raw).empty()) throw EmptyDatasetError("empty dataset: '" + path.string() + "'");
    return parse_csv(raw, profile, options);
}

namespace {

void write_field(std::ostream& out, std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos && trim(s) == s) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

}  // namespace

void write_csv(const Dataset& d, std::ostream& out) {
    const auto& cols = d.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) out << ',';
        write_field(out, cols[c].spec.name);
    }
    out << '\n';
    std::array<char, 32> buf{};
    for (std::size_t r = 0; r < d.rows(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out << ',';
            const auto& col = cols[c];
            if (col.is_numeric()) {
                if (col.missing[r]) continue;
                const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), col.values[r]);
                out.write(buf.data(), res.ptr - buf.data());
            } else if (col.tokens[r]) {
                write_field(out, *col.tokens[r]);
            }
        }
        out << '\n';
    }
}

std::pair<Dataset, LabelVector> split_xy(const Dataset& d) {
    const auto label = d.label_index();
    if (!label) throw SchemaError("dataset has no label column");
    std::vector<std::size_t> drop;
    for (std::size_t i = 0; i < d.column_count(); ++i) {
        const auto kind = d.column(i).spec.kind;
        if (kind == ColumnKind::Label || kind == ColumnKind::Ignored) drop.push_back(i);
    }
    LabelVector labels;
    labels.reserve(d.rows());
    for (const auto& t : d.column(*label).tokens) labels.push_back(*t);
    return {d.drop_columns(drop), std::move(labels)};
}

SplitIndices split_indices(std::span<const std::string> labels, double test_fraction,
                           std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ArgumentError("test fraction must lie in (0, 1)");
    }
    const std::size_t n = labels.size();
    if (n < 2) throw ArgumentError("need at least 2 rows to split");
    const auto n_test = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n))), 1, n - 1);

    std::map<std::string_view, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);
    const bool stratify =
        std::all_of(by_class.begin(), by_class.end(), [](const auto& kv) { return kv.second.size() >= 2; });

    Rng rng(seed);
    SplitIndices out;
    if (!stratify) {
        log::warn("some class has fewer than 2 rows; falling back to an unstratified split");
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        rng.shuffle(std::span(all));
        out.test.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_test));
        out.train.assign(all.begin() + static_cast<std::ptrdiff_t>(n_test), all.end());
    } else {
        // Largest-remainder allocation of the test quota across classes.
        struct Quota {
            std::vector<std::size_t>* rows;
            std::size_t take;
            double remainder;
        };
        std::vector<Quota> quotas;
        std::size_t assigned = 0;
        for (auto& [name, rows] : by_class) {
            const double ideal = test_fraction * static_cast<double>(rows.size());
            const auto base = static_cast<std::size_t>(std::floor(ideal));
            quotas.push_back({&rows, base, ideal - static_cast<double>(base)});
            assigned += base;
        }
        std::vector<std::size_t> order(quotas.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return quotas[a].remainder > quotas[b].remainder;
        });
        for (std::size_t k = 0; assigned < n_test && k < order.size(); ++k) {
            auto& q = quotas[order[k]];
            if (q.take < q.rows->size()) {
                ++q.take;
                ++assigned;
            }
        }
        for (auto& q : quotas) {
            rng.shuffle(std::span(*q.rows));
            out.test.insert(out.test.end(), q.rows->begin(),
                            q.rows->begin() + static_cast<std::ptrdiff_t>(q.take));
            out.train.insert(out.train.end(),
                             q.rows->begin() + static_cast<std::ptrdiff_t>(q.take), q.rows->end());
        }
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    if (out.train.empty() || out.test.empty()) {
        throw ArgumentError("split leaves an empty part; adjust the test fraction");
    }
    return out;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double test_fraction,
                                             std::uint64_t seed) {
    LabelVector labels;
    if (const auto label = d.label_index()) {
        for (const auto& t : d.column(*label).tokens) labels.push_back(*t);
    } else {
        labels.assign(d.rows(), std::string());
    }
    const auto idx = split_indices(labels, test_fraction, seed);
    return {d.select_rows(idx.train), d.select_rows(idx.test)};
}

}  // namespace idsfx
