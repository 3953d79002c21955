#include "idsfx/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "idsfx/error.hpp"
#include "idsfx/kernels.hpp"
#include "idsfx/log.hpp"

namespace idsfx {

const ColumnStats* SummaryStats::find(std::string_view name) const {
    for (const auto& c : columns) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

SummaryStats describe(const Dataset& x) {
    if (x.count_kind(ColumnKind::Numeric) == 0) {
        throw ArgumentError("describe needs at least one numeric column");
    }
    SummaryStats stats;
    stats.rows = x.rows();
    for (const auto& col : x.columns()) {
        const auto kind = col.spec.kind;
        if (kind == ColumnKind::Label || kind == ColumnKind::Ignored) continue;
        ColumnStats s;
        s.name = col.spec.name;
        s.kind = kind;
        if (col.is_numeric()) {
            double sum = 0.0;
            s.min = std::numeric_limits<double>::infinity();
            s.max = -std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < x.rows(); ++r) {
                if (col.missing[r]) continue;
                const double v = col.values[r];
                sum += v;
                s.min = std::min(s.min, v);
                s.max = std::max(s.max, v);
                ++s.count;
            }
            s.missing = x.rows() - s.count;
            if (s.count == 0) {
                s.mean = s.std = s.min = s.max = std::numeric_limits<double>::quiet_NaN();
            } else {
                s.mean = sum / static_cast<double>(s.count);
                double sq = 0.0;
                for (std::size_t r = 0; r < x.rows(); ++r) {
                    if (col.missing[r]) continue;
                    const double d = col.values[r] - s.mean;
                    sq += d * d;
                }
                s.std = s.count > 1 ? std::sqrt(sq / static_cast<double>(s.count - 1)) : 0.0;
            }
        } else {
            std::set<std::string_view> distinct;
            for (const auto& t : col.tokens) {
                if (!t) continue;
                ++s.count;
                distinct.insert(*t);
            }
            s.missing = x.rows() - s.count;
            s.distinct = distinct.size();
        }
        stats.columns.push_back(std::move(s));
    }
    return stats;
}

double scaled_mean(const ColumnStats& s) { return s.max > 0.0 ? s.mean / s.max : s.mean; }

DropResult drop_near_zero_mean(const Dataset& x, const SummaryStats& stats, double threshold) {
    if (!(threshold >= 0.0)) throw ArgumentError("drop threshold must be >= 0");
    DropResult out;
    std::vector<std::size_t> indices;
    std::size_t numeric = 0;
    for (std::size_t i = 0; i < x.column_count(); ++i) {
        const auto& spec = x.column(i).spec;
        if (spec.kind != ColumnKind::Numeric) continue;
        ++numeric;
        const ColumnStats* s = stats.find(spec.name);
        if (!s) throw SchemaError("no statistics for column '" + spec.name + "'");
        if (std::abs(scaled_mean(*s)) <= threshold) {
            indices.push_back(i);
            out.dropped.push_back(spec.name);
        }
    }
    if (numeric > 0 && indices.size() == numeric) {
        throw PipelineError("drop_near_zero_mean: every numeric column has |scaled mean| <= " +
                            std::to_string(threshold) + "; lower the threshold");
    }
    out.data = x.drop_columns(indices);
    return out;
}

ImputeModel impute_fit(const Dataset& x) {
    ImputeModel model;
    for (const auto& col : x.columns()) {
        if (col.is_numeric()) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t r = 0; r < x.rows(); ++r) {
                if (col.missing[r]) continue;
                sum += col.values[r];
                ++count;
            }
            if (count == 0) {
                throw DomainError("impute: column '" + col.spec.name + "' has no values");
            }
            model.numeric.push_back({col.spec.name, sum / static_cast<double>(count)});
        } else if (col.spec.kind == ColumnKind::Categorical) {
            std::map<std::string_view, std::size_t> freq;
            for (const auto& t : col.tokens) {
                if (t) ++freq[*t];
            }
            if (freq.empty()) {
                throw DomainError("impute: column '" + col.spec.name + "' has no values");
            }
            // Most frequent token, lexicographically first on ties.
            auto best = freq.begin();
            for (auto it = freq.begin(); it != freq.end(); ++it) {
                if (it->second > best->second) best = it;
            }
            model.categorical.push_back({col.spec.name, std::string(best->first)});
        }
    }
    return model;
}

Dataset impute_apply(const ImputeModel& model, const Dataset& x) {
    std::vector<Dataset::Column> columns = x.columns();
    for (auto& col : columns) {
        if (col.is_numeric()) {
            const auto it = std::find_if(model.numeric.begin(), model.numeric.end(),
                                         [&](const auto& f) { return f.column == col.spec.name; });
            const bool any_missing = std::find(col.missing.begin(), col.missing.end(), true) !=
                                     col.missing.end();
            if (it == model.numeric.end()) {
                if (any_missing) {
                    throw SchemaError("impute: no fitted mean for column '" + col.spec.name + "'");
                }
                continue;
            }
            for (std::size_t r = 0; r < col.values.size(); ++r) {
                if (col.missing[r]) {
                    col.values[r] = it->mean;
                    col.missing[r] = false;
                }
            }
        } else if (col.spec.kind == ColumnKind::Categorical) {
            const auto it =
                std::find_if(model.categorical.begin(), model.categorical.end(),
                             [&](const auto& f) { return f.column == col.spec.name; });
            for (auto& t : col.tokens) {
                if (t) continue;
                if (it == model.categorical.end()) {
                    throw SchemaError("impute: no fitted token for column '" + col.spec.name + "'");
                }
                t = it->token;
            }
        }
    }
    return Dataset(std::move(columns), x.rows());
}

TokenTable::TokenTable(std::vector<std::string> sorted_unique_tokens)
    : tokens_(std::move(sorted_unique_tokens)) {
    if (!std::is_sorted(tokens_.begin(), tokens_.end()) ||
        std::adjacent_find(tokens_.begin(), tokens_.end()) != tokens_.end()) {
        throw SchemaError("token table must be sorted and unique");
    }
}

TokenTable TokenTable::fit(const std::vector<std::string>& tokens) {
    std::vector<std::string> sorted = tokens;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    return TokenTable(std::move(sorted));
}

std::optional<int> TokenTable::code(std::string_view token) const {
    const auto it = std::lower_bound(tokens_.begin(), tokens_.end(), token);
    if (it == tokens_.end() || *it != token) return std::nullopt;
    return static_cast<int>(it - tokens_.begin());
}

const std::string& TokenTable::token(int code) const {
    if (code < 0 || static_cast<std::size_t>(code) >= tokens_.size()) {
        throw ArgumentError("code " + std::to_string(code) + " outside token table");
    }
    return tokens_[static_cast<std::size_t>(code)];
}

std::pair<std::vector<int>, LabelEncoder> encode_labels(const LabelVector& y) {
    if (y.empty()) throw ArgumentError("encode_labels: empty label vector");
    LabelEncoder enc = TokenTable::fit(y);
    return {apply_labels(enc, y), std::move(enc)};
}

std::vector<int> apply_labels(const LabelEncoder& enc, const LabelVector& y) {
    std::vector<int> codes;
    codes.reserve(y.size());
    for (const auto& label : y) {
        const auto c = enc.code(label);
        if (!c) throw SchemaError("label '" + label + "' not known to the label encoder");
        codes.push_back(*c);
    }
    return codes;
}

LabelVector decode_labels(const LabelEncoder& enc, const std::vector<int>& codes) {
    LabelVector out;
    out.reserve(codes.size());
    for (int c : codes) out.push_back(enc.token(c));
    return out;
}

const TokenTable* CategoricalEncoder::find(std::string_view column) const {
    for (const auto& e : columns) {
        if (e.column == column) return &e.table;
    }
    return nullptr;
}

std::pair<FeatureMatrix, CategoricalEncoder> encode_categoricals(
    const Dataset& x, const std::optional<CategoricalEncoder>& fitted) {
    CategoricalEncoder enc;
    if (fitted) {
        enc = *fitted;
        std::vector<std::string> have;
        for (const auto& col : x.columns()) {
            if (col.spec.kind == ColumnKind::Categorical) have.push_back(col.spec.name);
        }
        std::vector<std::string> want;
        for (const auto& e : enc.columns) want.push_back(e.column);
        if (have != want) {
            throw SchemaError("categorical columns do not match the fitted encoder");
        }
    } else {
        for (const auto& col : x.columns()) {
            if (col.spec.kind != ColumnKind::Categorical) continue;
            std::vector<std::string> tokens;
            for (const auto& t : col.tokens) {
                if (t) tokens.push_back(*t);
            }
            enc.columns.push_back({col.spec.name, TokenTable::fit(tokens)});
        }
    }

    std::vector<const Dataset::Column*> features;
    for (const auto& col : x.columns()) {
        if (col.spec.kind == ColumnKind::Numeric || col.spec.kind == ColumnKind::Categorical) {
            features.push_back(&col);
        }
    }
    FeatureMatrix out{Matrix(x.rows(), features.size()), {}};
    for (std::size_t j = 0; j < features.size(); ++j) {
        const auto& col = *features[j];
        out.names.push_back(col.spec.name);
        if (col.is_numeric()) {
            for (std::size_t r = 0; r < x.rows(); ++r) {
                if (col.missing[r]) {
                    throw DomainError("column '" + col.spec.name + "' has missing cells; impute first");
                }
                out.values(r, j) = col.values[r];
            }
            continue;
        }
        const TokenTable& table = *enc.find(col.spec.name);
        std::size_t unseen = 0;
        for (std::size_t r = 0; r < x.rows(); ++r) {
            std::optional<int> code;
            if (col.tokens[r]) code = table.code(*col.tokens[r]);
            if (!code) ++unseen;
            out.values(r, j) = static_cast<double>(code.value_or(static_cast<int>(table.size())));
        }
        if (unseen > 0) {
            log::warn("column '" + col.spec.name + "': " + std::to_string(unseen) +
                      " unseen or missing tokens mapped to reserved code " +
                      std::to_string(table.size()));
        }
    }
    return {std::move(out), std::move(enc)};
}

TfidfModel tfidf_fit(const FeatureMatrix& x, bool l2_normalize) {
    if (x.rows() == 0 || x.cols() == 0) throw ArgumentError("tfidf_fit: empty matrix");
    const std::size_t p = x.rows();
    const std::size_t q = x.cols();
    TfidfModel model;
    model.l2_normalize = l2_normalize;
    model.shift.assign(q, 0.0);
    model.idf.assign(q, 0.0);
    for (std::size_t j = 0; j < q; ++j) {
        double lo = 0.0;
        for (std::size_t i = 0; i < p; ++i) lo = std::min(lo, x.values(i, j));
        model.shift[j] = lo < 0.0 ? -lo : 0.0;
        std::size_t df = 0;
        for (std::size_t i = 0; i < p; ++i) {
            if (x.values(i, j) + model.shift[j] > 0.0) ++df;
        }
        model.idf[j] = std::log((1.0 + static_cast<double>(p)) / (1.0 + static_cast<double>(df))) + 1.0;
    }
    return model;
}

FeatureMatrix tfidf_apply(const TfidfModel& model, const FeatureMatrix& x) {
    if (x.rows() == 0 || x.cols() == 0) throw ArgumentError("tfidf_apply: empty matrix");
    if (x.cols() != model.idf.size()) {
        throw ShapeError("tfidf_apply: model has " + std::to_string(model.idf.size()) +
                         " columns, input has " + std::to_string(x.cols()));
    }
    FeatureMatrix out = x;
    kernels::parallel::tfidf_rows(out.values, model.shift, model.idf, model.l2_normalize);
    return out;
}

}  // namespace idsfx
