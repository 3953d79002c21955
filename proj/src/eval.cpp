#include "idsfx/eval.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "idsfx/error.hpp"
#include "idsfx/kernels.hpp"
#include "idsfx/persist.hpp"

namespace idsfx {

namespace {

using json = nlohmann::ordered_json;

std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing: " + std::strerror(errno));
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw IoError("failed writing " + path.string() + ": " + std::strerror(errno));
}

}  // namespace

double round9(double value) {
    if (!std::isfinite(value)) return value;
    return std::strtod(fmt9(value).c_str(), nullptr);
}

double accuracy(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size()) {
        throw ShapeError("accuracy: " + std::to_string(pred.size()) + " predictions for " +
                         std::to_string(truth.size()) + " labels");
    }
    if (truth.empty()) throw ArgumentError("accuracy: empty label vectors");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += pred[i] == truth[i];
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

Confusion confusion(std::span<const int> pred, std::span<const int> truth, std::size_t k) {
    if (pred.size() != truth.size()) throw ShapeError("confusion: length mismatch");
    Confusion m(k, std::vector<std::size_t>(k, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        for (int code : {truth[i], pred[i]}) {
            if (code < 0 || static_cast<std::size_t>(code) >= k) {
                throw ArgumentError("confusion: class code " + std::to_string(code) +
                                    " outside [0, " + std::to_string(k) + ")");
            }
        }
        ++m[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(pred[i])];
    }
    return m;
}

CorrMatrix pearson_corr(const FeatureMatrix& x) {
    if (x.rows() < 2) throw ArgumentError("pearson_corr: need at least 2 rows");
    CorrMatrix c;
    c.values = kernels::parallel::pearson(x.values, c.constant);
    c.names = x.names;
    return c;
}

json to_json(const EvalReport& r) {
    json results = json::array();
    for (const auto& res : r.results) {
        results.push_back({{"classifier", std::string(to_string(res.algorithm))},
                           {"variant", res.variant},
                           {"features", res.features},
                           {"accuracy", round9(res.accuracy)},
                           {"confusion", res.confusion}});
    }
    json j = {{"format_version", std::string(kFormatVersion)},
              {"dataset_id", r.dataset_id},
              {"config", r.config},
              {"classes", r.classes},
              {"train_rows", r.train_rows},
              {"test_rows", r.test_rows},
              {"results", results}};
    if (!r.timings.empty()) {
        json timings = json::array();
        for (const auto& t : r.timings) {
            timings.push_back({{"stage", t.stage}, {"seconds", round9(t.seconds)}});
        }
        j["timings"] = timings;
    }
    return j;
}

EvalReport eval_report_from_json(const nlohmann::ordered_json& j) {
    try {
        EvalReport r;
        r.dataset_id = j.at("dataset_id").get<std::string>();
        r.config = j.at("config");
        r.classes = j.at("classes").get<std::vector<std::string>>();
        r.train_rows = j.at("train_rows").get<std::size_t>();
        r.test_rows = j.at("test_rows").get<std::size_t>();
        for (const auto& res : j.at("results")) {
            ClassifierResult c;
            c.algorithm = parse_algorithm(res.at("classifier").get<std::string>());
            c.variant = res.at("variant").get<std::string>();
            c.features = res.at("features").get<std::size_t>();
            c.confusion = res.at("confusion").get<Confusion>();
            std::size_t hits = 0, total = 0;
            for (std::size_t t = 0; t < c.confusion.size(); ++t) {
                for (std::size_t p = 0; p < c.confusion[t].size(); ++p) {
                    total += c.confusion[t][p];
                    if (t == p) hits += c.confusion[t][p];
                }
            }
            c.accuracy = total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
            r.results.push_back(std::move(c));
        }
        if (j.contains("timings")) {
            for (const auto& t : j.at("timings")) {
                r.timings.push_back({t.at("stage").get<std::string>(), t.at("seconds").get<double>()});
            }
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report JSON: ") + e.what());
    }
}

EvalReport import_report_json(const std::filesystem::path& path) {
    try {
        return eval_report_from_json(json::parse(read_text_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void export_report(const EvalReport& report, const std::filesystem::path& path, ReportFormat format) {
    auto out = open_out(path);
    if (format == ReportFormat::Json) {
        out << to_json(report).dump(2) << '\n';
    } else {
        out << "classifier,variant,features,accuracy\n";
        for (const auto& r : report.results) {
            out << to_string(r.algorithm) << ',' << csv_field(r.variant) << ',' << r.features
                << ',' << fmt9(r.accuracy) << '\n';
        }
    }
    finish(out, path);
}

void export_report(const CorrMatrix& corr, const std::filesystem::path& path, ReportFormat format) {
    const std::size_t q = corr.names.size();
    auto out = open_out(path);
    if (format == ReportFormat::Json) {
        json values = json::array();
        for (std::size_t i = 0; i < q; ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < q; ++j) row.push_back(round9(corr.values(i, j)));
            values.push_back(row);
        }
        json constant = json::array();
        for (std::size_t i = 0; i < q; ++i) {
            if (corr.constant[i]) constant.push_back(corr.names[i]);
        }
        out << json{{"names", corr.names}, {"constant", constant}, {"values", values}}.dump(2)
            << '\n';
    } else {
        for (const auto& n : corr.names) out << ',' << csv_field(n);
        out << '\n';
        for (std::size_t i = 0; i < q; ++i) {
            out << csv_field(corr.names[i]);
            for (std::size_t j = 0; j < q; ++j) out << ',' << fmt9(corr.values(i, j));
            out << '\n';
        }
    }
    finish(out, path);
}

CorrMatrix import_corr_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty correlation file");
    auto header = split_csv_line(line);
    if (header.empty() || !header[0].empty()) {
        throw ParseError(path.string() + ": header must start with an empty cell");
    }
    CorrMatrix c;
    c.names.assign(header.begin() + 1, header.end());
    const std::size_t q = c.names.size();
    c.values = Matrix(q, q);
    c.constant.assign(q, false);
    for (std::size_t i = 0; i < q; ++i) {
        if (!std::getline(in, line)) throw ParseError(path.string() + ": too few rows");
        const auto fields = split_csv_line(line);
        if (fields.size() != q + 1 || fields[0] != c.names[i]) {
            throw ParseError(path.string() + ": row " + std::to_string(i + 1) + " is malformed");
        }
        for (std::size_t j = 0; j < q; ++j) {
            char* end = nullptr;
            c.values(i, j) = std::strtod(fields[j + 1].c_str(), &end);
            if (end == fields[j + 1].c_str()) {
                throw ParseError(path.string() + ": bad number '" + fields[j + 1] + "'");
            }
        }
    }
    return c;
}

}  // namespace idsfx
