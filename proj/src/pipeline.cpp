#include "idsfx/pipeline.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "idsfx/error.hpp"
#include "idsfx/log.hpp"
#include "idsfx/persist.hpp"

namespace idsfx {

namespace {

using json = nlohmann::ordered_json;

// Runs one stage, prefixing any library error with the stage name while
// keeping its type (the CLI maps types to exit codes).
template <class F>
auto run_stage(std::string_view stage, F&& body) -> decltype(body()) {
    const std::string prefix = std::string(stage) + ": ";
    try {
        return body();
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    } catch (const EmptyDatasetError& e) {
        throw EmptyDatasetError(prefix + e.what());
    } catch (const ArgumentError& e) {
        throw ArgumentError(prefix + e.what());
    } catch (const SchemaError& e) {
        throw SchemaError(prefix + e.what());
    } catch (const DomainError& e) {
        throw DomainError(prefix + e.what());
    } catch (const ShapeError& e) {
        throw ShapeError(prefix + e.what());
    } catch (const PipelineError& e) {
        throw PipelineError(prefix + e.what());
    }
}

ColumnKind parse_kind(std::string_view s) {
    for (auto k : {ColumnKind::Numeric, ColumnKind::Categorical, ColumnKind::Label,
                   ColumnKind::Ignored}) {
        if (to_string(k) == s) return k;
    }
    throw SchemaError("unknown column kind '" + std::string(s) + "'");
}

Dataset feature_columns(const Dataset& d) {
    std::vector<std::size_t> skip;
    for (std::size_t i = 0; i < d.column_count(); ++i) {
        const auto kind = d.column(i).spec.kind;
        if (kind == ColumnKind::Label || kind == ColumnKind::Ignored) skip.push_back(i);
    }
    return skip.empty() ? d : d.drop_columns(skip);
}

// Reorders d's columns into the fitted schema order, or explains the mismatch.
Dataset conform(const DatasetFingerprint& fp, const Dataset& d) {
    std::vector<std::string> missing, extra, kind_changed;
    std::vector<Dataset::Column> columns;
    for (const auto& spec : fp.schema) {
        const auto at = d.find(spec.name);
        if (!at) {
            missing.push_back(spec.name);
            continue;
        }
        const auto& col = d.column(*at);
        if (col.spec.kind != spec.kind) {
            kind_changed.push_back(spec.name + " (" + std::string(to_string(col.spec.kind)) +
                                   ", fitted as " + std::string(to_string(spec.kind)) + ")");
            continue;
        }
        columns.push_back(col);
    }
    for (const auto& col : d.columns()) {
        const bool known = std::any_of(fp.schema.begin(), fp.schema.end(),
                                       [&](const ColumnSpec& s) { return s.name == col.spec.name; });
        if (!known) extra.push_back(col.spec.name);
    }
    if (!missing.empty() || !extra.empty() || !kind_changed.empty()) {
        auto list = [](const std::vector<std::string>& v) {
            std::string s;
            for (const auto& n : v) s += (s.empty() ? "" : ", ") + n;
            return s.empty() ? std::string("none") : s;
        };
        throw SchemaError("input does not match the fitted schema; missing columns: " +
                          list(missing) + "; extra columns: " + list(extra) +
                          "; kind changed: " + list(kind_changed));
    }
    return Dataset(std::move(columns), d.rows());
}

std::vector<std::string> component_names(std::size_t r) {
    std::vector<std::string> names;
    for (std::size_t c = 0; c < r; ++c) names.push_back("nmf_" + std::to_string(c));
    return names;
}

json matrix_json(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()},
            {"data", std::vector<double>(m.values().begin(), m.values().end())}};
}

Matrix matrix_from_json(const json& j) {
    return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                  j.at("data").get<std::vector<double>>());
}

json nmf_config_json(const NmfConfig& c) {
    return {{"components", c.components}, {"init", std::string(to_string(c.init))},
            {"max_iter", c.max_iter},     {"tol", c.tol},
            {"seed", c.seed}};
}

NmfConfig nmf_config_from_json(const nlohmann::json& j, NmfConfig c) {
    if (j.contains("components")) c.components = j.at("components").get<int>();
    if (j.contains("init")) c.init = parse_nmf_init(j.at("init").get<std::string>());
    if (j.contains("max_iter")) c.max_iter = j.at("max_iter").get<int>();
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

json encoder_json(const CategoricalEncoder& enc) {
    json cols = json::array();
    for (const auto& e : enc.columns) {
        cols.push_back({{"column", e.column}, {"tokens", e.table.tokens()}});
    }
    return cols;
}

CategoricalEncoder encoder_from_json(const json& j) {
    CategoricalEncoder enc;
    for (const auto& e : j) {
        enc.columns.push_back({e.at("column").get<std::string>(),
                               TokenTable(e.at("tokens").get<std::vector<std::string>>())});
    }
    return enc;
}

json impute_json(const ImputeModel& m) {
    json numeric = json::array();
    for (const auto& f : m.numeric) numeric.push_back({{"column", f.column}, {"mean", f.mean}});
    json categorical = json::array();
    for (const auto& f : m.categorical) {
        categorical.push_back({{"column", f.column}, {"token", f.token}});
    }
    return {{"numeric", numeric}, {"categorical", categorical}};
}

ImputeModel impute_from_json(const json& j) {
    ImputeModel m;
    for (const auto& f : j.at("numeric")) {
        m.numeric.push_back({f.at("column").get<std::string>(), f.at("mean").get<double>()});
    }
    for (const auto& f : j.at("categorical")) {
        m.categorical.push_back({f.at("column").get<std::string>(), f.at("token").get<std::string>()});
    }
    return m;
}

json tfidf_json(const TfidfModel& t) {
    return {{"l2_normalize", t.l2_normalize}, {"shift", t.shift}, {"idf", t.idf}};
}

TfidfModel tfidf_from_json(const json& j) {
    return {j.at("idf").get<std::vector<double>>(), j.at("shift").get<std::vector<double>>(),
            j.at("l2_normalize").get<bool>()};
}

const json& find_stage(const json& stages, std::string_view name) {
    for (const auto& s : stages) {
        if (s.at("stage").get<std::string>() == name) return s;
    }
    throw IntegrityError("pipeline file has no '" + std::string(name) + "' stage");
}

}  // namespace

void PipelineConfig::validate() const {
    if (components < 1) throw ConfigError("components (U) must be >= 1");
    if (select < 1) throw ConfigError("select (V) must be >= 1");
    if (select > components) {
        throw ConfigError("select (V=" + std::to_string(select) +
                          ") must not exceed components (U=" + std::to_string(components) + ")");
    }
    if (!(drop_threshold >= 0.0)) throw ConfigError("drop_threshold must be >= 0");
    NmfConfig n = nmf;
    n.components = components;
    n.validate();
}

json to_json(const PipelineConfig& cfg) {
    return {{"components", cfg.components},
            {"select", cfg.select},
            {"drop_threshold", cfg.drop_threshold},
            {"tfidf", cfg.tfidf_enabled},
            {"nmf", {{"init", std::string(to_string(cfg.nmf.init))},
                     {"max_iter", cfg.nmf.max_iter},
                     {"tol", cfg.nmf.tol}}},
            {"seed", cfg.seed}};
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& j, PipelineConfig c) {
    static const std::set<std::string> known = {"components", "select", "drop_threshold",
                                                "tfidf",      "nmf",    "seed"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ConfigError("unknown pipeline setting '" + key + "'");
    }
    try {
        if (j.contains("components")) c.components = j.at("components").get<int>();
        if (j.contains("select")) c.select = j.at("select").get<int>();
        if (j.contains("drop_threshold")) c.drop_threshold = j.at("drop_threshold").get<double>();
        if (j.contains("tfidf")) c.tfidf_enabled = j.at("tfidf").get<bool>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("nmf")) c.nmf = nmf_config_from_json(j.at("nmf"), c.nmf);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("pipeline config: ") + e.what());
    }
    return c;
}

DatasetFingerprint DatasetFingerprint::of(const Dataset& features) {
    DatasetFingerprint fp;
    fp.rows = features.rows();
    std::string lines;
    for (const auto& spec : features.schema()) {
        if (spec.kind == ColumnKind::Label || spec.kind == ColumnKind::Ignored) continue;
        fp.schema.push_back(spec);
        lines += spec.name + ":" + std::string(to_string(spec.kind)) + "\n";
    }
    fp.schema_hash = hex32(crc32_of(lines));
    return fp;
}

std::vector<std::string> FittedPipeline::output_names() const {
    std::vector<std::string> names;
    for (auto i : chi2.selected) names.push_back(component_names.at(i));
    return names;
}

PipelineFit pipeline_fit(const Dataset& d, const PipelineConfig& cfg) {
    cfg.validate();
    if (!d.label_index()) throw ArgumentError("pipeline_fit: dataset has no label column");
    if (d.rows() == 0) throw EmptyDatasetError("empty dataset");

    PipelineFit out;
    FittedPipeline& fp = out.pipeline;
    fp.format_version = std::string(kFormatVersion);
    fp.config = cfg;

    auto [x, y] = split_xy(d);
    fp.fingerprint = DatasetFingerprint::of(x);

    const SummaryStats stats = run_stage("describe", [&] { return describe(x); });
    Dataset kept = run_stage("drop_near_zero_mean", [&] {
        auto r = drop_near_zero_mean(x, stats, cfg.drop_threshold);
        fp.dropped = std::move(r.dropped);
        return std::move(r.data);
    });
    Dataset imputed = run_stage("impute", [&] {
        fp.impute = impute_fit(kept);
        return impute_apply(fp.impute, kept);
    });
    FeatureMatrix encoded = run_stage("encode", [&] {
        auto [m, enc] = encode_categoricals(imputed);
        fp.encoder = std::move(enc);
        auto [codes, labels] = encode_labels(y);
        out.labels = std::move(codes);
        fp.labels = std::move(labels);
        return std::move(m);
    });
    fp.encoded_names = encoded.names;
    if (cfg.tfidf_enabled) {
        encoded = run_stage("tfidf", [&] {
            fp.tfidf = tfidf_fit(encoded);
            return tfidf_apply(*fp.tfidf, encoded);
        });
    }

    const Matrix components = run_stage("nmf", [&] {
        NmfConfig nc = cfg.nmf;
        nc.seed = cfg.seed;
        const auto limit = std::min(encoded.rows(), encoded.cols());
        nc.components = cfg.components;
        if (static_cast<std::size_t>(cfg.components) > limit) {
            nc.components = static_cast<int>(limit);
            log::warn("nmf: U=" + std::to_string(cfg.components) + " exceeds min(rows, columns)=" +
                      std::to_string(limit) + " after preprocessing; using U=" +
                      std::to_string(limit));
        }
        fp.nmf = nmf_fit(encoded.values, nc);
        // Training features go through the same projection as new rows, so
        // transform() on the training data reproduces them exactly.
        return nmf_transform(fp.nmf, encoded.values);
    });
    fp.component_names = component_names(components.cols());

    out.features = run_stage("select", [&] {
        const auto scores = chi2_scores(components, out.labels);
        fp.chi2 = select_k_best(scores, static_cast<std::size_t>(cfg.select));
        return apply_selection(fp.chi2, FeatureMatrix{components, fp.component_names});
    });
    return out;
}

FeatureMatrix pipeline_transform(const FittedPipeline& fp, const Dataset& d) {
    Dataset x = run_stage("schema", [&] { return conform(fp.fingerprint, feature_columns(d)); });
    if (!fp.dropped.empty()) {
        std::vector<std::size_t> drop;
        for (const auto& name : fp.dropped) drop.push_back(*x.find(name));
        std::sort(drop.begin(), drop.end());
        x = x.drop_columns(drop);
    }
    x = run_stage("impute", [&] { return impute_apply(fp.impute, x); });
    FeatureMatrix m = run_stage("encode", [&] { return encode_categoricals(x, fp.encoder).first; });
    if (fp.tfidf) m = run_stage("tfidf", [&] { return tfidf_apply(*fp.tfidf, m); });
    const Matrix components = run_stage("nmf", [&] { return nmf_transform(fp.nmf, m.values); });
    return apply_selection(fp.chi2, FeatureMatrix{components, fp.component_names});
}

json to_json(const FittedPipeline& fp) {
    json schema = json::array();
    for (const auto& s : fp.fingerprint.schema) {
        schema.push_back({{"name", s.name}, {"kind", std::string(to_string(s.kind))}});
    }
    json stages = json::array();
    stages.push_back({{"stage", "drop_near_zero_mean"}, {"dropped", fp.dropped}});
    stages.push_back({{"stage", "impute"}, {"model", impute_json(fp.impute)}});
    stages.push_back({{"stage", "encode"},
                      {"categorical", encoder_json(fp.encoder)},
                      {"labels", fp.labels.tokens()},
                      {"feature_names", fp.encoded_names}});
    stages.push_back({{"stage", "tfidf"},
                      {"enabled", fp.tfidf.has_value()},
                      {"model", fp.tfidf ? tfidf_json(*fp.tfidf) : json(nullptr)}});
    const auto& n = fp.nmf;
    stages.push_back({{"stage", "nmf"},
                      {"config", nmf_config_json(n.config)},
                      {"components", n.components},
                      {"iterations_run", n.iterations_run},
                      {"converged", n.converged},
                      {"transform_init", n.transform_init},
                      {"w_projected", n.w_projected},
                      {"objective_trace", n.objective_trace},
                      {"component_names", fp.component_names},
                      {"w", matrix_json(n.w)},
                      {"h", matrix_json(n.h)}});
    stages.push_back({{"stage", "select"},
                      {"k", fp.chi2.k},
                      {"scores", fp.chi2.scores},
                      {"ranking", fp.chi2.ranking},
                      {"selected", fp.chi2.selected}});
    return {{"format_version", fp.format_version},
            {"config", to_json(fp.config)},
            {"fingerprint",
             {{"rows", fp.fingerprint.rows},
              {"schema_hash", fp.fingerprint.schema_hash},
              {"schema", schema}}},
            {"stages", stages}};
}

FittedPipeline pipeline_from_json(const json& j) {
    try {
        FittedPipeline fp;
        fp.format_version = j.at("format_version").get<std::string>();
        fp.config = pipeline_config_from_json(j.at("config"));
        const auto& f = j.at("fingerprint");
        fp.fingerprint.rows = f.at("rows").get<std::size_t>();
        fp.fingerprint.schema_hash = f.at("schema_hash").get<std::string>();
        for (const auto& s : f.at("schema")) {
            fp.fingerprint.schema.push_back(
                {s.at("name").get<std::string>(), parse_kind(s.at("kind").get<std::string>())});
        }
        const auto& stages = j.at("stages");
        fp.dropped = find_stage(stages, "drop_near_zero_mean").at("dropped").get<std::vector<std::string>>();
        fp.impute = impute_from_json(find_stage(stages, "impute").at("model"));
        const auto& enc = find_stage(stages, "encode");
        fp.encoder = encoder_from_json(enc.at("categorical"));
        fp.labels = LabelEncoder(enc.at("labels").get<std::vector<std::string>>());
        fp.encoded_names = enc.at("feature_names").get<std::vector<std::string>>();
        const auto& tf = find_stage(stages, "tfidf");
        if (tf.at("enabled").get<bool>()) fp.tfidf = tfidf_from_json(tf.at("model"));
        const auto& n = find_stage(stages, "nmf");
        fp.nmf.config = nmf_config_from_json(n.at("config"), {});
        fp.nmf.components = n.at("components").get<int>();
        fp.nmf.iterations_run = n.at("iterations_run").get<int>();
        fp.nmf.converged = n.at("converged").get<bool>();
        fp.nmf.transform_init = n.at("transform_init").get<double>();
        fp.nmf.w_projected = n.at("w_projected").get<bool>();
        fp.nmf.objective_trace = n.at("objective_trace").get<std::vector<double>>();
        fp.nmf.w = matrix_from_json(n.at("w"));
        fp.nmf.h = matrix_from_json(n.at("h"));
        fp.component_names = n.at("component_names").get<std::vector<std::string>>();
        const auto& s = find_stage(stages, "select");
        fp.chi2.k = s.at("k").get<std::size_t>();
        fp.chi2.scores = s.at("scores").get<std::vector<double>>();
        fp.chi2.ranking = s.at("ranking").get<std::vector<std::size_t>>();
        fp.chi2.selected = s.at("selected").get<std::vector<std::size_t>>();
        if (fp.nmf.h.rows() != fp.component_names.size() ||
            fp.nmf.h.cols() != fp.encoded_names.size()) {
            throw IntegrityError("pipeline file: NMF factor shapes disagree with stage metadata");
        }
        for (auto i : fp.chi2.selected) {
            if (i >= fp.component_names.size()) {
                throw IntegrityError("pipeline file: selected component out of range");
            }
        }
        return fp;
    } catch (const nlohmann::json::exception& e) {
        throw IntegrityError(std::string("pipeline file: ") + e.what());
    } catch (const ConfigError& e) {
        throw IntegrityError(std::string("pipeline file: ") + e.what());
    }
}

void pipeline_save(const FittedPipeline& fp, const std::filesystem::path& path) {
    write_text_file(path, seal_json(to_json(fp)));
}

FittedPipeline pipeline_load(const std::filesystem::path& path) {
    return pipeline_from_json(unseal_json(read_text_file(path), path.filename().string()));
}

std::pair<BaselineModel, FeatureMatrix> baseline_fit(const Dataset& features, bool tfidf) {
    BaselineModel model;
    const Dataset x = feature_columns(features);
    model.impute = run_stage("impute", [&] { return impute_fit(x); });
    const Dataset imputed = impute_apply(model.impute, x);
    auto [m, enc] = run_stage("encode", [&] { return encode_categoricals(imputed); });
    model.encoder = std::move(enc);
    if (tfidf) {
        model.tfidf = tfidf_fit(m);
        m = tfidf_apply(*model.tfidf, m);
    }
    return {std::move(model), std::move(m)};
}

FeatureMatrix baseline_apply(const BaselineModel& model, const Dataset& features) {
    const Dataset x = impute_apply(model.impute, feature_columns(features));
    FeatureMatrix m = encode_categoricals(x, model.encoder).first;
    if (model.tfidf) m = tfidf_apply(*model.tfidf, m);
    return m;
}

}  // namespace idsfx
