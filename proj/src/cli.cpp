#include "idsfx/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "idsfx/error.hpp"
#include "idsfx/eval.hpp"
#include "idsfx/log.hpp"
#include "idsfx/persist.hpp"
#include "idsfx/preprocess.hpp"
#include "idsfx/select.hpp"

namespace idsfx {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void RunConfig::resolve() {
    if (dataset.empty()) throw ConfigError("no dataset given (use --dataset or the config file)");
    if (dataset_id.empty()) dataset_id = dataset.stem().string();
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ConfigError("test_fraction must lie strictly between 0 and 1");
    }
    if (out.empty()) throw ConfigError("output directory must not be empty");
    pipeline.seed = seed;
    pipeline.validate();
    if (classifiers.empty()) {
        for (auto a : all_algorithms()) classifiers.push_back({a, {}, seed});
    }
    std::set<Algorithm> seen;
    for (auto& c : classifiers) {
        if (!seen.insert(c.algorithm).second) {
            throw ConfigError("classifier " + std::string(to_string(c.algorithm)) + " listed twice");
        }
        c.seed = seed;
        c.validate();
    }
}

json to_json(const RunConfig& cfg) {
    json classifiers = json::array();
    for (const auto& c : cfg.classifiers) {
        classifiers.push_back(
            {{"algorithm", std::string(to_string(c.algorithm))}, {"params", to_json(c.params)}});
    }
    json j = {{"dataset", cfg.dataset.generic_string()},
              {"profile", std::string(to_string(cfg.profile))},
              {"dataset_id", cfg.dataset_id},
              {"pipeline", to_json(cfg.pipeline)},
              {"classifiers", classifiers},
              {"test_fraction", cfg.test_fraction},
              {"seed", cfg.seed},
              {"out", cfg.out.generic_string()}};
    if (cfg.pipeline_file) j["pipeline_file"] = cfg.pipeline_file->generic_string();
    return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    static const std::set<std::string> known = {"dataset",     "profile",       "dataset_id",
                                                "pipeline",    "classifiers",   "test_fraction",
                                                "seed",        "out",           "pipeline_file"};
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    RunConfig c;
    try {
        if (j.contains("dataset")) c.dataset = j.at("dataset").get<std::string>();
        if (j.contains("profile")) c.profile = parse_profile(j.at("profile").get<std::string>());
        if (j.contains("dataset_id")) c.dataset_id = j.at("dataset_id").get<std::string>();
        if (j.contains("pipeline")) c.pipeline = pipeline_config_from_json(j.at("pipeline"));
        if (j.contains("test_fraction")) c.test_fraction = j.at("test_fraction").get<double>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
        if (j.contains("pipeline_file")) c.pipeline_file = j.at("pipeline_file").get<std::string>();
        if (j.contains("classifiers")) {
            for (const auto& e : j.at("classifiers")) {
                ClassifierSpec spec;
                if (e.is_string()) {
                    spec.algorithm = parse_algorithm(e.get<std::string>());
                } else {
                    spec.algorithm = parse_algorithm(e.at("algorithm").get<std::string>());
                    if (e.contains("params")) spec.params = hyperparams_from_json(e.at("params"));
                }
                c.classifiers.push_back(spec);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

std::string config_hash(const RunConfig& cfg) {
    json j = to_json(cfg);
    j.erase("out");
    return hex32(crc32_of(j.dump()));
}

namespace {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    // Seconds since construction or the last lap, rounded to milliseconds.
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - start_).count();
        start_ = now;
        return std::round(s * 1000.0) / 1000.0;
    }

private:
    std::chrono::steady_clock::time_point start_;
};

struct Overrides {
    std::string config;
    std::string dataset;
    std::string profile;
    std::optional<int> components;
    std::optional<int> select;
    std::optional<std::uint64_t> seed;
    std::optional<double> test_fraction;
    std::string out;
    std::optional<double> threshold;
    bool no_tfidf = false;
    std::string pipeline;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON run config");
    cmd->add_option("--dataset", o.dataset, "Dataset CSV");
    cmd->add_option("--profile", o.profile, "nsl-kdd, cicids2017, military-kaggle or generic");
    cmd->add_option("--components", o.components, "NMF components (U)");
    cmd->add_option("--select", o.select, "Features kept by chi-square (V)");
    cmd->add_option("--seed", o.seed, "Run seed");
    cmd->add_option("--test-fraction", o.test_fraction, "Held-out fraction for evaluate");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--threshold", o.threshold, "Near-zero-mean drop threshold");
    cmd->add_flag("--no-tfidf", o.no_tfidf, "Skip TF-IDF weighting");
}

RunConfig resolve_config(const Overrides& o) {
    RunConfig cfg;
    if (!o.config.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_text_file(o.config));
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(o.config + ": " + e.what());
        } catch (const IoError& e) {
            throw ConfigError(e.what());
        }
        cfg = run_config_from_json(j);
    }
    if (!o.dataset.empty()) cfg.dataset = o.dataset;
    if (!o.profile.empty()) cfg.profile = parse_profile(o.profile);
    if (o.components) cfg.pipeline.components = *o.components;
    if (o.select) cfg.pipeline.select = *o.select;
    if (o.seed) cfg.seed = *o.seed;
    if (o.test_fraction) cfg.test_fraction = *o.test_fraction;
    if (!o.out.empty()) cfg.out = o.out;
    if (o.threshold) cfg.pipeline.drop_threshold = *o.threshold;
    if (o.no_tfidf) cfg.pipeline.tfidf_enabled = false;
    if (!o.pipeline.empty()) cfg.pipeline_file = o.pipeline;
    cfg.resolve();
    return cfg;
}

class Run {
public:
    Run(RunConfig cfg, std::ostream& out) : cfg_(std::move(cfg)), out_(out) {
        stem_ = cfg_.dataset_id + "-" + config_hash(cfg_);
    }

    fs::path prepare() {
        std::error_code ec;
        fs::create_directories(cfg_.out, ec);
        if (ec) throw IoError("cannot create " + cfg_.out.string() + ": " + ec.message());
        write_text_file(cfg_.out / "resolved_config.json", to_json(cfg_).dump(2) + "\n");
        return cfg_.out;
    }

    fs::path file(std::string_view suffix) const { return cfg_.out / (stem_ + "." + std::string(suffix)); }

    Dataset load() const { return load_csv(cfg_.dataset, cfg_.profile); }

    const RunConfig& cfg() const { return cfg_; }
    std::ostream& out() { return out_; }

private:
    RunConfig cfg_;
    std::ostream& out_;
    std::string stem_;
};

std::string fixed(double v, int digits) {
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    return s.str();
}

void cmd_inspect(Run& run) {
    const Dataset d = run.load();
    auto& out = run.out();
    out << "dataset: " << run.cfg().dataset.string() << "\n";
    out << "profile: " << to_string(run.cfg().profile) << "\n";
    out << "rows: " << d.rows() << "\n";
    out << "columns: " << d.column_count() << " (" << d.count_kind(ColumnKind::Numeric)
        << " numeric, " << d.count_kind(ColumnKind::Categorical) << " categorical)\n";
    if (const auto li = d.label_index()) {
        std::map<std::string, std::size_t> counts;
        for (const auto& t : d.column(*li).tokens) ++counts[*t];
        out << "classes: " << counts.size() << "\n";
        for (const auto& [label, n] : counts) out << "  " << label << ": " << n << "\n";
    }
    const SummaryStats stats = describe(d);
    std::size_t missing = 0;
    for (const auto& s : stats.columns) missing += s.missing;
    out << "missing cells: " << missing << "\n";
    out << "column\tkind\tcount\tmissing\tmean\tstd\tmin\tmax\tdistinct\n";
    for (const auto& s : stats.columns) {
        out << s.name << '\t' << to_string(s.kind) << '\t' << s.count << '\t' << s.missing;
        if (s.kind == ColumnKind::Numeric) {
            out << '\t' << fixed(s.mean, 6) << '\t' << fixed(s.std, 6) << '\t' << fixed(s.min, 6)
                << '\t' << fixed(s.max, 6) << "\t-\n";
        } else {
            out << "\t-\t-\t-\t-\t" << s.distinct << "\n";
        }
    }
}

void write_fit_log(const FittedPipeline& fp, const fs::path& path) {
    std::ostringstream s;
    s << "iteration,objective\n";
    char buf[32];
    for (std::size_t i = 0; i < fp.nmf.objective_trace.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.9g", fp.nmf.objective_trace[i]);
        s << i << ',' << buf << '\n';
    }
    write_text_file(path, s.str());
}

void cmd_fit(Run& run) {
    run.prepare();
    const Dataset d = run.load();
    const PipelineFit fit = pipeline_fit(d, run.cfg().pipeline);
    const auto& fp = fit.pipeline;
    pipeline_save(fp, run.file("pipeline.json"));
    export_chi2_csv(fp.chi2, fp.component_names, run.file("chi2.csv"));
    write_fit_log(fp, run.file("fitlog.csv"));
    auto& out = run.out();
    out << "rows: " << fit.features.rows() << "\n";
    out << "dropped: " << fp.dropped.size() << " columns\n";
    out << "nmf: r=" << fp.nmf.components << ", " << fp.nmf.iterations_run << " iterations, "
        << (fp.nmf.converged ? "converged" : "not converged") << "\n";
    out << "selected: " << fit.features.cols() << " features\n";
    out << "pipeline: " << run.file("pipeline.json").string() << "\n";
}

void write_features_csv(const FeatureMatrix& m, const std::optional<LabelVector>& labels,
                        const fs::path& path) {
    std::ostringstream s;
    for (std::size_t j = 0; j < m.cols(); ++j) s << (j ? "," : "") << m.names[j];
    if (labels) s << ",label";
    s << '\n';
    char buf[32];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m.values(i, j));
            s << (j ? "," : "") << buf;
        }
        if (labels) s << ',' << (*labels)[i];
        s << '\n';
    }
    write_text_file(path, s.str());
}

void cmd_transform(Run& run) {
    if (!run.cfg().pipeline_file) throw ConfigError("transform needs --pipeline PATH");
    run.prepare();
    const FittedPipeline fp = pipeline_load(*run.cfg().pipeline_file);
    const Dataset d = run.load();
    const FeatureMatrix m = pipeline_transform(fp, d);
    std::optional<LabelVector> labels;
    if (d.label_index()) labels = split_xy(d).second;
    write_features_csv(m, labels, run.file("features.csv"));
    run.out() << "rows: " << m.rows() << "\nfeatures: " << m.cols() << "\n"
              << "written: " << run.file("features.csv").string() << "\n";
}

void cmd_evaluate(Run& run) {
    run.prepare();
    const RunConfig& cfg = run.cfg();
    EvalReport report;
    report.dataset_id = cfg.dataset_id;
    report.config = to_json(cfg);
    report.config.erase("out");
    Stopwatch clock;
    auto timed = [&](std::string stage) { report.timings.push_back({std::move(stage), clock.lap()}); };

    const Dataset d = run.load();
    timed("load");
    if (!d.label_index()) throw SchemaError("evaluate needs a labelled dataset");
    const auto [all_x, all_y] = split_xy(d);
    const auto [codes, classes] = encode_labels(all_y);
    report.classes = classes.tokens();

    const SplitIndices split = split_indices(all_y, cfg.test_fraction, cfg.seed);
    const Dataset train = d.select_rows(split.train);
    const Dataset test = d.select_rows(split.test);
    std::vector<int> y_train, y_test;
    for (auto i : split.train) y_train.push_back(codes[i]);
    for (auto i : split.test) y_test.push_back(codes[i]);
    report.train_rows = train.rows();
    report.test_rows = test.rows();
    timed("split");

    const auto [base_model, base_train] = baseline_fit(train, cfg.pipeline.tfidf_enabled);
    const FeatureMatrix base_test = baseline_apply(base_model, test);
    timed("baseline_preprocess");

    const PipelineFit fit = pipeline_fit(train, cfg.pipeline);
    timed("pipeline_fit");
    const FeatureMatrix ext_test = pipeline_transform(fit.pipeline, test);
    timed("pipeline_transform");
    pipeline_save(fit.pipeline, run.file("pipeline.json"));

    json models = json::array();
    const std::size_t k = classes.size();
    for (const auto& spec : cfg.classifiers) {
        for (const std::string variant : {"baseline", "extracted"}) {
            const bool base = variant == "baseline";
            const FeatureMatrix& xtr = base ? base_train : fit.features;
            const FeatureMatrix& xte = base ? base_test : ext_test;
            const TrainedClassifier model = idsfx::train(spec, xtr.values, y_train);
            const std::vector<int> pred = model.predict(xte.values);
            report.results.push_back({spec.algorithm, variant, xtr.cols(), accuracy(pred, y_test),
                                      confusion(pred, y_test, k)});
            timed(std::string(to_string(spec.algorithm)) + ":" + variant);
            json m = model.to_json();
            m["variant"] = variant;
            models.push_back(std::move(m));
        }
    }
    write_text_file(run.file("models.json"),
                    seal_json({{"format_version", std::string(kFormatVersion)},
                               {"dataset_id", cfg.dataset_id},
                               {"classes", report.classes},
                               {"models", models}}));

    const std::vector<StageTiming> timings = std::move(report.timings);
    report.timings.clear();
    export_report(report, run.file("report.csv"), ReportFormat::Csv);
    export_report(report, run.file("report.json"), ReportFormat::Json);
    json tj = json::array();
    for (const auto& t : timings) tj.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    write_text_file(run.file("timings.json"), tj.dump(2) + "\n");

    auto& out = run.out();
    out << "train rows: " << report.train_rows << ", test rows: " << report.test_rows << "\n";
    out << "classifier\tbaseline\textracted\tdelta\n";
    for (std::size_t i = 0; i + 1 < report.results.size(); i += 2) {
        const auto& b = report.results[i];
        const auto& e = report.results[i + 1];
        out << to_string(b.algorithm) << '\t' << fixed(b.accuracy, 6) << '\t'
            << fixed(e.accuracy, 6) << '\t' << fixed(e.accuracy - b.accuracy, 6) << '\n';
    }
    out << "features: " << report.results.front().features << " -> "
        << report.results[1].features << "\n";
    out << "report: " << run.file("report.csv").string() << "\n";
}

void cmd_corr(Run& run) {
    run.prepare();
    const Dataset d = run.load();
    const FeatureMatrix before = baseline_fit(d, run.cfg().pipeline.tfidf_enabled).second;
    export_report(pearson_corr(before), run.file("corr_before.csv"), ReportFormat::Csv);
    const PipelineFit fit = pipeline_fit(d, run.cfg().pipeline);
    export_report(pearson_corr(fit.features), run.file("corr_after.csv"), ReportFormat::Csv);
    run.out() << "before: " << before.cols() << "x" << before.cols() << "\n"
              << "after: " << fit.features.cols() << "x" << fit.features.cols() << "\n";
}

void cmd_chi2(Run& run) {
    run.prepare();
    const Dataset d = run.load();
    if (!d.label_index()) throw SchemaError("chi2 needs a labelled dataset");
    const auto y = encode_labels(split_xy(d).second).first;
    const FeatureMatrix x = baseline_fit(d, run.cfg().pipeline.tfidf_enabled).second;
    const Chi2Report report = select_k_best(chi2_scores(x.values, y), x.cols());
    export_chi2_csv(report, x.names, run.file("chi2_raw.csv"));
    auto& out = run.out();
    out << "rank\tindex\tfeature\tscore\n";
    for (std::size_t r = 0; r < report.ranking.size(); ++r) {
        const auto j = report.ranking[r];
        out << r + 1 << '\t' << j << '\t' << x.names[j] << '\t' << fixed(report.scores[j], 9) << '\n';
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app("Feature extraction and classification for intrusion-detection datasets", "idsfx");
    app.require_subcommand(1);
    Overrides o;
    struct Command {
        const char* name;
        const char* help;
        void (*run)(Run&);
    };
    const Command commands[] = {
        {"inspect", "Print row count, per-column statistics and class counts", cmd_inspect},
        {"fit", "Fit the pipeline and write it with its score table and NMF log", cmd_fit},
        {"transform", "Apply a saved pipeline to a dataset", cmd_transform},
        {"evaluate", "Compare classifiers on baseline and extracted features", cmd_evaluate},
        {"corr", "Write correlation matrices before and after extraction", cmd_corr},
        {"chi2", "Rank the preprocessed raw features by chi-square score", cmd_chi2},
    };
    std::map<const CLI::App*, void (*)(Run&)> handlers;
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        add_common_options(sub, o);
        if (std::string_view(c.name) == "transform") {
            sub->add_option("--pipeline", o.pipeline, "Pipeline file written by fit or evaluate");
        }
        handlers[sub] = c.run;
    }

    std::vector<std::string> argv_store{"idsfx"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    auto sink = log::set_sink([&err](log::Level level, std::string_view msg) {
        if (level == log::Level::Warning) err << "warning: " << msg << "\n";
    });
    int code = 0;
    try {
        const CLI::App* sub = app.get_subcommands().front();
        Run run(resolve_config(o), out);
        handlers.at(sub)(run);
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << "\n";
        code = 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        code = 1;
    }
    log::set_sink(std::move(sink));
    return code;
}

}  // namespace idsfx
