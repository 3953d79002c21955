#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "idsfx/error.hpp"
#include "idsfx/eval.hpp"
#include "idsfx/persist.hpp"
#include "idsfx/random.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace idsfx;
namespace fs = std::filesystem;

namespace {

std::size_t count_lines(const fs::path& p) {
    const auto text = read_text_file(p);
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("accuracy") {
    const std::vector<int> a{0, 1, 1, 0};
    CHECK(accuracy(a, a) == 1.0);
    CHECK(accuracy(std::vector<int>{1, 0}, std::vector<int>{0, 1}) == 0.0);
    CHECK(accuracy(std::vector<int>{0, 1, 1, 0}, std::vector<int>{0, 1, 0, 0}) == 0.75);
    CHECK_THROWS_AS(accuracy(std::vector<int>{0}, std::vector<int>{0, 1}), ShapeError);
    CHECK_THROWS_AS(accuracy(std::vector<int>{}, std::vector<int>{}), ArgumentError);
}

TEST_CASE("confusion") {
    CHECK(confusion(std::vector<int>{0, 1, 1}, std::vector<int>{0, 0, 1}, 2) ==
          Confusion{{1, 1}, {0, 1}});
    CHECK(confusion(std::vector<int>{0, 2, 2}, std::vector<int>{0, 2, 2}, 3) ==
          Confusion{{1, 0, 0}, {0, 0, 0}, {0, 0, 2}});
    CHECK_THROWS_AS(confusion(std::vector<int>{3}, std::vector<int>{0}, 3), ArgumentError);

    Rng rng(4);
    for (int t = 0; t < 20; ++t) {
        const std::size_t k = 2 + rng.below(4);
        std::vector<int> p(50), y(50);
        for (std::size_t i = 0; i < 50; ++i) {
            p[i] = static_cast<int>(rng.below(k));
            y[i] = static_cast<int>(rng.below(k));
        }
        const auto m = confusion(p, y, k);
        std::size_t trace = 0;
        for (std::size_t a = 0; a < k; ++a) {
            trace += m[a][a];
            for (std::size_t b = 0; b < k; ++b) {
                std::size_t n = 0;
                for (std::size_t i = 0; i < 50; ++i) n += (y[i] == int(a) && p[i] == int(b));
                CHECK(m[a][b] == n);
            }
        }
        CHECK(accuracy(p, y) == static_cast<double>(trace) / 50.0);
    }
}

TEST_CASE("pearson examples") {
    const FeatureMatrix x{Matrix::from_rows({{1, 2, -1}, {2, 4, -2}, {4, 8, -4}}), {"a", "b", "c"}};
    const auto c = pearson_corr(x);
    CHECK(c.values(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.values(0, 2) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(c.names == x.names);
    CHECK_THROWS_AS(pearson_corr(FeatureMatrix{Matrix(1, 2), {"a", "b"}}), ArgumentError);

    const auto one = pearson_corr(FeatureMatrix{Matrix::from_rows({{1}, {3}}), {"only"}});
    CHECK(one.values.rows() == 1);
    CHECK(one.values(0, 0) == 1.0);
}

TEST_CASE("pearson matches the covariance formula on random matrices") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Matrix m = synth::uniform(50, 5, 100 + s);
        const auto c = pearson_corr(FeatureMatrix{m, {"a", "b", "c", "d", "e"}});
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(c.values(i, i) == 1.0);
            for (std::size_t j = 0; j < 5; ++j) {
                CHECK(std::abs(c.values(i, j) - c.values(j, i)) <= 1e-12);
                CHECK(std::abs(c.values(i, j)) <= 1.0);
                if (i != j) {
                    CHECK(std::abs(c.values(i, j) - oracle::pearson(m.column(i), m.column(j))) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("correlation csv is a labelled square table") {
    const FeatureMatrix x{Matrix::from_rows({{1, 0}, {2, 1}, {3, 3}}), {"a", "b"}};
    const auto c = pearson_corr(x);
    const auto path = fs::temp_directory_path() / "idsfx_corr.csv";
    export_report(c, path, ReportFormat::Csv);
    CHECK(count_lines(path) == 3);
    const auto back = import_corr_csv(path);
    CHECK(back.names == c.names);
    CHECK(back.values(0, 1) == back.values(1, 0));
    CHECK(std::abs(back.values(0, 1) - c.values(0, 1)) < 1e-8);
    fs::remove(path);
}

TEST_CASE("report exports") {
    EvalReport r;
    r.dataset_id = "kdd";
    r.config = {{"seed", 7}, {"pipeline", {{"components", 30}, {"select", 20}}}};
    r.classes = {"a", "b"};
    r.train_rows = 9;
    r.test_rows = 3;
    for (auto a : all_algorithms()) {
        for (std::string v : {"baseline", "extracted"}) {
            const std::vector<int> p{0, 1, 1}, t{0, 0, 1};
            r.results.push_back({a, v, v == "baseline" ? 41u : 20u, accuracy(p, t), confusion(p, t, 2)});
        }
    }
    r.timings = {{"load", 0.125}, {"fit", 2.5}};

    const auto csv = fs::temp_directory_path() / "idsfx_report.csv";
    export_report(r, csv, ReportFormat::Csv);
    CHECK(count_lines(csv) == 13);
    const auto text = read_text_file(csv);
    CHECK(text.rfind("classifier,variant,features,accuracy\nNB,baseline,41,0.666666667\n", 0) == 0);

    const auto json = fs::temp_directory_path() / "idsfx_report.json";
    export_report(r, json, ReportFormat::Json);
    CHECK(import_report_json(json) == r);

    r.timings.clear();
    export_report(r, json, ReportFormat::Json);
    CHECK(read_text_file(json).find("timings") == std::string::npos);
    CHECK(import_report_json(json) == r);
    fs::remove(csv);
    fs::remove(json);

    CHECK_THROWS_AS(export_report(r, fs::path("/nonexistent-dir/x.csv"), ReportFormat::Csv), IoError);
}

TEST_CASE("round9") {
    CHECK(round9(0.123456789123) == 0.123456789);
    CHECK(round9(2.0) == 2.0);
}

}
