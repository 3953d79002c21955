#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "idsfx/cli.hpp"
#include "idsfx/error.hpp"
#include "idsfx/eval.hpp"
#include "idsfx/persist.hpp"
#include "synthetic.hpp"

using namespace idsfx;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("idsfx_cli_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path find_output(const fs::path& dir, const std::string& suffix) {
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.size() > suffix.size() && name.ends_with("." + suffix)) return e.path();
    }
    return {};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

fs::path write_kdd(const TempDir& dir, std::size_t rows, std::uint64_t seed = 1) {
    const auto p = dir.path / "kdd.csv";
    write_text_file(p, synth::kdd_csv(rows, seed, 3));
    return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"nope"}).code == 2);
    CHECK(run({"inspect", "--bogus"}).code == 2);
    CHECK(run({"inspect"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("empty dataset exits with 2") {
    TempDir dir("empty");
    write_text_file(dir.path / "empty.csv", "");
    const auto r = run({"inspect", "--dataset", (dir.path / "empty.csv").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("empty dataset") != std::string::npos);
}

TEST_CASE("missing file is a runtime error") {
    CHECK(run({"inspect", "--dataset", "/nonexistent/x.csv"}).code == 1);
}

TEST_CASE("select larger than components is rejected before any work") {
    TempDir dir("vgtu");
    const auto data = write_kdd(dir, 60);
    const auto out = dir.path / "out";
    const auto r = run({"evaluate", "--dataset", data.string(), "--components", "5", "--select", "6",
                        "--out", out.string()});
    CHECK(r.code == 2);
    CHECK(!fs::exists(out));
}

TEST_CASE("config file with an unknown key is rejected") {
    TempDir dir("badcfg");
    write_text_file(dir.path / "cfg.json", R"({"dataset": "x.csv", "colour": 1})");
    const auto r = run({"inspect", "--config", (dir.path / "cfg.json").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("colour") != std::string::npos);
}

TEST_CASE("inspect") {
    TempDir dir("inspect");
    const auto data = write_kdd(dir, 90);
    const auto r = run({"inspect", "--dataset", data.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("rows: 90\n") != std::string::npos);
    CHECK(r.out.find("classes: 3\n") != std::string::npos);
    CHECK(r.out.find("duration\tnumeric") != std::string::npos);
}

TEST_CASE("fit then transform with the saved pipeline") {
    TempDir dir("fit");
    const auto data = write_kdd(dir, 150);
    const auto out = dir.path / "out";
    const auto f = run({"fit", "--dataset", data.string(), "--components", "6", "--select", "4",
                        "--out", out.string()});
    REQUIRE(f.code == 0);
    CHECK(fs::exists(out / "resolved_config.json"));
    const auto pipeline = find_output(out, "pipeline.json");
    REQUIRE(!pipeline.empty());
    CHECK(line_count(read_text_file(find_output(out, "chi2.csv"))) == 7);
    CHECK(line_count(read_text_file(find_output(out, "fitlog.csv"))) >= 3);

    const auto t = run({"transform", "--dataset", data.string(), "--pipeline", pipeline.string(),
                        "--out", out.string()});
    REQUIRE(t.code == 0);
    const auto features = read_text_file(find_output(out, "features.csv"));
    CHECK(line_count(features) == 151);
    CHECK(features.rfind("nmf_", 0) == 0);

    CHECK(run({"transform", "--dataset", data.string(), "--out", out.string()}).code == 2);
}

TEST_CASE("evaluate writes reports and is deterministic") {
    TempDir dir("evaluate");
    const auto data = write_kdd(dir, 160, 5);
    std::vector<std::string> base{"evaluate", "--dataset", data.string(), "--components", "6",
                                  "--select", "4", "--seed", "11"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", (dir.path / "a").string()});
    b.insert(b.end(), {"--out", (dir.path / "b").string()});
    const auto ra = run(a);
    REQUIRE(ra.code == 0);
    REQUIRE(run(b).code == 0);

    const auto csv = read_text_file(find_output(dir.path / "a", "report.csv"));
    CHECK(line_count(csv) == 13);
    const auto report = import_report_json(find_output(dir.path / "a", "report.json"));
    CHECK(report.results.size() == 12);
    CHECK(report.train_rows + report.test_rows == 160);
    CHECK(report.timings.empty());
    CHECK(fs::exists(find_output(dir.path / "a", "timings.json")));

    for (const std::string s : {"report.csv", "report.json", "pipeline.json", "models.json"}) {
        const auto pa = find_output(dir.path / "a", s);
        const auto pb = find_output(dir.path / "b", s);
        REQUIRE(!pa.empty());
        CHECK(pa.filename() == pb.filename());
        CHECK(read_text_file(pa) == read_text_file(pb));
    }
}

TEST_CASE("corr writes square matrices") {
    TempDir dir("corr");
    const auto data = write_kdd(dir, 80);
    const auto out = dir.path / "out";
    REQUIRE(run({"corr", "--dataset", data.string(), "--components", "5", "--select", "3",
                 "--out", out.string()}).code == 0);
    const auto before = import_corr_csv(find_output(out, "corr_before.csv"));
    const auto after = import_corr_csv(find_output(out, "corr_after.csv"));
    CHECK(before.names.size() == 41);
    CHECK(after.names.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) CHECK(after.values(i, j) == after.values(j, i));
    }
}

TEST_CASE("corr on a single feature column gives a 1x1 matrix") {
    TempDir dir("corr1");
    write_text_file(dir.path / "one.csv", "x,label\n1,a\n2,b\n4,a\n3,b\n");
    const auto out = dir.path / "out";
    REQUIRE(run({"corr", "--dataset", (dir.path / "one.csv").string(), "--profile", "generic",
                 "--components", "1", "--select", "1", "--out", out.string()}).code == 0);
    const auto before = import_corr_csv(find_output(out, "corr_before.csv"));
    CHECK(before.names == std::vector<std::string>{"x"});
    CHECK(before.values(0, 0) == 1.0);
}

TEST_CASE("chi2 ranks raw features") {
    TempDir dir("chi2");
    const auto data = write_kdd(dir, 120);
    const auto out = dir.path / "out";
    const auto r = run({"chi2", "--dataset", data.string(), "--out", out.string()});
    REQUIRE(r.code == 0);
    CHECK(line_count(r.out) == 42);
    CHECK(line_count(read_text_file(find_output(out, "chi2_raw.csv"))) == 42);
}

}
