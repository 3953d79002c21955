#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "idsfx/data_ingest.hpp"
#include "idsfx/error.hpp"
#include "idsfx/log.hpp"
#include "synthetic.hpp"

using namespace idsfx;

namespace {

std::vector<std::string> labels_of(const Dataset& d) { return split_xy(d).second; }

}  // namespace

TEST_SUITE("data_ingest") {

TEST_CASE("minimal generic csv") {
    const Dataset d = parse_csv("a,b,label\n1,2,x\n3,4,y\n5,6,x\n", Profile::Generic);
    CHECK(d.rows() == 3);
    CHECK(d.count_kind(ColumnKind::Numeric) == 2);
    CHECK(d.count_kind(ColumnKind::Label) == 1);
    CHECK(d.column(1).values == std::vector<double>{2, 4, 6});
}

TEST_CASE("missing markers become Missing, case-insensitively") {
    const Dataset d = parse_csv(
        "a,b,label\n1,NaN,x\n,infinity,y\n-Infinity,nan,x\n2,+INFINITY,y\n", Profile::Generic);
    const auto& a = d.column(0);
    const auto& b = d.column(1);
    CHECK(a.is_numeric());
    CHECK(b.is_numeric());
    CHECK(a.missing == std::vector<bool>{false, true, true, false});
    CHECK(b.missing == std::vector<bool>{true, true, true, true});
    CHECK(!a.number(1).has_value());
}

TEST_CASE("kdd profile with and without difficulty column") {
    const std::string text = synth::kdd_csv(20, 3);
    const Dataset d43 = parse_csv(text, Profile::NslKdd);
    CHECK(d43.rows() == 20);
    CHECK(d43.column_count() == 43);
    CHECK(d43.column(42).spec == ColumnSpec{"difficulty", ColumnKind::Ignored});
    CHECK(d43.column(41).spec == ColumnSpec{"label", ColumnKind::Label});
    CHECK(d43.column(1).spec.kind == ColumnKind::Categorical);

    std::string trimmed;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        trimmed += line.substr(0, line.rfind(',')) + "\n";
    }
    const Dataset d42 = parse_csv(trimmed, Profile::NslKdd);
    CHECK(d42.column_count() == 42);

    auto [x, y] = split_xy(d43);
    CHECK(x.column_count() == 41);
    CHECK(y.size() == 20);

    const Dataset mil = parse_csv(trimmed, Profile::MilitaryKaggle);
    CHECK(mil.column(41).spec.name == "class");
}

TEST_CASE("kdd header row is detected") {
    std::string header;
    for (const auto& n : kdd_feature_names()) header += n + ",";
    header += "class\n";
    std::string body;
    std::istringstream in(synth::kdd_csv(5, 4));
    for (std::string line; std::getline(in, line);) body += line.substr(0, line.rfind(',')) + "\n";
    const Dataset d = parse_csv(header + body, Profile::MilitaryKaggle);
    CHECK(d.rows() == 5);
    CHECK(d.column(41).spec.name == "class");
}

TEST_CASE("cicids header names are trimmed and Label found") {
    const Dataset d = parse_csv(" Destination Port, Flow Duration, Label\n80,10,BENIGN\n443,Infinity,XSS\n",
                                Profile::Cicids2017);
    CHECK(d.column(0).spec.name == "Destination Port");
    CHECK(d.column(1).spec.name == "Flow Duration");
    CHECK(d.column(2).spec.kind == ColumnKind::Label);
    CHECK(d.column(1).missing[1]);
}

TEST_CASE("cicids windows-1252 bytes are transcoded") {
    const std::string text = "a,Label\n1,Web Attack \x96 XSS\n2,BENIGN\n";
    const Dataset d = parse_csv(text, Profile::Cicids2017);
    CHECK(*d.column(1).tokens[0] == "Web Attack \xE2\x80\x93 XSS");
}

TEST_CASE("invalid utf-8 raises a decode error with the byte offset") {
    const std::string text = "a,label\n1,x\xff\n";
    try {
        parse_csv(text, Profile::Generic);
        FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
        CHECK(e.byte_offset() == 11);
    }
}

TEST_CASE("wrong cell count names the record") {
    try {
        parse_csv("a,b,label\n1,2,x\n1,x\n", Profile::Generic);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("record 1") != std::string::npos);
    }
}

TEST_CASE("no label column is a schema error") {
    CHECK_THROWS_AS(parse_csv("a,b\n1,2\n", Profile::Generic), SchemaError);
    LoadOptions o;
    o.label_column = "b";
    CHECK(parse_csv("a,b\n1,2\n", Profile::Generic, o).column(1).spec.kind == ColumnKind::Label);
}

TEST_CASE("empty input") {
    CHECK_THROWS_AS(parse_csv("", Profile::Generic), EmptyDatasetError);
    CHECK_THROWS_AS(parse_csv("a,label\n", Profile::Generic), EmptyDatasetError);
    const auto path = std::filesystem::temp_directory_path() / "idsfx_empty.csv";
    std::ofstream(path).close();
    CHECK_THROWS_WITH_AS(load_csv(path, Profile::NslKdd), doctest::Contains("empty dataset"),
                         EmptyDatasetError);
    std::filesystem::remove(path);
}

TEST_CASE("all-empty records are skipped with a warning") {
    log::ScopedCapture capture;
    const Dataset d = parse_csv("a,label\n1,x\n,\n2,y\n", Profile::Generic);
    CHECK(d.rows() == 2);
    CHECK(capture.warned_about("all-empty"));
}

TEST_CASE("duplicate header names are renamed") {
    log::ScopedCapture capture;
    const Dataset d = parse_csv("a,a,label\n1,2,x\n", Profile::Generic);
    CHECK(d.column(1).spec.name == "a.1");
    CHECK(capture.warned_about("duplicate"));
}

TEST_CASE("generic round trip through write_csv") {
    const std::string text = "n,c,label\n1.5,\"x,y\",a\n,z,b\n-2,,a\n";
    const Dataset d = parse_csv(text, Profile::Generic);
    std::ostringstream out;
    write_csv(d, out);
    const Dataset back = parse_csv(out.str(), Profile::Generic);
    REQUIRE(back.rows() == d.rows());
    for (std::size_t c = 0; c < d.column_count(); ++c) {
        CHECK(back.column(c).spec == d.column(c).spec);
        CHECK(back.column(c).values == d.column(c).values);
        CHECK(back.column(c).missing == d.column(c).missing);
        CHECK(back.column(c).tokens == d.column(c).tokens);
    }
}

TEST_CASE("split_xy keeps row alignment") {
    const Dataset d = parse_csv("v,label\n3,c\n1,a\n4,d\n1,a\n5,e\n9,i\n2,b\n6,f\n5,e\n3,c\n",
                                Profile::Generic);
    auto [x, y] = split_xy(d);
    CHECK(x.rows() == 10);
    const std::string letters = "abcdefghi";
    for (std::size_t i = 0; i < 10; ++i) {
        const auto v = static_cast<std::size_t>(x.column(0).values[i]);
        CHECK(y[i] == std::string(1, letters[v - 1]));
    }
    const Dataset one = parse_csv("v,label\n7,q\n", Profile::Generic);
    CHECK(split_xy(one).second == std::vector<std::string>{"q"});
}

TEST_CASE("train_test_split partitions exactly and deterministically") {
    std::string text = "id,label\n";
    for (int i = 0; i < 100; ++i) text += std::to_string(i) + "," + (i % 3 ? "a" : "b") + "\n";
    const Dataset d = parse_csv(text, Profile::Generic);
    auto [train, test] = train_test_split(d, 0.25, 7);
    CHECK(train.rows() == 75);
    CHECK(test.rows() == 25);
    std::set<double> ids;
    for (double v : train.column(0).values) ids.insert(v);
    for (double v : test.column(0).values) CHECK(ids.insert(v).second);
    CHECK(ids.size() == 100);

    auto [train2, test2] = train_test_split(d, 0.25, 7);
    CHECK(train2.column(0).values == train.column(0).values);
    CHECK(test2.column(0).values == test.column(0).values);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = split_indices(labels_of(d), 0.3, seed);
        std::vector<std::size_t> all = s.train;
        all.insert(all.end(), s.test.begin(), s.test.end());
        std::sort(all.begin(), all.end());
        for (std::size_t i = 0; i < 100; ++i) CHECK(all[i] == i);
    }
}

TEST_CASE("stratified split of a,a,b,b") {
    const Dataset d = parse_csv("v,label\n1,a\n2,a\n3,b\n4,b\n", Profile::Generic);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto [train, test] = train_test_split(d, 0.5, seed);
        auto ltrain = labels_of(train), ltest = labels_of(test);
        std::sort(ltrain.begin(), ltrain.end());
        std::sort(ltest.begin(), ltest.end());
        CHECK(ltrain == std::vector<std::string>{"a", "b"});
        CHECK(ltest == std::vector<std::string>{"a", "b"});
    }
}

TEST_CASE("singleton class falls back to a plain shuffle with a warning") {
    log::ScopedCapture capture;
    const Dataset d = parse_csv("v,label\n1,a\n2,a\n3,b\n4,a\n", Profile::Generic);
    auto [train, test] = train_test_split(d, 0.25, 1);
    CHECK(train.rows() + test.rows() == 4);
    CHECK(capture.warned_about("stratif"));
}

TEST_CASE("bad test fraction") {
    const Dataset d = parse_csv("v,label\n1,a\n2,b\n", Profile::Generic);
    CHECK_THROWS_AS(train_test_split(d, 0.0, 1), ArgumentError);
    CHECK_THROWS_AS(train_test_split(d, 1.0, 1), ArgumentError);
}

}
