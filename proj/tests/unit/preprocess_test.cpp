#include <doctest.h>

#include <cmath>

#include "idsfx/error.hpp"
#include "idsfx/log.hpp"
#include "idsfx/preprocess.hpp"
#include "idsfx/random.hpp"
#include "synthetic.hpp"

using namespace idsfx;

namespace {

Dataset features(const std::string& csv) { return split_xy(parse_csv(csv, Profile::Generic)).first; }

}  // namespace

TEST_SUITE("preprocess") {

TEST_CASE("describe") {
    const auto s = describe(features("a,b,c,label\n1,1,tcp,x\n2,,udp,y\n3,3,tcp,x\n"));
    const auto* a = s.find("a");
    const auto* b = s.find("b");
    const auto* c = s.find("c");
    CHECK(a->mean == 2.0);
    CHECK(a->min == 1.0);
    CHECK(a->max == 3.0);
    CHECK(a->std == doctest::Approx(1.0));
    CHECK(b->count == 2);
    CHECK(b->missing == 1);
    CHECK(b->mean == 2.0);
    CHECK(c->kind == ColumnKind::Categorical);
    CHECK(c->distinct == 2);
    CHECK(s.rows == 3);
    CHECK_THROWS_AS(describe(features("c,label\ntcp,x\n")), ArgumentError);
}

TEST_CASE("drop near-zero means") {
    std::string csv = "land,duration,flag,label\n";
    for (int i = 0; i < 2500; ++i) {
        csv += std::string(i == 0 ? "1" : "0") + "," + std::to_string(i % 437) + ",SF,x\n";
    }
    const Dataset x = features(csv);
    const auto stats = describe(x);
    CHECK(scaled_mean(*stats.find("land")) < 0.01);
    const auto r = drop_near_zero_mean(x, stats, 0.01);
    CHECK(r.dropped == std::vector<std::string>{"land"});
    CHECK(r.data.find("duration").has_value());
    CHECK(r.data.find("flag").has_value());

    const Dataset z = features("a,b,c,label\n0,1,2,x\n0,2,0,y\n");
    CHECK(drop_near_zero_mean(z, describe(z), 0.0).dropped == std::vector<std::string>{"a"});
    const Dataset pos = features("a,b,label\n1,1,x\n2,5,y\n");
    CHECK(drop_near_zero_mean(pos, describe(pos), 0.0).dropped.empty());
    CHECK_THROWS_AS(drop_near_zero_mean(z, describe(z), 10.0), PipelineError);
}

TEST_CASE("impute") {
    const Dataset x = features("a,c,label\n1,tcp,x\n,,y\n3,tcp,x\n");
    const auto model = impute_fit(x);
    CHECK(model.numeric.at(0).mean == 2.0);
    CHECK(model.categorical.at(0).token == "tcp");
    const Dataset filled = impute_apply(model, x);
    CHECK(filled.column(0).values == std::vector<double>{1, 2, 3});
    CHECK(*filled.column(1).tokens[1] == "tcp");

    const Dataset unseen = features("a,c,label\n,udp,x\n10,udp,y\n");
    CHECK(impute_apply(model, unseen).column(0).values == std::vector<double>{2.0, 10.0});

    const Dataset twice = impute_apply(model, filled);
    CHECK(twice.column(0).values == filled.column(0).values);

    CHECK_THROWS_WITH_AS(impute_fit(features("a,b,label\n,1,x\n,2,y\n")), doctest::Contains("'a'"),
                         DomainError);
}

TEST_CASE("imputed cells equal fitted means on random holes") {
    Rng rng(5);
    std::string csv = "a,b,c,label\n";
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 3; ++j) {
            csv += (i > 0 && rng.uniform() < 0.2) ? "" : std::to_string(rng.uniform());
            csv += ",";
        }
        csv += "x\n";
    }
    const Dataset x = features(csv);
    const auto model = impute_fit(x);
    const Dataset out = impute_apply(model, x);
    for (std::size_t j = 0; j < 3; ++j) {
        double sum = 0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < 5; ++i) {
            if (x.column(j).missing[i]) continue;
            sum += x.column(j).values[i];
            ++n;
        }
        for (std::size_t i = 0; i < 5; ++i) {
            if (x.column(j).missing[i]) CHECK(out.column(j).values[i] == doctest::Approx(sum / n));
            CHECK(!out.column(j).missing[i]);
        }
    }
}

TEST_CASE("label encoding is lexicographic and round-trips") {
    auto [codes, enc] = encode_labels({"normal", "anomaly", "normal"});
    CHECK(codes == std::vector<int>{1, 0, 1});
    CHECK(enc.tokens() == std::vector<std::string>{"anomaly", "normal"});

    Rng rng(9);
    for (int t = 0; t < 20; ++t) {
        LabelVector y;
        for (int i = 0; i < 30; ++i) y.push_back("t" + std::to_string(rng.below(7)));
        auto [c, e] = encode_labels(y);
        CHECK(decode_labels(e, c) == y);
    }
    CHECK_THROWS_AS(encode_labels({}), ArgumentError);
}

TEST_CASE("categorical encoding") {
    const Dataset x = features("p,label\ntcp,a\nudp,a\ntcp,b\nicmp,b\n");
    auto [m, enc] = encode_categoricals(x);
    CHECK(m.values.column(0) == std::vector<double>{1, 2, 1, 0});
    CHECK(enc.find("p")->tokens() == std::vector<std::string>{"icmp", "tcp", "udp"});

    log::ScopedCapture capture;
    const Dataset y = features("p,label\nsctp,a\n");
    auto [m2, enc2] = encode_categoricals(y, enc);
    CHECK(m2.values(0, 0) == 3.0);
    CHECK(capture.warned_about("reserved code 3"));

    const Dataset other = features("q,label\ntcp,a\n");
    CHECK_THROWS_AS(encode_categoricals(other, enc), SchemaError);
}

TEST_CASE("encoded kdd-shaped data is numeric and non-negative") {
    const Dataset d = parse_csv(synth::kdd_csv(200, 1), Profile::NslKdd);
    const Dataset x = split_xy(d).first;
    auto m = encode_categoricals(impute_apply(impute_fit(x), x)).first;
    CHECK(m.cols() == 41);
    CHECK(min_value(m.values) >= 0.0);
}

TEST_CASE("tfidf hand example") {
    const FeatureMatrix x{Matrix::from_rows({{1, 0}, {1, 1}}), {"a", "b"}};
    const auto raw = tfidf_fit(x, false);
    CHECK(raw.idf[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(raw.idf[1] == doctest::Approx(std::log(1.5) + 1.0).epsilon(1e-15));
    CHECK(raw.idf[1] == doctest::Approx(1.405465108).epsilon(1e-9));
    const auto unnorm = tfidf_apply(raw, x);
    CHECK(unnorm.values(0, 0) == 1.0);
    CHECK(unnorm.values(0, 1) == 0.0);
    const auto norm = tfidf_apply(tfidf_fit(x), x);
    CHECK(norm.values(0, 0) == 1.0);
    CHECK(norm.values(0, 1) == 0.0);
}

TEST_CASE("tfidf zero column and norms") {
    const FeatureMatrix z{Matrix::from_rows({{0, 1}, {0, 2}, {0, 3}}), {"a", "b"}};
    const auto m = tfidf_fit(z);
    CHECK(m.idf[0] == doctest::Approx(std::log(4.0) + 1.0));
    const auto out = tfidf_apply(m, z);
    for (std::size_t i = 0; i < 3; ++i) CHECK(out.values(i, 0) == 0.0);

    const FeatureMatrix r{synth::uniform(40, 6, 3), {"a", "b", "c", "d", "e", "f"}};
    FeatureMatrix rz = r;
    for (std::size_t j = 0; j < 6; ++j) rz.values(7, j) = 0.0;
    const auto o = tfidf_apply(tfidf_fit(rz), rz);
    CHECK(min_value(o.values) >= 0.0);
    for (std::size_t i = 0; i < 40; ++i) {
        double n = 0;
        for (double v : o.values.row(i)) n += v * v;
        if (i == 7) CHECK(n == 0.0);
        else CHECK(std::abs(std::sqrt(n) - 1.0) < 1e-12);
    }
}

TEST_CASE("tfidf shifts negative columns by the fitted minimum") {
    const FeatureMatrix x{Matrix::from_rows({{-2, 1}, {0, 1}, {2, 1}}), {"a", "b"}};
    const auto m = tfidf_fit(x, false);
    CHECK(m.shift[0] == 2.0);
    CHECK(m.shift[1] == 0.0);
    const auto out = tfidf_apply(m, x);
    CHECK(out.values(0, 0) == 0.0);
    CHECK(min_value(out.values) >= 0.0);
    CHECK_THROWS_AS(tfidf_fit(FeatureMatrix{}), ArgumentError);
}

}
