#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "idsfx/error.hpp"
#include "idsfx/log.hpp"
#include "idsfx/random.hpp"
#include "idsfx/select.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace idsfx;

TEST_SUITE("select") {

TEST_CASE("hand example and constant feature") {
    const Matrix x = Matrix::from_rows({{1}, {0}});
    const std::vector<int> y{0, 1};
    CHECK(chi2_scores(x, y)[0] == doctest::Approx(1.0).epsilon(1e-15));

    const Matrix c(9, 1, 1.0);
    CHECK(chi2_scores(c, synth::labels(9, 3, 1))[0] == 0.0);
    const Matrix c2(7, 1, 0.1);
    CHECK(chi2_scores(c2, synth::labels(7, 3, 2))[0] == 0.0);
}

TEST_CASE("matches the brute-force formula on random fixtures") {
    Rng rng(77);
    for (int t = 0; t < 50; ++t) {
        const std::size_t p = 2 + rng.below(19);
        const std::size_t q = 1 + rng.below(8);
        const int k = 2 + static_cast<int>(rng.below(3));
        const Matrix x = synth::uniform(p, q, rng.next());
        const auto y = synth::labels(p, std::min<int>(k, static_cast<int>(p)), rng.next());
        const auto got = chi2_scores(x, y);
        const auto want = oracle::chi2(oracle::to_rows(x), y);
        for (std::size_t j = 0; j < q; ++j) CHECK(std::abs(got[j] - want[j]) < 1e-9);
    }
}

TEST_CASE("row permutation and column scaling") {
    const Matrix x = synth::uniform(30, 4, 5);
    const auto y = synth::labels(30, 3, 6);
    const auto base = chi2_scores(x, y);

    std::vector<std::size_t> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(8);
    rng.shuffle(std::span(perm));
    std::vector<int> yp;
    for (auto i : perm) yp.push_back(y[i]);
    const auto permuted = chi2_scores(x.select_rows(perm), yp);
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(permuted[j] - base[j]) < 1e-9);

    Matrix scaled = x;
    for (std::size_t i = 0; i < 30; ++i) scaled(i, 2) *= 3.0;
    CHECK(chi2_scores(scaled, y)[2] == doctest::Approx(3.0 * base[2]).epsilon(1e-12));
}

TEST_CASE("errors") {
    const Matrix x = synth::uniform(4, 2, 1);
    CHECK_THROWS_AS(chi2_scores(x, std::vector<int>{0, 1, 0}), ShapeError);
    CHECK_THROWS_AS(chi2_scores(x, std::vector<int>{1, 1, 1, 1}), ArgumentError);
    Matrix neg = x;
    neg(1, 1) = -1;
    CHECK_THROWS_AS(chi2_scores(neg, std::vector<int>{0, 1, 0, 1}), DomainError);
}

TEST_CASE("select_k_best") {
    const std::vector<double> s{3.0, 1.0, 2.0};
    CHECK(select_k_best(s, 2).selected == std::vector<std::size_t>{0, 2});
    CHECK(select_k_best(std::vector<double>{5.0, 5.0, 1.0}, 1).selected == std::vector<std::size_t>{0});
    const auto all = select_k_best(s, 3);
    CHECK(all.ranking == std::vector<std::size_t>{0, 2, 1});

    log::ScopedCapture capture;
    CHECK(select_k_best(s, 9).selected.size() == 3);
    CHECK(capture.warned_about("exceeds"));
    CHECK_THROWS_AS(select_k_best(s, 0), ArgumentError);
}

TEST_CASE("select_k_best matches a full sort and ignores monotone transforms") {
    Rng rng(3);
    for (int t = 0; t < 30; ++t) {
        std::vector<double> s(12);
        for (double& v : s) v = std::floor(rng.uniform() * 6.0);
        const std::size_t k = 1 + rng.below(12);
        std::vector<std::pair<double, std::size_t>> pairs;
        for (std::size_t j = 0; j < s.size(); ++j) pairs.push_back({-s[j], j});
        std::sort(pairs.begin(), pairs.end());
        std::vector<std::size_t> want;
        for (std::size_t j = 0; j < k; ++j) want.push_back(pairs[j].second);
        const auto got = select_k_best(s, k);
        CHECK(got.selected == want);

        std::vector<double> mono;
        for (double v : s) mono.push_back(std::exp(v) + 2.0);
        CHECK(select_k_best(mono, k).selected == want);
    }
}

TEST_CASE("apply_selection") {
    const FeatureMatrix x{Matrix::from_rows({{1, 2, 3}, {4, 5, 6}}), {"a", "b", "c"}};
    Chi2Report r;
    r.selected = {2, 0};
    const auto out = apply_selection(r, x);
    CHECK(out.names == std::vector<std::string>{"c", "a"});
    CHECK(out.values == Matrix::from_rows({{3, 1}, {6, 4}}));

    const auto same = select_k_best(std::vector<double>{1, 1, 1}, 3);
    CHECK(apply_selection(same, x).names == x.names);

    r.selected = {3};
    CHECK_THROWS_AS(apply_selection(r, x), ShapeError);
}

TEST_CASE("csv export is sorted by score") {
    const auto r = select_k_best(std::vector<double>{0.5, 2.25, 1.0}, 2);
    const std::vector<std::string> names{"duration", "flag", "hot"};
    const auto path = std::filesystem::temp_directory_path() / "idsfx_chi2.csv";
    export_chi2_csv(r, names, path);
    std::ifstream in(path);
    std::string all((std::istreambuf_iterator<char>(in)), {});
    CHECK(all == "feature_name,score\nflag,2.25\nhot,1\nduration,0.5\n");
    std::filesystem::remove(path);
}

}
