#include <doctest.h>

#include <omp.h>

#include "idsfx/kernels.hpp"
#include "idsfx/random.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using idsfx::Matrix;
namespace serial = idsfx::kernels::serial;
namespace parallel = idsfx::kernels::parallel;

TEST_SUITE("kernels") {

TEST_CASE("gemm variants match the triple loop") {
    const Matrix a = synth::uniform(7, 5, 1);
    const Matrix b = synth::uniform(5, 4, 2);
    const auto want = oracle::multiply(oracle::to_rows(a), oracle::to_rows(b));
    Matrix out;
    serial::gemm(a, b, out);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(out(i, j) == doctest::Approx(want[i][j]).epsilon(1e-14));

    Matrix at(5, 7), bt(4, 5);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t k = 0; k < 5; ++k) at(k, i) = a(i, k);
    for (std::size_t k = 0; k < 5; ++k)
        for (std::size_t j = 0; j < 4; ++j) bt(j, k) = b(k, j);
    Matrix tn, nt;
    serial::gemm_tn(at, b, tn);
    serial::gemm_nt(a, bt, nt);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(tn(i, j) == doctest::Approx(want[i][j]).epsilon(1e-14));
            CHECK(nt(i, j) == doctest::Approx(want[i][j]).epsilon(1e-14));
        }
}

TEST_CASE("serial and parallel kernels are bit-identical") {
    const int threads = omp_get_max_threads();
    omp_set_num_threads(4);
    const Matrix a = synth::uniform(33, 17, 3);
    const Matrix b = synth::uniform(17, 9, 4);
    const Matrix c = synth::uniform(33, 9, 5);
    Matrix s, p;

    serial::gemm(a, b, s);
    parallel::gemm(a, b, p);
    CHECK(s == p);
    serial::gemm_tn(a, c, s);
    parallel::gemm_tn(a, c, p);
    CHECK(s == p);
    serial::gemm_nt(c, synth::uniform(5, 9, 6), s);
    parallel::gemm_nt(c, synth::uniform(5, 9, 6), p);
    CHECK(s == p);

    Matrix t1 = synth::uniform(33, 9, 7), t2 = t1;
    serial::multiplicative_step(t1, c, synth::uniform(33, 9, 8), 1e-12);
    parallel::multiplicative_step(t2, c, synth::uniform(33, 9, 8), 1e-12);
    CHECK(t1 == t2);

    const Matrix h = synth::uniform(9, 17, 9);
    const Matrix w = synth::uniform(33, 9, 10);
    CHECK(serial::residual_sq(a, w, h) == parallel::residual_sq(a, w, h));

    serial::project_rows(a, h, 0.3, 50, 1e-6, 1e-12, s);
    parallel::project_rows(a, h, 0.3, 50, 1e-6, 1e-12, p);
    CHECK(s == p);

    const auto y = synth::labels(33, 4, 11);
    CHECK(serial::chi2(a, y, 4) == parallel::chi2(a, y, 4));

    Matrix x1 = a, x2 = a;
    const std::vector<double> shift(17, 0.5), idf(17, 1.25);
    serial::tfidf_rows(x1, shift, idf, true);
    parallel::tfidf_rows(x2, shift, idf, true);
    CHECK(x1 == x2);

    std::vector<bool> k1, k2;
    CHECK(serial::pearson(a, k1) == parallel::pearson(a, k2));
    CHECK(k1 == k2);

    const Matrix q = synth::uniform(12, 17, 12);
    CHECK(serial::knn(a, q, 3) == parallel::knn(a, q, 3));
    omp_set_num_threads(threads);
}

TEST_CASE("knn orders by distance then training index") {
    const Matrix train = Matrix::from_rows({{0.0}, {1.0}, {-1.0}, {1.0}});
    const Matrix query = Matrix::from_rows({{0.0}, {1.0}});
    const auto idx = serial::knn(train, query, 3);
    CHECK(idx == std::vector<std::size_t>{0, 1, 2, 1, 3, 0});
    CHECK(parallel::knn(train, query, 3) == idx);
}

TEST_CASE("pearson flags constant columns") {
    const Matrix x = Matrix::from_rows({{1.0, 5.0, 2.0}, {2.0, 5.0, 4.0}, {3.0, 5.0, 6.1}});
    std::vector<bool> constant;
    const Matrix r = serial::pearson(x, constant);
    CHECK(constant == std::vector<bool>{false, true, false});
    CHECK(r(1, 1) == 1.0);
    CHECK(r(0, 1) == 0.0);
    CHECK(r(1, 2) == 0.0);
    CHECK(r(0, 2) == doctest::Approx(oracle::pearson({1, 2, 3}, {2, 4, 6.1})).epsilon(1e-12));
}

}
