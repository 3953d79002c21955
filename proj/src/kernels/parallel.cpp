#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "idsfx/error.hpp"
#include "idsfx/kernels.hpp"

namespace idsfx::kernels {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace parallel {

// Loop indices are signed for OpenMP's benefit.
using idx = std::int64_t;

void gemm(const Matrix& a, const Matrix& b, Matrix& out) {
    if (a.cols() != b.rows()) throw ShapeError("gemm: inner dimensions differ");
    out = Matrix(a.rows(), b.cols());
    const idx n = static_cast<idx>(a.rows());
#pragma omp parallel for schedule(static)
    for (idx i = 0; i < n; ++i) {
        auto out_row = out.row(static_cast<std::size_t>(i));
        auto a_row = a.row(static_cast<std::size_t>(i));
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a_row[k];
            auto b_row = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
        }
    }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out) {
    if (a.rows() != b.rows()) throw ShapeError("gemm_tn: row counts differ");
    out = Matrix(a.cols(), b.cols());
    const idx n = static_cast<idx>(a.cols());
#pragma omp parallel for schedule(static)
    for (idx i = 0; i < n; ++i) {
        auto out_row = out.row(static_cast<std::size_t>(i));
        for (std::size_t k = 0; k < a.rows(); ++k) {
            const double aki = a(k, static_cast<std::size_t>(i));
            auto b_row = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aki * b_row[j];
        }
    }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out) {
    if (a.cols() != b.cols()) throw ShapeError("gemm_nt: column counts differ");
    out = Matrix(a.rows(), b.rows());
    const idx n = static_cast<idx>(a.rows());
#pragma omp parallel for schedule(static)
    for (idx i = 0; i < n; ++i) {
        auto a_row = a.row(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < b.rows(); ++j) {
            auto b_row = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a_row[k] * b_row[k];
            out(static_cast<std::size_t>(i), j) = acc;
        }
    }
}

void multiplicative_step(Matrix& target, const Matrix& numer, const Matrix& denom, double eps) {
    auto t = target.values();
    auto nv = numer.values();
    auto dv = denom.values();
    const idx n = static_cast<idx>(t.size());
#pragma omp parallel for schedule(static)
    for (idx i = 0; i < n; ++i) t[i] = t[i] * nv[i] / (dv[i] + eps);
}

double residual_sq(const Matrix& x, const Matrix& w, const Matrix& h) {
    std::vector<double> partial(x.rows(), 0.0);
    const idx n = static_cast<idx>(x.rows());
#pragma omp parallel
    {
        std::vector<double> approx(x.cols());
#pragma omp for schedule(static)
        for (idx ii = 0; ii < n; ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            std::fill(approx.begin(), approx.end(), 0.0);
            for (std::size_t k = 0; k < w.cols(); ++k) {
                const double wik = w(i, k);
                auto h_row = h.row(k);
                for (std::size_t j = 0; j < x.cols(); ++j) approx[j] += wik * h_row[j];
            }
            double row_sum = 0.0;
            auto x_row = x.row(i);
            for (std::size_t j = 0; j < x.cols(); ++j) {
                const double d = x_row[j] - approx[j];
                row_sum += d * d;
            }
            partial[i] = row_sum;
        }
    }
    double total = 0.0;
    for (double v : partial) total += v;
    return total;
}

void project_rows(const Matrix& x, const Matrix& h, double init, int max_iter, double tol,
                  double eps, Matrix& w) {
    const std::size_t r = h.rows();
    Matrix hht;
    gemm_nt(h, h, hht);
    w = Matrix(x.rows(), r, init);
    const idx n = static_cast<idx>(x.rows());

#pragma omp parallel
    {
        std::vector<double> xh(r);
        std::vector<double> denom(r);
#pragma omp for schedule(dynamic, 64)
        for (idx ii = 0; ii < n; ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            auto x_row = x.row(i);
            auto w_row = w.row(i);
            for (std::size_t k = 0; k < r; ++k) {
                auto h_row = h.row(k);
                double acc = 0.0;
                for (std::size_t j = 0; j < x.cols(); ++j) acc += x_row[j] * h_row[j];
                xh[k] = acc;
            }
            double xx = 0.0;
            for (double v : x_row) xx += v * v;

            auto objective = [&] {
                double lin = 0.0;
                double quad = 0.0;
                for (std::size_t k = 0; k < r; ++k) {
                    lin += w_row[k] * xh[k];
                    auto hht_row = hht.row(k);
                    double t = 0.0;
                    for (std::size_t l = 0; l < r; ++l) t += hht_row[l] * w_row[l];
                    quad += w_row[k] * t;
                }
                return xx - 2.0 * lin + quad;
            };

            double prev = objective();
            for (int it = 0; it < max_iter; ++it) {
                std::fill(denom.begin(), denom.end(), 0.0);
                for (std::size_t l = 0; l < r; ++l) {
                    const double wl = w_row[l];
                    auto hht_row = hht.row(l);
                    for (std::size_t k = 0; k < r; ++k) denom[k] += wl * hht_row[k];
                }
                for (std::size_t k = 0; k < r; ++k) w_row[k] = w_row[k] * xh[k] / (denom[k] + eps);
                const double cur = objective();
                const bool exact = cur <= 1e-14 * xx;
                const bool stalled = std::abs(prev - cur) < tol * std::abs(prev);
                prev = cur;
                if (exact || stalled) break;
            }
        }
    }
}

std::vector<double> chi2(const Matrix& x, std::span<const int> y, int n_classes) {
    const std::size_t p = x.rows();
    std::vector<double> class_count(static_cast<std::size_t>(n_classes), 0.0);
    for (int c : y) class_count[static_cast<std::size_t>(c)] += 1.0;

    std::vector<double> scores(x.cols(), 0.0);
    const idx q = static_cast<idx>(x.cols());
#pragma omp parallel
    {
        std::vector<double> observed(class_count.size());
#pragma omp for schedule(static)
        for (idx jj = 0; jj < q; ++jj) {
            const auto j = static_cast<std::size_t>(jj);
            const double first = x(0, j);
            bool constant = true;
            std::fill(observed.begin(), observed.end(), 0.0);
            double total = 0.0;
            for (std::size_t i = 0; i < p; ++i) {
                const double v = x(i, j);
                constant = constant && v == first;
                observed[static_cast<std::size_t>(y[i])] += v;
                total += v;
            }
            if (constant) continue;
            double score = 0.0;
            for (std::size_t c = 0; c < class_count.size(); ++c) {
                const double expected = total * class_count[c] / static_cast<double>(p);
                if (expected > 0.0) {
                    const double d = observed[c] - expected;
                    score += d * d / expected;
                }
            }
            scores[j] = score;
        }
    }
    return scores;
}

void tfidf_rows(Matrix& x, std::span<const double> shift, std::span<const double> idf,
                bool l2_normalize) {
    const idx n = static_cast<idx>(x.rows());
#pragma omp parallel for schedule(static)
    for (idx ii = 0; ii < n; ++ii) {
        auto row = x.row(static_cast<std::size_t>(ii));
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            row[j] = std::max(0.0, row[j] + shift[j]) * idf[j];
            norm_sq += row[j] * row[j];
        }
        if (l2_normalize && norm_sq > 0.0) {
            const double norm = std::sqrt(norm_sq);
            for (double& v : row) v /= norm;
        }
    }
}

Matrix pearson(const Matrix& x, std::vector<bool>& constant) {
    const std::size_t n = x.rows();
    const std::size_t q = x.cols();
    std::vector<char> is_constant(q, 1);
    // Column-major centered copy: pair sums then stream contiguous memory.
    std::vector<double> centered(n * q);
    const idx qi = static_cast<idx>(q);
#pragma omp parallel for schedule(static)
    for (idx jj = 0; jj < qi; ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += x(i, j);
            if (x(i, j) != x(0, j)) is_constant[j] = 0;
        }
        const double mean = sum / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) centered[j * n + i] = x(i, j) - mean;
    }

    Matrix corr(q, q, 0.0);
#pragma omp parallel for schedule(dynamic, 1)
    for (idx aa = 0; aa < qi; ++aa) {
        const auto a = static_cast<std::size_t>(aa);
        corr(a, a) = 1.0;
        if (is_constant[a]) continue;
        const double* da = centered.data() + a * n;
        for (std::size_t b = a + 1; b < q; ++b) {
            if (is_constant[b]) continue;
            const double* db = centered.data() + b * n;
            double sab = 0.0;
            double saa = 0.0;
            double sbb = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                sab += da[i] * db[i];
                saa += da[i] * da[i];
                sbb += db[i] * db[i];
            }
            const double c = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
            corr(a, b) = c;
            corr(b, a) = c;
        }
    }
    constant.assign(is_constant.begin(), is_constant.end());
    return corr;
}

std::vector<std::size_t> knn(const Matrix& train, const Matrix& query, std::size_t k) {
    if (train.cols() != query.cols()) throw ShapeError("knn: feature counts differ");
    k = std::min(k, train.rows());
    std::vector<std::size_t> out(query.rows() * k);
    const idx nq = static_cast<idx>(query.rows());
#pragma omp parallel
    {
        std::vector<std::pair<double, std::size_t>> dist(train.rows());
#pragma omp for schedule(dynamic, 16)
        for (idx qq = 0; qq < nq; ++qq) {
            const auto q = static_cast<std::size_t>(qq);
            auto q_row = query.row(q);
            for (std::size_t t = 0; t < train.rows(); ++t) {
                auto t_row = train.row(t);
                double d = 0.0;
                for (std::size_t j = 0; j < q_row.size(); ++j) {
                    const double diff = q_row[j] - t_row[j];
                    d += diff * diff;
                }
                dist[t] = {d, t};
            }
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                              dist.end());
            for (std::size_t m = 0; m < k; ++m) out[q * k + m] = dist[m].second;
        }
    }
    return out;
}

}  // namespace parallel
}  // namespace idsfx::kernels
