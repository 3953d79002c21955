// Reference kernels. Straight loops, no blocking, no threads. Summation order
// per output element matches kernels/parallel.cpp exactly.
#include <algorithm>
#include <cmath>
#include <utility>

#include "idsfx/error.hpp"
#include "idsfx/kernels.hpp"

namespace idsfx::kernels::serial {

void gemm(const Matrix& a, const Matrix& b, Matrix& out) {
    if (a.cols() != b.rows()) throw ShapeError("gemm: inner dimensions differ");
    out = Matrix(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            out(i, j) = acc;
        }
    }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out) {
    if (a.rows() != b.rows()) throw ShapeError("gemm_tn: row counts differ");
    out = Matrix(a.cols(), b.cols());
    for (std::size_t i = 0; i < a.cols(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.rows(); ++k) acc += a(k, i) * b(k, j);
            out(i, j) = acc;
        }
    }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out) {
    if (a.cols() != b.cols()) throw ShapeError("gemm_nt: column counts differ");
    out = Matrix(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(j, k);
            out(i, j) = acc;
        }
    }
}

void multiplicative_step(Matrix& target, const Matrix& numer, const Matrix& denom, double eps) {
    for (std::size_t i = 0; i < target.rows(); ++i) {
        for (std::size_t j = 0; j < target.cols(); ++j) {
            target(i, j) = target(i, j) * numer(i, j) / (denom(i, j) + eps);
        }
    }
}

double residual_sq(const Matrix& x, const Matrix& w, const Matrix& h) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) {
            double approx = 0.0;
            for (std::size_t k = 0; k < w.cols(); ++k) approx += w(i, k) * h(k, j);
            const double d = x(i, j) - approx;
            row_sum += d * d;
        }
        total += row_sum;
    }
    return total;
}

void project_rows(const Matrix& x, const Matrix& h, double init, int max_iter, double tol,
                  double eps, Matrix& w) {
    const std::size_t r = h.rows();
    Matrix hht;
    gemm_nt(h, h, hht);
    w = Matrix(x.rows(), r, init);

    for (std::size_t i = 0; i < x.rows(); ++i) {
        std::vector<double> xh(r, 0.0);
        for (std::size_t k = 0; k < r; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < x.cols(); ++j) acc += x(i, j) * h(k, j);
            xh[k] = acc;
        }
        double xx = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) xx += x(i, j) * x(i, j);

        auto objective = [&] {
            double lin = 0.0;
            double quad = 0.0;
            for (std::size_t k = 0; k < r; ++k) {
                lin += w(i, k) * xh[k];
                double t = 0.0;
                for (std::size_t l = 0; l < r; ++l) t += hht(k, l) * w(i, l);
                quad += w(i, k) * t;
            }
            return xx - 2.0 * lin + quad;
        };

        double prev = objective();
        std::vector<double> denom(r);
        for (int it = 0; it < max_iter; ++it) {
            for (std::size_t k = 0; k < r; ++k) {
                double acc = 0.0;
                for (std::size_t l = 0; l < r; ++l) acc += w(i, l) * hht(l, k);
                denom[k] = acc;
            }
            for (std::size_t k = 0; k < r; ++k) w(i, k) = w(i, k) * xh[k] / (denom[k] + eps);
            const double cur = objective();
            const bool exact = cur <= 1e-14 * xx;
            const bool stalled = std::abs(prev - cur) < tol * std::abs(prev);
            prev = cur;
            if (exact || stalled) break;
        }
    }
}

std::vector<double> chi2(const Matrix& x, std::span<const int> y, int n_classes) {
    const std::size_t p = x.rows();
    std::vector<double> class_count(static_cast<std::size_t>(n_classes), 0.0);
    for (int c : y) class_count[static_cast<std::size_t>(c)] += 1.0;

    std::vector<double> scores(x.cols(), 0.0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        bool constant = true;
        for (std::size_t i = 1; i < p && constant; ++i) constant = x(i, j) == x(0, j);
        if (constant) continue;

        std::vector<double> observed(class_count.size(), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            observed[static_cast<std::size_t>(y[i])] += x(i, j);
            total += x(i, j);
        }
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
    return scores;
}

void tfidf_rows(Matrix& x, std::span<const double> shift, std::span<const double> idf,
                bool l2_normalize) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            x(i, j) = std::max(0.0, x(i, j) + shift[j]) * idf[j];
        }
        if (!l2_normalize) continue;
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) norm_sq += x(i, j) * x(i, j);
        if (norm_sq > 0.0) {
            const double norm = std::sqrt(norm_sq);
            for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) /= norm;
        }
    }
}

Matrix pearson(const Matrix& x, std::vector<bool>& constant) {
    const std::size_t n = x.rows();
    const std::size_t q = x.cols();
    std::vector<double> mean(q, 0.0);
    constant.assign(q, true);
    for (std::size_t j = 0; j < q; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += x(i, j);
            if (x(i, j) != x(0, j)) constant[j] = false;
        }
        mean[j] = sum / static_cast<double>(n);
    }

    Matrix corr(q, q, 0.0);
    for (std::size_t a = 0; a < q; ++a) {
        for (std::size_t b = 0; b < q; ++b) {
            if (a == b) {
                corr(a, b) = 1.0;
                continue;
            }
            if (constant[a] || constant[b]) continue;
            double sab = 0.0;
            double saa = 0.0;
            double sbb = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double da = x(i, a) - mean[a];
                const double db = x(i, b) - mean[b];
                sab += da * db;
                saa += da * da;
                sbb += db * db;
            }
            corr(a, b) = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
        }
    }
    return corr;
}

std::vector<std::size_t> knn(const Matrix& train, const Matrix& query, std::size_t k) {
    if (train.cols() != query.cols()) throw ShapeError("knn: feature counts differ");
    k = std::min(k, train.rows());
    std::vector<std::size_t> out;
    out.reserve(query.rows() * k);
    for (std::size_t q = 0; q < query.rows(); ++q) {
        std::vector<std::pair<double, std::size_t>> dist(train.rows());
        for (std::size_t t = 0; t < train.rows(); ++t) {
            double d = 0.0;
            for (std::size_t j = 0; j < train.cols(); ++j) {
                const double diff = query(q, j) - train(t, j);
                d += diff * diff;
            }
            dist[t] = {d, t};
        }
        std::sort(dist.begin(), dist.end());
        for (std::size_t m = 0; m < k; ++m) out.push_back(dist[m].second);
    }
    return out;
}

}  // namespace idsfx::kernels::serial
