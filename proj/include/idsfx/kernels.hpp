#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "idsfx/matrix.hpp"

// Hot loops of the toolkit, in two builds with identical signatures:
//
//   kernels::serial    plain loops, the reference the tests compare against
//   kernels::parallel  OpenMP over independent outputs
//
// Both accumulate every output element in the same order, so their results are
// bit-identical for any thread count. The rest of the library calls
// kernels::parallel.
namespace idsfx::kernels {

namespace serial {

// out = a * b
void gemm(const Matrix& a, const Matrix& b, Matrix& out);
// out = transpose(a) * b
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out);
// out = a * transpose(b)
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out);

// target <- target * numer / (denom + eps), elementwise.
void multiplicative_step(Matrix& target, const Matrix& numer, const Matrix& denom, double eps);

// Squared Frobenius norm of x - w * h, accumulated per row then summed in row order.
double residual_sq(const Matrix& x, const Matrix& w, const Matrix& h);

// Solves x ~ w * h for w with h frozen, one row at a time. Every row of w starts
// at `init` and runs multiplicative updates until its own relative objective
// change drops below tol (or max_iter). Rows never influence each other.
void project_rows(const Matrix& x, const Matrix& h, double init, int max_iter, double tol,
                  double eps, Matrix& w);

// Frequency chi-square of each column of x against class codes y in [0, n_classes).
std::vector<double> chi2(const Matrix& x, std::span<const int> y, int n_classes);

// x[i,j] <- max(0, x[i,j] + shift[j]) * idf[j], then each row optionally L2-normalized.
void tfidf_rows(Matrix& x, std::span<const double> shift, std::span<const double> idf,
                bool l2_normalize);

// Pearson correlation between columns. Constant columns are flagged and get 0
// off the diagonal; the diagonal is always 1.
Matrix pearson(const Matrix& x, std::vector<bool>& constant);

// The k nearest training rows for each query row (Euclidean, ties to the lower
// training index). Returns query.rows() * k indices, nearest first.
std::vector<std::size_t> knn(const Matrix& train, const Matrix& query, std::size_t k);

}  // namespace serial

namespace parallel {

void gemm(const Matrix& a, const Matrix& b, Matrix& out);
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out);
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out);
void multiplicative_step(Matrix& target, const Matrix& numer, const Matrix& denom, double eps);
double residual_sq(const Matrix& x, const Matrix& w, const Matrix& h);
void project_rows(const Matrix& x, const Matrix& h, double init, int max_iter, double tol,
                  double eps, Matrix& w);
std::vector<double> chi2(const Matrix& x, std::span<const int> y, int n_classes);
void tfidf_rows(Matrix& x, std::span<const double> shift, std::span<const double> idf,
                bool l2_normalize);
Matrix pearson(const Matrix& x, std::vector<bool>& constant);
std::vector<std::size_t> knn(const Matrix& train, const Matrix& query, std::size_t k);

}  // namespace parallel

int max_threads();

}  // namespace idsfx::kernels
