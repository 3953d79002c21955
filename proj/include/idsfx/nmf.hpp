#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "idsfx/matrix.hpp"

namespace idsfx {

enum class NmfInit { RandomSeeded, Nndsvd };

std::string_view to_string(NmfInit init);
NmfInit parse_nmf_init(std::string_view name);

// Denominator guard of the multiplicative updates.
inline constexpr double kNmfEpsilon = 1e-12;

struct NmfConfig {
    int components = 30;
    NmfInit init = NmfInit::RandomSeeded;
    int max_iter = 200;
    // Stop once |f(k-1) - f(k)| / f(k-1) < tol.
    double tol = 1e-4;
    std::uint64_t seed = 0;

    void validate() const;
};

// X (p x q) ~ W (p x r) * H (r x q), all entries of W and H >= 0.
struct NmfModel {
    Matrix w;
    Matrix h;
    int components = 0;
    // 0.5 * ||X - WH||_F^2 before the first update and after every iteration.
    // The last entry is taken after the final W refit when w_projected is set.
    std::vector<double> objective_trace;
    int iterations_run = 0;
    bool converged = false;
    NmfConfig config;
    // Starting value of every coefficient in nmf_transform: sqrt(mean(X) / r)
    // of the training matrix.
    double transform_init = 0.0;
    // True when W was replaced by nmf_transform(X) after the updates, so
    // transforming the training matrix returns W exactly.
    bool w_projected = false;
};

// Lee-Seung multiplicative updates for the Frobenius objective. Throws
// DomainError on a negative or non-finite entry, ArgumentError when
// r > min(p, q).
NmfModel nmf_fit(const Matrix& x, const NmfConfig& config);

// Same iteration from caller-supplied starting factors.
NmfModel nmf_fit_from(const Matrix& x, Matrix w0, Matrix h0, const NmfConfig& config);

// Projects new rows onto the learned components: solves x_new ~ W_new * H with
// H frozen, row by row, using the model's max_iter/tol. Each output row
// depends only on its input row.
Matrix nmf_transform(const NmfModel& model, const Matrix& x_new);

// ||X - WH||_F / ||X||_F, or 0 when X is zero.
double reconstruction_error(const Matrix& x, const Matrix& w, const Matrix& h);
double reconstruction_error(const NmfModel& model, const Matrix& x);

struct TruncatedSvd {
    Matrix u;                    // p x k, orthonormal columns
    std::vector<double> sigma;   // k values, descending
    Matrix v;                    // q x k, orthonormal columns
};

// Rank-k SVD by seeded randomized range finding (Gaussian test matrix with the
// given oversampling and power iterations) followed by an exact eigensolve of
// the small projected problem.
TruncatedSvd randomized_svd(const Matrix& x, std::size_t k, std::size_t oversample,
                            int power_iterations, std::uint64_t seed);

enum class NndsvdVariant {
    Basic,       // zeros stay zero
    MeanFilled,  // zeros replaced by mean(X) ("NNDSVDa")
};

struct NndsvdFactors {
    Matrix w;
    Matrix h;
    // Trailing components beyond the numerical rank, filled with mean(X).
    std::size_t degenerate = 0;
};

NndsvdFactors nndsvd_init(const Matrix& x, int components, std::uint64_t seed,
                          NndsvdVariant variant = NndsvdVariant::MeanFilled);

}  // namespace idsfx
