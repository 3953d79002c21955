#include "idsfx/nmf.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <string>

#include "idsfx/error.hpp"
#include "idsfx/kernels.hpp"
#include "idsfx/log.hpp"
#include "idsfx/random.hpp"

namespace idsfx {

namespace k = kernels::parallel;

std::string_view to_string(NmfInit init) {
    return init == NmfInit::Nndsvd ? "nndsvd" : "random";
}

NmfInit parse_nmf_init(std::string_view name) {
    if (name == "random") return NmfInit::RandomSeeded;
    if (name == "nndsvd") return NmfInit::Nndsvd;
    throw ArgumentError("unknown NMF init '" + std::string(name) + "' (expected random or nndsvd)");
}

void NmfConfig::validate() const {
    if (components < 1) throw ArgumentError("NMF components must be >= 1");
    if (max_iter < 1) throw ArgumentError("NMF max_iter must be >= 1");
    if (!(tol > 0.0)) throw ArgumentError("NMF tol must be > 0");
}

namespace {

void check_input(const Matrix& x, int components) {
    if (x.rows() == 0 || x.cols() == 0) throw ArgumentError("NMF input is empty");
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double v = x(i, j);
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw DomainError("NMF input must be non-negative and finite; cell (" +
                                  std::to_string(i) + ", " + std::to_string(j) + ") is " +
                                  std::to_string(v));
            }
        }
    }
    const auto r = static_cast<std::size_t>(components);
    if (r > std::min(x.rows(), x.cols())) {
        throw ArgumentError("NMF components (" + std::to_string(r) + ") exceed min(p, q) = " +
                            std::to_string(std::min(x.rows(), x.cols())));
    }
}

[[maybe_unused]] bool all_non_negative(const Matrix& m) {
    return std::all_of(m.values().begin(), m.values().end(), [](double v) { return v >= 0.0; });
}

double init_scale(const Matrix& x, int components) {
    return std::sqrt(mean_value(x) / static_cast<double>(components));
}

// Modified Gram-Schmidt, applied twice. Columns that vanish are zeroed.
void orthonormalize_columns(Matrix& a) {
    const std::size_t n = a.rows();
    const std::size_t m = a.cols();
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t prev = 0; prev < j; ++prev) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += a(i, prev) * a(i, j);
                for (std::size_t i = 0; i < n; ++i) a(i, j) -= dot * a(i, prev);
            }
            double norm = 0.0;
            for (std::size_t i = 0; i < n; ++i) norm += a(i, j) * a(i, j);
            norm = std::sqrt(norm);
            const double scale = norm > 1e-300 ? 1.0 / norm : 0.0;
            for (std::size_t i = 0; i < n; ++i) a(i, j) *= scale;
        }
    }
}

// Cyclic Jacobi eigensolver for a small symmetric matrix. Returns eigenvalues
// (unsorted) and fills vecs with the eigenvectors as columns.
std::vector<double> symmetric_eigen(Matrix a, Matrix& vecs) {
    const std::size_t n = a.rows();
    vecs = Matrix(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) vecs(i, i) = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                total += a(i, j) * a(i, j);
                if (i != j) off += a(i, j) * a(i, j);
            }
        }
        if (off <= 1e-30 * total || off == 0.0) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t r = 0; r < n; ++r) {
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = c * arp - s * arq;
                    a(r, q) = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double apr = a(p, r);
                    const double aqr = a(q, r);
                    a(p, r) = c * apr - s * aqr;
                    a(q, r) = s * apr + c * aqr;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double vrp = vecs(r, p);
                    const double vrq = vecs(r, q);
                    vecs(r, p) = c * vrp - s * vrq;
                    vecs(r, q) = s * vrp + c * vrq;
                }
            }
        }
    }
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
    return values;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    }
    return t;
}

NmfModel run_updates(const Matrix& x, Matrix w, Matrix h, const NmfConfig& config) {
    NmfModel model;
    model.components = config.components;
    model.config = config;
    model.transform_init = init_scale(x, config.components);

    double prev = 0.5 * k::residual_sq(x, w, h);
    model.objective_trace.push_back(prev);
    Matrix wtx, wtw, wtwh, xht, hht, whht;
    for (int it = 1; it <= config.max_iter && prev > 0.0; ++it) {
        k::gemm_tn(w, x, wtx);
        k::gemm_tn(w, w, wtw);
        k::gemm(wtw, h, wtwh);
        k::multiplicative_step(h, wtx, wtwh, kNmfEpsilon);

        k::gemm_nt(x, h, xht);
        k::gemm_nt(h, h, hht);
        k::gemm(w, hht, whht);
        k::multiplicative_step(w, xht, whht, kNmfEpsilon);
        assert(all_non_negative(w) && all_non_negative(h));

        const double cur = 0.5 * k::residual_sq(x, w, h);
        model.objective_trace.push_back(cur);
        model.iterations_run = it;
        const bool done = cur == 0.0 || std::abs(prev - cur) / prev < config.tol;
        prev = cur;
        if (done) {
            model.converged = true;
            break;
        }
    }
    if (prev == 0.0) model.converged = true;

    // Final W from the frozen-H solver nmf_transform uses, when it is no worse.
    if (prev > 0.0) {
        Matrix projected;
        k::project_rows(x, h, model.transform_init, config.max_iter, config.tol, kNmfEpsilon, projected);
        const double obj = 0.5 * k::residual_sq(x, projected, h);
        if (obj <= prev) {
            w = std::move(projected);
            model.objective_trace.back() = obj;
            model.w_projected = true;
        }
    }
    model.w = std::move(w);
    model.h = std::move(h);
    return model;
}

}  // namespace

NmfModel nmf_fit(const Matrix& x, const NmfConfig& config) {
    config.validate();
    check_input(x, config.components);
    const auto r = static_cast<std::size_t>(config.components);
    if (config.init == NmfInit::Nndsvd) {
        auto f = nndsvd_init(x, config.components, config.seed, NndsvdVariant::MeanFilled);
        return run_updates(x, std::move(f.w), std::move(f.h), config);
    }
    const double scale = init_scale(x, config.components);
    Rng rng(config.seed);
    Matrix w(x.rows(), r);
    Matrix h(r, x.cols());
    for (double& v : w.values()) v = scale * rng.uniform();
    for (double& v : h.values()) v = scale * rng.uniform();
    return run_updates(x, std::move(w), std::move(h), config);
}

NmfModel nmf_fit_from(const Matrix& x, Matrix w0, Matrix h0, const NmfConfig& config) {
    config.validate();
    check_input(x, config.components);
    const auto r = static_cast<std::size_t>(config.components);
    if (w0.rows() != x.rows() || w0.cols() != r || h0.rows() != r || h0.cols() != x.cols()) {
        throw ShapeError("starting factors do not match X and the component count");
    }
    if (!all_non_negative(w0) || !all_non_negative(h0)) {
        throw DomainError("starting factors must be non-negative");
    }
    return run_updates(x, std::move(w0), std::move(h0), config);
}

Matrix nmf_transform(const NmfModel& model, const Matrix& x_new) {
    if (x_new.cols() != model.h.cols()) {
        throw ShapeError("nmf_transform: input has " + std::to_string(x_new.cols()) +
                         " columns, model expects " + std::to_string(model.h.cols()));
    }
    for (std::size_t i = 0; i < x_new.rows(); ++i) {
        for (std::size_t j = 0; j < x_new.cols(); ++j) {
            if (!(x_new(i, j) >= 0.0) || !std::isfinite(x_new(i, j))) {
                throw DomainError("nmf_transform: cell (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ") is negative or non-finite");
            }
        }
    }
    Matrix w;
    k::project_rows(x_new, model.h, model.transform_init, model.config.max_iter, model.config.tol,
                    kNmfEpsilon, w);
    return w;
}

double reconstruction_error(const Matrix& x, const Matrix& w, const Matrix& h) {
    if (w.rows() != x.rows() || h.cols() != x.cols() || w.cols() != h.rows()) {
        throw ShapeError("reconstruction_error: factor shapes do not match X");
    }
    const double norm = frobenius_norm(x);
    if (norm == 0.0) return 0.0;
    return std::sqrt(k::residual_sq(x, w, h)) / norm;
}

double reconstruction_error(const NmfModel& model, const Matrix& x) {
    return reconstruction_error(x, model.w, model.h);
}

TruncatedSvd randomized_svd(const Matrix& x, std::size_t rank, std::size_t oversample,
                            int power_iterations, std::uint64_t seed) {
    const std::size_t p = x.rows();
    const std::size_t q = x.cols();
    const std::size_t kk = std::min(rank + oversample, std::min(p, q));
    if (rank == 0 || rank > std::min(p, q)) throw ArgumentError("randomized_svd: bad rank");

    Rng rng(seed);
    Matrix omega(q, kk);
    for (double& v : omega.values()) v = rng.normal();

    Matrix y;
    k::gemm(x, omega, y);
    orthonormalize_columns(y);
    for (int it = 0; it < power_iterations; ++it) {
        Matrix z;
        k::gemm_tn(x, y, z);  // q x kk
        orthonormalize_columns(z);
        k::gemm(x, z, y);
        orthonormalize_columns(y);
    }

    Matrix b;  // kk x q
    k::gemm_tn(y, x, b);
    Matrix bbt;
    k::gemm_nt(b, b, bbt);
    Matrix vecs;
    const auto evals = symmetric_eigen(bbt, vecs);

    std::vector<std::size_t> order(kk);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t c) { return evals[a] > evals[c]; });

    TruncatedSvd out;
    out.u = Matrix(p, rank);
    out.v = Matrix(q, rank);
    out.sigma.assign(rank, 0.0);
    const Matrix bt = transpose(b);
    for (std::size_t c = 0; c < rank; ++c) {
        const std::size_t e = order[c];
        const double sigma = std::sqrt(std::max(0.0, evals[e]));
        out.sigma[c] = sigma;
        // u = Y * vec_e ; v = B^T * vec_e / sigma
        for (std::size_t i = 0; i < p; ++i) {
            double acc = 0.0;
            for (std::size_t l = 0; l < kk; ++l) acc += y(i, l) * vecs(l, e);
            out.u(i, c) = acc;
        }
        if (sigma > 0.0) {
            for (std::size_t j = 0; j < q; ++j) {
                double acc = 0.0;
                for (std::size_t l = 0; l < kk; ++l) acc += bt(j, l) * vecs(l, e);
                out.v(j, c) = acc / sigma;
            }
        }
        // Sign convention: largest-magnitude entry of u is positive.
        std::size_t arg = 0;
        for (std::size_t i = 1; i < p; ++i) {
            if (std::abs(out.u(i, c)) > std::abs(out.u(arg, c))) arg = i;
        }
        if (out.u(arg, c) < 0.0) {
            for (std::size_t i = 0; i < p; ++i) out.u(i, c) = -out.u(i, c);
            for (std::size_t j = 0; j < q; ++j) out.v(j, c) = -out.v(j, c);
        }
    }
    return out;
}

NndsvdFactors nndsvd_init(const Matrix& x, int components, std::uint64_t seed,
                          NndsvdVariant variant) {
    if (components < 1) throw ArgumentError("NNDSVD components must be >= 1");
    check_input(x, components);
    const auto r = static_cast<std::size_t>(components);
    const std::size_t p = x.rows();
    const std::size_t q = x.cols();
    const double mean = mean_value(x);

    const TruncatedSvd svd = randomized_svd(x, r, 10, 2, seed);
    NndsvdFactors out{Matrix(p, r), Matrix(r, q), 0};
    const double rank_floor = 1e-7 * (svd.sigma.empty() ? 0.0 : svd.sigma.front());

    auto fill_constant = [&](std::size_t c) {
        for (std::size_t i = 0; i < p; ++i) out.w(i, c) = mean;
        for (std::size_t j = 0; j < q; ++j) out.h(c, j) = mean;
        ++out.degenerate;
    };

    for (std::size_t c = 0; c < r; ++c) {
        const double sigma = svd.sigma[c];
        if (!(sigma > rank_floor)) {
            fill_constant(c);
            continue;
        }
        if (c == 0) {
            const double s = std::sqrt(sigma);
            for (std::size_t i = 0; i < p; ++i) out.w(i, 0) = s * std::abs(svd.u(i, 0));
            for (std::size_t j = 0; j < q; ++j) out.h(0, j) = s * std::abs(svd.v(j, 0));
            continue;
        }
        double up = 0.0, un = 0.0, vp = 0.0, vn = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            const double u = svd.u(i, c);
            (u > 0.0 ? up : un) += u * u;
        }
        for (std::size_t j = 0; j < q; ++j) {
            const double v = svd.v(j, c);
            (v > 0.0 ? vp : vn) += v * v;
        }
        up = std::sqrt(up);
        un = std::sqrt(un);
        vp = std::sqrt(vp);
        vn = std::sqrt(vn);
        const double mp = up * vp;
        const double mn = un * vn;
        const bool positive = mp > mn;
        const double m = positive ? mp : mn;
        if (!(m > 0.0)) {
            fill_constant(c);
            continue;
        }
        const double unorm = positive ? up : un;
        const double vnorm = positive ? vp : vn;
        const double s = std::sqrt(sigma * m);
        for (std::size_t i = 0; i < p; ++i) {
            const double u = svd.u(i, c);
            const double part = positive ? std::max(u, 0.0) : std::max(-u, 0.0);
            out.w(i, c) = s * part / unorm;
        }
        for (std::size_t j = 0; j < q; ++j) {
            const double v = svd.v(j, c);
            const double part = positive ? std::max(v, 0.0) : std::max(-v, 0.0);
            out.h(c, j) = s * part / vnorm;
        }
    }
    if (out.degenerate > 0) {
        log::warn("NNDSVD: " + std::to_string(out.degenerate) +
                  " components beyond the numerical rank were filled with the matrix mean");
    }

    for (auto* m : {&out.w, &out.h}) {
        for (double& v : m->values()) {
            if (v < 1e-6) v = variant == NndsvdVariant::MeanFilled ? mean : 0.0;
        }
    }
    return out;
}

}  // namespace idsfx
