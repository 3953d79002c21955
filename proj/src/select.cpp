#include "idsfx/select.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "idsfx/error.hpp"
#include "idsfx/kernels.hpp"
#include "idsfx/log.hpp"

namespace idsfx {

std::vector<double> chi2_scores(const Matrix& x, std::span<const int> y) {
    if (y.size() != x.rows()) {
        throw ShapeError("chi2: " + std::to_string(y.size()) + " labels for " +
                         std::to_string(x.rows()) + " rows");
    }
    if (x.rows() == 0) throw ArgumentError("chi2: no rows");
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            if (!(x(i, j) >= 0.0)) {
                throw DomainError("chi2: cell (" + std::to_string(i) + ", " + std::to_string(j) +
                                  ") is negative or NaN");
            }
        }
    }
    int max_code = -1;
    for (int c : y) {
        if (c < 0) throw ArgumentError("chi2: negative class code");
        max_code = std::max(max_code, c);
    }
    std::vector<bool> present(static_cast<std::size_t>(max_code) + 1, false);
    for (int c : y) present[static_cast<std::size_t>(c)] = true;
    if (std::count(present.begin(), present.end(), true) < 2) {
        throw ArgumentError("chi2: need at least 2 distinct classes");
    }
    return kernels::parallel::chi2(x, y, max_code + 1);
}

Chi2Report select_k_best(std::span<const double> scores, std::size_t k) {
    if (k < 1) throw ArgumentError("select_k_best: k must be >= 1");
    Chi2Report report;
    report.scores.assign(scores.begin(), scores.end());
    report.k = k;
    report.ranking.resize(scores.size());
    std::iota(report.ranking.begin(), report.ranking.end(), 0);
    std::stable_sort(report.ranking.begin(), report.ranking.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    if (k > scores.size()) {
        log::warn("select_k_best: k=" + std::to_string(k) + " exceeds the " +
                  std::to_string(scores.size()) + " available features; selecting all");
    }
    const std::size_t take = std::min(k, scores.size());
    report.selected.assign(report.ranking.begin(),
                           report.ranking.begin() + static_cast<std::ptrdiff_t>(take));
    return report;
}

FeatureMatrix apply_selection(const Chi2Report& report, const FeatureMatrix& x) {
    FeatureMatrix out;
    out.values = x.values.select_columns(report.selected);
    for (auto j : report.selected) out.names.push_back(x.names.at(j));
    return out;
}

void export_chi2_csv(const Chi2Report& report, std::span<const std::string> names,
                     const std::filesystem::path& path) {
    if (names.size() != report.scores.size()) {
        throw ShapeError("export_chi2_csv: name count does not match score count");
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "feature_name,score\n";
    char buf[64];
    for (auto j : report.ranking) {
        std::snprintf(buf, sizeof buf, "%.9g", report.scores[j]);
        out << names[j] << ',' << buf << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace idsfx
