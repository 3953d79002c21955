#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "idsfx/matrix.hpp"

namespace idsfx {

// Frequency chi-square of each non-negative feature against class codes:
// O[c] = sum of the feature over rows of class c, E[c] = total * n_c / p,
// score = sum_c (O[c] - E[c])^2 / E[c], classes with E[c] = 0 contributing 0.
// A feature constant over all rows scores exactly 0.
std::vector<double> chi2_scores(const Matrix& x, std::span<const int> y);

struct Chi2Report {
    std::vector<double> scores;
    std::vector<std::size_t> ranking;   // all features, score descending, index ascending on ties
    std::vector<std::size_t> selected;  // first min(k, q) entries of ranking
    std::size_t k = 0;
};

// Top-k by descending score. k larger than the feature count selects
// everything and logs a warning.
Chi2Report select_k_best(std::span<const double> scores, std::size_t k);

// Columns of x listed in report.selected, in that order, names carried along.
FeatureMatrix apply_selection(const Chi2Report& report, const FeatureMatrix& x);

// Two-column CSV (feature_name,score) sorted by descending score.
void export_chi2_csv(const Chi2Report& report, std::span<const std::string> names,
                     const std::filesystem::path& path);

}  // namespace idsfx
