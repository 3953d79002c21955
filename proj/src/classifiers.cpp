#include "idsfx/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numbers>
#include <numeric>
#include <string>

#include "idsfx/error.hpp"
#include "idsfx/kernels.hpp"
#include "idsfx/log.hpp"
#include "idsfx/random.hpp"

namespace idsfx {

namespace {

using idx = std::int64_t;

constexpr std::array<std::pair<Algorithm, std::string_view>, 6> kNames = {{
    {Algorithm::GaussianNB, "NB"},
    {Algorithm::LogisticRegression, "LR"},
    {Algorithm::LinearSVM, "SVM"},
    {Algorithm::KNN, "KNN"},
    {Algorithm::DecisionTree, "DT"},
    {Algorithm::RandomForest, "RF"},
}};

void check_finite(const Matrix& x, std::string_view what) {
    for (double v : x.values()) {
        if (!std::isfinite(v)) throw DomainError(std::string(what) + ": input contains NaN or infinity");
    }
}

std::vector<int> distinct_classes(std::span<const int> y) {
    std::vector<int> classes(y.begin(), y.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return classes;
}

int n_codes(std::span<const int> y) {
    int m = -1;
    for (int c : y) m = std::max(m, c);
    return m + 1;
}

// Majority vote over codes; ties go to the lowest code.
int majority(const std::vector<std::size_t>& counts) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[best]) best = c;
    }
    return static_cast<int>(best);
}

// Index of the largest score; ties go to the lowest index.
std::size_t argmax(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c) {
        if (scores[c] > scores[best]) best = c;
    }
    return best;
}

// ---------------------------------------------------------------- naive Bayes

NaiveBayesState fit_naive_bayes(const Matrix& x, std::span<const int> y,
                                const std::vector<int>& classes, double var_floor) {
    const std::size_t q = x.cols();
    const std::size_t k = classes.size();
    NaiveBayesState s{classes, std::vector<double>(k), Matrix(k, q), Matrix(k, q)};
    std::vector<std::size_t> count(k, 0);
    std::map<int, std::size_t> slot;
    for (std::size_t c = 0; c < k; ++c) slot[classes[c]] = c;

    for (std::size_t i = 0; i < x.rows(); ++i) {
        const std::size_t c = slot[y[i]];
        ++count[c];
        for (std::size_t j = 0; j < q; ++j) s.mean(c, j) += x(i, j);
    }
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t j = 0; j < q; ++j) s.mean(c, j) /= static_cast<double>(count[c]);
    }
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const std::size_t c = slot[y[i]];
        for (std::size_t j = 0; j < q; ++j) {
            const double d = x(i, j) - s.mean(c, j);
            s.var(c, j) += d * d;
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        s.log_prior[c] = std::log(static_cast<double>(count[c]) / static_cast<double>(x.rows()));
        for (std::size_t j = 0; j < q; ++j) {
            s.var(c, j) = std::max(s.var(c, j) / static_cast<double>(count[c]), var_floor);
        }
    }
    return s;
}

Matrix naive_bayes_jll(const NaiveBayesState& s, const Matrix& x) {
    const std::size_t k = s.classes.size();
    Matrix jll(x.rows(), k);
    const idx n = static_cast<idx>(x.rows());
#pragma omp parallel for schedule(static)
    for (idx ii = 0; ii < n; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t c = 0; c < k; ++c) {
            double acc = s.log_prior[c];
            for (std::size_t j = 0; j < x.cols(); ++j) {
                const double v = s.var(c, j);
                const double d = x(i, j) - s.mean(c, j);
                acc -= 0.5 * std::log(2.0 * std::numbers::pi * v) + 0.5 * d * d / v;
            }
            jll(i, c) = acc;
        }
    }
    return jll;
}

// ------------------------------------------------------------ linear models

std::vector<std::size_t> class_slots(std::span<const int> y, const std::vector<int>& classes) {
    std::vector<std::size_t> slots(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        slots[i] = static_cast<std::size_t>(
            std::lower_bound(classes.begin(), classes.end(), y[i]) - classes.begin());
    }
    return slots;
}

// Multinomial logistic regression by full-batch gradient descent on the mean
// cross-entropy plus 0.5 * l2 * ||W||^2 (bias not penalised).
LinearState fit_logistic(const Matrix& x, std::span<const int> y, const std::vector<int>& classes,
                         const Hyperparams& hp) {
    const std::size_t n = x.rows();
    const std::size_t q = x.cols();
    const std::size_t k = classes.size();
    const auto slots = class_slots(y, classes);
    LinearState s{classes, Matrix(k, q, 0.0), std::vector<double>(k, 0.0)};

    Matrix logits, grad;
    Matrix resid(n, k);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (int epoch = 0; epoch < hp.lr_epochs; ++epoch) {
        kernels::parallel::gemm_nt(x, s.weights, logits);
        const idx nn = static_cast<idx>(n);
#pragma omp parallel for schedule(static)
        for (idx ii = 0; ii < nn; ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            double mx = -INFINITY;
            for (std::size_t c = 0; c < k; ++c) mx = std::max(mx, logits(i, c) + s.bias[c]);
            double z = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                resid(i, c) = std::exp(logits(i, c) + s.bias[c] - mx);
                z += resid(i, c);
            }
            for (std::size_t c = 0; c < k; ++c) {
                resid(i, c) = resid(i, c) / z - (slots[i] == c ? 1.0 : 0.0);
            }
        }
        kernels::parallel::gemm_tn(resid, x, grad);  // k x q
        for (std::size_t c = 0; c < k; ++c) {
            double gb = 0.0;
            for (std::size_t i = 0; i < n; ++i) gb += resid(i, c);
            s.bias[c] -= hp.lr_learning_rate * gb * inv_n;
            for (std::size_t j = 0; j < q; ++j) {
                const double g = grad(c, j) * inv_n + hp.lr_l2 * s.weights(c, j);
                s.weights(c, j) -= hp.lr_learning_rate * g;
            }
        }
    }
    return s;
}

// One-vs-rest linear SVM: per-sample SGD on the hinge loss with weight decay.
// Every class sees the same seeded visiting order each epoch.
LinearState fit_linear_svm(const Matrix& x, std::span<const int> y,
                           const std::vector<int>& classes, const Hyperparams& hp,
                           std::uint64_t seed) {
    const std::size_t n = x.rows();
    const std::size_t q = x.cols();
    const std::size_t k = classes.size();
    const auto slots = class_slots(y, classes);
    LinearState s{classes, Matrix(k, q, 0.0), std::vector<double>(k, 0.0)};
    const double lr = hp.svm_learning_rate;
    const double decay = 1.0 - lr * hp.svm_l2;

    const idx kk = static_cast<idx>(k);
#pragma omp parallel for schedule(dynamic, 1)
    for (idx cc = 0; cc < kk; ++cc) {
        const auto c = static_cast<std::size_t>(cc);
        Rng rng(seed);
        std::vector<std::size_t> order(n);
        auto w = s.weights.row(c);
        double b = 0.0;
        for (int epoch = 0; epoch < hp.svm_epochs; ++epoch) {
            std::iota(order.begin(), order.end(), 0);
            rng.shuffle(std::span(order));
            for (auto i : order) {
                const double target = slots[i] == c ? 1.0 : -1.0;
                auto row = x.row(i);
                double score = b;
                for (std::size_t j = 0; j < q; ++j) score += w[j] * row[j];
                for (std::size_t j = 0; j < q; ++j) w[j] *= decay;
                if (target * score < 1.0) {
                    for (std::size_t j = 0; j < q; ++j) w[j] += lr * target * row[j];
                    b += lr * target;
                }
            }
        }
        s.bias[c] = b;
    }
    return s;
}

std::vector<int> predict_linear(const LinearState& s, const Matrix& x) {
    Matrix scores;
    kernels::parallel::gemm_nt(x, s.weights, scores);
    std::vector<int> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto row = scores.row(i);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] += s.bias[c];
        out[i] = s.classes[argmax(row)];
    }
    return out;
}

// ---------------------------------------------------------------------- CART

struct TreeParams {
    std::size_t min_samples_split = 2;
    std::size_t max_depth = 0;
    std::size_t max_features = 0;  // 0 = all, evaluated in index order
};

struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double purity = -1.0;  // sum_c nL_c^2 / nL + sum_c nR_c^2 / nR, larger is better
};

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, std::span<const int> y, int n_classes, TreeParams params, Rng* rng)
        : x_(x), y_(y), n_classes_(static_cast<std::size_t>(n_classes)), params_(params), rng_(rng) {}

    Tree build(std::vector<std::size_t> rows) {
        Tree tree;
        struct Work {
            int node;
            std::vector<std::size_t> rows;
            std::size_t depth;
        };
        std::vector<Work> stack;
        tree.nodes.push_back({});
        stack.push_back({0, std::move(rows), 0});
        std::vector<std::size_t> counts(n_classes_);
        while (!stack.empty()) {
            Work work = std::move(stack.back());
            stack.pop_back();

            std::fill(counts.begin(), counts.end(), 0);
            for (auto r : work.rows) ++counts[static_cast<std::size_t>(y_[r])];
            const int label = majority(counts);
            tree.nodes[static_cast<std::size_t>(work.node)].label = label;

            const bool pure = counts[static_cast<std::size_t>(label)] == work.rows.size();
            const bool too_small = work.rows.size() < params_.min_samples_split;
            const bool too_deep = params_.max_depth > 0 && work.depth >= params_.max_depth;
            if (pure || too_small || too_deep) continue;

            const Split split = best_split(work.rows);
            if (!split.found) continue;

            std::vector<std::size_t> left, right;
            for (auto r : work.rows) {
                (x_(r, split.feature) <= split.threshold ? left : right).push_back(r);
            }
            const int left_id = static_cast<int>(tree.nodes.size());
            tree.nodes.push_back({});
            tree.nodes.push_back({});
            auto& node = tree.nodes[static_cast<std::size_t>(work.node)];
            node.feature = static_cast<int>(split.feature);
            node.threshold = split.threshold;
            node.left = left_id;
            node.right = left_id + 1;
            // Right pushed first so the left subtree is expanded first.
            stack.push_back({left_id + 1, std::move(right), work.depth + 1});
            stack.push_back({left_id, std::move(left), work.depth + 1});
        }
        return tree;
    }

private:
    Split best_split(const std::vector<std::size_t>& rows) {
        const std::size_t q = x_.cols();
        Split best;
        if (params_.max_features == 0 || params_.max_features >= q) {
            for (std::size_t f = 0; f < q; ++f) evaluate(rows, f, best);
            return best;
        }
        std::vector<std::size_t> features(q);
        std::iota(features.begin(), features.end(), 0);
        rng_->shuffle(std::span(features));
        const auto mid = features.begin() + static_cast<std::ptrdiff_t>(params_.max_features);
        std::sort(features.begin(), mid);
        for (auto it = features.begin(); it != mid; ++it) evaluate(rows, *it, best);
        if (!best.found) {
            // None of the drawn features can split this node; fall back to the rest.
            std::sort(mid, features.end());
            for (auto it = mid; it != features.end(); ++it) evaluate(rows, *it, best);
        }
        return best;
    }

    void evaluate(const std::vector<std::size_t>& rows, std::size_t f, Split& best) {
        sorted_.clear();
        for (auto r : rows) sorted_.push_back({x_(r, f), y_[r]});
        std::sort(sorted_.begin(), sorted_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        if (sorted_.front().first == sorted_.back().first) return;

        left_.assign(n_classes_, 0);
        right_.assign(n_classes_, 0);
        double sq_left = 0.0;
        double sq_right = 0.0;
        for (const auto& [v, c] : sorted_) ++right_[static_cast<std::size_t>(c)];
        for (auto cnt : right_) sq_right += static_cast<double>(cnt) * static_cast<double>(cnt);

        const std::size_t n = sorted_.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const auto c = static_cast<std::size_t>(sorted_[i].second);
            sq_left += 2.0 * static_cast<double>(left_[c]) + 1.0;
            sq_right -= 2.0 * static_cast<double>(right_[c]) - 1.0;
            ++left_[c];
            --right_[c];
            const double a = sorted_[i].first;
            const double b = sorted_[i + 1].first;
            if (a == b) continue;
            const double n_left = static_cast<double>(i + 1);
            const double n_right = static_cast<double>(n - i - 1);
            const double purity = sq_left / n_left + sq_right / n_right;
            if (purity > best.purity) {
                double threshold = a + (b - a) / 2.0;
                if (!(threshold < b)) threshold = a;
                best = {true, f, threshold, purity};
            }
        }
    }

    const Matrix& x_;
    std::span<const int> y_;
    std::size_t n_classes_;
    TreeParams params_;
    Rng* rng_;
    std::vector<std::pair<double, int>> sorted_;
    std::vector<std::size_t> left_;
    std::vector<std::size_t> right_;
};

TreeParams tree_params(const Hyperparams& hp) {
    return {static_cast<std::size_t>(hp.tree_min_samples_split),
            static_cast<std::size_t>(hp.tree_max_depth), 0};
}

ForestState fit_forest(const Matrix& x, std::span<const int> y, const Hyperparams& hp,
                       std::uint64_t seed) {
    const std::size_t n = x.rows();
    const int codes = n_codes(y);
    TreeParams params = tree_params(hp);
    params.max_features =
        hp.rf_max_features > 0
            ? static_cast<std::size_t>(hp.rf_max_features)
            : std::max<std::size_t>(1, static_cast<std::size_t>(
                                           std::floor(std::sqrt(static_cast<double>(x.cols())))));

    ForestState forest;
    forest.trees.resize(static_cast<std::size_t>(hp.rf_trees));
    std::vector<std::exception_ptr> errors(forest.trees.size());
    const idx trees = static_cast<idx>(forest.trees.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (idx tt = 0; tt < trees; ++tt) {
        const auto t = static_cast<std::size_t>(tt);
        try {
            Rng rng(mix_seed(seed, t));
            std::vector<std::size_t> rows(n);
            if (!hp.rf_bootstrap) {
                std::iota(rows.begin(), rows.end(), 0);
            } else {
                for (int attempt = 0;; ++attempt) {
                    for (auto& r : rows) r = rng.below(n);
                    const bool mixed = std::any_of(rows.begin(), rows.end(),
                                                   [&](std::size_t r) { return y[r] != y[rows[0]]; });
                    if (mixed) break;
                    if (attempt == 1) {
                        throw DomainError("random forest: bootstrap sample for tree " +
                                          std::to_string(t) + " holds a single class twice in a row");
                    }
                }
            }
            forest.trees[t] = TreeBuilder(x, y, codes, params, &rng).build(std::move(rows));
        } catch (...) {
            errors[t] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return forest;
}

std::vector<std::vector<int>> forest_votes(const ForestState& f, const Matrix& x) {
    std::vector<std::vector<int>> votes(f.trees.size(), std::vector<int>(x.rows()));
    const idx trees = static_cast<idx>(f.trees.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (idx tt = 0; tt < trees; ++tt) {
        const auto t = static_cast<std::size_t>(tt);
        for (std::size_t i = 0; i < x.rows(); ++i) votes[t][i] = f.trees[t].predict_row(x.row(i));
    }
    return votes;
}

// ----------------------------------------------------------------- JSON glue

nlohmann::ordered_json matrix_json(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()},
            {"data", std::vector<double>(m.values().begin(), m.values().end())}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
    return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                  j.at("data").get<std::vector<double>>());
}

nlohmann::ordered_json tree_json(const Tree& t) {
    std::vector<int> feature, left, right, label;
    std::vector<double> threshold;
    for (const auto& n : t.nodes) {
        feature.push_back(n.feature);
        threshold.push_back(n.threshold);
        left.push_back(n.left);
        right.push_back(n.right);
        label.push_back(n.label);
    }
    return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right},
            {"label", label}};
}

Tree tree_from_json(const nlohmann::json& j) {
    const auto feature = j.at("feature").get<std::vector<int>>();
    const auto threshold = j.at("threshold").get<std::vector<double>>();
    const auto left = j.at("left").get<std::vector<int>>();
    const auto right = j.at("right").get<std::vector<int>>();
    const auto label = j.at("label").get<std::vector<int>>();
    Tree t;
    for (std::size_t i = 0; i < feature.size(); ++i) {
        t.nodes.push_back({feature[i], threshold.at(i), left.at(i), right.at(i), label.at(i)});
    }
    return t;
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
    for (const auto& [a, name] : kNames) {
        if (a == algorithm) return name;
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name) {
    for (const auto& [a, tag] : kNames) {
        if (tag == name) return a;
    }
    if (name == "GaussianNB") return Algorithm::GaussianNB;
    if (name == "LogisticRegression") return Algorithm::LogisticRegression;
    if (name == "LinearSVM") return Algorithm::LinearSVM;
    if (name == "DecisionTree") return Algorithm::DecisionTree;
    if (name == "RandomForest") return Algorithm::RandomForest;
    throw ArgumentError("unknown classifier '" + std::string(name) + "'");
}

const std::vector<Algorithm>& all_algorithms() {
    static const std::vector<Algorithm> all = {
        Algorithm::GaussianNB, Algorithm::LogisticRegression, Algorithm::LinearSVM,
        Algorithm::KNN,        Algorithm::DecisionTree,       Algorithm::RandomForest,
    };
    return all;
}

void ClassifierSpec::validate() const {
    const auto& h = params;
    if (!(h.nb_var_floor > 0.0)) throw ConfigError("nb_var_floor must be > 0");
    if (!(h.lr_learning_rate > 0.0) || h.lr_epochs < 1 || h.lr_l2 < 0.0) {
        throw ConfigError("logistic regression needs learning_rate > 0, epochs >= 1, l2 >= 0");
    }
    if (!(h.svm_learning_rate > 0.0) || h.svm_epochs < 1 || h.svm_l2 < 0.0 ||
        h.svm_learning_rate * h.svm_l2 >= 1.0) {
        throw ConfigError("linear SVM needs learning_rate > 0, epochs >= 1, 0 <= lr*l2 < 1");
    }
    if (h.knn_k < 1) throw ConfigError("knn_k must be >= 1");
    if (h.tree_min_samples_split < 2 || h.tree_max_depth < 0) {
        throw ConfigError("trees need min_samples_split >= 2 and max_depth >= 0");
    }
    if (h.rf_trees < 1 || h.rf_max_features < 0) {
        throw ConfigError("random forest needs trees >= 1 and max_features >= 0");
    }
}

int Tree::predict_row(std::span<const double> row) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold
                                         ? n.left
                                         : n.right);
    }
    return nodes[i].label;
}

TrainedClassifier::TrainedClassifier(Algorithm algorithm, std::vector<int> classes,
                                     TrainingInfo info, State state)
    : algorithm_(algorithm), classes_(std::move(classes)), info_(info), state_(std::move(state)) {}

std::vector<int> TrainedClassifier::predict(const Matrix& x) const {
    if (x.cols() != info_.features) {
        throw ShapeError("predict: model expects " + std::to_string(info_.features) +
                         " features, input has " + std::to_string(x.cols()));
    }
    check_finite(x, "predict");
    std::vector<int> out(x.rows());
    switch (algorithm_) {
        case Algorithm::GaussianNB: {
            const auto& s = std::get<NaiveBayesState>(state_);
            const Matrix jll = naive_bayes_jll(s, x);
            for (std::size_t i = 0; i < x.rows(); ++i) out[i] = s.classes[argmax(jll.row(i))];
            break;
        }
        case Algorithm::LogisticRegression:
        case Algorithm::LinearSVM:
            out = predict_linear(std::get<LinearState>(state_), x);
            break;
        case Algorithm::KNN: {
            const auto& s = std::get<KnnState>(state_);
            const auto neighbours = kernels::parallel::knn(s.train, x, s.k);
            const std::size_t k = std::min(s.k, s.train.rows());
            const int codes = classes_.back() + 1;
            std::vector<std::size_t> counts(static_cast<std::size_t>(codes));
            for (std::size_t i = 0; i < x.rows(); ++i) {
                std::fill(counts.begin(), counts.end(), 0);
                for (std::size_t m = 0; m < k; ++m) {
                    ++counts[static_cast<std::size_t>(s.labels[neighbours[i * k + m]])];
                }
                out[i] = majority(counts);
            }
            break;
        }
        case Algorithm::DecisionTree: {
            const auto& t = std::get<Tree>(state_);
            for (std::size_t i = 0; i < x.rows(); ++i) out[i] = t.predict_row(x.row(i));
            break;
        }
        case Algorithm::RandomForest: {
            const auto votes = forest_votes(std::get<ForestState>(state_), x);
            const int codes = classes_.back() + 1;
            std::vector<std::size_t> counts(static_cast<std::size_t>(codes));
            for (std::size_t i = 0; i < x.rows(); ++i) {
                std::fill(counts.begin(), counts.end(), 0);
                for (const auto& tree : votes) ++counts[static_cast<std::size_t>(tree[i])];
                out[i] = majority(counts);
            }
            break;
        }
    }
    return out;
}

Matrix TrainedClassifier::joint_log_likelihood(const Matrix& x) const {
    if (algorithm_ != Algorithm::GaussianNB) {
        throw ArgumentError("joint_log_likelihood is only defined for GaussianNB");
    }
    if (x.cols() != info_.features) throw ShapeError("joint_log_likelihood: feature count mismatch");
    return naive_bayes_jll(std::get<NaiveBayesState>(state_), x);
}

std::vector<std::vector<int>> TrainedClassifier::tree_votes(const Matrix& x) const {
    if (algorithm_ != Algorithm::RandomForest) {
        throw ArgumentError("tree_votes is only defined for RandomForest");
    }
    if (x.cols() != info_.features) throw ShapeError("tree_votes: feature count mismatch");
    return forest_votes(std::get<ForestState>(state_), x);
}

TrainedClassifier train(const ClassifierSpec& spec, const Matrix& x, std::span<const int> y) {
    spec.validate();
    if (x.rows() != y.size()) {
        throw ShapeError("train: " + std::to_string(x.rows()) + " rows but " +
                         std::to_string(y.size()) + " labels");
    }
    if (x.rows() < 2) throw ArgumentError("train: need at least 2 rows");
    if (x.cols() == 0) throw ArgumentError("train: no features");
    check_finite(x, "train");
    for (int c : y) {
        if (c < 0) throw ArgumentError("train: class codes must be >= 0");
    }
    auto classes = distinct_classes(y);
    const bool single_ok =
        spec.algorithm == Algorithm::KNN || spec.algorithm == Algorithm::DecisionTree;
    if (classes.size() < 2 && !single_ok) {
        throw ArgumentError(std::string("train: ") + std::string(to_string(spec.algorithm)) +
                            " needs at least 2 classes");
    }
    const TrainingInfo info{x.rows(), x.cols(), spec.seed};
    const auto& hp = spec.params;

    switch (spec.algorithm) {
        case Algorithm::GaussianNB:
            return {spec.algorithm, classes, info,
                    fit_naive_bayes(x, y, classes, hp.nb_var_floor)};
        case Algorithm::LogisticRegression:
            return {spec.algorithm, classes, info, fit_logistic(x, y, classes, hp)};
        case Algorithm::LinearSVM:
            return {spec.algorithm, classes, info, fit_linear_svm(x, y, classes, hp, spec.seed)};
        case Algorithm::KNN:
            return {spec.algorithm, classes, info,
                    KnnState{x, std::vector<int>(y.begin(), y.end()),
                             static_cast<std::size_t>(hp.knn_k)}};
        case Algorithm::DecisionTree: {
            std::vector<std::size_t> rows(x.rows());
            std::iota(rows.begin(), rows.end(), 0);
            Tree t = TreeBuilder(x, y, n_codes(y), tree_params(hp), nullptr).build(std::move(rows));
            return {spec.algorithm, classes, info, std::move(t)};
        }
        case Algorithm::RandomForest:
            return {spec.algorithm, classes, info, fit_forest(x, y, hp, spec.seed)};
    }
    throw ArgumentError("train: unknown algorithm");
}

std::vector<int> predict(const TrainedClassifier& model, const Matrix& x) {
    return model.predict(x);
}

nlohmann::ordered_json TrainedClassifier::to_json() const {
    nlohmann::ordered_json j;
    j["algorithm"] = std::string(to_string(algorithm_));
    j["classes"] = classes_;
    j["training"] = {{"rows", info_.rows}, {"features", info_.features}, {"seed", info_.seed}};
    nlohmann::ordered_json state;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, NaiveBayesState>) {
                state = {{"log_prior", s.log_prior}, {"mean", matrix_json(s.mean)},
                         {"var", matrix_json(s.var)}};
            } else if constexpr (std::is_same_v<T, LinearState>) {
                state = {{"weights", matrix_json(s.weights)}, {"bias", s.bias}};
            } else if constexpr (std::is_same_v<T, KnnState>) {
                state = {{"k", s.k}, {"train", matrix_json(s.train)}, {"labels", s.labels}};
            } else if constexpr (std::is_same_v<T, Tree>) {
                state = {{"tree", tree_json(s)}};
            } else {
                auto trees = nlohmann::ordered_json::array();
                for (const auto& t : s.trees) trees.push_back(tree_json(t));
                state = {{"trees", std::move(trees)}};
            }
        },
        state_);
    j["state"] = std::move(state);
    return j;
}

TrainedClassifier TrainedClassifier::from_json(const nlohmann::ordered_json& j) {
    const Algorithm algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    auto classes = j.at("classes").get<std::vector<int>>();
    const auto& t = j.at("training");
    const TrainingInfo info{t.at("rows").get<std::size_t>(), t.at("features").get<std::size_t>(),
                            t.at("seed").get<std::uint64_t>()};
    const auto& s = j.at("state");
    switch (algorithm) {
        case Algorithm::GaussianNB:
            return {algorithm, classes, info,
                    NaiveBayesState{classes, s.at("log_prior").get<std::vector<double>>(),
                                    matrix_from_json(s.at("mean")), matrix_from_json(s.at("var"))}};
        case Algorithm::LogisticRegression:
        case Algorithm::LinearSVM:
            return {algorithm, classes, info,
                    LinearState{classes, matrix_from_json(s.at("weights")),
                                s.at("bias").get<std::vector<double>>()}};
        case Algorithm::KNN:
            return {algorithm, classes, info,
                    KnnState{matrix_from_json(s.at("train")), s.at("labels").get<std::vector<int>>(),
                             s.at("k").get<std::size_t>()}};
        case Algorithm::DecisionTree:
            return {algorithm, classes, info, tree_from_json(s.at("tree"))};
        case Algorithm::RandomForest: {
            ForestState f;
            for (const auto& tj : s.at("trees")) f.trees.push_back(tree_from_json(tj));
            return {algorithm, classes, info, std::move(f)};
        }
    }
    throw ArgumentError("unknown algorithm in classifier JSON");
}

nlohmann::ordered_json to_json(const Hyperparams& h) {
    return {
        {"nb_var_floor", h.nb_var_floor},
        {"lr_learning_rate", h.lr_learning_rate},
        {"lr_epochs", h.lr_epochs},
        {"lr_l2", h.lr_l2},
        {"svm_learning_rate", h.svm_learning_rate},
        {"svm_epochs", h.svm_epochs},
        {"svm_l2", h.svm_l2},
        {"knn_k", h.knn_k},
        {"tree_min_samples_split", h.tree_min_samples_split},
        {"tree_max_depth", h.tree_max_depth},
        {"rf_trees", h.rf_trees},
        {"rf_bootstrap", h.rf_bootstrap},
        {"rf_max_features", h.rf_max_features},
    };
}

Hyperparams hyperparams_from_json(const nlohmann::json& j, Hyperparams h) {
    static const std::vector<std::string> known = {
        "nb_var_floor",  "lr_learning_rate",       "lr_epochs",      "lr_l2",
        "svm_learning_rate", "svm_epochs",         "svm_l2",         "knn_k",
        "tree_min_samples_split", "tree_max_depth", "rf_trees",      "rf_bootstrap",
        "rf_max_features",
    };
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown hyperparameter '" + key + "'");
        }
    }
    auto read = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    read("nb_var_floor", h.nb_var_floor);
    read("lr_learning_rate", h.lr_learning_rate);
    read("lr_epochs", h.lr_epochs);
    read("lr_l2", h.lr_l2);
    read("svm_learning_rate", h.svm_learning_rate);
    read("svm_epochs", h.svm_epochs);
    read("svm_l2", h.svm_l2);
    read("knn_k", h.knn_k);
    read("tree_min_samples_split", h.tree_min_samples_split);
    read("tree_max_depth", h.tree_max_depth);
    read("rf_trees", h.rf_trees);
    read("rf_bootstrap", h.rf_bootstrap);
    read("rf_max_features", h.rf_max_features);
    return h;
}

}  // namespace idsfx
