#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "idsfx/matrix.hpp"

namespace idsfx {

enum class Algorithm { GaussianNB, LogisticRegression, LinearSVM, KNN, DecisionTree, RandomForest };

// Short tags used in reports: NB, LR, SVM, KNN, DT, RF.
std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);
const std::vector<Algorithm>& all_algorithms();

// Defaults are fixed so runs are reproducible; every value can be overridden
// from the run config.
struct Hyperparams {
    double nb_var_floor = 1e-9;

    double lr_learning_rate = 0.1;
    int lr_epochs = 500;
    double lr_l2 = 1e-4;

    double svm_learning_rate = 0.01;
    int svm_epochs = 200;
    double svm_l2 = 1e-4;

    int knn_k = 5;

    int tree_min_samples_split = 2;
    int tree_max_depth = 0;  // 0 = unlimited

    int rf_trees = 100;
    bool rf_bootstrap = true;
    int rf_max_features = 0;  // 0 = floor(sqrt(q))

    friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

struct ClassifierSpec {
    Algorithm algorithm = Algorithm::GaussianNB;
    Hyperparams params;
    std::uint64_t seed = 0;

    void validate() const;
};

struct NaiveBayesState {
    std::vector<int> classes;
    std::vector<double> log_prior;  // per class
    Matrix mean;                    // classes x q
    Matrix var;                     // classes x q, floored
};

struct LinearState {
    std::vector<int> classes;
    Matrix weights;             // classes x q
    std::vector<double> bias;   // per class
};

struct KnnState {
    Matrix train;
    std::vector<int> labels;
    std::size_t k = 5;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;  // majority class code at this node
};

struct Tree {
    std::vector<TreeNode> nodes;

    int predict_row(std::span<const double> row) const;
};

struct ForestState {
    std::vector<Tree> trees;
};

struct TrainingInfo {
    std::size_t rows = 0;
    std::size_t features = 0;
    std::uint64_t seed = 0;
};

class TrainedClassifier {
public:
    using State = std::variant<NaiveBayesState, LinearState, KnnState, Tree, ForestState>;

    TrainedClassifier(Algorithm algorithm, std::vector<int> classes, TrainingInfo info, State state);

    Algorithm algorithm() const noexcept { return algorithm_; }
    // Class codes seen at training, ascending.
    const std::vector<int>& classes() const noexcept { return classes_; }
    const TrainingInfo& info() const noexcept { return info_; }
    const State& state() const noexcept { return state_; }

    std::vector<int> predict(const Matrix& x) const;

    // Per-class joint log-likelihood (GaussianNB only): rows x classes.
    Matrix joint_log_likelihood(const Matrix& x) const;
    // Each tree's vote per row (RandomForest only): trees x rows.
    std::vector<std::vector<int>> tree_votes(const Matrix& x) const;

    nlohmann::ordered_json to_json() const;
    static TrainedClassifier from_json(const nlohmann::ordered_json& j);

private:
    Algorithm algorithm_;
    std::vector<int> classes_;
    TrainingInfo info_;
    State state_;
};

// Trains on x (rows = samples) with class codes y >= 0. Deterministic given
// spec.seed. Throws DomainError on NaN input.
TrainedClassifier train(const ClassifierSpec& spec, const Matrix& x, std::span<const int> y);

std::vector<int> predict(const TrainedClassifier& model, const Matrix& x);

nlohmann::ordered_json to_json(const Hyperparams& h);
Hyperparams hyperparams_from_json(const nlohmann::json& j, Hyperparams base = {});

}  // namespace idsfx
