#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcasim/rng.hpp"

namespace tcasim {

inline constexpr int kNumFeatures = 9;
inline constexpr int kNumClasses = 4;

/// Feature order is fixed and shared by the dataset CSV and the trained
/// model: the six normalized QoS metrics, netC, the trust value at episode
/// start and the observed behavior score.
using FeatureVector = std::array<double, kNumFeatures>;

extern const std::array<const char*, kNumFeatures> kFeatureNames;

struct LabeledExample {
    FeatureVector features{};
    int class_id = 1;  // 1..kNumClasses
};

struct ForestHyperparams {
    int n_trees = 100;
    int max_depth = 10;
    int min_leaf = 5;
    int features_per_split = 3;  // ceil(sqrt(9))

    void validate() const;
};

/// Candidate split chosen by exhaustive search over midpoints.
struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

/// Flat binary tree. Interior nodes hold (feature, threshold, left, right);
/// leaves hold the class histogram of the training examples that reached
/// them. Samples with feature < threshold go left.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::array<int, kNumClasses> histogram{};
};

using Tree = std::vector<TreeNode>;

struct Forest {
    ForestHyperparams hyperparams;
    std::uint64_t seed = 0;
    bool degenerate_single_class = false;
    std::vector<Tree> trees;
};

/// Gini impurity 1 - sum((c_i/n)^2); zero for pure sets, rejects empty ones.
double gini(std::span<const int> class_counts);

/// Exhaustive best split of `examples` restricted to `feature_subset`:
/// candidate thresholds are midpoints between consecutive distinct sorted
/// values, both children must keep at least min_leaf examples, and the Gini
/// gain must be positive. Ties break towards the lower feature index, then
/// the lower threshold. nullopt when no valid split exists.
std::optional<Split> best_split(std::span<const LabeledExample> examples,
                                std::span<const int> feature_subset, int min_leaf);

/// Bagged CART training: each tree grows on a bootstrap sample (with
/// replacement, same size) and considers features_per_split random features
/// at every node. Deterministic for a given (dataset, hyperparams, seed).
/// A single-class dataset yields one-leaf trees with the degenerate flag
/// set; fewer than 10 * min_leaf examples are rejected.
Forest train_forest(std::span<const LabeledExample> dataset, const ForestHyperparams& hp,
                    std::uint64_t seed);

/// Majority vote over the trees; each tree votes its leaf's argmax class.
/// All ties break towards the lower class id.
int predict(const Forest& forest, const FeatureVector& features);

struct EvalReport {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    // confusion[truth-1][predicted-1]
    std::array<std::array<int, kNumClasses>, kNumClasses> confusion{};
    // classes absent from both truth and prediction; excluded from macro_f1
    std::vector<int> absent_classes;
};

/// Accuracy, macro F1 and the confusion matrix on a labeled test set.
/// Classes that never occur in either truth or prediction are flagged in
/// absent_classes and left out of the macro F1 average.
EvalReport evaluate(const Forest& forest, std::span<const LabeledExample> test_set);

/// Versioned JSON persistence of a trained forest.
void save_forest(const Forest& forest, const std::string& path);
Forest load_forest(const std::string& path);

/// Dataset CSV round-trip; header is the feature names plus class_id.
void save_dataset_csv(std::span<const LabeledExample> dataset, const std::string& path);
std::vector<LabeledExample> load_dataset_csv(const std::string& path);

/// Deterministic stratified split: within each class the examples are
/// shuffled with `seed` and the first train_fraction goes to train.
void stratified_split(std::span<const LabeledExample> dataset, double train_fraction,
                      std::uint64_t seed, std::vector<LabeledExample>& train,
                      std::vector<LabeledExample>& test);

}  // namespace tcasim
