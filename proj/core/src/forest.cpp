#include "tcasim/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tcasim {

const std::array<const char*, kNumFeatures> kFeatureNames = {
    "snr_n", "pl_n", "j_n", "l_n", "t_n", "sinr_n", "netc", "initial_trust", "behavior_score"};

void ForestHyperparams::validate() const {
    if (n_trees <= 0) throw std::invalid_argument("n_trees must be positive");
    if (max_depth <= 0) throw std::invalid_argument("max_depth must be positive");
    if (min_leaf <= 0) throw std::invalid_argument("min_leaf must be positive");
    if (features_per_split <= 0 || features_per_split > kNumFeatures) {
        throw std::invalid_argument("features_per_split must be in 1..9");
    }
}

double gini(std::span<const int> class_counts) {
    long n = 0;
    for (int c : class_counts) {
        if (c < 0) throw std::invalid_argument("negative class count");
        n += c;
    }
    if (n == 0) throw std::invalid_argument("gini of an empty set");
    double sum_sq = 0.0;
    for (int c : class_counts) {
        const double p = static_cast<double>(c) / static_cast<double>(n);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

namespace {

// Split search over an index subset of the dataset. Features are scanned in
// ascending order and gains compared strictly, so equal gains resolve to the
// lower feature index and then the lower threshold.
std::optional<Split> best_split_indexed(std::span<const LabeledExample> dataset,
                                        std::span<const int> idx,
                                        std::span<const int> feature_subset, int min_leaf) {
    const int n = static_cast<int>(idx.size());
    if (n < 2 * min_leaf) return std::nullopt;

    std::array<int, kNumClasses> parent_counts{};
    for (int i : idx) ++parent_counts[dataset[i].class_id - 1];
    const double parent_gini = gini(parent_counts);

    std::vector<int> features(feature_subset.begin(), feature_subset.end());
    std::sort(features.begin(), features.end());

    std::optional<Split> best;
    std::vector<std::pair<double, int>> order(n);  // (value, class-1)
    for (int f : features) {
        for (int k = 0; k < n; ++k) {
            const LabeledExample& ex = dataset[idx[k]];
            order[k] = {ex.features[f], ex.class_id - 1};
        }
        std::sort(order.begin(), order.end());

        std::array<int, kNumClasses> left{};
        std::array<int, kNumClasses> right = parent_counts;
        for (int k = 1; k < n; ++k) {
            ++left[order[k - 1].second];
            --right[order[k - 1].second];
            if (order[k].first <= order[k - 1].first) continue;  // not a value boundary
            if (k < min_leaf || n - k < min_leaf) continue;
            const double g = parent_gini -
                             (static_cast<double>(k) / n) * gini(left) -
                             (static_cast<double>(n - k) / n) * gini(right);
            if (g <= 0.0) continue;
            if (!best || g > best->gain) {
                best = Split{f, (order[k - 1].first + order[k].first) / 2.0, g};
            }
        }
    }
    return best;
}

struct TreeBuilder {
    std::span<const LabeledExample> dataset;
    const ForestHyperparams& hp;
    Rng& rng;
    Tree tree;

    // Draws hp.features_per_split distinct feature indices.
    std::vector<int> draw_features() {
        std::array<int, kNumFeatures> all;
        std::iota(all.begin(), all.end(), 0);
        for (int i = 0; i < hp.features_per_split; ++i) {
            const int j = i + static_cast<int>(rng.uniform_int(kNumFeatures - i));
            std::swap(all[i], all[j]);
        }
        return {all.begin(), all.begin() + hp.features_per_split};
    }

    int make_leaf(std::span<const int> idx) {
        TreeNode node;
        for (int i : idx) ++node.histogram[dataset[i].class_id - 1];
        tree.push_back(node);
        return static_cast<int>(tree.size()) - 1;
    }

    int grow(std::vector<int>& idx, int depth) {
        bool pure = true;
        for (std::size_t k = 1; k < idx.size() && pure; ++k) {
            pure = dataset[idx[k]].class_id == dataset[idx[0]].class_id;
        }
        if (pure || depth >= hp.max_depth ||
            static_cast<int>(idx.size()) < 2 * hp.min_leaf) {
            return make_leaf(idx);
        }
        const std::vector<int> features = draw_features();
        const auto split = best_split_indexed(dataset, idx, features, hp.min_leaf);
        if (!split) return make_leaf(idx);

        std::vector<int> left_idx, right_idx;
        left_idx.reserve(idx.size());
        right_idx.reserve(idx.size());
        for (int i : idx) {
            (dataset[i].features[split->feature] < split->threshold ? left_idx : right_idx)
                .push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();

        const int self = static_cast<int>(tree.size());
        tree.push_back(TreeNode{split->feature, split->threshold, -1, -1, {}});
        tree[self].left = grow(left_idx, depth + 1);
        tree[self].right = grow(right_idx, depth + 1);
        return self;
    }
};

int leaf_vote(const TreeNode& leaf) {
    int best = 0;
    for (int c = 1; c < kNumClasses; ++c) {
        if (leaf.histogram[c] > leaf.histogram[best]) best = c;
    }
    return best + 1;
}

}  // namespace

std::optional<Split> best_split(std::span<const LabeledExample> examples,
                                std::span<const int> feature_subset, int min_leaf) {
    if (min_leaf <= 0) throw std::invalid_argument("min_leaf must be positive");
    for (int f : feature_subset) {
        if (f < 0 || f >= kNumFeatures) throw std::invalid_argument("feature index outside 0..8");
    }
    std::vector<int> idx(examples.size());
    std::iota(idx.begin(), idx.end(), 0);
    return best_split_indexed(examples, idx, feature_subset, min_leaf);
}

Forest train_forest(std::span<const LabeledExample> dataset, const ForestHyperparams& hp,
                    std::uint64_t seed) {
    hp.validate();
    if (static_cast<int>(dataset.size()) < 10 * hp.min_leaf) {
        throw std::invalid_argument("dataset too small to train on");
    }
    for (const LabeledExample& ex : dataset) {
        if (ex.class_id < 1 || ex.class_id > kNumClasses) {
            throw std::invalid_argument("class id outside 1..4");
        }
    }

    Forest forest;
    forest.hyperparams = hp;
    forest.seed = seed;

    bool single_class = true;
    for (std::size_t k = 1; k < dataset.size() && single_class; ++k) {
        single_class = dataset[k].class_id == dataset[0].class_id;
    }
    if (single_class) {
        // Nothing to learn; keep the forest shape but flag it.
        forest.degenerate_single_class = true;
        TreeNode leaf;
        for (const LabeledExample& ex : dataset) ++leaf.histogram[ex.class_id - 1];
        forest.trees.assign(hp.n_trees, Tree{leaf});
        return forest;
    }

    const int n = static_cast<int>(dataset.size());
    for (int t = 0; t < hp.n_trees; ++t) {
        Rng tree_rng(Rng::derive(seed, static_cast<std::uint64_t>(t)));
        std::vector<int> sample(n);
        for (int k = 0; k < n; ++k) {
            sample[k] = static_cast<int>(tree_rng.uniform_int(n));
        }
        TreeBuilder builder{dataset, hp, tree_rng, {}};
        builder.tree.reserve(64);
        builder.grow(sample, 0);
        forest.trees.push_back(std::move(builder.tree));
    }
    return forest;
}

int predict(const Forest& forest, const FeatureVector& features) {
    if (forest.trees.empty()) throw std::invalid_argument("empty forest");
    std::array<int, kNumClasses> votes{};
    for (const Tree& tree : forest.trees) {
        int at = 0;
        while (tree[at].feature >= 0) {
            at = features[tree[at].feature] < tree[at].threshold ? tree[at].left : tree[at].right;
        }
        ++votes[leaf_vote(tree[at]) - 1];
    }
    int best = 0;
    for (int c = 1; c < kNumClasses; ++c) {
        if (votes[c] > votes[best]) best = c;
    }
    return best + 1;
}

EvalReport evaluate(const Forest& forest, std::span<const LabeledExample> test_set) {
    if (test_set.empty()) throw std::invalid_argument("empty test set");
    EvalReport report;
    long correct = 0;
    for (const LabeledExample& ex : test_set) {
        const int pred = predict(forest, ex.features);
        ++report.confusion[ex.class_id - 1][pred - 1];
        if (pred == ex.class_id) ++correct;
    }
    report.accuracy = static_cast<double>(correct) / static_cast<double>(test_set.size());

    double f1_sum = 0.0;
    int f1_classes = 0;
    for (int c = 0; c < kNumClasses; ++c) {
        long tp = report.confusion[c][c];
        long truth = 0, predicted = 0;
        for (int k = 0; k < kNumClasses; ++k) {
            truth += report.confusion[c][k];
            predicted += report.confusion[k][c];
        }
        if (truth == 0 && predicted == 0) {
            report.absent_classes.push_back(c + 1);
            continue;  // no support on either side: flagged, not averaged
        }
        const double precision = predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
        const double recall = truth > 0 ? static_cast<double>(tp) / truth : 0.0;
        const double f1 =
            (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        f1_sum += f1;
        ++f1_classes;
    }
    report.macro_f1 = f1_classes > 0 ? f1_sum / f1_classes : 0.0;
    return report;
}

namespace {

std::string dump_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void save_forest(const Forest& forest, const std::string& path) {
    nlohmann::json j;
    j["format"] = "tcasim-forest";
    j["version"] = 1;
    j["n_features"] = kNumFeatures;
    j["n_classes"] = kNumClasses;
    j["seed"] = forest.seed;
    j["degenerate_single_class"] = forest.degenerate_single_class;
    j["hyperparams"] = {{"n_trees", forest.hyperparams.n_trees},
                        {"max_depth", forest.hyperparams.max_depth},
                        {"min_leaf", forest.hyperparams.min_leaf},
                        {"features_per_split", forest.hyperparams.features_per_split}};
    nlohmann::json trees = nlohmann::json::array();
    for (const Tree& tree : forest.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const TreeNode& n : tree) {
            if (n.feature < 0) {
                nodes.push_back({{"leaf", n.histogram}});
            } else {
                nodes.push_back(
                    {{"f", n.feature}, {"t", n.threshold}, {"l", n.left}, {"r", n.right}});
            }
        }
        trees.push_back(std::move(nodes));
    }
    j["trees"] = std::move(trees);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(1) << '\n';
}

Forest load_forest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("format", "") != "tcasim-forest" || j.value("version", 0) != 1) {
        throw std::runtime_error(path + ": not a version-1 forest file");
    }
    if (j.value("n_features", 0) != kNumFeatures || j.value("n_classes", 0) != kNumClasses) {
        throw std::runtime_error(path + ": model shape mismatch");
    }
    Forest forest;
    forest.seed = j.value("seed", std::uint64_t{0});
    forest.degenerate_single_class = j.value("degenerate_single_class", false);
    const auto& hp = j.at("hyperparams");
    forest.hyperparams.n_trees = hp.at("n_trees").get<int>();
    forest.hyperparams.max_depth = hp.at("max_depth").get<int>();
    forest.hyperparams.min_leaf = hp.at("min_leaf").get<int>();
    forest.hyperparams.features_per_split = hp.at("features_per_split").get<int>();
    for (const auto& jtree : j.at("trees")) {
        Tree tree;
        for (const auto& jnode : jtree) {
            TreeNode n;
            if (jnode.contains("leaf")) {
                const auto& h = jnode.at("leaf");
                for (int c = 0; c < kNumClasses; ++c) n.histogram[c] = h.at(c).get<int>();
            } else {
                n.feature = jnode.at("f").get<int>();
                n.threshold = jnode.at("t").get<double>();
                n.left = jnode.at("l").get<int>();
                n.right = jnode.at("r").get<int>();
            }
            tree.push_back(n);
        }
        forest.trees.push_back(std::move(tree));
    }
    return forest;
}

void save_dataset_csv(std::span<const LabeledExample> dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (int f = 0; f < kNumFeatures; ++f) out << kFeatureNames[f] << ',';
    out << "class_id\n";
    for (const LabeledExample& ex : dataset) {
        for (double v : ex.features) out << dump_double(v) << ',';
        out << ex.class_id << '\n';
    }
}

std::vector<LabeledExample> load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty dataset file");

    std::vector<LabeledExample> dataset;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        LabeledExample ex;
        for (int f = 0; f < kNumFeatures; ++f) {
            if (!std::getline(ss, cell, ',')) throw std::runtime_error(path + ": short row");
            ex.features[f] = std::stod(cell);
        }
        if (!std::getline(ss, cell, ',')) throw std::runtime_error(path + ": missing class id");
        ex.class_id = std::stoi(cell);
        if (ex.class_id < 1 || ex.class_id > kNumClasses) {
            throw std::runtime_error(path + ": class id outside 1..4");
        }
        dataset.push_back(ex);
    }
    return dataset;
}

void stratified_split(std::span<const LabeledExample> dataset, double train_fraction,
                      std::uint64_t seed, std::vector<LabeledExample>& train,
                      std::vector<LabeledExample>& test) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0) {
        throw std::invalid_argument("train_fraction must be in (0, 1)");
    }
    train.clear();
    test.clear();
    for (int c = 1; c <= kNumClasses; ++c) {
        std::vector<int> idx;
        for (std::size_t k = 0; k < dataset.size(); ++k) {
            if (dataset[k].class_id == c) idx.push_back(static_cast<int>(k));
        }
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(c)));
        rng.shuffle(idx);
        const std::size_t n_train =
            static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(idx.size())));
        for (std::size_t k = 0; k < idx.size(); ++k) {
            (k < n_train ? train : test).push_back(dataset[idx[k]]);
        }
    }
}

}  // namespace tcasim
