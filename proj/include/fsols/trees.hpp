#pragma once

#include "fsols/corpus.hpp"
#include "fsols/features.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace fsols {

/// Weighted class counts indexed by class code.
using ClassHistogram = std::array<double, kNumClasses>;

struct TreeNode {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;  // samples with x[feature] <= threshold go left
    int left = -1;
    int right = -1;
    ClassHistogram histogram{};  // training samples reaching this node

    bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    template <typename Row>
    const TreeNode& leaf_for(const Row& x) const {
        int idx = 0;
        while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
            const auto& n = nodes[static_cast<std::size_t>(idx)];
            idx = x(n.feature) <= n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(idx)];
    }

    std::size_t internal_nodes() const;
};

struct ForestModel {
    std::vector<ClassLabel> classes;
    Eigen::Index n_features = 0;
    std::size_t max_features = 0;  // candidate features examined per split
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> tree_seeds;  // seed ^ i
    std::vector<DecisionTree> trees;

    /// Mean of the per-tree leaf class frequencies; columns follow `classes`.
    Eigen::MatrixXd predict_proba(const SparseMatrix& X) const;
};

struct ForestOptions {
    std::size_t n_trees = 100;
    std::uint64_t seed = 0;
    std::size_t max_features = 0;  // 0 = floor(sqrt(n_features))
    unsigned threads = 0;          // 0 = hardware concurrency
};

/// Random forest of fully grown Gini trees. Tree i draws a bootstrap of
/// exactly n rows with seed (seed ^ i). At every split, features are drawn
/// without replacement until `max_features` features that are non-constant in
/// the node have been evaluated (constant features carry no split and are not
/// counted), mirroring the reference implementation.
ForestModel train_random_forest(const SparseMatrix& X, std::span<const ClassLabel> y, const ForestOptions& opts = {});

struct BoostStage {
    DecisionTree stump;
    double weight = 0.0;
};

struct BoostModel {
    std::vector<ClassLabel> classes;
    Eigen::Index n_features = 0;
    std::vector<BoostStage> stages;

    /// SAMME decision: per class, the weight-normalized vote of the stages
    /// predicting it. Columns follow `classes`.
    Eigen::MatrixXd decision(const SparseMatrix& X) const;
};

struct BoostOptions {
    std::size_t n_stages = 50;
    double learning_rate = 1.0;
    std::uint64_t seed = 0;  // orders features, which breaks ties between equally good stumps
};

/// Multiclass AdaBoost (SAMME) over depth-1 Gini stumps. Stops early on a
/// perfect stump (kept with weight 1) or one no better than chance (dropped;
/// an error if it is the first).
BoostModel train_adaboost(const SparseMatrix& X, std::span<const ClassLabel> y, const BoostOptions& opts = {});

/// Predicted class code of a tree leaf: the heaviest histogram bin (lowest code on ties).
int leaf_class(const TreeNode& leaf);

/// floor(sqrt(n)), at least 1.
std::size_t sqrt_features(Eigen::Index n_features);

}  // namespace fsols
