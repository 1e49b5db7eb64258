#include "fsols/trees.hpp"

#include "fsols/linear.hpp"
#include "fsols/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace fsols {

std::size_t DecisionTree::internal_nodes() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
}

int leaf_class(const TreeNode& leaf) {
    int best = 0;
    for (int c = 1; c < kNumClasses; ++c)
        if (leaf.histogram[c] > leaf.histogram[best]) best = c;
    return best;
}

std::size_t sqrt_features(Eigen::Index n_features) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features)))));
}

namespace {

double gini(const ClassHistogram& h, double total) {
    if (total <= 0.0) return 0.0;
    double s = 0.0;
    for (const double v : h) s += (v / total) * (v / total);
    return 1.0 - s;
}

double total_of(const ClassHistogram& h) { return std::accumulate(h.begin(), h.end(), 0.0); }

struct SplitCandidate {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;  // weighted child impurity (lower is better)
};

// Shared view over the training data for tree growth.
struct TrainingData {
    Eigen::MatrixXd X;  // dense, column-major: column f is contiguous
    std::vector<int> label;  // class codes
};

// Best threshold for one feature over `samples`; `found` is false when the feature is constant there.
SplitCandidate best_threshold(const TrainingData& data, std::span<const int> samples, std::span<const double> weight,
                              int feature, const ClassHistogram& total, std::vector<std::pair<double, int>>& scratch) {
    scratch.clear();
    const auto col = data.X.col(feature);
    for (const int i : samples) scratch.emplace_back(col[i], i);
    std::sort(scratch.begin(), scratch.end());
    SplitCandidate best;
    if (scratch.front().first == scratch.back().first) return best;

    const double total_w = total_of(total);
    ClassHistogram left{};
    double left_w = 0.0;
    for (std::size_t j = 0; j + 1 < scratch.size(); ++j) {
        const int i = scratch[j].second;
        left[static_cast<std::size_t>(data.label[static_cast<std::size_t>(i)])] += weight[static_cast<std::size_t>(i)];
        left_w += weight[static_cast<std::size_t>(i)];
        if (scratch[j].first == scratch[j + 1].first) continue;
        ClassHistogram right;
        for (int c = 0; c < kNumClasses; ++c) right[c] = total[c] - left[c];
        const double right_w = total_w - left_w;
        const double impurity = left_w * gini(left, left_w) + right_w * gini(right, right_w);
        if (!best.found || impurity < best.impurity) {
            best.found = true;
            best.feature = feature;
            best.impurity = impurity;
            best.threshold = 0.5 * (scratch[j].first + scratch[j + 1].first);
            if (best.threshold == scratch[j + 1].first) best.threshold = scratch[j].first;
        }
    }
    return best;
}

ClassHistogram histogram_of(const TrainingData& data, std::span<const int> samples, std::span<const double> weight) {
    ClassHistogram h{};
    for (const int i : samples)
        h[static_cast<std::size_t>(data.label[static_cast<std::size_t>(i)])] += weight[static_cast<std::size_t>(i)];
    return h;
}

// Grows a tree over the samples with positive weight. max_depth < 0 means unlimited.
DecisionTree grow_tree(const TrainingData& data, std::span<const double> weight, std::size_t max_features,
                       int max_depth, Rng& rng) {
    const auto d = static_cast<std::size_t>(data.X.cols());
    std::vector<int> root_samples;
    for (std::size_t i = 0; i < weight.size(); ++i)
        if (weight[i] > 0.0) root_samples.push_back(static_cast<int>(i));

    DecisionTree tree;
    struct Pending {
        int node;
        std::vector<int> samples;
        int depth;
    };
    std::vector<Pending> stack;
    tree.nodes.push_back(TreeNode{});
    stack.push_back({0, std::move(root_samples), 0});

    std::vector<std::size_t> pool(d);
    std::vector<std::pair<double, int>> scratch;
    while (!stack.empty()) {
        Pending job = std::move(stack.back());
        stack.pop_back();
        const ClassHistogram hist = histogram_of(data, job.samples, weight);
        tree.nodes[static_cast<std::size_t>(job.node)].histogram = hist;

        const bool pure = gini(hist, total_of(hist)) <= 1e-12;
        if (pure || job.samples.size() < 2 || (max_depth >= 0 && job.depth >= max_depth)) continue;

        std::iota(pool.begin(), pool.end(), std::size_t{0});
        SplitCandidate best;
        std::size_t evaluated = 0;
        for (std::size_t j = 0; j < d && evaluated < max_features; ++j) {
            const std::size_t r = j + static_cast<std::size_t>(rng.below(d - j));
            std::swap(pool[j], pool[r]);
            const SplitCandidate c =
                best_threshold(data, job.samples, weight, static_cast<int>(pool[j]), hist, scratch);
            if (!c.found) continue;
            ++evaluated;
            if (!best.found || c.impurity < best.impurity) best = c;
        }
        if (!best.found) continue;

        std::vector<int> left, right;
        const auto col = data.X.col(best.feature);
        for (const int i : job.samples) (col[i] <= best.threshold ? left : right).push_back(i);

        const int left_id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{});
        const int right_id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{});
        auto& node = tree.nodes[static_cast<std::size_t>(job.node)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = left_id;
        node.right = right_id;
        // Right pushed first so the left subtree is expanded first.
        stack.push_back({right_id, std::move(right), job.depth + 1});
        stack.push_back({left_id, std::move(left), job.depth + 1});
    }
    return tree;
}

TrainingData make_training_data(const SparseMatrix& X, std::span<const ClassLabel> y) {
    TrainingData data;
    data.X = Eigen::MatrixXd(X);
    data.label.reserve(y.size());
    for (const auto l : y) data.label.push_back(code(l));
    return data;
}

// Column j of the returned matrix holds the value of histogram bin classes[j].
template <typename Fn>
Eigen::MatrixXd per_row(const SparseMatrix& X, Eigen::Index n_features, std::size_t n_classes, Fn&& fn) {
    if (X.cols() != n_features)
        throw std::invalid_argument("dimension mismatch: model has " + std::to_string(n_features) +
                                    " features, input has " + std::to_string(X.cols()));
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(X.rows(), static_cast<Eigen::Index>(n_classes));
    Eigen::VectorXd dense(n_features);
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        dense.setZero();
        for (SparseMatrix::InnerIterator it(X, r); it; ++it) dense[it.index()] = it.value();
        fn(dense, out.row(r));
    }
    return out;
}

}  // namespace

Eigen::MatrixXd ForestModel::predict_proba(const SparseMatrix& X) const {
    return per_row(X, n_features, classes.size(), [&](const Eigen::VectorXd& x, auto row) {
        for (const auto& tree : trees) {
            const auto& leaf = tree.leaf_for(x);
            const double total = total_of(leaf.histogram);
            for (std::size_t j = 0; j < classes.size(); ++j)
                row[static_cast<Eigen::Index>(j)] += leaf.histogram[static_cast<std::size_t>(code(classes[j]))] / total;
        }
        row /= static_cast<double>(trees.size());
    });
}

ForestModel train_random_forest(const SparseMatrix& X, std::span<const ClassLabel> y, const ForestOptions& opts) {
    if (opts.n_trees == 0) throw std::invalid_argument("n_trees must be >= 1");
    ForestModel model;
    model.classes = training_classes(X, y);
    model.n_features = X.cols();
    model.max_features = opts.max_features ? std::min<std::size_t>(opts.max_features, static_cast<std::size_t>(X.cols()))
                                           : sqrt_features(X.cols());
    model.seed = opts.seed;
    model.trees.resize(opts.n_trees);
    for (std::size_t t = 0; t < opts.n_trees; ++t) model.tree_seeds.push_back(opts.seed ^ t);

    const TrainingData data = make_training_data(X, y);
    const auto n = static_cast<std::size_t>(X.rows());
    auto build = [&](std::size_t t) {
        Rng rng(model.tree_seeds[t]);
        std::vector<double> weight(n, 0.0);
        for (std::size_t draw = 0; draw < n; ++draw) weight[rng.below(n)] += 1.0;
        model.trees[t] = grow_tree(data, weight, model.max_features, -1, rng);
    };

    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, opts.n_trees));
    if (threads <= 1) {
        for (std::size_t t = 0; t < opts.n_trees; ++t) build(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (unsigned w = 0; w < threads; ++w)
            workers.emplace_back([&] {
                for (std::size_t t = next++; t < opts.n_trees; t = next++) build(t);
            });
        for (auto& w : workers) w.join();
    }
    return model;
}

Eigen::MatrixXd BoostModel::decision(const SparseMatrix& X) const {
    double total_weight = 0.0;
    for (const auto& s : stages) total_weight += s.weight;
    return per_row(X, n_features, classes.size(), [&](const Eigen::VectorXd& x, auto row) {
        for (const auto& stage : stages) {
            const int predicted = leaf_class(stage.stump.leaf_for(x));
            for (std::size_t j = 0; j < classes.size(); ++j)
                if (code(classes[j]) == predicted) row[static_cast<Eigen::Index>(j)] += stage.weight;
        }
        if (total_weight > 0.0) row /= total_weight;
    });
}

BoostModel train_adaboost(const SparseMatrix& X, std::span<const ClassLabel> y, const BoostOptions& opts) {
    if (opts.n_stages == 0) throw std::invalid_argument("n_stages must be >= 1");
    BoostModel model;
    model.classes = training_classes(X, y);
    model.n_features = X.cols();
    const TrainingData data = make_training_data(X, y);
    const auto n = static_cast<std::size_t>(X.rows());
    const auto k = static_cast<double>(model.classes.size());

    std::vector<double> weight(n, 1.0 / static_cast<double>(n));
    Rng rng(opts.seed);
    for (std::size_t stage = 0; stage < opts.n_stages; ++stage) {
        DecisionTree stump = grow_tree(data, weight, static_cast<std::size_t>(X.cols()), 1, rng);

        double error = 0.0;
        std::vector<bool> wrong(n);
        for (std::size_t i = 0; i < n; ++i) {
            wrong[i] = leaf_class(stump.leaf_for(data.X.row(static_cast<Eigen::Index>(i)))) != data.label[i];
            if (wrong[i]) error += weight[i];
        }
        const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
        error /= total;

        if (error <= 0.0) {
            model.stages.push_back({std::move(stump), 1.0});
            break;
        }
        if (error >= 1.0 - 1.0 / k) {
            if (model.stages.empty())
                throw std::runtime_error("adaboost: the first stump is no better than chance");
            break;
        }
        const double alpha = opts.learning_rate * (std::log((1.0 - error) / error) + std::log(k - 1.0));
        model.stages.push_back({std::move(stump), alpha});
        if (stage + 1 == opts.n_stages) break;

        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (wrong[i] && weight[i] > 0.0) weight[i] *= std::exp(alpha);
            sum += weight[i];
        }
        for (auto& w : weight) w /= sum;
    }
    return model;
}

}  // namespace fsols
