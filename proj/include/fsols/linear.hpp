#pragma once

#include "fsols/corpus.hpp"
#include "fsols/features.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace fsols {

enum class LinearLoss { SquaredHinge, Logistic };

/// One weight row per trained class.
struct LinearModel {
    std::vector<ClassLabel> classes;
    Eigen::MatrixXd weights;  // classes x features
    Eigen::VectorXd bias;     // classes
    LinearLoss loss = LinearLoss::SquaredHinge;
    double C = 1.0;
    /// Objective value after each optimization epoch, one series per
    /// optimization problem (per class for one-vs-rest, one for multinomial).
    std::vector<std::vector<double>> objective_history;
    bool converged = false;

    Eigen::Index n_features() const { return weights.cols(); }

    /// Decision values, one column per entry of `classes`.
    Eigen::MatrixXd decision(const SparseMatrix& X) const;
    Eigen::VectorXd decision(const DocVector& x) const;
};

struct SvmOptions {
    double C = 1.0;
    double tol = 1e-4;          // stop once an epoch lowers the dual objective by less than this
    int max_epochs = 1000;
    double bias_scaling = 1.0;  // the intercept is learned as the weight of a constant feature
    std::uint64_t seed = 0;
};

/// One-vs-rest L2-regularized squared-hinge SVM, solved per class by dual
/// coordinate descent:
///     min_w  1/2 |w|^2 + C * sum_i max(0, 1 - y_i w.x_i)^2
/// The bias is folded into w through a constant feature. The recorded
/// objective is the dual objective, which every coordinate step lowers.
LinearModel train_linear_svm(const SparseMatrix& X, std::span<const ClassLabel> y, const SvmOptions& opts = {});

struct LogRegOptions {
    double C = 1.0;
    double gradient_tol = 1e-5;  // max-abs gradient at which optimization stops
    int max_iter = 2000;
    int memory = 10;             // L-BFGS history length
};

/// Multinomial logistic regression:
///     min_{W,b}  C * sum_i -log softmax(W x_i + b)_{y_i} + 1/2 |W|_F^2
/// (intercepts unpenalized), minimized with L-BFGS and an Armijo line search.
LinearModel train_logreg(const SparseMatrix& X, std::span<const ClassLabel> y, const LogRegOptions& opts = {});

/// The multinomial objective above for parameters packed as a
/// classes x (features + 1) matrix whose last column holds the intercepts.
/// `class_index[i]` is the row of sample i's class. Writes the gradient when
/// `gradient` is non-null.
double logreg_objective(const SparseMatrix& X, std::span<const int> class_index, const Eigen::MatrixXd& params,
                        double C, Eigen::MatrixXd* gradient);

/// Sorted distinct labels; throws std::invalid_argument when fewer than two
/// classes are present or X and y disagree in length.
std::vector<ClassLabel> training_classes(const SparseMatrix& X, std::span<const ClassLabel> y);

}  // namespace fsols
