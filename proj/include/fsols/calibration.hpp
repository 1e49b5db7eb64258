#pragma once

#include "fsols/corpus.hpp"
#include "fsols/features.hpp"
#include "fsols/linear.hpp"
#include "fsols/trees.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace fsols {

/// p(s) = 1 / (1 + exp(a * s + b)). Increasing in s when a < 0.
template <typename Scalar>
struct Sigmoid {
    Scalar a = Scalar(-1);
    Scalar b = Scalar(0);

    Scalar operator()(Scalar s) const {
        const Scalar z = a * s + b;
        // Evaluated on the side that cannot overflow.
        if (z >= Scalar(0)) {
            const Scalar e = std::exp(-z);
            return e / (Scalar(1) + e);
        }
        return Scalar(1) / (Scalar(1) + std::exp(z));
    }
};

/// Platt's method: maximum likelihood fit of (a, b) on decision values with
/// smoothed targets (N+ + 1)/(N+ + 2) and 1/(N- + 2), by Newton iterations
/// with backtracking.
Sigmoid<double> fit_sigmoid(std::span<const double> scores, const std::vector<bool>& positive);

using BaseModel = std::variant<LinearModel, ForestModel, BoostModel>;

/// Classes the base model was trained on.
const std::vector<ClassLabel>& model_classes(const BaseModel& model);
Eigen::Index model_features(const BaseModel& model);

/// Raw per-class scores (linear decision values, forest probabilities, SAMME
/// votes); columns follow model_classes(model).
Eigen::MatrixXd decision_scores(const BaseModel& model, const SparseMatrix& X);

using BaseTrainer = std::function<BaseModel(const SparseMatrix&, std::span<const ClassLabel>)>;

struct CalibratedFold {
    BaseModel base;
    std::vector<Sigmoid<double>> sigmoids;  // one per entry of classes
};

/// Per-fold base models, each with one-vs-rest sigmoids fitted on the fold it did not see.
struct CalibratedModel {
    std::vector<ClassLabel> classes;
    std::vector<CalibratedFold> folds;

    /// Mean over folds of the calibrated per-class scores. Columns follow `classes`.
    Eigen::MatrixXd predict(const SparseMatrix& X) const;
};

/// Stratified assignment of sample i to a fold in [0, folds). Throws
/// std::invalid_argument when a class has fewer members than folds.
std::vector<int> stratified_folds(std::span<const ClassLabel> y, int folds, std::uint64_t seed);

/// Cross-validated sigmoid calibration: for each fold, trains `trainer` on the
/// remaining folds and fits per-class sigmoids on the held-out decision scores.
CalibratedModel calibrate_sigmoid(const BaseTrainer& trainer, const SparseMatrix& X, std::span<const ClassLabel> y,
                                  int folds = 5, std::uint64_t seed = 0);

/// Independent per-class scores in [0, 1]; they need not sum to 1.
struct ClassScores {
    std::array<double, kNumClasses> scores{};  // by class code
    ClassLabel argmax = ClassLabel::Scientific;
    bool abstain = false;

    double operator[](ClassLabel c) const { return scores[static_cast<std::size_t>(code(c))]; }
};

/// Builds ClassScores from one row of per-class values. Classes the model
/// never saw score 0. Ties resolve to the lowest class code.
ClassScores make_scores(std::span<const ClassLabel> classes, const Eigen::Ref<const Eigen::RowVectorXd>& row,
                        double threshold);

ClassScores predict_scores(const CalibratedModel& model, const DocVector& x, double threshold = 0.5);

/// Uncalibrated baseline: 1 / (1 + exp(-s)) applied to each raw decision score.
Eigen::MatrixXd squash_raw_scores(const BaseModel& model, const SparseMatrix& X);

}  // namespace fsols
