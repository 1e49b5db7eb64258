#pragma once

#include "fsols/calibration.hpp"
#include "fsols/corpus.hpp"
#include "fsols/features.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fsols {

enum class ModelKind { Svc, LogReg, RandomForest, AdaBoost };

std::string_view model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// Training configuration. Defaults are the reference toolkit defaults.
struct TrainConfig {
    ModelKind model = ModelKind::Svc;
    Weighting vectorizer = Weighting::TfIdf;
    std::size_t max_features = 1000;
    double C = 1.0;
    std::size_t n_trees = 100;
    std::size_t n_stages = 50;
    int calibration_folds = 5;
    bool calibrate = true;
    std::uint64_t seed = 0;
};

/// Trains the base model selected by `config` (no calibration).
BaseModel train_base(const TrainConfig& config, const SparseMatrix& X, std::span<const ClassLabel> y);

/// A vectorizer, a base model fitted on all training rows (used for
/// explanations and, when uncalibrated, for scoring), and the cross-validated
/// calibrated ensemble.
struct TextClassifier {
    TrainConfig config;
    Vectorizer vectorizer;
    BaseModel base;
    std::optional<CalibratedModel> calibrated;
    std::vector<std::string> test_ids;  // held-out ids recorded at training time, if any

    /// Per-class scores in [0, 1] for each text; columns are class codes 0..3.
    Eigen::MatrixXd score_matrix(std::span<const std::string> texts) const;
    ClassScores score(std::string_view text, double threshold = 0.5) const;
    std::vector<ClassLabel> predict(std::span<const std::string> texts) const;
};

TextClassifier train_classifier(std::span<const std::string> texts, std::span<const ClassLabel> labels,
                                const TrainConfig& config);
TextClassifier train_classifier(std::span<const Document> docs, const TrainConfig& config);

/// Standalone vectorizer artifact (vocabulary, document frequencies, idf).
void save_vectorizer(const Vectorizer& v, const std::filesystem::path& path);
Vectorizer load_vectorizer(const std::filesystem::path& path);

/// Model artifact: JSON with a format version, the vocabulary hash and the training config.
void save_classifier(const TextClassifier& model, const std::filesystem::path& path);
TextClassifier load_classifier(const std::filesystem::path& path);

inline constexpr int kModelFormatVersion = 1;

}  // namespace fsols
