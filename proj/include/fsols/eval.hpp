#pragma once

#include "fsols/classifier.hpp"
#include "fsols/corpus.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fsols {

enum class Stratify { Class, ClassTopic };

struct Split {
    std::vector<std::string> train_ids;  // manifest order
    std::vector<std::string> test_ids;   // manifest order
    double ratio = 0.8;                  // train fraction
    Stratify strat = Stratify::Class;
    std::uint64_t seed = 0;
};

/// Stratified train/test split. The test set holds round((1 - ratio) * n)
/// documents, allocated to strata by largest remainder so that every stratum
/// is within one document of its exact share; inside a stratum the test
/// documents are drawn by a seeded shuffle. Throws std::invalid_argument for
/// ratio outside (0, 1) and DataError for a stratum with fewer than 2 documents.
Split split(const Manifest& m, double ratio, Stratify strat, std::uint64_t seed);

/// Documents of `m` whose ids are listed, in manifest order.
std::vector<Document> select_documents(const Manifest& m, const std::vector<std::string>& ids);

/// Rows: true class code; columns: predicted class code.
using ConfusionMatrix = std::array<std::array<std::int64_t, kNumClasses>, kNumClasses>;

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0;
};

/// Precision, recall and F1 use 0 for an empty denominator. Macro-F1 averages
/// the classes present in the truth or the predictions. Every value is the
/// correctly rounded double of the exact rational result.
struct MetricsReport {
    std::array<ClassMetrics, kNumClasses> per_class{};  // by class code
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
    ConfusionMatrix confusion{};
    std::int64_t n = 0;
};

/// Throws std::invalid_argument for differing lengths or empty input.
MetricsReport compute_metrics(std::span<const ClassLabel> y_true, std::span<const ClassLabel> y_pred);
MetricsReport metrics_from_confusion(const ConfusionMatrix& cm);

MetricsReport evaluate(const TextClassifier& model, std::span<const Document> docs);

struct UnseenTopicReport {
    std::vector<std::string> heldout_topics;
    MetricsReport in_topic;
    MetricsReport unseen;
    double delta_weighted_f1 = 0.0;  // unseen - in_topic
    double delta_macro_f1 = 0.0;
    double delta_accuracy = 0.0;
    std::array<double, kNumClasses> delta_f1{};
};

/// Scores the test documents of held-out topics separately from the rest.
/// Throws DataError when a held-out topic occurs in the training manifest or
/// is missing from the test manifest, or when either slice is empty.
UnseenTopicReport unseen_topic_eval(const TextClassifier& model, const Manifest& train,
                                    const std::vector<std::string>& heldout_topics, const Manifest& test);

std::string to_json(const MetricsReport& r);
std::string to_markdown(const MetricsReport& r);
std::string to_json(const UnseenTopicReport& r);
std::string to_markdown(const UnseenTopicReport& r);
MetricsReport metrics_from_json(const std::string& text);

}  // namespace fsols
