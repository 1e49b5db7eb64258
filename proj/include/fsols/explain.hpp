#pragma once

#include "fsols/features.hpp"
#include "fsols/linear.hpp"
#include "fsols/trees.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace fsols {

struct TermRuleCount {
    std::string term;
    std::size_t count = 0;  // split nodes using the term, over all trees
    /// Per class code: sum over those nodes of (class fraction in the right
    /// child) - (class fraction in the left child). Positive means a high
    /// term weight pushes toward the class.
    std::array<double, kNumClasses> class_direction{};
    /// Most frequent majority class of the right (term weight above
    /// threshold) child over those nodes; ties go to the larger
    /// class_direction, then the lower code.
    ClassLabel direction = ClassLabel::Scientific;
};

struct RuleTermReport {
    std::vector<TermRuleCount> terms;  // count descending, then term
    std::size_t internal_nodes = 0;    // over all trees
    std::vector<std::string> warnings;
};

/// Counts every occurrence of a feature as a split node (per node, not per
/// tree) and ranks the top k terms. k = 0 keeps every term. Throws
/// std::invalid_argument for an empty forest or a feature outside the vocabulary.
RuleTermReport extract_rule_terms(std::span<const DecisionTree> trees, const Vocabulary& vocab, std::size_t k);
RuleTermReport extract_forest_rule_terms(const ForestModel& forest, const Vocabulary& vocab, std::size_t k);

struct ClassFeatures {
    ClassLabel label;
    std::vector<RankedTerm> top;     // weight descending, ties by term
    std::vector<RankedTerm> bottom;  // weight ascending, ties by term
};

struct LinearFeatureReport {
    std::vector<ClassFeatures> classes;
    std::vector<std::string> warnings;
};

/// Top and bottom k terms per class by signed weight. k > |V| is clamped with a warning.
LinearFeatureReport top_linear_features(const LinearModel& model, const Vocabulary& vocab, std::size_t k);

std::string to_json(const RuleTermReport& r);
std::string to_markdown(const RuleTermReport& r);
std::string to_json(const LinearFeatureReport& r);
std::string to_markdown(const LinearFeatureReport& r);

}  // namespace fsols
