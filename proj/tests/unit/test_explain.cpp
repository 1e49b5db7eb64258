#include "fsols/explain.hpp"
#include "fsols/random.hpp"

#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

using namespace fsols;

namespace {

Vocabulary vocab_of(std::vector<std::string> terms) {
    Vocabulary v;
    v.terms = std::move(terms);
    v.document_frequency.assign(v.terms.size(), 1);
    v.rebuild_index();
    return v;
}

Vocabulary numbered_vocab(int n) {
    std::vector<std::string> terms;
    for (int i = 0; i < n; ++i) terms.push_back("t" + std::string(i < 10 ? "0" : "") + std::to_string(i));
    return vocab_of(terms);
}

TreeNode leaf(ClassHistogram h) {
    TreeNode n;
    n.histogram = h;
    return n;
}

}  // namespace

TEST(RuleTerms, SingleStump) {
    DecisionTree t;
    TreeNode root;
    root.feature = 1;
    root.threshold = 0.2;
    root.left = 1;
    root.right = 2;
    root.histogram = {0, 5, 5, 0};
    t.nodes = {root, leaf({0, 5, 1, 0}), leaf({0, 0, 4, 0})};
    const std::vector<DecisionTree> forest = {t};
    const auto r = extract_rule_terms(forest, vocab_of({"cohort", "doctor"}), 10);
    ASSERT_EQ(r.terms.size(), 1u);
    EXPECT_EQ(r.terms[0].term, "doctor");
    EXPECT_EQ(r.terms[0].count, 1u);
    EXPECT_EQ(r.terms[0].direction, ClassLabel::Vernacular);
    EXPECT_DOUBLE_EQ(r.terms[0].class_direction[2], 1.0 - 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(r.terms[0].class_direction[1], -5.0 / 6.0);
    EXPECT_EQ(r.internal_nodes, 1u);
}

TEST(RuleTerms, CountsMatchTraversalOracle) {
    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<DecisionTree> forest;
        for (int i = 0; i < 5; ++i) forest.push_back(gen::random_tree(rng, 12, 9));
        const auto vocab = numbered_vocab(12);
        const auto r = extract_rule_terms(forest, vocab, 0);
        const auto expected = oracle::split_feature_counts(forest);
        ASSERT_EQ(r.terms.size(), expected.size());
        std::size_t total = 0;
        for (const auto& t : r.terms) {
            const auto idx = *vocab.find(t.term);
            EXPECT_EQ(t.count, expected.at(idx)) << t.term;
            EXPECT_LE(t.count, r.internal_nodes);
            total += t.count;
        }
        std::size_t internal = 0;
        for (const auto& t : forest) internal += t.internal_nodes();
        EXPECT_EQ(r.internal_nodes, internal);
        EXPECT_EQ(total, internal);
        for (std::size_t i = 1; i < r.terms.size(); ++i)
            EXPECT_TRUE(r.terms[i - 1].count > r.terms[i].count ||
                        (r.terms[i - 1].count == r.terms[i].count && r.terms[i - 1].term < r.terms[i].term));
    }
}

TEST(RuleTerms, TopKAndErrors) {
    Rng rng(2);
    std::vector<DecisionTree> forest;
    for (int i = 0; i < 3; ++i) forest.push_back(gen::random_tree(rng, 6, 8));
    const auto all = extract_rule_terms(forest, numbered_vocab(6), 0);
    const auto top = extract_rule_terms(forest, numbered_vocab(6), 2);
    ASSERT_EQ(top.terms.size(), std::min<std::size_t>(2, all.terms.size()));
    EXPECT_EQ(top.terms[0].term, all.terms[0].term);
    EXPECT_THROW(extract_rule_terms(std::vector<DecisionTree>{}, numbered_vocab(6), 5), std::invalid_argument);
    EXPECT_THROW(extract_rule_terms(forest, numbered_vocab(3), 5), std::invalid_argument);
}

TEST(RuleTerms, PlantedStructureWordRanksFirst) {
    // Scientific against vernacular; only "references" separates them, so every
    // branch that reaches purity splits on it.
    std::vector<std::string> texts;
    std::vector<ClassLabel> y;
    Rng rng(3);
    const std::vector<std::string> filler = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta", "theta", "iota"};
    for (int i = 0; i < 200; ++i) {
        const auto label = i % 2 ? ClassLabel::Scientific : ClassLabel::Vernacular;
        std::string text;
        for (int w = 0; w < 12; ++w) text += filler[rng.below(filler.size())] + " ";
        if (label == ClassLabel::Scientific) text += "references ";
        texts.push_back(text);
        y.push_back(label);
    }
    const auto v = fit_tfidf(texts);
    ForestOptions o;
    o.n_trees = 100;
    o.seed = 7;
    const auto forest = train_random_forest(v.transform(texts), y, o);
    const auto r = extract_forest_rule_terms(forest, v.vocabulary, 5);
    ASSERT_FALSE(r.terms.empty());
    EXPECT_EQ(r.terms[0].term, "references");
    EXPECT_EQ(r.terms[0].direction, ClassLabel::Scientific);
    EXPECT_GT(r.terms[0].class_direction[1], 0.0);
}

TEST(LinearFeatures, PlantedReportingVerb) {
    std::vector<std::string> texts;
    std::vector<ClassLabel> y;
    Rng rng(4);
    const std::vector<std::string> filler = {"sleep", "heart", "study", "people", "night", "doctor", "health", "risk"};
    for (int i = 0; i < 120; ++i) {
        const auto label = label_from_code(i % 4);
        std::string text;
        for (int w = 0; w < 15; ++w) text += filler[rng.below(filler.size())] + " ";
        if (label == ClassLabel::Vernacular) text += "says ";
        texts.push_back(text);
        y.push_back(label);
    }
    const auto v = fit_tfidf(texts);
    const auto model = train_linear_svm(v.transform(texts), y);
    const auto r = top_linear_features(model, v.vocabulary, 3);
    ASSERT_EQ(r.classes.size(), 4u);
    const auto& vern = r.classes[2];
    EXPECT_EQ(vern.label, ClassLabel::Vernacular);
    EXPECT_EQ(vern.top[0].term, "says");
    EXPECT_EQ(r.classes[0].bottom[0].term, "says");
}

TEST(LinearFeatures, MatchesSortOracle) {
    Rng rng(5);
    LinearModel m;
    m.classes = {kAllLabels.begin(), kAllLabels.end()};
    m.weights = Eigen::MatrixXd(4, 15);
    for (Eigen::Index i = 0; i < m.weights.size(); ++i) m.weights(i) = static_cast<double>(rng.below(7)) - 3.0;  // many ties
    m.bias = Eigen::VectorXd::Zero(4);
    const auto vocab = numbered_vocab(15);
    const auto r = top_linear_features(m, vocab, 6);
    for (int c = 0; c < 4; ++c) {
        std::vector<int> idx(15);
        std::iota(idx.begin(), idx.end(), 0);
        auto by = [&](bool desc) {
            auto order = idx;
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                const double wa = m.weights(c, a), wb = m.weights(c, b);
                if (wa != wb) return desc ? wa > wb : wa < wb;
                return vocab.terms[static_cast<std::size_t>(a)] < vocab.terms[static_cast<std::size_t>(b)];
            });
            order.resize(6);
            return order;
        };
        const auto top = by(true), bottom = by(false);
        for (std::size_t i = 0; i < 6; ++i) {
            EXPECT_EQ(r.classes[static_cast<std::size_t>(c)].top[i].term, vocab.terms[static_cast<std::size_t>(top[i])]);
            EXPECT_EQ(r.classes[static_cast<std::size_t>(c)].top[i].score, m.weights(c, top[i]));
            EXPECT_EQ(r.classes[static_cast<std::size_t>(c)].bottom[i].term,
                      vocab.terms[static_cast<std::size_t>(bottom[i])]);
        }
    }
}

TEST(LinearFeatures, ZeroWeightsRankLexicographically) {
    LinearModel m;
    m.classes = {ClassLabel::Scientific, ClassLabel::Vernacular};
    m.weights = Eigen::MatrixXd::Zero(2, 3);
    m.bias = Eigen::VectorXd::Zero(2);
    const auto r = top_linear_features(m, vocab_of({"apple", "mango", "zucchini"}), 10);
    ASSERT_EQ(r.warnings.size(), 1u);
    ASSERT_EQ(r.classes[0].top.size(), 3u);
    EXPECT_EQ(r.classes[0].top[0].term, "apple");
    EXPECT_EQ(r.classes[0].top[2].term, "zucchini");
    EXPECT_EQ(r.classes[0].bottom[0].term, "apple");
    EXPECT_EQ(r.classes[0].top[1].score, 0.0);
}

TEST(Reports, JsonAndMarkdown) {
    DecisionTree t;
    TreeNode root;
    root.feature = 0;
    root.left = 1;
    root.right = 2;
    root.histogram = {1, 1, 0, 0};
    t.nodes = {root, leaf({1, 0, 0, 0}), leaf({0, 1, 0, 0})};
    const std::vector<DecisionTree> forest = {t};
    const auto r = extract_rule_terms(forest, vocab_of({"references"}), 3);
    const auto j = nlohmann::json::parse(to_json(r));
    EXPECT_EQ(j["terms"][0]["term"], "references");
    EXPECT_EQ(j["terms"][0]["count"], 1);
    EXPECT_EQ(j["terms"][0]["direction"], "scientific");
    EXPECT_NE(to_markdown(r).find("| 1 | references | 1 | scientific |"), std::string::npos) << to_markdown(r);
}
