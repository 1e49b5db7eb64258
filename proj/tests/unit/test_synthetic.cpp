#include "fsols/features.hpp"
#include "fsols/synthetic.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace fsols;

TEST(Synthetic, BalancedAndDeterministic) {
    SyntheticOptions o;
    o.topics = {"sleep", "stroke", "measles"};
    o.docs_per_class_per_topic = 5;
    o.seed = 3;
    const auto m = synthetic_corpus(o);
    ASSERT_EQ(m.documents.size(), 60u);
    std::map<std::pair<std::string, int>, int> cells;
    std::set<std::string> ids;
    for (const auto& d : m.documents) {
        ++cells[{d.topic, code(d.label)}];
        EXPECT_TRUE(ids.insert(d.id).second);
        EXPECT_EQ(d.source, "synthetic-" + std::string(label_name(d.label)));
    }
    for (const auto& [cell, n] : cells) EXPECT_EQ(n, 5);
    EXPECT_EQ(synthetic_corpus(o), m);
    o.seed = 4;
    EXPECT_NE(synthetic_corpus(o).documents[0].raw_text, m.documents[0].raw_text);
}

TEST(Synthetic, DocumentLengthsRespectBounds) {
    SyntheticOptions o;
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        const auto tokens = tokenize(synthetic_text(label_from_code(i % 4), "sleep", o, rng));
        EXPECT_GE(tokens.size(), o.min_tokens);
        EXPECT_LE(tokens.size(), o.max_tokens);
    }
}

TEST(Synthetic, TopicVocabulariesAreDisjoint) {
    std::set<std::string> seen;
    auto topics = SyntheticOptions::default_topics();
    for (const auto& t : SyntheticOptions::heldout_topics()) topics.push_back(t);
    for (const auto& t : topics) {
        const auto words = topic_words(t, 60);
        EXPECT_EQ(words, topic_words(t, 60));
        for (const auto& w : words) {
            EXPECT_TRUE(seen.insert(w).second) << t << ": " << w;
            EXPECT_EQ(tokenize(w), std::vector<std::string>{w});
        }
    }
    // Style markers never collide with topic words.
    for (const auto l : kAllLabels)
        for (const auto& w : style_markers(l)) EXPECT_FALSE(seen.count(w)) << w;
}

TEST(Synthetic, HeldoutTopicsAreNew) {
    const auto known = SyntheticOptions::default_topics();
    for (const auto& t : SyntheticOptions::heldout_topics())
        EXPECT_EQ(std::find(known.begin(), known.end(), t), known.end()) << t;
    EXPECT_EQ(known.size(), 10u);
}

TEST(Synthetic, MarkersCarryTheClassSignal) {
    SyntheticOptions o;
    o.extra_share = 0;
    Rng rng(2);
    for (const auto label : kAllLabels) {
        std::map<std::string, int> counts;
        for (int i = 0; i < 20; ++i)
            for (const auto& t : tokenize(synthetic_text(label, "sleep", o, rng))) ++counts[t];
        const auto& own = style_markers(label);
        int own_hits = 0;
        for (const auto& w : own) own_hits += counts[w];
        for (const auto other : kAllLabels) {
            if (other == label) continue;
            int hits = 0;
            for (const auto& w : style_markers(other))
                if (std::find(own.begin(), own.end(), w) == own.end()) hits += counts[w];
            EXPECT_GT(own_hits, hits) << label_name(label) << " vs " << label_name(other);
        }
    }
}
