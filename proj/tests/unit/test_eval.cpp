#include "fsols/error.hpp"
#include "fsols/eval.hpp"
#include "fsols/random.hpp"
#include "fsols/synthetic.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

using namespace fsols;

namespace {

constexpr auto A = ClassLabel::AlternativeScientific;
constexpr auto S = ClassLabel::Scientific;
constexpr auto V = ClassLabel::Vernacular;
constexpr auto D = ClassLabel::Disinformative;

Manifest labelled(const std::vector<std::pair<ClassLabel, std::string>>& spec) {
    Manifest m;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        Document d;
        d.id = "d" + std::to_string(i);
        d.label = spec[i].first;
        d.topic = spec[i].second;
        d.source = "s";
        d.raw_text = "x";
        d.refresh_length();
        m.documents.push_back(d);
    }
    return m;
}

Manifest sized(std::size_t n, std::size_t classes = 4) {
    std::vector<std::pair<ClassLabel, std::string>> spec;
    for (std::size_t i = 0; i < n; ++i) spec.emplace_back(label_from_code(static_cast<int>(i % classes)), "t" + std::to_string(i % 3));
    return labelled(spec);
}

void check_partition(const Manifest& m, const Split& s) {
    std::set<std::string> seen;
    for (const auto& id : s.train_ids) ASSERT_TRUE(seen.insert(id).second);
    for (const auto& id : s.test_ids) ASSERT_TRUE(seen.insert(id).second) << "id in both sets: " << id;
    ASSERT_EQ(seen.size(), m.documents.size());
}

}  // namespace

TEST(Split, EightyTwenty) {
    const auto m = sized(100);
    const auto s = split(m, 0.8, Stratify::Class, 1);
    EXPECT_EQ(s.train_ids.size(), 80u);
    EXPECT_EQ(s.test_ids.size(), 20u);
    check_partition(m, s);
    const auto again = split(m, 0.8, Stratify::Class, 1);
    EXPECT_EQ(again.test_ids, s.test_ids);
    EXPECT_NE(split(m, 0.8, Stratify::Class, 2).test_ids, s.test_ids);
}

TEST(Split, TransformerProtocolSize) {
    // round(0.15 * 2466) = 370 test documents.
    const auto m = sized(2466);
    const auto s = split(m, 0.85, Stratify::Class, 0);
    EXPECT_EQ(s.test_ids.size(), 370u);
    EXPECT_EQ(s.train_ids.size(), 2096u);
}

TEST(Split, StrataWithinOneOfTheirShare) {
    Rng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::pair<ClassLabel, std::string>> spec;
        const auto n = 20 + rng.below(200);
        for (std::uint64_t i = 0; i < n; ++i)
            spec.emplace_back(label_from_code(static_cast<int>(rng.below(4))), "t" + std::to_string(rng.below(3)));
        auto m = labelled(spec);
        const double ratio = 0.5 + 0.4 * rng.uniform();
        const auto strat = trial % 2 ? Stratify::ClassTopic : Stratify::Class;
        Split s;
        try {
            s = split(m, ratio, strat, rng.next());
        } catch (const DataError&) {
            continue;  // a stratum of one document
        }
        check_partition(m, s);
        EXPECT_EQ(s.test_ids.size(), static_cast<std::size_t>(std::llround((1 - ratio) * static_cast<double>(n))));
        std::map<std::string, std::pair<double, double>> strata;  // size, test count
        const std::set<std::string> test(s.test_ids.begin(), s.test_ids.end());
        for (const auto& d : m.documents) {
            const auto key = std::string(label_name(d.label)) + (strat == Stratify::ClassTopic ? "/" + d.topic : "");
            strata[key].first += 1;
            strata[key].second += test.count(d.id);
        }
        for (const auto& [key, st] : strata) EXPECT_LE(std::abs(st.second - (1 - ratio) * st.first), 1.0) << key;
    }
}

TEST(Split, Errors) {
    const auto m = sized(20);
    EXPECT_THROW(split(m, 0.0, Stratify::Class, 0), std::invalid_argument);
    EXPECT_THROW(split(m, 1.0, Stratify::Class, 0), std::invalid_argument);
    const auto tiny = labelled({{S, "a"}, {S, "a"}, {V, "a"}});
    try {
        split(tiny, 0.5, Stratify::Class, 0);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("vernacular"), std::string::npos) << e.what();
    }
}

TEST(Metrics, WorkedExample) {
    const std::vector<ClassLabel> t = {A, A, S, S}, p = {A, S, S, S};
    const auto r = compute_metrics(t, p);
    EXPECT_DOUBLE_EQ(r.per_class[1].precision, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.per_class[1].recall, 1.0);
    EXPECT_DOUBLE_EQ(r.per_class[1].f1, 0.8);
    EXPECT_DOUBLE_EQ(r.per_class[0].f1, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.weighted_f1, 11.0 / 15.0);  // 0.7333...
    EXPECT_DOUBLE_EQ(r.macro_f1, 11.0 / 15.0);
    EXPECT_DOUBLE_EQ(r.accuracy, 0.75);
    EXPECT_EQ(r.confusion[0][1], 1);
    EXPECT_EQ(r.n, 4);
}

TEST(Metrics, PerfectAndConstantPredictions) {
    const std::vector<ClassLabel> t = {A, S, V, D, A, S, V, D};
    const auto perfect = compute_metrics(t, t);
    EXPECT_EQ(perfect.accuracy, 1.0);
    EXPECT_EQ(perfect.macro_f1, 1.0);
    EXPECT_EQ(perfect.weighted_f1, 1.0);
    const std::vector<ClassLabel> p(8, V);
    const auto constant = compute_metrics(t, p);
    EXPECT_EQ(constant.accuracy, 0.25);
    EXPECT_EQ(constant.per_class[0].precision, 0.0);  // zero division
    EXPECT_THROW(compute_metrics(t, std::vector<ClassLabel>(3, V)), std::invalid_argument);
    EXPECT_THROW(compute_metrics({}, {}), std::invalid_argument);
}

TEST(Metrics, WeightedEqualsMacroForEqualSupports) {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<ClassLabel> t, p;
        for (int i = 0; i < 40; ++i) {
            t.push_back(label_from_code(i % 4));
            p.push_back(label_from_code(static_cast<int>(rng.below(4))));
        }
        const auto r = compute_metrics(t, p);
        EXPECT_NEAR(r.weighted_f1, r.macro_f1, 1e-15);
    }
}

TEST(Metrics, MatchRationalOracleOnRandomMatrices) {
    Rng rng(5);
    for (int trial = 0; trial < 5000; ++trial) {
        ConfusionMatrix cm{};
        std::int64_t n = 0;
        for (auto& row : cm)
            for (auto& v : row) n += v = static_cast<std::int64_t>(rng.below(trial % 2 ? 6 : 40));
        if (n == 0) continue;
        const auto got = metrics_from_confusion(cm);
        const auto want = oracle::metrics(cm);
        for (std::size_t c = 0; c < 4; ++c) {
            ASSERT_EQ(got.per_class[c].precision, want.precision[c]);
            ASSERT_EQ(got.per_class[c].recall, want.recall[c]);
            ASSERT_EQ(got.per_class[c].f1, want.f1[c]);
            ASSERT_EQ(got.per_class[c].support, want.support[c]);
        }
        ASSERT_EQ(got.accuracy, want.accuracy);
        ASSERT_EQ(got.macro_f1, want.macro_f1);
        ASSERT_EQ(got.weighted_f1, want.weighted_f1);
    }
}

TEST(Metrics, JsonRoundTrip) {
    const std::vector<ClassLabel> t = {A, S, V, D, A, V}, p = {A, S, S, D, V, V};
    const auto r = compute_metrics(t, p);
    const auto back = metrics_from_json(to_json(r));
    EXPECT_EQ(back.weighted_f1, r.weighted_f1);
    EXPECT_EQ(back.macro_f1, r.macro_f1);
    EXPECT_EQ(back.confusion, r.confusion);
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(back.per_class[c].f1, r.per_class[c].f1);
    EXPECT_NE(to_markdown(r).find("weighted"), std::string::npos);
}

TEST(Unseen, ProtocolAndErrors) {
    SyntheticOptions o;
    o.topics = {"sleep", "stroke"};
    o.docs_per_class_per_topic = 12;
    const auto train_all = synthetic_corpus(o);
    const auto s = split(train_all, 0.75, Stratify::ClassTopic, 1);
    Manifest train, test;
    train.documents = select_documents(train_all, s.train_ids);
    test.documents = select_documents(train_all, s.test_ids);
    o.topics = {"urine"};
    o.docs_per_class_per_topic = 4;
    o.seed = 9;
    for (auto& d : synthetic_corpus(o).documents) test.documents.push_back(d);

    TrainConfig cfg;
    cfg.calibration_folds = 3;
    const auto model = train_classifier(train.documents, cfg);
    const auto r = unseen_topic_eval(model, train, {"urine"}, test);
    EXPECT_EQ(r.unseen.n, 16);
    EXPECT_EQ(r.in_topic.n, static_cast<std::int64_t>(s.test_ids.size()));
    EXPECT_DOUBLE_EQ(r.delta_weighted_f1, r.unseen.weighted_f1 - r.in_topic.weighted_f1);
    EXPECT_NE(to_markdown(r).find("unseen"), std::string::npos);

    EXPECT_THROW(unseen_topic_eval(model, train, {"sleep"}, test), DataError);    // leakage
    EXPECT_THROW(unseen_topic_eval(model, train, {"measles"}, test), DataError);  // absent from test
}
