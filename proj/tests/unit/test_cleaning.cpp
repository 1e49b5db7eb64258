#include "fsols/cleaning.hpp"
#include "fsols/error.hpp"
#include "fsols/features.hpp"
#include "fsols/random.hpp"

#include "support/scratch.hpp"

#include <gtest/gtest.h>

using namespace fsols;

namespace {

// Inputs built from boilerplate, DOIs, references sections and awkward whitespace.
std::string noisy_text(Rng& rng) {
    static const std::vector<std::string> pieces = {
        "Sleep helps memory.", "Share this page to Facebook", "Sign up", "Sign", " up", "doi:10.1000/xyz.12",
        "https://doi.org/10.1234/abc-1).", "DOI 10.55555/q", "Continued on next page", "About the Author Jane Roe",
        "\nReferences\n", "BMJ", "British Medical Journal", "www.biomedcentral.com", "  ", "\t", "\n", "\n\n\n",
        "\xC2\xAD", "\xE2\x80\x8B", "\xEF\xBB\xBF", "\x07", "Image credit: someone", "caf\xC3\xA9",
        "This is an open access article under the terms of CC-BY.", "Save Article", "(Smith 2020)", "."};
    std::string s;
    const auto n = 1 + rng.below(30);
    for (std::uint64_t i = 0; i < n; ++i) {
        s += pieces[rng.below(pieces.size())];
        if (rng.below(3) == 0) s += ' ';
    }
    return s;
}

Document doc(std::string id, ClassLabel label, std::string text, std::string source = "s") {
    Document d;
    d.id = std::move(id);
    d.label = label;
    d.topic = "t";
    d.source = std::move(source);
    d.raw_text = std::move(text);
    d.refresh_length();
    return d;
}

}  // namespace

TEST(Normalize, WhitespaceAndSpecialCharacters) {
    EXPECT_EQ(normalize_whitespace("  a \t  b  \n\n\n\n c  "), "a b\n\nc");
    EXPECT_EQ(normalize_whitespace("soft\xC2\xADhyphen zero\xE2\x80\x8Bwidth \xEF\xBB\xBF" "bom"), "softhyphen zerowidth bom");
    EXPECT_EQ(normalize_whitespace("bell\x07 ok"), "bell ok");
    EXPECT_EQ(normalize_whitespace("line\r\nbreak"), "line\nbreak");
    EXPECT_EQ(normalize_whitespace(""), "");
    EXPECT_EQ(normalize_whitespace("a\xC2\xA0 b\t\tc"), "a b c");
}

TEST(Rules, BoilerplateIsRemoved) {
    const auto rules = default_ruleset();
    EXPECT_EQ(rules.apply("Eat well. Share this page to Facebook Sleep well."), "Eat well. Sleep well.");
    EXPECT_EQ(rules.apply("Text.\nThis is an open access article under the terms of the CC BY license.\nMore."),
              "Text.\n\nMore.");
    EXPECT_EQ(rules.apply("See doi:10.1000/xyz.12."), "See .");
    EXPECT_EQ(rules.apply("At https://doi.org/10.1234/abc-1)."), "At ).");
}

TEST(Rules, DoiRemovedSentenceIntact) {
    const auto rules = default_ruleset();
    EXPECT_EQ(rules.apply("Full data at doi.org/10.1000/xyz in the appendix."), "Full data at in the appendix.");
}

TEST(Rules, DefaultSetContents) {
    const auto rules = default_ruleset();
    bool recaptcha = false;
    for (const auto& r : rules.rules())
        if (r.payload.find("This site is protected by reCAPTCHA") != std::string::npos) recaptcha = true;
    EXPECT_TRUE(recaptcha);
    // Math markers are deliberately kept.
    EXPECT_EQ(rules.apply("Let mathusepackage x = 2."), "Let mathusepackage x = 2.");
    EXPECT_EQ(rules.apply("Continued from previous page\nText."), "Text.");
}

TEST(Rules, JournalNamesOnlyInReferences) {
    const auto rules = default_ruleset();
    const std::string text = "The BMJ reported it.\nReferences\nSmith J. BMJ 2020;1:2.";
    EXPECT_EQ(rules.apply(text), "The BMJ reported it.\nReferences\nSmith J. 2020;1:2.");
}

TEST(Rules, ScopedRuleOnlyTouchesItsSource) {
    RuleSet rules({{"ad", RuleKind::LiteralRemove, "ADVERT", "webmd", RuleRegion::All, false}});
    EXPECT_EQ(rules.apply("a ADVERT b", "webmd"), "a  b");
    EXPECT_EQ(rules.apply("a ADVERT b", "mayo-clinic"), "a ADVERT b");
}

TEST(Rules, FixedPointAcrossRules) {
    // Removing "XY" exposes another "XY"; a single pass would leave one behind.
    RuleSet rules({{"xy", RuleKind::LiteralRemove, "XY", "", RuleRegion::All, false}});
    EXPECT_EQ(rules.apply("XXYY"), "");
}

TEST(Rules, Idempotence) {
    const auto rules = default_ruleset();
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const auto raw = noisy_text(rng);
        const auto once = rules.apply(raw);
        ASSERT_EQ(rules.apply(once), once) << "input: " << raw;
    }
}

TEST(Rules, InvalidDefinitions) {
    EXPECT_THROW(RuleSet({{"bad", RuleKind::PatternRemove, "(unclosed", "", RuleRegion::All, false}}), DataError);
    EXPECT_THROW(RuleSet({{"a", RuleKind::LiteralRemove, "x", "", RuleRegion::All, false},
                          {"a", RuleKind::LiteralRemove, "y", "", RuleRegion::All, false}}),
                 DataError);
}

TEST(Rules, JsonRoundTrip) {
    Scratch dir;
    const auto rules = default_ruleset();
    write_ruleset(rules, dir / "rules.json");
    const auto back = load_ruleset(dir / "rules.json");
    EXPECT_EQ(back.version(), rules.version());
    ASSERT_EQ(back.rules().size(), rules.rules().size());
    for (std::size_t i = 0; i < rules.rules().size(); ++i) {
        const auto& a = rules.rules()[i];
        const auto& b = back.rules()[i];
        EXPECT_EQ(a.name, b.name);
        EXPECT_EQ(a.kind, b.kind);
        EXPECT_EQ(a.payload, b.payload);
        EXPECT_EQ(a.scope, b.scope);
        EXPECT_EQ(a.region, b.region);
        EXPECT_EQ(a.provisional, b.provisional);
    }
    spit(dir / "bad.json", R"({"rules":[{"name":"r","kind":"teleport"}]})");
    EXPECT_THROW(load_ruleset(dir / "bad.json"), DataError);
}

TEST(Rules, ShippedRuleFileMatchesBuiltIn) {
    const auto shipped = load_ruleset(std::filesystem::path(FSOLS_DATA) / "cleaning-rules.json");
    EXPECT_EQ(shipped.version(), default_ruleset().version());
    EXPECT_EQ(shipped.rules().size(), default_ruleset().rules().size());
}

TEST(Clean, KeepsRawTextAndRefreshesLength) {
    Manifest m;
    m.documents = {doc("1", ClassLabel::Vernacular, "Hello   world. Sign up")};
    const auto cleaned = clean_manifest(m, default_ruleset());
    const auto& d = cleaned.documents[0];
    EXPECT_EQ(d.raw_text, "Hello   world. Sign up");
    ASSERT_TRUE(d.clean_text.has_value());
    EXPECT_EQ(*d.clean_text, "Hello world.");
    EXPECT_EQ(d.char_len, 12u);
}

TEST(Audit, SurfacesResidueTerms) {
    Manifest m;
    for (int i = 0; i < 5; ++i) {
        m.documents.push_back(doc("v" + std::to_string(i), ClassLabel::Vernacular, "sleep tips navbarwidget navbarwidget"));
        m.documents.push_back(doc("s" + std::to_string(i), ClassLabel::Scientific, "cohort analysis of sleep"));
    }
    EXPECT_THROW(residue_audit(m, 3), DataError);  // not cleaned yet
    const auto cleaned = clean_manifest(m, default_ruleset());
    const auto audit = residue_audit(cleaned, 1);
    ASSERT_EQ(audit.classes.size(), 2u);
    EXPECT_EQ(audit.classes[0].label, ClassLabel::Scientific);
    EXPECT_EQ(audit.classes[1].label, ClassLabel::Vernacular);
    ASSERT_EQ(audit.classes[1].terms.size(), 1u);
    EXPECT_EQ(audit.classes[1].terms[0].term, "navbarwidget");
    EXPECT_THROW(residue_audit(cleaned, 0), std::invalid_argument);
}

TEST(Audit, SingleClassCorpus) {
    Manifest m;
    m.documents = {doc("1", ClassLabel::Vernacular, "xjunkx xjunkx tips"), doc("2", ClassLabel::Vernacular, "xjunkx tips sleep")};
    const auto audit = residue_audit(clean_manifest(m, default_ruleset()), 2);
    ASSERT_EQ(audit.classes.size(), 1u);
    ASSERT_EQ(audit.classes[0].terms.size(), 2u);
    EXPECT_EQ(audit.classes[0].terms[0].term, "xjunkx");
    EXPECT_EQ(audit.classes[0].terms[1].term, "tips");
}
