#include "fsols/html.hpp"

#include "support/scratch.hpp"

#include <gtest/gtest.h>

using namespace fsols;

namespace {
const std::filesystem::path kHtml = std::filesystem::path(FSOLS_FIXTURES) / "html";
}

TEST(Html, RecordedPageMatchesHandCheckedText) {
    const auto page = slurp(kHtml / "vernacular_page.html");
    const auto body = html::extract_text(page, html::Selector::parse("article"));
    ASSERT_TRUE(body.has_value());
    EXPECT_EQ(*body, slurp(kHtml / "vernacular_page.expected.txt"));
    EXPECT_EQ(html::canonical_url(page), "https://health.example.org/sleep-matters");
}

TEST(Html, WholeDocumentDropsScriptsAndStyles) {
    const auto page = slurp(kHtml / "vernacular_page.html");
    const auto all = html::extract_text(page, html::Selector{});
    ASSERT_TRUE(all.has_value());
    EXPECT_EQ(all->find("dataLayer"), std::string::npos);
    EXPECT_EQ(all->find("font-family"), std::string::npos);
    EXPECT_EQ(all->find("trackArticle"), std::string::npos);
    EXPECT_EQ(all->find("ad slot"), std::string::npos);
    EXPECT_NE(all->find("Copyright 2024"), std::string::npos);
}

TEST(Html, Selectors) {
    const auto s = html::Selector::parse("div.story");
    EXPECT_EQ(s.tag, "div");
    EXPECT_EQ(s.cls, "story");
    EXPECT_TRUE(s.id.empty());
    EXPECT_EQ(html::Selector::parse("#main").id, "main");
    EXPECT_EQ(html::Selector::parse(".x").cls, "x");
    EXPECT_TRUE(html::Selector::parse("").empty());

    const std::string page = R"(<div class="a b">one</div><div id="main" class="b">two</div><p class="b">three</p>)";
    EXPECT_EQ(html::extract_text(page, html::Selector::parse("#main")), "two");
    EXPECT_EQ(html::extract_text(page, html::Selector::parse(".b")), "one");
    EXPECT_EQ(html::extract_text(page, html::Selector::parse("p.b")), "three");
    EXPECT_EQ(html::extract_text(page, html::Selector::parse("section")), std::nullopt);
}

TEST(Html, NestedSameTagElements) {
    const std::string page = "<div id=\"x\"><div>inner</div>tail</div><div>after</div>";
    EXPECT_EQ(html::extract_text(page, html::Selector::parse("#x")), "inner\ntail");
}

TEST(Html, Entities) {
    EXPECT_EQ(html::decode_entities("a &amp; b &lt;c&gt; &quot;d&quot; &#39;e&#39; &#x41;"), "a & b <c> \"d\" 'e' A");
    EXPECT_EQ(html::decode_entities("&nbsp;"), "\xC2\xA0");
    EXPECT_EQ(html::decode_entities("&unknown; &"), "&unknown; &");
}
