#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace fsols::html {

/// A simple element selector: "tag", ".class", "#id" or "tag.class".
struct Selector {
    std::string tag;
    std::string cls;
    std::string id;

    static Selector parse(std::string_view text);
    bool empty() const { return tag.empty() && cls.empty() && id.empty(); }
};

/// Visible text of the first element matching `selector` (the whole document
/// when the selector is empty). Script, style, noscript and comment content is
/// dropped; block-level elements become line breaks; common entities are decoded.
/// Returns nullopt when no element matches.
std::optional<std::string> extract_text(std::string_view markup, const Selector& selector);

/// href of <link rel="canonical">, if present.
std::optional<std::string> canonical_url(std::string_view markup);

std::string decode_entities(std::string_view text);

}  // namespace fsols::html
