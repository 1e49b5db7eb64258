#include "fsols/html.hpp"

#include "fsols/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <sstream>
#include <vector>

namespace fsols::html {
namespace {

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_void(std::string_view tag) {
    static constexpr std::array<std::string_view, 14> kVoid{
        "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source", "track", "wbr"};
    return std::find(kVoid.begin(), kVoid.end(), tag) != kVoid.end();
}

bool is_block(std::string_view tag) {
    static constexpr std::array<std::string_view, 33> kBlock{
        "p", "div", "br", "li", "ul", "ol", "h1", "h2", "h3", "h4", "h5", "h6", "section", "article", "header",
        "footer", "blockquote", "pre", "table", "tr", "title", "td", "th", "dd", "dt", "figure", "figcaption",
        "sec", "abstract", "ref", "caption", "main", "hr"};
    return std::find(kBlock.begin(), kBlock.end(), tag) != kBlock.end();
}

bool is_raw_text(std::string_view tag) { return tag == "script" || tag == "style" || tag == "noscript"; }

struct Tag {
    std::string name;
    std::string cls;
    std::string id;
    std::string rel;
    std::string href;
    bool closing = false;
    bool self_closing = false;
};

// Parses the tag starting at markup[pos] == '<' up to the matching '>'.
Tag parse_tag(std::string_view markup, std::size_t pos, std::size_t end) {
    Tag tag;
    std::size_t i = pos + 1;
    if (i < end && markup[i] == '/') {
        tag.closing = true;
        ++i;
    }
    const std::size_t name_start = i;
    while (i < end && !std::isspace(static_cast<unsigned char>(markup[i])) && markup[i] != '/' && markup[i] != '>') ++i;
    tag.name = lower_ascii(markup.substr(name_start, i - name_start));
    // Strip an XML namespace prefix.
    if (const auto colon = tag.name.find(':'); colon != std::string::npos) tag.name = tag.name.substr(colon + 1);

    while (i < end) {
        while (i < end && std::isspace(static_cast<unsigned char>(markup[i]))) ++i;
        if (i >= end) break;
        if (markup[i] == '/') {
            tag.self_closing = true;
            ++i;
            continue;
        }
        const std::size_t key_start = i;
        while (i < end && !std::isspace(static_cast<unsigned char>(markup[i])) && markup[i] != '=' && markup[i] != '/')
            ++i;
        const std::string key = lower_ascii(markup.substr(key_start, i - key_start));
        while (i < end && std::isspace(static_cast<unsigned char>(markup[i]))) ++i;
        std::string value;
        if (i < end && markup[i] == '=') {
            ++i;
            while (i < end && std::isspace(static_cast<unsigned char>(markup[i]))) ++i;
            if (i < end && (markup[i] == '"' || markup[i] == '\'')) {
                const char quote = markup[i++];
                const std::size_t v = i;
                while (i < end && markup[i] != quote) ++i;
                value = std::string(markup.substr(v, i - v));
                if (i < end) ++i;
            } else {
                const std::size_t v = i;
                while (i < end && !std::isspace(static_cast<unsigned char>(markup[i])) && markup[i] != '/') ++i;
                value = std::string(markup.substr(v, i - v));
            }
        }
        if (key == "class") tag.cls = value;
        else if (key == "id") tag.id = value;
        else if (key == "rel") tag.rel = lower_ascii(value);
        else if (key == "href") tag.href = decode_entities(value);
        if (key.empty() && i < end) ++i;
    }
    return tag;
}

bool has_class(std::string_view classes, std::string_view wanted) {
    std::istringstream in{std::string(classes)};
    std::string c;
    while (in >> c)
        if (c == wanted) return true;
    return false;
}

bool matches(const Tag& tag, const Selector& sel) {
    if (!sel.tag.empty() && tag.name != sel.tag) return false;
    if (!sel.cls.empty() && !has_class(tag.cls, sel.cls)) return false;
    if (!sel.id.empty() && tag.id != sel.id) return false;
    return true;
}

// Trims lines, collapses horizontal whitespace and drops empty lines.
std::string tidy(std::string_view raw) {
    std::string out;
    std::string line;
    bool pending_space = false;
    auto flush_line = [&] {
        if (!line.empty()) {
            if (!out.empty()) out.push_back('\n');
            out += line;
        }
        line.clear();
        pending_space = false;
    };
    for (std::size_t pos = 0; pos < raw.size();) {
        const std::size_t start = pos;
        const char32_t cp = text::decode(raw, pos);
        if (cp == '\n') {
            flush_line();
        } else if (text::is_space(cp)) {
            pending_space = !line.empty();
        } else {
            if (pending_space) line.push_back(' ');
            pending_space = false;
            line.append(raw.substr(start, pos - start));
        }
    }
    flush_line();
    return out;
}

}  // namespace

Selector Selector::parse(std::string_view text) {
    Selector sel;
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) return sel;
    if (s[0] == '#') {
        sel.id = s.substr(1);
        return sel;
    }
    const auto dot = s.find('.');
    if (dot == std::string::npos) {
        sel.tag = lower_ascii(s);
    } else {
        sel.tag = lower_ascii(s.substr(0, dot));
        sel.cls = s.substr(dot + 1);
    }
    return sel;
}

std::string decode_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '&') {
            out.push_back(text[i]);
            continue;
        }
        const auto semi = text.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back('&');
            continue;
        }
        const std::string_view name = text.substr(i + 1, semi - i - 1);
        char32_t cp = 0;
        if (!name.empty() && name[0] == '#') {
            const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
            const std::string digits(name.substr(hex ? 2 : 1));
            char* endp = nullptr;
            const long v = std::strtol(digits.c_str(), &endp, hex ? 16 : 10);
            if (!digits.empty() && endp && *endp == '\0' && v > 0 && v < 0x110000) cp = static_cast<char32_t>(v);
        } else if (name == "amp") cp = '&';
        else if (name == "lt") cp = '<';
        else if (name == "gt") cp = '>';
        else if (name == "quot") cp = '"';
        else if (name == "apos") cp = '\'';
        else if (name == "nbsp") cp = 0xA0;
        else if (name == "ndash") cp = 0x2013;
        else if (name == "mdash") cp = 0x2014;
        else if (name == "rsquo") cp = 0x2019;
        else if (name == "lsquo") cp = 0x2018;
        else if (name == "rdquo") cp = 0x201D;
        else if (name == "ldquo") cp = 0x201C;
        else if (name == "hellip") cp = 0x2026;
        else if (name == "shy") cp = 0xAD;
        if (cp == 0) {
            out.push_back('&');
            continue;
        }
        text::append_utf8(out, cp);
        i = semi;
    }
    return out;
}

std::optional<std::string> extract_text(std::string_view markup, const Selector& selector) {
    std::vector<std::string> stack;
    bool capturing = selector.empty();
    std::size_t capture_depth = 0;
    std::string buffer;

    std::size_t i = 0;
    while (i < markup.size()) {
        if (markup[i] != '<') {
            const auto next = markup.find('<', i);
            const std::size_t stop = next == std::string_view::npos ? markup.size() : next;
            if (capturing) buffer += decode_entities(markup.substr(i, stop - i));
            i = stop;
            continue;
        }
        if (markup.compare(i, 4, "<!--") == 0) {
            const auto close = markup.find("-->", i + 4);
            i = close == std::string_view::npos ? markup.size() : close + 3;
            continue;
        }
        if (markup.compare(i, 9, "<![CDATA[") == 0) {
            const auto close = markup.find("]]>", i + 9);
            const std::size_t stop = close == std::string_view::npos ? markup.size() : close;
            if (capturing) buffer.append(markup.substr(i + 9, stop - i - 9));
            i = close == std::string_view::npos ? markup.size() : close + 3;
            continue;
        }
        if (i + 1 < markup.size() && (markup[i + 1] == '!' || markup[i + 1] == '?')) {
            const auto close = markup.find('>', i);
            i = close == std::string_view::npos ? markup.size() : close + 1;
            continue;
        }
        const auto close = markup.find('>', i);
        if (close == std::string_view::npos) {
            if (capturing) buffer += decode_entities(markup.substr(i));
            break;
        }
        const Tag tag = parse_tag(markup, i, close);
        i = close + 1;
        if (tag.name.empty()) continue;

        if (!tag.closing) {
            if (is_raw_text(tag.name) && !tag.self_closing) {
                const std::string end_tag = "</" + tag.name;
                std::size_t j = i;
                while (j < markup.size()) {
                    j = markup.find("</", j);
                    if (j == std::string_view::npos) break;
                    if (lower_ascii(markup.substr(j, end_tag.size())) == end_tag) break;
                    j += 2;
                }
                if (j == std::string_view::npos || j >= markup.size()) {
                    i = markup.size();
                } else {
                    const auto gt = markup.find('>', j);
                    i = gt == std::string_view::npos ? markup.size() : gt + 1;
                }
                continue;
            }
            if (capturing && is_block(tag.name)) buffer.push_back('\n');
            const bool leaf = tag.self_closing || is_void(tag.name);
            if (!capturing && matches(tag, selector)) {
                if (leaf) return std::string{};
                capturing = true;
                capture_depth = stack.size() + 1;
            }
            if (!leaf) stack.push_back(tag.name);
        } else {
            const auto it = std::find(stack.rbegin(), stack.rend(), tag.name);
            if (it == stack.rend()) continue;  // stray end tag
            const std::size_t new_size = static_cast<std::size_t>(stack.rend() - it) - 1;
            stack.resize(new_size);
            if (capturing && is_block(tag.name)) buffer.push_back('\n');
            if (capturing && !selector.empty() && stack.size() < capture_depth) return tidy(buffer);
        }
    }
    if (!capturing) return std::nullopt;
    return tidy(buffer);
}

std::optional<std::string> canonical_url(std::string_view markup) {
    std::size_t i = 0;
    while ((i = markup.find('<', i)) != std::string_view::npos) {
        const auto close = markup.find('>', i);
        if (close == std::string_view::npos) break;
        if (lower_ascii(markup.substr(i, 5)) == "<link") {
            const Tag tag = parse_tag(markup, i, close);
            if (tag.rel == "canonical" && !tag.href.empty()) return tag.href;
        }
        i = close + 1;
    }
    return std::nullopt;
}

}  // namespace fsols::html
