#include "fsols/cleaning.hpp"

#include "fsols/error.hpp"
#include "fsols/features.hpp"
#include "fsols/text.hpp"

#include <boost/regex.hpp>
#include <json.hpp>

#include <fstream>
#include <set>
#include <stdexcept>

namespace fsols {

using nlohmann::json;
using nlohmann::ordered_json;

struct RuleSet::Compiled {
    boost::regex re;
};

namespace {

bool is_special(char32_t cp) {
    if (cp == '\t' || cp == '\n') return false;
    if (cp < 0x20 || (cp >= 0x7F && cp <= 0x9F)) return cp != '\r' && cp != 0x85;
    return cp == 0xAD || cp == 0x200B || cp == 0x200C || cp == 0x200D || cp == 0x2060 || cp == 0xFEFF;
}

bool is_line_break(char32_t cp) { return cp == '\n' || cp == '\r' || cp == 0x85 || cp == 0x2028 || cp == 0x2029; }

std::string remove_literal(std::string_view text, std::string_view literal) {
    if (literal.empty()) return std::string(text);
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (true) {
        const auto hit = text.find(literal, pos);
        if (hit == std::string_view::npos) break;
        out.append(text.substr(pos, hit - pos));
        pos = hit + literal.size();
    }
    out.append(text.substr(pos));
    return out;
}

std::string trimmed_lower(std::string_view line) {
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = line.find_last_not_of(" \t");
    return text::to_lower(line.substr(b, e - b + 1));
}

// Byte offset where the references block starts (just past the heading line), or npos.
std::size_t references_start(std::string_view text) {
    std::size_t found = std::string_view::npos;
    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        auto line_end = text.find('\n', line_start);
        if (line_end == std::string_view::npos) line_end = text.size();
        const std::string heading = trimmed_lower(text.substr(line_start, line_end - line_start));
        if (heading == "references" || heading == "bibliography" || heading == "reference list")
            found = std::min(line_end + 1, text.size());
        if (line_end == text.size()) break;
        line_start = line_end + 1;
    }
    return found;
}

const char* kind_name(RuleKind k) {
    switch (k) {
        case RuleKind::LiteralRemove: return "literal-remove";
        case RuleKind::PatternRemove: return "pattern-remove";
        case RuleKind::WhitespaceNormalize: return "whitespace-normalize";
    }
    return "?";
}

RuleKind parse_kind(const std::string& s) {
    if (s == "literal-remove") return RuleKind::LiteralRemove;
    if (s == "pattern-remove") return RuleKind::PatternRemove;
    if (s == "whitespace-normalize") return RuleKind::WhitespaceNormalize;
    throw DataError("unknown rule kind '" + s + "'");
}

}  // namespace

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::string line;
    bool pending_space = false;
    int blank_run = 0;  // consecutive blank lines seen since the last non-blank line
    bool any_content = false;

    auto end_line = [&] {
        if (line.empty()) {
            ++blank_run;
        } else {
            if (any_content) out.append(blank_run > 0 ? "\n\n" : "\n");
            out += line;
            any_content = true;
            blank_run = 0;
        }
        line.clear();
        pending_space = false;
    };

    for (std::size_t pos = 0; pos < text.size();) {
        const std::size_t start = pos;
        const char32_t cp = text::decode(text, pos);
        if (cp == '\r' && pos < text.size() && text[pos] == '\n') continue;  // CRLF
        if (is_line_break(cp)) {
            end_line();
        } else if (is_special(cp)) {
            continue;
        } else if (text::is_space(cp)) {
            pending_space = !line.empty();
        } else {
            if (pending_space) line.push_back(' ');
            pending_space = false;
            line.append(text.substr(start, pos - start));
        }
    }
    end_line();
    return out;
}

RuleSet::RuleSet(std::vector<CleaningRule> rules, std::string version)
    : rules_(std::move(rules)), version_(std::move(version)) {
    std::set<std::string> names;
    for (const auto& r : rules_) {
        if (r.name.empty()) throw DataError("cleaning rule without a name");
        if (!names.insert(r.name).second) throw DataError("duplicate cleaning rule name '" + r.name + "'");
        if (r.kind == RuleKind::PatternRemove) {
            try {
                compiled_.push_back(std::make_shared<const Compiled>(Compiled{boost::regex(r.payload)}));
            } catch (const boost::regex_error& e) {
                throw DataError("cleaning rule '" + r.name + "': pattern does not compile: " + e.what());
            }
        } else {
            compiled_.push_back(nullptr);
        }
    }
}

std::string RuleSet::apply_once(std::string_view input, std::string_view source) const {
    std::string current(input);
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        const auto& rule = rules_[i];
        if (!rule.applies_to(source)) continue;

        std::size_t offset = 0;
        if (rule.region == RuleRegion::References) {
            offset = references_start(current);
            if (offset == std::string::npos) continue;
        }
        const std::string_view head = std::string_view(current).substr(0, offset);
        const std::string_view tail = std::string_view(current).substr(offset);

        std::string replaced;
        switch (rule.kind) {
            case RuleKind::LiteralRemove: replaced = remove_literal(tail, rule.payload); break;
            case RuleKind::PatternRemove:
                replaced = boost::regex_replace(std::string(tail), compiled_[i]->re, "");
                break;
            case RuleKind::WhitespaceNormalize: replaced = normalize_whitespace(tail); break;
        }
        current = std::string(head) + replaced;
    }
    return current;
}

std::string RuleSet::apply(std::string_view text, std::string_view source) const {
    // Every rule only deletes characters or canonicalizes whitespace, so the
    // iteration reaches a fixed point.
    std::string current = apply_once(text, source);
    for (int pass = 0; pass < 1000; ++pass) {
        std::string next = apply_once(current, source);
        if (next == current) return current;
        current = std::move(next);
    }
    throw std::logic_error("cleaning rules did not converge");
}

Document clean_document(const Document& d, const RuleSet& rules) {
    Document out = d;
    out.clean_text = rules.apply(d.raw_text, d.source);
    out.refresh_length();
    return out;
}

Manifest clean_manifest(const Manifest& m, const RuleSet& rules) {
    Manifest out;
    out.version = m.version;
    out.seed = m.seed;
    out.documents.reserve(m.documents.size());
    for (const auto& d : m.documents) out.documents.push_back(clean_document(d, rules));
    return out;
}

RuleSet default_ruleset() {
    std::vector<CleaningRule> r;
    auto literal = [&](std::string name, std::string payload, bool provisional = false) {
        r.push_back({std::move(name), RuleKind::LiteralRemove, std::move(payload), {}, RuleRegion::All, provisional});
    };
    auto pattern = [&](std::string name, std::string payload, bool provisional = false) {
        r.push_back({std::move(name), RuleKind::PatternRemove, std::move(payload), {}, RuleRegion::All, provisional});
    };
    auto bibliography = [&](std::string name, std::string payload) {
        r.push_back({std::move(name), RuleKind::LiteralRemove, std::move(payload), {}, RuleRegion::References, false});
    };

    r.push_back({"normalize-input", RuleKind::WhitespaceNormalize, {}, {}, RuleRegion::All, false});

    // Site elements.
    literal("site-newsletter", "Get the latest in health news delivered to your inbox!");
    literal("site-recaptcha", "This site is protected by reCAPTCHA and the Google Privacy Policy and Terms of Service apply.");
    literal("site-share-facebook", "Share this page to Facebook");
    literal("site-javascript", "This site requires JavaScript to run correctly.");
    literal("site-save-article", "Save Article");
    literal("site-sign-up", "Sign up");

    // Recurring disclaimer paragraphs (curated literals are truncated; the rest of the line goes with them).
    pattern("disclaimer-mercola",
            R"re(Disclaimer: The entire contents of this website are based upon the opinions of Dr\. Mercola[^\n]*)re",
            true);

    // Licensing statements.
    pattern("license-open-access", R"re(This is an open access article under the terms of[^\n]*)re");
    pattern("license-image-credit", R"re(Image credit: [^\n]*)re");

    // Journal identifiers, removed only from the bibliography.
    bibliography("bib-bmj-long", "British Medical Journal");
    bibliography("bib-bmj", "BMJ");
    bibliography("bib-biomedcentral", "www.biomedcentral.com");

    // PDF extraction fragments.
    literal("pdf-continued-previous", "Continued from previous page");
    literal("pdf-continued-next", "Continued on next page");

    // Author information blocks.
    pattern("author-block", R"re(About the Authors?\b[^\n]*)re", true);

    // DOIs, in URL and "doi:" form. The last character may not be sentence punctuation.
    pattern("doi-url", R"re((?:https?://)?(?:dx\.)?doi\.org/10\.\d{4,9}/\S*[^\s.,;:)\]])re");
    pattern("doi-prefixed", R"re(\b(?:doi|DOI):?\s*10\.\d{4,9}/\S*[^\s.,;:)\]])re");

    r.push_back({"normalize-output", RuleKind::WhitespaceNormalize, {}, {}, RuleRegion::All, false});
    return RuleSet(std::move(r), "fsols-clean-1");
}

RuleSet load_ruleset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open ruleset " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("ruleset " + path.string() + ": " + e.what());
    }
    std::vector<CleaningRule> rules;
    try {
        for (const auto& j : doc.at("rules")) {
            CleaningRule rule;
            rule.name = j.at("name").get<std::string>();
            rule.kind = parse_kind(j.at("kind").get<std::string>());
            rule.payload = j.value("payload", "");
            const std::string scope = j.value("scope", "all-sources");
            rule.scope = scope == "all-sources" ? "" : scope;
            const std::string region = j.value("region", "all");
            if (region == "all") rule.region = RuleRegion::All;
            else if (region == "references") rule.region = RuleRegion::References;
            else throw DataError("rule '" + rule.name + "': unknown region '" + region + "'");
            rule.provisional = j.value("provisional", false);
            rules.push_back(std::move(rule));
        }
        return RuleSet(std::move(rules), doc.value("version", "custom"));
    } catch (const json::exception& e) {
        throw DataError("ruleset " + path.string() + ": " + e.what());
    }
}

void write_ruleset(const RuleSet& rules, const std::filesystem::path& path) {
    ordered_json doc;
    doc["version"] = rules.version();
    doc["rules"] = ordered_json::array();
    for (const auto& r : rules.rules()) {
        ordered_json j;
        j["name"] = r.name;
        j["kind"] = kind_name(r.kind);
        j["payload"] = r.payload;
        j["scope"] = r.scope.empty() ? "all-sources" : r.scope;
        j["region"] = r.region == RuleRegion::References ? "references" : "all";
        j["provisional"] = r.provisional;
        doc["rules"].push_back(std::move(j));
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot write ruleset " + path.string());
    out << doc.dump(2) << "\n";
}

Characterization residue_audit(const Manifest& m, std::size_t k) {
    if (k < 1) throw std::invalid_argument("residue_audit: k must be >= 1");
    for (const auto& d : m.documents)
        if (!d.clean_text) throw DataError("residue_audit: document '" + d.id + "' has not been cleaned");
    return class_characterization(m, k);
}

}  // namespace fsols
