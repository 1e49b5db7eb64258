#pragma once

#include "fsols/corpus.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace fsols {

struct Characterization;

enum class RuleKind { LiteralRemove, PatternRemove, WhitespaceNormalize };

/// Where in a text a rule applies.
enum class RuleRegion {
    All,
    /// After the last line consisting only of "References" or "Bibliography".
    References,
};

struct CleaningRule {
    std::string name;
    RuleKind kind = RuleKind::LiteralRemove;
    std::string payload;           // literal text or Perl-syntax pattern
    std::string scope;             // empty = all sources, else a source name
    RuleRegion region = RuleRegion::All;
    bool provisional = false;      // literal not yet verified against live pages

    bool applies_to(std::string_view source) const { return scope.empty() || scope == source; }
};

/// An ordered rule list. Patterns are compiled once at construction.
class RuleSet {
public:
    RuleSet() = default;
    /// Throws DataError for duplicate names or patterns that do not compile.
    explicit RuleSet(std::vector<CleaningRule> rules, std::string version = "custom");

    const std::vector<CleaningRule>& rules() const { return rules_; }
    const std::string& version() const { return version_; }

    /// Applies the rules in list order, repeating the whole pass until the
    /// text stops changing, so the result is a fixed point of the rule set.
    std::string apply(std::string_view text, std::string_view source = {}) const;

private:
    std::string apply_once(std::string_view text, std::string_view source) const;

    std::vector<CleaningRule> rules_;
    struct Compiled;
    std::vector<std::shared_ptr<const Compiled>> compiled_;
    std::string version_ = "custom";
};

/// Collapses horizontal whitespace runs to one space, trims lines, removes
/// special characters (C0/C1 controls except tab/newline, zero-width
/// characters, soft hyphens, BOM) and keeps at most one blank line between paragraphs.
std::string normalize_whitespace(std::string_view text);

/// Sets clean_text from raw_text (raw_text is untouched) and refreshes char_len.
Document clean_document(const Document& d, const RuleSet& rules);

Manifest clean_manifest(const Manifest& m, const RuleSet& rules);

/// The built-in boilerplate, disclaimer, license, bibliography, PDF-fragment,
/// author-block and DOI rules, followed by whitespace normalization.
RuleSet default_ruleset();

/// JSON: {"version": "...", "rules": [{"name", "kind", "payload", "scope"?, "region"?, "provisional"?}]}
RuleSet load_ruleset(const std::filesystem::path& path);
void write_ruleset(const RuleSet& rules, const std::filesystem::path& path);

/// Per-class top-k terms by pooled class TF-IDF, for spotting leftover
/// parsing residue. Throws std::invalid_argument if k < 1 and DataError if a
/// document has no clean_text.
Characterization residue_audit(const Manifest& m, std::size_t k);

}  // namespace fsols
