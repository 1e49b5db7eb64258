#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fsols {

class HttpTransport;

/// The four text genres. Enumerator values are the persisted integer codes.
enum class ClassLabel : int {
    AlternativeScientific = 0,
    Scientific = 1,
    Vernacular = 2,
    Disinformative = 3,
};

inline constexpr int kNumClasses = 4;

/// All labels in code order (0..3).
inline constexpr std::array<ClassLabel, kNumClasses> kAllLabels{
    ClassLabel::AlternativeScientific, ClassLabel::Scientific, ClassLabel::Vernacular,
    ClassLabel::Disinformative};

constexpr int code(ClassLabel label) { return static_cast<int>(label); }

/// Throws DataError("invalid label ...") for codes outside 0..3.
ClassLabel label_from_code(int code);

/// Lowercase slug: "alternative", "scientific", "vernacular", "disinformative".
std::string_view label_name(ClassLabel label);

/// Accepts the slug or a few common spellings ("alternative-scientific", "sci", ...).
ClassLabel parse_label(std::string_view name);

struct Document {
    std::string id;
    ClassLabel label = ClassLabel::Scientific;
    std::string topic;
    std::string source;
    std::string raw_text;
    std::optional<std::string> clean_text;
    std::size_t char_len = 0;
    std::string retrieved_at;
    std::optional<std::string> url;

    /// clean_text when present, otherwise raw_text.
    const std::string& text() const { return clean_text ? *clean_text : raw_text; }

    /// Recomputes char_len from text().
    void refresh_length();

    bool operator==(const Document&) const = default;
};

struct Manifest {
    std::vector<Document> documents;
    std::string version = "1";
    std::uint64_t seed = 0;

    bool operator==(const Manifest&) const = default;
};

enum class SourceKind { LocalDir, Fetcher };

/// One entry of the source registry.
///
/// `config` keys understood by ingestion:
///   format   - "text" (default), "html" or "xml"
///   selector - element selector for html/xml bodies ("tag", ".class", "#id", "tag.class")
///   topic    - fixed topic for every item; otherwise the first directory level is the topic
///   extensions - comma separated file extensions to accept (default: txt,html,htm,xml)
struct SourceSpec {
    std::string name;
    ClassLabel label = ClassLabel::Scientific;
    SourceKind kind = SourceKind::LocalDir;
    std::map<std::string, std::string> config;
};

class SourceRegistry {
public:
    SourceRegistry() = default;
    explicit SourceRegistry(std::vector<SourceSpec> sources);

    const std::vector<SourceSpec>& sources() const { return sources_; }
    const SourceSpec* find(std::string_view name) const;

private:
    std::vector<SourceSpec> sources_;
};

/// Reads the declarative JSON registry: {"sources": [{"name", "label", "kind", ...config}]}.
SourceRegistry load_registry(const std::filesystem::path& path);

struct IngestIssue {
    std::string item;  // relative file name or url
    std::string message;
};

struct IngestResult {
    std::vector<Document> documents;
    std::vector<IngestIssue> errors;    // unreadable items; ingestion continued
    std::vector<IngestIssue> warnings;  // skipped empty items
};

/// Stable document id: "<source>:<fnv1a-64 hex of url-or-relative-filename>".
std::string document_id(std::string_view source, std::string_view url_or_filename);

/// Ingests one source.
///
/// local-dir: `input_path` is a directory; files are visited recursively in
/// lexicographic order of their relative path. fetcher: `input_path` is a
/// text file with one "url" or "topic<TAB>url" per line, fetched through
/// `transport` (which may be a fixture transport). Documents carry
/// `retrieved_at` as given by the caller.
IngestResult ingest_source(const SourceSpec& spec, const std::filesystem::path& input_path,
                           std::string_view retrieved_at, HttpTransport* transport = nullptr);

struct ClassStats {
    std::size_t count = 0;
    double mean_char_len = 0.0;
};

/// Per-class document count and mean length (clean text when present).
/// Throws std::invalid_argument for an empty manifest.
std::array<ClassStats, kNumClasses> corpus_stats(const Manifest& m);

/// Checks id uniqueness, non-empty topics, char_len consistency and, when a
/// registry is given, that every source is registered with the document's label.
void validate_manifest(const Manifest& m, const SourceRegistry* registry = nullptr);

/// JSONL: a header line {"fsols_manifest": version, "seed": n} followed by one document per line.
void write_manifest(const Manifest& m, const std::filesystem::path& path);
std::string manifest_to_jsonl(const Manifest& m);

/// Throws DataError naming the offending line, id and field.
Manifest load_manifest(const std::filesystem::path& path);
Manifest manifest_from_jsonl(std::string_view jsonl);

}  // namespace fsols
