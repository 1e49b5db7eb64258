#include "fsols/corpus.hpp"

#include "fsols/error.hpp"
#include "fsols/html.hpp"
#include "fsols/http.hpp"
#include "fsols/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace fsols {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

ClassLabel label_from_code(int c) {
    if (c < 0 || c >= kNumClasses) throw DataError("invalid label " + std::to_string(c));
    return static_cast<ClassLabel>(c);
}

std::string_view label_name(ClassLabel label) {
    switch (label) {
        case ClassLabel::AlternativeScientific: return "alternative";
        case ClassLabel::Scientific: return "scientific";
        case ClassLabel::Vernacular: return "vernacular";
        case ClassLabel::Disinformative: return "disinformative";
    }
    return "?";
}

ClassLabel parse_label(std::string_view name) {
    const std::string n = text::to_lower(name);
    if (n == "alternative" || n == "alternative-scientific" || n == "alternative_scientific" || n == "alt" || n == "0")
        return ClassLabel::AlternativeScientific;
    if (n == "scientific" || n == "sci" || n == "1") return ClassLabel::Scientific;
    if (n == "vernacular" || n == "vern" || n == "2") return ClassLabel::Vernacular;
    if (n == "disinformative" || n == "disinformation" || n == "dis" || n == "3") return ClassLabel::Disinformative;
    throw DataError("invalid label '" + std::string(name) + "'");
}

void Document::refresh_length() { char_len = text::char_count(text()); }

SourceRegistry::SourceRegistry(std::vector<SourceSpec> sources) : sources_(std::move(sources)) {
    std::set<std::string> names;
    for (const auto& s : sources_) {
        if (s.name.empty()) throw DataError("source registry: empty source name");
        if (!names.insert(s.name).second) throw DataError("source registry: duplicate source '" + s.name + "'");
    }
}

const SourceSpec* SourceRegistry::find(std::string_view name) const {
    for (const auto& s : sources_)
        if (s.name == name) return &s;
    return nullptr;
}

SourceRegistry load_registry(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open source registry " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("source registry " + path.string() + ": " + e.what());
    }
    std::vector<SourceSpec> out;
    for (const auto& entry : doc.at("sources")) {
        SourceSpec spec;
        spec.name = entry.at("name").get<std::string>();
        const auto& label = entry.at("label");
        spec.label = label.is_number_integer() ? label_from_code(label.get<int>()) : parse_label(label.get<std::string>());
        const std::string kind = entry.value("kind", "local-dir");
        if (kind == "local-dir") spec.kind = SourceKind::LocalDir;
        else if (kind == "fetcher") spec.kind = SourceKind::Fetcher;
        else throw DataError("source '" + spec.name + "': unknown kind '" + kind + "'");
        for (const auto& [key, value] : entry.items()) {
            if (key == "name" || key == "label" || key == "kind") continue;
            spec.config[key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
        out.push_back(std::move(spec));
    }
    return SourceRegistry(std::move(out));
}

std::string document_id(std::string_view source, std::string_view url_or_filename) {
    return std::string(source) + ":" + text::hex64(text::fnv1a(url_or_filename));
}

namespace {

std::string config_value(const SourceSpec& spec, const std::string& key, const std::string& fallback) {
    const auto it = spec.config.find(key);
    return it == spec.config.end() ? fallback : it->second;
}

std::set<std::string> accepted_extensions(const SourceSpec& spec) {
    std::set<std::string> exts;
    std::stringstream ss(config_value(spec, "extensions", "txt,html,htm,xml"));
    std::string e;
    while (std::getline(ss, e, ',')) {
        if (!e.empty() && e[0] != '.') e = "." + e;
        exts.insert(text::to_lower(e));
    }
    return exts;
}

struct Extracted {
    std::string body;
    std::optional<std::string> url;
};

// Body text per the source's format/selector. nullopt when the selector matches nothing.
std::optional<Extracted> extract_body(const SourceSpec& spec, const std::string& content) {
    const std::string format = config_value(spec, "format", "text");
    if (format == "text") return Extracted{content, std::nullopt};
    if (format != "html" && format != "xml") throw DataError("source '" + spec.name + "': unknown format '" + format + "'");
    const auto selector = html::Selector::parse(config_value(spec, "selector", format == "xml" ? "body" : ""));
    auto body = html::extract_text(content, selector);
    if (!body) return std::nullopt;
    return Extracted{std::move(*body), html::canonical_url(content)};
}

}  // namespace

IngestResult ingest_source(const SourceSpec& spec, const fs::path& input_path, std::string_view retrieved_at,
                           HttpTransport* transport) {
    IngestResult result;
    const std::string fixed_topic = config_value(spec, "topic", "");

    auto add_document = [&](const std::string& item, const std::string& topic, const std::string& content,
                            const std::optional<std::string>& url) {
        if (content.find_first_not_of(" \t\r\n") == std::string::npos) {
            result.warnings.push_back({item, "empty item skipped"});
            return;
        }
        std::optional<Extracted> extracted;
        try {
            extracted = extract_body(spec, content);
        } catch (const std::exception& e) {
            result.errors.push_back({item, e.what()});
            return;
        }
        if (!extracted) {
            result.errors.push_back({item, "selector '" + config_value(spec, "selector", "") + "' matched nothing"});
            return;
        }
        if (extracted->body.empty()) {
            result.warnings.push_back({item, "empty body skipped"});
            return;
        }
        if (topic.empty()) {
            result.errors.push_back({item, "no topic (set 'topic' in the source config or use topic subdirectories)"});
            return;
        }
        Document d;
        d.url = url ? url : extracted->url;
        d.id = document_id(spec.name, d.url ? *d.url : item);
        d.label = spec.label;
        d.topic = text::to_lower(topic);
        d.source = spec.name;
        d.raw_text = std::move(extracted->body);
        d.retrieved_at = std::string(retrieved_at);
        d.refresh_length();
        result.documents.push_back(std::move(d));
    };

    if (spec.kind == SourceKind::LocalDir) {
        if (!fs::is_directory(input_path)) throw DataError("input directory does not exist: " + input_path.string());
        const auto exts = accepted_extensions(spec);
        std::vector<fs::path> files;
        for (const auto& entry : fs::recursive_directory_iterator(input_path)) {
            if (!entry.is_regular_file()) continue;
            if (!exts.count(text::to_lower(entry.path().extension().string()))) continue;
            files.push_back(fs::relative(entry.path(), input_path));
        }
        std::sort(files.begin(), files.end(),
                  [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
        for (const auto& rel : files) {
            const std::string item = rel.generic_string();
            std::ifstream in(input_path / rel, std::ios::binary);
            std::ostringstream ss;
            if (!in || !(ss << in.rdbuf())) {
                if (in && in.peek() == std::ifstream::traits_type::eof()) {
                    result.warnings.push_back({item, "empty item skipped"});
                } else {
                    result.errors.push_back({item, "unreadable file"});
                }
                continue;
            }
            std::string topic = fixed_topic;
            if (topic.empty() && rel.has_parent_path()) topic = rel.begin()->string();
            add_document(item, topic, ss.str(), std::nullopt);
        }
        return result;
    }

    if (!transport) throw std::invalid_argument("fetcher source '" + spec.name + "' requires a transport");
    std::ifstream list(input_path);
    if (!list) throw DataError("cannot open url list " + input_path.string());
    std::vector<std::pair<std::string, std::string>> items;  // (topic, url)
    std::string line;
    while (std::getline(list, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) items.emplace_back(fixed_topic, line);
        else items.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    RetryPolicy policy;
    policy.initial_backoff = std::chrono::milliseconds(std::stoi(config_value(spec, "backoff_ms", "500")));
    RateLimiter limiter(std::stod(config_value(spec, "rate", "1")));
    for (const auto& [topic, url] : items) {
        HttpResponse response;
        try {
            response = get_with_retry(*transport, url, policy, &limiter);
        } catch (const ServiceError& e) {
            result.errors.push_back({url, e.what()});
            continue;
        }
        if (response.status != 200) {
            result.errors.push_back({url, "HTTP status " + std::to_string(response.status)});
            continue;
        }
        add_document(url, topic, response.body, url);
    }
    return result;
}

std::array<ClassStats, kNumClasses> corpus_stats(const Manifest& m) {
    if (m.documents.empty()) throw std::invalid_argument("corpus_stats: empty manifest");
    std::array<ClassStats, kNumClasses> stats{};
    std::array<double, kNumClasses> total{};
    for (const auto& d : m.documents) {
        const int c = code(d.label);
        ++stats[c].count;
        total[c] += static_cast<double>(text::char_count(d.text()));
    }
    for (int c = 0; c < kNumClasses; ++c)
        if (stats[c].count > 0) stats[c].mean_char_len = total[c] / static_cast<double>(stats[c].count);
    return stats;
}

void validate_manifest(const Manifest& m, const SourceRegistry* registry) {
    std::unordered_set<std::string> ids;
    for (std::size_t i = 0; i < m.documents.size(); ++i) {
        const auto& d = m.documents[i];
        const std::string where = "record " + std::to_string(i) + " (id '" + d.id + "')";
        if (d.id.empty()) throw DataError(where + ": field 'id': empty id");
        if (!ids.insert(d.id).second) throw DataError(where + ": field 'id': duplicate id");
        if (d.topic.empty()) throw DataError(where + ": field 'topic': empty topic");
        if (d.char_len != text::char_count(d.text()))
            throw DataError(where + ": field 'char_len': " + std::to_string(d.char_len) + " does not match text length");
        if (registry) {
            const auto* spec = registry->find(d.source);
            if (!spec) throw DataError(where + ": field 'source': unregistered source '" + d.source + "'");
            if (spec->label != d.label)
                throw DataError(where + ": field 'label': source '" + d.source + "' is registered as " +
                                std::string(label_name(spec->label)));
        }
    }
}

std::string manifest_to_jsonl(const Manifest& m) {
    std::string out;
    ordered_json header;
    header["fsols_manifest"] = m.version;
    header["seed"] = m.seed;
    out += header.dump() + "\n";
    for (const auto& d : m.documents) {
        ordered_json j;
        j["id"] = d.id;
        j["label"] = code(d.label);
        j["topic"] = d.topic;
        j["source"] = d.source;
        j["raw_text"] = d.raw_text;
        j["clean_text"] = d.clean_text ? ordered_json(*d.clean_text) : ordered_json(nullptr);
        j["char_len"] = d.char_len;
        j["retrieved_at"] = d.retrieved_at;
        j["url"] = d.url ? ordered_json(*d.url) : ordered_json(nullptr);
        out += j.dump(-1, ' ', false, json::error_handler_t::strict) + "\n";
    }
    return out;
}

void write_manifest(const Manifest& m, const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write manifest " + path.string());
    out << manifest_to_jsonl(m);
    if (!out) throw DataError("failed writing manifest " + path.string());
}

namespace {

template <typename T>
T field(const json& j, const char* name, const std::string& where) {
    if (!j.contains(name)) throw DataError(where + ": field '" + name + "': missing");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        throw DataError(where + ": field '" + name + "': wrong type");
    }
}

std::optional<std::string> optional_string(const json& j, const char* name, const std::string& where) {
    if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
    if (!j.at(name).is_string()) throw DataError(where + ": field '" + name + "': wrong type");
    return j.at(name).get<std::string>();
}

}  // namespace

Manifest manifest_from_jsonl(std::string_view jsonl) {
    Manifest m;
    std::istringstream in{std::string(jsonl)};
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::unordered_set<std::string> ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::string where = "line " + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError(where + ": invalid JSON: " + e.what());
        }
        if (!j.is_object()) throw DataError(where + ": expected a JSON object");
        if (!header_seen) {
            if (!j.contains("fsols_manifest")) throw DataError(where + ": missing manifest header");
            m.version = field<std::string>(j, "fsols_manifest", where);
            m.seed = field<std::uint64_t>(j, "seed", where);
            header_seen = true;
            continue;
        }
        Document d;
        d.id = field<std::string>(j, "id", where);
        where += " (id '" + d.id + "')";
        if (d.id.empty()) throw DataError(where + ": field 'id': empty id");
        if (!ids.insert(d.id).second) throw DataError(where + ": field 'id': duplicate id");
        const int label_code = field<int>(j, "label", where);
        try {
            d.label = label_from_code(label_code);
        } catch (const DataError& e) {
            throw DataError(where + ": field 'label': " + e.what());
        }
        d.topic = field<std::string>(j, "topic", where);
        if (d.topic.empty()) throw DataError(where + ": field 'topic': empty topic");
        d.source = field<std::string>(j, "source", where);
        d.raw_text = field<std::string>(j, "raw_text", where);
        d.clean_text = optional_string(j, "clean_text", where);
        d.char_len = field<std::size_t>(j, "char_len", where);
        d.retrieved_at = field<std::string>(j, "retrieved_at", where);
        d.url = optional_string(j, "url", where);
        if (d.char_len != text::char_count(d.text()))
            throw DataError(where + ": field 'char_len': " + std::to_string(d.char_len) + " does not match text length");
        m.documents.push_back(std::move(d));
    }
    if (!header_seen) throw DataError("manifest is empty (no header line)");
    return m;
}

Manifest load_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open manifest " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return manifest_from_jsonl(ss.str());
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace fsols
