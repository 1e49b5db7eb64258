#include "fsols/citations.hpp"

#include "fsols/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace fsols {

using nlohmann::json;

namespace {

std::string excerpt(const std::string& body) {
    constexpr std::size_t kMax = 200;
    return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

json parse_payload(const std::string& service, const std::string& url, const HttpResponse& r) {
    try {
        return json::parse(r.body);
    } catch (const json::exception&) {
        throw ServiceError(service + ": malformed response from " + url + ": " + excerpt(r.body));
    }
}

}  // namespace

CitationClient::CitationClient(HttpTransport& transport, CitationClientOptions options)
    : transport_(transport),
      options_(std::move(options)),
      entrez_limit_(options_.requests_per_second),
      oc_limit_(options_.requests_per_second) {}

std::string CitationClient::esummary_url(const std::string& pmid) const {
    std::string url = options_.entrez_base + "esummary.fcgi?db=pubmed&id=" + url_encode(pmid) + "&retmode=json";
    if (!options_.api_key.empty()) url += "&api_key=" + url_encode(options_.api_key);
    return url;
}

std::string CitationClient::citations_url(const std::string& doi) const {
    return options_.opencitations_base + "citations/doi:" + doi;
}

std::optional<std::string> CitationClient::pmid_to_doi(const std::string& pmid) {
    const std::string url = esummary_url(pmid);
    const HttpResponse r = get_with_retry(transport_, url, options_.retry, &entrez_limit_);
    if (r.status != 200) throw ServiceError("entrez: HTTP " + std::to_string(r.status) + " for " + url);
    const json j = parse_payload("entrez", url, r);
    const json* record = nullptr;
    if (j.is_object() && j.contains("result") && j["result"].is_object() && j["result"].contains(pmid))
        record = &j["result"][pmid];
    if (!record || !record->is_object())
        throw ServiceError("entrez: response for pmid " + pmid + " lacks result." + pmid + ": " + excerpt(r.body));
    if (record->contains("error")) return std::nullopt;  // unknown pmid
    const auto ids = record->find("articleids");
    if (ids == record->end()) return std::nullopt;
    if (!ids->is_array()) throw ServiceError("entrez: articleids is not an array: " + excerpt(r.body));
    for (const auto& id : *ids) {
        if (id.is_object() && id.value("idtype", "") == "doi") {
            const auto value = id.value("value", "");
            if (!value.empty()) return value;
        }
    }
    return std::nullopt;
}

CitationClient::Count CitationClient::fetch_citation_count(const std::string& doi) {
    const std::string url = citations_url(doi);
    const HttpResponse r = get_with_retry(transport_, url, options_.retry, &oc_limit_);
    if (r.status == 404) return {0, false};
    if (r.status != 200) throw ServiceError("opencitations: HTTP " + std::to_string(r.status) + " for " + url);
    const json j = parse_payload("opencitations", url, r);
    if (!j.is_array()) throw ServiceError("opencitations: expected a JSON array from " + url + ": " + excerpt(r.body));
    return {static_cast<std::int64_t>(j.size()), true};
}

std::vector<CitationRecord> enrich(CitationClient& client, const std::vector<PmidEntry>& entries,
                                   const std::string& fetched_at) {
    std::vector<PmidEntry> sorted = entries;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.pmid < b.pmid; });
    std::vector<CitationRecord> out;
    for (const auto& e : sorted) {
        CitationRecord rec;
        rec.pmid = e.pmid;
        rec.topic = e.topic;
        rec.fetched_at = fetched_at;
        rec.doi = client.pmid_to_doi(e.pmid);
        if (!rec.doi) {
            rec.note = "no doi";
        } else {
            const auto c = client.fetch_citation_count(*rec.doi);
            rec.citation_count = c.count;
            if (!c.indexed) rec.note = "not indexed";
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<CitationRecord> select_top_decile(const std::vector<CitationRecord>& records, DecileScope scope) {
    if (records.empty()) throw std::invalid_argument("select_top_decile: no records");
    std::map<std::string, std::vector<const CitationRecord*>> groups;
    for (const auto& r : records) {
        if (!r.citation_count) throw std::invalid_argument("select_top_decile: record " + r.pmid + " has no citation count");
        groups[scope == DecileScope::PerTopic ? r.topic.value_or("") : std::string()].push_back(&r);
    }
    std::vector<CitationRecord> out;
    for (auto& [topic, group] : groups) {
        std::sort(group.begin(), group.end(), [](const auto* a, const auto* b) {
            if (*a->citation_count != *b->citation_count) return *a->citation_count > *b->citation_count;
            return a->pmid < b->pmid;
        });
        const auto size = static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(group.size())));
        const auto threshold = *group[size - 1]->citation_count;
        for (const auto* r : group)
            if (*r->citation_count >= threshold) out.push_back(*r);
    }
    return out;
}

std::vector<PmidEntry> load_pmid_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read pmid list " + path.string());
    std::vector<PmidEntry> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        PmidEntry e;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            e.pmid = line;
        } else {
            e.topic = line.substr(0, tab);
            e.pmid = line.substr(tab + 1);
        }
        if (e.pmid.empty() || !std::all_of(e.pmid.begin(), e.pmid.end(), [](char c) { return c >= '0' && c <= '9'; }))
            throw DataError(path.string() + " line " + std::to_string(n) + ": invalid pmid '" + e.pmid + "'");
        out.push_back(std::move(e));
    }
    return out;
}

void write_citation_records(const std::vector<CitationRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["pmid"] = r.pmid;
        j["doi"] = r.doi ? json(*r.doi) : json(nullptr);
        j["citation_count"] = r.citation_count ? json(*r.citation_count) : json(nullptr);
        j["fetched_at"] = r.fetched_at;
        j["topic"] = r.topic ? json(*r.topic) : json(nullptr);
        j["note"] = r.note;
        out << j.dump() << '\n';
    }
}

std::vector<CitationRecord> load_citation_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read " + path.string());
    std::vector<CitationRecord> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            CitationRecord r;
            r.pmid = j.at("pmid").get<std::string>();
            if (!j.at("doi").is_null()) r.doi = j.at("doi").get<std::string>();
            if (!j.at("citation_count").is_null()) r.citation_count = j.at("citation_count").get<std::int64_t>();
            r.fetched_at = j.at("fetched_at").get<std::string>();
            if (j.contains("topic") && !j.at("topic").is_null()) r.topic = j.at("topic").get<std::string>();
            r.note = j.value("note", "");
            if (r.citation_count && (!r.doi || *r.citation_count < 0))
                throw DataError("citation_count requires a resolved doi and must be >= 0");
            out.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw DataError(path.string() + " line " + std::to_string(n) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(path.string() + " line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace fsols
