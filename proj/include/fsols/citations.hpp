#pragma once

#include "fsols/http.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fsols {

struct CitationRecord {
    std::string pmid;
    std::optional<std::string> doi;
    std::optional<std::int64_t> citation_count;  // only when the doi resolved
    std::string fetched_at;
    std::optional<std::string> topic;
    std::string note;  // e.g. "no doi", "not indexed"

    bool operator==(const CitationRecord&) const = default;
};

struct CitationClientOptions {
    std::string entrez_base = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/";
    std::string opencitations_base = "https://opencitations.net/index/api/v2/";
    std::string api_key;                // appended to Entrez requests when set
    double requests_per_second = 3.0;   // per service
    RetryPolicy retry;
};

/// Clients for the NLM Entrez esummary endpoint and the OpenCitations index.
/// Live or fixture mode is decided by the transport.
class CitationClient {
public:
    CitationClient(HttpTransport& transport, CitationClientOptions options = {});

    std::string esummary_url(const std::string& pmid) const;
    std::string citations_url(const std::string& doi) const;

    /// DOI listed in the PubMed record's article ids, if any. Throws
    /// ServiceError on exhausted retries, an unexpected status, or a malformed
    /// payload (quoting an excerpt).
    std::optional<std::string> pmid_to_doi(const std::string& pmid);

    struct Count {
        std::int64_t count = 0;
        bool indexed = true;  // false when the service does not know the doi
    };
    /// Number of citing entities. A 404 means "not indexed": count 0.
    Count fetch_citation_count(const std::string& doi);

private:
    HttpTransport& transport_;
    CitationClientOptions options_;
    RateLimiter entrez_limit_;
    RateLimiter oc_limit_;
};

struct PmidEntry {
    std::string pmid;
    std::optional<std::string> topic;
};

/// Resolves DOIs and counts for every entry; output sorted by pmid.
std::vector<CitationRecord> enrich(CitationClient& client, const std::vector<PmidEntry>& entries,
                                   const std::string& fetched_at);

enum class DecileScope { PerTopic, Global };

/// Records whose count reaches the top-decile threshold: the threshold is
/// the count of the ceil(0.1 n)-th largest record, and every record tied
/// with it is kept. With PerTopic the rule is applied within each topic
/// (records without a topic form one group). Output: by topic, then count
/// descending, then pmid. Throws std::invalid_argument on empty input or a
/// record without a count.
std::vector<CitationRecord> select_top_decile(const std::vector<CitationRecord>& records,
                                              DecileScope scope = DecileScope::PerTopic);

/// "pmid" or "topic<TAB>pmid" per line; blank lines and '#' comments skipped.
std::vector<PmidEntry> load_pmid_list(const std::filesystem::path& path);

void write_citation_records(const std::vector<CitationRecord>& records, const std::filesystem::path& path);
std::vector<CitationRecord> load_citation_records(const std::filesystem::path& path);

}  // namespace fsols
