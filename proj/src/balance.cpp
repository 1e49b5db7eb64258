#include "fsols/balance.hpp"

#include "fsols/error.hpp"
#include "fsols/random.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fsols {

std::vector<std::string> manifest_topics(const Manifest& m) {
    std::set<std::string> topics;
    for (const auto& d : m.documents) topics.insert(d.topic);
    return {topics.begin(), topics.end()};
}

std::vector<TopicQuota> compute_quotas(const Manifest& m, const std::vector<std::string>& topics) {
    std::map<std::string, std::array<std::size_t, kNumClasses>> avail;
    for (const auto& d : m.documents) ++avail[d.topic][static_cast<std::size_t>(code(d.label))];
    std::vector<TopicQuota> out;
    for (const auto& t : topics) {
        const auto it = avail.find(t);
        if (it == avail.end()) throw DataError("topic '" + t + "' does not appear in the manifest");
        TopicQuota q;
        q.topic = t;
        q.availability = it->second;
        q.per_class_quota = *std::min_element(q.availability.begin(), q.availability.end());
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<std::string> empty_topics(const std::vector<TopicQuota>& quotas) {
    std::vector<std::string> out;
    for (const auto& q : quotas)
        if (q.per_class_quota == 0) out.push_back(q.topic);
    return out;
}

Manifest balance_by_topic(const Manifest& m, const std::vector<TopicQuota>& quotas, std::uint64_t seed) {
    std::map<std::string, std::array<std::vector<std::size_t>, kNumClasses>> candidates;
    for (std::size_t i = 0; i < m.documents.size(); ++i)
        candidates[m.documents[i].topic][static_cast<std::size_t>(code(m.documents[i].label))].push_back(i);

    Rng rng(seed);
    std::vector<bool> keep(m.documents.size(), false);
    std::set<std::string> seen;
    for (const auto& q : quotas) {
        if (!seen.insert(q.topic).second) throw std::invalid_argument("duplicate quota for topic '" + q.topic + "'");
        auto& per_class = candidates[q.topic];
        for (std::size_t c = 0; c < kNumClasses; ++c) {
            const auto& pool = per_class[c];
            if (q.per_class_quota > pool.size())
                throw DataError("quota " + std::to_string(q.per_class_quota) + " for topic '" + q.topic +
                                "' exceeds the " + std::to_string(pool.size()) + " available " +
                                std::string(label_name(static_cast<ClassLabel>(c))) + " documents (stale quotas?)");
            for (const auto j : rng.sample_indices(pool.size(), q.per_class_quota)) keep[pool[j]] = true;
        }
    }

    Manifest out;
    out.version = m.version;
    out.seed = seed;
    for (std::size_t i = 0; i < m.documents.size(); ++i)
        if (keep[i]) out.documents.push_back(m.documents[i]);
    return out;
}

}  // namespace fsols
