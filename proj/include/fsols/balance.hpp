#pragma once

#include "fsols/corpus.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fsols {

struct TopicQuota {
    std::string topic;
    std::size_t per_class_quota = 0;  // min over availability
    std::array<std::size_t, kNumClasses> availability{};  // by class code
};

/// One quota per listed topic: the smallest class availability for it.
/// Throws DataError naming the first listed topic absent from the manifest.
std::vector<TopicQuota> compute_quotas(const Manifest& m, const std::vector<std::string>& topics);

/// Every topic present in the manifest, sorted.
std::vector<std::string> manifest_topics(const Manifest& m);

/// Draws exactly `per_class_quota` documents for every (topic, class) pair,
/// uniformly without replacement (partial Fisher-Yates over the candidates in
/// manifest order, driven by fsols::Rng seeded with `seed`). Output keeps
/// manifest order and records the seed. Documents of unlisted topics are
/// dropped. Throws DataError when a quota exceeds what the manifest holds.
Manifest balance_by_topic(const Manifest& m, const std::vector<TopicQuota>& quotas, std::uint64_t seed);

/// Topics whose quota is zero (no documents survive balancing).
std::vector<std::string> empty_topics(const std::vector<TopicQuota>& quotas);

}  // namespace fsols
