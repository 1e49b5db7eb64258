#pragma once

#include "fsols/corpus.hpp"
#include "fsols/random.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fsols {

/// Generator for the "four-styles" corpus: each class has its own marker
/// vocabulary (with deliberate overlaps), each topic its own pseudo-word
/// vocabulary, and all classes share function words. Topic words carry no
/// class information, so a model has to learn style.
struct SyntheticOptions {
    std::vector<std::string> topics = default_topics();
    std::size_t docs_per_class_per_topic = 50;
    std::size_t min_tokens = 80;
    std::size_t max_tokens = 160;
    double style_rate = 0.16;   // mean share of tokens drawn from class markers
    double cross_rate = 0.30;   // share of marker tokens taken from another class
    double topic_rate = 0.35;   // share of tokens drawn from the topic vocabulary
    std::size_t topic_vocabulary = 60;
    /// Each class prefers a different half of the function words: a word's
    /// weight is scaled by (1 + tilt) or (1 - tilt). A diffuse stylistic cue.
    double function_tilt = 0.2;
    /// Class-specific pseudo-words, drawn uniformly. A share `extra_share` of
    /// documents takes its marker tokens from these only: many weak cues,
    /// none decisive alone.
    std::size_t extra_markers = 200;
    double extra_share = 0.2;
    std::uint64_t seed = 0;

    static std::vector<std::string> default_topics();
    static std::vector<std::string> heldout_topics();
};

/// Marker words of a class, most characteristic first.
const std::vector<std::string>& style_markers(ClassLabel label);
const std::vector<std::string>& common_words();

/// Pseudo-words of a topic; a pure function of the topic name. Different
/// topics get disjoint vocabularies.
std::vector<std::string> topic_words(const std::string& topic, std::size_t count);

/// One document in the style of `label` about `topic`.
std::string synthetic_text(ClassLabel label, const std::string& topic, const SyntheticOptions& opts, Rng& rng);

/// Balanced corpus: docs_per_class_per_topic documents per (topic, class),
/// interleaved by topic then class. Deterministic in the options.
Manifest synthetic_corpus(const SyntheticOptions& opts);

}  // namespace fsols
