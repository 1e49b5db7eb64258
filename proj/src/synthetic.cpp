#include "fsols/synthetic.hpp"

#include "fsols/text.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace fsols {

std::vector<std::string> SyntheticOptions::default_topics() {
    return {"abortion", "dementia", "heart-attack", "inflammation", "insomnia",
            "measles",  "menopause", "stroke",      "tobacco",      "turmeric"};
}

std::vector<std::string> SyntheticOptions::heldout_topics() { return {"climate-change", "pandemics", "urine"}; }

const std::vector<std::string>& style_markers(ClassLabel label) {
    static const std::array<std::vector<std::string>, kNumClasses> markers{{
        // alternative-scientific
        {"homeopathic", "herbal", "medicine", "natural", "remedies", "holistic", "healing", "traditional",
         "supplements", "ayurvedic", "acupuncture", "detox", "wellness", "organic", "practitioners", "essential",
         "oils", "energy", "immune", "tincture", "extract", "naturopathic", "balance", "body"},
        // scientific
        {"et", "al", "references", "patients", "study", "results", "analysis", "significant", "cohort", "trial",
         "randomized", "data", "methods", "figure", "table", "participants", "clinical", "observed", "associated",
         "compared", "respectively", "statistically", "medicine", "conclusion"},
        // vernacular
        {"says", "said", "she", "he", "my", "we", "told", "according", "people", "week", "year", "reported",
         "university", "professor", "interview", "news", "percent", "spokesperson", "last", "mr", "ms",
         "researchers", "study", "new"},
        // disinformative
        {"re", "your", "doctors", "researchers", "truth", "they", "mainstream", "big", "pharma", "hidden", "toxic",
         "censored", "government", "you", "wake", "lies", "secret", "dangerous", "cover", "poison", "agenda",
         "exposed", "immune", "natural"},
    }};
    return markers[static_cast<std::size_t>(code(label))];
}

const std::vector<std::string>& common_words() {
    static const std::vector<std::string> words{
        "the", "of", "and", "to", "in", "is", "that", "for", "it", "with", "as", "on", "be", "this", "are",
        "by", "was", "from", "at", "an", "or", "have", "not", "but", "which", "can", "has", "more", "also",
        "been", "these", "such", "their", "than", "other", "about", "may", "some", "would", "there", "when",
        "health", "risk", "disease", "people", "use", "effects", "many", "one", "two", "all", "most", "could",
        "into", "over", "only", "after", "between", "both", "however", "because", "while", "where"};
    return words;
}

std::vector<std::string> topic_words(const std::string& topic, std::size_t count) {
    static constexpr std::array<const char*, 20> syllables{"ka", "lo", "mi", "nu", "pe", "ra", "si", "to", "vu", "ze",
                                                           "bo", "da", "fe", "gi", "ho", "ju", "ly", "mo", "ny", "qua"};
    auto encode = [](std::uint64_t v, int digits) {
        std::string s;
        for (int i = 0; i < digits; ++i) {
            s += syllables[v % syllables.size()];
            v /= syllables.size();
        }
        return s;
    };
    // 6 syllables of the topic hash (64M distinct prefixes), then the word index.
    const std::string prefix = encode(text::fnv1a(topic), 6);
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j) out.push_back(prefix + encode(j, 2));
    return out;
}

namespace {

// Draw index i with probability proportional to weight(i).
template <typename Weight>
std::size_t draw(std::size_t n, Rng& rng, Weight weight) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += weight(i);
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i < n; ++i) {
        u -= weight(i);
        if (u < 0.0) return i;
    }
    return n - 1;
}

// Zipf-like draw: index i with weight 1 / (i + 2).
std::size_t zipf(std::size_t n, Rng& rng) {
    return draw(n, rng, [](std::size_t i) { return 1.0 / static_cast<double>(i + 2); });
}

// +1 or -1, fixed per (class, word).
double preference(ClassLabel label, std::size_t word) {
    return (text::fnv1a(std::to_string(code(label)) + ":" + std::to_string(word)) & 1) ? 1.0 : -1.0;
}

}  // namespace

std::string synthetic_text(ClassLabel label, const std::string& topic, const SyntheticOptions& opts, Rng& rng) {
    if (opts.min_tokens == 0 || opts.max_tokens < opts.min_tokens) throw std::invalid_argument("bad token range");
    const auto vocab = topic_words(topic, opts.topic_vocabulary);
    const auto& common = common_words();
    const std::size_t length = opts.min_tokens + rng.below(opts.max_tokens - opts.min_tokens + 1);
    // Style strength varies per document between half and 1.5 times the mean.
    const double style = opts.style_rate * (0.5 + rng.uniform());
    const bool diffuse = opts.extra_markers > 0 && rng.uniform() < opts.extra_share;
    std::array<std::vector<std::string>, kNumClasses> extras;
    if (diffuse)
        for (const auto l : kAllLabels)
            extras[static_cast<std::size_t>(code(l))] = topic_words("style:" + std::string(label_name(l)), opts.extra_markers);

    std::string text;
    std::size_t sentence = 0;
    const std::size_t sentence_len = 8 + rng.below(8);
    for (std::size_t t = 0; t < length; ++t) {
        const double u = rng.uniform();
        std::string word;
        if (u < style) {
            ClassLabel from = label;
            if (rng.uniform() < opts.cross_rate) from = kAllLabels[rng.below(kNumClasses)];
            const auto& m = style_markers(from);
            if (diffuse)
                word = extras[static_cast<std::size_t>(code(from))][rng.below(opts.extra_markers)];
            else
                word = m[zipf(m.size(), rng)];
        } else if (u < style + opts.topic_rate) {
            word = vocab[zipf(vocab.size(), rng)];
        } else {
            word = common[draw(common.size(), rng, [&](std::size_t i) {
                return (1.0 + opts.function_tilt * preference(label, i)) / static_cast<double>(i + 2);
            })];
        }
        if (sentence == 0) {
            if (!text.empty()) text += ' ';
            word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
        } else {
            text += ' ';
        }
        text += word;
        if (++sentence == sentence_len || t + 1 == length) {
            text += '.';
            sentence = 0;
        }
    }
    return text;
}

Manifest synthetic_corpus(const SyntheticOptions& opts) {
    Manifest m;
    m.seed = opts.seed;
    Rng rng(opts.seed);
    for (const auto& topic : opts.topics) {
        for (std::size_t i = 0; i < opts.docs_per_class_per_topic; ++i) {
            for (const auto label : kAllLabels) {
                Document d;
                d.label = label;
                d.topic = topic;
                d.source = "synthetic-" + std::string(label_name(label));
                d.raw_text = synthetic_text(label, topic, opts, rng);
                d.id = document_id(d.source, topic + "/" + std::to_string(i));
                d.retrieved_at = "1970-01-01";
                d.refresh_length();
                m.documents.push_back(std::move(d));
            }
        }
    }
    return m;
}

}  // namespace fsols
