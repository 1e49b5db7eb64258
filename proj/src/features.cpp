#include "fsols/features.hpp"

#include "fsols/error.hpp"
#include "fsols/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace fsols {

std::vector<std::string> tokenize(std::string_view input) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t current_len = 0;
    auto flush = [&] {
        if (current_len >= 2) tokens.push_back(current);
        current.clear();
        current_len = 0;
    };
    for (std::size_t pos = 0; pos < input.size();) {
        const char32_t cp = text::decode(input, pos);
        if (text::is_word_char(cp)) {
            text::append_utf8(current, text::to_lower(cp));
            ++current_len;
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::optional<int> Vocabulary::find(std::string_view term) const {
    const auto it = index_.find(std::string(term));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t Vocabulary::hash() const {
    std::string joined;
    for (const auto& t : terms) {
        joined += t;
        joined.push_back('\n');
    }
    return text::fnv1a(joined);
}

void Vocabulary::rebuild_index() {
    index_.clear();
    for (std::size_t i = 0; i < terms.size(); ++i) index_.emplace(terms[i], static_cast<int>(i));
}

std::string_view weighting_name(Weighting w) { return w == Weighting::Count ? "count" : "tfidf"; }

Weighting parse_weighting(std::string_view name) {
    if (name == "count") return Weighting::Count;
    if (name == "tfidf") return Weighting::TfIdf;
    throw std::invalid_argument("unknown vectorizer '" + std::string(name) + "' (expected count or tfidf)");
}

namespace {

// Sorted (index, count) pairs of in-vocabulary tokens.
std::vector<std::pair<int, double>> term_counts(const Vocabulary& vocab, std::string_view input) {
    std::map<int, double> counts;
    for (const auto& tok : tokenize(input))
        if (const auto idx = vocab.find(tok)) counts[*idx] += 1.0;
    return {counts.begin(), counts.end()};
}

}  // namespace

DocVector Vectorizer::transform(std::string_view input) const {
    auto counts = term_counts(vocabulary, input);
    DocVector v(static_cast<Eigen::Index>(vocabulary.size()));
    v.reserve(static_cast<Eigen::Index>(counts.size()));
    if (weighting == Weighting::TfIdf) {
        double norm2 = 0.0;
        for (auto& [idx, value] : counts) {
            value *= idf[idx];
            norm2 += value * value;
        }
        const double norm = std::sqrt(norm2);
        if (norm > 0.0)
            for (auto& entry : counts) entry.second /= norm;
    }
    for (const auto& [idx, value] : counts) v.insertBack(idx) = value;
    return v;
}

SparseMatrix Vectorizer::transform(std::span<const std::string> texts) const {
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t row = 0; row < texts.size(); ++row) {
        const DocVector v = transform(texts[row]);
        for (DocVector::InnerIterator it(v); it; ++it)
            triplets.emplace_back(static_cast<int>(row), static_cast<int>(it.index()), it.value());
    }
    SparseMatrix m(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(vocabulary.size()));
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

Vectorizer fit_vectorizer(Weighting w, std::span<const std::string> texts, std::size_t max_features) {
    if (texts.empty()) throw std::invalid_argument("cannot fit a vectorizer on zero documents");
    if (max_features == 0) throw std::invalid_argument("max_features must be >= 1");
    std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> stats;  // term -> (corpus count, df)
    for (const auto& doc : texts) {
        auto tokens = tokenize(doc);
        for (const auto& t : tokens) ++stats[t].first;
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        for (const auto& t : tokens) ++stats[t].second;
    }
    if (stats.empty()) throw std::invalid_argument("empty vocabulary: the corpus contains no tokens");

    std::vector<const std::pair<const std::string, std::pair<std::size_t, std::size_t>>*> ranked;
    ranked.reserve(stats.size());
    for (const auto& entry : stats) ranked.push_back(&entry);
    std::sort(ranked.begin(), ranked.end(), [](const auto* a, const auto* b) {
        if (a->second.first != b->second.first) return a->second.first > b->second.first;
        return a->first < b->first;
    });
    if (ranked.size() > max_features) ranked.resize(max_features);
    std::sort(ranked.begin(), ranked.end(), [](const auto* a, const auto* b) { return a->first < b->first; });

    Vectorizer v;
    v.weighting = w;
    v.n_docs = texts.size();
    v.vocabulary.max_features = max_features;
    for (const auto* entry : ranked) {
        v.vocabulary.terms.push_back(entry->first);
        v.vocabulary.document_frequency.push_back(entry->second.second);
    }
    v.vocabulary.rebuild_index();
    if (w == Weighting::TfIdf) {
        const double n = static_cast<double>(texts.size());
        v.idf.resize(static_cast<Eigen::Index>(ranked.size()));
        for (std::size_t i = 0; i < ranked.size(); ++i)
            v.idf[static_cast<Eigen::Index>(i)] =
                std::log((1.0 + n) / (1.0 + static_cast<double>(v.vocabulary.document_frequency[i]))) + 1.0;
    }
    return v;
}

Vectorizer fit_tfidf(std::span<const std::string> texts, std::size_t max_features) {
    return fit_vectorizer(Weighting::TfIdf, texts, max_features);
}

Vectorizer fit_count(std::span<const std::string> texts, std::size_t max_features) {
    return fit_vectorizer(Weighting::Count, texts, max_features);
}

Characterization class_characterization(const Manifest& m, std::size_t k, std::size_t max_features) {
    if (k < 1) throw std::invalid_argument("class_characterization: k must be >= 1");
    if (m.documents.empty()) throw std::invalid_argument("class_characterization: empty manifest");
    std::vector<std::string> texts;
    texts.reserve(m.documents.size());
    for (const auto& d : m.documents) texts.push_back(d.text());
    const Vectorizer tfidf = fit_tfidf(texts, max_features);

    Characterization out;
    for (const ClassLabel label : kAllLabels) {
        Eigen::VectorXd pooled = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(tfidf.vocabulary.size()));
        std::size_t docs = 0;
        for (const auto& d : m.documents) {
            if (d.label != label) continue;
            ++docs;
            for (const auto& [idx, count] : term_counts(tfidf.vocabulary, d.text())) pooled[idx] += count;
        }
        if (docs == 0) {
            out.warnings.push_back("class " + std::string(label_name(label)) + " has no documents; omitted");
            continue;
        }
        pooled = pooled.cwiseProduct(tfidf.idf);
        if (const double norm = pooled.norm(); norm > 0.0) pooled /= norm;

        std::vector<int> order(static_cast<std::size_t>(pooled.size()));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (pooled[a] != pooled[b]) return pooled[a] > pooled[b];
            return tfidf.vocabulary.terms[a] < tfidf.vocabulary.terms[b];
        });
        ClassTerms ct{label, {}};
        for (std::size_t i = 0; i < std::min(k, order.size()) && pooled[order[i]] > 0.0; ++i)
            ct.terms.push_back({tfidf.vocabulary.terms[order[i]], pooled[order[i]]});
        out.classes.push_back(std::move(ct));
    }
    return out;
}

}  // namespace fsols
