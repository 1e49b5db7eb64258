#pragma once

#include "fsols/corpus.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fsols {

/// Document-term matrix, one document per row.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
/// One document; inner indices are strictly increasing.
using DocVector = Eigen::SparseVector<double>;

/// Lowercase word unigrams: maximal runs of word characters, keeping runs of
/// two or more code points. Apostrophes split contractions, so "you're"
/// yields "you" and "re" while the single letter of "don't" is dropped.
std::vector<std::string> tokenize(std::string_view text);

struct Vocabulary {
    std::vector<std::string> terms;              // index -> term, lexicographic order
    std::vector<std::size_t> document_frequency; // per index
    std::size_t max_features = 1000;

    std::size_t size() const { return terms.size(); }
    std::optional<int> find(std::string_view term) const;
    /// FNV-1a over the newline-joined terms.
    std::uint64_t hash() const;

    void rebuild_index();

private:
    std::unordered_map<std::string, int> index_;
};

enum class Weighting { Count, TfIdf };

std::string_view weighting_name(Weighting w);
Weighting parse_weighting(std::string_view name);

/// A fitted bag-of-words vectorizer.
///
/// TfIdf: weight = count * idf, idf_t = ln((1 + n) / (1 + df_t)) + 1, rows l2-normalized.
/// Count: raw term counts, no idf, no normalization.
struct Vectorizer {
    Weighting weighting = Weighting::TfIdf;
    Vocabulary vocabulary;
    Eigen::VectorXd idf;  // empty for Count
    std::size_t n_docs = 0;

    DocVector transform(std::string_view text) const;
    SparseMatrix transform(std::span<const std::string> texts) const;
};

/// Keeps the `max_features` terms with the highest corpus frequency (ties by
/// term), then indexes them lexicographically. Throws std::invalid_argument
/// when the corpus yields no tokens.
Vectorizer fit_tfidf(std::span<const std::string> texts, std::size_t max_features = 1000);
Vectorizer fit_count(std::span<const std::string> texts, std::size_t max_features = 1000);
Vectorizer fit_vectorizer(Weighting w, std::span<const std::string> texts, std::size_t max_features = 1000);

struct RankedTerm {
    std::string term;
    double score = 0.0;
};

struct ClassTerms {
    ClassLabel label;
    std::vector<RankedTerm> terms;
};

struct Characterization {
    std::vector<ClassTerms> classes;    // classes without documents are omitted
    std::vector<std::string> warnings;
};

/// Pools each class's documents into one pseudo-document, weights its term
/// counts by idf fitted on the individual documents of the whole corpus,
/// l2-normalizes, and returns the top k terms per class (ties by term).
/// Terms absent from a class are never listed for it.
Characterization class_characterization(const Manifest& m, std::size_t k, std::size_t max_features = 1000);

}  // namespace fsols
