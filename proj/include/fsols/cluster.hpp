#pragma once

#include "fsols/eval.hpp"
#include "fsols/random.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fsols {

template <typename Scalar>
using PointMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Document embeddings, one row per document.
template <typename Scalar>
struct EmbeddingSet {
    std::vector<std::string> ids;
    PointMatrix<Scalar> vectors;
    std::string producer;
};

template <typename Scalar>
struct Clustering {
    PointMatrix<Scalar> centroids;        // k x d
    std::vector<int> assignment;          // per point
    Scalar inertia = 0;                   // sum of squared distances to the assigned centroid
    std::vector<Scalar> inertia_history;  // per Lloyd iteration of the winning restart
    int iterations = 0;
    bool converged = false;
};

struct KMeansOptions {
    int k = 4;
    int n_init = 10;
    int max_iter = 300;
    std::uint64_t seed = 0;
};

namespace detail {

template <typename Scalar>
Scalar squared_distance(const PointMatrix<Scalar>& a, Eigen::Index i, const PointMatrix<Scalar>& b, Eigen::Index j) {
    return (a.row(i) - b.row(j)).squaredNorm();
}

// k-means++ seeding: first centre uniform, then proportional to D^2 (uniform when every D^2 is 0).
template <typename Scalar>
PointMatrix<Scalar> kmeanspp(const PointMatrix<Scalar>& X, int k, Rng& rng) {
    const Eigen::Index n = X.rows();
    PointMatrix<Scalar> C(k, X.cols());
    C.row(0) = X.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
    std::vector<Scalar> d2(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = squared_distance(X, i, C, 0);
    for (int c = 1; c < k; ++c) {
        Scalar total = 0;
        for (const auto v : d2) total += v;
        Eigen::Index pick = n - 1;
        if (total <= Scalar(0)) {
            pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        } else {
            const Scalar target = static_cast<Scalar>(rng.uniform()) * total;
            Scalar run = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                run += d2[static_cast<std::size_t>(i)];
                if (run > target) {
                    pick = i;
                    break;
                }
            }
        }
        C.row(c) = X.row(pick);
        for (Eigen::Index i = 0; i < n; ++i)
            d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], squared_distance(X, i, C, c));
    }
    return C;
}

// Nearest centroid per point (lowest index on ties); returns the inertia.
template <typename Scalar>
Scalar assign(const PointMatrix<Scalar>& X, const PointMatrix<Scalar>& C, std::vector<int>& labels,
              std::vector<Scalar>& dist) {
    Scalar inertia = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        int best = 0;
        Scalar best_d = squared_distance(X, i, C, 0);
        for (Eigen::Index c = 1; c < C.rows(); ++c) {
            const Scalar d = squared_distance(X, i, C, c);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        labels[static_cast<std::size_t>(i)] = best;
        dist[static_cast<std::size_t>(i)] = best_d;
        inertia += best_d;
    }
    return inertia;
}

template <typename Scalar>
Clustering<Scalar> lloyd(const PointMatrix<Scalar>& X, int k, int max_iter, Rng& rng) {
    const auto n = static_cast<std::size_t>(X.rows());
    Clustering<Scalar> out;
    out.centroids = kmeanspp(X, k, rng);
    out.assignment.assign(n, -1);
    std::vector<int> labels(n);
    std::vector<Scalar> dist(n);
    for (int it = 0; it < max_iter; ++it) {
        const Scalar inertia = assign(X, out.centroids, labels, dist);
        out.inertia_history.push_back(inertia);
        out.iterations = it + 1;
        if (labels == out.assignment) {
            out.converged = true;
            break;
        }
        out.assignment = labels;

        PointMatrix<Scalar> sums = PointMatrix<Scalar>::Zero(k, X.cols());
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums.row(labels[i]) += X.row(static_cast<Eigen::Index>(i));
            ++counts[static_cast<std::size_t>(labels[i])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                out.centroids.row(c) = sums.row(c) / static_cast<Scalar>(counts[static_cast<std::size_t>(c)]);
                continue;
            }
            // Empty cluster: move it onto the point farthest from its centre
            // (a uniformly random point when every distance is 0).
            std::size_t far = 0;
            for (std::size_t i = 1; i < n; ++i)
                if (dist[i] > dist[far]) far = i;
            if (dist[far] <= Scalar(0)) far = static_cast<std::size_t>(rng.below(n));
            out.centroids.row(c) = X.row(static_cast<Eigen::Index>(far));
            dist[far] = 0;
        }
    }
    out.inertia = out.inertia_history.back();
    return out;
}

}  // namespace detail

/// Lloyd's algorithm from k-means++ seeds, run `n_init` times from one seeded
/// stream; the restart with the lowest final inertia wins (earliest on ties).
/// Stops when assignments no longer change or after `max_iter` iterations.
template <typename Scalar>
Clustering<Scalar> kmeans(const PointMatrix<Scalar>& X, const KMeansOptions& opts = {}) {
    if (opts.k < 1) throw std::invalid_argument("k must be >= 1");
    if (opts.n_init < 1 || opts.max_iter < 1) throw std::invalid_argument("n_init and max_iter must be >= 1");
    if (X.cols() < 1) throw std::invalid_argument("points need at least one dimension");
    if (X.rows() < opts.k)
        throw std::invalid_argument("k-means needs at least k = " + std::to_string(opts.k) + " points, got " +
                                    std::to_string(X.rows()));
    Rng rng(opts.seed);
    Clustering<Scalar> best;
    for (int run = 0; run < opts.n_init; ++run) {
        auto c = detail::lloyd(X, opts.k, opts.max_iter, rng);
        if (run == 0 || c.inertia < best.inertia) best = std::move(c);
    }
    return best;
}

/// Cluster x class counts.
using Contingency = std::array<std::array<std::int64_t, kNumClasses>, kNumClasses>;

/// Bijection cluster -> class code maximizing total agreement (Hungarian method).
std::array<int, kNumClasses> optimal_mapping(const Contingency& counts);
std::int64_t mapping_agreement(const Contingency& counts, const std::array<int, kNumClasses>& mapping);

struct ClusterReport {
    Contingency contingency{};
    std::array<int, kNumClasses> mapping{};  // cluster -> class code
    MetricsReport optimal;                   // after the optimal mapping
    MetricsReport identity;                  // cluster i read as class code i
    double purity = 0.0;
};

/// Throws std::invalid_argument unless k equals the number of classes and
/// every assignment lies in [0, k).
ClusterReport cluster_class_metrics(std::span<const int> assignment, std::span<const ClassLabel> labels, int k);

/// Purity: share of points whose cluster's majority label matches their own.
double purity(std::span<const int> assignment, std::span<const ClassLabel> labels);

/// JSONL {"id": ..., "vector": [...]}; validates uniform dimension, finite values and unique ids.
EmbeddingSet<double> load_embeddings(const std::filesystem::path& path);

std::string clustering_json(const Clustering<double>& c, const std::vector<std::string>& ids);
std::string to_json(const ClusterReport& r);
std::string to_markdown(const ClusterReport& r);

}  // namespace fsols
