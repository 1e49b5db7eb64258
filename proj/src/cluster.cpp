#include "fsols/cluster.hpp"

#include "fsols/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_set>

namespace fsols {

std::array<int, kNumClasses> optimal_mapping(const Contingency& counts) {
    // Hungarian method with potentials on cost = -agreement; 1-based rows/columns.
    constexpr int n = kNumClasses;
    const auto cost = [&](int i, int j) { return -static_cast<double>(counts[i - 1][j - 1]); };
    std::array<double, n + 1> u{}, v{};
    std::array<int, n + 1> p{}, way{};
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::array<double, n + 1> minv;
        minv.fill(std::numeric_limits<double>::infinity());
        std::array<bool, n + 1> used{};
        do {
            used[j0] = true;
            const int i0 = p[j0];
            double delta = std::numeric_limits<double>::infinity();
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::array<int, n> mapping{};
    for (int j = 1; j <= n; ++j) mapping[p[j] - 1] = j - 1;
    return mapping;
}

std::int64_t mapping_agreement(const Contingency& counts, const std::array<int, kNumClasses>& mapping) {
    std::int64_t total = 0;
    for (int c = 0; c < kNumClasses; ++c) total += counts[c][mapping[c]];
    return total;
}

double purity(std::span<const int> assignment, std::span<const ClassLabel> labels) {
    if (assignment.size() != labels.size() || assignment.empty())
        throw std::invalid_argument("purity: assignment and labels must be non-empty and equally long");
    std::map<int, std::array<std::size_t, kNumClasses>> per_cluster;
    for (std::size_t i = 0; i < assignment.size(); ++i) ++per_cluster[assignment[i]][code(labels[i])];
    std::size_t majority = 0;
    for (const auto& [cluster, h] : per_cluster) majority += *std::max_element(h.begin(), h.end());
    return static_cast<double>(majority) / static_cast<double>(assignment.size());
}

ClusterReport cluster_class_metrics(std::span<const int> assignment, std::span<const ClassLabel> labels, int k) {
    if (k != kNumClasses)
        throw std::invalid_argument("cluster-class metrics need k = " + std::to_string(kNumClasses) + " clusters, got " +
                                    std::to_string(k));
    if (assignment.size() != labels.size())
        throw std::invalid_argument("every clustered document needs a label");
    ClusterReport r;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] < 0 || assignment[i] >= k) throw std::invalid_argument("cluster index out of range");
        ++r.contingency[assignment[i]][code(labels[i])];
    }
    r.mapping = optimal_mapping(r.contingency);
    std::vector<ClassLabel> mapped, identity;
    for (const int a : assignment) {
        mapped.push_back(static_cast<ClassLabel>(r.mapping[a]));
        identity.push_back(static_cast<ClassLabel>(a));
    }
    r.optimal = compute_metrics(labels, mapped);
    r.identity = compute_metrics(labels, identity);
    r.purity = purity(assignment, labels);
    return r;
}

EmbeddingSet<double> load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read embeddings " + path.string());
    EmbeddingSet<double> set;
    std::vector<std::vector<double>> rows;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        const std::string where = path.string() + " line " + std::to_string(n);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(where + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string())
            throw DataError(where + ": field 'id' missing or not a string");
        if (!j.contains("vector") || !j["vector"].is_array() || j["vector"].empty())
            throw DataError(where + ": field 'vector' missing or empty");
        const auto id = j["id"].get<std::string>();
        if (!seen.insert(id).second) throw DataError(where + " (id '" + id + "'): duplicate id");
        std::vector<double> v;
        for (const auto& x : j["vector"]) {
            if (!x.is_number() || !std::isfinite(x.get<double>()))
                throw DataError(where + " (id '" + id + "'): field 'vector': non-finite or non-numeric entry");
            v.push_back(x.get<double>());
        }
        if (!rows.empty() && v.size() != rows.front().size())
            throw DataError(where + " (id '" + id + "'): dimension " + std::to_string(v.size()) + ", expected " +
                            std::to_string(rows.front().size()));
        if (j.contains("producer") && j["producer"].is_string() && set.producer.empty())
            set.producer = j["producer"].get<std::string>();
        set.ids.push_back(id);
        rows.push_back(std::move(v));
    }
    if (rows.empty()) throw DataError(path.string() + ": no embeddings");
    set.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t d = 0; d < rows[i].size(); ++d)
            set.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = rows[i][d];
    return set;
}

std::string clustering_json(const Clustering<double>& c, const std::vector<std::string>& ids) {
    nlohmann::ordered_json j;
    j["k"] = c.centroids.rows();
    j["inertia"] = c.inertia;
    j["iterations"] = c.iterations;
    j["converged"] = c.converged;
    j["inertia_history"] = c.inertia_history;
    j["centroids"] = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < c.centroids.rows(); ++r) {
        std::vector<double> row(c.centroids.row(r).data(), c.centroids.row(r).data() + c.centroids.cols());
        j["centroids"].push_back(row);
    }
    nlohmann::ordered_json a = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < ids.size(); ++i) a[ids[i]] = c.assignment[i];
    j["assignment"] = a;
    return j.dump(2) + "\n";
}

std::string to_json(const ClusterReport& r) {
    nlohmann::ordered_json j;
    j["contingency"] = r.contingency;
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (int c = 0; c < kNumClasses; ++c) m[std::to_string(c)] = label_name(static_cast<ClassLabel>(r.mapping[c]));
    j["mapping"] = m;
    j["purity"] = r.purity;
    j["optimal"] = nlohmann::ordered_json::parse(to_json(r.optimal));
    j["identity"] = nlohmann::ordered_json::parse(to_json(r.identity));
    return j.dump(2) + "\n";
}

std::string to_markdown(const ClusterReport& r) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(4) << "| mapping | accuracy | macro-F1 | weighted-F1 |\n|---|---:|---:|---:|\n"
      << "| optimal | " << r.optimal.accuracy << " | " << r.optimal.macro_f1 << " | " << r.optimal.weighted_f1 << " |\n"
      << "| identity | " << r.identity.accuracy << " | " << r.identity.macro_f1 << " | " << r.identity.weighted_f1
      << " |\n\nPurity: " << r.purity << "\n\nCluster to class:";
    for (int c = 0; c < kNumClasses; ++c) o << ' ' << c << "->" << label_name(static_cast<ClassLabel>(r.mapping[c]));
    o << "\n\n### Optimal mapping\n\n" << to_markdown(r.optimal);
    return o.str();
}

}  // namespace fsols
