#include "fsols/explain.hpp"

#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fsols {

namespace {

std::array<double, kNumClasses> fractions(const ClassHistogram& h) {
    std::array<double, kNumClasses> f{};
    const double total = std::accumulate(h.begin(), h.end(), 0.0);
    if (total > 0.0)
        for (int c = 0; c < kNumClasses; ++c) f[c] = h[c] / total;
    return f;
}

}  // namespace

RuleTermReport extract_rule_terms(std::span<const DecisionTree> trees, const Vocabulary& vocab, std::size_t k) {
    if (trees.empty()) throw std::invalid_argument("cannot explain an empty forest");
    struct Acc {
        std::size_t count = 0;
        std::array<double, kNumClasses> direction{};
        std::array<std::size_t, kNumClasses> votes{};
    };
    std::map<int, Acc> acc;
    RuleTermReport report;
    for (const auto& tree : trees) {
        for (const auto& node : tree.nodes) {
            if (node.is_leaf()) continue;
            if (static_cast<std::size_t>(node.feature) >= vocab.size())
                throw std::invalid_argument("split feature " + std::to_string(node.feature) + " outside the vocabulary");
            ++report.internal_nodes;
            auto& a = acc[node.feature];
            ++a.count;
            const auto& right = tree.nodes[static_cast<std::size_t>(node.right)].histogram;
            const auto fr = fractions(right);
            const auto fl = fractions(tree.nodes[static_cast<std::size_t>(node.left)].histogram);
            for (int c = 0; c < kNumClasses; ++c) a.direction[c] += fr[c] - fl[c];
            TreeNode probe;
            probe.histogram = right;
            ++a.votes[static_cast<std::size_t>(leaf_class(probe))];
        }
    }
    for (const auto& [feature, a] : acc) {
        TermRuleCount t;
        t.term = vocab.terms[static_cast<std::size_t>(feature)];
        t.count = a.count;
        t.class_direction = a.direction;
        int best = 0;
        for (int c = 1; c < kNumClasses; ++c)
            if (a.votes[c] > a.votes[best] || (a.votes[c] == a.votes[best] && a.direction[c] > a.direction[best]))
                best = c;
        t.direction = static_cast<ClassLabel>(best);
        report.terms.push_back(std::move(t));
    }
    std::sort(report.terms.begin(), report.terms.end(), [](const auto& x, const auto& y) {
        return x.count != y.count ? x.count > y.count : x.term < y.term;
    });
    if (k > 0 && report.terms.size() > k) report.terms.resize(k);
    return report;
}

RuleTermReport extract_forest_rule_terms(const ForestModel& forest, const Vocabulary& vocab, std::size_t k) {
    return extract_rule_terms(forest.trees, vocab, k);
}

LinearFeatureReport top_linear_features(const LinearModel& model, const Vocabulary& vocab, std::size_t k) {
    if (static_cast<std::size_t>(model.n_features()) != vocab.size())
        throw std::invalid_argument("model has " + std::to_string(model.n_features()) + " features, vocabulary has " +
                                    std::to_string(vocab.size()));
    LinearFeatureReport report;
    if (k > vocab.size()) {
        report.warnings.push_back("k=" + std::to_string(k) + " exceeds the vocabulary size " +
                                  std::to_string(vocab.size()) + "; clamped");
        k = vocab.size();
    }
    for (std::size_t j = 0; j < model.classes.size(); ++j) {
        std::vector<RankedTerm> all;
        for (std::size_t f = 0; f < vocab.size(); ++f)
            all.push_back({vocab.terms[f], model.weights(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(f))});
        ClassFeatures cf{model.classes[j], {}, {}};
        auto desc = all;
        std::sort(desc.begin(), desc.end(),
                  [](const auto& a, const auto& b) { return a.score != b.score ? a.score > b.score : a.term < b.term; });
        cf.top.assign(desc.begin(), desc.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(all.begin(), all.end(),
                  [](const auto& a, const auto& b) { return a.score != b.score ? a.score < b.score : a.term < b.term; });
        cf.bottom.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
        report.classes.push_back(std::move(cf));
    }
    return report;
}

std::string to_json(const RuleTermReport& r) {
    nlohmann::ordered_json j;
    j["internal_nodes"] = r.internal_nodes;
    j["terms"] = nlohmann::ordered_json::array();
    for (const auto& t : r.terms) {
        nlohmann::ordered_json dir;
        for (const auto c : kAllLabels) dir[std::string(label_name(c))] = t.class_direction[code(c)];
        j["terms"].push_back({{"term", t.term}, {"count", t.count}, {"direction", label_name(t.direction)},
                              {"class_direction", dir}});
    }
    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

std::string to_markdown(const RuleTermReport& r) {
    std::ostringstream o;
    o << "| rank | term | count | direction |\n|---:|---|---:|---|\n";
    for (std::size_t i = 0; i < r.terms.size(); ++i)
        o << "| " << i + 1 << " | " << r.terms[i].term << " | " << r.terms[i].count << " | "
          << label_name(r.terms[i].direction) << " |\n";
    o << "\nSplit nodes in forest: " << r.internal_nodes << "\n";
    for (const auto& w : r.warnings) o << "\nwarning: " << w << "\n";
    return o.str();
}

std::string to_json(const LinearFeatureReport& r) {
    nlohmann::ordered_json j;
    j["classes"] = nlohmann::ordered_json::array();
    for (const auto& c : r.classes) {
        auto list = [](const std::vector<RankedTerm>& terms) {
            auto a = nlohmann::ordered_json::array();
            for (const auto& t : terms) a.push_back({{"term", t.term}, {"weight", t.score}});
            return a;
        };
        j["classes"].push_back({{"label", label_name(c.label)}, {"top", list(c.top)}, {"bottom", list(c.bottom)}});
    }
    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

std::string to_markdown(const LinearFeatureReport& r) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(4);
    for (const auto& c : r.classes) {
        o << "## " << label_name(c.label) << "\n\n| rank | top term | weight | bottom term | weight |\n"
          << "|---:|---|---:|---|---:|\n";
        for (std::size_t i = 0; i < c.top.size(); ++i)
            o << "| " << i + 1 << " | " << c.top[i].term << " | " << c.top[i].score << " | " << c.bottom[i].term
              << " | " << c.bottom[i].score << " |\n";
        o << "\n";
    }
    for (const auto& w : r.warnings) o << "warning: " << w << "\n";
    return o.str();
}

}  // namespace fsols
