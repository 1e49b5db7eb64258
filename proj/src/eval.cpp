#include "fsols/eval.hpp"

#include "fsols/error.hpp"
#include "fsols/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace fsols {

namespace {

std::string stratum_name(const std::string& key) {
    const auto sep = key.find('\x1f');
    std::string name(label_name(label_from_code(std::stoi(key.substr(0, sep)))));
    if (sep != std::string::npos) name += "/" + key.substr(sep + 1);
    return name;
}

}  // namespace

Split split(const Manifest& m, double ratio, Stratify strat, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split ratio must lie in (0, 1)");
    std::map<std::string, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < m.documents.size(); ++i) {
        const auto& d = m.documents[i];
        std::string key = std::to_string(code(d.label));
        if (strat == Stratify::ClassTopic) key += '\x1f' + d.topic;
        strata[key].push_back(i);
    }
    const double test_share = 1.0 - ratio;
    const auto n = static_cast<double>(m.documents.size());
    auto remaining = static_cast<std::int64_t>(std::llround(test_share * n));

    struct Alloc {
        const std::string* key;
        std::size_t take;
        double remainder;
    };
    std::vector<Alloc> alloc;
    for (const auto& [key, idx] : strata) {
        if (idx.size() < 2)
            throw DataError("stratum '" + stratum_name(key) + "' has " + std::to_string(idx.size()) +
                            " document(s); at least 2 are needed to split");
        const double exact = test_share * static_cast<double>(idx.size());
        const auto base = static_cast<std::size_t>(std::floor(exact));
        alloc.push_back({&key, base, exact - static_cast<double>(base)});
        remaining -= static_cast<std::int64_t>(base);
    }
    std::vector<std::size_t> order(alloc.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return alloc[a].remainder > alloc[b].remainder; });
    for (std::size_t i = 0; i < order.size() && remaining > 0; ++i, --remaining) ++alloc[order[i]].take;

    Rng rng(seed);
    std::vector<bool> is_test(m.documents.size(), false);
    for (const auto& a : alloc) {
        auto idx = strata.at(*a.key);
        rng.shuffle(std::span(idx));
        for (std::size_t j = 0; j < a.take; ++j) is_test[idx[j]] = true;
    }
    Split s;
    s.ratio = ratio;
    s.strat = strat;
    s.seed = seed;
    for (std::size_t i = 0; i < m.documents.size(); ++i)
        (is_test[i] ? s.test_ids : s.train_ids).push_back(m.documents[i].id);
    return s;
}

std::vector<Document> select_documents(const Manifest& m, const std::vector<std::string>& ids) {
    const std::unordered_set<std::string> wanted(ids.begin(), ids.end());
    std::vector<Document> out;
    for (const auto& d : m.documents)
        if (wanted.count(d.id)) out.push_back(d);
    if (out.size() != wanted.size()) throw DataError("split lists ids that are not in the manifest");
    return out;
}

namespace {

// Exact non-negative rational; results are rounded once when converted.
struct Fraction {
    __int128 num = 0;
    __int128 den = 1;

    static __int128 gcd(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        while (b != 0) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }
    Fraction(__int128 n = 0, __int128 d = 1) : num(n), den(d) {
        const __int128 g = gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    Fraction operator+(const Fraction& o) const {
        const __int128 g = gcd(den, o.den);
        return {num * (o.den / g) + o.num * (den / g), den / g * o.den};
    }
    Fraction operator*(const Fraction& o) const { return {num * o.num, den * o.den}; }

    double value() const {
        constexpr __int128 exact = __int128(1) << 53;
        if (num < exact && den < exact) return static_cast<double>(num) / static_cast<double>(den);
        return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
    }
};

Fraction ratio_or_zero(std::int64_t num, std::int64_t den) { return den == 0 ? Fraction{} : Fraction{num, den}; }

}  // namespace

MetricsReport metrics_from_confusion(const ConfusionMatrix& cm) {
    MetricsReport r;
    r.confusion = cm;
    std::int64_t correct = 0;
    std::array<std::int64_t, kNumClasses> predicted{};
    for (int t = 0; t < kNumClasses; ++t)
        for (int p = 0; p < kNumClasses; ++p) {
            if (cm[t][p] < 0) throw std::invalid_argument("confusion matrix entries must be >= 0");
            r.n += cm[t][p];
            r.per_class[t].support += cm[t][p];
            predicted[p] += cm[t][p];
            if (t == p) correct += cm[t][p];
        }
    if (r.n == 0) throw std::invalid_argument("metrics need at least one prediction");

    Fraction weighted, macro;
    int present = 0;
    for (int c = 0; c < kNumClasses; ++c) {
        const std::int64_t tp = cm[c][c];
        const std::int64_t fp = predicted[c] - tp;
        const std::int64_t fn = r.per_class[c].support - tp;
        auto& m = r.per_class[c];
        m.precision = ratio_or_zero(tp, tp + fp).value();
        m.recall = ratio_or_zero(tp, tp + fn).value();
        const Fraction f1 = ratio_or_zero(2 * tp, 2 * tp + fp + fn);
        m.f1 = f1.value();
        weighted = weighted + f1 * Fraction(m.support, r.n);
        if (m.support > 0 || predicted[c] > 0) {
            macro = macro + f1;
            ++present;
        }
    }
    r.accuracy = Fraction(correct, r.n).value();
    r.weighted_f1 = weighted.value();
    r.macro_f1 = (macro * Fraction(1, present)).value();
    return r;
}

MetricsReport compute_metrics(std::span<const ClassLabel> y_true, std::span<const ClassLabel> y_pred) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("y_true has " + std::to_string(y_true.size()) + " labels, y_pred has " +
                                    std::to_string(y_pred.size()));
    if (y_true.empty()) throw std::invalid_argument("metrics need at least one prediction");
    ConfusionMatrix cm{};
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = code(y_true[i]), p = code(y_pred[i]);
        if (t < 0 || t >= kNumClasses || p < 0 || p >= kNumClasses) throw std::invalid_argument("invalid label");
        ++cm[t][p];
    }
    return metrics_from_confusion(cm);
}

MetricsReport evaluate(const TextClassifier& model, std::span<const Document> docs) {
    std::vector<std::string> texts;
    std::vector<ClassLabel> truth;
    for (const auto& d : docs) {
        texts.push_back(d.text());
        truth.push_back(d.label);
    }
    const auto pred = model.predict(texts);
    return compute_metrics(truth, pred);
}

UnseenTopicReport unseen_topic_eval(const TextClassifier& model, const Manifest& train,
                                    const std::vector<std::string>& heldout_topics, const Manifest& test) {
    const std::set<std::string> heldout(heldout_topics.begin(), heldout_topics.end());
    if (heldout.empty()) throw std::invalid_argument("no held-out topics given");
    for (const auto& d : train.documents)
        if (heldout.count(d.topic))
            throw DataError("topic leakage: held-out topic '" + d.topic + "' occurs in training document " + d.id);
    std::vector<Document> seen, unseen;
    std::set<std::string> found;
    for (const auto& d : test.documents) {
        if (heldout.count(d.topic)) {
            unseen.push_back(d);
            found.insert(d.topic);
        } else {
            seen.push_back(d);
        }
    }
    for (const auto& t : heldout)
        if (!found.count(t)) throw DataError("held-out topic '" + t + "' has no documents in the test manifest");
    if (seen.empty()) throw DataError("the test manifest has no in-topic documents");

    UnseenTopicReport r;
    r.heldout_topics.assign(heldout.begin(), heldout.end());
    r.in_topic = evaluate(model, seen);
    r.unseen = evaluate(model, unseen);
    r.delta_weighted_f1 = r.unseen.weighted_f1 - r.in_topic.weighted_f1;
    r.delta_macro_f1 = r.unseen.macro_f1 - r.in_topic.macro_f1;
    r.delta_accuracy = r.unseen.accuracy - r.in_topic.accuracy;
    for (int c = 0; c < kNumClasses; ++c) r.delta_f1[c] = r.unseen.per_class[c].f1 - r.in_topic.per_class[c].f1;
    return r;
}

namespace {

nlohmann::ordered_json metrics_json(const MetricsReport& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["accuracy"] = r.accuracy;
    j["macro_f1"] = r.macro_f1;
    j["weighted_f1"] = r.weighted_f1;
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (const auto c : kAllLabels) {
        const auto& m = r.per_class[code(c)];
        per[std::string(label_name(c))] = {
            {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
    }
    j["per_class"] = per;
    j["labels"] = nlohmann::ordered_json::array();
    for (const auto c : kAllLabels) j["labels"].push_back(label_name(c));
    j["confusion"] = r.confusion;
    return j;
}

void metrics_table(std::ostream& o, const MetricsReport& r) {
    o << std::fixed << std::setprecision(4);
    o << "| class | precision | recall | f1 | support |\n|---|---:|---:|---:|---:|\n";
    for (const auto c : kAllLabels) {
        const auto& m = r.per_class[code(c)];
        o << "| " << label_name(c) << " | " << m.precision << " | " << m.recall << " | " << m.f1 << " | " << m.support
          << " |\n";
    }
    o << "\naccuracy " << r.accuracy << ", macro-F1 " << r.macro_f1 << ", weighted-F1 " << r.weighted_f1 << " (n = "
      << r.n << ")\n\nConfusion matrix (rows: true, columns: predicted)\n\n|   |";
    for (const auto c : kAllLabels) o << ' ' << label_name(c) << " |";
    o << "\n|---|";
    for (int c = 0; c < kNumClasses; ++c) o << "---:|";
    o << '\n';
    for (const auto t : kAllLabels) {
        o << "| " << label_name(t) << " |";
        for (int p = 0; p < kNumClasses; ++p) o << ' ' << r.confusion[code(t)][p] << " |";
        o << '\n';
    }
}

}  // namespace

std::string to_json(const MetricsReport& r) { return metrics_json(r).dump(2) + "\n"; }

std::string to_markdown(const MetricsReport& r) {
    std::ostringstream o;
    metrics_table(o, r);
    return o.str();
}

std::string to_json(const UnseenTopicReport& r) {
    nlohmann::ordered_json j;
    j["heldout_topics"] = r.heldout_topics;
    j["in_topic"] = metrics_json(r.in_topic);
    j["unseen"] = metrics_json(r.unseen);
    nlohmann::ordered_json d;
    d["weighted_f1"] = r.delta_weighted_f1;
    d["macro_f1"] = r.delta_macro_f1;
    d["accuracy"] = r.delta_accuracy;
    for (const auto c : kAllLabels) d["f1_" + std::string(label_name(c))] = r.delta_f1[code(c)];
    j["delta"] = d;
    return j.dump(2) + "\n";
}

std::string to_markdown(const UnseenTopicReport& r) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(4) << "| class | F1 known topics | F1 unseen topics | delta |\n"
      << "|---|---:|---:|---:|\n";
    for (const auto c : kAllLabels)
        o << "| " << label_name(c) << " | " << r.in_topic.per_class[code(c)].f1 << " | "
          << r.unseen.per_class[code(c)].f1 << " | " << r.delta_f1[code(c)] << " |\n";
    o << "| overall (weighted) | " << r.in_topic.weighted_f1 << " | " << r.unseen.weighted_f1 << " | "
      << r.delta_weighted_f1 << " |\n\nHeld-out topics:";
    for (const auto& t : r.heldout_topics) o << ' ' << t;
    o << "\n\n### Known topics\n\n";
    metrics_table(o, r.in_topic);
    o << "\n### Unseen topics\n\n";
    metrics_table(o, r.unseen);
    return o.str();
}

MetricsReport metrics_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        MetricsReport r;
        r.n = j.at("n").get<std::int64_t>();
        r.accuracy = j.at("accuracy").get<double>();
        r.macro_f1 = j.at("macro_f1").get<double>();
        r.weighted_f1 = j.at("weighted_f1").get<double>();
        for (const auto c : kAllLabels) {
            const auto& m = j.at("per_class").at(std::string(label_name(c)));
            r.per_class[code(c)] = {m.at("precision").get<double>(), m.at("recall").get<double>(),
                                    m.at("f1").get<double>(), m.at("support").get<std::int64_t>()};
        }
        r.confusion = j.at("confusion").get<ConfusionMatrix>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("metrics report: ") + e.what());
    }
}

}  // namespace fsols
