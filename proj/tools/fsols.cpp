// fsols: command-line entry point for the corpus, training and evaluation pipeline.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 external-service error.

#include "fsols/balance.hpp"
#include "fsols/citations.hpp"
#include "fsols/classifier.hpp"
#include "fsols/cleaning.hpp"
#include "fsols/cluster.hpp"
#include "fsols/error.hpp"
#include "fsols/eval.hpp"
#include "fsols/explain.hpp"
#include "fsols/http.hpp"
#include "fsols/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

namespace {

using namespace fsols;
namespace fs = std::filesystem;

struct Options {
    std::uint64_t seed = 0;
    std::string config;
    std::string fixtures;
    std::string vectorizer = "tfidf";
    std::string model = "svc";
    double threshold = 0.5;

    // per-subcommand
    std::string in, out, markdown, registry, rules, topics_file, test, pmids, embeddings, retrieved_at;
    std::vector<std::string> sources, inputs, heldout;
    std::size_t max_features = 1000;
    std::size_t audit_k = 0;
    std::size_t k = 0;
    double C = 1.0;
    std::size_t n_trees = 100;
    std::size_t n_stages = 50;
    int calibration_folds = 5;
    bool no_calibrate = false;
    double ratio = 0.8;
    std::string strat = "class";
    double rate = 3.0;
    bool top_decile = false;
    bool decile_global = false;
    int n_init = 10;
    std::size_t docs_per_cell = 50;
    bool synth_heldout = false;
    std::string write_rules;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot read " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write " + p.string());
    out << content;
    if (!out) throw DataError("failed writing " + p.string());
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::istringstream in(read_file(p));
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] != '#') out.push_back(line);
    }
    return out;
}

std::string today() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[16];
    std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
    return buf;
}

// Applies a JSON config file: keys fill options that were not given on the command line.
void apply_config(const CLI::App& app, Options& o) {
    if (o.config.empty()) return;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(o.config));
    } catch (const nlohmann::json::exception& e) {
        throw CLI::ValidationError("--config", std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ValidationError("--config", "expected a JSON object");
    auto given = [&](const std::string& flag) {
        for (const auto* sub : app.get_subcommands())
            if (const auto* opt = sub->get_option_no_throw(flag); opt && opt->count() > 0) return true;
        const auto* opt = app.get_option_no_throw(flag);
        return opt && opt->count() > 0;
    };
    const std::set<std::string> known{"seed", "fixtures", "vectorizer", "model", "threshold", "max_features",
                                      "C", "n_trees", "n_stages", "calibration_folds", "ratio", "strat", "rate", "n_init"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw CLI::ValidationError("--config", "unknown key '" + key + "'");
        try {
            if (key == "seed" && !given("--seed")) o.seed = value.get<std::uint64_t>();
            if (key == "fixtures" && !given("--fixtures")) o.fixtures = value.get<std::string>();
            if (key == "vectorizer" && !given("--vectorizer")) o.vectorizer = value.get<std::string>();
            if (key == "model" && !given("--model")) o.model = value.get<std::string>();
            if (key == "threshold" && !given("--threshold")) o.threshold = value.get<double>();
            if (key == "max_features" && !given("--max-features")) o.max_features = value.get<std::size_t>();
            if (key == "C" && !given("--C")) o.C = value.get<double>();
            if (key == "n_trees" && !given("--n-trees")) o.n_trees = value.get<std::size_t>();
            if (key == "n_stages" && !given("--n-stages")) o.n_stages = value.get<std::size_t>();
            if (key == "calibration_folds" && !given("--calibration-folds")) o.calibration_folds = value.get<int>();
            if (key == "ratio" && !given("--ratio")) o.ratio = value.get<double>();
            if (key == "strat" && !given("--strat")) o.strat = value.get<std::string>();
            if (key == "rate" && !given("--rate")) o.rate = value.get<double>();
            if (key == "n_init" && !given("--n-init")) o.n_init = value.get<int>();
        } catch (const nlohmann::json::exception&) {
            throw CLI::ValidationError("--config", "key '" + key + "' has the wrong type");
        }
    }
    if (o.vectorizer != "count" && o.vectorizer != "tfidf")
        throw CLI::ValidationError("--config", "vectorizer must be count or tfidf");
    if (o.model != "svc" && o.model != "logreg" && o.model != "rf" && o.model != "adaboost")
        throw CLI::ValidationError("--config", "model must be svc, logreg, rf or adaboost");
    if (o.strat != "class" && o.strat != "class-topic")
        throw CLI::ValidationError("--config", "strat must be class or class-topic");
}

std::unique_ptr<HttpTransport> make_transport(const Options& o) {
    if (!o.fixtures.empty()) return std::make_unique<FixtureTransport>(o.fixtures);
    return std::make_unique<LiveTransport>();
}

TrainConfig train_config(const Options& o) {
    TrainConfig c;
    c.model = parse_model_kind(o.model);
    c.vectorizer = parse_weighting(o.vectorizer);
    c.max_features = o.max_features;
    c.C = o.C;
    c.n_trees = o.n_trees;
    c.n_stages = o.n_stages;
    c.calibration_folds = o.calibration_folds;
    c.calibrate = !o.no_calibrate;
    c.seed = o.seed;
    return c;
}

void maybe_markdown(const Options& o, const std::string& md) {
    if (!o.markdown.empty()) write_file(o.markdown, md);
}

// ---- subcommands ----

int run_ingest(const Options& o) {
    if (o.sources.size() != o.inputs.size())
        throw CLI::ValidationError("--source/--input", "give one --input per --source");
    const SourceRegistry registry = load_registry(o.registry);
    std::unique_ptr<HttpTransport> transport;
    Manifest m;
    m.seed = o.seed;
    const std::string when = o.retrieved_at.empty() ? today() : o.retrieved_at;
    std::size_t errors = 0;
    for (std::size_t i = 0; i < o.sources.size(); ++i) {
        const SourceSpec* spec = registry.find(o.sources[i]);
        if (!spec) throw DataError("source '" + o.sources[i] + "' is not in the registry");
        if (spec->kind == SourceKind::Fetcher && !transport) transport = make_transport(o);
        IngestResult r = ingest_source(*spec, o.inputs[i], when, transport.get());
        for (const auto& e : r.errors) std::cerr << "error: " << spec->name << ": " << e.item << ": " << e.message << "\n";
        for (const auto& w : r.warnings) std::cerr << "warning: " << spec->name << ": " << w.item << ": " << w.message << "\n";
        errors += r.errors.size();
        std::cerr << spec->name << ": " << r.documents.size() << " documents\n";
        for (auto& d : r.documents) m.documents.push_back(std::move(d));
    }
    validate_manifest(m, &registry);
    write_manifest(m, o.out);
    return 0;
}

int run_clean(const Options& o) {
    if (!o.write_rules.empty()) {
        write_ruleset(default_ruleset(), o.write_rules);
        if (o.in.empty()) return 0;
    }
    if (o.in.empty() || o.out.empty()) throw CLI::ValidationError("clean", "--in and --out are required");
    const RuleSet rules = o.rules.empty() ? default_ruleset() : load_ruleset(o.rules);
    const Manifest cleaned = clean_manifest(load_manifest(o.in), rules);
    write_manifest(cleaned, o.out);
    std::cerr << "cleaned " << cleaned.documents.size() << " documents with ruleset " << rules.version() << "\n";
    if (o.audit_k > 0) {
        const Characterization c = residue_audit(cleaned, o.audit_k);
        std::ostringstream md;
        for (const auto& ct : c.classes) {
            md << "## " << label_name(ct.label) << "\n\n| rank | term | score |\n|---:|---|---:|\n";
            for (std::size_t i = 0; i < ct.terms.size(); ++i)
                md << "| " << i + 1 << " | " << ct.terms[i].term << " | " << ct.terms[i].score << " |\n";
            md << "\n";
        }
        for (const auto& w : c.warnings) md << "warning: " << w << "\n";
        if (o.markdown.empty()) std::cout << md.str();
        else write_file(o.markdown, md.str());
    }
    return 0;
}

int run_balance(const Options& o) {
    const Manifest m = load_manifest(o.in);
    const auto topics = o.topics_file.empty() ? manifest_topics(m) : read_lines(o.topics_file);
    const auto quotas = compute_quotas(m, topics);
    for (const auto& t : empty_topics(quotas)) std::cerr << "warning: topic '" << t << "' has quota 0 and is dropped\n";
    const Manifest balanced = balance_by_topic(m, quotas, o.seed);
    write_manifest(balanced, o.out);
    std::string ids;
    for (const auto& d : balanced.documents) ids += d.id + "\n";
    write_file(o.out + ".selected.txt", ids);
    for (const auto& q : quotas) std::cerr << q.topic << ": " << q.per_class_quota << " per class\n";
    return 0;
}

int run_enrich(const Options& o) {
    auto transport = make_transport(o);
    CitationClientOptions co;
    co.requests_per_second = o.rate;
    if (const char* key = std::getenv("NCBI_API_KEY")) co.api_key = key;
    CitationClient client(*transport, co);
    auto records = enrich(client, load_pmid_list(o.pmids), o.retrieved_at.empty() ? today() : o.retrieved_at);
    if (o.top_decile) {
        std::vector<CitationRecord> counted;
        for (const auto& r : records)
            if (r.citation_count) counted.push_back(r);
        records = select_top_decile(counted, o.decile_global ? DecileScope::Global : DecileScope::PerTopic);
    }
    write_citation_records(records, o.out);
    return 0;
}

int run_featurize(const Options& o) {
    const Manifest m = load_manifest(o.in);
    std::vector<std::string> texts;
    for (const auto& d : m.documents) texts.push_back(d.text());
    const Vectorizer v = fit_vectorizer(parse_weighting(o.vectorizer), texts, o.max_features);
    save_vectorizer(v, o.out);
    std::cerr << "vocabulary: " << v.vocabulary.size() << " terms\n";
    if (o.k > 0) {
        const Characterization c = class_characterization(m, o.k, o.max_features);
        std::ostringstream md;
        for (const auto& ct : c.classes) {
            md << "## " << label_name(ct.label) << "\n\n| rank | term | tf-idf |\n|---:|---|---:|\n";
            for (std::size_t i = 0; i < ct.terms.size(); ++i)
                md << "| " << i + 1 << " | " << ct.terms[i].term << " | " << ct.terms[i].score << " |\n";
            md << "\n";
        }
        if (o.markdown.empty()) std::cout << md.str();
        else write_file(o.markdown, md.str());
    }
    return 0;
}

int run_train(const Options& o) {
    const Manifest m = load_manifest(o.in);
    const Split s = split(m, o.ratio, o.strat == "class-topic" ? Stratify::ClassTopic : Stratify::Class, o.seed);
    TextClassifier model = train_classifier(select_documents(m, s.train_ids), train_config(o));
    model.test_ids = s.test_ids;
    save_classifier(model, o.out);
    std::cerr << "trained " << model_kind_name(model.config.model) << " on " << s.train_ids.size() << " documents; "
              << s.test_ids.size() << " held out\n";
    return 0;
}

int run_evaluate(const Options& o) {
    const TextClassifier model = load_classifier(o.in);
    const Manifest data = load_manifest(o.test);
    Manifest test;
    const std::set<std::string> held(model.test_ids.begin(), model.test_ids.end());
    Manifest train;
    for (const auto& d : data.documents) {
        if (held.empty() || held.count(d.id)) test.documents.push_back(d);
        else train.documents.push_back(d);
    }
    if (test.documents.empty()) throw DataError("no test documents: the manifest holds none of the model's held-out ids");
    if (o.heldout.empty()) {
        const MetricsReport r = evaluate(model, test.documents);
        write_file(o.out, to_json(r));
        maybe_markdown(o, to_markdown(r));
        std::cerr << "weighted-F1 " << r.weighted_f1 << " on " << r.n << " documents\n";
    } else {
        const UnseenTopicReport r = unseen_topic_eval(model, train, o.heldout, test);
        write_file(o.out, to_json(r));
        maybe_markdown(o, to_markdown(r));
        std::cerr << "weighted-F1 known " << r.in_topic.weighted_f1 << ", unseen " << r.unseen.weighted_f1 << "\n";
    }
    return 0;
}

int run_classify(const Options& o) {
    const TextClassifier model = load_classifier(o.in);
    for (const auto& file : o.inputs) {
        const ClassScores s = model.score(read_file(file), o.threshold);
        nlohmann::ordered_json j;
        j["file"] = file;
        nlohmann::ordered_json scores;
        for (const auto c : kAllLabels) scores[std::string(label_name(c))] = s[c];
        j["scores"] = scores;
        j["argmax"] = label_name(s.argmax);
        j["abstain"] = s.abstain;
        std::cout << j.dump() << "\n";
    }
    return 0;
}

int run_explain(const Options& o) {
    const TextClassifier model = load_classifier(o.in);
    const Vocabulary& vocab = model.vectorizer.vocabulary;
    const std::size_t k = o.k ? o.k : 100;
    std::string json, md;
    if (const auto* lin = std::get_if<LinearModel>(&model.base)) {
        const auto r = top_linear_features(*lin, vocab, k);
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
        json = to_json(r);
        md = to_markdown(r);
    } else if (const auto* forest = std::get_if<ForestModel>(&model.base)) {
        const auto r = extract_forest_rule_terms(*forest, vocab, k);
        json = to_json(r);
        md = to_markdown(r);
    } else {
        const auto& boost = std::get<BoostModel>(model.base);
        std::vector<DecisionTree> stumps;
        for (const auto& s : boost.stages) stumps.push_back(s.stump);
        const auto r = extract_rule_terms(stumps, vocab, k);
        json = to_json(r);
        md = to_markdown(r);
    }
    write_file(o.out, json);
    if (o.markdown.empty()) std::cout << md;
    else write_file(o.markdown, md);
    return 0;
}

int run_cluster(const Options& o) {
    const EmbeddingSet<double> e = load_embeddings(o.embeddings);
    KMeansOptions ko;
    ko.k = static_cast<int>(o.k ? o.k : 4);
    ko.n_init = o.n_init;
    ko.seed = o.seed;
    const Clustering<double> c = kmeans(e.vectors, ko);
    write_file(o.out, clustering_json(c, e.ids));
    if (!o.in.empty()) {
        const Manifest m = load_manifest(o.in);
        std::map<std::string, ClassLabel> label;
        for (const auto& d : m.documents) label[d.id] = d.label;
        std::vector<ClassLabel> labels;
        for (const auto& id : e.ids) {
            const auto it = label.find(id);
            if (it == label.end()) throw DataError("embedding id '" + id + "' has no label in the manifest");
            labels.push_back(it->second);
        }
        const ClusterReport r = cluster_class_metrics(c.assignment, labels, ko.k);
        const fs::path report = fs::path(o.out).replace_extension(".metrics.json");
        write_file(report, to_json(r));
        maybe_markdown(o, to_markdown(r));
        std::cerr << "purity " << r.purity << ", optimal-mapping weighted-F1 " << r.optimal.weighted_f1 << "\n";
    }
    return 0;
}

int run_synth(const Options& o) {
    SyntheticOptions so;
    so.seed = o.seed;
    so.docs_per_class_per_topic = o.docs_per_cell;
    if (o.synth_heldout) so.topics = SyntheticOptions::heldout_topics();
    write_manifest(synthetic_corpus(so), o.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fsols: four-class life-science text toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.failure_message(CLI::FailureMessage::help);
    Options o;
    app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
    app.add_option("--config", o.config, "JSON config file; command-line flags take precedence")->check(CLI::ExistingFile);
    app.add_option("--fixtures", o.fixtures, "Replay recorded HTTP responses from this directory")->check(CLI::ExistingDirectory);
    app.add_option("--vectorizer", o.vectorizer, "count or tfidf")
        ->check(CLI::IsMember({"count", "tfidf"}))
        ->capture_default_str();
    app.add_option("--model", o.model, "svc, logreg, rf or adaboost")
        ->check(CLI::IsMember({"svc", "logreg", "rf", "adaboost"}))
        ->capture_default_str();
    app.add_option("--threshold", o.threshold, "Abstain when the best score is below this")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();

    auto* ingest = app.add_subcommand("ingest", "Build a manifest from registered sources");
    ingest->add_option("--registry", o.registry, "Source registry JSON")->required()->check(CLI::ExistingFile);
    ingest->add_option("--source", o.sources, "Source name (repeatable)")->required();
    ingest->add_option("--input", o.inputs, "Directory or url list for the matching --source (repeatable)")->required();
    ingest->add_option("--out", o.out, "Output manifest")->required();
    ingest->add_option("--retrieved-at", o.retrieved_at, "Retrieval date recorded on documents (default: today)");

    auto* clean = app.add_subcommand("clean", "Apply the cleaning ruleset to a manifest");
    clean->add_option("--in", o.in, "Input manifest")->check(CLI::ExistingFile);
    clean->add_option("--out", o.out, "Output manifest");
    clean->add_option("--rules", o.rules, "Ruleset JSON (default: built-in)")->check(CLI::ExistingFile);
    clean->add_option("--audit-k", o.audit_k, "Print the top-k class terms of the cleaned corpus");
    clean->add_option("--markdown", o.markdown, "Write the audit here instead of stdout");
    clean->add_option("--write-default-rules", o.write_rules, "Write the built-in ruleset as JSON");

    auto* balance = app.add_subcommand("balance", "Equalize class counts per topic");
    balance->add_option("--in", o.in, "Input manifest")->required()->check(CLI::ExistingFile);
    balance->add_option("--out", o.out, "Output manifest (ids also go to <out>.selected.txt)")->required();
    balance->add_option("--topics", o.topics_file, "Topics to keep, one per line (default: all)")->check(CLI::ExistingFile);

    auto* enrich_cmd = app.add_subcommand("enrich", "Resolve DOIs and citation counts for PubMed ids");
    enrich_cmd->add_option("--pmids", o.pmids, "\"pmid\" or \"topic<TAB>pmid\" per line")->required()->check(CLI::ExistingFile);
    enrich_cmd->add_option("--out", o.out, "Output citation records (JSONL)")->required();
    enrich_cmd->add_option("--rate", o.rate, "Requests per second per service")->check(CLI::PositiveNumber)->capture_default_str();
    enrich_cmd->add_flag("--top-decile", o.top_decile, "Keep only the top 10% most cited");
    enrich_cmd->add_flag("--decile-global", o.decile_global, "Compute the decile over all topics together");
    enrich_cmd->add_option("--fetched-at", o.retrieved_at, "Date recorded on records (default: today)");

    auto* featurize = app.add_subcommand("featurize", "Fit a vectorizer on a manifest");
    featurize->add_option("--in", o.in, "Input manifest")->required()->check(CLI::ExistingFile);
    featurize->add_option("--out", o.out, "Vectorizer artifact")->required();
    featurize->add_option("--max-features", o.max_features)->check(CLI::PositiveNumber)->capture_default_str();
    featurize->add_option("--characterize", o.k, "Print the top-k pooled class terms");
    featurize->add_option("--markdown", o.markdown, "Write the characterization here instead of stdout");

    auto* train = app.add_subcommand("train", "Split a manifest and train a classifier");
    train->add_option("--in", o.in, "Input manifest")->required()->check(CLI::ExistingFile);
    train->add_option("--out", o.out, "Model artifact")->required();
    train->add_option("--ratio", o.ratio, "Training fraction")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    train->add_option("--strat", o.strat, "class or class-topic")->check(CLI::IsMember({"class", "class-topic"}))->capture_default_str();
    train->add_option("--max-features", o.max_features)->check(CLI::PositiveNumber)->capture_default_str();
    train->add_option("--C", o.C, "Regularization strength")->check(CLI::PositiveNumber)->capture_default_str();
    train->add_option("--n-trees", o.n_trees)->check(CLI::PositiveNumber)->capture_default_str();
    train->add_option("--n-stages", o.n_stages)->check(CLI::PositiveNumber)->capture_default_str();
    train->add_option("--calibration-folds", o.calibration_folds)->check(CLI::Range(2, 100))->capture_default_str();
    train->add_flag("--no-calibrate", o.no_calibrate, "Skip sigmoid calibration");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a model on its held-out documents");
    evaluate_cmd->add_option("--artifact", o.in, "Model artifact")->required()->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--manifest", o.test, "Manifest holding the test documents")->required()->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--out", o.out, "Metrics report (JSON)")->required();
    evaluate_cmd->add_option("--markdown", o.markdown, "Also write a markdown report");
    evaluate_cmd->add_option("--heldout-topics", o.heldout, "Report these topics separately as unseen")->delimiter(',');

    auto* classify = app.add_subcommand("classify", "Print per-class scores for text files as JSON lines");
    classify->add_option("--artifact", o.in, "Model artifact")->required()->check(CLI::ExistingFile);
    classify->add_option("files", o.inputs, "Text files")->required()->check(CLI::ExistingFile);

    auto* explain = app.add_subcommand("explain", "Rank the terms a model relies on");
    explain->add_option("--artifact", o.in, "Model artifact")->required()->check(CLI::ExistingFile);
    explain->add_option("--k", o.k, "Terms to report (default 100)");
    explain->add_option("--out", o.out, "Rankings (JSON)")->required();
    explain->add_option("--markdown", o.markdown, "Write the table here instead of stdout");

    auto* cluster = app.add_subcommand("cluster", "k-means over document embeddings");
    cluster->add_option("--embeddings", o.embeddings, "JSONL {id, vector}")->required()->check(CLI::ExistingFile);
    cluster->add_option("--k", o.k, "Number of clusters (default 4)");
    cluster->add_option("--n-init", o.n_init, "Restarts")->check(CLI::PositiveNumber)->capture_default_str();
    cluster->add_option("--manifest", o.in, "Labels for cluster-class metrics")->check(CLI::ExistingFile);
    cluster->add_option("--out", o.out, "Clustering (JSON); metrics go to <out>.metrics.json")->required();
    cluster->add_option("--markdown", o.markdown, "Also write a markdown report");

    auto* synth = app.add_subcommand("synth", "Generate the synthetic four-styles corpus");
    synth->add_option("--out", o.out, "Output manifest")->required();
    synth->add_option("--per-cell", o.docs_per_cell, "Documents per (topic, class)")->check(CLI::PositiveNumber)->capture_default_str();
    synth->add_flag("--heldout", o.synth_heldout, "Use the held-out topics instead of the standard ones");

    try {
        app.parse(argc, argv);
        apply_config(app, o);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*ingest) return run_ingest(o);
        if (*clean) return run_clean(o);
        if (*balance) return run_balance(o);
        if (*enrich_cmd) return run_enrich(o);
        if (*featurize) return run_featurize(o);
        if (*train) return run_train(o);
        if (*evaluate_cmd) return run_evaluate(o);
        if (*classify) return run_classify(o);
        if (*explain) return run_explain(o);
        if (*cluster) return run_cluster(o);
        if (*synth) return run_synth(o);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n" << app.help();
        return 1;
    } catch (const ServiceError& e) {
        std::cerr << "service error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
