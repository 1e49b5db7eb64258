#include "fsols/classifier.hpp"

#include "fsols/error.hpp"
#include "fsols/text.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace fsols {

using nlohmann::json;

std::string_view model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Svc: return "svc";
        case ModelKind::LogReg: return "logreg";
        case ModelKind::RandomForest: return "rf";
        case ModelKind::AdaBoost: return "adaboost";
    }
    return "svc";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "svc" || name == "svm") return ModelKind::Svc;
    if (name == "logreg" || name == "lr") return ModelKind::LogReg;
    if (name == "rf" || name == "forest") return ModelKind::RandomForest;
    if (name == "adaboost" || name == "ada") return ModelKind::AdaBoost;
    throw std::invalid_argument("unknown model '" + std::string(name) + "' (expected svc, logreg, rf or adaboost)");
}

BaseModel train_base(const TrainConfig& config, const SparseMatrix& X, std::span<const ClassLabel> y) {
    switch (config.model) {
        case ModelKind::Svc: {
            SvmOptions o;
            o.C = config.C;
            o.seed = config.seed;
            return train_linear_svm(X, y, o);
        }
        case ModelKind::LogReg: {
            LogRegOptions o;
            o.C = config.C;
            return train_logreg(X, y, o);
        }
        case ModelKind::RandomForest: {
            ForestOptions o;
            o.n_trees = config.n_trees;
            o.seed = config.seed;
            return train_random_forest(X, y, o);
        }
        case ModelKind::AdaBoost: {
            BoostOptions o;
            o.n_stages = config.n_stages;
            o.seed = config.seed;
            return train_adaboost(X, y, o);
        }
    }
    throw std::invalid_argument("unknown model kind");
}

Eigen::MatrixXd TextClassifier::score_matrix(std::span<const std::string> texts) const {
    const SparseMatrix X = vectorizer.transform(texts);
    Eigen::MatrixXd raw;
    std::span<const ClassLabel> classes;
    if (calibrated) {
        raw = calibrated->predict(X);
        classes = calibrated->classes;
    } else {
        raw = std::holds_alternative<LinearModel>(base) ? squash_raw_scores(base, X) : decision_scores(base, X);
        classes = model_classes(base);
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(X.rows(), kNumClasses);
    for (std::size_t j = 0; j < classes.size(); ++j) out.col(code(classes[j])) = raw.col(static_cast<Eigen::Index>(j));
    return out;
}

ClassScores TextClassifier::score(std::string_view text, double threshold) const {
    const std::string s(text);
    const Eigen::MatrixXd m = score_matrix(std::span<const std::string>(&s, 1));
    return make_scores(kAllLabels, m.row(0), threshold);
}

std::vector<ClassLabel> TextClassifier::predict(std::span<const std::string> texts) const {
    const Eigen::MatrixXd m = score_matrix(texts);
    std::vector<ClassLabel> out;
    out.reserve(texts.size());
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(make_scores(kAllLabels, m.row(r), 0.0).argmax);
    return out;
}

TextClassifier train_classifier(std::span<const std::string> texts, std::span<const ClassLabel> labels,
                                const TrainConfig& config) {
    if (texts.size() != labels.size()) throw std::invalid_argument("texts and labels differ in length");
    TextClassifier model;
    model.config = config;
    model.vectorizer = fit_vectorizer(config.vectorizer, texts, config.max_features);
    const SparseMatrix X = model.vectorizer.transform(texts);
    model.base = train_base(config, X, labels);
    if (config.calibrate) {
        const BaseTrainer trainer = [&config](const SparseMatrix& Xf, std::span<const ClassLabel> yf) {
            return train_base(config, Xf, yf);
        };
        model.calibrated = calibrate_sigmoid(trainer, X, labels, config.calibration_folds, config.seed);
    }
    return model;
}

TextClassifier train_classifier(std::span<const Document> docs, const TrainConfig& config) {
    std::vector<std::string> texts;
    std::vector<ClassLabel> labels;
    for (const auto& d : docs) {
        texts.push_back(d.text());
        labels.push_back(d.label);
    }
    return train_classifier(texts, labels, config);
}

// ---- serialization ----

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (static_cast<Eigen::Index>(j[r].size()) != cols) throw DataError("model artifact: ragged weight matrix");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), c) = j[r][static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

json classes_json(const std::vector<ClassLabel>& classes) {
    json a = json::array();
    for (const auto c : classes) a.push_back(code(c));
    return a;
}

std::vector<ClassLabel> classes_from(const json& j) {
    std::vector<ClassLabel> out;
    for (const auto& c : j) out.push_back(label_from_code(c.get<int>()));
    return out;
}

json tree_json(const DecisionTree& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes)
        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.histogram});
    return nodes;
}

DecisionTree tree_from(const json& j) {
    DecisionTree t;
    for (const auto& n : j) {
        TreeNode node;
        node.feature = n.at(0).get<int>();
        node.threshold = n.at(1).get<double>();
        node.left = n.at(2).get<int>();
        node.right = n.at(3).get<int>();
        node.histogram = n.at(4).get<ClassHistogram>();
        t.nodes.push_back(node);
    }
    const auto size = static_cast<int>(t.nodes.size());
    for (const auto& n : t.nodes)
        if (!n.is_leaf() && (n.left <= 0 || n.left >= size || n.right <= 0 || n.right >= size))
            throw DataError("model artifact: tree child index out of range");
    return t;
}

json base_json(const BaseModel& model) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearModel>) {
                return {{"type", "linear"},
                        {"loss", m.loss == LinearLoss::SquaredHinge ? "squared_hinge" : "logistic"},
                        {"classes", classes_json(m.classes)},
                        {"C", m.C},
                        {"n_features", m.n_features()},
                        {"weights", matrix_json(m.weights)},
                        {"bias", std::vector<double>(m.bias.data(), m.bias.data() + m.bias.size())},
                        {"converged", m.converged}};
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                json trees = json::array();
                for (const auto& t : m.trees) trees.push_back(tree_json(t));
                return {{"type", "forest"},       {"classes", classes_json(m.classes)},
                        {"n_features", m.n_features}, {"max_features", m.max_features},
                        {"seed", m.seed},         {"tree_seeds", m.tree_seeds},
                        {"trees", std::move(trees)}};
            } else {
                json stages = json::array();
                for (const auto& s : m.stages) stages.push_back({{"weight", s.weight}, {"stump", tree_json(s.stump)}});
                return {{"type", "adaboost"},
                        {"classes", classes_json(m.classes)},
                        {"n_features", m.n_features},
                        {"stages", std::move(stages)}};
            }
        },
        model);
}

BaseModel base_from(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "linear") {
        LinearModel m;
        m.loss = j.at("loss").get<std::string>() == "logistic" ? LinearLoss::Logistic : LinearLoss::SquaredHinge;
        m.classes = classes_from(j.at("classes"));
        m.C = j.at("C").get<double>();
        m.weights = matrix_from(j.at("weights"), j.at("n_features").get<Eigen::Index>());
        const auto bias = j.at("bias").get<std::vector<double>>();
        m.bias = Eigen::Map<const Eigen::VectorXd>(bias.data(), static_cast<Eigen::Index>(bias.size()));
        m.converged = j.at("converged").get<bool>();
        if (m.weights.rows() != static_cast<Eigen::Index>(m.classes.size()) || m.bias.size() != m.weights.rows())
            throw DataError("model artifact: linear model shape does not match its classes");
        return m;
    }
    if (type == "forest") {
        ForestModel m;
        m.classes = classes_from(j.at("classes"));
        m.n_features = j.at("n_features").get<Eigen::Index>();
        m.max_features = j.at("max_features").get<std::size_t>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.tree_seeds = j.at("tree_seeds").get<std::vector<std::uint64_t>>();
        for (const auto& t : j.at("trees")) m.trees.push_back(tree_from(t));
        return m;
    }
    if (type == "adaboost") {
        BoostModel m;
        m.classes = classes_from(j.at("classes"));
        m.n_features = j.at("n_features").get<Eigen::Index>();
        for (const auto& s : j.at("stages")) m.stages.push_back({tree_from(s.at("stump")), s.at("weight").get<double>()});
        return m;
    }
    throw DataError("model artifact: unknown model type '" + type + "'");
}

json config_json(const TrainConfig& c) {
    return {{"model", model_kind_name(c.model)},
            {"vectorizer", weighting_name(c.vectorizer)},
            {"max_features", c.max_features},
            {"C", c.C},
            {"n_trees", c.n_trees},
            {"n_stages", c.n_stages},
            {"calibration_folds", c.calibration_folds},
            {"calibrate", c.calibrate},
            {"seed", c.seed}};
}

TrainConfig config_from(const json& j) {
    TrainConfig c;
    c.model = parse_model_kind(j.at("model").get<std::string>());
    c.vectorizer = parse_weighting(j.at("vectorizer").get<std::string>());
    c.max_features = j.at("max_features").get<std::size_t>();
    c.C = j.at("C").get<double>();
    c.n_trees = j.at("n_trees").get<std::size_t>();
    c.n_stages = j.at("n_stages").get<std::size_t>();
    c.calibration_folds = j.at("calibration_folds").get<int>();
    c.calibrate = j.at("calibrate").get<bool>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

}  // namespace

static json vectorizer_json(const Vectorizer& v) {
    return {{"weighting", weighting_name(v.weighting)},
            {"max_features", v.vocabulary.max_features},
            {"n_docs", v.n_docs},
            {"terms", v.vocabulary.terms},
            {"document_frequency", v.vocabulary.document_frequency},
            {"idf", std::vector<double>(v.idf.data(), v.idf.data() + v.idf.size())},
            {"vocabulary_hash", text::hex64(v.vocabulary.hash())}};
}

static Vectorizer vectorizer_from(const json& j) {
    Vectorizer v;
    v.weighting = parse_weighting(j.at("weighting").get<std::string>());
    v.vocabulary.max_features = j.at("max_features").get<std::size_t>();
    v.n_docs = j.at("n_docs").get<std::size_t>();
    v.vocabulary.terms = j.at("terms").get<std::vector<std::string>>();
    v.vocabulary.document_frequency = j.at("document_frequency").get<std::vector<std::size_t>>();
    const auto idf = j.at("idf").get<std::vector<double>>();
    v.idf = Eigen::Map<const Eigen::VectorXd>(idf.data(), static_cast<Eigen::Index>(idf.size()));
    v.vocabulary.rebuild_index();
    if (v.vocabulary.document_frequency.size() != v.vocabulary.size() ||
        (v.weighting == Weighting::TfIdf && static_cast<std::size_t>(v.idf.size()) != v.vocabulary.size()))
        throw DataError("vectorizer artifact: vocabulary, document frequencies and idf differ in length");
    if (j.contains("vocabulary_hash") && j.at("vocabulary_hash").get<std::string>() != text::hex64(v.vocabulary.hash()))
        throw DataError("vectorizer artifact: vocabulary hash mismatch");
    return v;
}

void save_vectorizer(const Vectorizer& v, const std::filesystem::path& path) {
    json j = vectorizer_json(v);
    j["fsols_vectorizer"] = kModelFormatVersion;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write vectorizer artifact " + path.string());
    out << j.dump() << '\n';
}

Vectorizer load_vectorizer(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read vectorizer artifact " + path.string());
    try {
        const json j = json::parse(in);
        if (j.value("fsols_vectorizer", 0) != kModelFormatVersion)
            throw DataError("vectorizer artifact " + path.string() + ": unsupported format version");
        return vectorizer_from(j);
    } catch (const json::exception& e) {
        throw DataError("vectorizer artifact " + path.string() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError("vectorizer artifact " + path.string() + ": " + e.what());
    }
}

void save_classifier(const TextClassifier& model, const std::filesystem::path& path) {
    json j;
    j["fsols_model"] = kModelFormatVersion;
    j["vocabulary_hash"] = text::hex64(model.vectorizer.vocabulary.hash());
    j["config"] = config_json(model.config);
    j["vectorizer"] = vectorizer_json(model.vectorizer);
    j["base"] = base_json(model.base);
    if (model.calibrated) {
        json folds = json::array();
        for (const auto& f : model.calibrated->folds) {
            json sig = json::array();
            for (const auto& s : f.sigmoids) sig.push_back({s.a, s.b});
            folds.push_back({{"base", base_json(f.base)}, {"sigmoids", std::move(sig)}});
        }
        j["calibrated"] = {{"classes", classes_json(model.calibrated->classes)}, {"folds", std::move(folds)}};
    } else {
        j["calibrated"] = nullptr;
    }
    j["test_ids"] = model.test_ids;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write model artifact " + path.string());
    out << j.dump() << '\n';
    if (!out) throw DataError("failed writing model artifact " + path.string());
}

TextClassifier load_classifier(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read model artifact " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("model artifact " + path.string() + " is not valid JSON: " + e.what());
    }
    try {
        if (!j.contains("fsols_model") || j.at("fsols_model").get<int>() != kModelFormatVersion)
            throw DataError("model artifact " + path.string() + ": unsupported format version");
        TextClassifier m;
        m.config = config_from(j.at("config"));
        m.vectorizer = vectorizer_from(j.at("vectorizer"));
        if (j.at("vocabulary_hash").get<std::string>() != text::hex64(m.vectorizer.vocabulary.hash()))
            throw DataError("model artifact: vocabulary hash mismatch");
        m.base = base_from(j.at("base"));
        if (!j.at("calibrated").is_null()) {
            CalibratedModel c;
            c.classes = classes_from(j.at("calibrated").at("classes"));
            for (const auto& f : j.at("calibrated").at("folds")) {
                CalibratedFold fold{base_from(f.at("base")), {}};
                for (const auto& s : f.at("sigmoids")) fold.sigmoids.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
                if (fold.sigmoids.size() != model_classes(fold.base).size())
                    throw DataError("model artifact: sigmoid count does not match fold classes");
                c.folds.push_back(std::move(fold));
            }
            m.calibrated = std::move(c);
        }
        const auto width = static_cast<Eigen::Index>(m.vectorizer.vocabulary.size());
        if (model_features(m.base) != width) throw DataError("model artifact: model and vocabulary sizes differ");
        m.test_ids = j.at("test_ids").get<std::vector<std::string>>();
        return m;
    } catch (const json::exception& e) {
        throw DataError("model artifact " + path.string() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError("model artifact " + path.string() + ": " + e.what());
    }
}

}  // namespace fsols
