#include "fsols/calibration.hpp"

#include "fsols/random.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace fsols {

namespace {

// Negative log-likelihood of the smoothed targets; evaluated stably on both sides of zero.
double sigmoid_nll(std::span<const double> s, std::span<const double> t, double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double z = a * s[i] + b;
        f += z >= 0.0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
}

}  // namespace

Sigmoid<double> fit_sigmoid(std::span<const double> scores, const std::vector<bool>& positive) {
    if (scores.size() != positive.size()) throw std::invalid_argument("fit_sigmoid: size mismatch");
    if (scores.empty()) throw std::invalid_argument("fit_sigmoid: no scores");
    double n_pos = 0.0, n_neg = 0.0;
    for (const bool p : positive) (p ? n_pos : n_neg) += 1.0;
    const double hi = (n_pos + 1.0) / (n_pos + 2.0);
    const double lo = 1.0 / (n_neg + 2.0);
    std::vector<double> t(scores.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = positive[i] ? hi : lo;

    double a = 0.0;
    double b = std::log((n_neg + 1.0) / (n_pos + 1.0));
    double f = sigmoid_nll(scores, t, a, b);
    for (int iter = 0; iter < 100; ++iter) {
        double h11 = 1e-12, h22 = 1e-12, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const double z = a * scores[i] + b;
            double p, q;  // p = 1/(1+e^z), q = 1 - p
            if (z >= 0.0) {
                const double e = std::exp(-z);
                p = e / (1.0 + e);
                q = 1.0 / (1.0 + e);
            } else {
                const double e = std::exp(z);
                p = 1.0 / (1.0 + e);
                q = e / (1.0 + e);
            }
            const double d2 = p * q;
            h11 += scores[i] * scores[i] * d2;
            h22 += d2;
            h21 += scores[i] * d2;
            const double d1 = t[i] - p;
            g1 += scores[i] * d1;
            g2 += d1;
        }
        if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * da + g2 * db;

        double step = 1.0;
        bool moved = false;
        while (step >= 1e-10) {
            const double na = a + step * da;
            const double nb = b + step * db;
            const double nf = sigmoid_nll(scores, t, na, nb);
            if (nf < f + 1e-4 * step * gd) {
                a = na;
                b = nb;
                f = nf;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return {a, b};
}

const std::vector<ClassLabel>& model_classes(const BaseModel& model) {
    return std::visit([](const auto& m) -> const std::vector<ClassLabel>& { return m.classes; }, model);
}

Eigen::Index model_features(const BaseModel& model) {
    return std::visit(
        [](const auto& m) -> Eigen::Index {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearModel>) return m.n_features();
            else return m.n_features;
        },
        model);
}

Eigen::MatrixXd decision_scores(const BaseModel& model, const SparseMatrix& X) {
    return std::visit(
        [&](const auto& m) -> Eigen::MatrixXd {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearModel>) return m.decision(X);
            else if constexpr (std::is_same_v<T, ForestModel>) return m.predict_proba(X);
            else return m.decision(X);
        },
        model);
}

Eigen::MatrixXd CalibratedModel::predict(const SparseMatrix& X) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(X.rows(), static_cast<Eigen::Index>(classes.size()));
    for (const auto& fold : folds) {
        const Eigen::MatrixXd raw = decision_scores(fold.base, X);
        const auto& fold_classes = model_classes(fold.base);
        for (std::size_t j = 0; j < fold_classes.size(); ++j) {
            const auto col = std::find(classes.begin(), classes.end(), fold_classes[j]) - classes.begin();
            for (Eigen::Index r = 0; r < X.rows(); ++r)
                out(r, col) += fold.sigmoids[j](raw(r, static_cast<Eigen::Index>(j)));
        }
    }
    return out / static_cast<double>(folds.size());
}

std::vector<int> stratified_folds(std::span<const ClassLabel> y, int folds, std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("calibration needs at least 2 folds");
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < y.size(); ++i) members[code(y[i])].push_back(i);
    Rng rng(seed);
    std::vector<int> fold(y.size(), -1);
    for (auto& [label, idx] : members) {
        if (idx.size() < static_cast<std::size_t>(folds))
            throw std::invalid_argument("class " + std::string(label_name(static_cast<ClassLabel>(label))) + " has " +
                                        std::to_string(idx.size()) + " samples, fewer than " + std::to_string(folds) +
                                        " folds; it would be absent from some fold");
        rng.shuffle(std::span(idx));
        for (std::size_t j = 0; j < idx.size(); ++j) fold[idx[j]] = static_cast<int>(j % static_cast<std::size_t>(folds));
    }
    return fold;
}

namespace {

SparseMatrix select_rows(const SparseMatrix& X, const std::vector<std::size_t>& rows) {
    SparseMatrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
    std::vector<Eigen::Triplet<double>> t;
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (SparseMatrix::InnerIterator it(X, static_cast<Eigen::Index>(rows[r])); it; ++it)
            t.emplace_back(static_cast<int>(r), static_cast<int>(it.index()), it.value());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

}  // namespace

CalibratedModel calibrate_sigmoid(const BaseTrainer& trainer, const SparseMatrix& X, std::span<const ClassLabel> y,
                                  int folds, std::uint64_t seed) {
    CalibratedModel model;
    model.classes = training_classes(X, y);
    const std::vector<int> assignment = stratified_folds(y, folds, seed);

    for (int f = 0; f < folds; ++f) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < y.size(); ++i) (assignment[i] == f ? test_rows : train_rows).push_back(i);
        std::vector<ClassLabel> train_y, test_y;
        for (const auto i : train_rows) train_y.push_back(y[i]);
        for (const auto i : test_rows) test_y.push_back(y[i]);

        CalibratedFold fold{trainer(select_rows(X, train_rows), train_y), {}};
        const Eigen::MatrixXd raw = decision_scores(fold.base, select_rows(X, test_rows));
        const auto& classes = model_classes(fold.base);
        for (std::size_t j = 0; j < classes.size(); ++j) {
            std::vector<double> s(test_rows.size());
            std::vector<bool> positive(test_rows.size());
            for (std::size_t r = 0; r < test_rows.size(); ++r) {
                s[r] = raw(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
                positive[r] = test_y[r] == classes[j];
            }
            fold.sigmoids.push_back(fit_sigmoid(s, positive));
        }
        model.folds.push_back(std::move(fold));
    }
    return model;
}

ClassScores make_scores(std::span<const ClassLabel> classes, const Eigen::Ref<const Eigen::RowVectorXd>& row,
                        double threshold) {
    ClassScores out;
    for (std::size_t j = 0; j < classes.size(); ++j)
        out.scores[static_cast<std::size_t>(code(classes[j]))] = row[static_cast<Eigen::Index>(j)];
    int best = 0;
    for (int c = 1; c < kNumClasses; ++c)
        if (out.scores[static_cast<std::size_t>(c)] > out.scores[static_cast<std::size_t>(best)]) best = c;
    out.argmax = static_cast<ClassLabel>(best);
    out.abstain = out.scores[static_cast<std::size_t>(best)] < threshold;
    return out;
}

ClassScores predict_scores(const CalibratedModel& model, const DocVector& x, double threshold) {
    if (!model.folds.empty() && x.size() != model_features(model.folds.front().base))
        throw std::invalid_argument("dimension mismatch: model has " +
                                    std::to_string(model_features(model.folds.front().base)) +
                                    " features, input has " + std::to_string(x.size()));
    SparseMatrix X(1, x.size());
    for (DocVector::InnerIterator it(x); it; ++it) X.insert(0, it.index()) = it.value();
    X.makeCompressed();
    const Eigen::MatrixXd row = model.predict(X);
    return make_scores(model.classes, row.row(0), threshold);
}

Eigen::MatrixXd squash_raw_scores(const BaseModel& model, const SparseMatrix& X) {
    const Eigen::MatrixXd raw = decision_scores(model, X);
    return (1.0 + (-raw.array()).exp()).inverse().matrix();
}

}  // namespace fsols
