#include "fsols/calibration.hpp"
#include "fsols/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fsols;

namespace {

// Noisy 4-class Gaussian data in 6 dimensions.
void gaussian(std::size_t n, double spread, Rng& rng, SparseMatrix& X, std::vector<ClassLabel>& y) {
    Eigen::MatrixXd D(static_cast<Eigen::Index>(n), 6);
    y.clear();
    for (std::size_t i = 0; i < n; ++i) {
        const int c = static_cast<int>(i % 4);
        for (int j = 0; j < 6; ++j) D(static_cast<Eigen::Index>(i), j) = spread * rng.normal() + (j == c ? 1.0 : 0.0);
        y.push_back(label_from_code(c));
    }
    X = D.sparseView();
}

BaseModel svm(const SparseMatrix& X, std::span<const ClassLabel> y) { return train_linear_svm(X, y); }

double brier(const Eigen::MatrixXd& P, const std::vector<ClassLabel>& classes, const std::vector<ClassLabel>& y) {
    double s = 0;
    for (Eigen::Index i = 0; i < P.rows(); ++i)
        for (Eigen::Index j = 0; j < P.cols(); ++j) {
            const double t = y[static_cast<std::size_t>(i)] == classes[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
            s += (P(i, j) - t) * (P(i, j) - t);
        }
    return s / static_cast<double>(P.rows());
}

}  // namespace

TEST(Sigmoid, EvaluatesStablyOnBothSides) {
    Sigmoid<double> s{-2.0, 0.5};
    EXPECT_NEAR(s(0.0), 1.0 / (1.0 + std::exp(0.5)), 1e-15);
    EXPECT_EQ(s(1e6), 1.0);
    EXPECT_EQ(s(-1e6), 0.0);
    Sigmoid<float> f{-1.0f, 0.0f};
    EXPECT_FLOAT_EQ(f(0.0f), 0.5f);
}

TEST(Sigmoid, WellOrderedScoresGiveNegativeSlope) {
    Rng rng(1);
    std::vector<double> s;
    std::vector<bool> pos;
    for (int i = 0; i < 200; ++i) {
        const bool p = i % 2 == 0;
        s.push_back((p ? 1.0 : -1.0) + rng.normal());
        pos.push_back(p);
    }
    const auto fit = fit_sigmoid(s, pos);
    EXPECT_LT(fit.a, 0.0);
    // Monotone: higher score, higher probability.
    for (double v = -3; v < 3; v += 0.1) EXPECT_LT(fit(v), fit(v + 0.1));
}

TEST(Sigmoid, MatchesMaximumLikelihoodConditions) {
    // At the optimum the gradient of the smoothed log-loss vanishes:
    // sum (t_i - p_i) = 0 and sum (t_i - p_i) s_i = 0.
    Rng rng(2);
    std::vector<double> s;
    std::vector<bool> pos;
    std::size_t np = 0;
    for (int i = 0; i < 150; ++i) {
        const bool p = rng.uniform() < 0.4;
        s.push_back((p ? 0.8 : -0.5) + 0.9 * rng.normal());
        pos.push_back(p);
        np += p;
    }
    const auto fit = fit_sigmoid(s, pos);
    const double nn = static_cast<double>(s.size() - np);
    const double hi = (static_cast<double>(np) + 1) / (static_cast<double>(np) + 2), lo = 1 / (nn + 2);
    double g0 = 0, g1 = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = (pos[i] ? hi : lo) - fit(s[i]);
        g0 += r;
        g1 += r * s[i];
    }
    EXPECT_NEAR(g0, 0.0, 1e-6);
    EXPECT_NEAR(g1, 0.0, 1e-6);
}

TEST(Folds, StratifiedAndValidated) {
    std::vector<ClassLabel> y;
    for (int i = 0; i < 40; ++i) y.push_back(label_from_code(i % 4));
    const auto f = stratified_folds(y, 5, 3);
    std::array<std::array<int, 5>, 4> per{};
    for (std::size_t i = 0; i < y.size(); ++i) ++per[static_cast<std::size_t>(code(y[i]))][static_cast<std::size_t>(f[i])];
    for (const auto& row : per)
        for (const int v : row) EXPECT_EQ(v, 2);
    EXPECT_EQ(stratified_folds(y, 5, 3), f);
    const std::vector<ClassLabel> few = {ClassLabel::Scientific, ClassLabel::Scientific, ClassLabel::Vernacular};
    EXPECT_THROW(stratified_folds(few, 2, 0), std::invalid_argument);
}

TEST(Calibrated, MonotoneInEachFoldsRawScore) {
    Rng rng(3);
    SparseMatrix X;
    std::vector<ClassLabel> y;
    gaussian(200, 0.6, rng, X, y);
    const auto cal = calibrate_sigmoid(svm, X, y, 5, 1);
    ASSERT_EQ(cal.folds.size(), 5u);
    for (const auto& fold : cal.folds) {
        const Eigen::MatrixXd raw = decision_scores(fold.base, X);
        for (std::size_t c = 0; c < cal.classes.size(); ++c) {
            const auto& sg = fold.sigmoids[c];
            EXPECT_LT(sg.a, 0.0);
            for (Eigen::Index i = 0; i < raw.rows(); ++i)
                for (Eigen::Index j = 0; j < raw.rows(); ++j)
                    if (raw(i, static_cast<Eigen::Index>(c)) < raw(j, static_cast<Eigen::Index>(c))) {
                        ASSERT_LE(sg(raw(i, static_cast<Eigen::Index>(c))), sg(raw(j, static_cast<Eigen::Index>(c))));
                    }
        }
    }
}

TEST(Calibrated, SeparatedDataIsConfidentOnHeldOutPoints) {
    Rng rng(4);
    SparseMatrix X, Xt;
    std::vector<ClassLabel> y, yt;
    gaussian(400, 0.05, rng, X, y);
    gaussian(100, 0.05, rng, Xt, yt);
    const auto cal = calibrate_sigmoid(svm, X, y, 5, 2);
    const Eigen::MatrixXd P = cal.predict(Xt);
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        const auto truth = static_cast<Eigen::Index>(code(yt[static_cast<std::size_t>(i)]));
        // Platt's smoothed targets cap each one-vs-rest fit near (n+1)/(n+2).
        Eigen::Index best;
        P.row(i).maxCoeff(&best);
        EXPECT_EQ(best, truth);
        EXPECT_GE(P(i, truth), 0.9);
    }
}

TEST(Calibrated, ImprovesBrierOverSquashedRawScores) {
    Rng rng(5);
    SparseMatrix X, Xt;
    std::vector<ClassLabel> y, yt;
    gaussian(400, 0.5, rng, X, y);
    gaussian(400, 0.5, rng, Xt, yt);
    const auto cal = calibrate_sigmoid(svm, X, y, 5, 3);
    const BaseModel base = train_linear_svm(X, y);
    const double calibrated = brier(cal.predict(Xt), cal.classes, yt);
    const double squashed = brier(squash_raw_scores(base, Xt), model_classes(base), yt);
    EXPECT_LE(calibrated, 0.9 * squashed) << calibrated << " vs " << squashed;
}

TEST(Scores, IndependentPerClassWithAbstain) {
    const std::vector<ClassLabel> classes = {ClassLabel::Scientific, ClassLabel::Vernacular};
    Eigen::RowVectorXd row(2);
    row << 0.9, 0.8;
    const auto s = make_scores(classes, row, 0.5);
    EXPECT_EQ(s[ClassLabel::Scientific], 0.9);
    EXPECT_EQ(s[ClassLabel::Vernacular], 0.8);
    EXPECT_EQ(s[ClassLabel::Disinformative], 0.0);  // never seen
    EXPECT_GT(s.scores[0] + s.scores[1] + s.scores[2] + s.scores[3], 1.0);
    EXPECT_EQ(s.argmax, ClassLabel::Scientific);
    EXPECT_FALSE(s.abstain);
    row << 0.3, 0.3;
    const auto tie = make_scores(classes, row, 0.5);
    EXPECT_EQ(tie.argmax, ClassLabel::Scientific);
    EXPECT_TRUE(tie.abstain);
}

TEST(Scores, SharedMonotoneRecalibrationKeepsArgmax) {
    Rng rng(6);
    SparseMatrix X;
    std::vector<ClassLabel> y;
    gaussian(80, 0.7, rng, X, y);
    const BaseModel base = train_linear_svm(X, y);
    const Eigen::MatrixXd raw = decision_scores(base, X);
    const Sigmoid<double> shared{-1.7, 0.3};
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        Eigen::RowVectorXd cal = raw.row(i).unaryExpr([&](double v) { return shared(v); });
        Eigen::Index a, b;
        raw.row(i).maxCoeff(&a);
        cal.maxCoeff(&b);
        EXPECT_EQ(a, b);
    }
}

TEST(Scores, ZeroVectorAndDimensionCheck) {
    Rng rng(7);
    SparseMatrix X;
    std::vector<ClassLabel> y;
    gaussian(80, 0.7, rng, X, y);
    const auto cal = calibrate_sigmoid(svm, X, y, 4, 0);
    DocVector zero(6);
    const auto s = predict_scores(cal, zero);
    for (const double v : s.scores) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    DocVector wrong(5);
    EXPECT_THROW(predict_scores(cal, wrong), std::invalid_argument);
}
