#include "fsols/linear.hpp"

#include "fsols/random.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>

namespace fsols {

std::vector<ClassLabel> training_classes(const SparseMatrix& X, std::span<const ClassLabel> y) {
    if (static_cast<std::size_t>(X.rows()) != y.size())
        throw std::invalid_argument("X has " + std::to_string(X.rows()) + " rows but y has " +
                                    std::to_string(y.size()) + " labels");
    std::set<int> codes;
    for (const auto label : y) codes.insert(code(label));
    if (codes.size() < 2) throw std::invalid_argument("training requires at least two classes");
    std::vector<ClassLabel> out;
    for (const int c : codes) out.push_back(static_cast<ClassLabel>(c));
    return out;
}

Eigen::MatrixXd LinearModel::decision(const SparseMatrix& X) const {
    if (X.cols() != weights.cols())
        throw std::invalid_argument("dimension mismatch: model has " + std::to_string(weights.cols()) +
                                    " features, input has " + std::to_string(X.cols()));
    Eigen::MatrixXd out = X * weights.transpose();
    out.rowwise() += bias.transpose();
    return out;
}

Eigen::VectorXd LinearModel::decision(const DocVector& x) const {
    if (x.size() != weights.cols())
        throw std::invalid_argument("dimension mismatch: model has " + std::to_string(weights.cols()) +
                                    " features, input has " + std::to_string(x.size()));
    Eigen::VectorXd out = bias;
    for (DocVector::InnerIterator it(x); it; ++it) out += weights.col(it.index()) * it.value();
    return out;
}

namespace {

struct BinarySvm {
    Eigen::VectorXd w;
    double b = 0.0;
    std::vector<double> history;
    bool converged = false;
};

BinarySvm solve_binary_svm(const SparseMatrix& X, const std::vector<double>& sign, const SvmOptions& opts,
                           Rng& rng) {
    const Eigen::Index n = X.rows();
    const double diag = 1.0 / (2.0 * opts.C);
    const double bias_sq = opts.bias_scaling * opts.bias_scaling;

    Eigen::VectorXd qii(n);
    for (Eigen::Index i = 0; i < n; ++i) qii[i] = X.row(i).squaredNorm() + bias_sq + diag;

    BinarySvm result;
    result.w = Eigen::VectorXd::Zero(X.cols());
    double wb = 0.0;  // weight of the constant bias feature
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    double objective = 0.0;  // dual objective at alpha = 0
    for (int epoch = 0; epoch < opts.max_epochs; ++epoch) {
        rng.shuffle(std::span(order));
        const double before = objective;
        for (const Eigen::Index i : order) {
            const double yi = sign[static_cast<std::size_t>(i)];
            double margin = wb * opts.bias_scaling;
            for (SparseMatrix::InnerIterator it(X, i); it; ++it) margin += result.w[it.index()] * it.value();
            const double g = yi * margin - 1.0 + diag * alpha[i];
            const double projected = alpha[i] > 0.0 ? g : std::min(g, 0.0);
            if (projected == 0.0) continue;
            const double updated = std::max(alpha[i] - g / qii[i], 0.0);
            const double delta = updated - alpha[i];
            if (delta == 0.0) continue;
            alpha[i] = updated;
            for (SparseMatrix::InnerIterator it(X, i); it; ++it) result.w[it.index()] += delta * yi * it.value();
            wb += delta * yi * opts.bias_scaling;
            objective += delta * g + 0.5 * qii[i] * delta * delta;
        }
        result.history.push_back(objective);
        if (before - objective < opts.tol) {
            result.converged = true;
            break;
        }
    }
    result.b = wb * opts.bias_scaling;
    return result;
}

}  // namespace

LinearModel train_linear_svm(const SparseMatrix& X, std::span<const ClassLabel> y, const SvmOptions& opts) {
    if (!(opts.C > 0.0)) throw std::invalid_argument("C must be > 0");
    LinearModel model;
    model.classes = training_classes(X, y);
    model.loss = LinearLoss::SquaredHinge;
    model.C = opts.C;
    const auto k = static_cast<Eigen::Index>(model.classes.size());
    model.weights = Eigen::MatrixXd::Zero(k, X.cols());
    model.bias = Eigen::VectorXd::Zero(k);
    model.converged = true;

    Rng rng(opts.seed);
    std::vector<double> sign(y.size());
    for (Eigen::Index c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < y.size(); ++i) sign[i] = y[i] == model.classes[c] ? 1.0 : -1.0;
        BinarySvm fit = solve_binary_svm(X, sign, opts, rng);
        model.weights.row(c) = fit.w.transpose();
        model.bias[c] = fit.b;
        model.objective_history.push_back(std::move(fit.history));
        model.converged = model.converged && fit.converged;
    }
    return model;
}

double logreg_objective(const SparseMatrix& X, std::span<const int> class_index, const Eigen::MatrixXd& params,
                        double C, Eigen::MatrixXd* gradient) {
    const Eigen::Index d = X.cols();
    const auto W = params.leftCols(d);
    const auto b = params.col(d);
    Eigen::MatrixXd logits = X * W.transpose();  // n x k
    logits.rowwise() += b.transpose();

    double loss = 0.0;
    Eigen::MatrixXd residual(logits.rows(), logits.cols());  // softmax - onehot
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double mx = logits.row(i).maxCoeff();
        const Eigen::RowVectorXd e = (logits.row(i).array() - mx).exp().matrix();
        const double z = e.sum();
        const int yi = class_index[static_cast<std::size_t>(i)];
        loss += std::log(z) + mx - logits(i, yi);
        residual.row(i) = e / z;
        residual(i, yi) -= 1.0;
    }
    const double objective = C * loss + 0.5 * W.squaredNorm();
    if (gradient) {
        gradient->resize(params.rows(), params.cols());
        gradient->leftCols(d) = C * (residual.transpose() * X) + W;
        gradient->col(d) = C * residual.colwise().sum().transpose();
    }
    return objective;
}

LinearModel train_logreg(const SparseMatrix& X, std::span<const ClassLabel> y, const LogRegOptions& opts) {
    if (!(opts.C > 0.0)) throw std::invalid_argument("C must be > 0");
    LinearModel model;
    model.classes = training_classes(X, y);
    model.loss = LinearLoss::Logistic;
    model.C = opts.C;
    const auto k = static_cast<Eigen::Index>(model.classes.size());
    const Eigen::Index d = X.cols();

    std::vector<int> class_index(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        class_index[i] = static_cast<int>(std::find(model.classes.begin(), model.classes.end(), y[i]) -
                                          model.classes.begin());

    Eigen::MatrixXd params = Eigen::MatrixXd::Zero(k, d + 1);
    Eigen::MatrixXd grad;
    double f = logreg_objective(X, class_index, params, opts.C, &grad);
    std::vector<double> history{f};

    std::deque<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> memory;  // (s, y) pairs
    bool converged = grad.cwiseAbs().maxCoeff() < opts.gradient_tol;
    for (int iter = 0; iter < opts.max_iter && !converged; ++iter) {
        // Two-loop recursion for the search direction.
        Eigen::MatrixXd q = grad;
        std::vector<double> a(memory.size());
        for (std::size_t j = memory.size(); j-- > 0;) {
            const auto& [s, yv] = memory[j];
            const double rho = 1.0 / yv.cwiseProduct(s).sum();
            a[j] = rho * s.cwiseProduct(q).sum();
            q -= a[j] * yv;
        }
        if (!memory.empty()) {
            const auto& [s, yv] = memory.back();
            q *= s.cwiseProduct(yv).sum() / yv.squaredNorm();
        } else {
            q /= std::max(1.0, grad.norm());
        }
        for (std::size_t j = 0; j < memory.size(); ++j) {
            const auto& [s, yv] = memory[j];
            const double rho = 1.0 / yv.cwiseProduct(s).sum();
            const double beta = rho * yv.cwiseProduct(q).sum();
            q += (a[j] - beta) * s;
        }
        Eigen::MatrixXd direction = -q;
        double slope = grad.cwiseProduct(direction).sum();
        if (slope >= 0.0) {  // not a descent direction; restart from steepest descent
            memory.clear();
            direction = -grad / std::max(1.0, grad.norm());
            slope = grad.cwiseProduct(direction).sum();
        }

        double step = 1.0;
        Eigen::MatrixXd next_grad;
        Eigen::MatrixXd next = params + step * direction;
        double next_f = logreg_objective(X, class_index, next, opts.C, &next_grad);
        int backtracks = 0;
        while (!(next_f <= f + 1e-4 * step * slope) && backtracks < 50) {
            step *= 0.5;
            next = params + step * direction;
            next_f = logreg_objective(X, class_index, next, opts.C, &next_grad);
            ++backtracks;
        }
        if (!(next_f <= f + 1e-4 * step * slope)) break;  // no further progress at double precision

        Eigen::MatrixXd s = next - params;
        Eigen::MatrixXd yv = next_grad - grad;
        if (s.cwiseProduct(yv).sum() > 1e-12) {
            memory.emplace_back(std::move(s), std::move(yv));
            if (static_cast<int>(memory.size()) > opts.memory) memory.pop_front();
        }
        params = std::move(next);
        grad = std::move(next_grad);
        f = next_f;
        history.push_back(f);
        converged = grad.cwiseAbs().maxCoeff() < opts.gradient_tol;
    }

    model.weights = params.leftCols(d);
    model.bias = params.col(d);
    model.objective_history.push_back(std::move(history));
    model.converged = converged;
    return model;
}

}  // namespace fsols
