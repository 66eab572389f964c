#include "baselines.hpp"

#include <algorithm>
#include <cmath>

namespace survkit {

double knn_score(const Matrix& train_X, const std::vector<int>& train_y, const double* query,
                 const KnnConfig& cfg) {
    const std::size_t n = train_X.rows(), p = train_X.cols();
    require(n > 0, ErrorCode::Validation, "knn_score: empty training set");
    require(train_y.size() == n, ErrorCode::Validation, "label count does not match rows");
    require(cfg.k >= 1, ErrorCode::Validation, "k must be at least 1");
    require(cfg.k <= n, ErrorCode::Validation, "k exceeds training rows");

    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = train_X.row_ptr(i);
        double d2 = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double diff = row[j] - query[j];
            d2 += diff * diff;
        }
        dist[i] = {d2, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(cfg.k),
                      dist.end());
    std::size_t positives = 0;
    for (std::size_t i = 0; i < cfg.k; ++i) {
        const int label = train_y[dist[i].second];
        require(label == 0 || label == 1, ErrorCode::Validation, "labels must be 0/1");
        positives += static_cast<std::size_t>(label);
    }
    return static_cast<double>(positives) / static_cast<double>(cfg.k);
}

KnnClassifier::KnnClassifier(Matrix train_X, std::vector<int> train_y, KnnConfig cfg)
    : train_X_(std::move(train_X)), train_y_(std::move(train_y)), cfg_(cfg) {
    require(cfg_.k >= 1 && cfg_.k <= train_X_.rows(), ErrorCode::Validation,
            "k outside [1, training rows]");
}

double KnnClassifier::score(const double* x, const std::uint8_t*, std::size_t n) const {
    require(n == train_X_.cols(), ErrorCode::Validation,
            "feature count does not match training data");
    return knn_score(train_X_, train_y_, x, cfg_);
}

double svm_objective(const Matrix& X, const std::vector<int>& y, const LinearModel& model,
                     double C) {
    double norm2 = 0.0;
    for (double w : model.weights) norm2 += w * w;
    double hinge = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double margin =
            static_cast<double>(y[i]) * model.decision(X.row_ptr(i), X.cols());
        hinge += std::max(0.0, 1.0 - margin);
    }
    return 0.5 * norm2 + C * hinge;
}

LinearModel fit_linear_svm(const Matrix& X, const std::vector<int>& y, const SvmConfig& cfg) {
    const std::size_t n = X.rows(), p = X.cols();
    require(n > 0 && p > 0, ErrorCode::Validation, "empty design matrix");
    require(y.size() == n, ErrorCode::Validation, "label count does not match rows");
    for (int v : y) {
        require(v == -1 || v == 1, ErrorCode::Validation, "SVM labels must be -1/+1");
    }
    require(cfg.C > 0.0, ErrorCode::Validation, "C must be positive");

    // Scaling by 1/(Cn) turns the objective into the standard Pegasos form
    // (lambda/2)||w||^2 + mean hinge, so eta_t = 1/(lambda t) needs no
    // separate learning rate.
    const double lambda = 1.0 / (cfg.C * static_cast<double>(n));
    std::vector<double> w(p, 0.0);
    double b = 0.0;
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const double* row = X.row_ptr(i);
            double z = b;
            for (std::size_t j = 0; j < p; ++j) z += w[j] * row[j];
            const double yi = static_cast<double>(y[i]);
            const double shrink = 1.0 - eta * lambda;
            for (std::size_t j = 0; j < p; ++j) w[j] *= shrink;
            if (yi * z < 1.0) {
                const double step = eta * yi;
                for (std::size_t j = 0; j < p; ++j) w[j] += step * row[j];
                b += step;  // intercept unregularized
            }
        }
        for (double wj : w) {
            if (!std::isfinite(wj)) {
                fail(ErrorCode::Numeric, "SVM diverged at epoch " + std::to_string(epoch));
            }
        }
    }
    LinearModel m;
    m.weights = std::move(w);
    m.intercept = b;
    return m;
}

}  // namespace survkit
