#pragma once

#include <string>
#include <vector>

#include "common.hpp"
#include "learner.hpp"

namespace survkit {

/// Overflow-safe logistic link 1 / (1 + exp(-t)).
double sigmoid(double t);

/// L1 proximal operator sign(z) * max(|z| - gamma, 0).
double soft_threshold(double z, double gamma);

struct LinearModel {
    std::vector<double> weights;
    double intercept = 0.0;

    double decision(const double* x, std::size_t n) const;
    double probability(const double* x, std::size_t n) const { return sigmoid(decision(x, n)); }
    std::size_t nonzero_weight_count(double tol = 0.0) const;

    std::string to_json_text(const std::vector<std::string>& names = {}) const;
    static LinearModel from_json_text(const std::string& text);
};

struct ElasticNetConfig {
    double lambda = 0.0;
    double alpha = 0.95;  // elastic net mixing
    double learning_rate = 0.01;
    std::size_t epochs = 200;
    std::uint64_t seed = 0;
};

/// Logistic regression by seeded-shuffle SGD minimizing
///   mean log-loss + lambda * (alpha * ||w||_1 + (1 - alpha) / 2 * ||w||_2^2),
/// L1 handled by a per-step soft-threshold. The intercept is unpenalized.
LinearModel fit_sgd_elasticnet(const Matrix& X, const std::vector<int>& y,
                               const ElasticNetConfig& cfg);

struct IrlsConfig {
    double lambda = 0.0;      // L1 strength on mean log-loss scale
    std::size_t max_outer_iters = 100;
    double coord_tol = 1e-8;  // convergence threshold on max weight change
    std::size_t max_inner_sweeps = 200;
};

struct IrlsResult {
    LinearModel model;
    bool converged = false;
    std::size_t outer_iters = 0;
    std::vector<double> objective_trace;  // penalized objective per outer iteration
};

/// L1 logistic regression by iteratively reweighted least squares: the outer
/// loop builds the quadratic approximation at the current weights, the inner
/// loop solves it by cyclic coordinate descent with soft thresholding.
IrlsResult fit_irls_l1(const Matrix& X, const std::vector<int>& y, const IrlsConfig& cfg);

/// Mean log-loss plus the L1 penalty, the objective fit_irls_l1 minimizes.
double irls_objective(const Matrix& X, const std::vector<int>& y, const LinearModel& model,
                      double lambda);

/// Smallest lambda that zeroes every non-intercept weight:
/// max_j |sum_i x_ij (y_i - ybar)| / n.
double l1_lambda_max(const Matrix& X, const std::vector<int>& y);

struct RankedFeature {
    std::string name;
    double weight = 0.0;
};

/// Features sorted by |weight| descending, ties broken by name.
std::vector<RankedFeature> rank_features(const LinearModel& model,
                                         const std::vector<std::string>& names);

/// Classifier adapter over a fitted LinearModel.
class LinearClassifier : public Classifier {
public:
    explicit LinearClassifier(LinearModel model) : model_(std::move(model)) {}
    double score(const double* x, const std::uint8_t*, std::size_t n) const override {
        return model_.probability(x, n);
    }
    const LinearModel& model() const { return model_; }

private:
    LinearModel model_;
};

}  // namespace survkit
