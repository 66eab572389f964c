#pragma once

#include <vector>

#include "common.hpp"
#include "learner.hpp"
#include "linear.hpp"

namespace survkit {

struct KnnConfig {
    std::size_t k = 1;
};

/// Fraction of the k Euclidean-nearest training rows labeled positive.
/// Distance ties are broken by the smaller training-row index.
double knn_score(const Matrix& train_X, const std::vector<int>& train_y, const double* query,
                 const KnnConfig& cfg);

/// Classifier adapter holding a copy of the training data.
class KnnClassifier : public Classifier {
public:
    KnnClassifier(Matrix train_X, std::vector<int> train_y, KnnConfig cfg);
    double score(const double* x, const std::uint8_t*, std::size_t n) const override;

private:
    Matrix train_X_;
    std::vector<int> train_y_;
    KnnConfig cfg_;
};

struct SvmConfig {
    double C = 1.0;
    std::size_t epochs = 200;
    std::uint64_t seed = 0;
};

/// Linear soft-margin SVM minimizing (1/2)||w||^2 + C * sum hinge(1 - y(wx+b))
/// by Pegasos-style stochastic subgradient descent. Labels must be -1/+1.
LinearModel fit_linear_svm(const Matrix& X, const std::vector<int>& y, const SvmConfig& cfg);

/// Full-batch value of the SVM objective, used to monitor training.
double svm_objective(const Matrix& X, const std::vector<int>& y, const LinearModel& model,
                     double C);

/// Classifier adapter emitting the raw decision value w.x + b.
class SvmClassifier : public Classifier {
public:
    explicit SvmClassifier(LinearModel model) : model_(std::move(model)) {}
    double score(const double* x, const std::uint8_t*, std::size_t n) const override {
        return model_.decision(x, n);
    }
    const LinearModel& model() const { return model_; }

private:
    LinearModel model_;
};

}  // namespace survkit
