#pragma once

#include <string>
#include <vector>

#include "common.hpp"
#include "learner.hpp"

namespace survkit {

/// Layer sizes from input width through hidden layers to the single output
/// unit. Hidden activations are ReLU, the output is a sigmoid.
struct MlpArch {
    std::vector<std::size_t> layer_sizes;

    std::size_t n_layers() const { return layer_sizes.size() - 1; }  // weight layers
    std::size_t param_count() const;
    void validate() const;
};

struct MlpModel {
    MlpArch arch;
    std::vector<std::vector<double>> weights;  // per layer, row-major out x in
    std::vector<std::vector<double>> biases;   // per layer

    std::string to_json_text() const;
    static MlpModel from_json_text(const std::string& text);
};

/// Glorot-uniform weights in [-r, r] with r = sqrt(6 / (fan_in + fan_out));
/// biases zero.
MlpModel init_mlp(const MlpArch& arch, std::uint64_t seed);

/// Probability for one input row.
double mlp_forward(const MlpModel& model, const double* x, std::size_t n);

/// Pre-sigmoid output, used for numerically stable loss evaluation.
double mlp_margin(const MlpModel& model, const double* x, std::size_t n);

/// Mean cross-entropy plus (l2_lambda / 2) * squared weight norm (biases
/// unpenalized).
double mlp_loss(const MlpModel& model, const Matrix& X, const std::vector<int>& y,
                double l2_lambda);

/// Full-batch analytic gradient of mlp_loss in flatten_weights order.
std::vector<double> mlp_gradient(const MlpModel& model, const Matrix& X,
                                 const std::vector<int>& y, double l2_lambda);

struct BackpropConfig {
    double learning_rate = 0.001;
    std::size_t epochs = 200;
    double l2_lambda = 0.0;
    std::uint64_t seed = 0;
};

/// Full-batch gradient descent at a constant rate.
MlpModel fit_backprop(const Matrix& X, const std::vector<int>& y, const MlpArch& arch,
                      const BackpropConfig& cfg);

/// Layer-major, row-major parameter vector: each layer's weights then biases.
std::vector<double> flatten_weights(const MlpModel& model);
MlpModel unflatten_weights(const MlpArch& arch, const std::vector<double>& params);

class MlpClassifier : public Classifier {
public:
    explicit MlpClassifier(MlpModel model) : model_(std::move(model)) {}
    double score(const double* x, const std::uint8_t*, std::size_t n) const override {
        return mlp_forward(model_, x, n);
    }
    const MlpModel& model() const { return model_; }

private:
    MlpModel model_;
};

}  // namespace survkit
