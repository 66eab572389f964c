#include "mlp.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "linear.hpp"

namespace survkit {

std::size_t MlpArch::param_count() const {
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        total += layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
    }
    return total;
}

void MlpArch::validate() const {
    require(layer_sizes.size() >= 3, ErrorCode::Validation,
            "architecture needs at least one hidden layer");
    for (std::size_t s : layer_sizes) {
        require(s >= 1, ErrorCode::Validation, "layer sizes must be positive");
    }
    require(layer_sizes.back() == 1, ErrorCode::Validation, "output layer must have one unit");
}

MlpModel init_mlp(const MlpArch& arch, std::uint64_t seed) {
    arch.validate();
    Rng rng(seed);
    MlpModel model;
    model.arch = arch;
    for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
        const std::size_t fan_in = arch.layer_sizes[l], fan_out = arch.layer_sizes[l + 1];
        const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::vector<double> w(fan_in * fan_out);
        for (double& v : w) v = (2.0 * rng.uniform() - 1.0) * r;
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(fan_out, 0.0);
    }
    return model;
}

namespace {

void check_model(const MlpModel& model) {
    model.arch.validate();
    const auto& sizes = model.arch.layer_sizes;
    require(model.weights.size() == sizes.size() - 1 && model.biases.size() == sizes.size() - 1,
            ErrorCode::Validation, "layer count does not match architecture");
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        require(model.weights[l].size() == sizes[l] * sizes[l + 1], ErrorCode::Validation,
                "weight matrix shape does not match architecture");
        require(model.biases[l].size() == sizes[l + 1], ErrorCode::Validation,
                "bias vector shape does not match architecture");
    }
}

double logloss_from_margin(double z, int y) {
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - static_cast<double>(y) * z;
}

// Scratch buffers reused across samples in one full-batch pass.
struct Workspace {
    std::vector<std::vector<double>> act;  // act[l]: activations entering layer l
    std::vector<std::vector<double>> pre;  // pre[l]: pre-activations of layer l

    explicit Workspace(const MlpArch& arch) {
        for (std::size_t l = 0; l < arch.layer_sizes.size(); ++l) {
            act.emplace_back(arch.layer_sizes[l], 0.0);
            if (l > 0) pre.emplace_back(arch.layer_sizes[l], 0.0);
        }
    }
};

double forward_into(const MlpModel& model, const double* x, Workspace& ws) {
    const auto& sizes = model.arch.layer_sizes;
    std::copy(x, x + sizes[0], ws.act[0].begin());
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const std::size_t in = sizes[l], out = sizes[l + 1];
        const bool last = l + 2 == sizes.size();
        for (std::size_t o = 0; o < out; ++o) {
            double z = model.biases[l][o];
            const double* wrow = model.weights[l].data() + o * in;
            for (std::size_t k = 0; k < in; ++k) z += wrow[k] * ws.act[l][k];
            ws.pre[l][o] = z;
            if (!last) ws.act[l + 1][o] = std::max(z, 0.0);
        }
    }
    return ws.pre.back()[0];
}

}  // namespace

double mlp_margin(const MlpModel& model, const double* x, std::size_t n) {
    check_model(model);
    require(n == model.arch.layer_sizes.front(), ErrorCode::Validation,
            "input width does not match architecture");
    Workspace ws(model.arch);
    return forward_into(model, x, ws);
}

double mlp_forward(const MlpModel& model, const double* x, std::size_t n) {
    return sigmoid(mlp_margin(model, x, n));
}

double mlp_loss(const MlpModel& model, const Matrix& X, const std::vector<int>& y,
                double l2_lambda) {
    check_model(model);
    require(X.rows() > 0, ErrorCode::Validation, "empty design matrix");
    require(X.cols() == model.arch.layer_sizes.front(), ErrorCode::Validation,
            "input width does not match architecture");
    require(y.size() == X.rows(), ErrorCode::Validation, "label count does not match rows");
    Workspace ws(model.arch);
    double total = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        total += logloss_from_margin(forward_into(model, X.row_ptr(i), ws), y[i]);
    }
    double penalty = 0.0;
    for (const auto& w : model.weights) {
        for (double v : w) penalty += v * v;
    }
    return total / static_cast<double>(X.rows()) + 0.5 * l2_lambda * penalty;
}

std::vector<double> mlp_gradient(const MlpModel& model, const Matrix& X,
                                 const std::vector<int>& y, double l2_lambda) {
    check_model(model);
    require(X.cols() == model.arch.layer_sizes.front(), ErrorCode::Validation,
            "input width does not match architecture");
    require(y.size() == X.rows() && X.rows() > 0, ErrorCode::Validation,
            "label count does not match rows");

    const auto& sizes = model.arch.layer_sizes;
    const std::size_t L = model.weights.size();
    std::vector<std::vector<double>> gw(L), gb(L);
    for (std::size_t l = 0; l < L; ++l) {
        gw[l].assign(model.weights[l].size(), 0.0);
        gb[l].assign(model.biases[l].size(), 0.0);
    }

    Workspace ws(model.arch);
    std::vector<std::vector<double>> delta;  // dLoss/dpre per layer
    for (std::size_t l = 0; l < L; ++l) delta.emplace_back(sizes[l + 1], 0.0);

    const double inv_n = 1.0 / static_cast<double>(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double margin = forward_into(model, X.row_ptr(i), ws);
        delta[L - 1][0] = (sigmoid(margin) - static_cast<double>(y[i])) * inv_n;
        for (std::size_t l = L; l-- > 0;) {
            const std::size_t in = sizes[l], out = sizes[l + 1];
            for (std::size_t o = 0; o < out; ++o) {
                const double d = delta[l][o];
                if (d == 0.0) continue;
                double* grow = gw[l].data() + o * in;
                for (std::size_t k = 0; k < in; ++k) grow[k] += d * ws.act[l][k];
                gb[l][o] += d;
            }
            if (l == 0) break;
            for (std::size_t k = 0; k < in; ++k) {
                if (ws.pre[l - 1][k] <= 0.0) {
                    delta[l - 1][k] = 0.0;
                    continue;
                }
                double s = 0.0;
                for (std::size_t o = 0; o < out; ++o) {
                    s += delta[l][o] * model.weights[l][o * in + k];
                }
                delta[l - 1][k] = s;
            }
        }
    }

    std::vector<double> flat;
    flat.reserve(model.arch.param_count());
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t i = 0; i < gw[l].size(); ++i) {
            flat.push_back(gw[l][i] + l2_lambda * model.weights[l][i]);
        }
        flat.insert(flat.end(), gb[l].begin(), gb[l].end());
    }
    return flat;
}

MlpModel fit_backprop(const Matrix& X, const std::vector<int>& y, const MlpArch& arch,
                      const BackpropConfig& cfg) {
    require(cfg.learning_rate > 0.0, ErrorCode::Validation, "learning rate must be positive");
    for (int v : y) {
        require(v == 0 || v == 1, ErrorCode::Validation, "labels must be 0/1");
    }
    MlpModel model = init_mlp(arch, cfg.seed);
    std::vector<double> params = flatten_weights(model);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const std::vector<double> grad = mlp_gradient(model, X, y, cfg.l2_lambda);
        for (std::size_t i = 0; i < params.size(); ++i) {
            params[i] -= cfg.learning_rate * grad[i];
        }
        model = unflatten_weights(arch, params);
        const double loss = mlp_loss(model, X, y, cfg.l2_lambda);
        if (!std::isfinite(loss)) {
            fail(ErrorCode::Numeric, "backprop diverged at epoch " + std::to_string(epoch) +
                                         "; try a smaller learning rate");
        }
    }
    return model;
}

std::vector<double> flatten_weights(const MlpModel& model) {
    check_model(model);
    std::vector<double> flat;
    flat.reserve(model.arch.param_count());
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        flat.insert(flat.end(), model.weights[l].begin(), model.weights[l].end());
        flat.insert(flat.end(), model.biases[l].begin(), model.biases[l].end());
    }
    return flat;
}

MlpModel unflatten_weights(const MlpArch& arch, const std::vector<double>& params) {
    arch.validate();
    require(params.size() == arch.param_count(), ErrorCode::Validation,
            "parameter vector length does not match architecture");
    MlpModel model;
    model.arch = arch;
    std::size_t pos = 0;
    for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
        const std::size_t nw = arch.layer_sizes[l] * arch.layer_sizes[l + 1];
        const std::size_t nb = arch.layer_sizes[l + 1];
        model.weights.emplace_back(params.begin() + pos, params.begin() + pos + nw);
        pos += nw;
        model.biases.emplace_back(params.begin() + pos, params.begin() + pos + nb);
        pos += nb;
    }
    return model;
}

std::string MlpModel::to_json_text() const {
    check_model(*this);
    nlohmann::ordered_json j;
    j["layers"] = arch.layer_sizes;
    j["weights"] = weights;
    j["biases"] = biases;
    return j.dump(2) + "\n";
}

MlpModel MlpModel::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    MlpModel model;
    model.arch.layer_sizes = j.at("layers").get<std::vector<std::size_t>>();
    model.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    model.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    check_model(model);
    return model;
}

}  // namespace survkit
