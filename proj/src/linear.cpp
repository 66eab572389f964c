#include "linear.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace survkit {

double sigmoid(double t) {
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double soft_threshold(double z, double gamma) {
    require(gamma >= 0.0, ErrorCode::Validation, "soft_threshold: negative threshold");
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

double LinearModel::decision(const double* x, std::size_t n) const {
    require(n == weights.size(), ErrorCode::Validation,
            "feature count does not match model width");
    double z = intercept;
    for (std::size_t j = 0; j < n; ++j) z += weights[j] * x[j];
    return z;
}

std::size_t LinearModel::nonzero_weight_count(double tol) const {
    std::size_t n = 0;
    for (double w : weights) n += std::abs(w) > tol;
    return n;
}

std::string LinearModel::to_json_text(const std::vector<std::string>& names) const {
    nlohmann::ordered_json j;
    j["intercept"] = intercept;
    j["weights"] = weights;
    if (!names.empty()) {
        require(names.size() == weights.size(), ErrorCode::Validation,
                "feature-name count does not match weights");
        j["names"] = names;
    }
    return j.dump(2) + "\n";
}

LinearModel LinearModel::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    LinearModel m;
    m.intercept = j.at("intercept").get<double>();
    m.weights = j.at("weights").get<std::vector<double>>();
    return m;
}

namespace {

// Stable per-sample log-loss: log(1 + e^z) - y z.
double logloss_term(double z, int y) {
    const double a = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    return a - static_cast<double>(y) * z;
}

double mean_logloss(const Matrix& X, const std::vector<int>& y, const std::vector<double>& w,
                    double b) {
    double total = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double z = b;
        const double* row = X.row_ptr(i);
        for (std::size_t j = 0; j < X.cols(); ++j) z += w[j] * row[j];
        total += logloss_term(z, y[i]);
    }
    return total / static_cast<double>(X.rows());
}

void check_xy(const Matrix& X, const std::vector<int>& y) {
    require(X.rows() > 0 && X.cols() > 0, ErrorCode::Validation, "empty design matrix");
    require(y.size() == X.rows(), ErrorCode::Validation, "label count does not match rows");
    for (int v : y) {
        require(v == 0 || v == 1, ErrorCode::Validation, "labels must be 0/1");
    }
}

}  // namespace

LinearModel fit_sgd_elasticnet(const Matrix& X, const std::vector<int>& y,
                               const ElasticNetConfig& cfg) {
    check_xy(X, y);
    require(cfg.alpha >= 0.0 && cfg.alpha <= 1.0, ErrorCode::Validation,
            "elastic net alpha outside [0, 1]");
    require(cfg.lambda >= 0.0, ErrorCode::Validation, "negative lambda");

    const std::size_t n = X.rows(), p = X.cols();
    std::vector<double> w(p, 0.0);
    double b = 0.0;
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    const double l1 = cfg.lambda * cfg.alpha;
    const double l2 = cfg.lambda * (1.0 - cfg.alpha);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            const double* row = X.row_ptr(i);
            double z = b;
            for (std::size_t j = 0; j < p; ++j) z += w[j] * row[j];
            const double g = sigmoid(z) - static_cast<double>(y[i]);
            for (std::size_t j = 0; j < p; ++j) {
                w[j] -= cfg.learning_rate * (g * row[j] + l2 * w[j]);
                w[j] = soft_threshold(w[j], cfg.learning_rate * l1);
            }
            b -= cfg.learning_rate * g;
        }
        const double loss = mean_logloss(X, y, w, b);
        if (!std::isfinite(loss)) {
            fail(ErrorCode::Numeric,
                 "SGD diverged at epoch " + std::to_string(epoch) +
                     "; try a smaller learning rate");
        }
    }
    LinearModel m;
    m.weights = std::move(w);
    m.intercept = b;
    return m;
}

double irls_objective(const Matrix& X, const std::vector<int>& y, const LinearModel& model,
                      double lambda) {
    double penalty = 0.0;
    for (double w : model.weights) penalty += std::abs(w);
    return mean_logloss(X, y, model.weights, model.intercept) + lambda * penalty;
}

double l1_lambda_max(const Matrix& X, const std::vector<int>& y) {
    check_xy(X, y);
    const std::size_t n = X.rows(), p = X.cols();
    double ybar = 0.0;
    for (int v : y) ybar += v;
    ybar /= static_cast<double>(n);
    double best = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += X(i, j) * (static_cast<double>(y[i]) - ybar);
        best = std::max(best, std::abs(s) / static_cast<double>(n));
    }
    return best;
}

IrlsResult fit_irls_l1(const Matrix& X, const std::vector<int>& y, const IrlsConfig& cfg) {
    check_xy(X, y);
    require(cfg.lambda >= 0.0, ErrorCode::Validation, "negative lambda");
    require(cfg.coord_tol > 0.0, ErrorCode::Validation, "coord_tol must be positive");

    constexpr double kWeightFloor = 1e-8;
    const std::size_t n = X.rows(), p = X.cols();
    const double dn = static_cast<double>(n);

    std::vector<double> beta(p, 0.0);
    double intercept = 0.0;

    IrlsResult result;
    result.model.weights = beta;
    result.model.intercept = intercept;
    double best_obj = irls_objective(X, y, result.model, cfg.lambda);
    result.objective_trace.push_back(best_obj);

    std::vector<double> z(n), wgt(n), target(n), resid(n);

    for (std::size_t outer = 0; outer < cfg.max_outer_iters; ++outer) {
        result.outer_iters = outer + 1;
        // quadratic approximation at the current iterate
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = X.row_ptr(i);
            double zi = intercept;
            for (std::size_t j = 0; j < p; ++j) zi += beta[j] * row[j];
            const double pi = sigmoid(zi);
            const double wi = std::max(pi * (1.0 - pi), kWeightFloor);
            z[i] = zi;
            wgt[i] = wi;
            target[i] = zi + (static_cast<double>(y[i]) - pi) / wi;
        }
        double wsum = 0.0;
        std::vector<double> denom(p, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            wsum += wgt[i];
            const double* row = X.row_ptr(i);
            for (std::size_t j = 0; j < p; ++j) denom[j] += wgt[i] * row[j] * row[j];
        }

        const std::vector<double> beta_prev = beta;
        const double intercept_prev = intercept;

        for (std::size_t i = 0; i < n; ++i) {
            const double* row = X.row_ptr(i);
            double fit = intercept;
            for (std::size_t j = 0; j < p; ++j) fit += beta[j] * row[j];
            resid[i] = target[i] - fit;
        }

        // cyclic coordinate descent on the penalized weighted least squares
        for (std::size_t sweep = 0; sweep < cfg.max_inner_sweeps; ++sweep) {
            double max_change = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                if (denom[j] == 0.0) continue;
                double rho = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    rho += wgt[i] * X(i, j) * (resid[i] + X(i, j) * beta[j]);
                }
                rho /= dn;
                const double updated = soft_threshold(rho, cfg.lambda) / (denom[j] / dn);
                const double delta = beta[j] - updated;
                if (delta != 0.0) {
                    for (std::size_t i = 0; i < n; ++i) resid[i] += X(i, j) * delta;
                    beta[j] = updated;
                    max_change = std::max(max_change, std::abs(delta));
                }
            }
            double rsum = 0.0;
            for (std::size_t i = 0; i < n; ++i) rsum += wgt[i] * resid[i];
            const double b_delta = rsum / wsum;
            if (b_delta != 0.0) {
                intercept += b_delta;
                for (std::size_t i = 0; i < n; ++i) resid[i] -= b_delta;
                max_change = std::max(max_change, std::abs(b_delta));
            }
            if (max_change < cfg.coord_tol * 0.1) break;
        }

        // step-halving keeps the penalized objective non-increasing
        LinearModel candidate;
        candidate.weights = beta;
        candidate.intercept = intercept;
        double obj = irls_objective(X, y, candidate, cfg.lambda);
        int halvings = 0;
        while (obj > best_obj + 1e-12 && halvings < 40) {
            for (std::size_t j = 0; j < p; ++j) beta[j] = 0.5 * (beta[j] + beta_prev[j]);
            intercept = 0.5 * (intercept + intercept_prev);
            candidate.weights = beta;
            candidate.intercept = intercept;
            obj = irls_objective(X, y, candidate, cfg.lambda);
            ++halvings;
        }
        if (obj > best_obj + 1e-12) {
            beta = beta_prev;
            intercept = intercept_prev;
            result.objective_trace.push_back(best_obj);
            result.converged = true;  // no descent direction left
            break;
        }
        best_obj = obj;
        result.model.weights = beta;
        result.model.intercept = intercept;
        result.objective_trace.push_back(obj);

        double max_delta = std::abs(intercept - intercept_prev);
        for (std::size_t j = 0; j < p; ++j) {
            max_delta = std::max(max_delta, std::abs(beta[j] - beta_prev[j]));
        }
        if (max_delta < cfg.coord_tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

std::vector<RankedFeature> rank_features(const LinearModel& model,
                                         const std::vector<std::string>& names) {
    require(names.size() == model.weights.size(), ErrorCode::Validation,
            "feature-name count does not match weights");
    std::vector<RankedFeature> ranked(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        ranked[i] = {names[i], model.weights[i]};
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedFeature& a, const RankedFeature& b) {
        const double ma = std::abs(a.weight), mb = std::abs(b.weight);
        if (ma != mb) return ma > mb;
        return a.name < b.name;
    });
    return ranked;
}

}  // namespace survkit
