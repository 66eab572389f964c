#include "goa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "metrics.hpp"

namespace survkit {

double social_force(double r, double f, double l) {
    require(r >= 0.0, ErrorCode::Validation, "social_force: negative distance");
    require(l > 0.0, ErrorCode::Validation, "social_force: l must be positive");
    return f * std::exp(-r / l) - std::exp(-r);
}

double comfort_coefficient(std::size_t iter, std::size_t max_iters, double c_max, double c_min) {
    require(iter <= max_iters, ErrorCode::Validation, "iter exceeds max_iters");
    require(c_min < c_max, ErrorCode::Validation, "c_min must be below c_max");
    if (max_iters == 0) return c_max;
    return c_max - static_cast<double>(iter) * (c_max - c_min) / static_cast<double>(max_iters);
}

namespace {

double clamp_or_reflect(double x, double lo, double hi, bool reflect) {
    if (reflect) {
        for (int pass = 0; pass < 4 && (x < lo || x > hi); ++pass) {
            if (x < lo) x = 2.0 * lo - x;
            if (x > hi) x = 2.0 * hi - x;
        }
    }
    return std::clamp(x, lo, hi);
}

void check_bounds(const std::vector<double>& lb, const std::vector<double>& ub) {
    require(!lb.empty() && lb.size() == ub.size(), ErrorCode::Validation,
            "bounds must be non-empty and aligned");
    for (std::size_t d = 0; d < lb.size(); ++d) {
        require(lb[d] < ub[d], ErrorCode::Validation,
                "lower bound must be below upper bound in dimension " + std::to_string(d));
    }
}

void check_params(const GoaParams& params) {
    require(params.n_agents >= 2, ErrorCode::Validation, "need at least 2 agents");
    require(params.c_min < params.c_max, ErrorCode::Validation, "c_min must be below c_max");
    require(params.elite_fraction > 0.0 && params.elite_fraction <= 1.0, ErrorCode::Validation,
            "elite_fraction outside (0, 1]");
}

}  // namespace

Matrix update_positions(const Swarm& swarm, double c, const GoaParams& params) {
    const std::size_t n = swarm.positions.rows(), dims = swarm.positions.cols();
    check_bounds(swarm.lb, swarm.ub);
    require(swarm.best_position.size() == dims, ErrorCode::Validation,
            "target dimension does not match swarm");

    Matrix next(n, dims);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = swarm.positions.row_ptr(i);
        for (std::size_t d = 0; d < dims; ++d) next(i, d) = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double* xj = swarm.positions.row_ptr(j);
            double dist2 = 0.0;
            for (std::size_t d = 0; d < dims; ++d) {
                const double diff = xj[d] - xi[d];
                dist2 += diff * diff;
            }
            const double dist = std::max(std::sqrt(dist2), 1e-12);
            for (std::size_t d = 0; d < dims; ++d) {
                const double diff = xj[d] - xi[d];
                const double half_span = 0.5 * (swarm.ub[d] - swarm.lb[d]);
                next(i, d) += c * half_span *
                              social_force(std::abs(diff), params.social_f, params.social_l) *
                              diff / dist;
            }
        }
        for (std::size_t d = 0; d < dims; ++d) {
            const double moved = c * next(i, d) + swarm.best_position[d];
            next(i, d) = clamp_or_reflect(moved, swarm.lb[d], swarm.ub[d],
                                          params.reflect_bounds);
        }
    }
    return next;
}

std::string GoaResult::trace_to_csv() const {
    std::ostringstream out;
    out << "iteration,best_fitness\n";
    out.precision(17);
    for (std::size_t i = 0; i < trace.size(); ++i) out << i << "," << trace[i] << "\n";
    return out.str();
}

GoaResult optimize(const FitnessFn& fitness, const std::vector<double>& lb,
                   const std::vector<double>& ub, const GoaParams& params,
                   const FitnessFn& monitor) {
    check_bounds(lb, ub);
    check_params(params);
    const std::size_t n = params.n_agents, dims = lb.size();

    Rng rng(params.seed);
    Swarm swarm;
    swarm.lb = lb;
    swarm.ub = ub;
    swarm.positions = Matrix(n, dims);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < dims; ++d) {
            swarm.positions(i, d) = lb[d] + rng.uniform() * (ub[d] - lb[d]);
        }
    }
    swarm.fitness.assign(n, 0.0);

    std::vector<double> agent(dims);
    const auto evaluate = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = swarm.positions.row_ptr(i);
            std::copy(row, row + dims, agent.begin());
            const double f = fitness(agent);
            if (!std::isfinite(f)) {
                fail(ErrorCode::Numeric,
                     "non-finite fitness for agent " + std::to_string(i));
            }
            swarm.fitness[i] = f;
            if (swarm.best_position.empty() || f < swarm.best_fitness) {
                swarm.best_fitness = f;
                swarm.best_position.assign(row, row + dims);
            }
        }
    };

    GoaResult result;
    evaluate();
    result.trace.push_back(swarm.best_fitness);

    const std::size_t n_elite = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::llround(params.elite_fraction * static_cast<double>(n))));
    double watched_best =
        monitor ? monitor(swarm.best_position) : swarm.best_fitness;
    std::size_t stale = 0;

    for (std::size_t iter = 1; iter <= params.max_iters; ++iter) {
        const double c =
            comfort_coefficient(iter, params.max_iters, params.c_max, params.c_min);
        Matrix moved = update_positions(swarm, c, params);

        std::vector<std::size_t> rank(n);
        std::iota(rank.begin(), rank.end(), 0);
        std::sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
            if (swarm.fitness[a] != swarm.fitness[b]) {
                return swarm.fitness[a] < swarm.fitness[b];
            }
            return a < b;
        });
        for (std::size_t e = 0; e < n_elite; ++e) {
            const std::size_t i = rank[e];
            const double* keep = swarm.positions.row_ptr(i);
            std::copy(keep, keep + dims, moved.row_ptr(i));
        }
        swarm.positions = std::move(moved);

        evaluate();
        result.trace.push_back(swarm.best_fitness);
        result.iterations_run = iter;

        const double watched = monitor ? monitor(swarm.best_position) : swarm.best_fitness;
        if (watched < watched_best) {
            watched_best = watched;
            stale = 0;
        } else if (params.patience > 0 && ++stale >= params.patience) {
            break;
        }
    }

    result.best_position = swarm.best_position;
    result.best_fitness = swarm.best_fitness;
    return result;
}

MlpModel goa_train_mlp(const Matrix& X, const std::vector<int>& y, const MlpArch& arch,
                       const GoaParams& params, const GoaTrainOptions& opts) {
    arch.validate();
    require(opts.weight_bound > 0.0, ErrorCode::Validation, "weight bound must be positive");
    require((opts.X_val == nullptr) == (opts.y_val == nullptr), ErrorCode::Validation,
            "validation features and labels must be supplied together");

    const std::size_t dims = arch.param_count();
    const std::vector<double> lb(dims, -opts.weight_bound), ub(dims, opts.weight_bound);

    const FitnessFn fitness = [&](const std::vector<double>& vec) {
        return mlp_loss(unflatten_weights(arch, vec), X, y, 0.0);
    };
    FitnessFn monitor;
    if (opts.X_val != nullptr) {
        monitor = [&, X_val = opts.X_val, y_val = opts.y_val](const std::vector<double>& vec) {
            return mlp_loss(unflatten_weights(arch, vec), *X_val, *y_val, 0.0);
        };
    }
    const GoaResult result = optimize(fitness, lb, ub, params, monitor);
    return unflatten_weights(arch, result.best_position);
}

double project_domain(double value, const HyperDomain& dom) {
    require(dom.lower < dom.upper, ErrorCode::Validation, "domain lower must be below upper");
    require(value >= dom.lower && value <= dom.upper, ErrorCode::Validation,
            "value outside its domain");
    if (dom.log_scale) {
        require(dom.lower > 0.0, ErrorCode::Validation, "log domain needs positive bounds");
        return (std::log(value) - std::log(dom.lower)) /
               (std::log(dom.upper) - std::log(dom.lower));
    }
    return (value - dom.lower) / (dom.upper - dom.lower);
}

double unproject_domain(double u, const HyperDomain& dom) {
    require(dom.lower < dom.upper, ErrorCode::Validation, "domain lower must be below upper");
    require(u >= 0.0 && u <= 1.0, ErrorCode::Validation, "unit value outside [0, 1]");
    double v;
    if (dom.log_scale) {
        require(dom.lower > 0.0, ErrorCode::Validation, "log domain needs positive bounds");
        v = std::exp(std::log(dom.lower) + u * (std::log(dom.upper) - std::log(dom.lower)));
    } else {
        v = dom.lower + u * (dom.upper - dom.lower);
    }
    if (dom.integer) v = std::round(v);
    return std::clamp(v, dom.lower, dom.upper);
}

TuneResult goa_tune_hyperparams(const TuneFitFn& fit, const std::vector<HyperDomain>& domains,
                                const Matrix& X_val, const std::vector<std::uint8_t>* val_missing,
                                const std::vector<int>& y_val, const GoaParams& params) {
    require(!domains.empty(), ErrorCode::Validation, "no hyperparameter domains given");
    require(X_val.rows() == y_val.size(), ErrorCode::Validation,
            "validation labels do not match rows");

    std::vector<std::size_t> val_rows(X_val.rows());
    std::iota(val_rows.begin(), val_rows.end(), 0);

    TuneResult tuned;
    const auto unproject_all = [&](const std::vector<double>& u) {
        std::vector<double> values(domains.size());
        for (std::size_t d = 0; d < domains.size(); ++d) {
            values[d] = unproject_domain(u[d], domains[d]);
        }
        return values;
    };

    const FitnessFn fitness = [&](const std::vector<double>& u) {
        try {
            const auto model = fit(unproject_all(u));
            const std::vector<double> scores = score_rows(*model, X_val, val_missing, val_rows);
            return 1.0 - auc(scores, y_val);
        } catch (const Error&) {
            ++tuned.failed_fits;
            return 1.0;
        }
    };

    const std::vector<double> lb(domains.size(), 0.0), ub(domains.size(), 1.0);
    tuned.search = optimize(fitness, lb, ub, params);
    tuned.values = unproject_all(tuned.search.best_position);
    tuned.val_auc = 1.0 - tuned.search.best_fitness;
    return tuned;
}

}  // namespace survkit
