#pragma once

#include <functional>
#include <string>
#include <vector>

#include "common.hpp"
#include "learner.hpp"
#include "mlp.hpp"

namespace survkit {

struct GoaParams {
    std::size_t n_agents = 300;
    std::size_t max_iters = 1000;
    double c_max = 1.0;
    double c_min = 1e-5;
    double social_f = 0.5;
    double social_l = 1.5;
    double elite_fraction = 0.1;
    std::size_t patience = 50;  // iterations without improvement; 0 disables
    bool reflect_bounds = false;  // reflect instead of clamping at the box
    std::uint64_t seed = 0;
};

/// Pairwise social force s(r) = f * exp(-r / l) - exp(-r): repulsive at long
/// range, attractive at short range.
double social_force(double r, double f, double l);

/// Linearly decaying comfort-zone coefficient, c_max at iter 0 down to c_min.
double comfort_coefficient(std::size_t iter, std::size_t max_iters, double c_max, double c_min);

struct Swarm {
    Matrix positions;  // n_agents x dims
    std::vector<double> fitness;
    std::vector<double> best_position;
    double best_fitness = 0.0;
    std::vector<double> lb, ub;
};

/// One synchronous position update: every agent moves under the summed social
/// forces of all others, scaled by c, plus the best-ever position as target.
/// Results are clamped (or reflected) into the bounds.
Matrix update_positions(const Swarm& swarm, double c, const GoaParams& params);

using FitnessFn = std::function<double(const std::vector<double>&)>;

struct GoaResult {
    std::vector<double> best_position;
    double best_fitness = 0.0;
    std::vector<double> trace;  // best-ever fitness after init and each iteration
    std::size_t iterations_run = 0;

    std::string trace_to_csv() const;
};

/// Minimizes fitness over the box [lb, ub]: uniform random init, per
/// iteration the elite agents carry over unchanged and the rest move via
/// update_positions under the decaying comfort coefficient. monitor, when
/// set, maps the best-ever position to the value the patience counter
/// watches (used for validation-based early stopping); defaults to the
/// training fitness itself.
GoaResult optimize(const FitnessFn& fitness, const std::vector<double>& lb,
                   const std::vector<double>& ub, const GoaParams& params,
                   const FitnessFn& monitor = nullptr);

struct GoaTrainOptions {
    double weight_bound = 5.0;  // weights searched in [-bound, bound]
    const Matrix* X_val = nullptr;
    const std::vector<int>* y_val = nullptr;
};

/// Trains MLP weights by swarm search over the flattened parameter vector;
/// fitness is mean training cross-entropy.
MlpModel goa_train_mlp(const Matrix& X, const std::vector<int>& y, const MlpArch& arch,
                       const GoaParams& params, const GoaTrainOptions& opts = {});

struct HyperDomain {
    double lower = 0.0;
    double upper = 1.0;
    bool log_scale = false;
    bool integer = false;
};

/// Maps a natural-unit value into [0, 1] under the domain's scale.
double project_domain(double value, const HyperDomain& dom);

/// Inverse of project_domain; integer domains round to the nearest whole
/// value.
double unproject_domain(double u, const HyperDomain& dom);

struct TuneResult {
    std::vector<double> values;  // natural units, one per domain
    double val_auc = 0.0;
    std::size_t failed_fits = 0;  // fits treated as worst fitness
    GoaResult search;
};

using TuneFitFn = std::function<std::unique_ptr<Classifier>(const std::vector<double>&)>;

/// Hyperparameter search over the unit hypercube: fitness(u) is one minus the
/// validation AUC of the classifier fit at unproject(u). Training failures
/// count as fitness 1.
TuneResult goa_tune_hyperparams(const TuneFitFn& fit, const std::vector<HyperDomain>& domains,
                                const Matrix& X_val, const std::vector<std::uint8_t>* val_missing,
                                const std::vector<int>& y_val, const GoaParams& params);

}  // namespace survkit
