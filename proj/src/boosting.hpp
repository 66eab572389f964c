#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "learner.hpp"
#include "trees.hpp"

namespace survkit {

struct BoostParams {
    double lambda = 1.0;           // leaf L2 penalty
    double gamma = 0.0;            // per-split complexity penalty
    double eta = 0.1;              // shrinkage
    std::size_t n_rounds = 200;
    std::size_t max_depth = 4;
    double min_child_weight = 1e-3;  // minimum hessian mass per child
    double approx_epsilon = 0.05;    // quantile sketch granularity
    std::uint64_t seed = 0;
};

struct GradHess {
    double g = 0.0;
    double h = 0.0;
};

/// Second-order statistics of log-loss at prediction p: g = p - y, h = p(1-p).
GradHess logistic_grad_hess(double pred_prob, int label);

/// Optimal leaf value -G / (H + lambda) under the regularized objective.
double leaf_weight(double G, double H, double lambda);

/// Gain of splitting (G, H) into left/right parts, minus the gamma penalty:
/// 1/2 [GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l)] - gamma.
double split_gain(double GL, double HL, double GR, double HR, double lambda, double gamma);

struct SplitCandidate {
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
    MissingDirection default_dir = MissingDirection::Right;
};

enum class SplitMode { Exact, Approx };

/// Best split over the node's rows, or nullopt if every candidate has
/// gain <= 0 or violates min_child_weight. missing is a row-major mask over
/// the full matrix (null = complete data). Each feature is scanned in two
/// passes, sending its missing rows right and then left, so the returned
/// default direction is the higher-gain one. Ties break by gain, then
/// (feature, threshold) ascending, then right over left.
std::optional<SplitCandidate> exact_greedy_split(const std::vector<std::size_t>& rows,
                                                 const Matrix& X,
                                                 const std::vector<std::uint8_t>* missing,
                                                 const std::vector<GradHess>& gh,
                                                 const BoostParams& params);

/// Split values at hessian-weighted quantile ranks epsilon, 2*epsilon, ...
/// Interior points only: candidates equal to the maximum value are dropped
/// and duplicates collapsed.
std::vector<double> weighted_quantile_candidates(std::vector<double> values,
                                                 std::vector<double> weights, double epsilon);

/// Same contract as exact_greedy_split but thresholds are restricted to the
/// per-feature weighted-quantile candidates.
std::optional<SplitCandidate> approx_greedy_split(const std::vector<std::size_t>& rows,
                                                  const Matrix& X,
                                                  const std::vector<std::uint8_t>* missing,
                                                  const std::vector<GradHess>& gh,
                                                  const BoostParams& params);

class BoostEnsemble : public Classifier {
public:
    BoostEnsemble() = default;
    BoostEnsemble(double base_score, double eta) : base_score_(base_score), eta_(eta) {}
    BoostEnsemble(const BoostEnsemble&) = delete;
    BoostEnsemble& operator=(const BoostEnsemble&) = delete;
    BoostEnsemble(BoostEnsemble&&) = default;
    BoostEnsemble& operator=(BoostEnsemble&&) = default;

    /// sigmoid(base_score + eta * sum of raw leaf weights).
    double score(const double* x, const std::uint8_t* miss, std::size_t n) const override;
    double margin(const double* x, const std::uint8_t* miss) const;

    double base_score() const { return base_score_; }
    double eta() const { return eta_; }
    std::size_t n_trees() const { return trees_.size(); }
    const TreeNode& tree(std::size_t i) const { return *trees_.at(i); }
    void add_tree(std::unique_ptr<TreeNode> tree) { trees_.push_back(std::move(tree)); }

    std::string to_json_text() const;
    static BoostEnsemble from_json_text(const std::string& text);

private:
    std::vector<std::unique_ptr<TreeNode>> trees_;
    double base_score_ = 0.0;
    double eta_ = 0.1;
};

/// Gradient-boosted trees on logistic loss: base_score is the log-odds of the
/// training positive rate; each round grows one depth-wise tree on the
/// current gradient/hessian statistics and updates margins with shrinkage.
BoostEnsemble fit_boost(const Matrix& X, const std::vector<std::uint8_t>* missing,
                        const std::vector<int>& y, const BoostParams& params, SplitMode mode);

/// Probability for one row; missing features follow each node's default
/// direction. miss may be null.
double predict_boost(const BoostEnsemble& ensemble, const double* x, const std::uint8_t* miss);

}  // namespace survkit
