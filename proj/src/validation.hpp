#pragma once

#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "learner.hpp"

namespace survkit {

/// Fixed 80/10/10 split. Sizes are floor(0.8n) / floor(0.1n) / remainder.
struct SplitPlan {
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> val_idx;
    std::vector<std::size_t> test_idx;
    std::uint64_t seed = 0;
};

SplitPlan make_split(std::size_t n, std::uint64_t seed,
                     const std::optional<std::vector<int>>& stratify = std::nullopt);

/// k-fold assignment over an index set; fold sizes differ by at most 1.
struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::vector<std::size_t>> folds;
    std::uint64_t seed = 0;
};

FoldPlan make_folds(const std::vector<std::size_t>& indices, std::size_t k, std::uint64_t seed);

struct AccuracyCurve {
    std::vector<double> params;
    std::vector<double> mean_auc;
    std::vector<double> sd_auc;

    std::string to_csv() const;  // columns param,mean_auc,sd_auc
};

/// The one-standard-deviation rule: among parameters whose mean AUC is within
/// one sd of the best mean, return the simplest.
double one_sd_rule(const AccuracyCurve& curve, Simplicity simplicity);

struct OuterFoldResult {
    double chosen_param = 0.0;
    double val_auc = 0.0;
    AccuracyCurve curve;
    // recorded for the leakage audit
    std::vector<std::size_t> heldout_idx;
    std::vector<std::vector<std::size_t>> inner_train_sets;
    std::vector<std::vector<std::size_t>> inner_eval_sets;
};

struct CvReport {
    std::string learner;
    std::vector<OuterFoldResult> folds;
    double mean_val_auc = 0.0;
    double best_param = 0.0;
    double test_auc = 0.0;
    std::vector<double> test_scores;  // final-model scores on the test split
    std::vector<int> test_labels;
    SplitPlan split;

    std::string to_json_text() const;
};

struct LabeledDataset {
    const Matrix* X = nullptr;
    const std::vector<std::uint8_t>* missing = nullptr;
    std::vector<int> y;  // one binary label per matrix row
};

/// 5-fold nested cross-validation with an inner 4-fold tuning loop: each
/// outer fold tunes over the grid via the one-sd rule, the tuned model is
/// trained on the outer training folds and scored on the validation split,
/// and the best of the five parameters is refit on train+validation and
/// scored on the test split.
CvReport nested_cv(const LabeledDataset& data, const SplitPlan& split, const LearnerSpec& learner,
                   std::uint64_t seed, unsigned threads = 1);

struct RepeatedEval {
    std::vector<double> val_aucs;
    std::vector<double> test_aucs;
    double val_mean = 0.0, val_sd = 0.0;
    double test_mean = 0.0, test_sd = 0.0;
};

/// Trains with distinct seeds and reports mean and sd of validation/test AUC;
/// the evaluation path used where nested CV is too expensive.
RepeatedEval repeated_eval(const LabeledDataset& data, const SplitPlan& split,
                           const LearnerSpec& learner, double param,
                           const std::vector<std::uint64_t>& seeds);

}  // namespace survkit
