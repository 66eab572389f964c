#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "common.hpp"
#include "learner.hpp"

namespace survkit {

/// Base-learner closure over fixed hyperparameters; fits on the given view.
using BaseFitFn = std::function<std::unique_ptr<Classifier>(const DataView&)>;

struct LabeledPool {
    std::vector<std::size_t> rows;
    std::vector<int> labels;
};

struct UnlabeledPool {
    std::vector<std::size_t> rows;
};

struct SelfTrainConfig {
    double confidence_alpha = 0.8;  // in (0.5, 1]
    std::size_t max_iters = 20;
};

struct SelfTrainResult {
    std::unique_ptr<Classifier> model;
    bool converged = false;
    std::size_t iterations = 0;  // refits performed
};

/// Self-training: fit on L, then repeatedly refit on L plus the unlabeled
/// rows whose predicted-class probability strictly exceeds alpha (with their
/// predicted labels), until hard predictions on U stop changing or max_iters
/// is hit. Confidence is max(p, 1 - p).
SelfTrainResult self_train(const BaseFitFn& fit, const Matrix& X,
                           const std::vector<std::uint8_t>* missing, const LabeledPool& L,
                           const UnlabeledPool& U, const SelfTrainConfig& cfg);

struct ViewSpec {
    std::vector<std::vector<std::size_t>> views;  // feature indices per view
    std::size_t max_rounds = 10;

    std::size_t n_views() const { return views.size(); }
};

struct CoTrainResult {
    std::vector<std::unique_ptr<Classifier>> models;  // one per view, last fit
    ViewSpec views;
    std::vector<std::size_t> train_sizes;  // shared training-set size per round
    std::size_t rounds_run = 0;
};

/// Co-training: per round, fit one classifier per feature view on the shared
/// training set, hard-predict the remaining unlabeled rows on every view, and
/// move the rows on which all views agree into the training set with the
/// agreed label. Added rows are never revisited; returned classifiers come
/// from the last fit.
CoTrainResult co_train(const BaseFitFn& fit, const Matrix& X,
                       const std::vector<std::uint8_t>* missing, const LabeledPool& L,
                       const UnlabeledPool& U, const ViewSpec& views);

enum class VoteMode { Soft, Hard };

/// Soft vote: mean of per-view probabilities. Hard vote: fraction of views
/// predicting the positive class.
double vote_predict(const std::vector<std::unique_ptr<Classifier>>& models, const double* x,
                    const std::uint8_t* miss, std::size_t n, const ViewSpec& views,
                    VoteMode mode = VoteMode::Soft);

/// All ways to split feature groups into two non-empty views (swap-symmetric
/// duplicates removed): 2^(g-1) - 1 partitions for g groups. Each group's
/// column indices stay together.
std::vector<ViewSpec> enumerate_two_views(const std::vector<std::vector<std::size_t>>& groups,
                                          std::size_t max_rounds = 10);

/// Classifier adapter bundling per-view models behind vote_predict.
class VoteClassifier : public Classifier {
public:
    VoteClassifier(std::vector<std::unique_ptr<Classifier>> models, ViewSpec views,
                   VoteMode mode = VoteMode::Soft)
        : models_(std::move(models)), views_(std::move(views)), mode_(mode) {}
    double score(const double* x, const std::uint8_t* miss, std::size_t n) const override {
        return vote_predict(models_, x, miss, n, views_, mode_);
    }
    const ViewSpec& views() const { return views_; }

private:
    std::vector<std::unique_ptr<Classifier>> models_;
    ViewSpec views_;
    VoteMode mode_;
};

}  // namespace survkit
