#pragma once

#include <memory>
#include <string>
#include <vector>

#include "common.hpp"
#include "learner.hpp"

namespace survkit {

enum class MissingDirection { Left, Right };

/// Binary tree node shared by the CART/forest baseline and the booster.
/// Internal nodes route x[feature] < threshold to the left child; rows with a
/// missing value follow default_dir.
struct TreeNode {
    bool is_leaf = true;
    double value = 0.0;

    std::size_t feature = 0;
    double threshold = 0.0;
    MissingDirection default_dir = MissingDirection::Right;
    std::unique_ptr<TreeNode> left;
    std::unique_ptr<TreeNode> right;
};

/// Leaf value reached by x, with missing features (mask true) routed along
/// each node's default direction. A null mask means nothing is missing.
double predict_tree(const TreeNode& node, const double* x, const std::uint8_t* missing);

std::string tree_to_json(const TreeNode& node);
std::unique_ptr<TreeNode> tree_from_json_text(const std::string& text);

struct CartParams {
    std::size_t max_depth = 8;
    std::size_t min_samples_leaf = 1;
    std::size_t m_features = 0;  // per-split subsample size; 0 means all
};

/// Greedy CART on complete data: Gini impurity reduction over midpoint
/// thresholds, ties broken by (feature index, threshold), leaves holding the
/// positive-class fraction.
std::unique_ptr<TreeNode> fit_cart(const Matrix& X, const std::vector<int>& y,
                                   const CartParams& params, Rng& rng);
std::unique_ptr<TreeNode> fit_cart(const Matrix& X, const std::vector<int>& y,
                                   const CartParams& params, std::uint64_t seed);

struct ForestConfig {
    std::size_t n_trees = 100;
    std::size_t m_features = 0;  // 0 means all features
    std::size_t max_depth = 8;
    std::size_t min_samples_leaf = 1;
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

class RandomForest : public Classifier {
public:
    double score(const double* x, const std::uint8_t*, std::size_t n) const override;
    std::size_t n_trees() const { return trees_.size(); }
    const TreeNode& tree(std::size_t i) const { return *trees_.at(i); }
    void add_tree(std::unique_ptr<TreeNode> tree) { trees_.push_back(std::move(tree)); }
    std::size_t n_features() const { return n_features_; }
    void set_n_features(std::size_t n) { n_features_ = n; }

private:
    std::vector<std::unique_ptr<TreeNode>> trees_;
    std::size_t n_features_ = 0;
};

/// Bagged CART ensemble. Tree i draws its bootstrap sample and per-split
/// feature subsets from a generator seeded with cfg.seed + i, so any prefix
/// of a forest equals the shorter forest fit with the same seed.
RandomForest fit_random_forest(const Matrix& X, const std::vector<int>& y,
                               const ForestConfig& cfg);

}  // namespace survkit
