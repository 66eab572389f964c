#include "trees.hpp"

#include <algorithm>
#include <cmath>

#include "tree_json.hpp"

namespace survkit {

double predict_tree(const TreeNode& node, const double* x, const std::uint8_t* missing) {
    const TreeNode* cur = &node;
    while (!cur->is_leaf) {
        bool go_left;
        if (missing != nullptr && missing[cur->feature]) {
            go_left = cur->default_dir == MissingDirection::Left;
        } else {
            go_left = x[cur->feature] < cur->threshold;
        }
        cur = go_left ? cur->left.get() : cur->right.get();
    }
    return cur->value;
}

namespace detail {

nlohmann::ordered_json tree_to_json_obj(const TreeNode& node) {
    nlohmann::ordered_json j;
    if (node.is_leaf) {
        j["leaf"] = node.value;
        return j;
    }
    j["feature"] = node.feature;
    j["threshold"] = node.threshold;
    j["default"] = node.default_dir == MissingDirection::Left ? "left" : "right";
    j["left"] = tree_to_json_obj(*node.left);
    j["right"] = tree_to_json_obj(*node.right);
    return j;
}

std::unique_ptr<TreeNode> tree_from_json_obj(const nlohmann::json& j) {
    auto node = std::make_unique<TreeNode>();
    if (j.contains("leaf")) {
        node->is_leaf = true;
        node->value = j.at("leaf").get<double>();
        return node;
    }
    node->is_leaf = false;
    node->feature = j.at("feature").get<std::size_t>();
    node->threshold = j.at("threshold").get<double>();
    const std::string dir = j.at("default").get<std::string>();
    require(dir == "left" || dir == "right", ErrorCode::Parse,
            "tree node default direction must be left or right");
    node->default_dir = dir == "left" ? MissingDirection::Left : MissingDirection::Right;
    node->left = tree_from_json_obj(j.at("left"));
    node->right = tree_from_json_obj(j.at("right"));
    return node;
}

}  // namespace detail

std::string tree_to_json(const TreeNode& node) {
    return detail::tree_to_json_obj(node).dump(2) + "\n";
}

std::unique_ptr<TreeNode> tree_from_json_text(const std::string& text) {
    return detail::tree_from_json_obj(nlohmann::json::parse(text));
}

namespace {

double gini(std::size_t positives, std::size_t total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(positives) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
}

struct CartBuilder {
    const Matrix& X;
    const std::vector<int>& y;
    const CartParams& params;
    Rng& rng;

    std::unique_ptr<TreeNode> build(const std::vector<std::size_t>& rows, std::size_t depth) {
        const std::size_t n = rows.size();
        std::size_t positives = 0;
        for (std::size_t r : rows) positives += static_cast<std::size_t>(y[r]);

        auto node = std::make_unique<TreeNode>();
        node->value = static_cast<double>(positives) / static_cast<double>(n);
        if (depth >= params.max_depth || positives == 0 || positives == n ||
            n < 2 * params.min_samples_leaf) {
            return node;
        }

        const std::size_t p = X.cols();
        std::vector<std::size_t> features;
        if (params.m_features >= 1 && params.m_features < p) {
            features = rng.sample_without_replacement(p, params.m_features);
            std::sort(features.begin(), features.end());
        } else {
            features.resize(p);
            for (std::size_t j = 0; j < p; ++j) features[j] = j;
        }

        const double parent = gini(positives, n);
        double best_decrease = 0.0;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;

        std::vector<std::pair<double, std::size_t>> order(n);
        for (std::size_t j : features) {
            for (std::size_t i = 0; i < n; ++i) order[i] = {X(rows[i], j), rows[i]};
            std::sort(order.begin(), order.end());
            std::size_t left_pos = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left_pos += static_cast<std::size_t>(y[order[i].second]);
                if (order[i].first == order[i + 1].first) continue;
                const std::size_t nl = i + 1, nr = n - nl;
                if (nl < params.min_samples_leaf || nr < params.min_samples_leaf) continue;
                const double child =
                    (static_cast<double>(nl) * gini(left_pos, nl) +
                     static_cast<double>(nr) * gini(positives - left_pos, nr)) /
                    static_cast<double>(n);
                const double decrease = parent - child;
                if (decrease > best_decrease) {
                    best_decrease = decrease;
                    best_feature = j;
                    best_threshold = 0.5 * (order[i].first + order[i + 1].first);
                }
            }
        }
        if (best_decrease <= 0.0) return node;

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows) {
            (X(r, best_feature) < best_threshold ? left_rows : right_rows).push_back(r);
        }
        node->is_leaf = false;
        node->feature = best_feature;
        node->threshold = best_threshold;
        node->left = build(left_rows, depth + 1);
        node->right = build(right_rows, depth + 1);
        return node;
    }
};

void check_tree_inputs(const Matrix& X, const std::vector<int>& y) {
    require(X.rows() > 0 && X.cols() > 0, ErrorCode::Validation, "empty design matrix");
    require(y.size() == X.rows(), ErrorCode::Validation, "label count does not match rows");
    for (int v : y) {
        require(v == 0 || v == 1, ErrorCode::Validation, "labels must be 0/1");
    }
}

}  // namespace

std::unique_ptr<TreeNode> fit_cart(const Matrix& X, const std::vector<int>& y,
                                   const CartParams& params, Rng& rng) {
    check_tree_inputs(X, y);
    require(params.min_samples_leaf >= 1, ErrorCode::Validation,
            "min_samples_leaf must be at least 1");
    require(params.m_features <= X.cols(), ErrorCode::Validation,
            "m_features exceeds feature count");
    std::vector<std::size_t> rows(X.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    CartBuilder builder{X, y, params, rng};
    return builder.build(rows, 0);
}

std::unique_ptr<TreeNode> fit_cart(const Matrix& X, const std::vector<int>& y,
                                   const CartParams& params, std::uint64_t seed) {
    Rng rng(seed);
    return fit_cart(X, y, params, rng);
}

double RandomForest::score(const double* x, const std::uint8_t* missing, std::size_t n) const {
    require(!trees_.empty(), ErrorCode::Validation, "empty forest");
    require(n_features_ == 0 || n == n_features_, ErrorCode::Validation,
            "feature count does not match training data");
    double total = 0.0;
    for (const auto& tree : trees_) total += predict_tree(*tree, x, missing);
    return total / static_cast<double>(trees_.size());
}

RandomForest fit_random_forest(const Matrix& X, const std::vector<int>& y,
                               const ForestConfig& cfg) {
    check_tree_inputs(X, y);
    require(cfg.n_trees >= 1, ErrorCode::Validation, "n_trees must be at least 1");
    const std::size_t n = X.rows();

    CartParams params;
    params.max_depth = cfg.max_depth;
    params.min_samples_leaf = cfg.min_samples_leaf;
    params.m_features = cfg.m_features;

    std::vector<std::unique_ptr<TreeNode>> trees(cfg.n_trees);
    parallel_for(cfg.n_trees, default_thread_count(), [&](std::size_t t) {
        Rng rng(cfg.seed + t);
        if (cfg.bootstrap) {
            Matrix bx(n, X.cols());
            std::vector<int> by(n);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t r = rng.below(n);
                const double* src = X.row_ptr(r);
                std::copy(src, src + X.cols(), bx.row_ptr(i));
                by[i] = y[r];
            }
            trees[t] = fit_cart(bx, by, params, rng);
        } else {
            trees[t] = fit_cart(X, y, params, rng);
        }
    });

    RandomForest forest;
    forest.set_n_features(X.cols());
    for (auto& tree : trees) forest.add_tree(std::move(tree));
    return forest;
}

}  // namespace survkit
