#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "boosting.hpp"
#include "common.hpp"
#include "linear.hpp"

using namespace survkit;

namespace {

bool oracle_better(const SplitCandidate& a, const SplitCandidate& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    if (a.feature != b.feature) return a.feature < b.feature;
    if (a.threshold != b.threshold) return a.threshold < b.threshold;
    return a.default_dir == MissingDirection::Right && b.default_dir == MissingDirection::Left;
}

/// Exhaustive split search: every feature, every midpoint between distinct
/// present values, both missing directions. Candidates are formed from raw
/// partition sums rather than running prefixes.
std::vector<SplitCandidate> enumerate_splits(const std::vector<std::size_t>& rows,
                                             const Matrix& X,
                                             const std::vector<std::uint8_t>* missing,
                                             const std::vector<GradHess>& gh,
                                             const BoostParams& params) {
    std::vector<SplitCandidate> out;
    for (std::size_t j = 0; j < X.cols(); ++j) {
        std::vector<double> present;
        for (std::size_t r : rows) {
            if (missing == nullptr || !(*missing)[r * X.cols() + j]) present.push_back(X(r, j));
        }
        std::sort(present.begin(), present.end());
        present.erase(std::unique(present.begin(), present.end()), present.end());
        for (std::size_t i = 0; i + 1 < present.size(); ++i) {
            const double threshold = 0.5 * (present[i] + present[i + 1]);
            for (MissingDirection dir : {MissingDirection::Right, MissingDirection::Left}) {
                double GL = 0.0, HL = 0.0, GR = 0.0, HR = 0.0;
                for (std::size_t r : rows) {
                    const bool miss =
                        missing != nullptr && (*missing)[r * X.cols() + j] != 0;
                    const bool left =
                        miss ? dir == MissingDirection::Left : X(r, j) < threshold;
                    (left ? GL : GR) += gh[r].g;
                    (left ? HL : HR) += gh[r].h;
                }
                if (HL < params.min_child_weight || HR < params.min_child_weight) continue;
                SplitCandidate cand;
                cand.feature = j;
                cand.threshold = threshold;
                cand.gain = split_gain(GL, HL, GR, HR, params.lambda, params.gamma);
                cand.default_dir = dir;
                out.push_back(cand);
            }
        }
    }
    std::sort(out.begin(), out.end(), oracle_better);
    return out;
}

double training_logloss(const std::vector<double>& margins, const std::vector<int>& y) {
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double p = sigmoid(margins[i]);
        total += y[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
    }
    return total / static_cast<double>(y.size());
}

std::unique_ptr<TreeNode> stump(std::size_t feature, double threshold, double left, double right) {
    auto node = std::make_unique<TreeNode>();
    node->is_leaf = false;
    node->feature = feature;
    node->threshold = threshold;
    node->left = std::make_unique<TreeNode>();
    node->left->value = left;
    node->right = std::make_unique<TreeNode>();
    node->right->value = right;
    return node;
}

}  // namespace

TEST_CASE("log-loss statistics at a prediction") {
    const GradHess a = logistic_grad_hess(0.7, 1);
    CHECK(a.g == doctest::Approx(-0.3));
    CHECK(a.h == doctest::Approx(0.21));
    const GradHess b = logistic_grad_hess(0.5, 0);
    CHECK(b.g == doctest::Approx(0.5));
    CHECK(b.h == doctest::Approx(0.25));
    CHECK_THROWS_AS(logistic_grad_hess(0.0, 1), Error);
    CHECK_THROWS_AS(logistic_grad_hess(0.4, 2), Error);
}

TEST_CASE("leaf weight and split gain match hand values") {
    CHECK(leaf_weight(2.0, 3.0, 1.0) == doctest::Approx(-0.5));
    CHECK(split_gain(-2.0, 1.0, 2.0, 1.0, 1.0, 0.0) == doctest::Approx(2.0));
    CHECK(split_gain(-2.0, 1.0, 2.0, 1.0, 1.0, 0.5) == doctest::Approx(1.5));
    CHECK_THROWS_AS(leaf_weight(1.0, 0.0, 0.0), Error);
}

TEST_CASE("exact split search agrees with exhaustive enumeration") {
    Rng rng(404);
    BoostParams params;
    params.lambda = 1.0;
    params.min_child_weight = 1e-3;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(7);
        Matrix X(n, 3);
        std::vector<std::uint8_t> mask(n * 3, 0);
        std::vector<GradHess> gh(n);
        std::vector<std::size_t> rows(n);
        for (std::size_t i = 0; i < n; ++i) {
            rows[i] = i;
            for (std::size_t j = 0; j < 3; ++j) {
                X(i, j) = static_cast<double>(rng.below(4));
                mask[i * 3 + j] = rng.uniform() < 0.3 ? 1 : 0;
            }
            gh[i].g = 2.0 * rng.uniform() - 1.0;
            gh[i].h = 0.05 + 0.25 * rng.uniform();
        }
        const bool with_mask = trial % 2 == 0;
        const auto* mp = with_mask ? &mask : nullptr;
        const auto got = exact_greedy_split(rows, X, mp, gh, params);
        const auto all = enumerate_splits(rows, X, mp, gh, params);
        if (all.empty() || std::abs(all.front().gain) < 1e-9) continue;
        if (all.front().gain <= 0.0) {
            CHECK_FALSE(got.has_value());
            continue;
        }
        REQUIRE(got.has_value());
        CHECK(std::abs(got->gain - all.front().gain) < 1e-9);
        const bool unique =
            all.size() == 1 || all.front().gain - all[1].gain > 1e-9;
        if (unique) {
            CHECK(got->feature == all.front().feature);
            CHECK(got->threshold == all.front().threshold);
            CHECK(got->default_dir == all.front().default_dir);
        }
    }
}

TEST_CASE("a feature missing everywhere yields no split") {
    Matrix X(4, 1);
    for (int i = 0; i < 4; ++i) X(i, 0) = i;
    const std::vector<std::uint8_t> mask(4, 1);
    std::vector<GradHess> gh(4);
    for (int i = 0; i < 4; ++i) gh[i] = {i < 2 ? 0.5 : -0.5, 0.25};
    BoostParams params;
    CHECK_FALSE(exact_greedy_split({0, 1, 2, 3}, X, &mask, gh, params).has_value());
}

TEST_CASE("quantile candidates land on the expected ranks") {
    std::vector<double> values, weights;
    for (int v = 1; v <= 100; ++v) {
        values.push_back(v);
        weights.push_back(1.0);
    }
    const auto cands = weighted_quantile_candidates(values, weights, 0.25);
    REQUIRE(cands.size() == 3);
    CHECK(cands[0] == 25.0);
    CHECK(cands[1] == 50.0);
    CHECK(cands[2] == 75.0);
}

TEST_CASE("degenerate quantile inputs produce no interior candidates") {
    CHECK(weighted_quantile_candidates({3.0}, {1.0}, 0.25).empty());
    CHECK(weighted_quantile_candidates({2.0, 2.0, 2.0}, {1.0, 1.0, 1.0}, 0.25).empty());
    const auto skewed = weighted_quantile_candidates({1.0, 2.0, 3.0, 4.0}, {97.0, 1.0, 1.0, 1.0}, 0.25);
    REQUIRE(skewed.size() == 1);
    CHECK(skewed[0] == 1.0);
    CHECK_THROWS_AS(weighted_quantile_candidates({1.0}, {1.0}, 0.0), Error);
}

TEST_CASE("zero rounds predict the training base rate") {
    Matrix X(4, 1);
    for (int i = 0; i < 4; ++i) X(i, 0) = i;
    BoostParams params;
    params.n_rounds = 0;
    const BoostEnsemble e = fit_boost(X, nullptr, {1, 0, 0, 0}, params, SplitMode::Exact);
    CHECK(e.n_trees() == 0);
    const double q = 2.5;
    CHECK(predict_boost(e, &q, nullptr) == doctest::Approx(0.25));
}

TEST_CASE("a single stump matches the exhaustive-search optimum") {
    Matrix X(6, 2);
    const double vals[6][2] = {{1, 5}, {2, 1}, {3, 4}, {4, 2}, {5, 6}, {6, 3}};
    for (std::size_t i = 0; i < 6; ++i) {
        X(i, 0) = vals[i][0];
        X(i, 1) = vals[i][1];
    }
    const std::vector<int> y = {0, 1, 0, 1, 1, 1};
    BoostParams params;
    params.n_rounds = 1;
    params.max_depth = 1;
    const BoostEnsemble e = fit_boost(X, nullptr, y, params, SplitMode::Exact);
    REQUIRE(e.n_trees() == 1);
    const TreeNode& root = e.tree(0);
    REQUIRE_FALSE(root.is_leaf);

    const double p0 = 4.0 / 6.0;
    std::vector<GradHess> gh(6);
    for (std::size_t i = 0; i < 6; ++i) gh[i] = {p0 - y[i], p0 * (1.0 - p0)};
    const auto all = enumerate_splits({0, 1, 2, 3, 4, 5}, X, nullptr, gh, params);
    REQUIRE_FALSE(all.empty());
    CHECK(root.feature == all.front().feature);
    CHECK(root.threshold == doctest::Approx(all.front().threshold));

    double GL = 0.0, HL = 0.0, GR = 0.0, HR = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
        const bool left = X(i, root.feature) < root.threshold;
        (left ? GL : GR) += gh[i].g;
        (left ? HL : HR) += gh[i].h;
    }
    CHECK(root.left->value == doctest::Approx(leaf_weight(GL, HL, params.lambda)));
    CHECK(root.right->value == doctest::Approx(leaf_weight(GR, HR, params.lambda)));
}

TEST_CASE("training log-loss never increases across rounds") {
    Rng rng(50);
    Matrix X(50, 3);
    std::vector<int> y;
    for (std::size_t i = 0; i < 50; ++i) {
        const int label = rng.uniform() < 0.5 ? 1 : 0;
        y.push_back(label);
        X(i, 0) = label + rng.normal();
        X(i, 1) = rng.normal();
        X(i, 2) = rng.normal();
    }
    BoostParams params;
    params.n_rounds = 30;
    params.max_depth = 3;
    const BoostEnsemble e = fit_boost(X, nullptr, y, params, SplitMode::Exact);

    std::vector<double> margins(50, e.base_score());
    double prev = training_logloss(margins, y);
    for (std::size_t t = 0; t < e.n_trees(); ++t) {
        for (std::size_t i = 0; i < 50; ++i) {
            margins[i] += e.eta() * predict_tree(e.tree(t), X.row_ptr(i), nullptr);
        }
        const double now = training_logloss(margins, y);
        CHECK(now <= prev + 1e-9);
        prev = now;
    }
}

TEST_CASE("a fine sketch reproduces the exact stump") {
    Rng rng(88);
    Matrix X(40, 3);
    std::vector<int> y;
    for (std::size_t i = 0; i < 40; ++i) {
        const int label = rng.uniform() < 0.5 ? 1 : 0;
        y.push_back(label);
        for (std::size_t j = 0; j < 3; ++j) {
            X(i, j) = static_cast<double>(rng.below(12)) + (j == 0 ? 3.0 * label : 0.0);
        }
    }
    BoostParams params;
    params.n_rounds = 1;
    params.max_depth = 1;
    params.approx_epsilon = 0.01;
    const BoostEnsemble exact = fit_boost(X, nullptr, y, params, SplitMode::Exact);
    const BoostEnsemble approx = fit_boost(X, nullptr, y, params, SplitMode::Approx);
    CHECK(exact.to_json_text() == approx.to_json_text());
}

TEST_CASE("the complexity penalty can veto an otherwise useful split") {
    Matrix X(4, 1);
    for (int i = 0; i < 4; ++i) X(i, 0) = i + 1;
    const std::vector<int> y = {0, 0, 1, 1};
    std::vector<GradHess> gh(4);
    for (int i = 0; i < 4; ++i) gh[i] = {0.5 - y[i], 0.25};

    BoostParams params;
    params.lambda = 1.0;
    params.gamma = 0.0;
    const auto open = exact_greedy_split({0, 1, 2, 3}, X, nullptr, gh, params);
    REQUIRE(open.has_value());
    CHECK(open->gain == doctest::Approx(2.0 / 3.0));

    params.gamma = 0.7;
    CHECK_FALSE(exact_greedy_split({0, 1, 2, 3}, X, nullptr, gh, params).has_value());
}

TEST_CASE("the hessian floor rules out tiny children") {
    Matrix X(4, 1);
    for (int i = 0; i < 4; ++i) X(i, 0) = i + 1;
    std::vector<GradHess> gh(4);
    for (int i = 0; i < 4; ++i) gh[i] = {i < 2 ? 0.5 : -0.5, 0.25};

    BoostParams params;
    params.min_child_weight = 0.3;
    const auto mid = exact_greedy_split({0, 1, 2, 3}, X, nullptr, gh, params);
    REQUIRE(mid.has_value());
    CHECK(mid->threshold == doctest::Approx(2.5));

    params.min_child_weight = 0.6;
    CHECK_FALSE(exact_greedy_split({0, 1, 2, 3}, X, nullptr, gh, params).has_value());
}

TEST_CASE("a constant extra column changes nothing") {
    Rng rng(9);
    Matrix X(30, 2);
    std::vector<int> y;
    for (std::size_t i = 0; i < 30; ++i) {
        const int label = rng.uniform() < 0.5 ? 1 : 0;
        y.push_back(label);
        X(i, 0) = label + 0.5 * rng.normal();
        X(i, 1) = rng.normal();
    }
    Matrix Xc(30, 3);
    for (std::size_t i = 0; i < 30; ++i) {
        Xc(i, 0) = X(i, 0);
        Xc(i, 1) = X(i, 1);
        Xc(i, 2) = 7.0;
    }
    BoostParams params;
    params.n_rounds = 10;
    const BoostEnsemble a = fit_boost(X, nullptr, y, params, SplitMode::Exact);
    const BoostEnsemble b = fit_boost(Xc, nullptr, y, params, SplitMode::Exact);
    for (std::size_t i = 0; i < 30; ++i) {
        CHECK(predict_boost(a, X.row_ptr(i), nullptr) ==
              doctest::Approx(predict_boost(b, Xc.row_ptr(i), nullptr)).epsilon(1e-12));
    }
}

TEST_CASE("zero shrinkage pins predictions at the base score") {
    BoostEnsemble e(0.4, 0.0);
    e.add_tree(stump(0, 0.5, -3.0, 5.0));
    e.add_tree(stump(0, 1.5, 2.0, -2.0));
    for (double x : {-1.0, 0.0, 1.0, 2.0}) {
        CHECK(e.score(&x, nullptr, 1) == doctest::Approx(sigmoid(0.4)));
    }
}

TEST_CASE("missing flags on unused features are ignored") {
    BoostEnsemble e(0.0, 0.5);
    e.add_tree(stump(0, 0.5, -1.0, 1.0));
    const double x[2] = {0.2, 9.9};
    const std::uint8_t clear[2] = {0, 0};
    const std::uint8_t flagged[2] = {0, 1};
    CHECK(predict_boost(e, x, clear) == predict_boost(e, x, flagged));
    CHECK(predict_boost(e, x, clear) == doctest::Approx(sigmoid(-0.5)));
}

TEST_CASE("a fully missing row still reaches a leaf in every tree") {
    auto tree = stump(0, 0.5, -1.0, 1.0);
    tree->default_dir = MissingDirection::Left;
    BoostEnsemble e(0.1, 1.0);
    e.add_tree(std::move(tree));
    e.add_tree(stump(1, 0.0, 2.0, -2.0));  // default Right
    const double x[2] = {0.0, 0.0};
    const std::uint8_t gone[2] = {1, 1};
    CHECK(predict_boost(e, x, gone) == doctest::Approx(sigmoid(0.1 + (-1.0) + (-2.0))));
}

TEST_CASE("serialized ensembles predict identically after parsing") {
    Rng rng(71);
    Matrix X(40, 3);
    std::vector<std::uint8_t> mask(40 * 3, 0);
    std::vector<int> y;
    for (std::size_t i = 0; i < 40; ++i) {
        const int label = rng.uniform() < 0.5 ? 1 : 0;
        y.push_back(label);
        for (std::size_t j = 0; j < 3; ++j) {
            X(i, j) = rng.normal() + (j == 0 ? 2.0 * label : 0.0);
            mask[i * 3 + j] = rng.uniform() < 0.15 ? 1 : 0;
        }
    }
    BoostParams params;
    params.n_rounds = 12;
    params.max_depth = 3;
    const BoostEnsemble e = fit_boost(X, &mask, y, params, SplitMode::Exact);
    const std::string text = e.to_json_text();
    const BoostEnsemble back = BoostEnsemble::from_json_text(text);
    CHECK(back.to_json_text() == text);
    for (std::size_t i = 0; i < 40; ++i) {
        const std::uint8_t* miss = mask.data() + i * 3;
        CHECK(predict_boost(back, X.row_ptr(i), miss) ==
              predict_boost(e, X.row_ptr(i), miss));
    }
}
