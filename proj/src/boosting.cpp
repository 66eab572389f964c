#include "boosting.hpp"

#include <algorithm>
#include <cmath>

#include "linear.hpp"
#include "tree_json.hpp"

namespace survkit {

GradHess logistic_grad_hess(double pred_prob, int label) {
    require(pred_prob > 0.0 && pred_prob < 1.0, ErrorCode::Validation,
            "predicted probability must lie in (0, 1)");
    require(label == 0 || label == 1, ErrorCode::Validation, "labels must be 0/1");
    return {pred_prob - static_cast<double>(label), pred_prob * (1.0 - pred_prob)};
}

double leaf_weight(double G, double H, double lambda) {
    require(H + lambda > 0.0, ErrorCode::Numeric, "leaf_weight: H + lambda must be positive");
    return -G / (H + lambda);
}

double split_gain(double GL, double HL, double GR, double HR, double lambda, double gamma) {
    const double parent = GL + GR, hp = HL + HR;
    return 0.5 * (GL * GL / (HL + lambda) + GR * GR / (HR + lambda) -
                  parent * parent / (hp + lambda)) -
           gamma;
}

namespace {

bool better(const SplitCandidate& a, const SplitCandidate& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    if (a.feature != b.feature) return a.feature < b.feature;
    if (a.threshold != b.threshold) return a.threshold < b.threshold;
    return a.default_dir == MissingDirection::Right && b.default_dir == MissingDirection::Left;
}

struct FeatureScan {
    std::vector<std::pair<double, std::size_t>> present;  // (value, row) sorted
    double g_miss = 0.0, h_miss = 0.0;
    double g_total = 0.0, h_total = 0.0;
};

FeatureScan scan_feature(const std::vector<std::size_t>& rows, const Matrix& X,
                         const std::vector<std::uint8_t>* missing,
                         const std::vector<GradHess>& gh, std::size_t j) {
    FeatureScan s;
    s.present.reserve(rows.size());
    for (std::size_t r : rows) {
        s.g_total += gh[r].g;
        s.h_total += gh[r].h;
        if (missing != nullptr && (*missing)[r * X.cols() + j]) {
            s.g_miss += gh[r].g;
            s.h_miss += gh[r].h;
        } else {
            s.present.emplace_back(X(r, j), r);
        }
    }
    std::sort(s.present.begin(), s.present.end());
    return s;
}

/// Evaluates both missing directions at one boundary and folds the winners
/// into best. gl/hl are prefix sums over present rows left of the boundary.
void consider_boundary(std::size_t feature, double threshold, double gl, double hl,
                       const FeatureScan& s, const BoostParams& params,
                       std::optional<SplitCandidate>& best) {
    const struct {
        MissingDirection dir;
        double gl, hl;
    } passes[2] = {
        {MissingDirection::Right, gl, hl},
        {MissingDirection::Left, gl + s.g_miss, hl + s.h_miss},
    };
    for (const auto& pass : passes) {
        const double gr = s.g_total - pass.gl, hr = s.h_total - pass.hl;
        if (pass.hl < params.min_child_weight || hr < params.min_child_weight) continue;
        SplitCandidate cand;
        cand.feature = feature;
        cand.threshold = threshold;
        cand.gain = split_gain(pass.gl, pass.hl, gr, hr, params.lambda, params.gamma);
        cand.default_dir = pass.dir;
        if (!best || better(cand, *best)) best = cand;
    }
}

std::optional<SplitCandidate> best_split(const std::vector<std::size_t>& rows, const Matrix& X,
                                         const std::vector<std::uint8_t>* missing,
                                         const std::vector<GradHess>& gh,
                                         const BoostParams& params, SplitMode mode) {
    require(!rows.empty(), ErrorCode::Validation, "cannot split an empty node");
    std::optional<SplitCandidate> best;
    for (std::size_t j = 0; j < X.cols(); ++j) {
        const FeatureScan s = scan_feature(rows, X, missing, gh, j);
        if (s.present.size() < 2) continue;

        std::vector<double> wanted;  // split values for approx mode, ascending
        if (mode == SplitMode::Approx) {
            std::vector<double> values(s.present.size()), weights(s.present.size());
            for (std::size_t i = 0; i < s.present.size(); ++i) {
                values[i] = s.present[i].first;
                weights[i] = gh[s.present[i].second].h;
            }
            wanted = weighted_quantile_candidates(std::move(values), std::move(weights),
                                                  params.approx_epsilon);
            if (wanted.empty()) continue;
        }

        double gl = 0.0, hl = 0.0;
        std::size_t next_wanted = 0;
        for (std::size_t i = 0; i + 1 < s.present.size(); ++i) {
            gl += gh[s.present[i].second].g;
            hl += gh[s.present[i].second].h;
            if (s.present[i].first == s.present[i + 1].first) continue;
            if (mode == SplitMode::Approx) {
                // advance to this boundary only if a candidate value lands in
                // the left block
                while (next_wanted < wanted.size() && wanted[next_wanted] < s.present[i].first) {
                    ++next_wanted;
                }
                if (next_wanted >= wanted.size() || wanted[next_wanted] != s.present[i].first) {
                    continue;
                }
                ++next_wanted;
            }
            const double threshold = 0.5 * (s.present[i].first + s.present[i + 1].first);
            consider_boundary(j, threshold, gl, hl, s, params, best);
        }
    }
    if (best && best->gain <= 0.0) return std::nullopt;
    return best;
}

struct BoostTreeBuilder {
    const Matrix& X;
    const std::vector<std::uint8_t>* missing;
    const std::vector<GradHess>& gh;
    const BoostParams& params;
    SplitMode mode;

    std::unique_ptr<TreeNode> grow(const std::vector<std::size_t>& rows, std::size_t depth) {
        double G = 0.0, H = 0.0;
        for (std::size_t r : rows) {
            G += gh[r].g;
            H += gh[r].h;
        }
        auto node = std::make_unique<TreeNode>();
        node->value = leaf_weight(G, H, params.lambda);
        if (depth >= params.max_depth) return node;
        const auto cand = best_split(rows, X, missing, gh, params, mode);
        if (!cand) return node;

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows) {
            const bool miss = missing != nullptr && (*missing)[r * X.cols() + cand->feature];
            const bool go_left = miss ? cand->default_dir == MissingDirection::Left
                                      : X(r, cand->feature) < cand->threshold;
            (go_left ? left_rows : right_rows).push_back(r);
        }
        node->is_leaf = false;
        node->feature = cand->feature;
        node->threshold = cand->threshold;
        node->default_dir = cand->default_dir;
        node->left = grow(left_rows, depth + 1);
        node->right = grow(right_rows, depth + 1);
        return node;
    }
};

}  // namespace

std::optional<SplitCandidate> exact_greedy_split(const std::vector<std::size_t>& rows,
                                                 const Matrix& X,
                                                 const std::vector<std::uint8_t>* missing,
                                                 const std::vector<GradHess>& gh,
                                                 const BoostParams& params) {
    return best_split(rows, X, missing, gh, params, SplitMode::Exact);
}

std::optional<SplitCandidate> approx_greedy_split(const std::vector<std::size_t>& rows,
                                                  const Matrix& X,
                                                  const std::vector<std::uint8_t>* missing,
                                                  const std::vector<GradHess>& gh,
                                                  const BoostParams& params) {
    return best_split(rows, X, missing, gh, params, SplitMode::Approx);
}

std::vector<double> weighted_quantile_candidates(std::vector<double> values,
                                                 std::vector<double> weights, double epsilon) {
    require(values.size() == weights.size(), ErrorCode::Validation,
            "values and weights must align");
    require(!values.empty(), ErrorCode::Validation, "empty value list");
    require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::Validation, "epsilon outside (0, 1)");

    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    double total = 0.0;
    for (double w : weights) {
        require(w >= 0.0, ErrorCode::Validation, "negative weight");
        total += w;
    }
    require(total > 0.0, ErrorCode::Validation, "weights sum to zero");

    const double vmax = values[order.back()];
    std::vector<double> out;
    std::size_t idx = 0;
    double cum = weights[order[0]];
    for (std::size_t k = 1; static_cast<double>(k) * epsilon < 1.0 - 1e-12; ++k) {
        const double target = static_cast<double>(k) * epsilon * total;
        while (cum < target - 1e-12 && idx + 1 < order.size()) {
            ++idx;
            cum += weights[order[idx]];
        }
        const double v = values[order[idx]];
        if (v == vmax) continue;
        if (out.empty() || out.back() != v) out.push_back(v);
    }
    return out;
}

double BoostEnsemble::margin(const double* x, const std::uint8_t* miss) const {
    double total = 0.0;
    for (const auto& tree : trees_) total += predict_tree(*tree, x, miss);
    return base_score_ + eta_ * total;
}

double BoostEnsemble::score(const double* x, const std::uint8_t* miss, std::size_t) const {
    return sigmoid(margin(x, miss));
}

std::string BoostEnsemble::to_json_text() const {
    nlohmann::ordered_json j;
    j["base_score"] = base_score_;
    j["eta"] = eta_;
    j["trees"] = nlohmann::ordered_json::array();
    for (const auto& tree : trees_) j["trees"].push_back(detail::tree_to_json_obj(*tree));
    return j.dump(2) + "\n";
}

BoostEnsemble BoostEnsemble::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    BoostEnsemble out(j.at("base_score").get<double>(), j.at("eta").get<double>());
    for (const auto& t : j.at("trees")) out.add_tree(detail::tree_from_json_obj(t));
    return out;
}

BoostEnsemble fit_boost(const Matrix& X, const std::vector<std::uint8_t>* missing,
                        const std::vector<int>& y, const BoostParams& params, SplitMode mode) {
    const std::size_t n = X.rows();
    require(n > 0 && X.cols() > 0, ErrorCode::Validation, "empty design matrix");
    require(y.size() == n, ErrorCode::Validation, "label count does not match rows");
    if (missing != nullptr) {
        require(missing->size() == n * X.cols(), ErrorCode::Validation,
                "missing mask does not match matrix shape");
    }
    require(params.lambda >= 0.0, ErrorCode::Validation, "negative lambda");
    require(params.gamma >= 0.0, ErrorCode::Validation, "negative gamma");
    require(params.eta > 0.0 && params.eta <= 1.0, ErrorCode::Validation, "eta outside (0, 1]");

    double positives = 0.0;
    for (int v : y) {
        require(v == 0 || v == 1, ErrorCode::Validation, "labels must be 0/1");
        positives += v;
    }
    const double rate = std::clamp(positives / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
    BoostEnsemble ensemble(std::log(rate / (1.0 - rate)), params.eta);

    std::vector<std::size_t> all_rows(n);
    for (std::size_t i = 0; i < n; ++i) all_rows[i] = i;
    std::vector<double> margins(n, ensemble.base_score());
    std::vector<GradHess> gh(n);

    BoostTreeBuilder builder{X, missing, gh, params, mode};
    for (std::size_t round = 0; round < params.n_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) gh[i] = logistic_grad_hess(sigmoid(margins[i]), y[i]);
        auto tree = builder.grow(all_rows, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint8_t* miss = missing ? missing->data() + i * X.cols() : nullptr;
            margins[i] += params.eta * predict_tree(*tree, X.row_ptr(i), miss);
        }
        ensemble.add_tree(std::move(tree));
    }
    return ensemble;
}

double predict_boost(const BoostEnsemble& ensemble, const double* x, const std::uint8_t* miss) {
    return ensemble.score(x, miss, 0);
}

}  // namespace survkit
