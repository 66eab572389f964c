#include "semisup.hpp"

#include <algorithm>
#include <set>

namespace survkit {

namespace {

void check_pools(const Matrix& X, const LabeledPool& L, const UnlabeledPool& U) {
    require(!L.rows.empty(), ErrorCode::Validation, "labeled pool is empty");
    require(L.rows.size() == L.labels.size(), ErrorCode::Validation,
            "labeled pool rows and labels must align");
    bool pos = false, neg = false;
    for (int v : L.labels) {
        require(v == 0 || v == 1, ErrorCode::Validation, "labels must be 0/1");
        (v ? pos : neg) = true;
    }
    require(pos && neg, ErrorCode::Validation, "labeled pool needs both classes");
    std::set<std::size_t> seen;
    for (std::size_t r : L.rows) {
        require(r < X.rows(), ErrorCode::Validation, "labeled row index out of range");
        require(seen.insert(r).second, ErrorCode::Validation, "duplicate labeled row");
    }
    for (std::size_t r : U.rows) {
        require(r < X.rows(), ErrorCode::Validation, "unlabeled row index out of range");
        require(seen.insert(r).second, ErrorCode::Validation,
                "row appears in both labeled and unlabeled pools");
    }
}

}  // namespace

SelfTrainResult self_train(const BaseFitFn& fit, const Matrix& X,
                           const std::vector<std::uint8_t>* missing, const LabeledPool& L,
                           const UnlabeledPool& U, const SelfTrainConfig& cfg) {
    require(cfg.confidence_alpha > 0.5 && cfg.confidence_alpha <= 1.0, ErrorCode::Validation,
            "confidence_alpha outside (0.5, 1]");
    require(cfg.max_iters >= 1, ErrorCode::Validation, "max_iters must be at least 1");
    check_pools(X, L, U);

    SelfTrainResult result;
    result.model = fit(DataView{&X, missing, L.rows, L.labels});
    std::vector<double> probs = score_rows(*result.model, X, missing, U.rows);

    const auto hard = [](const std::vector<double>& p) {
        std::vector<int> out(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= 0.5 ? 1 : 0;
        return out;
    };

    std::vector<int> prev = hard(probs);
    for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
        DataView augmented{&X, missing, L.rows, L.labels};
        for (std::size_t i = 0; i < U.rows.size(); ++i) {
            const double confidence = std::max(probs[i], 1.0 - probs[i]);
            if (confidence > cfg.confidence_alpha) {
                augmented.rows.push_back(U.rows[i]);
                augmented.y.push_back(prev[i]);
            }
        }
        result.model = fit(augmented);
        result.iterations = iter + 1;
        probs = score_rows(*result.model, X, missing, U.rows);
        std::vector<int> cur = hard(probs);
        if (cur == prev) {
            result.converged = true;
            break;
        }
        prev = std::move(cur);
    }
    return result;
}

namespace {

void check_views(const Matrix& X, const ViewSpec& views) {
    require(views.n_views() >= 2, ErrorCode::Validation, "need at least two views");
    for (std::size_t k = 0; k < views.n_views(); ++k) {
        require(!views.views[k].empty(), ErrorCode::Validation,
                "view " + std::to_string(k) + " is empty");
        for (std::size_t j : views.views[k]) {
            require(j < X.cols(), ErrorCode::Validation,
                    "view " + std::to_string(k) + " references feature " + std::to_string(j) +
                        " beyond matrix width");
        }
    }
}

Matrix restrict_columns(const Matrix& X, const std::vector<std::size_t>& cols) {
    Matrix out(X.rows(), cols.size());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) out(i, c) = X(i, cols[c]);
    }
    return out;
}

std::vector<std::uint8_t> restrict_mask(const std::vector<std::uint8_t>& mask, std::size_t width,
                                        const std::vector<std::size_t>& cols) {
    const std::size_t n = mask.size() / width;
    std::vector<std::uint8_t> out(n * cols.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out[i * cols.size() + c] = mask[i * width + cols[c]];
        }
    }
    return out;
}

}  // namespace

CoTrainResult co_train(const BaseFitFn& fit, const Matrix& X,
                       const std::vector<std::uint8_t>* missing, const LabeledPool& L,
                       const UnlabeledPool& U, const ViewSpec& views) {
    check_pools(X, L, U);
    check_views(X, views);
    const std::size_t n_views = views.n_views();

    std::vector<Matrix> Xv;
    std::vector<std::vector<std::uint8_t>> Mv;
    for (std::size_t k = 0; k < n_views; ++k) {
        Xv.push_back(restrict_columns(X, views.views[k]));
        if (missing != nullptr) Mv.push_back(restrict_mask(*missing, X.cols(), views.views[k]));
    }

    CoTrainResult result;
    result.views = views;
    std::vector<std::size_t> train_rows = L.rows;
    std::vector<int> train_labels = L.labels;
    std::vector<std::size_t> remaining = U.rows;

    for (std::size_t round = 1; round <= views.max_rounds; ++round) {
        result.models.clear();
        for (std::size_t k = 0; k < n_views; ++k) {
            DataView dv{&Xv[k], missing ? &Mv[k] : nullptr, train_rows, train_labels};
            if (!dv.has_both_classes()) {
                fail(ErrorCode::Validation, "view " + std::to_string(k) +
                                                " lost a class at round " +
                                                std::to_string(round));
            }
            result.models.push_back(fit(dv));
        }
        result.rounds_run = round;

        std::vector<std::vector<int>> votes(n_views);
        for (std::size_t k = 0; k < n_views; ++k) {
            const std::vector<double> p =
                score_rows(*result.models[k], Xv[k], missing ? &Mv[k] : nullptr, remaining);
            votes[k].resize(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) votes[k][i] = p[i] >= 0.5 ? 1 : 0;
        }

        std::vector<std::size_t> still;
        std::size_t added = 0;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            bool agree = true;
            for (std::size_t k = 1; k < n_views && agree; ++k) {
                agree = votes[k][i] == votes[0][i];
            }
            if (agree) {
                train_rows.push_back(remaining[i]);
                train_labels.push_back(votes[0][i]);
                ++added;
            } else {
                still.push_back(remaining[i]);
            }
        }
        remaining = std::move(still);
        result.train_sizes.push_back(train_rows.size());
        if (added == 0 || remaining.empty()) break;
    }
    return result;
}

double vote_predict(const std::vector<std::unique_ptr<Classifier>>& models, const double* x,
                    const std::uint8_t* miss, std::size_t n, const ViewSpec& views,
                    VoteMode mode) {
    require(models.size() == views.n_views() && !models.empty(), ErrorCode::Validation,
            "one classifier per view required");
    double total = 0.0;
    std::vector<double> buf;
    std::vector<std::uint8_t> mbuf;
    for (std::size_t k = 0; k < models.size(); ++k) {
        const auto& cols = views.views[k];
        buf.resize(cols.size());
        mbuf.resize(cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c) {
            require(cols[c] < n, ErrorCode::Validation, "view feature beyond input width");
            buf[c] = x[cols[c]];
            mbuf[c] = miss != nullptr ? miss[cols[c]] : 0;
        }
        const double p = models[k]->score(buf.data(), miss ? mbuf.data() : nullptr, buf.size());
        total += mode == VoteMode::Soft ? p : (p >= 0.5 ? 1.0 : 0.0);
    }
    return total / static_cast<double>(models.size());
}

std::vector<ViewSpec> enumerate_two_views(const std::vector<std::vector<std::size_t>>& groups,
                                          std::size_t max_rounds) {
    require(groups.size() >= 2, ErrorCode::Validation, "need at least two feature groups");
    require(groups.size() <= 24, ErrorCode::Validation, "too many groups to enumerate");
    for (const auto& g : groups) {
        require(!g.empty(), ErrorCode::Validation, "feature group is empty");
    }
    const std::size_t g = groups.size();
    const std::size_t limit = std::size_t{1} << (g - 1);

    std::vector<ViewSpec> out;
    for (std::size_t m = 0; m + 1 < limit; ++m) {
        // group 0 always joins view A, killing the swap symmetry
        std::vector<std::size_t> a, b;
        for (std::size_t k = 0; k < g; ++k) {
            const bool in_a = k == 0 || (k >= 1 && (m >> (k - 1) & 1));
            auto& dst = in_a ? a : b;
            dst.insert(dst.end(), groups[k].begin(), groups[k].end());
        }
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        ViewSpec spec;
        spec.views = {std::move(a), std::move(b)};
        spec.max_rounds = max_rounds;
        out.push_back(std::move(spec));
    }
    return out;
}

}  // namespace survkit
