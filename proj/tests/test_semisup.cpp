#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "baselines.hpp"
#include "common.hpp"
#include "semisup.hpp"

using namespace survkit;

namespace {

class ConstScorer : public Classifier {
public:
    explicit ConstScorer(double p) : p_(p) {}
    double score(const double*, const std::uint8_t*, std::size_t) const override { return p_; }

private:
    double p_;
};

BaseFitFn nearest_neighbor() {
    return [](const DataView& dv) -> std::unique_ptr<Classifier> {
        KnnConfig cfg;
        cfg.k = 1;
        return std::make_unique<KnnClassifier>(dv.dense(), dv.y, cfg);
    };
}

/// Two well-separated clusters; the first n_labeled rows alternate labels.
Matrix clusters(std::size_t n_labeled, std::size_t n_unlabeled, LabeledPool& L, UnlabeledPool& U,
                std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t n = n_labeled + n_unlabeled;
    Matrix X(n, 2);
    L = {};
    U = {};
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i % 2 == 0 ? 1 : 0;
        const double cx = label == 1 ? 2.0 : -2.0;
        X(i, 0) = cx + 0.3 * rng.normal();
        X(i, 1) = cx + 0.3 * rng.normal();
        if (i < n_labeled) {
            L.rows.push_back(i);
            L.labels.push_back(label);
        } else {
            U.rows.push_back(i);
        }
    }
    return X;
}

std::vector<int> hard_on(const Classifier& model, const Matrix& X,
                         const std::vector<std::size_t>& rows) {
    std::vector<int> out;
    for (double p : score_rows(model, X, nullptr, rows)) out.push_back(p >= 0.5 ? 1 : 0);
    return out;
}

}  // namespace

TEST_CASE("without unlabeled rows self-training is the plain base fit") {
    LabeledPool L;
    UnlabeledPool U;
    const Matrix X = clusters(8, 0, L, U, 1);
    SelfTrainConfig cfg;
    const SelfTrainResult r = self_train(nearest_neighbor(), X, nullptr, L, U, cfg);
    CHECK(r.converged);

    const auto base = nearest_neighbor()(DataView{&X, nullptr, L.rows, L.labels});
    Rng rng(9);
    for (int t = 0; t < 20; ++t) {
        const double q[2] = {3.0 * rng.normal(), 3.0 * rng.normal()};
        CHECK(r.model->score(q, nullptr, 2) == base->score(q, nullptr, 2));
    }
}

TEST_CASE("a confidence bar of one admits nothing") {
    LabeledPool L;
    UnlabeledPool U;
    const Matrix X = clusters(6, 14, L, U, 2);
    SelfTrainConfig cfg;
    cfg.confidence_alpha = 1.0;
    const SelfTrainResult r = self_train(nearest_neighbor(), X, nullptr, L, U, cfg);
    CHECK(r.converged);
    CHECK(r.iterations == 1);

    const auto base = nearest_neighbor()(DataView{&X, nullptr, L.rows, L.labels});
    Rng rng(10);
    for (int t = 0; t < 20; ++t) {
        const double q[2] = {3.0 * rng.normal(), 3.0 * rng.normal()};
        CHECK(r.model->score(q, nullptr, 2) == base->score(q, nullptr, 2));
    }
}

TEST_CASE("two clean clusters converge within three refits to a fixed point") {
    LabeledPool L;
    UnlabeledPool U;
    const Matrix X = clusters(4, 20, L, U, 3);
    SelfTrainConfig cfg;
    cfg.confidence_alpha = 0.8;
    const SelfTrainResult r = self_train(nearest_neighbor(), X, nullptr, L, U, cfg);
    CHECK(r.converged);
    CHECK(r.iterations <= 3);

    // refitting on the set the final model would assemble changes nothing
    const std::vector<double> probs = score_rows(*r.model, X, nullptr, U.rows);
    DataView again{&X, nullptr, L.rows, L.labels};
    for (std::size_t i = 0; i < U.rows.size(); ++i) {
        if (std::max(probs[i], 1.0 - probs[i]) > cfg.confidence_alpha) {
            again.rows.push_back(U.rows[i]);
            again.y.push_back(probs[i] >= 0.5 ? 1 : 0);
        }
    }
    const auto refit = nearest_neighbor()(again);
    CHECK(hard_on(*refit, X, U.rows) == hard_on(*r.model, X, U.rows));
}

TEST_CASE("self-training rejects broken inputs") {
    LabeledPool L;
    UnlabeledPool U;
    const Matrix X = clusters(4, 4, L, U, 4);
    SelfTrainConfig cfg;

    SelfTrainConfig low = cfg;
    low.confidence_alpha = 0.5;
    CHECK_THROWS_AS(self_train(nearest_neighbor(), X, nullptr, L, U, low), Error);

    SelfTrainConfig none = cfg;
    none.max_iters = 0;
    CHECK_THROWS_AS(self_train(nearest_neighbor(), X, nullptr, L, U, none), Error);

    LabeledPool empty;
    CHECK_THROWS_AS(self_train(nearest_neighbor(), X, nullptr, empty, U, cfg), Error);

    LabeledPool one_sided;
    one_sided.rows = {0, 2};
    one_sided.labels = {1, 1};
    CHECK_THROWS_AS(self_train(nearest_neighbor(), X, nullptr, one_sided, U, cfg), Error);

    UnlabeledPool overlapping;
    overlapping.rows = {0};
    CHECK_THROWS_AS(self_train(nearest_neighbor(), X, nullptr, L, overlapping, cfg), Error);
}

TEST_CASE("views that always disagree add no rows") {
    Matrix X(4, 2);
    // labeled rows carry consistent features; unlabeled rows conflict
    X(0, 0) = 0.0;
    X(0, 1) = 0.0;
    X(1, 0) = 1.0;
    X(1, 1) = 1.0;
    X(2, 0) = 1.0;
    X(2, 1) = 0.0;
    X(3, 0) = 0.9;
    X(3, 1) = 0.1;
    LabeledPool L{{0, 1}, {0, 1}};
    UnlabeledPool U{{2, 3}};
    ViewSpec views;
    views.views = {{0}, {1}};
    views.max_rounds = 5;

    const CoTrainResult r = co_train(nearest_neighbor(), X, nullptr, L, U, views);
    CHECK(r.rounds_run == 1);
    REQUIRE(r.train_sizes.size() == 1);
    CHECK(r.train_sizes[0] == 2);
    CHECK(r.models.size() == 2);
}

TEST_CASE("without unlabeled rows co-training fits each view once on L") {
    LabeledPool L;
    UnlabeledPool U;
    const Matrix X = clusters(8, 0, L, U, 5);
    ViewSpec views;
    views.views = {{0}, {1}};
    const CoTrainResult r = co_train(nearest_neighbor(), X, nullptr, L, U, views);
    CHECK(r.rounds_run == 1);
    CHECK(r.train_sizes == std::vector<std::size_t>{8});

    // the bundled vote equals the mean of per-view base fits on L
    Matrix Xa(8, 1), Xb(8, 1);
    for (std::size_t i = 0; i < 8; ++i) {
        Xa(i, 0) = X(i, 0);
        Xb(i, 0) = X(i, 1);
    }
    const auto fa = nearest_neighbor()(DataView{&Xa, nullptr, L.rows, L.labels});
    const auto fb = nearest_neighbor()(DataView{&Xb, nullptr, L.rows, L.labels});
    Rng rng(11);
    for (int t = 0; t < 15; ++t) {
        const double q[2] = {3.0 * rng.normal(), 3.0 * rng.normal()};
        const double expected =
            0.5 * (fa->score(&q[0], nullptr, 1) + fb->score(&q[1], nullptr, 1));
        CHECK(vote_predict(r.models, q, nullptr, 2, r.views) == doctest::Approx(expected));
    }
}

TEST_CASE("agreeing views absorb the whole unlabeled pool") {
    LabeledPool L;
    UnlabeledPool U;
    const Matrix X = clusters(4, 16, L, U, 6);
    ViewSpec views;
    views.views = {{0}, {1}};
    const CoTrainResult r = co_train(nearest_neighbor(), X, nullptr, L, U, views);
    REQUIRE_FALSE(r.train_sizes.empty());
    for (std::size_t k = 1; k < r.train_sizes.size(); ++k) {
        CHECK(r.train_sizes[k] >= r.train_sizes[k - 1]);
    }
    CHECK(r.train_sizes.back() == 20);
    CHECK(r.rounds_run == r.train_sizes.size());
}

TEST_CASE("soft and hard votes average as documented") {
    std::vector<std::unique_ptr<Classifier>> two;
    two.push_back(std::make_unique<ConstScorer>(0.9));
    two.push_back(std::make_unique<ConstScorer>(0.1));
    ViewSpec pair;
    pair.views = {{0}, {1}};
    const double x[2] = {0.0, 0.0};
    CHECK(vote_predict(two, x, nullptr, 2, pair, VoteMode::Soft) == doctest::Approx(0.5));
    CHECK(vote_predict(two, x, nullptr, 2, pair, VoteMode::Hard) == doctest::Approx(0.5));

    std::vector<std::unique_ptr<Classifier>> three;
    three.push_back(std::make_unique<ConstScorer>(0.9));
    three.push_back(std::make_unique<ConstScorer>(0.6));
    three.push_back(std::make_unique<ConstScorer>(0.1));
    ViewSpec triple;
    triple.views = {{0}, {1}, {2}};
    const double x3[3] = {0.0, 0.0, 0.0};
    CHECK(vote_predict(three, x3, nullptr, 3, triple, VoteMode::Hard) ==
          doctest::Approx(2.0 / 3.0));

    CHECK_THROWS_AS(vote_predict(three, x, nullptr, 2, pair), Error);
}

TEST_CASE("the vote classifier is the functional form of vote_predict") {
    std::vector<std::unique_ptr<Classifier>> models;
    models.push_back(std::make_unique<ConstScorer>(0.8));
    models.push_back(std::make_unique<ConstScorer>(0.4));
    ViewSpec views;
    views.views = {{0}, {1}};
    const VoteClassifier vc(std::move(models), views);
    const double x[2] = {1.0, 2.0};
    CHECK(vc.score(x, nullptr, 2) == doctest::Approx(0.6));
}

TEST_CASE("two-view enumeration covers every unordered split of the groups") {
    const std::vector<std::vector<std::size_t>> two = {{0, 1}, {2}};
    const auto p2 = enumerate_two_views(two);
    REQUIRE(p2.size() == 1);
    CHECK(p2[0].views[0] == std::vector<std::size_t>{0, 1});
    CHECK(p2[0].views[1] == std::vector<std::size_t>{2});

    const std::vector<std::vector<std::size_t>> three = {{0}, {1, 2}, {3}};
    const auto p3 = enumerate_two_views(three);
    REQUIRE(p3.size() == 3);
    for (const auto& spec : p3) {
        REQUIRE(spec.views.size() == 2);
        CHECK_FALSE(spec.views[0].empty());
        CHECK_FALSE(spec.views[1].empty());
        std::vector<std::size_t> all = spec.views[0];
        all.insert(all.end(), spec.views[1].begin(), spec.views[1].end());
        std::sort(all.begin(), all.end());
        CHECK(all == std::vector<std::size_t>{0, 1, 2, 3});
        // group 0 is pinned to the first view
        CHECK(std::find(spec.views[0].begin(), spec.views[0].end(), 0) != spec.views[0].end());
    }

    const std::vector<std::vector<std::size_t>> four = {{0}, {1}, {2}, {3}};
    CHECK(enumerate_two_views(four).size() == 7);

    CHECK_THROWS_AS(enumerate_two_views({{0}}), Error);
    CHECK_THROWS_AS(enumerate_two_views({{0}, {}}), Error);
}

TEST_CASE("co-training refuses malformed view layouts") {
    LabeledPool L;
    UnlabeledPool U;
    const Matrix X = clusters(4, 4, L, U, 7);
    ViewSpec solo;
    solo.views = {{0, 1}};
    CHECK_THROWS_AS(co_train(nearest_neighbor(), X, nullptr, L, U, solo), Error);
    ViewSpec wide;
    wide.views = {{0}, {5}};
    CHECK_THROWS_AS(co_train(nearest_neighbor(), X, nullptr, L, U, wide), Error);
}
