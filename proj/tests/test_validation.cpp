#include <doctest.h>

#include <algorithm>
#include <memory>
#include <set>
#include <vector>

#include "common.hpp"
#include "learner.hpp"
#include "validation.hpp"

using namespace survkit;

namespace {

class ConstantClassifier : public Classifier {
public:
    explicit ConstantClassifier(double v) : v_(v) {}
    double score(const double*, const std::uint8_t*, std::size_t) const override { return v_; }

private:
    double v_;
};

/// Scores by the first feature scaled by the parameter; deterministic and
/// cheap, which makes harness behavior easy to audit.
LearnerSpec first_feature_learner(std::vector<double> grid) {
    LearnerSpec spec;
    spec.name = "first_feature";
    spec.grid = std::move(grid);
    spec.simplicity = Simplicity::LargerParamSimpler;
    spec.fit = [](const DataView& v, double param, std::uint64_t) {
        class Scaled : public Classifier {
        public:
            explicit Scaled(double s) : s_(s) {}
            double score(const double* x, const std::uint8_t*, std::size_t) const override {
                return s_ * x[0];
            }

        private:
            double s_;
        };
        (void)v;
        return std::make_unique<Scaled>(param);
    };
    return spec;
}

struct ToyData {
    Matrix X;
    std::vector<int> y;
};

ToyData make_toy(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    ToyData d{Matrix(n, 2), {}};
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i % 2 == 0 ? 1 : 0;
        d.y.push_back(label);
        d.X(i, 0) = (label ? 1.0 : -1.0) + rng.normal();
        d.X(i, 1) = rng.normal();
    }
    return d;
}

bool disjoint(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    const std::set<std::size_t> sa(a.begin(), a.end());
    for (std::size_t x : b)
        if (sa.count(x)) return false;
    return true;
}

}  // namespace

TEST_CASE("the split is 80/10/10 by floor") {
    const SplitPlan plan = make_split(10, 1);
    CHECK(plan.train_idx.size() == 8);
    CHECK(plan.val_idx.size() == 1);
    CHECK(plan.test_idx.size() == 1);

    const SplitPlan big = make_split(1393, 5);
    CHECK(big.train_idx.size() == 1114);
    CHECK(big.val_idx.size() == 139);
    CHECK(big.test_idx.size() == 140);
}

TEST_CASE("the split is deterministic, disjoint, and covers everything") {
    const SplitPlan a = make_split(137, 9);
    const SplitPlan b = make_split(137, 9);
    CHECK(a.train_idx == b.train_idx);
    CHECK(a.val_idx == b.val_idx);
    CHECK(a.test_idx == b.test_idx);

    CHECK(disjoint(a.train_idx, a.val_idx));
    CHECK(disjoint(a.train_idx, a.test_idx));
    CHECK(disjoint(a.val_idx, a.test_idx));
    std::set<std::size_t> all;
    for (const auto* part : {&a.train_idx, &a.val_idx, &a.test_idx})
        all.insert(part->begin(), part->end());
    CHECK(all.size() == 137);

    CHECK_THROWS_AS(make_split(9, 0), Error);
}

TEST_CASE("stratified split keeps class shares within one sample") {
    std::vector<int> y(1000);
    for (std::size_t i = 0; i < 1000; ++i) y[i] = i < 650 ? 0 : 1;
    const SplitPlan plan = make_split(1000, 3, y);
    const auto positives = [&](const std::vector<std::size_t>& idx) {
        std::size_t c = 0;
        for (std::size_t i : idx) c += y[i] == 1;
        return c;
    };
    const double global = 0.35;
    for (const auto* part : {&plan.train_idx, &plan.val_idx, &plan.test_idx}) {
        const double expected = global * static_cast<double>(part->size());
        CHECK(std::abs(static_cast<double>(positives(*part)) - expected) <= 1.0);
    }
}

TEST_CASE("folds balance to within one row and cover the index set") {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < 23; ++i) idx.push_back(i * 3);
    const FoldPlan folds = make_folds(idx, 5, 4);
    REQUIRE(folds.folds.size() == 5);
    std::size_t lo = idx.size(), hi = 0, total = 0;
    std::set<std::size_t> all;
    for (const auto& f : folds.folds) {
        lo = std::min(lo, f.size());
        hi = std::max(hi, f.size());
        total += f.size();
        all.insert(f.begin(), f.end());
    }
    CHECK(hi - lo <= 1);
    CHECK(total == idx.size());
    CHECK(all == std::set<std::size_t>(idx.begin(), idx.end()));
}

TEST_CASE("the one-sd rule takes the simplest model within a deviation") {
    AccuracyCurve curve;
    curve.params = {0.01, 0.1, 1.0};
    curve.mean_auc = {0.70, 0.69, 0.60};
    curve.sd_auc = {0.02, 0.02, 0.02};
    CHECK(one_sd_rule(curve, Simplicity::LargerParamSimpler) == 0.1);
    CHECK(one_sd_rule(curve, Simplicity::SmallerParamSimpler) == 0.01);

    AccuracyCurve single;
    single.params = {7.0};
    single.mean_auc = {0.5};
    single.sd_auc = {0.0};
    CHECK(one_sd_rule(single, Simplicity::LargerParamSimpler) == 7.0);

    AccuracyCurve flat;
    flat.params = {1.0, 2.0, 3.0};
    flat.mean_auc = {0.6, 0.6, 0.6};
    flat.sd_auc = {0.01, 0.01, 0.01};
    CHECK(one_sd_rule(flat, Simplicity::LargerParamSimpler) == 3.0);
    CHECK(one_sd_rule(flat, Simplicity::SmallerParamSimpler) == 1.0);
}

TEST_CASE("accuracy curve csv has one row per parameter") {
    AccuracyCurve curve;
    curve.params = {1.0, 2.0};
    curve.mean_auc = {0.6, 0.7};
    curve.sd_auc = {0.01, 0.02};
    const std::string csv = curve.to_csv();
    CHECK(csv.rfind("param,mean_auc,sd_auc\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("a constant learner scores half everywhere in nested cv") {
    const ToyData d = make_toy(80, 2);
    LabeledDataset data{&d.X, nullptr, d.y};
    LearnerSpec spec;
    spec.name = "constant";
    spec.grid = {1.0};
    spec.fit = [](const DataView&, double, std::uint64_t) {
        return std::make_unique<ConstantClassifier>(0.5);
    };
    const CvReport report = nested_cv(data, make_split(80, 1), spec, 1);
    REQUIRE(report.folds.size() == 5);
    for (const auto& fold : report.folds) CHECK(fold.val_auc == 0.5);
    CHECK(report.test_auc == 0.5);
    CHECK(report.best_param == 1.0);
}

TEST_CASE("nested cv never mixes evaluation rows into training sets") {
    const ToyData d = make_toy(100, 4);
    LabeledDataset data{&d.X, nullptr, d.y};
    const SplitPlan split = make_split(100, 7);
    const CvReport report = nested_cv(data, split, first_feature_learner({0.5, 1.0}), 7);

    REQUIRE(report.folds.size() == 5);
    for (const auto& fold : report.folds) {
        CHECK(disjoint(fold.heldout_idx, split.val_idx));
        CHECK(disjoint(fold.heldout_idx, split.test_idx));
        REQUIRE(fold.inner_train_sets.size() == fold.inner_eval_sets.size());
        for (std::size_t g = 0; g < fold.inner_train_sets.size(); ++g) {
            CHECK(disjoint(fold.inner_train_sets[g], fold.heldout_idx));
            CHECK(disjoint(fold.inner_train_sets[g], split.val_idx));
            CHECK(disjoint(fold.inner_train_sets[g], split.test_idx));
            CHECK(disjoint(fold.inner_train_sets[g], fold.inner_eval_sets[g]));
        }
    }
}

TEST_CASE("the harness is deterministic end to end") {
    const ToyData d = make_toy(90, 6);
    LabeledDataset data{&d.X, nullptr, d.y};
    const SplitPlan split = make_split(90, 11);
    const LearnerSpec spec = first_feature_learner({0.5, 1.0, 2.0});
    const CvReport a = nested_cv(data, split, spec, 11);
    const CvReport b = nested_cv(data, split, spec, 11);
    CHECK(a.to_json_text() == b.to_json_text());
}

TEST_CASE("threaded and single-threaded harness runs agree") {
    const ToyData d = make_toy(90, 8);
    LabeledDataset data{&d.X, nullptr, d.y};
    const SplitPlan split = make_split(90, 2);
    const LearnerSpec spec = first_feature_learner({0.5, 1.0, 2.0});
    const CvReport a = nested_cv(data, split, spec, 3, 1);
    const CvReport b = nested_cv(data, split, spec, 3, 4);
    CHECK(a.to_json_text() == b.to_json_text());
}

TEST_CASE("a single-point grid wins by default") {
    const ToyData d = make_toy(60, 5);
    LabeledDataset data{&d.X, nullptr, d.y};
    const CvReport report =
        nested_cv(data, make_split(60, 9), first_feature_learner({2.5}), 9);
    CHECK(report.best_param == 2.5);
    for (const auto& fold : report.folds) CHECK(fold.chosen_param == 2.5);
}

TEST_CASE("test scores align with the recorded test labels") {
    const ToyData d = make_toy(70, 12);
    LabeledDataset data{&d.X, nullptr, d.y};
    const SplitPlan split = make_split(70, 13);
    const CvReport report = nested_cv(data, split, first_feature_learner({1.0}), 13);
    REQUIRE(report.test_scores.size() == split.test_idx.size());
    REQUIRE(report.test_labels.size() == split.test_idx.size());
    for (std::size_t i = 0; i < split.test_idx.size(); ++i) {
        CHECK(report.test_labels[i] == d.y[split.test_idx[i]]);
    }
}

TEST_CASE("repeated evaluation of a deterministic learner has zero spread") {
    const ToyData d = make_toy(60, 14);
    LabeledDataset data{&d.X, nullptr, d.y};
    const SplitPlan split = make_split(60, 2);
    const RepeatedEval eval =
        repeated_eval(data, split, first_feature_learner({1.0}), 1.0, {1, 2, 3});
    CHECK(eval.val_aucs.size() == 3);
    CHECK(eval.val_sd == 0.0);
    CHECK(eval.test_sd == 0.0);

    const RepeatedEval one = repeated_eval(data, split, first_feature_learner({1.0}), 1.0, {5});
    CHECK(one.val_sd == 0.0);
}
