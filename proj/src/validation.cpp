#include "validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "metrics.hpp"

namespace survkit {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 step over seed ^ salt
    std::uint64_t z = (seed ^ salt) + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    return stddev_of(v, 1);
}

}  // namespace

SplitPlan make_split(std::size_t n, std::uint64_t seed,
                     const std::optional<std::vector<int>>& stratify) {
    require(n >= 10, ErrorCode::Validation,
            "make_split needs at least 10 rows, got " + std::to_string(n));
    const std::size_t n_train = (n * 8) / 10;
    const std::size_t n_val = n / 10;

    SplitPlan plan;
    plan.seed = seed;
    Rng rng(seed);

    if (!stratify) {
        std::vector<std::size_t> perm = rng.permutation(n);
        plan.train_idx.assign(perm.begin(), perm.begin() + n_train);
        plan.val_idx.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
        plan.test_idx.assign(perm.begin() + n_train + n_val, perm.end());
        return plan;
    }

    require(stratify->size() == n, ErrorCode::Validation,
            "stratify vector length does not match n");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < n; ++i) by_class[(*stratify)[i]].push_back(i);
    for (auto& [cls, idx] : by_class) rng.shuffle(idx);

    // Largest-remainder allocation keeps every part's class share within one
    // sample of the global share while hitting the exact part sizes.
    auto allocate = [&](const std::map<int, std::size_t>& available,
                        std::size_t part_size) -> std::map<int, std::size_t> {
        std::map<int, std::size_t> take;
        std::vector<std::pair<double, int>> remainders;
        std::size_t allocated = 0;
        for (const auto& [cls, avail] : available) {
            const double quota =
                static_cast<double>(part_size) * static_cast<double>(by_class[cls].size()) /
                static_cast<double>(n);
            std::size_t base = std::min(static_cast<std::size_t>(quota), avail);
            take[cls] = base;
            allocated += base;
            remainders.push_back({quota - static_cast<double>(base), cls});
        }
        std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        std::size_t i = 0;
        while (allocated < part_size) {
            const int cls = remainders[i % remainders.size()].second;
            if (take[cls] < available.at(cls)) {
                ++take[cls];
                ++allocated;
            }
            ++i;
        }
        return take;
    };

    std::map<int, std::size_t> avail, used;
    for (const auto& [cls, idx] : by_class) avail[cls] = idx.size();
    const auto t_take = allocate(avail, n_train);
    for (const auto& [cls, k] : t_take) {
        avail[cls] -= k;
        for (std::size_t i = 0; i < k; ++i) plan.train_idx.push_back(by_class[cls][used[cls]++]);
    }
    const auto v_take = allocate(avail, n_val);
    for (const auto& [cls, k] : v_take) {
        avail[cls] -= k;
        for (std::size_t i = 0; i < k; ++i) plan.val_idx.push_back(by_class[cls][used[cls]++]);
    }
    for (auto& [cls, idx] : by_class) {
        while (used[cls] < idx.size()) plan.test_idx.push_back(idx[used[cls]++]);
    }
    rng.shuffle(plan.train_idx);
    rng.shuffle(plan.val_idx);
    rng.shuffle(plan.test_idx);
    return plan;
}

FoldPlan make_folds(const std::vector<std::size_t>& indices, std::size_t k, std::uint64_t seed) {
    require(k >= 2, ErrorCode::Validation, "fold count must be at least 2");
    require(indices.size() >= k, ErrorCode::Validation,
            "cannot make " + std::to_string(k) + " folds from " +
                std::to_string(indices.size()) + " rows");
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    std::vector<std::size_t> shuffled = indices;
    Rng rng(seed);
    rng.shuffle(shuffled);
    plan.folds.assign(k, {});
    for (std::size_t i = 0; i < shuffled.size(); ++i) {
        plan.folds[i % k].push_back(shuffled[i]);
    }
    return plan;
}

std::string AccuracyCurve::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "param,mean_auc,sd_auc\n";
    for (std::size_t i = 0; i < params.size(); ++i) {
        out << params[i] << ',' << mean_auc[i] << ',' << sd_auc[i] << '\n';
    }
    return out.str();
}

double one_sd_rule(const AccuracyCurve& curve, Simplicity simplicity) {
    require(!curve.params.empty(), ErrorCode::Validation, "one_sd_rule on empty curve");
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.params.size(); ++i) {
        if (curve.mean_auc[i] > curve.mean_auc[best]) best = i;
    }
    const double bound = curve.mean_auc[best] - curve.sd_auc[best];
    double chosen = curve.params[best];
    bool found = false;
    for (std::size_t i = 0; i < curve.params.size(); ++i) {
        if (curve.mean_auc[i] < bound) continue;
        if (!found) {
            chosen = curve.params[i];
            found = true;
        } else if (simplicity == Simplicity::LargerParamSimpler) {
            chosen = std::max(chosen, curve.params[i]);
        } else {
            chosen = std::min(chosen, curve.params[i]);
        }
    }
    return chosen;
}

namespace {

DataView view_of(const LabeledDataset& data, const std::vector<std::size_t>& rows) {
    DataView v;
    v.X = data.X;
    v.missing = data.missing;
    v.rows = rows;
    v.y.reserve(rows.size());
    for (std::size_t r : rows) v.y.push_back(data.y[r]);
    return v;
}

double eval_auc(const Classifier& model, const LabeledDataset& data,
                const std::vector<std::size_t>& rows) {
    const std::vector<double> scores = score_rows(model, *data.X, data.missing, rows);
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (std::size_t r : rows) labels.push_back(data.y[r]);
    return auc(scores, labels);
}

std::vector<std::size_t> without(const std::vector<std::size_t>& all,
                                 const std::vector<std::size_t>& removed) {
    std::vector<std::size_t> out;
    out.reserve(all.size());
    for (std::size_t v : all) {
        if (std::find(removed.begin(), removed.end(), v) == removed.end()) out.push_back(v);
    }
    return out;
}

}  // namespace

CvReport nested_cv(const LabeledDataset& data, const SplitPlan& split, const LearnerSpec& learner,
                   std::uint64_t seed, unsigned threads) {
    require(!learner.grid.empty(), ErrorCode::Validation,
            "learner '" + learner.name + "' has an empty grid");
    constexpr std::size_t kOuter = 5;
    constexpr std::size_t kInner = 4;

    CvReport report;
    report.learner = learner.name;
    report.split = split;
    report.folds.resize(kOuter);

    const FoldPlan outer = make_folds(split.train_idx, kOuter, derive_seed(seed, 0xA5A5));

    struct Task {
        std::size_t outer_fold, inner_fold, param_index;
    };
    std::vector<Task> tasks;
    std::vector<std::vector<std::vector<std::size_t>>> inner_train(kOuter);
    std::vector<std::vector<std::vector<std::size_t>>> inner_eval(kOuter);

    for (std::size_t f = 0; f < kOuter; ++f) {
        OuterFoldResult& fr = report.folds[f];
        fr.heldout_idx = outer.folds[f];
        const std::vector<std::size_t> outer_train = without(split.train_idx, fr.heldout_idx);
        const FoldPlan inner = make_folds(outer_train, kInner, derive_seed(seed, 0xB000 + f));
        inner_train[f].resize(kInner);
        inner_eval[f].resize(kInner);
        for (std::size_t g = 0; g < kInner; ++g) {
            inner_eval[f][g] = inner.folds[g];
            inner_train[f][g] = without(outer_train, inner.folds[g]);
            for (std::size_t p = 0; p < learner.grid.size(); ++p) {
                tasks.push_back({f, g, p});
            }
        }
        fr.inner_train_sets = inner_train[f];
        fr.inner_eval_sets = inner_eval[f];
    }

    // (fold, param)-keyed result table: merge order is fixed regardless of
    // evaluation schedule.
    std::vector<double> task_auc(tasks.size(), 0.0);
    parallel_for(tasks.size(), threads, [&](std::size_t t) {
        const Task& task = tasks[t];
        const DataView train = view_of(data, inner_train[task.outer_fold][task.inner_fold]);
        require(train.has_both_classes(), ErrorCode::Validation,
                "outer fold " + std::to_string(task.outer_fold) + " inner fold " +
                    std::to_string(task.inner_fold) + " training data is missing a class");
        const auto model =
            learner.fit(train, learner.grid[task.param_index],
                        derive_seed(seed, 0xC000 + task.outer_fold * 16 + task.inner_fold));
        task_auc[t] = eval_auc(*model, data, inner_eval[task.outer_fold][task.inner_fold]);
    });

    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> fold_param_aucs;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        fold_param_aucs[{tasks[t].outer_fold, tasks[t].param_index}].push_back(task_auc[t]);
    }

    std::vector<double> val_aucs(kOuter, 0.0);
    for (std::size_t f = 0; f < kOuter; ++f) {
        OuterFoldResult& fr = report.folds[f];
        fr.curve.params = learner.grid;
        for (std::size_t p = 0; p < learner.grid.size(); ++p) {
            const auto& aucs = fold_param_aucs.at({f, p});
            fr.curve.mean_auc.push_back(mean_of(aucs));
            fr.curve.sd_auc.push_back(sample_sd(aucs));
        }
        fr.chosen_param = one_sd_rule(fr.curve, learner.simplicity);

        const std::vector<std::size_t> outer_train = without(split.train_idx, fr.heldout_idx);
        const DataView train = view_of(data, outer_train);
        const auto tuned = learner.fit(train, fr.chosen_param, derive_seed(seed, 0xD000 + f));
        fr.val_auc = eval_auc(*tuned, data, split.val_idx);
        val_aucs[f] = fr.val_auc;
    }
    report.mean_val_auc = mean_of(val_aucs);

    // best of the 5 chosen params; ties prefer the simpler param
    std::size_t best_fold = 0;
    for (std::size_t f = 1; f < kOuter; ++f) {
        const double a = report.folds[f].val_auc;
        const double b = report.folds[best_fold].val_auc;
        if (a > b) {
            best_fold = f;
        } else if (a == b) {
            const double pf = report.folds[f].chosen_param;
            const double pb = report.folds[best_fold].chosen_param;
            const bool simpler = learner.simplicity == Simplicity::LargerParamSimpler ? pf > pb
                                                                                      : pf < pb;
            if (simpler) best_fold = f;
        }
    }
    report.best_param = report.folds[best_fold].chosen_param;

    std::vector<std::size_t> refit_rows = split.train_idx;
    refit_rows.insert(refit_rows.end(), split.val_idx.begin(), split.val_idx.end());
    const DataView refit = view_of(data, refit_rows);
    const auto final_model = learner.fit(refit, report.best_param, derive_seed(seed, 0xE000));
    report.test_scores = score_rows(*final_model, *data.X, data.missing, split.test_idx);
    for (std::size_t r : split.test_idx) report.test_labels.push_back(data.y[r]);
    report.test_auc = auc(report.test_scores, report.test_labels);
    return report;
}

RepeatedEval repeated_eval(const LabeledDataset& data, const SplitPlan& split,
                           const LearnerSpec& learner, double param,
                           const std::vector<std::uint64_t>& seeds) {
    require(!seeds.empty(), ErrorCode::Validation, "repeated_eval needs at least one seed");
    RepeatedEval out;
    for (std::uint64_t s : seeds) {
        const DataView train = view_of(data, split.train_idx);
        const auto model = learner.fit(train, param, s);
        out.val_aucs.push_back(eval_auc(*model, data, split.val_idx));
        out.test_aucs.push_back(eval_auc(*model, data, split.test_idx));
    }
    out.val_mean = mean_of(out.val_aucs);
    out.val_sd = sample_sd(out.val_aucs);
    out.test_mean = mean_of(out.test_aucs);
    out.test_sd = sample_sd(out.test_aucs);
    return out;
}

namespace {

nlohmann::ordered_json idx_json(const std::vector<std::size_t>& idx) {
    return nlohmann::ordered_json(idx);
}

}  // namespace

std::string CvReport::to_json_text() const {
    nlohmann::ordered_json j;
    j["learner"] = learner;
    j["mean_val_auc"] = mean_val_auc;
    j["best_param"] = best_param;
    j["test_auc"] = test_auc;
    j["test_scores"] = test_scores;
    j["test_labels"] = test_labels;
    j["split"] = {{"seed", split.seed},
                  {"train_idx", idx_json(split.train_idx)},
                  {"val_idx", idx_json(split.val_idx)},
                  {"test_idx", idx_json(split.test_idx)}};
    j["folds"] = nlohmann::ordered_json::array();
    for (const OuterFoldResult& f : folds) {
        nlohmann::ordered_json jf;
        jf["chosen_param"] = f.chosen_param;
        jf["val_auc"] = f.val_auc;
        jf["curve"] = {{"params", f.curve.params},
                       {"mean_auc", f.curve.mean_auc},
                       {"sd_auc", f.curve.sd_auc}};
        jf["heldout_idx"] = idx_json(f.heldout_idx);
        jf["inner_train_sets"] = nlohmann::ordered_json::array();
        for (const auto& s : f.inner_train_sets) jf["inner_train_sets"].push_back(idx_json(s));
        jf["inner_eval_sets"] = nlohmann::ordered_json::array();
        for (const auto& s : f.inner_eval_sets) jf["inner_eval_sets"].push_back(idx_json(s));
        j["folds"].push_back(jf);
    }
    return j.dump(2) + "\n";
}

}  // namespace survkit
