#pragma once

#include <string>
#include <vector>

#include "common.hpp"

namespace survkit {

/// ROC points run from (0,0) to (1,1) with non-decreasing FPR and TPR; one
/// point per distinct score threshold, ties grouped.
struct RocCurve {
    std::vector<double> fpr;
    std::vector<double> tpr;
    std::vector<double> thresholds;  // thresholds[0] is +inf for the (0,0) point

    std::size_t size() const { return fpr.size(); }
    std::string to_csv() const;  // columns threshold,fpr,tpr
};

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels);

/// Trapezoidal area under a curve's points.
double trapezoid_area(const RocCurve& curve);

/// Pairwise-concordance AUC (ties counted 1/2), computed by rank sums.
/// Equals the trapezoidal area under roc_curve.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace survkit
