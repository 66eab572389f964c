#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace survkit {

namespace {

void check_inputs(const std::vector<double>& scores, const std::vector<int>& labels) {
    require(scores.size() == labels.size(), ErrorCode::Validation,
            "scores and labels differ in length");
    require(!scores.empty(), ErrorCode::Validation, "empty score vector");
    std::size_t pos = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        require(std::isfinite(scores[i]), ErrorCode::Validation,
                "non-finite score at index " + std::to_string(i));
        require(labels[i] == 0 || labels[i] == 1, ErrorCode::Validation,
                "labels must be 0/1");
        pos += static_cast<std::size_t>(labels[i]);
    }
    require(pos > 0 && pos < labels.size(), ErrorCode::Validation,
            "both classes must be present to score a ranking");
}

}  // namespace

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_inputs(scores, labels);
    const std::size_t n = scores.size();
    double total_pos = 0, total_neg = 0;
    for (int y : labels) (y ? total_pos : total_neg) += 1.0;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.fpr.push_back(0.0);
    curve.tpr.push_back(0.0);
    curve.thresholds.push_back(std::numeric_limits<double>::infinity());

    double tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < n) {
        const double threshold = scores[order[i]];
        // absorb the whole tie group
        while (i < n && scores[order[i]] == threshold) {
            (labels[order[i]] ? tp : fp) += 1.0;
            ++i;
        }
        curve.fpr.push_back(fp / total_neg);
        curve.tpr.push_back(tp / total_pos);
        curve.thresholds.push_back(threshold);
    }
    return curve;
}

std::string RocCurve::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "threshold,fpr,tpr\n";
    for (std::size_t i = 0; i < size(); ++i) {
        if (std::isinf(thresholds[i])) {
            out << "inf";
        } else {
            out << thresholds[i];
        }
        out << ',' << fpr[i] << ',' << tpr[i] << '\n';
    }
    return out.str();
}

double trapezoid_area(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        area += (curve.fpr[i] - curve.fpr[i - 1]) * (curve.tpr[i] + curve.tpr[i - 1]) / 2.0;
    }
    return area;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_inputs(scores, labels);
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // midranks: tie groups share the average rank, which credits ties 1/2
    std::vector<double> rank(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) rank[order[k]] = midrank;
        i = j;
    }

    double pos_rank_sum = 0.0, n_pos = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (labels[k]) {
            pos_rank_sum += rank[k];
            n_pos += 1.0;
        }
    }
    const double n_neg = static_cast<double>(n) - n_pos;
    return (pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

}  // namespace survkit
