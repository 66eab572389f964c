#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "common.hpp"

namespace survkit {

/// A fitted probabilistic binary classifier. Implementations are immutable
/// after fitting and safe to share across threads.
class Classifier {
public:
    virtual ~Classifier() = default;

    /// Probability-like score for one feature row. miss may be null (no
    /// missing entries); only missing-aware models inspect it.
    virtual double score(const double* x, const std::uint8_t* miss, std::size_t n) const = 0;
};

/// Indexed view into a feature matrix with binary labels aligned to rows.
struct DataView {
    const Matrix* X = nullptr;
    const std::vector<std::uint8_t>* missing = nullptr;  // row-major mask or null
    std::vector<std::size_t> rows;
    std::vector<int> y;

    std::size_t size() const { return rows.size(); }
    std::size_t n_features() const { return X->cols(); }

    Matrix dense() const {
        Matrix out(rows.size(), X->cols());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double* src = X->row_ptr(rows[i]);
            std::copy(src, src + X->cols(), out.row_ptr(i));
        }
        return out;
    }

    std::vector<std::uint8_t> dense_missing() const {
        if (!missing) return {};
        std::vector<std::uint8_t> out(rows.size() * X->cols());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::copy(missing->begin() + rows[i] * X->cols(),
                      missing->begin() + (rows[i] + 1) * X->cols(),
                      out.begin() + i * X->cols());
        }
        return out;
    }

    bool has_both_classes() const {
        bool pos = false, neg = false;
        for (int v : y) (v ? pos : neg) = true;
        return pos && neg;
    }
};

inline std::vector<double> score_rows(const Classifier& model, const Matrix& X,
                                      const std::vector<std::uint8_t>* mask,
                                      const std::vector<std::size_t>& rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) {
        const std::uint8_t* miss = mask ? mask->data() + r * X.cols() : nullptr;
        out.push_back(model.score(X.row_ptr(r), miss, X.cols()));
    }
    return out;
}

using FitFn =
    std::function<std::unique_ptr<Classifier>(const DataView&, double param, std::uint64_t seed)>;

/// Which end of a hyperparameter grid is the "simpler" model.
enum class Simplicity { SmallerParamSimpler, LargerParamSimpler };

/// A tunable learner registered with the validation harness: a fitting
/// closure, its hyperparameter grid, and the direction of simplicity.
struct LearnerSpec {
    std::string name;
    std::vector<double> grid;
    Simplicity simplicity = Simplicity::LargerParamSimpler;
    FitFn fit;
};

}  // namespace survkit
