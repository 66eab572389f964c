#pragma once

#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "table.hpp"

namespace survkit {

enum class ClassLabel { Class1, Class2, Unlabeled };

/// Survival labeling rule: Class1 = died of the disease within the horizon,
/// Class2 = observed beyond the horizon, everything else stays unlabeled.
struct LabelRule {
    double horizon_months = 120.0;
    std::string dead_token = "died";
    std::string living_token = "living";
    std::string cause_positive_token = "disease";
};

std::vector<ClassLabel> assign_labels(const std::vector<double>& survival_months,
                                      const std::vector<std::string>& status,
                                      const std::vector<std::string>& cause,
                                      const LabelRule& rule);

/// Removes rows with any missing numeric cell and rows with more than
/// max_total_missing missing cells; surviving categorical missings stay
/// flagged for null-category encoding.
TableFrame apply_drop_policy(const TableFrame& frame, std::size_t max_total_missing = 2);

/// Per-column affine transform z = (x - u) / s.
struct Standardizer {
    double u = 0.0;
    double s = 1.0;

    double transform(double x) const { return (x - u) / s; }
};

/// ddof 0 = population standard deviation (divisor n), 1 = sample (n - 1).
/// Zero-variance columns get s = 1 and standardize to all zeros.
Standardizer fit_standardizer(const std::vector<double>& column, int ddof = 0);

struct EncodedColumn {
    std::string source;                   // original column name
    bool categorical = false;
    std::vector<std::string> categories;  // includes trailing null category if present
    bool has_null_category = false;
    Standardizer standardizer;            // numeric columns only

    std::size_t width() const { return categorical ? categories.size() : 1; }
};

/// One-hot plan for categoricals plus standardizer references for numerics.
/// Unseen categories at transform time encode as an all-zero span.
struct EncoderPlan {
    std::vector<EncodedColumn> columns;

    std::size_t encoded_width() const;
    std::vector<std::string> feature_names() const;

    std::string to_json_text() const;
    static EncoderPlan from_json_text(const std::string& text);
};

inline constexpr const char* kNullCategory = "<null>";

/// Fits category lists (first-appearance order, null category appended iff
/// any missing remains) and standardizers on the given rows. fit_rows empty
/// means all rows. Columns listed in exclude are skipped entirely.
EncoderPlan fit_encoder(const TableFrame& frame, const std::vector<std::size_t>& fit_rows = {},
                        const std::vector<std::string>& exclude = {}, int ddof = 0);

/// Feature matrix with aligned three-valued labels and patient IDs.
struct DesignMatrix {
    Matrix values;
    std::optional<std::vector<std::uint8_t>> missing_mask;  // row-major, booster path only
    std::vector<std::string> feature_names;
    std::vector<ClassLabel> labels;
    std::vector<std::string> patient_ids;

    std::size_t n_rows() const { return values.rows(); }
    std::size_t n_features() const { return values.cols(); }
    bool cell_missing(std::size_t r, std::size_t c) const {
        return missing_mask && (*missing_mask)[r * values.cols() + c] != 0;
    }
};

/// Columns holding the survival outcome; consumed by assign_labels and
/// excluded from features.
struct ResponseColumns {
    std::string months = "OS_MONTHS";
    std::string status = "OS_STATUS";
    std::string cause = "VITAL_CAUSE";
};

DesignMatrix build_clinical_matrix(const TableFrame& frame, const LabelRule& rule,
                                   const ResponseColumns& response, const EncoderPlan& encoder);

/// Assembles expression (standardized), CNA (one-hot over observed
/// categories), and mutation variant-classification (one-hot) features.
/// Columns containing any missing value are deleted first. Standardizers are
/// fit on fit_rows (all rows when empty). labels must align with the frames'
/// shared patient order.
DesignMatrix build_genomic_matrix(const TableFrame& expression, const TableFrame& cna,
                                  const TableFrame& mutations,
                                  const std::vector<ClassLabel>& labels,
                                  const std::vector<std::size_t>& fit_rows = {}, int ddof = 0);

/// Applies a fitted encoder to rows of a frame (used for train/test reuse).
Matrix apply_encoder(const TableFrame& frame, const EncoderPlan& encoder);

struct NullityCorrelation {
    std::vector<std::string> names;
    Matrix correlation;
};

/// Pearson correlation between binary missingness indicators of every column
/// pair; columns with fewer than min_missing missing cells (or zero-variance
/// indicators) are excluded.
NullityCorrelation nullity_correlation(const TableFrame& frame, std::size_t min_missing = 2);

struct NullityGroupStats {
    FiveNumberSummary where_missing;
    FiveNumberSummary where_present;
};

/// Five-number summaries of a numeric target split by the nullity of another
/// column (the box-plot MAR diagnostic).
NullityGroupStats nullity_group_stats(const TableFrame& frame, const std::string& null_column,
                                      const std::string& target_column);

/// Binary view of the labels for a learner: Class1 -> 1, Class2 -> 0.
int label_to_binary(ClassLabel label);

}  // namespace survkit
