#include "preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace survkit {

namespace {

std::string lowercase(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool token_equals(const std::string& a, const std::string& b) {
    return lowercase(a) == lowercase(b);
}

std::string format_cell_value(double v) {
    std::ostringstream out;
    out.precision(15);
    out << v;
    return out.str();
}

// Category string for a CNA-style cell regardless of the column's storage kind.
std::string cell_as_category(const Column& c, std::size_t row) {
    return c.kind == ColumnKind::Numeric ? format_cell_value(c.numeric[row]) : c.text[row];
}

}  // namespace

std::vector<ClassLabel> assign_labels(const std::vector<double>& survival_months,
                                      const std::vector<std::string>& status,
                                      const std::vector<std::string>& cause,
                                      const LabelRule& rule) {
    require(rule.horizon_months > 0, ErrorCode::Validation, "label horizon must be positive");
    const std::size_t n = survival_months.size();
    require(status.size() == n && cause.size() == n, ErrorCode::Validation,
            "assign_labels: input vectors differ in length");
    std::vector<ClassLabel> labels(n, ClassLabel::Unlabeled);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = survival_months[i];
        require(t >= 0.0, ErrorCode::Validation,
                "negative survival time at row " + std::to_string(i));
        if (t > rule.horizon_months) {
            labels[i] = ClassLabel::Class2;
        } else if (token_equals(status[i], rule.dead_token) &&
                   token_equals(cause[i], rule.cause_positive_token)) {
            labels[i] = ClassLabel::Class1;
        }
    }
    return labels;
}

TableFrame apply_drop_policy(const TableFrame& frame, std::size_t max_total_missing) {
    std::vector<std::size_t> kept;
    for (std::size_t r = 0; r < frame.n_rows(); ++r) {
        bool numeric_missing = false;
        std::size_t total_missing = 0;
        for (const Column& c : frame.columns()) {
            if (!c.is_missing(r)) continue;
            ++total_missing;
            if (c.kind == ColumnKind::Numeric) numeric_missing = true;
        }
        if (!numeric_missing && total_missing <= max_total_missing) kept.push_back(r);
    }
    return frame.select_rows(kept);
}

Standardizer fit_standardizer(const std::vector<double>& column, int ddof) {
    require(!column.empty(), ErrorCode::Validation, "fit_standardizer: empty column");
    Standardizer st;
    st.u = mean_of(column);
    double s = 0.0;
    if (column.size() > static_cast<std::size_t>(ddof)) {
        s = stddev_of(column, ddof);
    }
    st.s = s > 0.0 ? s : 1.0;
    return st;
}

std::size_t EncoderPlan::encoded_width() const {
    std::size_t w = 0;
    for (const auto& c : columns) w += c.width();
    return w;
}

std::vector<std::string> EncoderPlan::feature_names() const {
    std::vector<std::string> names;
    names.reserve(encoded_width());
    for (const auto& c : columns) {
        if (c.categorical) {
            for (const auto& cat : c.categories) names.push_back(c.source + "=" + cat);
        } else {
            names.push_back(c.source);
        }
    }
    return names;
}

std::string EncoderPlan::to_json_text() const {
    nlohmann::ordered_json j;
    j["columns"] = nlohmann::ordered_json::array();
    for (const auto& c : columns) {
        nlohmann::ordered_json jc;
        jc["source"] = c.source;
        jc["categorical"] = c.categorical;
        if (c.categorical) {
            jc["categories"] = c.categories;
            jc["has_null_category"] = c.has_null_category;
        } else {
            jc["mean"] = c.standardizer.u;
            jc["scale"] = c.standardizer.s;
        }
        j["columns"].push_back(jc);
    }
    return j.dump(2) + "\n";
}

EncoderPlan EncoderPlan::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        fail(ErrorCode::Parse, std::string("encoder JSON parse failure: ") + e.what());
    }
    EncoderPlan plan;
    for (const auto& jc : j.at("columns")) {
        EncodedColumn c;
        c.source = jc.at("source").get<std::string>();
        c.categorical = jc.at("categorical").get<bool>();
        if (c.categorical) {
            c.categories = jc.at("categories").get<std::vector<std::string>>();
            c.has_null_category = jc.at("has_null_category").get<bool>();
        } else {
            c.standardizer.u = jc.at("mean").get<double>();
            c.standardizer.s = jc.at("scale").get<double>();
        }
        plan.columns.push_back(std::move(c));
    }
    return plan;
}

EncoderPlan fit_encoder(const TableFrame& frame, const std::vector<std::size_t>& fit_rows,
                        const std::vector<std::string>& exclude, int ddof) {
    std::vector<std::size_t> rows = fit_rows;
    if (rows.empty()) {
        rows.resize(frame.n_rows());
        for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
    }
    EncoderPlan plan;
    for (const Column& c : frame.columns()) {
        if (c.kind == ColumnKind::Identifier) continue;
        if (std::find(exclude.begin(), exclude.end(), c.name) != exclude.end()) continue;
        EncodedColumn enc;
        enc.source = c.name;
        if (c.kind == ColumnKind::Categorical) {
            enc.categorical = true;
            bool any_missing = false;
            for (std::size_t r : rows) {
                if (c.is_missing(r)) {
                    any_missing = true;
                    continue;
                }
                if (std::find(enc.categories.begin(), enc.categories.end(), c.text[r]) ==
                    enc.categories.end()) {
                    enc.categories.push_back(c.text[r]);
                }
            }
            require(!enc.categories.empty(), ErrorCode::Validation,
                    "categorical column '" + c.name + "' has zero observed categories");
            if (any_missing) {
                enc.categories.push_back(kNullCategory);
                enc.has_null_category = true;
            }
        } else {
            std::vector<double> observed;
            observed.reserve(rows.size());
            for (std::size_t r : rows) {
                if (!c.is_missing(r)) observed.push_back(c.numeric[r]);
            }
            require(!observed.empty(), ErrorCode::Validation,
                    "numeric column '" + c.name + "' has no observed values");
            enc.standardizer = fit_standardizer(observed, ddof);
        }
        plan.columns.push_back(std::move(enc));
    }
    return plan;
}

Matrix apply_encoder(const TableFrame& frame, const EncoderPlan& encoder) {
    Matrix out(frame.n_rows(), encoder.encoded_width(), 0.0);
    std::size_t offset = 0;
    for (const EncodedColumn& enc : encoder.columns) {
        const Column& c = frame.column(enc.source);
        if (enc.categorical) {
            for (std::size_t r = 0; r < frame.n_rows(); ++r) {
                std::string value;
                if (c.is_missing(r)) {
                    if (!enc.has_null_category) continue;  // zero span
                    value = kNullCategory;
                } else {
                    value = cell_as_category(c, r);
                }
                const auto it = std::find(enc.categories.begin(), enc.categories.end(), value);
                if (it != enc.categories.end()) {
                    out(r, offset + static_cast<std::size_t>(it - enc.categories.begin())) = 1.0;
                }
                // unseen category: span stays all-zero
            }
        } else {
            require(c.kind == ColumnKind::Numeric, ErrorCode::Integrity,
                    "encoder expects numeric column '" + enc.source + "'");
            for (std::size_t r = 0; r < frame.n_rows(); ++r) {
                require(!c.is_missing(r), ErrorCode::Validation,
                        "missing numeric cell in '" + enc.source + "' at transform time");
                out(r, offset) = enc.standardizer.transform(c.numeric[r]);
            }
        }
        offset += enc.width();
    }
    return out;
}

DesignMatrix build_clinical_matrix(const TableFrame& frame, const LabelRule& rule,
                                   const ResponseColumns& response, const EncoderPlan& encoder) {
    for (const std::string& name : {response.months, response.status, response.cause}) {
        require(frame.has_column(name), ErrorCode::Validation,
                "response column '" + name + "' missing from clinical frame");
    }
    for (const EncodedColumn& enc : encoder.columns) {
        require(enc.source != response.months && enc.source != response.status &&
                    enc.source != response.cause,
                ErrorCode::Integrity,
                "encoder contains response column '" + enc.source + "'");
    }
    const Column& months = frame.column(response.months);
    require(months.kind == ColumnKind::Numeric, ErrorCode::Validation,
            "survival-months column must be numeric");

    DesignMatrix dm;
    dm.values = apply_encoder(frame, encoder);
    dm.feature_names = encoder.feature_names();
    dm.labels = assign_labels(months.numeric, frame.column(response.status).text,
                              frame.column(response.cause).text, rule);
    dm.patient_ids = frame.patient_ids();
    return dm;
}

namespace {

bool column_has_missing(const Column& c) {
    return std::any_of(c.missing.begin(), c.missing.end(), [](std::uint8_t m) { return m != 0; });
}

void append_onehot(const TableFrame& frame, const Column& c,
                   std::vector<std::vector<double>>& cols, std::vector<std::string>& names) {
    std::vector<std::string> categories;
    for (std::size_t r = 0; r < frame.n_rows(); ++r) {
        const std::string v = cell_as_category(c, r);
        if (std::find(categories.begin(), categories.end(), v) == categories.end()) {
            categories.push_back(v);
        }
    }
    for (const std::string& cat : categories) {
        std::vector<double> col(frame.n_rows(), 0.0);
        for (std::size_t r = 0; r < frame.n_rows(); ++r) {
            if (cell_as_category(c, r) == cat) col[r] = 1.0;
        }
        cols.push_back(std::move(col));
        names.push_back(c.name + "=" + cat);
    }
}

}  // namespace

DesignMatrix build_genomic_matrix(const TableFrame& expression, const TableFrame& cna,
                                  const TableFrame& mutations,
                                  const std::vector<ClassLabel>& labels,
                                  const std::vector<std::size_t>& fit_rows, int ddof) {
    const std::size_t n = expression.n_rows();
    require(cna.n_rows() == n && mutations.n_rows() == n, ErrorCode::Integrity,
            "genomic frames have differing row counts; intersect patients first");
    for (std::size_t r = 0; r < n; ++r) {
        require(expression.patient_ids()[r] == cna.patient_ids()[r] &&
                    expression.patient_ids()[r] == mutations.patient_ids()[r],
                ErrorCode::Integrity, "genomic frames disagree on patient order");
    }
    require(labels.empty() || labels.size() == n, ErrorCode::Validation,
            "label vector length does not match genomic rows");

    std::vector<std::size_t> rows = fit_rows;
    if (rows.empty()) {
        rows.resize(n);
        for (std::size_t r = 0; r < n; ++r) rows[r] = r;
    }

    std::vector<std::vector<double>> cols;
    std::vector<std::string> names;

    // Expression: numeric, standardized; any-missing columns deleted.
    for (const Column& c : expression.columns()) {
        if (c.kind != ColumnKind::Numeric) continue;
        if (column_has_missing(c)) continue;
        std::vector<double> train_vals;
        train_vals.reserve(rows.size());
        for (std::size_t r : rows) train_vals.push_back(c.numeric[r]);
        const Standardizer st = fit_standardizer(train_vals, ddof);
        std::vector<double> col(n);
        for (std::size_t r = 0; r < n; ++r) col[r] = st.transform(c.numeric[r]);
        cols.push_back(std::move(col));
        names.push_back(c.name);
    }

    // CNA: copy states treated as categories, one-hot over observed values.
    for (const Column& c : cna.columns()) {
        if (c.kind == ColumnKind::Identifier) continue;
        if (column_has_missing(c)) continue;
        append_onehot(cna, c, cols, names);
    }

    // Mutations: variant classification one-hot.
    for (const Column& c : mutations.columns()) {
        if (c.kind != ColumnKind::Categorical) continue;
        if (column_has_missing(c)) continue;
        append_onehot(mutations, c, cols, names);
    }

    require(!cols.empty(), ErrorCode::Validation,
            "genomic matrix has zero surviving columns after missing-value deletion");

    DesignMatrix dm;
    dm.values = Matrix(n, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        for (std::size_t r = 0; r < n; ++r) dm.values(r, j) = cols[j][r];
    }
    dm.feature_names = std::move(names);
    dm.labels = labels.empty() ? std::vector<ClassLabel>(n, ClassLabel::Unlabeled) : labels;
    dm.patient_ids = expression.patient_ids();
    return dm;
}

NullityCorrelation nullity_correlation(const TableFrame& frame, std::size_t min_missing) {
    const std::size_t n = frame.n_rows();
    std::vector<const Column*> kept;
    for (const Column& c : frame.columns()) {
        if (c.kind == ColumnKind::Identifier) continue;
        const std::size_t m = c.missing_count();
        if (m < min_missing) continue;
        if (m == 0 || m == n) continue;  // zero-variance indicator
        kept.push_back(&c);
    }
    NullityCorrelation out;
    out.correlation = Matrix(kept.size(), kept.size(), 0.0);
    for (const Column* c : kept) out.names.push_back(c->name);
    for (std::size_t a = 0; a < kept.size(); ++a) {
        for (std::size_t b = 0; b < kept.size(); ++b) {
            if (a == b) {
                out.correlation(a, b) = 1.0;
                continue;
            }
            double ma = 0, mb = 0;
            for (std::size_t r = 0; r < n; ++r) {
                ma += kept[a]->is_missing(r);
                mb += kept[b]->is_missing(r);
            }
            ma /= static_cast<double>(n);
            mb /= static_cast<double>(n);
            double cov = 0, va = 0, vb = 0;
            for (std::size_t r = 0; r < n; ++r) {
                const double da = kept[a]->is_missing(r) - ma;
                const double db = kept[b]->is_missing(r) - mb;
                cov += da * db;
                va += da * da;
                vb += db * db;
            }
            out.correlation(a, b) = cov / std::sqrt(va * vb);
        }
    }
    return out;
}

NullityGroupStats nullity_group_stats(const TableFrame& frame, const std::string& null_column,
                                      const std::string& target_column) {
    const Column& nc = frame.column(null_column);
    const Column& tc = frame.column(target_column);
    require(tc.kind == ColumnKind::Numeric, ErrorCode::Validation,
            "target column '" + target_column + "' must be numeric");
    std::vector<double> where_missing, where_present;
    for (std::size_t r = 0; r < frame.n_rows(); ++r) {
        if (tc.is_missing(r)) continue;
        (nc.is_missing(r) ? where_missing : where_present).push_back(tc.numeric[r]);
    }
    require(!where_missing.empty(), ErrorCode::Validation,
            "nullity_group_stats: missing-group of '" + null_column + "' is empty");
    require(!where_present.empty(), ErrorCode::Validation,
            "nullity_group_stats: present-group of '" + null_column + "' is empty");
    return {five_number_summary(where_missing), five_number_summary(where_present)};
}

int label_to_binary(ClassLabel label) {
    switch (label) {
        case ClassLabel::Class1: return 1;
        case ClassLabel::Class2: return 0;
        case ClassLabel::Unlabeled: break;
    }
    fail(ErrorCode::Validation, "unlabeled row has no binary label");
}

}  // namespace survkit
