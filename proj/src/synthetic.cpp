#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace survkit {

void SynthSpec::validate() const {
    require(rows >= 20, ErrorCode::Validation, "need at least 20 rows");
    require(n_numeric >= 1 && n_genes >= 1, ErrorCode::Validation,
            "need at least one numeric feature and one gene");
    require(informative <= n_numeric && informative <= n_genes, ErrorCode::Validation,
            "informative count exceeds feature counts");
    require(label_noise >= 0.0 && label_noise <= 0.5, ErrorCode::Validation,
            "label_noise outside [0, 0.5]");
    require(missing_rate >= 0.0 && missing_rate < 0.5, ErrorCode::Validation,
            "missing_rate outside [0, 0.5)");
    require(unlabeled_fraction >= 0.0 && unlabeled_fraction < 1.0, ErrorCode::Validation,
            "unlabeled_fraction outside [0, 1)");
}

namespace {

std::string padded_name(const std::string& prefix, std::size_t i, std::size_t width = 4) {
    std::ostringstream out;
    out << prefix;
    std::string digits = std::to_string(i + 1);
    for (std::size_t k = digits.size(); k < width; ++k) out << '0';
    out << digits;
    return out.str();
}

Column id_column(const std::vector<std::string>& ids) {
    Column col;
    col.name = "PATIENT_ID";
    col.kind = ColumnKind::Identifier;
    col.text = ids;
    col.missing.assign(ids.size(), 0);
    return col;
}

Column numeric_column(std::string name, std::vector<double> values) {
    Column col;
    col.name = std::move(name);
    col.kind = ColumnKind::Numeric;
    col.missing.assign(values.size(), 0);
    col.numeric = std::move(values);
    return col;
}

Column text_column(std::string name, std::vector<std::string> values) {
    Column col;
    col.name = std::move(name);
    col.kind = ColumnKind::Categorical;
    col.missing.assign(values.size(), 0);
    col.text = std::move(values);
    return col;
}

}  // namespace

SynthData generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const std::size_t n = spec.rows;

    std::vector<double> risk(n);
    for (double& u : risk) u = rng.normal();
    std::vector<int> label(n);
    for (std::size_t i = 0; i < n; ++i) {
        label[i] = risk[i] > 0.0 ? 1 : 0;
        if (rng.uniform() < spec.label_noise) label[i] = 1 - label[i];
    }
    std::vector<std::uint8_t> censored(n);
    for (auto& c : censored) c = rng.uniform() < spec.unlabeled_fraction ? 1 : 0;

    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = padded_name("P", i);

    // clinical features
    std::vector<Column> clinical;
    clinical.push_back(id_column(ids));
    for (std::size_t j = 0; j < spec.n_numeric; ++j) {
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = j < spec.informative ? risk[i] + 0.8 * rng.normal() : rng.normal();
        }
        clinical.push_back(numeric_column(padded_name("NUM_", j, 2), std::move(values)));
    }
    static const char* kLevels[] = {"a", "b", "c", "d"};
    for (std::size_t j = 0; j < spec.n_categorical; ++j) {
        std::vector<std::string> values(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (j == 0) {
                const double v = risk[i] + rng.normal();
                values[i] = v < -0.5 ? "low" : v < 0.5 ? "mid" : "high";
            } else {
                values[i] = kLevels[rng.below(4)];
            }
        }
        clinical.push_back(text_column(padded_name("CAT_", j, 2), std::move(values)));
    }

    // survival responses; the class boundary sits at the 120-month horizon
    std::vector<double> months(n);
    std::vector<std::string> status(n), cause(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (censored[i]) {
            months[i] = 1.0 + rng.uniform() * 119.0;
            status[i] = "LIVING";
            cause[i] = "NONE";
        } else if (label[i] == 1) {
            months[i] = 6.0 + rng.uniform() * 114.0;
            status[i] = "DIED";
            cause[i] = "DISEASE";
        } else {
            months[i] = 121.0 + rng.uniform() * 179.0;
            status[i] = "LIVING";
            cause[i] = "NONE";
        }
    }
    clinical.push_back(numeric_column("OS_MONTHS", std::move(months)));
    clinical.push_back(text_column("OS_STATUS", std::move(status)));
    clinical.push_back(text_column("VITAL_CAUSE", std::move(cause)));

    // MAR missingness: the first numeric column drives everyone else's rate
    if (spec.missing_rate > 0.0) {
        const Column& driver = clinical[1];
        for (std::size_t c = 2; c < clinical.size() - 3; ++c) {
            Column& col = clinical[c];
            for (std::size_t i = 0; i < n; ++i) {
                const double p = spec.missing_rate * (driver.numeric[i] > 0.0 ? 1.5 : 0.5);
                if (rng.uniform() < p) {
                    col.missing[i] = 1;
                    if (col.kind == ColumnKind::Numeric) {
                        col.numeric[i] = std::numeric_limits<double>::quiet_NaN();
                    } else {
                        col.text[i].clear();
                    }
                }
            }
        }
    }

    // expression: informative genes carry the risk, the rest are noise
    std::vector<Column> expression;
    expression.push_back(id_column(ids));
    for (std::size_t j = 0; j < spec.n_genes; ++j) {
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = j < spec.informative ? risk[i] + 0.7 * rng.normal() : rng.normal();
        }
        expression.push_back(numeric_column(padded_name("GENE_", j), std::move(values)));
    }
    // plant missing cells in a few noise genes; downstream deletes the column
    const std::size_t holed =
        std::min(spec.n_genes - spec.informative,
                 static_cast<std::size_t>(std::llround(spec.missing_rate *
                                                       static_cast<double>(spec.n_genes))));
    for (std::size_t k = 0; k < holed; ++k) {
        Column& col = expression[1 + spec.informative + k];
        const std::size_t row = rng.below(n);
        col.missing[row] = 1;
        col.numeric[row] = std::numeric_limits<double>::quiet_NaN();
    }

    std::vector<Column> cna;
    cna.push_back(id_column(ids));
    for (std::size_t j = 0; j < spec.n_cna; ++j) {
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double raw = j == 0 ? risk[i] + 0.8 * rng.normal() : 1.2 * rng.normal();
            values[i] = std::clamp(std::round(raw), -2.0, 2.0);
        }
        cna.push_back(numeric_column(padded_name("CNA_", j), std::move(values)));
    }

    std::vector<Column> mutation;
    mutation.push_back(id_column(ids));
    for (std::size_t j = 0; j < spec.n_mutation; ++j) {
        std::vector<std::string> values(n);
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = rng.uniform() < 0.15 ? "MUT" : "WT";
        }
        mutation.push_back(text_column(padded_name("MUT_", j, 2), std::move(values)));
    }

    SynthData out;
    out.clinical = TableFrame(std::move(clinical), "PATIENT_ID");
    out.expression = TableFrame(std::move(expression), "PATIENT_ID");
    out.cna = TableFrame(std::move(cna), "PATIENT_ID");
    out.mutation = TableFrame(std::move(mutation), "PATIENT_ID");
    return out;
}

}  // namespace survkit
