#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "baselines.hpp"
#include "boosting.hpp"
#include "goa.hpp"
#include "linear.hpp"
#include "metrics.hpp"
#include "mlp.hpp"
#include "preprocess.hpp"
#include "semisup.hpp"
#include "trees.hpp"

namespace survkit {

namespace {

namespace fs = std::filesystem;

const std::set<std::string> kRunKeys = {
    "dataset",         "out_dir",          "learners",
    "seed",            "stratify",         "threads",
    "clinical_table",  "clinical_schema",  "expression_table",
    "expression_schema", "cna_table",      "cna_schema",
    "mutation_table",  "mutation_schema",  "horizon_months",
    "dead_token",      "living_token",     "cause_token",
    "months_column",   "status_column",    "cause_column",
    "max_total_missing",
    "logreg_alpha",    "logreg_epochs",    "logreg_learning_rate",
    "svm_epochs",
    "mlp_hidden",      "mlp_layers",       "mlp_epochs",
    "mlp_learning_rate",
    "forest_depth",    "forest_min_leaf",
    "boost_depth",     "boost_eta",        "boost_lambda",
    "boost_gamma",     "boost_min_child_weight", "boost_epsilon",
    "boost_mode",
    "goa_agents",      "goa_iters",        "goa_weight_bound",
    "goa_patience",
    "self_train_max_iters", "self_train_base_lambda",
    "co_train_rounds", "co_train_base_lambda",
};

const std::vector<std::string> kLearnerNames = {
    "knn",  "logreg_en", "svm",        "mlp",      "forest",
    "boost", "irls_l1",  "self_train", "co_train", "goa_mlp",
};

struct PipelineConfig {
    std::string dataset;
    std::string out_dir;
    std::vector<std::string> learners;
    std::uint64_t seed = 0;
    bool stratify = false;
    unsigned threads = 1;

    std::string clinical_table, clinical_schema;
    std::string expression_table, expression_schema;
    std::string cna_table, cna_schema;
    std::string mutation_table, mutation_schema;

    LabelRule rule;
    ResponseColumns response;
    std::size_t max_total_missing = 2;

    double logreg_alpha = 0.95;
    std::size_t logreg_epochs = 200;
    double logreg_learning_rate = 0.01;
    std::size_t svm_epochs = 200;
    std::size_t mlp_hidden = 70;
    std::size_t mlp_layers = 1;
    std::size_t mlp_epochs = 200;
    double mlp_learning_rate = 0.001;
    std::size_t forest_depth = 8;
    std::size_t forest_min_leaf = 1;
    std::size_t boost_depth = 4;
    double boost_eta = 0.1;
    double boost_lambda = 1.0;
    double boost_gamma = 0.0;
    double boost_min_child_weight = 1e-3;
    double boost_epsilon = 0.05;
    SplitMode boost_mode = SplitMode::Exact;
    std::size_t goa_agents = 30;
    std::size_t goa_iters = 60;
    double goa_weight_bound = 5.0;
    std::size_t goa_patience = 50;
    std::size_t self_train_max_iters = 20;
    double self_train_base_lambda = 1e-3;
    std::size_t co_train_rounds = 10;
    double co_train_base_lambda = 1e-3;

    const ConfigMap* raw = nullptr;
};

std::string default_schema_path(const std::string& table_path) {
    const fs::path p(table_path);
    fs::path out = p;
    out.replace_extension(".schema.json");
    return out.string();
}

PipelineConfig parse_run_config(const ConfigMap& cfg) {
    cfg.check_keys(kRunKeys, {"grid_"});

    PipelineConfig pc;
    pc.raw = &cfg;
    pc.dataset = cfg.get_string("dataset");
    require(pc.dataset == "clinical" || pc.dataset == "genomic", ErrorCode::Config,
            "dataset must be 'clinical' or 'genomic', got '" + pc.dataset + "'");
    pc.out_dir = cfg.get_string("out_dir");
    pc.learners = cfg.get_list("learners");
    require(!pc.learners.empty(), ErrorCode::Config, "learners list is empty");
    std::set<std::string> seen;
    for (const auto& name : pc.learners) {
        require(std::find(kLearnerNames.begin(), kLearnerNames.end(), name) != kLearnerNames.end(),
                ErrorCode::Config, "unknown learner '" + name + "'");
        require(seen.insert(name).second, ErrorCode::Config,
                "learner '" + name + "' listed twice");
    }
    pc.seed = cfg.get_uint64_or("seed", 0);
    pc.stratify = cfg.get_bool_or("stratify", false);
    pc.threads = cfg.has("threads") ? static_cast<unsigned>(cfg.get_size("threads"))
                                    : default_thread_count();
    require(pc.threads >= 1, ErrorCode::Config, "threads must be at least 1");

    pc.clinical_table = cfg.get_string_or("clinical_table", "");
    if (pc.dataset == "clinical" || cfg.has("clinical_table")) {
        require(!pc.clinical_table.empty(), ErrorCode::Config, "clinical_table is required");
    }
    pc.clinical_schema =
        cfg.get_string_or("clinical_schema", default_schema_path(pc.clinical_table));
    if (pc.dataset == "genomic") {
        for (const char* key : {"clinical_table", "expression_table", "cna_table", "mutation_table"}) {
            require(cfg.has(key), ErrorCode::Config,
                    std::string("genomic dataset requires ") + key);
        }
        pc.expression_table = cfg.get_string("expression_table");
        pc.cna_table = cfg.get_string("cna_table");
        pc.mutation_table = cfg.get_string("mutation_table");
        pc.expression_schema =
            cfg.get_string_or("expression_schema", default_schema_path(pc.expression_table));
        pc.cna_schema = cfg.get_string_or("cna_schema", default_schema_path(pc.cna_table));
        pc.mutation_schema =
            cfg.get_string_or("mutation_schema", default_schema_path(pc.mutation_table));
    }

    pc.rule.horizon_months = cfg.get_double_or("horizon_months", 120.0);
    pc.rule.dead_token = cfg.get_string_or("dead_token", pc.rule.dead_token);
    pc.rule.living_token = cfg.get_string_or("living_token", pc.rule.living_token);
    pc.rule.cause_positive_token = cfg.get_string_or("cause_token", pc.rule.cause_positive_token);
    pc.response.months = cfg.get_string_or("months_column", pc.response.months);
    pc.response.status = cfg.get_string_or("status_column", pc.response.status);
    pc.response.cause = cfg.get_string_or("cause_column", pc.response.cause);
    pc.max_total_missing = cfg.get_size_or("max_total_missing", 2);

    pc.logreg_alpha = cfg.get_double_or("logreg_alpha", pc.logreg_alpha);
    pc.logreg_epochs = cfg.get_size_or("logreg_epochs", pc.logreg_epochs);
    pc.logreg_learning_rate = cfg.get_double_or("logreg_learning_rate", pc.logreg_learning_rate);
    pc.svm_epochs = cfg.get_size_or("svm_epochs", pc.svm_epochs);
    pc.mlp_hidden = cfg.get_size_or("mlp_hidden", pc.mlp_hidden);
    pc.mlp_layers = cfg.get_size_or("mlp_layers", pc.mlp_layers);
    pc.mlp_epochs = cfg.get_size_or("mlp_epochs", pc.mlp_epochs);
    pc.mlp_learning_rate = cfg.get_double_or("mlp_learning_rate", pc.mlp_learning_rate);
    pc.forest_depth = cfg.get_size_or("forest_depth", pc.forest_depth);
    pc.forest_min_leaf = cfg.get_size_or("forest_min_leaf", pc.forest_min_leaf);
    pc.boost_depth = cfg.get_size_or("boost_depth", pc.boost_depth);
    pc.boost_eta = cfg.get_double_or("boost_eta", pc.boost_eta);
    pc.boost_lambda = cfg.get_double_or("boost_lambda", pc.boost_lambda);
    pc.boost_gamma = cfg.get_double_or("boost_gamma", pc.boost_gamma);
    pc.boost_min_child_weight =
        cfg.get_double_or("boost_min_child_weight", pc.boost_min_child_weight);
    pc.boost_epsilon = cfg.get_double_or("boost_epsilon", pc.boost_epsilon);
    const std::string mode = cfg.get_string_or("boost_mode", "exact");
    if (mode == "exact") {
        pc.boost_mode = SplitMode::Exact;
    } else if (mode == "approx") {
        pc.boost_mode = SplitMode::Approx;
    } else {
        fail(ErrorCode::Config, "boost_mode must be 'exact' or 'approx', got '" + mode + "'");
    }
    pc.goa_agents = cfg.get_size_or("goa_agents", pc.goa_agents);
    pc.goa_iters = cfg.get_size_or("goa_iters", pc.goa_iters);
    pc.goa_weight_bound = cfg.get_double_or("goa_weight_bound", pc.goa_weight_bound);
    pc.goa_patience = cfg.get_size_or("goa_patience", pc.goa_patience);
    pc.self_train_max_iters = cfg.get_size_or("self_train_max_iters", pc.self_train_max_iters);
    pc.self_train_base_lambda =
        cfg.get_double_or("self_train_base_lambda", pc.self_train_base_lambda);
    pc.co_train_rounds = cfg.get_size_or("co_train_rounds", pc.co_train_rounds);
    pc.co_train_base_lambda = cfg.get_double_or("co_train_base_lambda", pc.co_train_base_lambda);
    return pc;
}

/// Design matrix split into the labeled block the harness consumes and the
/// unlabeled block the semi-supervised learners may draw from.
struct Prepared {
    Matrix labeled_X;
    std::vector<int> y;
    Matrix unlabeled_X;
    std::vector<std::string> feature_names;
    std::vector<std::vector<std::size_t>> feature_groups;  // columns per source column
    std::string encoder_json;
    SplitPlan split;
    std::size_t n_rows_loaded = 0;
};

std::vector<std::string> column_text(const Column& c) {
    require(c.kind != ColumnKind::Numeric, ErrorCode::Validation,
            "column '" + c.name + "' must be categorical, found numeric");
    return c.text;
}

std::vector<ClassLabel> labels_from_frame(const TableFrame& frame, const LabelRule& rule,
                                          const ResponseColumns& response) {
    const Column& months = frame.column(response.months);
    require(months.kind == ColumnKind::Numeric, ErrorCode::Validation,
            "column '" + response.months + "' must be numeric");
    return assign_labels(months.numeric, column_text(frame.column(response.status)),
                         column_text(frame.column(response.cause)), rule);
}

void split_by_label(const std::vector<ClassLabel>& labels, std::vector<std::size_t>& labeled,
                    std::vector<std::size_t>& unlabeled, std::vector<int>& y) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == ClassLabel::Unlabeled) {
            unlabeled.push_back(i);
        } else {
            labeled.push_back(i);
            y.push_back(label_to_binary(labels[i]));
        }
    }
}

Matrix take_rows(const Matrix& X, const std::vector<std::size_t>& rows) {
    Matrix out(rows.size(), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double* src = X.row_ptr(rows[i]);
        std::copy(src, src + X.cols(), out.row_ptr(i));
    }
    return out;
}

/// Groups consecutive encoded columns by their source column, using the
/// "source=category" naming convention for one-hot spans.
std::vector<std::vector<std::size_t>> groups_from_names(const std::vector<std::string>& names) {
    std::vector<std::vector<std::size_t>> groups;
    std::string last;
    for (std::size_t j = 0; j < names.size(); ++j) {
        const std::string source = names[j].substr(0, names[j].find('='));
        if (groups.empty() || source != last) {
            groups.emplace_back();
            last = source;
        }
        groups.back().push_back(j);
    }
    return groups;
}

Prepared prepare_clinical(const PipelineConfig& pc) {
    const SchemaSpec schema = SchemaSpec::from_json_file(pc.clinical_schema);
    const TableFrame raw = load_table(pc.clinical_table, schema);
    const TableFrame frame = apply_drop_policy(raw, pc.max_total_missing);
    require(frame.n_rows() > 0, ErrorCode::Validation,
            "no rows survive the missing-data drop policy");

    const std::vector<ClassLabel> labels = labels_from_frame(frame, pc.rule, pc.response);
    std::vector<std::size_t> labeled_rows, unlabeled_rows;
    std::vector<int> y;
    split_by_label(labels, labeled_rows, unlabeled_rows, y);

    Prepared prep;
    prep.n_rows_loaded = raw.n_rows();
    prep.y = y;
    prep.split = make_split(labeled_rows.size(), pc.seed,
                            pc.stratify ? std::optional<std::vector<int>>(y) : std::nullopt);

    // standardizers and category lists come from the labeled training rows only
    std::vector<std::size_t> fit_rows;
    for (std::size_t i : prep.split.train_idx) fit_rows.push_back(labeled_rows[i]);
    const std::vector<std::string> exclude = {pc.response.months, pc.response.status,
                                              pc.response.cause};
    const EncoderPlan encoder = fit_encoder(frame, fit_rows, exclude, 0);

    const DesignMatrix design = build_clinical_matrix(frame, pc.rule, pc.response, encoder);
    prep.labeled_X = take_rows(design.values, labeled_rows);
    prep.unlabeled_X = take_rows(design.values, unlabeled_rows);
    prep.feature_names = design.feature_names;
    prep.feature_groups = groups_from_names(design.feature_names);
    prep.encoder_json = encoder.to_json_text();
    return prep;
}

TableFrame response_only_frame(const TableFrame& clinical, const ResponseColumns& response) {
    std::vector<Column> cols;
    cols.push_back(clinical.column(clinical.id_column_name()));
    cols.push_back(clinical.column(response.months));
    cols.push_back(clinical.column(response.status));
    cols.push_back(clinical.column(response.cause));
    return TableFrame(std::move(cols), clinical.id_column_name());
}

Prepared prepare_genomic(const PipelineConfig& pc) {
    const TableFrame clinical =
        load_table(pc.clinical_table, SchemaSpec::from_json_file(pc.clinical_schema));
    const TableFrame expression =
        load_table(pc.expression_table, SchemaSpec::from_json_file(pc.expression_schema));
    const TableFrame cna = load_table(pc.cna_table, SchemaSpec::from_json_file(pc.cna_schema));
    const TableFrame mutation =
        load_table(pc.mutation_table, SchemaSpec::from_json_file(pc.mutation_schema));

    // restrict to patients with complete responses present in all four tables
    std::vector<TableFrame> aligned =
        intersect_patients({response_only_frame(clinical, pc.response), expression, cna, mutation});
    aligned[0] = apply_drop_policy(aligned[0], pc.max_total_missing);
    aligned = intersect_patients({aligned[0], aligned[1], aligned[2], aligned[3]});
    require(aligned[0].n_rows() > 0, ErrorCode::Validation,
            "no patients shared by all four tables after the drop policy");

    const std::vector<ClassLabel> labels = labels_from_frame(aligned[0], pc.rule, pc.response);
    std::vector<std::size_t> labeled_rows, unlabeled_rows;
    std::vector<int> y;
    split_by_label(labels, labeled_rows, unlabeled_rows, y);

    Prepared prep;
    prep.n_rows_loaded = aligned[0].n_rows();
    prep.y = y;
    prep.split = make_split(labeled_rows.size(), pc.seed,
                            pc.stratify ? std::optional<std::vector<int>>(y) : std::nullopt);

    std::vector<std::size_t> fit_rows;
    for (std::size_t i : prep.split.train_idx) fit_rows.push_back(labeled_rows[i]);
    const DesignMatrix design =
        build_genomic_matrix(aligned[1], aligned[2], aligned[3], labels, fit_rows, 0);
    prep.labeled_X = take_rows(design.values, labeled_rows);
    prep.unlabeled_X = take_rows(design.values, unlabeled_rows);
    prep.feature_names = design.feature_names;
    prep.feature_groups = groups_from_names(design.feature_names);
    return prep;
}

std::vector<double> grid_or(const PipelineConfig& pc, const std::string& learner,
                            std::vector<double> fallback) {
    auto grid = pc.raw->get_double_list_or("grid_" + learner, fallback);
    require(!grid.empty(), ErrorCode::Config, "grid_" + learner + " is empty");
    return grid;
}

std::size_t param_as_count(double param, const char* what) {
    const double rounded = std::llround(param);
    require(rounded >= 1.0 && std::abs(param - rounded) < 1e-9, ErrorCode::Config,
            std::string(what) + " grid values must be positive integers");
    return static_cast<std::size_t>(rounded);
}

/// Copies the view's rows followed by the full unlabeled block, and describes
/// the result as labeled/unlabeled pools for the semi-supervised fitters.
struct PooledData {
    Matrix X;
    LabeledPool L;
    UnlabeledPool U;
};

PooledData pool_with_unlabeled(const DataView& v, const Matrix& unlabeled) {
    PooledData out;
    out.X = Matrix(v.size() + unlabeled.rows(), v.n_features());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double* src = v.X->row_ptr(v.rows[i]);
        std::copy(src, src + v.n_features(), out.X.row_ptr(i));
        out.L.rows.push_back(i);
    }
    for (std::size_t i = 0; i < unlabeled.rows(); ++i) {
        const double* src = unlabeled.row_ptr(i);
        std::copy(src, src + unlabeled.cols(), out.X.row_ptr(v.size() + i));
        out.U.rows.push_back(v.size() + i);
    }
    out.L.labels = v.y;
    return out;
}

ViewSpec two_views_for_mask(const std::vector<std::vector<std::size_t>>& groups, std::size_t mask,
                            std::size_t max_rounds) {
    const std::size_t g = groups.size();
    require(g >= 2 && g <= 24, ErrorCode::Config,
            "co_train needs between 2 and 24 feature groups, dataset has " + std::to_string(g));
    const std::size_t limit = std::size_t{1} << (g - 1);
    require(mask + 1 < limit, ErrorCode::Config,
            "co_train partition index " + std::to_string(mask) + " out of range (max " +
                std::to_string(limit - 2) + ")");
    ViewSpec spec;
    spec.views.assign(2, {});
    for (std::size_t k = 0; k < g; ++k) {
        const bool in_a = k == 0 || ((mask >> (k - 1)) & 1);
        auto& dst = spec.views[in_a ? 0 : 1];
        dst.insert(dst.end(), groups[k].begin(), groups[k].end());
    }
    std::sort(spec.views[0].begin(), spec.views[0].end());
    std::sort(spec.views[1].begin(), spec.views[1].end());
    spec.max_rounds = max_rounds;
    return spec;
}

/// Default co-training grid: each group alone against all the others.
std::vector<double> singleton_partition_masks(std::size_t n_groups) {
    require(n_groups >= 2 && n_groups <= 24, ErrorCode::Config,
            "co_train needs between 2 and 24 feature groups, dataset has " +
                std::to_string(n_groups));
    const std::size_t limit = std::size_t{1} << (n_groups - 1);
    std::vector<double> masks = {0.0};  // group 0 alone
    for (std::size_t k = 1; k < n_groups; ++k) {
        masks.push_back(static_cast<double>((limit - 1) - (std::size_t{1} << (k - 1))));
    }
    std::sort(masks.begin(), masks.end());
    return masks;
}

LearnerSpec make_learner(const PipelineConfig& pc, const Prepared& prep,
                         const std::string& name) {
    LearnerSpec spec;
    spec.name = name;

    if (name == "knn") {
        spec.grid = grid_or(pc, name, {1, 3, 5, 9, 15, 25});
        spec.simplicity = Simplicity::LargerParamSimpler;
        spec.fit = [](const DataView& v, double param, std::uint64_t) {
            KnnConfig kc;
            // never ask for more neighbours than there are training rows
            kc.k = std::min(param_as_count(param, "knn"), v.size());
            return std::make_unique<KnnClassifier>(v.dense(), v.y, kc);
        };
    } else if (name == "logreg_en") {
        spec.grid = grid_or(pc, name, {1e-4, 1e-3, 1e-2, 0.1, 1.0});
        spec.simplicity = Simplicity::LargerParamSimpler;
        const double alpha = pc.logreg_alpha;
        const double lr = pc.logreg_learning_rate;
        const std::size_t epochs = pc.logreg_epochs;
        spec.fit = [=](const DataView& v, double param, std::uint64_t seed) {
            ElasticNetConfig c;
            c.lambda = param;
            c.alpha = alpha;
            c.learning_rate = lr;
            c.epochs = epochs;
            c.seed = seed;
            return std::make_unique<LinearClassifier>(fit_sgd_elasticnet(v.dense(), v.y, c));
        };
    } else if (name == "svm") {
        spec.grid = grid_or(pc, name, {0.01, 0.1, 1.0, 10.0, 100.0});
        spec.simplicity = Simplicity::SmallerParamSimpler;
        const std::size_t epochs = pc.svm_epochs;
        spec.fit = [=](const DataView& v, double param, std::uint64_t seed) {
            SvmConfig c;
            c.C = param;
            c.epochs = epochs;
            c.seed = seed;
            std::vector<int> pm1(v.y.size());
            for (std::size_t i = 0; i < v.y.size(); ++i) pm1[i] = v.y[i] == 1 ? 1 : -1;
            return std::make_unique<SvmClassifier>(fit_linear_svm(v.dense(), pm1, c));
        };
    } else if (name == "mlp") {
        spec.grid = grid_or(pc, name, {0.0, 1e-4, 1e-3, 1e-2, 0.1});
        spec.simplicity = Simplicity::LargerParamSimpler;
        const std::size_t hidden = pc.mlp_hidden;
        const std::size_t layers = pc.mlp_layers;
        const double lr = pc.mlp_learning_rate;
        const std::size_t epochs = pc.mlp_epochs;
        spec.fit = [=](const DataView& v, double param, std::uint64_t seed) {
            MlpArch arch;
            arch.layer_sizes.push_back(v.n_features());
            arch.layer_sizes.insert(arch.layer_sizes.end(), layers, hidden);
            arch.layer_sizes.push_back(1);
            BackpropConfig c;
            c.learning_rate = lr;
            c.epochs = epochs;
            c.l2_lambda = param;
            c.seed = seed;
            return std::make_unique<MlpClassifier>(fit_backprop(v.dense(), v.y, arch, c));
        };
    } else if (name == "forest") {
        spec.grid = grid_or(pc, name, {10, 25, 50, 100});
        spec.simplicity = Simplicity::SmallerParamSimpler;
        const std::size_t depth = pc.forest_depth;
        const std::size_t min_leaf = pc.forest_min_leaf;
        spec.fit = [=](const DataView& v, double param, std::uint64_t seed) {
            ForestConfig c;
            c.n_trees = param_as_count(param, "forest");
            c.m_features = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::sqrt(static_cast<double>(v.n_features()))));
            c.max_depth = depth;
            c.min_samples_leaf = min_leaf;
            c.seed = seed;
            return std::make_unique<RandomForest>(fit_random_forest(v.dense(), v.y, c));
        };
    } else if (name == "boost") {
        spec.grid = grid_or(pc, name, {25, 50, 100, 200});
        spec.simplicity = Simplicity::SmallerParamSimpler;
        BoostParams base;
        base.lambda = pc.boost_lambda;
        base.gamma = pc.boost_gamma;
        base.eta = pc.boost_eta;
        base.max_depth = pc.boost_depth;
        base.min_child_weight = pc.boost_min_child_weight;
        base.approx_epsilon = pc.boost_epsilon;
        const SplitMode mode = pc.boost_mode;
        spec.fit = [=](const DataView& v, double param, std::uint64_t seed) {
            BoostParams p = base;
            p.n_rounds = param_as_count(param, "boost");
            p.seed = seed;
            const Matrix X = v.dense();
            const std::vector<std::uint8_t> mask = v.dense_missing();
            return std::make_unique<BoostEnsemble>(
                fit_boost(X, mask.empty() ? nullptr : &mask, v.y, p, mode));
        };
    } else if (name == "irls_l1") {
        spec.grid = grid_or(pc, name, {1e-4, 1e-3, 1e-2, 0.1, 1.0});
        spec.simplicity = Simplicity::LargerParamSimpler;
        spec.fit = [](const DataView& v, double param, std::uint64_t) {
            IrlsConfig c;
            c.lambda = param;
            return std::make_unique<LinearClassifier>(fit_irls_l1(v.dense(), v.y, c).model);
        };
    } else if (name == "self_train") {
        spec.grid = grid_or(pc, name, {0.6, 0.7, 0.8, 0.9, 0.95, 1.0});
        spec.simplicity = Simplicity::LargerParamSimpler;
        const Matrix* unlabeled = &prep.unlabeled_X;
        const double base_lambda = pc.self_train_base_lambda;
        const double alpha_mix = pc.logreg_alpha;
        const double lr = pc.logreg_learning_rate;
        const std::size_t epochs = pc.logreg_epochs;
        const std::size_t max_iters = pc.self_train_max_iters;
        spec.fit = [=](const DataView& v, double param, std::uint64_t seed) {
            PooledData pool = pool_with_unlabeled(v, *unlabeled);
            const BaseFitFn base = [=](const DataView& train) {
                ElasticNetConfig c;
                c.lambda = base_lambda;
                c.alpha = alpha_mix;
                c.learning_rate = lr;
                c.epochs = epochs;
                c.seed = seed;
                return std::unique_ptr<Classifier>(
                    std::make_unique<LinearClassifier>(fit_sgd_elasticnet(train.dense(), train.y, c)));
            };
            SelfTrainConfig c;
            c.confidence_alpha = param;
            c.max_iters = max_iters;
            auto result = self_train(base, pool.X, nullptr, pool.L, pool.U, c);
            return std::move(result.model);
        };
    } else if (name == "co_train") {
        spec.grid = grid_or(pc, name, singleton_partition_masks(prep.feature_groups.size()));
        spec.simplicity = Simplicity::SmallerParamSimpler;
        const Matrix* unlabeled = &prep.unlabeled_X;
        const std::vector<std::vector<std::size_t>>* groups = &prep.feature_groups;
        const double base_lambda = pc.co_train_base_lambda;
        const double alpha_mix = pc.logreg_alpha;
        const double lr = pc.logreg_learning_rate;
        const std::size_t epochs = pc.logreg_epochs;
        const std::size_t rounds = pc.co_train_rounds;
        spec.fit = [=](const DataView& v, double param, std::uint64_t seed) {
            const ViewSpec views =
                two_views_for_mask(*groups, param_as_count(param + 1, "co_train") - 1, rounds);
            PooledData pool = pool_with_unlabeled(v, *unlabeled);
            const BaseFitFn base = [=](const DataView& train) {
                ElasticNetConfig c;
                c.lambda = base_lambda;
                c.alpha = alpha_mix;
                c.learning_rate = lr;
                c.epochs = epochs;
                c.seed = seed;
                return std::unique_ptr<Classifier>(
                    std::make_unique<LinearClassifier>(fit_sgd_elasticnet(train.dense(), train.y, c)));
            };
            auto result = co_train(base, pool.X, nullptr, pool.L, pool.U, views);
            return std::make_unique<VoteClassifier>(std::move(result.models),
                                                    std::move(result.views));
        };
    } else if (name == "goa_mlp") {
        spec.grid = grid_or(pc, name, {static_cast<double>(pc.mlp_hidden)});
        spec.simplicity = Simplicity::SmallerParamSimpler;
        const std::size_t layers = pc.mlp_layers;
        GoaParams gp;
        gp.n_agents = pc.goa_agents;
        gp.max_iters = pc.goa_iters;
        gp.patience = pc.goa_patience;
        const double bound = pc.goa_weight_bound;
        spec.fit = [=](const DataView& v, double param, std::uint64_t seed) {
            MlpArch arch;
            arch.layer_sizes.push_back(v.n_features());
            arch.layer_sizes.insert(arch.layer_sizes.end(), layers,
                                    param_as_count(param, "goa_mlp"));
            arch.layer_sizes.push_back(1);
            GoaParams p = gp;
            p.seed = seed;
            GoaTrainOptions opts;
            opts.weight_bound = bound;
            return std::make_unique<MlpClassifier>(goa_train_mlp(v.dense(), v.y, arch, p, opts));
        };
    } else {
        fail(ErrorCode::Config, "unknown learner '" + name + "'");
    }
    return spec;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::Io, "cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    require(out.good(), ErrorCode::Io, "write to '" + path + "' failed");
}

std::string curve_csv(const CvReport& report) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "fold,param,mean_auc,sd_auc\n";
    for (std::size_t f = 0; f < report.folds.size(); ++f) {
        const AccuracyCurve& c = report.folds[f].curve;
        for (std::size_t i = 0; i < c.params.size(); ++i) {
            out << f << ',' << c.params[i] << ',' << c.mean_auc[i] << ',' << c.sd_auc[i] << '\n';
        }
    }
    return out.str();
}

std::string features_json(const std::string& dataset, const Prepared& prep) {
    nlohmann::ordered_json j;
    j["dataset"] = dataset;
    j["n_features"] = prep.feature_names.size();
    j["n_labeled"] = prep.labeled_X.rows();
    j["n_unlabeled"] = prep.unlabeled_X.rows();
    j["names"] = prep.feature_names;
    j["groups"] = prep.feature_groups;
    return j.dump(2) + "\n";
}

std::string format_auc(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", value * 100.0);
    return buf;
}

void write_artifacts(const PipelineConfig& pc, const Prepared& prep, const RunReport& report) {
    fs::create_directories(pc.out_dir);
    const fs::path dir(pc.out_dir);
    write_text_file((dir / "report.json").string(), report.to_json_text());
    write_text_file((dir / "table.md").string(), render_table(report));
    write_text_file((dir / "features.json").string(), features_json(pc.dataset, prep));
    if (!prep.encoder_json.empty()) {
        write_text_file((dir / "encoder.json").string(), prep.encoder_json);
    }
    for (const CvReport& r : report.learners) {
        write_text_file((dir / ("roc_" + r.learner + ".csv")).string(),
                        roc_curve(r.test_scores, r.test_labels).to_csv());
        write_text_file((dir / ("curve_" + r.learner + ".csv")).string(), curve_csv(r));
    }
}

}  // namespace

std::string RunReport::to_json_text() const {
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["dataset"] = dataset;
    j["seed"] = seed;
    j["learners"] = nlohmann::ordered_json::array();
    for (const CvReport& r : learners) {
        j["learners"].push_back(nlohmann::ordered_json::parse(r.to_json_text()));
    }
    return j.dump(2) + "\n";
}

RunReport run_pipeline(const ConfigMap& cfg) {
    const PipelineConfig pc = parse_run_config(cfg);
    const Prepared prep = pc.dataset == "clinical" ? prepare_clinical(pc) : prepare_genomic(pc);

    LabeledDataset data;
    data.X = &prep.labeled_X;
    data.y = prep.y;

    RunReport report;
    report.dataset = pc.dataset;
    report.seed = pc.seed;
    for (const std::string& name : pc.learners) {
        const LearnerSpec spec = make_learner(pc, prep, name);
        report.learners.push_back(nested_cv(data, prep.split, spec, pc.seed, pc.threads));
    }
    write_artifacts(pc, prep, report);
    return report;
}

RunReport run_pipeline_file(const std::string& config_path) {
    return run_pipeline(ConfigMap::from_file(config_path));
}

SynthSpec synth_spec_from_config(const ConfigMap& cfg) {
    static const std::set<std::string> known = {
        "rows",        "numeric_features", "categorical_features",
        "genes",       "cna_columns",      "mutation_columns",
        "informative", "label_noise",      "missing_rate",
        "unlabeled_fraction", "seed",
    };
    cfg.check_keys(known, {});
    SynthSpec spec;
    spec.rows = cfg.get_size_or("rows", spec.rows);
    spec.n_numeric = cfg.get_size_or("numeric_features", spec.n_numeric);
    spec.n_categorical = cfg.get_size_or("categorical_features", spec.n_categorical);
    spec.n_genes = cfg.get_size_or("genes", spec.n_genes);
    spec.n_cna = cfg.get_size_or("cna_columns", spec.n_cna);
    spec.n_mutation = cfg.get_size_or("mutation_columns", spec.n_mutation);
    spec.informative = cfg.get_size_or("informative", spec.informative);
    spec.label_noise = cfg.get_double_or("label_noise", spec.label_noise);
    spec.missing_rate = cfg.get_double_or("missing_rate", spec.missing_rate);
    spec.unlabeled_fraction = cfg.get_double_or("unlabeled_fraction", spec.unlabeled_fraction);
    spec.seed = cfg.get_uint64_or("seed", spec.seed);
    spec.validate();
    return spec;
}

void write_synthetic(const SynthSpec& spec, const std::string& out_dir) {
    const SynthData data = generate_synthetic(spec);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    const std::pair<const TableFrame*, const char*> tables[] = {
        {&data.clinical, "clinical"},
        {&data.expression, "expression"},
        {&data.cna, "cna"},
        {&data.mutation, "mutation"},
    };
    for (const auto& [frame, stem] : tables) {
        write_table(*frame, (dir / (std::string(stem) + ".tsv")).string());
        write_text_file((dir / (std::string(stem) + ".schema.json")).string(),
                        schema_from_frame(*frame).to_json_text());
    }
}

std::string render_table(const RunReport& report) {
    std::ostringstream out;
    out << "| model | validation AUC | test AUC |\n";
    out << "| --- | --- | --- |\n";
    for (const CvReport& r : report.learners) {
        out << "| " << r.learner << " | " << format_auc(r.mean_val_auc) << " | "
            << format_auc(r.test_auc) << " |\n";
    }
    return out.str();
}

RunReport load_report_dir(const std::string& dir) {
    const std::string report_path = (fs::path(dir) / "report.json").string();
    std::ifstream in(report_path, std::ios::binary);
    require(in.good(), ErrorCode::Io, "cannot open '" + report_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Parse, "report.json is not valid JSON: " + std::string(e.what()));
    }
    RunReport report;
    try {
        report.dataset = j.at("dataset").get<std::string>();
        report.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& jl : j.at("learners")) {
            CvReport r;
            r.learner = jl.at("learner").get<std::string>();
            r.mean_val_auc = jl.at("mean_val_auc").get<double>();
            r.best_param = jl.at("best_param").get<double>();
            r.test_auc = jl.at("test_auc").get<double>();
            report.learners.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Parse, "report.json is missing fields: " + std::string(e.what()));
    }
    return report;
}

std::string render_report_dir(const std::string& dir) {
    const RunReport report = load_report_dir(dir);
    const std::string table = render_table(report);
    write_text_file((fs::path(dir) / "table.md").string(), table);
    return table;
}

}  // namespace survkit
