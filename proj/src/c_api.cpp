#include "survkit/c_api.h"

#include <exception>
#include <string>
#include <utility>

#include "common.hpp"
#include "pipeline.hpp"

struct sk_report {
    survkit::RunReport report;
    std::string table;
    std::string json;
};

namespace {

thread_local std::string g_last_error;

int code_of(const survkit::Error& e) {
    return e.code() == survkit::ErrorCode::Config ? SK_ERR_CONFIG : SK_ERR_RUNTIME;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return SK_OK;
    } catch (const survkit::Error& e) {
        g_last_error = e.what();
        return code_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SK_ERR_RUNTIME;
    } catch (...) {
        g_last_error = "unknown error";
        return SK_ERR_RUNTIME;
    }
}

sk_report* make_handle(survkit::RunReport report) {
    auto* handle = new sk_report;
    handle->report = std::move(report);
    handle->table = survkit::render_table(handle->report);
    handle->json = handle->report.to_json_text();
    return handle;
}

}  // namespace

extern "C" {

const char* sk_version(void) { return survkit::kVersion; }

const char* sk_last_error(void) { return g_last_error.c_str(); }

int sk_run_pipeline(const char* config_path, sk_report_t** out) {
    if (out) *out = nullptr;
    if (!config_path) {
        g_last_error = "config_path is NULL";
        return SK_ERR_CONFIG;
    }
    return guarded([&] {
        survkit::RunReport report = survkit::run_pipeline_file(config_path);
        if (out) *out = make_handle(std::move(report));
    });
}

int sk_generate_synthetic(const char* spec_path, const char* out_dir) {
    if (!spec_path || !out_dir) {
        g_last_error = "spec_path or out_dir is NULL";
        return SK_ERR_CONFIG;
    }
    return guarded([&] {
        const survkit::SynthSpec spec =
            survkit::synth_spec_from_config(survkit::ConfigMap::from_file(spec_path));
        survkit::write_synthetic(spec, out_dir);
    });
}

int sk_render_report(const char* dir, sk_report_t** out) {
    if (out) *out = nullptr;
    if (!dir) {
        g_last_error = "dir is NULL";
        return SK_ERR_CONFIG;
    }
    return guarded([&] {
        survkit::RunReport report = survkit::load_report_dir(dir);
        survkit::render_report_dir(dir);
        if (out) *out = make_handle(std::move(report));
    });
}

const char* sk_report_dataset(const sk_report_t* report) {
    return report ? report->report.dataset.c_str() : "";
}

uint64_t sk_report_seed(const sk_report_t* report) { return report ? report->report.seed : 0; }

size_t sk_report_learner_count(const sk_report_t* report) {
    return report ? report->report.learners.size() : 0;
}

const char* sk_report_learner_name(const sk_report_t* report, size_t index) {
    if (!report || index >= report->report.learners.size()) return "";
    return report->report.learners[index].learner.c_str();
}

double sk_report_val_auc(const sk_report_t* report, size_t index) {
    if (!report || index >= report->report.learners.size()) return 0.0;
    return report->report.learners[index].mean_val_auc;
}

double sk_report_test_auc(const sk_report_t* report, size_t index) {
    if (!report || index >= report->report.learners.size()) return 0.0;
    return report->report.learners[index].test_auc;
}

const char* sk_report_table(const sk_report_t* report) {
    return report ? report->table.c_str() : "";
}

const char* sk_report_json(const sk_report_t* report) {
    return report ? report->json.c_str() : "";
}

void sk_report_free(sk_report_t* report) { delete report; }

}  // extern "C"
