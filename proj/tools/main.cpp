#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "survkit/c_api.h"

namespace {

int run_command(const std::string& config_path) {
    sk_report_t* report = nullptr;
    const int rc = sk_run_pipeline(config_path.c_str(), &report);
    if (rc != SK_OK) {
        std::fprintf(stderr, "error: %s\n", sk_last_error());
        return rc;
    }
    std::fputs(sk_report_table(report), stdout);
    sk_report_free(report);
    return SK_OK;
}

int synth_command(const std::string& spec_path, const std::string& out_dir) {
    const int rc = sk_generate_synthetic(spec_path.c_str(), out_dir.c_str());
    if (rc != SK_OK) {
        std::fprintf(stderr, "error: %s\n", sk_last_error());
        return rc;
    }
    std::printf("wrote synthetic tables to %s\n", out_dir.c_str());
    return SK_OK;
}

int report_command(const std::string& dir) {
    sk_report_t* report = nullptr;
    const int rc = sk_render_report(dir.c_str(), &report);
    if (rc != SK_OK) {
        std::fprintf(stderr, "error: %s\n", sk_last_error());
        return rc;
    }
    std::fputs(sk_report_table(report), stdout);
    sk_report_free(report);
    return SK_OK;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("survival classification pipeline (") + sk_version() + ")"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "execute a config and write its artifacts");
    run->add_option("config", config_path, "key=value config file")->required();

    std::string spec_path;
    std::string out_dir;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("spec", spec_path, "generator spec file")->required();
    synth->add_option("--out", out_dir, "output directory")->required();

    std::string report_dir;
    CLI::App* report = app.add_subcommand("report", "re-render table.md from report.json");
    report->add_option("dir", report_dir, "directory holding report.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // bad usage is a configuration problem; --help and --version are not
        return code == 0 ? SK_OK : SK_ERR_CONFIG;
    }

    if (run->parsed()) return run_command(config_path);
    if (synth->parsed()) return synth_command(spec_path, out_dir);
    if (report->parsed()) return report_command(report_dir);
    return SK_ERR_CONFIG;
}
