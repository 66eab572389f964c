#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "synthetic.hpp"
#include "validation.hpp"

namespace survkit {

inline constexpr const char* kVersion = "0.1.0";

struct RunReport {
    std::string dataset;
    std::uint64_t seed = 0;
    std::vector<CvReport> learners;

    std::string to_json_text() const;
};

/// Executes the configured chain (load, label, drop, encode, split, nested CV
/// per learner) and writes report.json, per-learner roc_<name>.csv and
/// curve_<name>.csv, table.md, and feature metadata into the output
/// directory. The returned report backs the C API and the CLI summary.
RunReport run_pipeline(const ConfigMap& cfg);
RunReport run_pipeline_file(const std::string& config_path);

/// Reads a synthetic-generator spec (rows, widths, informative count, noise
/// and missing rates, seed) from the flat config format.
SynthSpec synth_spec_from_config(const ConfigMap& cfg);

/// Generates the frames and writes the four tables plus their schemas.
void write_synthetic(const SynthSpec& spec, const std::string& out_dir);

/// Markdown AUC table: one row per learner, values x100 to one decimal.
std::string render_table(const RunReport& report);

/// Reloads the summary fields of a previously written report.json.
RunReport load_report_dir(const std::string& dir);

/// Re-renders table.md from an existing report.json; returns the table text.
std::string render_report_dir(const std::string& dir);

}  // namespace survkit
