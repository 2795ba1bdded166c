#pragma once

#include <string>
#include <vector>

#include "stablekernel/config.hpp"
#include "stablekernel/density.hpp"
#include "stablekernel/errors.hpp"

namespace stablekernel {

struct RunOutcome {
    ExitCode code = ExitCode::pass;
    std::string report_json;
    std::vector<std::string> files;  ///< written artifacts, relative to the output directory
};

struct RunOptions {
    bool timestamp = true;  ///< include the "timestamp" field; everything else is deterministic
    bool write_files = true;
};

/// Runs the configured pipeline and writes report.json plus CSV/binary artifacts into
/// config.output. Module errors propagate as stablekernel::Error.
RunOutcome run_pipeline(const RunConfig& config, const RunOptions& opt = {});

/// {"status": "error", "kind": ..., "message": ..., "exit_code": ...}.
std::string error_json(const std::exception& e);

/// Empty report skeleton: all arrays present and empty.
std::string empty_report_json(const RunConfig& config, bool timestamp = true);

/// Re-render a report.json into plot-ready CSVs (reports.csv, plus convergence.csv,
/// gamma_log.csv, exit.csv and acceptance.csv when the report has those sections).
std::vector<std::string> render_report(const std::string& report_path, const std::string& out_dir);

/// CSV of one time slice (column `slice`) of a field: columns x, value.
void write_slice_csv(const DensityField& field, std::size_t time_index, std::size_t slice, const std::string& path);

}  // namespace stablekernel
