#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ipred/correlation.hpp"
#include "ipred/evaluation.hpp"
#include "ipred/network_sim.hpp"

namespace ipred {

/// scenario,predictor,delta,nmse_db,realizations; one row per cell in result order.
void write_results_csv(std::ostream& os, std::span<const EvaluationResult> results);
/// Same rows with all three aggregations.
void write_aggregates_csv(std::ostream& os, std::span<const EvaluationResult> results);
void write_histogram_csv(std::ostream& os, std::span<const EvaluationResult> results);
void write_correlation_csv(std::ostream& os, const CorrelationCurve& rho);
void write_traces_csv(std::ostream& os, std::span<const InterferenceTrace> traces);

/// Writes the results CSV to `path` and the histogram and aggregate tables
/// next to it (<stem>_hist.csv, <stem>_aggregates.csv). Failures name the path.
void emit_results(std::span<const EvaluationResult> results, const std::filesystem::path& path);

/// Opens `path` for writing, creating parent directories; throws with the path on failure.
std::ofstream open_output(const std::filesystem::path& path);
/// Sibling of `path` with `suffix` appended to the stem.
std::filesystem::path sibling_path(const std::filesystem::path& path, const std::string& suffix);

}  // namespace ipred
