#include "ipred/results_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace ipred {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check(std::ostream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw std::runtime_error("write failed: '" + path.string() + "'");
}

}  // namespace

void write_results_csv(std::ostream& os, std::span<const EvaluationResult> results) {
  os << "scenario,predictor,delta,nmse_db,realizations\n";
  for (const auto& r : results)
    for (const auto& c : r.cells)
      os << r.scenario << ',' << to_string(c.kind) << ',' << c.delta << ',' << num(c.nmse_db) << ','
         << c.realizations << '\n';
}

void write_aggregates_csv(std::ostream& os, std::span<const EvaluationResult> results) {
  os << "scenario,predictor,delta,nmse_db,pooled_nmse_db,linear_mean_nmse_db,realizations\n";
  for (const auto& r : results)
    for (const auto& c : r.cells)
      os << r.scenario << ',' << to_string(c.kind) << ',' << c.delta << ',' << num(c.nmse_db) << ','
         << num(c.pooled_nmse_db) << ',' << num(c.linear_mean_nmse_db) << ',' << c.realizations
         << '\n';
}

void write_histogram_csv(std::ostream& os, std::span<const EvaluationResult> results) {
  os << "scenario,predictor,delta,bin_low_db,bin_high_db,count\n";
  for (const auto& r : results) {
    for (const auto& c : r.cells) {
      const std::size_t bins = c.histogram.size();
      const double width = (r.histogram_max_db - r.histogram_min_db) / static_cast<double>(bins);
      for (std::size_t b = 0; b < bins; ++b) {
        const double lo = r.histogram_min_db + width * static_cast<double>(b);
        os << r.scenario << ',' << to_string(c.kind) << ',' << c.delta << ',' << num(lo) << ','
           << num(lo + width) << ',' << c.histogram[b] << '\n';
      }
    }
  }
}

void write_correlation_csv(std::ostream& os, const CorrelationCurve& rho) {
  os << "tau,rho\n";
  for (std::size_t t = 0; t < rho.values.size(); ++t) os << t << ',' << exact(rho.values[t]) << '\n';
}

void write_traces_csv(std::ostream& os, std::span<const InterferenceTrace> traces) {
  os << "realization,slot,interference\n";
  for (std::size_t r = 0; r < traces.size(); ++r)
    for (std::size_t t = 0; t < traces[r].values.size(); ++t)
      os << r << ',' << t << ',' << exact(traces[r].values[t]) << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open output file '" + path.string() + "'");
  return os;
}

std::filesystem::path sibling_path(const std::filesystem::path& path, const std::string& suffix) {
  std::filesystem::path out = path;
  out.replace_filename(path.stem().string() + suffix + path.extension().string());
  return out;
}

void emit_results(std::span<const EvaluationResult> results, const std::filesystem::path& path) {
  {
    auto os = open_output(path);
    write_results_csv(os, results);
    check(os, path);
  }
  const auto hist = sibling_path(path, "_hist");
  {
    auto os = open_output(hist);
    write_histogram_csv(os, results);
    check(os, hist);
  }
  const auto agg = sibling_path(path, "_aggregates");
  auto os = open_output(agg);
  write_aggregates_csv(os, results);
  check(os, agg);
}

}  // namespace ipred
