#include "ipred/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ipred {

const char* to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::Interference: return "interference";
    case PredictorKind::ChannelOnly: return "channel_only";
    case PredictorKind::LastValue: return "last_value";
    case PredictorKind::MeanValue: return "mean_value";
  }
  return "unknown";
}

PredictorKind predictor_kind_from_string(const std::string& name) {
  for (auto k : kAllPredictors)
    if (name == to_string(k)) return k;
  throw std::invalid_argument("unknown predictor kind '" + name + "'");
}

double nmse(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.size() != predicted.size() || truth.empty())
    throw std::invalid_argument("nmse: sequences must have equal, non-zero length");
  double err = 0.0;
  double power = 0.0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const double d = truth[t] - predicted[t];
    err += d * d;
    power += truth[t] * truth[t];
  }
  if (!(power > 0.0)) throw std::invalid_argument("nmse: reference sequence is all zero");
  return err / power;
}

double to_db(double ratio) {
  if (!(ratio > 0.0)) return kNmseFloorDb;
  return std::max(kNmseFloorDb, 10.0 * std::log10(ratio));
}

BaselinePredictions run_baselines(std::span<const double> trace, int delta) {
  if (delta < 1 || trace.size() <= static_cast<std::size_t>(delta))
    throw std::invalid_argument("run_baselines: trace must be longer than the horizon");
  const std::size_t n = trace.size() - static_cast<std::size_t>(delta);
  BaselinePredictions out;
  out.last_value.resize(n);
  out.mean_value.resize(n);
  double sum = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    sum += trace[t];
    out.last_value[t] = trace[t];
    out.mean_value[t] = sum / static_cast<double>(t + 1);
  }
  return out;
}

CorrelationCurve design_curve(PredictorKind kind, const SystemParams& params, std::size_t max_lag) {
  switch (kind) {
    case PredictorKind::Interference: return interference_autocorr(params, max_lag);
    case PredictorKind::ChannelOnly: return channel_only_autocorr(params.nu, max_lag);
    default: throw std::invalid_argument("design_curve: baseline predictors have no model");
  }
}

namespace {

std::optional<PredictorDesign> search_decimations(const CorrelationCurve& rho, const FitOptions& fit,
                                                  int max_decimation) {
  std::optional<PredictorDesign> best;
  for (int d = 1; d <= max_decimation; ++d) {
    if (rho.max_lag() / static_cast<std::size_t>(d) < 2 * std::max<std::size_t>(fit.T, 2 * fit.p_max))
      break;
    OrderSelection sel;
    try {
      sel = select_order(decimate_correlation(rho, d), fit);
    } catch (const std::runtime_error&) {
      continue;  // nothing feasible at this decimation
    }
    const RescaleResult rs = rescale_model(sel.model, d);
    if (rs.status != FitStatus::Ok) continue;
    PredictorDesign cand;
    cand.model = rs.model;
    cand.decimation = d;
    cand.report = std::move(sel.report);
    try {
      cand.original_mse_db = approximation_mse(rho, model_autocorr(cand.model, fit.T), fit.T);
      if (!steady_state_gain(to_state_space(cand.model)).converged) continue;
    } catch (const std::domain_error&) {
      continue;  // root mapping pushed a pole onto the unit circle
    }
    if (d == 1 && cand.report.target_met) return cand;
    if (!best || cand.original_mse_db < best->original_mse_db) best = std::move(cand);
  }
  return best;
}

}  // namespace

PredictorDesign design_predictor(const CorrelationCurve& rho, const DesignOptions& options) {
  if (auto design = search_decimations(rho, options.fit, options.max_decimation)) return *design;
  // Curves with a high floor or a band-limited spectrum can leave no pair
  // inside the tail band. Accept models that decay below the floor; the
  // running mean of the predictor carries the floor instead.
  FitOptions relaxed = options.fit;
  relaxed.tail_tolerance = std::numeric_limits<double>::infinity();
  if (auto design = search_decimations(rho, relaxed, options.max_decimation)) return *design;
  throw std::runtime_error("design_predictor: no feasible ARMA model at any decimation");
}

const PredictorCell& EvaluationResult::cell(PredictorKind kind, int delta) const {
  for (const auto& c : cells)
    if (c.kind == kind && c.delta == delta) return c;
  throw std::out_of_range("EvaluationResult: no cell for requested predictor/horizon");
}

namespace {

struct Sums {
  double err = 0.0;
  double power = 0.0;
};

// Scores one trace. sums is laid out [kind][delta].
void score_trace(std::span<const double> trace, const EvaluationOptions& options,
                 const std::vector<std::optional<SteadyStatePredictor>>& prototypes,
                 std::vector<Sums>& sums) {
  const std::size_t nk = options.kinds.size();
  const std::size_t nd = options.deltas.size();
  const int max_delta = *std::max_element(options.deltas.begin(), options.deltas.end());
  std::vector<std::optional<SteadyStatePredictor>> live = prototypes;
  std::vector<double> horizon(static_cast<std::size_t>(max_delta));
  double running = 0.0;
  const std::size_t n = trace.size();
  for (std::size_t t = 0; t < n; ++t) {
    running += trace[t];
    const bool scored = static_cast<long>(t) >= options.skip_slots;
    for (std::size_t k = 0; k < nk; ++k) {
      const PredictorKind kind = options.kinds[k];
      if (live[k]) {
        live[k]->update(trace[t]);
        if (!scored) continue;
        live[k]->predict_horizons(horizon);
      } else if (!scored) {
        continue;
      }
      for (std::size_t j = 0; j < nd; ++j) {
        const auto delta = static_cast<std::size_t>(options.deltas[j]);
        if (t + delta >= n) continue;
        double pred = 0.0;
        switch (kind) {
          case PredictorKind::LastValue: pred = trace[t]; break;
          case PredictorKind::MeanValue: pred = running / static_cast<double>(t + 1); break;
          default: pred = horizon[delta - 1]; break;
        }
        const double truth = trace[t + delta];
        Sums& s = sums[k * nd + j];
        s.err += (truth - pred) * (truth - pred);
        s.power += truth * truth;
      }
    }
  }
}

EvaluationResult collect(const std::string& name, const EvaluationOptions& options,
                         const std::vector<std::vector<Sums>>& per_trace) {
  EvaluationResult result;
  result.scenario = name;
  result.histogram_min_db = options.histogram_min_db;
  result.histogram_max_db = options.histogram_max_db;
  const std::size_t nk = options.kinds.size();
  const std::size_t nd = options.deltas.size();
  for (std::size_t k = 0; k < nk; ++k) {
    for (std::size_t j = 0; j < nd; ++j) {
      PredictorCell cell;
      cell.kind = options.kinds[k];
      cell.delta = options.deltas[j];
      cell.histogram.assign(options.histogram_bins, 0);
      double err = 0.0, power = 0.0, mean = 0.0, mean_db = 0.0;
      for (const auto& sums : per_trace) {
        const Sums& s = sums[k * nd + j];
        if (!(s.power > 0.0)) continue;
        err += s.err;
        power += s.power;
        const double ratio = s.err / s.power;
        mean += ratio;
        cell.per_realization.push_back(ratio);
        const double db = to_db(ratio);
        mean_db += db;
        const double span = options.histogram_max_db - options.histogram_min_db;
        auto bin = static_cast<long>(std::floor((db - options.histogram_min_db) / span *
                                                static_cast<double>(options.histogram_bins)));
        bin = std::clamp(bin, 0L, static_cast<long>(options.histogram_bins) - 1);
        ++cell.histogram[static_cast<std::size_t>(bin)];
      }
      cell.realizations = cell.per_realization.size();
      const double n = static_cast<double>(cell.realizations);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      cell.nmse_db = cell.realizations ? mean_db / n : nan;
      cell.linear_mean_nmse_db = cell.realizations ? to_db(mean / n) : nan;
      cell.pooled_nmse_db = power > 0.0 ? to_db(err / power) : nan;
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

EvaluationResult evaluate_impl(const std::string& name, const ScenarioConfig& config,
                               const EvaluationOptions& options, bool parallel) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  if (options.deltas.empty() || options.kinds.empty())
    throw std::invalid_argument("evaluate_scenario: need at least one predictor and horizon");

  // Offline design from the parameters only; no trace exists yet.
  const FitOptions& fit = options.design.fit;
  const std::size_t max_lag = 2 * std::max<std::size_t>(fit.T, 2 * fit.p_max) *
                              static_cast<std::size_t>(options.design.max_decimation);
  std::vector<std::optional<SteadyStatePredictor>> prototypes(options.kinds.size());
  std::vector<PredictorDesign> designs;
  for (std::size_t k = 0; k < options.kinds.size(); ++k) {
    const PredictorKind kind = options.kinds[k];
    if (kind != PredictorKind::Interference && kind != PredictorKind::ChannelOnly) continue;
    PredictorDesign design = design_predictor(design_curve(kind, config.params, max_lag), options.design);
    prototypes[k] = make_predictor(design.model);
    designs.push_back(std::move(design));
  }

  const std::size_t count = config.realizations;
  const std::size_t cells = options.kinds.size() * options.deltas.size();
  std::vector<std::vector<Sums>> per_trace(count, std::vector<Sums>(cells));
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t r = 0; r < count; ++r) {
      const InterferenceTrace trace = run_realization(config, r);
      score_trace(trace.values, options, prototypes, per_trace[r]);
    }
  } else {
    for (std::size_t r = 0; r < count; ++r) {
      const InterferenceTrace trace = run_realization(config, r);
      score_trace(trace.values, options, prototypes, per_trace[r]);
    }
  }
  EvaluationResult result = collect(name, options, per_trace);
  result.designs = std::move(designs);
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

EvaluationResult evaluate_scenario(const std::string& name, const ScenarioConfig& config,
                                   const EvaluationOptions& options) {
  return evaluate_impl(name, config, options, true);
}

EvaluationResult evaluate_scenario_serial(const std::string& name, const ScenarioConfig& config,
                                          const EvaluationOptions& options) {
  return evaluate_impl(name, config, options, false);
}

EvaluationResult evaluate_traces(const std::string& name, std::span<const InterferenceTrace> traces,
                                 const std::vector<std::optional<SteadyStatePredictor>>& predictors,
                                 const EvaluationOptions& options, bool parallel) {
  if (predictors.size() != options.kinds.size())
    throw std::invalid_argument("evaluate_traces: one predictor slot per kind required");
  const std::size_t cells = options.kinds.size() * options.deltas.size();
  std::vector<std::vector<Sums>> per_trace(traces.size(), std::vector<Sums>(cells));
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t r = 0; r < traces.size(); ++r)
      score_trace(traces[r].values, options, predictors, per_trace[r]);
  } else {
    for (std::size_t r = 0; r < traces.size(); ++r)
      score_trace(traces[r].values, options, predictors, per_trace[r]);
  }
  return collect(name, options, per_trace);
}

}  // namespace ipred
