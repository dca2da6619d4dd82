#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ipred/arma.hpp"
#include "ipred/kalman.hpp"
#include "ipred/network_sim.hpp"

namespace ipred {

enum class PredictorKind { Interference, ChannelOnly, LastValue, MeanValue };

inline constexpr std::array<PredictorKind, 4> kAllPredictors{
    PredictorKind::Interference, PredictorKind::ChannelOnly, PredictorKind::LastValue,
    PredictorKind::MeanValue};

const char* to_string(PredictorKind kind);
PredictorKind predictor_kind_from_string(const std::string& name);

inline constexpr double kNmseFloorDb = -150.0;

/// Per-realization NMSE: sum (true - pred)^2 / sum true^2.
/// Throws std::invalid_argument on length mismatch or an all-zero reference.
double nmse(std::span<const double> truth, std::span<const double> predicted);
double to_db(double ratio);

struct BaselinePredictions {
  std::vector<double> last_value;  ///< element t predicts slot t + delta
  std::vector<double> mean_value;
};

/// Causal baselines for every t with t + delta inside the trace.
BaselinePredictions run_baselines(std::span<const double> trace, int delta);

/// Offline predictor design from an analytic correlation curve. Falls back to
/// decimated fits (rescaled to the slot time base) when the direct fit misses
/// the MSE target.
struct PredictorDesign {
  ArmaModel model;
  int decimation = 1;
  FitReport report;              ///< grid of the chosen decimation
  double original_mse_db = 0.0;  ///< MSE of the final model on the slot time base
};

struct DesignOptions {
  FitOptions fit;
  int max_decimation = 8;
};

PredictorDesign design_predictor(const CorrelationCurve& rho, const DesignOptions& options = {});

/// Analytic curve a model-based predictor is designed from.
CorrelationCurve design_curve(PredictorKind kind, const SystemParams& params, std::size_t max_lag);

struct EvaluationOptions {
  std::vector<PredictorKind> kinds{kAllPredictors.begin(), kAllPredictors.end()};
  std::vector<int> deltas{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  long skip_slots = Standardizer::kSeedCount;  ///< predictions made before this slot are not scored
  std::size_t histogram_bins = 40;
  double histogram_min_db = -30.0;
  double histogram_max_db = 10.0;
  DesignOptions design;
};

struct PredictorCell {
  PredictorKind kind{};
  int delta = 0;
  double nmse_db = 0.0;              ///< mean over realizations of per-realization NMSE in dB
  double pooled_nmse_db = 0.0;       ///< summed errors over summed power, in dB
  double linear_mean_nmse_db = 0.0;  ///< mean of linear per-realization NMSE, in dB
  std::size_t realizations = 0;
  std::vector<double> per_realization;  ///< linear NMSE, realization order
  std::vector<std::size_t> histogram;   ///< per-realization NMSE in dB
};

struct EvaluationResult {
  std::string scenario;
  std::vector<PredictorCell> cells;  ///< kind-major, delta-minor
  std::vector<PredictorDesign> designs;  ///< one per model-based kind, in kinds order
  double histogram_min_db = 0.0;
  double histogram_max_db = 0.0;
  double runtime_seconds = 0.0;

  const PredictorCell& cell(PredictorKind kind, int delta) const;
};

/// Builds every predictor from the scenario parameters alone, then scores
/// them over config.realizations simulated traces.
EvaluationResult evaluate_scenario(const std::string& name, const ScenarioConfig& config,
                                   const EvaluationOptions& options = {});
/// Single-threaded reference; produces the same numbers.
EvaluationResult evaluate_scenario_serial(const std::string& name, const ScenarioConfig& config,
                                          const EvaluationOptions& options = {});

/// Scores prebuilt predictors on given traces.
EvaluationResult evaluate_traces(const std::string& name, std::span<const InterferenceTrace> traces,
                                 const std::vector<std::optional<SteadyStatePredictor>>& predictors,
                                 const EvaluationOptions& options, bool parallel);

}  // namespace ipred
