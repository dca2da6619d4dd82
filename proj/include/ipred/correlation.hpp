#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ipred {

/// Network, traffic and channel parameters shared by the analytic
/// correlation model and the simulator.
struct SystemParams {
  double mu = 0.01;     ///< per-slot fraction of nodes starting a message
  int ell = 10;         ///< message length in slots
  double nu = 0.0077;   ///< node speed, distance units per slot
  double alpha = 3.0;   ///< path loss exponent
  double kappa = 1.0;   ///< transmit power
  double lambda = 0.01; ///< node density (simulator only)

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;

  /// Probability that an eligible node starts a message in a slot.
  double start_probability() const;
};

/// Autocorrelation sampled at integer lags 0..max_lag().
struct CorrelationCurve {
  std::vector<double> values;

  std::size_t max_lag() const { return values.empty() ? 0 : values.size() - 1; }
  /// Even extension: at(-k) == at(k).
  double at(long lag) const;
};

struct SpatialConfig {
  enum class Mode { Static, MonteCarlo };
  Mode mode = Mode::Static;
  double epsilon = 0.1;        ///< inner radius of the integration annulus
  double outer_radius = 100.0; ///< outer radius of the integration annulus
  std::size_t samples = 200000;
  std::uint64_t seed = 0x5eed5eedULL;
};

double jakes_channel_autocorr(double tau, double nu);

/// E[h^2(t) h^2(t+tau)] for unit-power Rayleigh fading with Jakes Doppler.
double channel_product_moment(double tau, double nu);

/// E[gamma(t) gamma(t+tau)] for the slotted fixed-length message model.
double traffic_product_moment(long tau, double mu, int ell);

/// Ratio of the displaced to the undisplaced path-gain overlap integral.
double spatial_mobility_factor(long tau, double nu, double alpha, const SpatialConfig& config);

/// Pearson autocorrelation of aggregate interference for lags 0..max_lag.
CorrelationCurve interference_autocorr(const SystemParams& params, std::size_t max_lag,
                                       const SpatialConfig& spatial = {});

/// J0^2 curve: interference correlation when the channel is the only source.
CorrelationCurve channel_only_autocorr(double nu, std::size_t max_lag);

/// First zero lag of the Jakes autocorrelation.
double eta_from_speed(double nu);

/// Inverse of eta_from_speed.
double speed_from_eta(double eta);

}  // namespace ipred
