#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ipred/correlation.hpp"

namespace ipred {

using Rng = std::mt19937_64;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class LengthMode { Fixed, Poisson };
enum class PlacementMode { Ppp, Thinned };

struct ScenarioConfig {
  SystemParams params;
  double area_side = 100.0;  ///< side of the origin-centred square
  std::size_t horizon = 1000;
  LengthMode length_mode = LengthMode::Fixed;
  PlacementMode placement_mode = PlacementMode::Ppp;
  double thin_radius = 40.0;
  int thin_k = 0;
  bool mobility = true;
  int fading_sinusoids = 32;
  std::uint64_t seed = 1;
  std::size_t realizations = 1000;

  void validate() const;
  /// Traffic warm-up before the first recorded slot.
  long warmup_slots() const { return 5L * params.ell; }
};

/// Sum-of-sinusoids Rayleigh fading generator (Clarke/Jakes).
struct FadingState {
  std::vector<double> doppler;  ///< angular frequency per slot of each component
  std::vector<double> phase;
  std::vector<std::complex<double>> phasor;  ///< cached components at phasor_slot
  std::vector<std::complex<double>> rotation;  ///< one-slot advance of each component
  long phasor_slot = -1;
};

struct NodeState {
  Vec2 position;
  long position_slot = 0;   ///< slot at which position was last brought up to date
  FadingState fading;
  double fading_power = 1.0;  ///< h^2 at the most recent fading step
  int remaining = 0;          ///< slots left in the current message, 0 = idle
  int message_length = 0;
};

struct InterferenceTrace {
  std::vector<double> values;
  std::uint64_t seed = 0;
};

/// Deterministic 64-bit mix used to derive independent seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

std::vector<Vec2> sample_ppp(double lambda, double area_side, Rng& rng);

/// Indices of the nodes having at least k neighbours within distance r.
std::vector<std::size_t> thin_keep_indices(std::span<const Vec2> nodes, double r, int k);
/// O(n^2) reference for thin_keep_indices.
std::vector<std::size_t> thin_keep_indices_bruteforce(std::span<const Vec2> nodes, double r, int k);
std::vector<Vec2> thin_inhomogeneous(std::span<const Vec2> nodes, double r, int k);

/// Brownian step over `slots` slots: isotropic Gaussian with per-axis
/// variance slots * nu^2 * 2/pi, so the mean one-slot step length is nu.
void step_mobility(NodeState& node, double nu, Rng& rng, long slots = 1);

void init_fading(FadingState& fading, double nu, int sinusoids, Rng& rng);
/// Moves the generator to `slot` and returns h^2 there; also stored in node.fading_power.
double step_fading(NodeState& node, long slot);

/// One slot of the message process; returns whether the node transmits.
bool step_traffic(NodeState& node, double mu, int ell, LengthMode mode, Rng& rng);

/// Samples a traffic state from the stationary distribution.
void init_traffic(NodeState& node, double mu, int ell, LengthMode mode, Rng& rng);

/// Aggregate power at the origin from transmitting nodes, using each node's
/// current position and fading_power.
double measure_interference(std::span<const NodeState> nodes, double kappa, double alpha);

InterferenceTrace run_realization(const ScenarioConfig& config, std::size_t index);

/// Serial reference and OpenMP-parallel batch generation; both return the
/// same traces for the same config.
std::vector<InterferenceTrace> simulate_serial(const ScenarioConfig& config, std::size_t first,
                                               std::size_t count);
std::vector<InterferenceTrace> simulate_parallel(const ScenarioConfig& config, std::size_t first,
                                                 std::size_t count);

/// Pearson correlation pooled over realizations and slots (ensemble moments).
CorrelationCurve ensemble_autocorr(std::span<const InterferenceTrace> traces, std::size_t max_lag);
/// Mean over realizations of each trace's own time-averaged Pearson correlation.
CorrelationCurve time_averaged_autocorr(std::span<const InterferenceTrace> traces,
                                        std::size_t max_lag);

}  // namespace ipred
