#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "ipred/arma.hpp"
#include "ipred/linalg.hpp"

namespace ipred {

/// x(t+1) = A x(t) + B eps(t), i(t) = C x(t).
struct StateSpaceModel {
  Matrix A;
  Vector B;
  Eigen::RowVectorXd C;

  int dim() const { return static_cast<int>(A.rows()); }
};

/// Companion realization. The state dimension is max(p, q+1) so that every
/// MA coefficient has a slot in C; models with p = 0 get dimension >= 1.
StateSpaceModel to_state_space(const ArmaModel& model);

/// Impulse response C A^k B for k = 0..count-1.
std::vector<double> impulse_response(const StateSpaceModel& ss, std::size_t count);

/// Impulse response of b(L)/a(L) by direct recursion of the difference equation.
std::vector<double> arma_impulse_response(const ArmaModel& model, std::size_t count);

struct GainResult {
  Vector K;        ///< combined one-step gain
  Matrix P;        ///< converged prior error covariance
  int iterations = 0;
  double last_delta = 0.0;
  bool converged = false;
};

/// Iterates the measurement/time update pair from P = B B^T with unit
/// measurement noise until the covariance settles.
GainResult steady_state_gain(const StateSpaceModel& ss, double tol = 1e-10, int max_iter = 10000);

/// Running mean/variance used to standardize raw interference power.
struct Standardizer {
  static constexpr double kHalfLife = 200.0;
  static constexpr long kSeedCount = 50;

  double mean = 0.0;
  double var = 0.0;
  long count = 0;

  void add(double x);
  double stddev() const;
};

/// Steady-state Kalman predictor running on standardized observations.
class SteadyStatePredictor {
 public:
  SteadyStatePredictor(StateSpaceModel ss, Vector gain);

  /// Consumes i(t). Throws std::invalid_argument (state unchanged) if the
  /// observation is not finite.
  void update(double observation);

  /// De-standardized C A^(delta-1) x(t+1), clamped at zero.
  double predict(int delta) const;

  /// out[k] = predict(k + 1) for k = 0..out.size()-1.
  void predict_horizons(std::span<double> out) const;

  const StateSpaceModel& model() const { return ss_; }
  const Vector& gain() const { return gain_; }
  const Vector& state() const { return x_; }
  const Standardizer& standardizer() const { return stats_; }
  long observations() const { return stats_.count; }

  /// Flat text bundle: dimension, A, B, C, K and standardization constants.
  void save(std::ostream& os) const;
  static SteadyStatePredictor load(std::istream& is);

 private:
  StateSpaceModel ss_;
  Vector gain_;
  Vector x_;
  Standardizer stats_;
  mutable Vector scratch_;
};

/// Builds the offline part: state space plus converged gain.
/// Throws std::runtime_error if the gain does not converge.
SteadyStatePredictor make_predictor(const ArmaModel& model);

}  // namespace ipred
