#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ipred/correlation.hpp"

namespace ipred {

/// sum_{n=0}^p a_n i(t-n) = sum_{n=0}^q b_n eps(t-n), a_0 = b_0 = 1.
struct ArmaModel {
  std::vector<double> a{1.0};
  std::vector<double> b{1.0};
  double sigma_eps2 = 1.0;

  int p() const { return static_cast<int>(a.size()) - 1; }
  int q() const { return static_cast<int>(b.size()) - 1; }
};

enum class FitStatus {
  Ok,
  IllConditioned,  ///< Yule-Walker system singular or badly conditioned
  Indefinite,      ///< psi is not a valid MA autocovariance
  NotConverged,    ///< Wilson iteration did not converge
  Unstable,        ///< AR polynomial has a root on or inside the unit circle
  Divergent,       ///< implied autocorrelation departs from the target tail
  Unpaired,        ///< root mapping broke conjugate symmetry
};

const char* to_string(FitStatus status);

inline constexpr double kMseFloorDb = -150.0;
inline constexpr double kConditionLimit = 1e12;

struct YuleWalkerResult {
  FitStatus status = FitStatus::Ok;
  std::vector<double> a;  ///< a_0..a_p with a_0 = 1
  double condition = 1.0;
};

/// AR part from the lags q+1..q+p equations.
YuleWalkerResult solve_yule_walker(const CorrelationCurve& rho, int p, int q);

/// psi(tau) = sum_m sum_n a_m a_n rho(tau + n - m), tau = 0..q.
std::vector<double> compute_psi(const CorrelationCurve& rho, std::span<const double> a, int q);

struct WilsonResult {
  FitStatus status = FitStatus::Ok;
  std::vector<double> b;  ///< b_0..b_q with b_0 = 1
  double sigma_eps2 = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// Factors psi into sigma^2 * sum_n b_n b_{n+tau} with the invertible b.
WilsonResult solve_ma_wilson(std::span<const double> psi, int q, double tol = 1e-10,
                             int max_iter = 200);

/// All AR roots at modulus >= 1 + margin.
bool is_stationary(const ArmaModel& model, double margin = 1e-6);

/// Normalized autocorrelation implied by the model, lags 0..max_lag.
/// Throws std::domain_error for a non-stationary model.
CorrelationCurve model_autocorr(const ArmaModel& model, std::size_t max_lag);

/// 10 log10 of the mean squared difference over lags 1..T, floored.
double approximation_mse(const CorrelationCurve& rho, const CorrelationCurve& rho_hat,
                         std::size_t T);

struct FitAttempt {
  FitStatus status = FitStatus::Ok;
  ArmaModel model;
  double mse_db = 0.0;
};

struct FitOptions {
  int p_max = 20;
  double target_db = -30.0;
  std::size_t T = 100;
  /// Largest |rho_hat(tau) - rho(T)| allowed over tau in [T, 2T].
  double tail_tolerance = 0.1;
};

/// Fits one (p,q) pair and classifies it.
FitAttempt fit_arma(const CorrelationCurve& rho, int p, int q, const FitOptions& options = {});

struct FitReport {
  int p_max = 0;
  double target_db = 0.0;
  std::size_t T = 0;
  /// mse_db[p][q] for 1 <= p <= p_max, 0 <= q <= p; NaN if infeasible.
  std::vector<std::vector<double>> mse_db;
  std::vector<std::vector<FitStatus>> status;
  int selected_p = 0;
  int selected_q = 0;
  double selected_mse_db = 0.0;
  bool target_met = false;  ///< false: fallback to the feasible minimum-MSE pair
};

struct OrderSelection {
  FitReport report;
  ArmaModel model;
};

/// Grid search over 1 <= p <= p_max, 0 <= q <= p; lowest p meeting the
/// target, ties broken by lowest q. Throws if no pair is feasible.
OrderSelection select_order(const CorrelationCurve& rho, const FitOptions& options = {});
/// Single-threaded reference of select_order.
OrderSelection select_order_serial(const CorrelationCurve& rho, const FitOptions& options = {});

/// rho_d(tau) = rho(d tau) for every tau with d tau within range.
CorrelationCurve decimate_correlation(const CorrelationCurve& rho, int d);

struct RescaleResult {
  FitStatus status = FitStatus::Ok;
  ArmaModel model;
};

/// Maps a model fitted at d-fold decimation back to the original time base
/// by taking d-th roots of its polynomial roots. Reports Divergent when the
/// result misses the coarse correlation at lags kd by more than 0.05.
RescaleResult rescale_model(const ArmaModel& model, int d);

/// Writes the MSE grid as CSV: header "p,q0,q1,...", one row per p.
std::string fit_grid_csv(const FitReport& report);

}  // namespace ipred
