#include "ipred/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "ipred/bessel.hpp"

namespace ipred {

void SystemParams::validate() const {
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  if (ell < 1) throw std::invalid_argument("ell must be >= 1");
  if (mu * ell > 1.0 + 1e-12) throw std::invalid_argument("mu*ell must not exceed 1");
  if (!(mu * (ell - 1) < 1.0)) throw std::invalid_argument("mu*(ell-1) must be below 1");
  if (!(nu >= 0.0)) throw std::invalid_argument("nu must be non-negative");
  if (!(alpha > 2.0)) throw std::invalid_argument("alpha must exceed 2");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
}

double SystemParams::start_probability() const {
  return std::min(1.0, mu / (1.0 - mu * (ell - 1)));
}

double CorrelationCurve::at(long lag) const {
  const auto k = static_cast<std::size_t>(lag < 0 ? -lag : lag);
  if (k >= values.size()) throw std::out_of_range("CorrelationCurve lag " + std::to_string(lag));
  return values[k];
}

double jakes_channel_autocorr(double tau, double nu) {
  if (tau < 0.0) throw std::invalid_argument("tau must be non-negative");
  return bessel_j0(2.0 * std::numbers::pi * tau * nu);
}

double channel_product_moment(double tau, double nu) {
  const double j = jakes_channel_autocorr(tau, nu);
  return j * j + 1.0;
}

namespace {

// beta^e (1-beta)^k C(n,k), safe for beta in {0,1}.
double renewal_term(long n, long k, long e, double log_beta, double log_one_minus_beta) {
  if (e > 0 && std::isinf(log_beta)) return 0.0;
  if (k > 0 && std::isinf(log_one_minus_beta)) return 0.0;
  double log_term = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  if (e > 0) log_term += static_cast<double>(e) * log_beta;
  if (k > 0) log_term += static_cast<double>(k) * log_one_minus_beta;
  return std::exp(log_term);
}

}  // namespace

double traffic_product_moment(long tau, double mu, int ell) {
  if (tau < 0) throw std::invalid_argument("tau must be non-negative");
  if (ell < 1) throw std::invalid_argument("ell must be >= 1");
  const double eligible = 1.0 - mu * (ell - 1);
  if (!(mu > 0.0) || !(eligible > 0.0))
    throw std::invalid_argument("traffic moment requires mu > 0 and mu*(ell-1) < 1");

  const double start = std::min(1.0, mu / eligible);
  const double beta = 1.0 - start;
  const double log_beta = std::log(beta);
  const double log_one_minus_beta = std::log1p(-beta);

  double sum = 0.0;
  const long i_max = std::min(tau - 1, static_cast<long>(ell) - 1);
  for (long i = 0; i <= i_max; ++i) {
    const long j_max = std::min(tau - i, static_cast<long>(ell));
    for (long j = 1; j <= j_max; ++j) {
      const long g = tau - i - j;
      for (long k = 0; k <= g / ell; ++k) {
        const long e = g - k * ell;
        sum += renewal_term(e + k, k, e, log_beta, log_one_minus_beta);
      }
    }
  }
  const double overlap = std::max(0.0, mu * static_cast<double>(ell - tau));
  return overlap + mu * mu / eligible * sum;
}

double spatial_mobility_factor(long tau, double nu, double alpha, const SpatialConfig& config) {
  if (tau < 0) throw std::invalid_argument("tau must be non-negative");
  if (config.mode == SpatialConfig::Mode::Static) return 1.0;
  if (!(config.epsilon > 0.0)) throw std::invalid_argument("spatial epsilon must be positive");
  if (!(config.outer_radius > config.epsilon))
    throw std::invalid_argument("spatial outer radius must exceed epsilon");
  if (tau == 0 || nu == 0.0) return 1.0;

  // Importance sampling: draw x with density proportional to g(x)^2 on the
  // annulus, then the ratio equals E[g(x + d) / g(x)] with both factors
  // truncated to the same annulus.
  const double eps = config.epsilon;
  const double outer = config.outer_radius;
  const double s = 2.0 - 2.0 * alpha;  // radial density ~ r^(1-2 alpha) = r^(s-1)
  const double lo = std::pow(eps, s);
  const double hi = std::pow(outer, s);
  const double sigma = std::sqrt(static_cast<double>(tau)) * nu * std::sqrt(2.0 / std::numbers::pi);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> step(0.0, sigma);

  double acc = 0.0;
  for (std::size_t n = 0; n < config.samples; ++n) {
    const double r = std::pow(lo + unit(rng) * (hi - lo), 1.0 / s);
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    const double dx = step(rng);
    const double dy = step(rng);
    const double moved = std::hypot(r * std::cos(phi) + dx, r * std::sin(phi) + dy);
    if (moved < eps || moved > outer) continue;
    acc += std::pow(r / moved, alpha);
  }
  return std::min(1.0, acc / static_cast<double>(config.samples));
}

CorrelationCurve interference_autocorr(const SystemParams& params, std::size_t max_lag,
                                       const SpatialConfig& spatial) {
  params.validate();
  if (max_lag < 1) throw std::invalid_argument("max_lag must be >= 1");
  const double busy = params.mu * params.ell;
  CorrelationCurve curve;
  curve.values.resize(max_lag + 1);
  curve.values[0] = 1.0;
  for (std::size_t tau = 1; tau <= max_lag; ++tau) {
    const auto lag = static_cast<long>(tau);
    const double channel = channel_product_moment(static_cast<double>(tau), params.nu);
    const double traffic = traffic_product_moment(lag, params.mu, params.ell);
    const double spatial_factor = spatial_mobility_factor(lag, params.nu, params.alpha, spatial);
    curve.values[tau] = channel * traffic * spatial_factor / (2.0 * busy);
  }
  return curve;
}

CorrelationCurve channel_only_autocorr(double nu, std::size_t max_lag) {
  if (max_lag < 1) throw std::invalid_argument("max_lag must be >= 1");
  CorrelationCurve curve;
  curve.values.resize(max_lag + 1);
  curve.values[0] = 1.0;
  for (std::size_t tau = 1; tau <= max_lag; ++tau) {
    const double j = jakes_channel_autocorr(static_cast<double>(tau), nu);
    curve.values[tau] = j * j;
  }
  return curve;
}

double eta_from_speed(double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("eta_from_speed: speed must be positive");
  return kBesselJ0FirstZero / (2.0 * std::numbers::pi * nu);
}

double speed_from_eta(double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("speed_from_eta: eta must be positive");
  return kBesselJ0FirstZero / (2.0 * std::numbers::pi * eta);
}

}  // namespace ipred
