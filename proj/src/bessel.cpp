#include "ipred/bessel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ipred {
namespace {

// Below this the power series is used. The asymptotic expansion's smallest
// term is about exp(-2x), so it only reaches 1e-10 well past x = 8.
constexpr double kSeriesLimit = 12.0;

double j0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}

double j0_asymptotic(double x) {
  // Hankel expansion: J0 = sqrt(2/(pi x)) (P cos(chi) - Q sin(chi)).
  const double z = 8.0 * x;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double last = 1.0;
  for (int m = 1; m < 60; ++m) {
    const double odd = 2.0 * m - 1.0;
    term *= odd * odd / (m * z);
    if (std::abs(term) > last) break;  // series started diverging
    last = std::abs(term);
    // P = 1 - t2 + t4 - ..., Q = -t1 + t3 - ...
    const double sign = ((m + 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    if (m % 2 == 1) {
      q += sign * term;
    } else {
      p += sign * term;
    }
    if (last < 1e-17) break;
  }
  const double chi = x - 0.25 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j0(double x) {
  if (!std::isfinite(x)) throw std::domain_error("bessel_j0: non-finite argument");
  x = std::abs(x);
  return x < kSeriesLimit ? j0_series(x) : j0_asymptotic(x);
}

}  // namespace ipred
