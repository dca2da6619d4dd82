#include "ipred/arma.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ipred/linalg.hpp"

namespace ipred {

const char* to_string(FitStatus status) {
  switch (status) {
    case FitStatus::Ok: return "ok";
    case FitStatus::IllConditioned: return "ill-conditioned";
    case FitStatus::Indefinite: return "indefinite";
    case FitStatus::NotConverged: return "not-converged";
    case FitStatus::Unstable: return "unstable";
    case FitStatus::Divergent: return "divergent";
    case FitStatus::Unpaired: return "unpaired";
  }
  return "unknown";
}

YuleWalkerResult solve_yule_walker(const CorrelationCurve& rho, int p, int q) {
  if (p < 0 || q < 0) throw std::invalid_argument("solve_yule_walker: negative order");
  if (rho.max_lag() < static_cast<std::size_t>(p + q))
    throw std::invalid_argument("solve_yule_walker: correlation too short");
  YuleWalkerResult out;
  out.a.assign(static_cast<std::size_t>(p) + 1, 0.0);
  out.a[0] = 1.0;
  if (p == 0) return out;

  Matrix m(p, p);
  Vector rhs(p);
  for (int r = 0; r < p; ++r) {
    for (int c = 0; c < p; ++c) m(r, c) = rho.at(q + r - c);
    rhs(r) = -rho.at(q + r + 1);
  }
  out.condition = condition_number(m);
  if (!(out.condition < kConditionLimit)) {
    out.status = FitStatus::IllConditioned;
    return out;
  }
  const Vector x = m.partialPivLu().solve(rhs);
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  if (!x.allFinite() || (m * x - rhs).cwiseAbs().maxCoeff() > 1e-9 * scale * std::max(1.0, x.cwiseAbs().maxCoeff())) {
    out.status = FitStatus::IllConditioned;
    return out;
  }
  for (int n = 0; n < p; ++n) out.a[static_cast<std::size_t>(n) + 1] = x(n);
  return out;
}

std::vector<double> compute_psi(const CorrelationCurve& rho, std::span<const double> a, int q) {
  const int p = static_cast<int>(a.size()) - 1;
  std::vector<double> psi(static_cast<std::size_t>(q) + 1, 0.0);
  for (int tau = 0; tau <= q; ++tau) {
    double s = 0.0;
    for (int m = 0; m <= p; ++m)
      for (int n = 0; n <= p; ++n) s += a[m] * a[n] * rho.at(tau + n - m);
    psi[static_cast<std::size_t>(tau)] = s;
  }
  return psi;
}

namespace {

std::vector<double> ma_autocovariance(const std::vector<double>& c) {
  const std::size_t n = c.size();
  std::vector<double> g(n, 0.0);
  for (std::size_t tau = 0; tau < n; ++tau)
    for (std::size_t k = 0; k + tau < n; ++k) g[tau] += c[k] * c[k + tau];
  return g;
}

double max_residual(std::span<const double> psi, const std::vector<double>& c) {
  const auto g = ma_autocovariance(c);
  double r = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) r = std::max(r, std::abs(psi[i] - g[i]));
  return r;
}

bool spectrum_nonnegative(std::span<const double> psi) {
  constexpr int kGrid = 4096;
  for (int k = 0; k <= kGrid; ++k) {
    const double w = std::numbers::pi * k / kGrid;
    double f = psi[0];
    for (std::size_t t = 1; t < psi.size(); ++t) f += 2.0 * psi[t] * std::cos(w * static_cast<double>(t));
    if (f < -1e-10 * psi[0]) return false;
  }
  return true;
}

}  // namespace

WilsonResult solve_ma_wilson(std::span<const double> psi, int q, double tol, int max_iter) {
  if (q < 0 || psi.size() < static_cast<std::size_t>(q) + 1)
    throw std::invalid_argument("solve_ma_wilson: psi shorter than q+1");
  WilsonResult out;
  psi = psi.first(static_cast<std::size_t>(q) + 1);
  if (!(psi[0] > 0.0) || !spectrum_nonnegative(psi)) {
    out.status = FitStatus::Indefinite;
    return out;
  }
  if (q == 0) {
    out.b = {1.0};
    out.sigma_eps2 = psi[0];
    return out;
  }

  const auto n = static_cast<std::size_t>(q) + 1;
  // Newton iteration on c = sigma * b with b_0 left free, started from the
  // unit-variance white model.
  std::vector<double> c(n, 0.0);
  c[0] = 1.0;
  const double scale = std::max(1.0, psi[0]);
  double residual = max_residual(psi, c);
  int iter = 0;
  for (; iter < max_iter && residual > tol * scale; ++iter) {
    Matrix jac = Matrix::Zero(q + 1, q + 1);
    Vector f(q + 1);
    const auto g = ma_autocovariance(c);
    for (int tau = 0; tau <= q; ++tau) {
      f(tau) = psi[tau] - g[tau];
      for (int j = 0; j <= q; ++j) {
        if (j + tau <= q) jac(tau, j) += c[j + tau];
        if (j - tau >= 0) jac(tau, j) += c[j - tau];
      }
    }
    const Vector step = jac.partialPivLu().solve(f);
    if (!step.allFinite()) break;
    double t = 1.0;
    std::vector<double> trial(n);
    double trial_residual = residual;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = c[k] + t * step(static_cast<Eigen::Index>(k));
      trial_residual = max_residual(psi, trial);
      if (trial_residual < residual) break;
    }
    if (!(trial_residual < residual)) break;
    c = trial;
    residual = trial_residual;
  }
  out.iterations = iter;
  out.residual = residual;
  if (!(residual <= tol * scale) || c[0] == 0.0) {
    out.status = FitStatus::NotConverged;
    return out;
  }
  out.sigma_eps2 = c[0] * c[0];
  out.b.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.b[k] = c[k] / c[0];
  return out;
}

bool is_stationary(const ArmaModel& model, double margin) {
  for (const auto& r : polynomial_roots(model.a))
    if (!(std::abs(r) > 1.0 + std::max(margin, 1e-10))) return false;
  return true;
}

CorrelationCurve model_autocorr(const ArmaModel& model, std::size_t max_lag) {
  if (!is_stationary(model, 0.0)) throw std::domain_error("model_autocorr: non-stationary model");
  const int p = model.p();
  const int q = model.q();
  const auto& a = model.a;
  const auto& b = model.b;
  const double a0 = a[0];

  // delta(k) = E[i(t) eps(t-k)]
  std::vector<double> delta(static_cast<std::size_t>(q) + 1, 0.0);
  for (int k = 0; k <= q; ++k) {
    double s = model.sigma_eps2 * b[k];
    for (int n = 1; n <= std::min(k, p); ++n) s -= a[n] * delta[k - n];
    delta[k] = s / a0;
  }
  auto rhs = [&](int tau) {
    double s = 0.0;
    for (int n = tau; n <= q; ++n) s += b[n] * delta[n - tau];
    return s;
  };

  const std::size_t len = std::max<std::size_t>(max_lag, static_cast<std::size_t>(p)) + 1;
  std::vector<double> gamma(len, 0.0);
  if (p == 0) {
    for (std::size_t tau = 0; tau < len; ++tau)
      gamma[tau] = tau <= static_cast<std::size_t>(q) ? rhs(static_cast<int>(tau)) / a0 : 0.0;
  } else {
    Matrix m = Matrix::Zero(p + 1, p + 1);
    Vector r(p + 1);
    for (int tau = 0; tau <= p; ++tau) {
      for (int n = 0; n <= p; ++n) m(tau, std::abs(tau - n)) += a[n];
      r(tau) = rhs(tau);
    }
    const Vector g0 = m.fullPivLu().solve(r);
    for (int tau = 0; tau <= p; ++tau) gamma[tau] = g0(tau);
    for (std::size_t tau = static_cast<std::size_t>(p) + 1; tau < len; ++tau) {
      double s = tau <= static_cast<std::size_t>(q) ? rhs(static_cast<int>(tau)) : 0.0;
      for (int n = 1; n <= p; ++n) s -= a[n] * gamma[tau - n];
      gamma[tau] = s / a0;
    }
  }
  if (!(gamma[0] > 0.0) || !std::isfinite(gamma[0]))
    throw std::domain_error("model_autocorr: degenerate variance");
  CorrelationCurve out;
  out.values.resize(max_lag + 1);
  for (std::size_t tau = 0; tau <= max_lag; ++tau) out.values[tau] = gamma[tau] / gamma[0];
  out.values[0] = 1.0;
  return out;
}

double approximation_mse(const CorrelationCurve& rho, const CorrelationCurve& rho_hat,
                         std::size_t T) {
  if (T < 1 || rho.max_lag() < T || rho_hat.max_lag() < T)
    throw std::invalid_argument("approximation_mse: curves shorter than T");
  double s = 0.0;
  for (std::size_t tau = 1; tau <= T; ++tau) {
    const double d = rho.values[tau] - rho_hat.values[tau];
    s += d * d;
  }
  s /= static_cast<double>(T);
  if (!(s > 0.0)) return kMseFloorDb;
  return std::max(kMseFloorDb, 10.0 * std::log10(s));
}

FitAttempt fit_arma(const CorrelationCurve& rho, int p, int q, const FitOptions& options) {
  FitAttempt out;
  const auto yw = solve_yule_walker(rho, p, q);
  if (yw.status != FitStatus::Ok) {
    out.status = yw.status;
    return out;
  }
  const auto psi = compute_psi(rho, yw.a, q);
  const auto ma = solve_ma_wilson(psi, q);
  if (ma.status != FitStatus::Ok) {
    out.status = ma.status;
    return out;
  }
  out.model.a = yw.a;
  out.model.b = ma.b;
  out.model.sigma_eps2 = ma.sigma_eps2;
  if (!is_stationary(out.model)) {
    out.status = FitStatus::Unstable;
    return out;
  }
  const std::size_t T = options.T;
  CorrelationCurve rho_hat;
  try {
    rho_hat = model_autocorr(out.model, 2 * T);
  } catch (const std::domain_error&) {
    out.status = FitStatus::Unstable;
    return out;
  }
  out.mse_db = approximation_mse(rho, rho_hat, T);

  const double reference = rho.values.at(T);
  for (std::size_t tau = 0; tau <= 2 * T; ++tau) {
    const double v = rho_hat.values[tau];
    const bool tail = tau >= T && std::abs(v - reference) > options.tail_tolerance;
    if (!std::isfinite(v) || std::abs(v) > 1.0 + 1e-9 || tail) {
      out.status = FitStatus::Divergent;
      return out;
    }
  }
  return out;
}

namespace {

FitReport make_report(const FitOptions& options) {
  if (options.p_max < 1) throw std::invalid_argument("select_order: p_max must be >= 1");
  FitReport report;
  report.p_max = options.p_max;
  report.target_db = options.target_db;
  report.T = options.T;
  report.mse_db.resize(static_cast<std::size_t>(options.p_max) + 1);
  report.status.resize(static_cast<std::size_t>(options.p_max) + 1);
  for (int p = 1; p <= options.p_max; ++p) {
    report.mse_db[p].assign(static_cast<std::size_t>(p) + 1, std::numeric_limits<double>::quiet_NaN());
    report.status[p].assign(static_cast<std::size_t>(p) + 1, FitStatus::Ok);
  }
  return report;
}

void check_length(const CorrelationCurve& rho, const FitOptions& options) {
  const std::size_t need = std::max<std::size_t>(2 * static_cast<std::size_t>(options.p_max), 2 * options.T);
  if (rho.max_lag() < need)
    throw std::invalid_argument("select_order: correlation must cover lags 0.." + std::to_string(need));
}

OrderSelection choose(FitReport report, std::vector<std::vector<FitAttempt>>& attempts) {
  int best_p = 0, best_q = 0;
  double best_mse = std::numeric_limits<double>::infinity();
  bool met = false;
  for (int p = 1; p <= report.p_max && !met; ++p) {
    for (int q = 0; q <= p; ++q) {
      const auto& at = attempts[p][q];
      report.status[p][q] = at.status;
      if (at.status != FitStatus::Ok) continue;
      report.mse_db[p][q] = at.mse_db;
      if (at.mse_db <= report.target_db) {
        best_p = p;
        best_q = q;
        best_mse = at.mse_db;
        met = true;
        break;
      }
    }
  }
  // Fill in the rest of the grid for reporting.
  int fallback_p = 0, fallback_q = 0;
  double fallback_mse = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= report.p_max; ++p) {
    for (int q = 0; q <= p; ++q) {
      const auto& at = attempts[p][q];
      report.status[p][q] = at.status;
      if (at.status != FitStatus::Ok) continue;
      report.mse_db[p][q] = at.mse_db;
      if (at.mse_db < fallback_mse) {
        fallback_mse = at.mse_db;
        fallback_p = p;
        fallback_q = q;
      }
    }
  }
  if (!met) {
    if (fallback_p == 0) throw std::runtime_error("select_order: no feasible (p,q) pair");
    best_p = fallback_p;
    best_q = fallback_q;
    best_mse = fallback_mse;
  }
  report.selected_p = best_p;
  report.selected_q = best_q;
  report.selected_mse_db = best_mse;
  report.target_met = met;
  OrderSelection out{std::move(report), attempts[best_p][best_q].model};
  return out;
}

}  // namespace

OrderSelection select_order_serial(const CorrelationCurve& rho, const FitOptions& options) {
  check_length(rho, options);
  FitReport report = make_report(options);
  std::vector<std::vector<FitAttempt>> attempts(static_cast<std::size_t>(options.p_max) + 1);
  for (int p = 1; p <= options.p_max; ++p) {
    attempts[p].resize(static_cast<std::size_t>(p) + 1);
    for (int q = 0; q <= p; ++q) attempts[p][q] = fit_arma(rho, p, q, options);
  }
  return choose(std::move(report), attempts);
}

OrderSelection select_order(const CorrelationCurve& rho, const FitOptions& options) {
  check_length(rho, options);
  FitReport report = make_report(options);
  std::vector<std::vector<FitAttempt>> attempts(static_cast<std::size_t>(options.p_max) + 1);
  std::vector<std::pair<int, int>> pairs;
  for (int p = 1; p <= options.p_max; ++p) {
    attempts[p].resize(static_cast<std::size_t>(p) + 1);
    for (int q = 0; q <= p; ++q) pairs.emplace_back(p, q);
  }
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [p, q] = pairs[k];
    attempts[p][q] = fit_arma(rho, p, q, options);
  }
  return choose(std::move(report), attempts);
}

CorrelationCurve decimate_correlation(const CorrelationCurve& rho, int d) {
  if (d < 1) throw std::invalid_argument("decimate_correlation: factor must be >= 1");
  const std::size_t T = rho.max_lag() / static_cast<std::size_t>(d);
  if (T < 1) throw std::invalid_argument("decimate_correlation: correlation too short for factor");
  CorrelationCurve out;
  out.values.resize(T + 1);
  for (std::size_t tau = 0; tau <= T; ++tau) out.values[tau] = rho.values[tau * static_cast<std::size_t>(d)];
  return out;
}

namespace {

constexpr double kRescaleTolerance = 0.05;
constexpr std::size_t kRescaleCheckLags = 100;

bool map_roots(std::span<const double> coeffs, int d, std::vector<double>& out) {
  auto roots = polynomial_roots(coeffs);
  for (auto& r : roots) {
    const double mag = std::pow(std::abs(r), 1.0 / d);
    r = std::polar(mag, std::arg(r) / d);
  }
  if (!polynomial_from_roots(roots, out)) return false;
  out.resize(coeffs.size(), 0.0);
  return true;
}

// Unit output variance, matching a fit on a normalized curve.
void normalize_variance(ArmaModel& m) {
  m.sigma_eps2 = 1.0;
  const int p = m.p();
  const int q = m.q();
  std::vector<double> h(16384, 0.0);
  double energy = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    double s = k <= static_cast<std::size_t>(q) ? m.b[k] : 0.0;
    for (int n = 1; n <= p && static_cast<std::size_t>(n) <= k; ++n) s -= m.a[n] * h[k - n];
    h[k] = s;
    energy += s * s;
  }
  m.sigma_eps2 = 1.0 / energy;
}

// Largest gap between the fine model at lags kd and the coarse model at lags k.
double sampled_mismatch(const ArmaModel& coarse, const ArmaModel& fine, int d) {
  try {
    const auto c = model_autocorr(coarse, kRescaleCheckLags);
    const auto f = model_autocorr(fine, kRescaleCheckLags * static_cast<std::size_t>(d));
    double e = 0.0;
    for (std::size_t k = 0; k <= kRescaleCheckLags; ++k)
      e = std::max(e, std::abs(f.values[k * static_cast<std::size_t>(d)] - c.values[k]));
    return e;
  } catch (const std::domain_error&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

RescaleResult rescale_model(const ArmaModel& model, int d) {
  if (d < 1) throw std::invalid_argument("rescale_model: factor must be >= 1");
  RescaleResult out;
  out.model = model;
  if (d == 1) return out;
  if (!is_stationary(model, 0.0)) throw std::domain_error("rescale_model: non-stationary model");

  ArmaModel mapped = model;
  const bool paired = map_roots(model.a, d, mapped.a) && map_roots(model.b, d, mapped.b);
  if (paired && is_stationary(mapped, 0.0)) {
    normalize_variance(mapped);
    if (sampled_mismatch(model, mapped, d) <= kRescaleTolerance) {
      out.model = mapped;
      return out;
    }
  }
  out.status = paired ? FitStatus::Divergent : FitStatus::Unpaired;
  return out;
}

std::string fit_grid_csv(const FitReport& report) {
  std::ostringstream os;
  os << "p";
  for (int q = 0; q <= report.p_max; ++q) os << ",q" << q;
  os << "\n";
  os.precision(10);
  for (int p = 1; p <= report.p_max; ++p) {
    os << p;
    for (int q = 0; q <= report.p_max; ++q) {
      os << ",";
      if (q <= p && std::isfinite(report.mse_db[p][q])) os << report.mse_db[p][q];
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace ipred
