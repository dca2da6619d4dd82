#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "ipred/arma.hpp"
#include "ipred/correlation.hpp"
#include "ipred/linalg.hpp"

using namespace ipred;

namespace {

// Random real polynomial with all roots at modulus in [lo, hi]; returns the
// coefficients of prod (1 - z / r), so the constant term is 1.
std::vector<double> random_polynomial(int degree, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mod(lo, hi);
  std::uniform_real_distribution<double> arg(0.2, 2.9);
  std::bernoulli_distribution pair(0.5);
  std::vector<std::complex<double>> roots;
  while (static_cast<int>(roots.size()) < degree) {
    const double m = mod(rng);
    if (degree - static_cast<int>(roots.size()) >= 2 && pair(rng)) {
      const auto r = std::polar(m, arg(rng));
      roots.push_back(r);
      roots.push_back(std::conj(r));
    } else {
      roots.emplace_back(pair(rng) ? m : -m, 0.0);
    }
  }
  std::vector<double> out;
  REQUIRE(polynomial_from_roots(roots, out));
  return out;
}

// Autocovariance of an ARMA model from a long truncated impulse response.
std::vector<double> autocov_oracle(const ArmaModel& m, int max_lag) {
  const int n = 4000;
  std::vector<double> h(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double s = k <= m.q() ? m.b[k] : 0.0;
    for (int j = 1; j <= m.p() && j <= k; ++j) s -= m.a[j] * h[k - j];
    h[k] = s;
  }
  std::vector<double> g(max_lag + 1, 0.0);
  for (int tau = 0; tau <= max_lag; ++tau)
    for (int k = 0; k + tau < n; ++k) g[tau] += m.sigma_eps2 * h[k] * h[k + tau];
  return g;
}

}  // namespace

TEST_CASE("Wilson factorization of q = 1 examples") {
  auto w = solve_ma_wilson(std::vector<double>{2.0, 0.0}, 1);
  REQUIRE(w.status == FitStatus::Ok);
  CHECK(std::abs(w.b[1]) < 1e-10);
  CHECK(w.sigma_eps2 == doctest::Approx(2.0));

  // psi = sigma^2 (1 + th^2), sigma^2 th; invertible root of th / (1 + th^2) = ratio
  for (double th : {0.5, 0.8, -0.3}) {
    const std::vector<double> psi{1.0 + th * th, th};
    w = solve_ma_wilson(psi, 1);
    REQUIRE(w.status == FitStatus::Ok);
    CHECK(w.b[1] == doctest::Approx(th).epsilon(1e-9));
    CHECK(w.sigma_eps2 == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("Wilson returns the invertible factor of a non-invertible input") {
  // 1 + 2L has its root inside the unit circle; the equivalent factor is 2(1 + 0.5L)
  const std::vector<double> psi{5.0, 2.0};
  const auto w = solve_ma_wilson(psi, 1);
  REQUIRE(w.status == FitStatus::Ok);
  CHECK(w.b[1] == doctest::Approx(0.5));
  CHECK(w.sigma_eps2 == doctest::Approx(4.0));
}

TEST_CASE("Wilson flags an indefinite sequence") {
  const std::vector<double> psi{1.0, 0.9};
  CHECK(solve_ma_wilson(psi, 1).status == FitStatus::Indefinite);
}

TEST_CASE("Wilson identity holds for random MA(q)") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int q = 1 + trial % 5;
    const auto b = random_polynomial(q, 1.3, 4.0, rng);
    std::vector<double> psi(q + 1, 0.0);
    for (int t = 0; t <= q; ++t)
      for (int n = 0; n + t <= q; ++n) psi[t] += 0.7 * b[n] * b[n + t];
    const auto w = solve_ma_wilson(psi, q);
    REQUIRE(w.status == FitStatus::Ok);
    for (int t = 0; t <= q; ++t) {
      double s = 0.0;
      for (int n = 0; n + t <= q; ++n) s += w.sigma_eps2 * w.b[n] * w.b[n + t];
      CHECK(std::abs(s - psi[t]) < 1e-9);
    }
  }
}

TEST_CASE("AR(1) implied correlation is geometric") {
  ArmaModel m;
  m.a = {1.0, -0.5};
  const auto rho = model_autocorr(m, 10);
  for (int t = 0; t <= 10; ++t) CHECK(std::abs(rho.values[t] - std::pow(0.5, t)) < 1e-12);
}

TEST_CASE("model correlation matches an impulse-response oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    ArmaModel m;
    const int p = 1 + trial % 5;
    const int q = trial % (p + 1);
    m.a = random_polynomial(p, 1.2, 3.0, rng);
    m.b = random_polynomial(q, 1.2, 3.0, rng);
    m.sigma_eps2 = 1.3;
    const auto g = autocov_oracle(m, 20);
    const auto rho = model_autocorr(m, 20);
    for (int t = 0; t <= 20; ++t) CHECK(std::abs(rho.values[t] - g[t] / g[0]) < 1e-9);
  }
}

TEST_CASE("psi identity for an exact model correlation") {
  ArmaModel m;
  m.a = {1.0, -1.1, 0.3};
  m.b = {1.0, 0.4};
  m.sigma_eps2 = 1.0;
  const auto g = autocov_oracle(m, 10);
  CorrelationCurve rho;
  for (double v : g) rho.values.push_back(v / g[0]);
  const auto psi = compute_psi(rho, m.a, 1);
  const double s2 = m.sigma_eps2 / g[0];
  CHECK(std::abs(psi[0] - s2 * (1.0 + 0.16)) < 1e-8);
  CHECK(std::abs(psi[1] - s2 * 0.4) < 1e-8);
}

TEST_CASE("round trip recovers random stationary ARMA(p <= 5) models") {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    ArmaModel m;
    const int p = 1 + trial % 5;
    const int q = (trial / 5) % (p + 1);
    m.a = random_polynomial(p, 1.25, 3.0, rng);
    m.b = random_polynomial(q, 1.25, 3.0, rng);
    m.sigma_eps2 = 1.0;
    const auto rho = model_autocorr(m, 2 * (p + q) + 10);
    const auto yw = solve_yule_walker(rho, p, q);
    REQUIRE(yw.status == FitStatus::Ok);
    const auto w = solve_ma_wilson(compute_psi(rho, yw.a, q), q);
    REQUIRE(w.status == FitStatus::Ok);
    for (int n = 0; n <= p; ++n) CHECK(std::abs(yw.a[n] - m.a[n]) < 1e-5);
    for (int n = 0; n <= q; ++n) CHECK(std::abs(w.b[n] - m.b[n]) < 1e-5);
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("Yule-Walker reports a singular system") {
  CorrelationCurve flat;
  flat.values.assign(30, 1.0);
  CHECK(solve_yule_walker(flat, 3, 0).status == FitStatus::IllConditioned);
}

TEST_CASE("stationarity and model errors") {
  ArmaModel m;
  m.a = {1.0, -1.0};
  CHECK_FALSE(is_stationary(m));
  CHECK_THROWS_AS(model_autocorr(m, 5), std::domain_error);
  m.a = {1.0, -0.99};
  CHECK(is_stationary(m));
}

TEST_CASE("approximation MSE floor") {
  CorrelationCurve a;
  a.values = {1.0, 0.5, 0.25};
  CHECK(approximation_mse(a, a, 2) == kMseFloorDb);
  CorrelationCurve b = a;
  b.values[1] = 0.6;
  b.values[2] = 0.35;
  CHECK(approximation_mse(a, b, 2) == doctest::Approx(-20.0));
}

TEST_CASE("order selection on the example setups meets the target") {
  const double nus[] = {0.0077, 0.0191, 0.0765};
  for (double nu : nus) {
    SystemParams p;
    p.nu = nu;
    const auto rho = interference_autocorr(p, 200);
    const auto sel = select_order(rho);
    INFO("nu = " << nu);
    CHECK(sel.report.target_met);
    CHECK(sel.report.selected_mse_db <= -30.0);
    CHECK(is_stationary(sel.model));
    // lowest p meeting the target, lowest q among those
    for (int pp = 1; pp < sel.report.selected_p; ++pp)
      for (int q = 0; q <= pp; ++q) CHECK_FALSE(sel.report.mse_db[pp][q] <= -30.0);
    for (int q = 0; q < sel.report.selected_q; ++q)
      CHECK_FALSE(sel.report.mse_db[sel.report.selected_p][q] <= -30.0);
  }
}

TEST_CASE("parallel and serial grid searches agree") {
  SystemParams p;
  p.nu = 0.0191;
  const auto rho = interference_autocorr(p, 200);
  FitOptions o;
  o.p_max = 12;
  const auto a = select_order(rho, o);
  const auto b = select_order_serial(rho, o);
  CHECK(a.report.selected_p == b.report.selected_p);
  CHECK(a.report.selected_q == b.report.selected_q);
  for (int pp = 1; pp <= o.p_max; ++pp)
    for (int q = 0; q <= pp; ++q) {
      const double x = a.report.mse_db[pp][q], y = b.report.mse_db[pp][q];
      CHECK(((std::isnan(x) && std::isnan(y)) || x == y));
    }
}

TEST_CASE("order selection needs enough lags") {
  SystemParams p;
  CHECK_THROWS_AS(select_order(interference_autocorr(p, 50)), std::invalid_argument);
}

TEST_CASE("decimation and rescaling") {
  CorrelationCurve rho;
  for (int t = 0; t <= 40; ++t) rho.values.push_back(std::pow(0.9, t));
  const auto dec = decimate_correlation(rho, 4);
  REQUIRE(dec.values.size() == 11);
  CHECK(dec.values[2] == rho.values[8]);
  CHECK_THROWS(decimate_correlation(rho, 0));

  // AR(1) at decimation d maps back to the d-th root of its pole
  ArmaModel m;
  m.a = {1.0, -std::pow(0.9, 4)};
  const auto rs = rescale_model(m, 4);
  REQUIRE(rs.status == FitStatus::Ok);
  CHECK(rs.model.a[1] == doctest::Approx(-0.9));

  // ARMA(2,1) with complex poles: slot-base correlation at lags kd matches
  ArmaModel c;
  c.a = {1.0, -1.2, 0.5};
  c.b = {1.0, -0.3};
  const auto back = rescale_model(c, 3);
  REQUIRE(back.status == FitStatus::Ok);
  const auto coarse = model_autocorr(c, 10);
  const auto fine = model_autocorr(back.model, 30);
  for (int k = 0; k <= 10; ++k) CHECK(std::abs(fine.values[3 * k] - coarse.values[k]) < 0.05);
}

TEST_CASE("rescaling reports roots that cannot be paired") {
  ArmaModel m;
  m.a = {1.0, 0.8};  // pole on the negative real axis
  CHECK(rescale_model(m, 2).status == FitStatus::Unpaired);
}

TEST_CASE("heatmap CSV layout") {
  SystemParams p;
  FitOptions o;
  o.p_max = 3;
  const auto sel = select_order(interference_autocorr(p, 200), o);
  const std::string csv = fit_grid_csv(sel.report);
  CHECK(csv.rfind("p,q0,q1,q2,q3\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

// Root mapping does not preserve the correlation of these fits; what must hold
// is that a mismatched model is never returned as Ok.
TEST_CASE("rescaling of long-coherence fits is verified at the sampled lags") {
  SystemParams lte1;
  lte1.mu = 0.01;
  lte1.ell = 20;
  lte1.nu = speed_from_eta(225.0);
  const auto rho = interference_autocorr(lte1, 2400);
  for (int d = 2; d <= 8; ++d) {
    const auto coarse = select_order(decimate_correlation(rho, d));
    const auto back = rescale_model(coarse.model, d);
    if (back.status != FitStatus::Ok) {
      CHECK(back.model.a == coarse.model.a);
      continue;
    }
    const auto c = model_autocorr(coarse.model, 100);
    const auto f = model_autocorr(back.model, 100 * static_cast<std::size_t>(d));
    for (std::size_t k = 0; k <= 100; ++k) CHECK(std::abs(f.values[k * d] - c.values[k]) <= 0.05);
  }
}
