#include "ipred/kalman.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ipred {

StateSpaceModel to_state_space(const ArmaModel& model) {
  if (model.a.empty() || model.b.empty() || model.a[0] != 1.0 || model.b[0] != 1.0)
    throw std::invalid_argument("to_state_space: coefficients must be normalized (a0 = b0 = 1)");
  if (!is_stationary(model)) throw std::domain_error("to_state_space: model is not stationary");
  const int p = model.p();
  const int q = model.q();
  const int n = std::max({p, q + 1, 1});

  StateSpaceModel ss;
  ss.A = Matrix::Zero(n, n);
  for (int j = 0; j < p; ++j) ss.A(0, j) = -model.a[static_cast<std::size_t>(j) + 1];
  for (int i = 1; i < n; ++i) ss.A(i, i - 1) = 1.0;
  ss.B = Vector::Zero(n);
  ss.B(0) = 1.0;
  ss.C = Eigen::RowVectorXd::Zero(n);
  for (int k = 0; k <= q; ++k) ss.C(k) = model.b[static_cast<std::size_t>(k)];
  return ss;
}

std::vector<double> impulse_response(const StateSpaceModel& ss, std::size_t count) {
  std::vector<double> h(count);
  Vector x = ss.B;
  for (std::size_t k = 0; k < count; ++k) {
    h[k] = ss.C * x;
    x = ss.A * x;
  }
  return h;
}

std::vector<double> arma_impulse_response(const ArmaModel& model, std::size_t count) {
  std::vector<double> h(count, 0.0);
  const int p = model.p();
  const int q = model.q();
  for (std::size_t k = 0; k < count; ++k) {
    double s = k <= static_cast<std::size_t>(q) ? model.b[k] : 0.0;
    for (int n = 1; n <= p && static_cast<std::size_t>(n) <= k; ++n) s -= model.a[n] * h[k - n];
    h[k] = s / model.a[0];
  }
  return h;
}

GainResult steady_state_gain(const StateSpaceModel& ss, double tol, int max_iter) {
  const int n = ss.dim();
  const Matrix BBt = ss.B * ss.B.transpose();
  const Matrix I = Matrix::Identity(n, n);
  GainResult out;
  Matrix P = BBt;
  Vector M = Vector::Zero(n);
  for (int iter = 1; iter <= max_iter; ++iter) {
    const double innovation = (ss.C * P * ss.C.transpose())(0, 0) + 1.0;
    M = P * ss.C.transpose() / innovation;
    const Matrix posterior = (I - M * ss.C) * P;
    Matrix next = ss.A * posterior * ss.A.transpose() + BBt;
    next = 0.5 * (next + next.transpose());
    out.last_delta = (next - P).cwiseAbs().maxCoeff();
    P = next;
    out.iterations = iter;
    if (out.last_delta < tol) {
      out.converged = true;
      break;
    }
  }
  const double innovation = (ss.C * P * ss.C.transpose())(0, 0) + 1.0;
  M = P * ss.C.transpose() / innovation;
  // Measurement update followed by the B-weighted time update, collapsed
  // into x(t+1) = A x + K (i - C x).
  const double residual_scale = 1.0 - (ss.C * M)(0, 0);
  out.K = ss.A * M + ss.B * residual_scale;
  out.P = P;
  return out;
}

void Standardizer::add(double x) {
  ++count;
  if (count <= kSeedCount) {
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    // population variance via Welford
    var += (delta * (x - mean) - var) / static_cast<double>(count);
    return;
  }
  const double w = std::exp2(-1.0 / kHalfLife);
  const double delta = x - mean;
  mean += (1.0 - w) * delta;
  var = w * (var + (1.0 - w) * delta * delta);
}

double Standardizer::stddev() const { return std::sqrt(std::max(0.0, var)); }

SteadyStatePredictor::SteadyStatePredictor(StateSpaceModel ss, Vector gain)
    : ss_(std::move(ss)), gain_(std::move(gain)) {
  const int n = ss_.dim();
  if (n < 1 || ss_.A.cols() != n || ss_.B.size() != n || ss_.C.size() != n || gain_.size() != n)
    throw std::invalid_argument("SteadyStatePredictor: inconsistent dimensions");
  x_ = Vector::Zero(n);
  scratch_ = Vector::Zero(n);
}

void SteadyStatePredictor::update(double observation) {
  if (!std::isfinite(observation))
    throw std::invalid_argument("SteadyStatePredictor::update: non-finite observation");
  // Statistics include the current sample so the state and the
  // de-standardization share one scale; a lone spike cannot be amplified.
  stats_.add(observation);
  const double sd = stats_.stddev();
  const double z = sd > 0.0 ? (observation - stats_.mean) / sd : 0.0;
  const double innovation = z - ss_.C.dot(x_);
  scratch_.noalias() = ss_.A * x_;
  x_ = scratch_ + gain_ * innovation;
}

double SteadyStatePredictor::predict(int delta) const {
  if (delta < 1) throw std::invalid_argument("predict: horizon must be >= 1");
  Vector x = x_;
  for (int k = 1; k < delta; ++k) x = ss_.A * x;
  return std::max(0.0, stats_.mean + stats_.stddev() * ss_.C.dot(x));
}

void SteadyStatePredictor::predict_horizons(std::span<double> out) const {
  Vector x = x_;
  const double sd = stats_.stddev();
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k > 0) {
      scratch_.noalias() = ss_.A * x;
      x.swap(scratch_);
    }
    out[k] = std::max(0.0, stats_.mean + sd * ss_.C.dot(x));
  }
}

void SteadyStatePredictor::save(std::ostream& os) const {
  const int n = ss_.dim();
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "ipred-predictor 1\n";
  os << "dim " << n << "\n";
  os << "A";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) os << ' ' << ss_.A(i, j);
  os << "\nB";
  for (int i = 0; i < n; ++i) os << ' ' << ss_.B(i);
  os << "\nC";
  for (int i = 0; i < n; ++i) os << ' ' << ss_.C(i);
  os << "\nK";
  for (int i = 0; i < n; ++i) os << ' ' << gain_(i);
  os << "\nhalf_life " << Standardizer::kHalfLife << "\nseed_count " << Standardizer::kSeedCount
     << "\n";
  os.precision(old);
}

SteadyStatePredictor SteadyStatePredictor::load(std::istream& is) {
  auto expect = [&is](const std::string& word) {
    std::string tok;
    if (!(is >> tok) || tok != word)
      throw std::runtime_error("predictor bundle: expected '" + word + "', got '" + tok + "'");
  };
  expect("ipred-predictor");
  int version = 0;
  if (!(is >> version) || version != 1) throw std::runtime_error("predictor bundle: unsupported version");
  expect("dim");
  int n = 0;
  if (!(is >> n) || n < 1) throw std::runtime_error("predictor bundle: bad dimension");
  auto read = [&is](double& v) {
    if (!(is >> v)) throw std::runtime_error("predictor bundle: truncated");
  };
  StateSpaceModel ss;
  ss.A.resize(n, n);
  ss.B.resize(n);
  ss.C.resize(n);
  Vector K(n);
  expect("A");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) read(ss.A(i, j));
  expect("B");
  for (int i = 0; i < n; ++i) read(ss.B(i));
  expect("C");
  for (int i = 0; i < n; ++i) read(ss.C(i));
  expect("K");
  for (int i = 0; i < n; ++i) read(K(i));
  double half_life = 0.0;
  double seed_count = 0.0;
  expect("half_life");
  read(half_life);
  expect("seed_count");
  read(seed_count);
  if (half_life != Standardizer::kHalfLife || seed_count != static_cast<double>(Standardizer::kSeedCount))
    throw std::runtime_error("predictor bundle: standardization constants do not match this build");
  return SteadyStatePredictor(std::move(ss), std::move(K));
}

SteadyStatePredictor make_predictor(const ArmaModel& model) {
  StateSpaceModel ss = to_state_space(model);
  const GainResult gain = steady_state_gain(ss);
  if (!gain.converged)
    throw std::runtime_error("steady-state gain did not converge (last delta " +
                             std::to_string(gain.last_delta) + ")");
  return SteadyStatePredictor(std::move(ss), gain.K);
}

}  // namespace ipred
