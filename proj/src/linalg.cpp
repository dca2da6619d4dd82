#include "ipred/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ipred {

double condition_number(const Matrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double smallest = s(s.size() - 1);
  if (smallest <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smallest;
}

double spectral_radius(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs) {
  std::size_t degree = coeffs.size();
  while (degree > 0 && coeffs[degree - 1] == 0.0) --degree;
  if (degree <= 1) return {};
  const std::size_t n = degree - 1;
  const double lead = coeffs[n];
  Matrix companion = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) companion(0, static_cast<Eigen::Index>(j)) = -coeffs[n - 1 - j] / lead;
  for (std::size_t i = 1; i < n; ++i)
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  Eigen::EigenSolver<Matrix> es(companion, false);
  std::vector<std::complex<double>> roots(n);
  for (std::size_t i = 0; i < n; ++i) roots[i] = es.eigenvalues()(static_cast<Eigen::Index>(i));
  return roots;
}

bool polynomial_from_roots(std::span<const std::complex<double>> roots, std::vector<double>& out) {
  std::vector<std::complex<double>> poly{1.0};
  for (const auto& r : roots) {
    if (r == 0.0) return false;
    const std::complex<double> factor = -1.0 / r;
    poly.push_back(0.0);
    for (std::size_t i = poly.size() - 1; i > 0; --i) poly[i] += factor * poly[i - 1];
  }
  out.resize(poly.size());
  double scale = 0.0;
  for (const auto& c : poly) scale = std::max(scale, std::abs(c));
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (std::abs(poly[i].imag()) > 1e-8 * std::max(1.0, scale)) return false;
    out[i] = poly[i].real();
  }
  return true;
}

}  // namespace ipred
