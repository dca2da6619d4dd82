#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ipred {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// 2-norm condition number (ratio of extreme singular values).
double condition_number(const Matrix& m);

double spectral_radius(const Matrix& m);

/// Roots of c[0] + c[1] z + ... + c[n] z^n (trailing zeros dropped).
std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs);

/// Real coefficients of prod_k (1 - z / roots[k]); constant term is 1.
/// Fails (returns false) if the roots do not pair into conjugates.
bool polynomial_from_roots(std::span<const std::complex<double>> roots, std::vector<double>& out);

}  // namespace ipred
