#pragma once

namespace ipred {

// Zeroth-order Bessel function of the first kind.
// Absolute error below 1e-10 on |x| <= 100. Throws std::domain_error on
// non-finite input.
double bessel_j0(double x);

// First positive root of J0.
inline constexpr double kBesselJ0FirstZero = 2.404825557695773;

}  // namespace ipred
