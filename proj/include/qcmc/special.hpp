#pragma once

namespace qcmc {

/// Complementary error function, relative error below 1e-13 over the real
/// line (underflows to 0 near x ~ 27).
double erfc(double x);

/// Scaled complementary error function erfcx(x) = exp(x^2) erfc(x).
///
/// Stable for arbitrarily large positive x (no underflow); for negative x it
/// grows like 2 exp(x^2) and overflows below x ~ -26.6.
double erfcx(double x);

}  // namespace qcmc
