#ifndef ISCAT_SPECIAL_HPP
#define ISCAT_SPECIAL_HPP

#include <complex>

namespace iscat {

// Exponential integral E1(z) = int_1^inf exp(-z t)/t dt, principal branch,
// for Re z >= 0, z != 0.  Power series near the origin, modified Lentz
// continued fraction elsewhere.
std::complex<double> expint_e1(std::complex<double> z);

// Sine and cosine integrals for x > 0:
//   Si(x) = int_0^x sin t / t dt,   Ci(x) = gamma + ln x + int_0^x (cos t - 1)/t dt.
double sin_integral(double x);
double cos_integral(double x);

}  // namespace iscat

#endif
