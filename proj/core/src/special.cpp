#include "iscat/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace iscat {

using cplx = std::complex<double>;

namespace {
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
}

cplx expint_e1(cplx z) {
    double az = std::abs(z);
    if (az == 0.0) throw std::domain_error("expint_e1: z = 0");
    if (az <= 3.5) {
        // E1(z) = -gamma - ln z + sum_{n>=1} (-1)^{n+1} z^n/(n n!)
        cplx sum = 0.0, term = 1.0;
        for (int n = 1; n < 80; ++n) {
            term *= -z / static_cast<double>(n);
            cplx add = -term / static_cast<double>(n);
            sum += add;
            if (std::abs(add) < 1e-18 * (1.0 + std::abs(sum))) break;
        }
        return -kEulerGamma - std::log(z) + sum;
    }
    // Modified Lentz for the continued fraction
    //   E1(z) = exp(-z) / (z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(...))))
    const double tiny = 1e-300;
    cplx b = z + 1.0;
    cplx c = 1.0 / tiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 1; i < 300; ++i) {
        double a = -static_cast<double>(i) * static_cast<double>(i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        if (c == cplx(0.0)) c = tiny;
        cplx delta = c * d;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-z);
}

double sin_integral(double x) {
    if (x == 0.0) return 0.0;
    if (x < 0.0) return -sin_integral(-x);
    cplx e1 = expint_e1(cplx(0.0, x));
    // E1(ix) = -Ci(x) - i (pi/2 - Si(x))
    return M_PI_2 + e1.imag();
}

double cos_integral(double x) {
    if (x <= 0.0) throw std::domain_error("cos_integral: x <= 0");
    cplx e1 = expint_e1(cplx(0.0, x));
    return -e1.real();
}

}  // namespace iscat
