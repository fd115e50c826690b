#ifndef ISCAT_TEST_ORACLES_HPP
#define ISCAT_TEST_ORACLES_HPP

// Independent reference implementations used only by the tests.  They
// deliberately avoid the code paths of the library: adaptive Cash-Karp
// stepping against fixed-step envelope marches, ascending series against
// recurrences, brute-force quadrature against Filon panels.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "iscat/potential.hpp"

namespace oracle {

using cplx = std::complex<double>;

// Adaptive Cash-Karp RK45 for u'' = (q(x) - k^2) u, complex k.
struct OdeResult {
    cplx u, up;
};

inline OdeResult integrate_schrodinger(const iscat::Potential& q, cplx k, double x0, double x1,
                                       cplx u0, cplx up0, double tol = 1e-12) {
    static const double a2 = 1.0 / 5, a3 = 3.0 / 10, a4 = 3.0 / 5, a5 = 1.0, a6 = 7.0 / 8;
    static const double b21 = 1.0 / 5;
    static const double b31 = 3.0 / 40, b32 = 9.0 / 40;
    static const double b41 = 3.0 / 10, b42 = -9.0 / 10, b43 = 6.0 / 5;
    static const double b51 = -11.0 / 54, b52 = 5.0 / 2, b53 = -70.0 / 27, b54 = 35.0 / 27;
    static const double b61 = 1631.0 / 55296, b62 = 175.0 / 512, b63 = 575.0 / 13824,
                        b64 = 44275.0 / 110592, b65 = 253.0 / 4096;
    static const double c1 = 37.0 / 378, c3 = 250.0 / 621, c4 = 125.0 / 594, c6 = 512.0 / 1771;
    static const double d1 = c1 - 2825.0 / 27648, d3 = c3 - 18575.0 / 48384,
                        d4 = c4 - 13525.0 / 55296, d5 = -277.0 / 14336, d6 = c6 - 1.0 / 4;

    cplx k2 = k * k;
    auto rhs = [&](double x, cplx u, cplx up, cplx& du, cplx& dup) {
        du = up;
        dup = (q(x) - k2) * u;
    };
    double dir = x1 > x0 ? 1.0 : -1.0;
    double h = dir * std::min(0.05, std::abs(x1 - x0) / 8.0);
    double x = x0;
    cplx u = u0, up = up0;
    int guard = 0;
    while (dir * (x1 - x) > 1e-14 && guard++ < 2000000) {
        if (dir * (x + h - x1) > 0.0) h = x1 - x;
        cplx k1u, k1p, k2u, k2p, k3u, k3p, k4u, k4p, k5u, k5p, k6u, k6p;
        rhs(x, u, up, k1u, k1p);
        rhs(x + a2 * h, u + h * b21 * k1u, up + h * b21 * k1p, k2u, k2p);
        rhs(x + a3 * h, u + h * (b31 * k1u + b32 * k2u), up + h * (b31 * k1p + b32 * k2p), k3u,
            k3p);
        rhs(x + a4 * h, u + h * (b41 * k1u + b42 * k2u + b43 * k3u),
            up + h * (b41 * k1p + b42 * k2p + b43 * k3p), k4u, k4p);
        rhs(x + a5 * h, u + h * (b51 * k1u + b52 * k2u + b53 * k3u + b54 * k4u),
            up + h * (b51 * k1p + b52 * k2p + b53 * k3p + b54 * k4p), k5u, k5p);
        rhs(x + a6 * h, u + h * (b61 * k1u + b62 * k2u + b63 * k3u + b64 * k4u + b65 * k5u),
            up + h * (b61 * k1p + b62 * k2p + b63 * k3p + b64 * k4p + b65 * k5p), k6u, k6p);
        cplx du = h * (c1 * k1u + c3 * k3u + c4 * k4u + c6 * k6u);
        cplx dup = h * (c1 * k1p + c3 * k3p + c4 * k4p + c6 * k6p);
        cplx eu = h * (d1 * k1u + d3 * k3u + d4 * k4u + d5 * k5u + d6 * k6u);
        cplx ep = h * (d1 * k1p + d3 * k3p + d4 * k4p + d5 * k5p + d6 * k6p);
        double scale = std::abs(u) + std::abs(h) * std::abs(up) + 1e-30;
        double err = std::max(std::abs(eu) / scale, std::abs(ep) / (scale * (std::abs(k) + 1.0)));
        if (err <= tol) {
            x += h;
            u += du;
            up += dup;
            h *= std::min(5.0, 0.9 * std::pow(tol / (err + 1e-300), 0.2));
        } else {
            h *= std::max(0.1, 0.9 * std::pow(tol / err, 0.25));
        }
    }
    if (guard >= 2000000) throw std::runtime_error("oracle integrator stalled");
    return {u, up};
}

// Jost data by adaptive backward integration from the support edge.
inline OdeResult jost(const iscat::Potential& q, cplx k, double tol = 1e-12) {
    double a = q.support_edge();
    cplx eika = std::exp(cplx(0.0, 1.0) * k * a);
    return integrate_schrodinger(q, k, a, 0.0, eika, cplx(0.0, 1.0) * k * eika, tol);
}

// Bound states by forward shooting: sign changes of
// W(kappa) = u'(a)/u(a) + kappa for the regular solution.
inline std::vector<double> shooting_bound_states(const iscat::Potential& q, double kappa_max,
                                                 int scan = 400) {
    auto mismatch = [&](double kappa) {
        auto r = integrate_schrodinger(q, cplx(0.0, kappa), 0.0, q.support_edge(), 0.0, 1.0, 1e-12);
        return (r.up / r.u).real() + kappa;
    };
    std::vector<double> roots;
    double prev = mismatch(kappa_max * 1e-4);
    for (int i = 1; i <= scan; ++i) {
        double kap = kappa_max * static_cast<double>(i) / scan;
        double cur = mismatch(kap);
        if (std::isfinite(prev) && std::isfinite(cur) && prev * cur < 0.0 &&
            std::abs(prev) < 1e3 && std::abs(cur) < 1e3) {
            double lo = kappa_max * static_cast<double>(i - 1) / scan, hi = kap, flo = prev;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = mismatch(mid);
                if (flo * fm <= 0.0)
                    hi = mid;
                else {
                    lo = mid;
                    flo = fm;
                }
            }
            double root = 0.5 * (lo + hi);
            if (std::abs(mismatch(root)) < 1e-2) roots.push_back(root);  // skip pole crossings
        }
        prev = cur;
    }
    return roots;
}

// Ascending series for the Riccati-Bessel u_l (independent of the library
// recurrences); valid for r not much larger than l.
inline double riccati_u_series(unsigned l, double r) {
    double lndf = std::lgamma(2.0 * l + 2.0) - l * std::log(2.0) - std::lgamma(l + 1.0);
    double lead = (l + 1.0) * std::log(r) - lndf;
    double sum = 1.0, term = 1.0;
    for (unsigned m = 1; m < 300; ++m) {
        term *= -0.5 * r * r / (static_cast<double>(m) * (2.0 * l + 2.0 * m + 1.0));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return std::exp(lead) * sum;
}

// Dense trapezoid on an adaptive lambda, for quadrature cross-checks.
inline double brute_integral(const std::function<double(double)>& f, double a, double b,
                             std::size_t n = 200001) {
    double h = (b - a) / static_cast<double>(n - 1);
    double s = 0.5 * (f(a) + f(b));
    for (std::size_t i = 1; i + 1 < n; ++i) s += f(a + h * static_cast<double>(i));
    return s * h;
}

inline cplx brute_integral_c(const std::function<cplx(double)>& f, double a, double b,
                             std::size_t n = 200001) {
    double h = (b - a) / static_cast<double>(n - 1);
    cplx s = 0.5 * (f(a) + f(b));
    for (std::size_t i = 1; i + 1 < n; ++i) s += f(a + h * static_cast<double>(i));
    return s * h;
}

// Shared test potentials.  The well edge carries a half-height sample so
// the sampled interpolant integrates to exactly depth * width.
inline iscat::Potential square_well(double depth, double width, double h = 0.005,
                                    double x_max = -1.0) {
    if (x_max < 0.0) x_max = width + 1.0;
    return iscat::Potential::from_function(
        [&](double x) {
            if (x < width - 1e-12) return -depth;
            if (x < width + 1e-12) return -0.5 * depth;
            return 0.0;
        },
        x_max, h, width);
}

inline iscat::Potential sech2_well(double h = 0.005, double a = 20.0) {
    return iscat::Potential::from_function(
        [](double x) {
            double c = std::cosh(x);
            return -2.0 / (c * c);
        },
        a, h, a);
}

}  // namespace oracle

#endif
