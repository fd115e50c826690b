#ifndef ISCAT_QUADRATURE_HPP
#define ISCAT_QUADRATURE_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace iscat {

using cplx = std::complex<double>;

// ---- weights on uniform grids -------------------------------------------

template <class T>
T trapezoid(const std::vector<T>& f, double h) {
    if (f.size() < 2) return T(0);
    T s = (f.front() + f.back()) * 0.5;
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * h;
}

// Composite Simpson; falls back to a 3/8 block when the interval count is
// odd.  Two points degrade to the trapezoid rule.
template <class T>
T simpson(const std::vector<T>& f, double h) {
    std::size_t n = f.size();
    if (n < 2) return T(0);
    if (n == 2) return (f[0] + f[1]) * (0.5 * h);
    T s(0);
    std::size_t m = n - 1;  // interval count
    std::size_t even_end = (m % 2 == 0) ? n - 1 : n - 4;
    for (std::size_t i = 0; i + 2 <= even_end; i += 2)
        s += (f[i] + f[i + 1] * 4.0 + f[i + 2]) * (h / 3.0);
    if (m % 2 != 0) {
        if (n >= 4)
            s += (f[n - 4] + f[n - 3] * 3.0 + f[n - 2] * 3.0 + f[n - 1]) * (3.0 * h / 8.0);
        else
            s += (f[n - 2] + f[n - 1]) * (0.5 * h);
    }
    return s;
}

// Fourth-order end-corrected trapezoid weights (Gregory), unit step.
// Degrades gracefully for short ranges.
std::vector<double> gregory_weights(std::size_t n_points);

template <class T>
T gregory(const std::vector<T>& f, double h) {
    auto w = gregory_weights(f.size());
    T s(0);
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * w[i];
    return s * h;
}

// ---- oscillatory transforms ---------------------------------------------

// int_{k0}^{k0+(n-1)dk} p(k) e^{i k x} dk by Filon--Simpson panels:
// p is fitted by a quadratic on each pair of intervals and the oscillation
// is integrated exactly, so the accuracy does not degrade with |x|.
cplx filon_exp(const std::vector<cplx>& p, double k0, double dk, double x);

// Tail model of a conjugate-symmetric function p(-k) = conj(p(k)):
//   p(k) ~ i a/k + b/k^2 + i a3/k^3 + i (gc cos(wk) + gs sin(wk))/k^2.
// The oscillatory term is the far-field signature of a kink of the
// transform away from the origin (frequency = kink position); detecting
// it keeps both the coefficient fit and the analytic tail clean.
struct TailFit {
    double a = 0.0;   // imaginary first-order coefficient
    double b = 0.0;   // real second-order coefficient
    double a3 = 0.0;  // imaginary third-order coefficient
    double omega = 0.0;
    double gc = 0.0, gs = 0.0;  // imaginary-side oscillation at 1/k^2
    double omega_re = 0.0;
    double hc = 0.0, hs = 0.0;  // real-side oscillation at 1/k^2
    double kmax = 0.0;
};

// Least-squares fit of the tail on the trailing fraction of the samples.
TailFit fit_tail(const std::vector<cplx>& p, double k0, double dk, double frac = 0.2);

// Re int_K^inf (i a / k + b / k^2) e^{i k x} dk  (finite for all real x).
double tail_re(const TailFit& t, double x);

// F(x) = (1/pi) Re[ int_0^K p(k) e^{ikx} dk + tail ] for conjugate-symmetric
// p sampled on k_i = i*dk.  This is (1/2pi) int_{-inf}^{inf} p e^{ikx} dk.
double fourier_symmetric(const std::vector<cplx>& p, double dk, const TailFit& tail, double x);

// Full-line transform of conjugate-symmetric samples with the slow 1/k
// part peeled off analytically: p = -2ic/(k - ic) + remainder, where the
// rational reference carries the exact jump at x = 0 and the remainder
// decays one order faster, so truncation ringing at the structure point
// drops out.
class SymmetricTransform {
  public:
    static SymmetricTransform build(std::vector<cplx> p, double dk);
    // midpoint convention exactly at x = 0
    double operator()(double x) const;
    // one-sided limits at x = 0 (equal to operator() elsewhere)
    double from_above(double x) const;
    double from_below(double x) const;
    double jump() const;  // value of the x = 0 jump

  private:
    std::vector<cplx> p_rem_;
    double dk_ = 0.0;
    TailFit tail_;
    double c_ = 0.0;
    double reference(double x, int side) const;
};

// Five-point first derivative on a uniform grid, one-sided at the ends.
std::vector<double> derivative_five_point(const std::vector<double>& f, double h);

// Cumulative integral F_j = int_0^{x_j} f on a uniform grid, fourth order
// (Adams-Moulton panel increments).
std::vector<double> cumulative_integral(const std::vector<double>& f, double h);

}  // namespace iscat

#endif
