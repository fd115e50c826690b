#include "iscat/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "iscat/special.hpp"

namespace iscat {

std::vector<double> gregory_weights(std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (n < 2) {
        if (n == 1) w[0] = 0.0;
        return w;
    }
    if (n < 8) {
        // Short range: plain trapezoid.
        w.front() = w.back() = 0.5;
        return w;
    }
    static const double end[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
    for (int i = 0; i < 3; ++i) {
        w[i] = end[i];
        w[n - 1 - i] = end[i];
    }
    return w;
}

namespace {

// Panel moments M_m = int_{-d}^{d} tau^m e^{i x tau} dtau, m = 0,1,2.
void panel_moments(double x, double d, cplx& m0, cplx& m1, cplx& m2) {
    double z = x * d;
    if (std::abs(z) < 0.25) {
        double z2 = z * z;
        // Series in z; enough terms for 1e-17 at |z| = 0.25.
        double s0 = 1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0;
        double s1 = 1.0 / 3.0 - z2 / 30.0 + z2 * z2 / 840.0 - z2 * z2 * z2 / 45360.0;
        double s2 = 1.0 / 3.0 - z2 / 10.0 + z2 * z2 / 168.0 - z2 * z2 * z2 / 6480.0;
        m0 = 2.0 * d * s0;
        m1 = cplx(0.0, 2.0 * d * d * z * s1);
        m2 = 2.0 * d * d * d * s2;
        return;
    }
    double s = std::sin(z), c = std::cos(z);
    m0 = 2.0 * s / x;
    m1 = cplx(0.0, 2.0 * (s / (x * x) - d * c / x));
    m2 = 2.0 * d * d * s / x + 4.0 * d * c / (x * x) - 4.0 * s / (x * x * x);
}

}  // namespace

cplx filon_exp(const std::vector<cplx>& p, double k0, double dk, double x) {
    std::size_t n = p.size();
    if (n < 3) throw std::invalid_argument("filon_exp: need at least 3 samples");
    cplx sum = 0.0;
    std::size_t i = 0;
    for (; i + 2 < n; i += 2) {
        double kc = k0 + dk * static_cast<double>(i + 1);
        cplx gm = p[i], g0 = p[i + 1], gp = p[i + 2];
        cplx a = g0;
        cplx b = (gp - gm) / (2.0 * dk);
        cplx c = (gp - 2.0 * g0 + gm) / (2.0 * dk * dk);
        cplx m0, m1, m2;
        panel_moments(x, dk, m0, m1, m2);
        sum += std::exp(cplx(0.0, x * kc)) * (a * m0 + b * m1 + c * m2);
    }
    if (i + 1 < n) {
        // One interval left over: trapezoid with midpoint oscillation factor.
        double kc = k0 + dk * (static_cast<double>(i) + 0.5);
        cplx g = 0.5 * (p[i] + p[i + 1]);
        cplx m0, m1, m2;
        panel_moments(x, dk * 0.5, m0, m1, m2);
        sum += std::exp(cplx(0.0, x * kc)) * g * m0;
    }
    return sum;
}

namespace {

// in-place Gauss elimination with partial pivoting for tiny systems
bool solve_tiny(std::vector<double>& A, std::vector<double>& b, std::size_t n) {
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(A[r * n + c]) > std::abs(A[piv * n + c])) piv = r;
        if (std::abs(A[piv * n + c]) < 1e-300) return false;
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(A[c * n + j], A[piv * n + j]);
            std::swap(b[c], b[piv]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            double f = A[r * n + c] / A[c * n + c];
            for (std::size_t j = c; j < n; ++j) A[r * n + j] -= f * A[c * n + j];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t c = n; c-- > 0;) {
        for (std::size_t j = c + 1; j < n; ++j) b[c] -= A[c * n + j] * b[j];
        b[c] /= A[c * n + c];
    }
    return true;
}

}  // namespace

TailFit fit_tail(const std::vector<cplx>& p, double k0, double dk, double frac) {
    TailFit t;
    std::size_t n = p.size();
    t.kmax = k0 + dk * static_cast<double>(n - 1);
    std::size_t m = static_cast<std::size_t>(frac * static_cast<double>(n));
    if (m < 8) m = std::min<std::size_t>(8, n);
    std::size_t i_first = n - m;
    while (i_first < n && k0 + dk * static_cast<double>(i_first) <= 0.0) ++i_first;
    std::size_t cnt = n - i_first;
    if (cnt < 8) return t;

    auto kof = [&](std::size_t i) { return k0 + dk * static_cast<double>(i); };

    // stage 1: half-window means of y = k Im p remove the 1/k^2 drift;
    // oscillation mostly averages out
    {
        std::size_t half = cnt / 2;
        double y1 = 0.0, c1 = 0.0, y2 = 0.0, c2 = 0.0;
        for (std::size_t i = i_first; i < n; ++i) {
            double k = kof(i);
            double y = p[i].imag() * k, c = 1.0 / (k * k);
            if (i < i_first + half) {
                y1 += y;
                c1 += c;
            } else {
                y2 += y;
                c2 += c;
            }
        }
        double nh1 = static_cast<double>(half), nh2 = static_cast<double>(cnt - half);
        y1 /= nh1;
        c1 /= nh1;
        y2 /= nh2;
        c2 /= nh2;
        if (c1 - c2 > 1e-300) {
            t.a3 = (y1 - y2) / (c1 - c2);
            t.a = y2 - t.a3 * c2;
        } else {
            t.a = y2;
        }
    }
    {
        double sb = 0.0;
        for (std::size_t i = i_first; i < n; ++i) sb += p[i].real() * kof(i) * kof(i);
        t.b = sb / static_cast<double>(cnt);
    }

    // stage 2: detect a coherent oscillation in each detrended residual
    // and refit with it; skipped when the crossings are irregular.
    auto detect_omega = [&](const std::vector<double>& r) {
        double rms = 0.0;
        for (double v : r) rms += v * v;
        rms = std::sqrt(rms / static_cast<double>(cnt));
        if (rms < 1e-9 * (1.0 + std::abs(t.a) + std::abs(t.b))) return 0.0;
        std::vector<double> crossings;
        for (std::size_t i = 1; i < cnt; ++i)
            if (r[i - 1] * r[i] < 0.0)
                crossings.push_back(kof(i_first + i - 1) + dk * r[i - 1] / (r[i - 1] - r[i]));
        if (crossings.size() < 8) return 0.0;
        double mean_sp =
            (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
        double cv = 0.0;
        for (std::size_t i = 1; i < crossings.size(); ++i) {
            double d = crossings[i] - crossings[i - 1] - mean_sp;
            cv += d * d;
        }
        cv = std::sqrt(cv / static_cast<double>(crossings.size() - 1)) / mean_sp;
        if (cv > 0.35 || mean_sp <= 0.0) return 0.0;
        return M_PI / mean_sp;
    };

    {
        std::vector<double> r_im(cnt), r_re(cnt);
        for (std::size_t i = 0; i < cnt; ++i) {
            double k = kof(i_first + i);
            r_im[i] = p[i_first + i].imag() * k - t.a - t.a3 / (k * k);
            r_re[i] = p[i_first + i].real() * k * k - t.b;
        }
        double omega = detect_omega(r_im);
        if (omega == 0.0) omega = detect_omega(r_re);
        if (omega > 0.0) {
            // one shared frequency: a one-sided kink of the transform
            // radiates coherently into Re and Im, and only a joint fit can
            // put the analytic tail on the correct side
            double kbar = kof(i_first + cnt / 2);
            std::vector<double> A(16, 0.0), rhs(4, 0.0);
            for (std::size_t i = 0; i < cnt; ++i) {
                double k = kof(i_first + i);
                double y = p[i_first + i].imag() * k;
                double col[4] = {1.0, 1.0 / (k * k), std::cos(omega * k) * kbar / k,
                                 std::sin(omega * k) * kbar / k};
                for (int a1 = 0; a1 < 4; ++a1) {
                    rhs[a1] += col[a1] * y;
                    for (int b1 = 0; b1 < 4; ++b1) A[a1 * 4 + b1] += col[a1] * col[b1];
                }
            }
            bool ok_im = solve_tiny(A, rhs, 4);
            std::vector<double> Ar(9, 0.0), rr(3, 0.0);
            for (std::size_t i = 0; i < cnt; ++i) {
                double k = kof(i_first + i);
                double y = p[i_first + i].real() * k * k;
                double col[3] = {1.0, std::cos(omega * k), std::sin(omega * k)};
                for (int a1 = 0; a1 < 3; ++a1) {
                    rr[a1] += col[a1] * y;
                    for (int b1 = 0; b1 < 3; ++b1) Ar[a1 * 3 + b1] += col[a1] * col[b1];
                }
            }
            bool ok_re = solve_tiny(Ar, rr, 3);
            if (ok_im && ok_re) {
                t.a = rhs[0];
                t.a3 = rhs[1];
                t.gc = rhs[2] * kbar;
                t.gs = rhs[3] * kbar;
                t.b = rr[0];
                t.hc = rr[1];
                t.hs = rr[2];
                t.omega = omega;
                t.omega_re = omega;
            }
        }
    }
    return t;
}

namespace {

// Re and Im of int_K^inf e^{iku}/k^2 dk as functions of the (signed) u
double re_t2_of(double u, double K) {
    double au = std::abs(u);
    if (au < 1e-12) return 1.0 / K;
    double si_rem = M_PI_2 - sin_integral(K * au);
    return std::cos(K * u) / K - au * si_rem;
}

double im_t2_of(double u, double K) {
    double au = std::abs(u);
    if (au < 1e-12) return 0.0;
    return std::sin(K * u) / K - u * cos_integral(K * au);
}

}  // namespace

double tail_re(const TailFit& t, double x) {
    // a3 serves only to debias a during the fit; evaluating its own tail
    // term would inject the fit noise back at O(x/K^2).
    double K = t.kmax;
    if (K <= 0.0) return 0.0;
    double ax = std::abs(x);
    double val;
    if (ax < 1e-14) {
        val = t.b / K;
    } else {
        double si_rem = M_PI_2 - sin_integral(K * ax);
        double sgn = x > 0.0 ? 1.0 : -1.0;
        val = -sgn * t.a * si_rem + t.b * re_t2_of(x, K);
    }
    if (t.omega > 0.0) {
        // oscillation as one-sided complex components:
        //   (gamma_p e^{iwk} + gamma_m e^{-iwk}) / k^2
        double re_gp = 0.5 * (t.hc + t.gs), im_gp = 0.5 * (t.gc - t.hs);
        double re_gm = 0.5 * (t.hc - t.gs), im_gm = 0.5 * (t.gc + t.hs);
        double up = x + t.omega, um = x - t.omega;
        val += re_gp * re_t2_of(up, K) - im_gp * im_t2_of(up, K);
        val += re_gm * re_t2_of(um, K) - im_gm * im_t2_of(um, K);
    }
    return val;
}

double fourier_symmetric(const std::vector<cplx>& p, double dk, const TailFit& tail, double x) {
    return (filon_exp(p, 0.0, dk, x).real() + tail_re(tail, x)) / M_PI;
}

SymmetricTransform SymmetricTransform::build(std::vector<cplx> p, double dk) {
    SymmetricTransform t;
    t.dk_ = dk;
    TailFit first = fit_tail(p, 0.0, dk, 0.25);
    t.c_ = -0.5 * first.a;
    if (std::abs(t.c_) > 1e-8) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            double k = dk * static_cast<double>(i);
            p[i] -= cplx(0.0, -2.0 * t.c_) / cplx(k, -t.c_);
        }
    } else {
        t.c_ = 0.0;
    }
    t.tail_ = fit_tail(p, 0.0, dk, 0.25);
    t.p_rem_ = std::move(p);
    return t;
}

double SymmetricTransform::reference(double x, int side) const {
    // (1/2pi) int -2ic/(k-ic) e^{ikx} dk: an exponential on the side of
    // the axis selected by the sign of c
    // both signs give +2|c| e^{-|c||x|} on the supported side; the jump at
    // zero is 2c either way
    if (c_ == 0.0) return 0.0;
    double v = 2.0 * std::abs(c_) * std::exp(-std::abs(c_ * x));
    if (c_ > 0.0) {
        if (x > 0.0 || (x == 0.0 && side > 0)) return v;
        return 0.0;
    }
    if (x < 0.0 || (x == 0.0 && side < 0)) return v;
    return 0.0;
}

double SymmetricTransform::operator()(double x) const {
    double ref = (x == 0.0) ? 0.5 * (reference(0.0, 1) + reference(0.0, -1)) : reference(x, 0);
    return ref + fourier_symmetric(p_rem_, dk_, tail_, x);
}

double SymmetricTransform::from_above(double x) const {
    return reference(x, 1) + fourier_symmetric(p_rem_, dk_, tail_, x);
}

double SymmetricTransform::from_below(double x) const {
    return reference(x, -1) + fourier_symmetric(p_rem_, dk_, tail_, x);
}

double SymmetricTransform::jump() const { return from_above(0.0) - from_below(0.0); }

std::vector<double> cumulative_integral(const std::vector<double>& f, double h) {
    std::size_t n = f.size();
    std::vector<double> F(n, 0.0);
    if (n < 2) return F;
    if (n < 4) {
        for (std::size_t j = 1; j < n; ++j) F[j] = F[j - 1] + 0.5 * h * (f[j - 1] + f[j]);
        return F;
    }
    F[1] = F[0] + h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    for (std::size_t j = 2; j + 1 < n; ++j)
        F[j] = F[j - 1] + h / 24.0 * (-f[j - 2] + 13.0 * f[j - 1] + 13.0 * f[j] - f[j + 1]);
    F[n - 1] = F[n - 2] + h / 24.0 * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]);
    return F;
}

std::vector<double> derivative_five_point(const std::vector<double>& f, double h) {
    std::size_t n = f.size();
    if (n < 5) throw std::invalid_argument("derivative_five_point: need 5 samples");
    std::vector<double> d(n);
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) /
               (12.0 * h);
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] +
                3.0 * f[n - 5]) /
               (12.0 * h);
    return d;
}

}  // namespace iscat
