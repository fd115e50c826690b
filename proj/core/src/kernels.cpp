#include "iscat/kernels.hpp"

#include <cmath>
#include <fstream>

#include "iscat/errors.hpp"

namespace iscat {

TransformationKernel::TransformationKernel(Kind kind, double h, std::size_t nx, std::size_t ny)
    : kind_(kind), h_(h), nx_(nx), ny_(ny), v_(nx * ny, 0.0) {}

double TransformationKernel::at(double x, double y) const {
    double fx = x / h_, fy = y / h_;
    if (fx < 0.0) fx = 0.0;
    if (fy < 0.0) fy = 0.0;
    std::size_t i = std::min(static_cast<std::size_t>(fx), nx_ - 2);
    std::size_t j = std::min(static_cast<std::size_t>(fy), ny_ - 2);
    double tx = std::min(fx - static_cast<double>(i), 1.0);
    double ty = std::min(fy - static_cast<double>(j), 1.0);
    // cells straddling the triangle edge have one corner without data;
    // interpolate on the plane through the three valid corners instead
    if (kind_ == Kind::K_regular && j + 1 > i) {
        double v00 = node(i, j), v10 = node(i + 1, j), v11 = node(i + 1, j + 1);
        return v00 + tx * (v10 - v00) + ty * (v11 - v10);
    }
    if (kind_ == Kind::A_outgoing && j < i + 1) {
        double v00 = node(i, j), v01 = node(i, j + 1), v11 = node(i + 1, j + 1);
        return v00 + ty * (v01 - v00) + tx * (v11 - v01);
    }
    double v00 = node(i, j), v10 = node(i + 1, j), v01 = node(i, j + 1), v11 = node(i + 1, j + 1);
    return (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 + tx * ty * v11;
}

std::vector<double> TransformationKernel::diagonal() const {
    std::size_t n = std::min(nx_, ny_);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = node(i, i);
    return d;
}

std::vector<double> TransformationKernel::row(std::size_t i) const {
    std::vector<double> r(ny_);
    for (std::size_t j = 0; j < ny_; ++j) r[j] = node(i, j);
    return r;
}

void TransformationKernel::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write kernel CSV: " + path);
    out << "x,y,value\n";
    char buf[96];
    for (std::size_t i = 0; i < nx_; ++i)
        for (std::size_t j = 0; j < ny_; ++j) {
            bool inside = kind_ == Kind::A_outgoing ? (j >= i) : (j <= i);
            if (!inside) continue;
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.12g\n", h_ * i, h_ * j, node(i, j));
            out << buf;
        }
}

namespace kernels {

namespace {

// Gregory end corrections on top of a plain trapezoid sum: integral over
// [i0*h, i1*h] of samples f is
//   h * (prefix trapezoid) + h * sum_j c_j (f[i0+j] + f[i1-j])
// once the range has at least 8 nodes.
constexpr double kGreg[3] = {-1.0 / 8.0, 1.0 / 6.0, -1.0 / 24.0};

// Composite Simpson (with a 3/8 tail) over lattice indices [i0, i1],
// unit step; used for ranges too short for the Gregory corrections.
// i_last is the largest index with data: a single-cell range then uses the
// one-sided parabolic rule int_0^h f = h(5 f0 + 8 f1 - f2)/12 so that the
// quadrature order stays uniform right down to the boundary rows.
template <class F>
double simpson_short(F f, std::size_t i0, std::size_t i1, std::size_t i_last) {
    std::size_t m = i1 - i0;
    if (m == 0) return 0.0;
    if (m == 1) {
        if (i1 + 1 <= i_last) return (5.0 * f(i0) + 8.0 * f(i1) - f(i1 + 1)) / 12.0;
        if (i0 >= 1) return (5.0 * f(i1) + 8.0 * f(i0) - f(i0 - 1)) / 12.0;
        return 0.5 * (f(i0) + f(i1));
    }
    double s = 0.0;
    std::size_t even_end = (m % 2 == 0) ? i1 : i1 - 3;
    for (std::size_t i = i0; i + 2 <= even_end; i += 2)
        s += (f(i) + 4.0 * f(i + 1) + f(i + 2)) / 3.0;
    if (m % 2 != 0) {
        if (m >= 3)
            s += 3.0 / 8.0 * (f(i1 - 3) + 3.0 * f(i1 - 2) + 3.0 * f(i1 - 1) + f(i1));
        else
            s += 0.5 * (f(i1 - 1) + f(i1));
    }
    return s;
}

struct PrefixIntegral {
    // Exact integral of the piecewise-linear potential from 0 to x.
    std::vector<double> prefix;
    const Potential* q;
    double at(double x) const {
        if (x <= 0.0) return 0.0;
        const auto& g = q->grid();
        if (x >= g.back()) return prefix.back();
        std::size_t i = g.cell(x);
        double ql = q->samples()[i];
        double t = x - g[i];
        double qx = (*q)(x);
        return prefix[i] + 0.5 * (ql + qx) * t;
    }
};

PrefixIntegral make_prefix(const Potential& q) {
    PrefixIntegral p;
    p.q = &q;
    const auto& s = q.samples();
    p.prefix.assign(s.size(), 0.0);
    for (std::size_t i = 1; i < s.size(); ++i)
        p.prefix[i] = p.prefix[i - 1] + 0.5 * (s[i - 1] + s[i]) * q.step();
    return p;
}

}  // namespace

TransformationKernel kernel_A_from_potential(const Potential& q, double x_max, double y_max,
                                             double h, const VolterraOptions& opt) {
    if (y_max < x_max) throw ConfigError("kernel_A: y_max must cover x_max");
    if (h < 2.0 * q.step() - 1e-12)
        throw ConfigError("kernel_A: lattice step must be at least twice the potential step");
    const double hb = 0.5 * h;
    const double a = q.support();
    // Where the tail of q stops mattering at the stopping tolerance.
    double a_eff = a;
    {
        double total = q.sigma(0.0);
        while (a_eff > 0.0 && q.sigma(a_eff - hb) < 1e-13 * (total + 1.0)) a_eff -= hb;
    }
    const double v_max = 0.5 * y_max;
    const double u_out = 0.5 * (x_max + y_max);
    const double u_hi = std::max(u_out, a_eff + v_max) + hb;
    const std::size_t nu = static_cast<std::size_t>(std::round(u_hi / hb)) + 1;
    const std::size_t nv = static_cast<std::size_t>(std::round(v_max / hb)) + 1;

    PrefixIntegral Q = make_prefix(q);
    const double q_total = Q.prefix.back();

    // driving term: half the tail integral of q at u
    std::vector<double> gdrv(nu);
    for (std::size_t i = 0; i < nu; ++i) gdrv[i] = 0.5 * (q_total - Q.at(hb * i));

    std::vector<double> B(nu * nv, 0.0), Bn(nu * nv, 0.0);
    auto idx = [nv](std::size_t iu, std::size_t jv) { return iu * nv + jv; };
    for (std::size_t iu = 0; iu < nu; ++iu) Bn[idx(iu, 0)] = gdrv[iu];

    std::vector<double> T(nu), phi(nu), suffix(nu), fprev(nu), fcur(nu);

    double change = 0.0;
    std::size_t iter = 0;
    for (; iter < opt.max_iter; ++iter) {
        change = 0.0;
        std::fill(T.begin(), T.end(), 0.0);
        auto fval = [&](std::size_t is, std::size_t jt) {
            double s = hb * is, t = hb * jt;
            return q(s - t) * B[idx(is, jt)];
        };
        for (std::size_t is = 0; is < nu; ++is) fprev[is] = fval(is, 0);
        for (std::size_t jv = 0; jv < nv; ++jv) {
            if (jv > 0) {
                for (std::size_t is = 0; is < nu; ++is) {
                    fcur[is] = fval(is, jv);
                    T[is] += 0.5 * (fprev[is] + fcur[is]);
                    fprev[is] = fcur[is];
                }
            }
            // inner integral over t in [0, v]
            for (std::size_t is = 0; is < nu; ++is) {
                double val;
                if (jv >= 8) {
                    val = T[is];
                    for (int j = 0; j < 3; ++j)
                        val += kGreg[j] * (fval(is, j) + fval(is, jv - j));
                } else {
                    val = simpson_short([&](std::size_t jt) { return fval(is, jt); }, 0, jv, nv - 1);
                }
                phi[is] = val * hb;
            }
            // suffix integral over s in [u, u_hi]
            suffix[nu - 1] = 0.0;
            for (std::size_t is = nu - 1; is-- > 0;)
                suffix[is] = suffix[is + 1] + 0.5 * (phi[is] + phi[is + 1]);
            for (std::size_t iu = jv; iu < nu; ++iu) {
                double P;
                if (nu - 1 - iu >= 8) {
                    P = suffix[iu];
                    for (int j = 0; j < 3; ++j) P += kGreg[j] * (phi[iu + j] + phi[nu - 1 - j]);
                } else {
                    P = simpson_short([&](std::size_t is) { return phi[is]; }, iu, nu - 1, nu - 1);
                }
                P *= hb;
                double nv_ = gdrv[iu] + P;
                double& slot = Bn[idx(iu, jv)];
                change = std::max(change, std::abs(nv_ - slot));
                slot = nv_;
            }
        }
        std::swap(B, Bn);
        if (change < opt.tol) break;
    }
    if (iter == opt.max_iter)
        throw SolverError(Err::IterationDivergence,
                          "outgoing kernel sweep stalled, last change " + std::to_string(change));

    const std::size_t nx = static_cast<std::size_t>(std::round(x_max / h)) + 1;
    const std::size_t ny = static_cast<std::size_t>(std::round(y_max / h)) + 1;
    TransformationKernel K(TransformationKernel::Kind::A_outgoing, h, nx, ny);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = i; j < ny; ++j) {
            std::size_t iu = i + j;  // (x+y)/2 in units of hb
            std::size_t jv = j - i;
            if (iu < nu && jv < nv) K.node(i, j) = B[idx(iu, jv)];
        }
    return K;
}

TransformationKernel kernel_K_from_potential(const Potential& q, double b, double h,
                                             const VolterraOptions& opt) {
    if (b > q.x_max() + 1e-12) throw ConfigError("kernel_K: b exceeds the potential range");
    if (h < 2.0 * q.step() - 1e-12)
        throw ConfigError("kernel_K: lattice step must be at least twice the potential step");
    const std::size_t n = static_cast<std::size_t>(std::round(2.0 * b / h)) + 1;  // xi lattice
    PrefixIntegral Q = make_prefix(q);

    // driving term G(xi, eta) = (Q(xi/2) - Q(eta/2)) / 2
    std::vector<double> Qhalf(n);
    for (std::size_t i = 0; i < n; ++i) Qhalf[i] = Q.at(0.5 * h * i);

    std::vector<double> B(n * n, 0.0), Bn(n * n, 0.0);
    auto idx = [n](std::size_t ix, std::size_t je) { return ix * n + je; };

    std::vector<double> T(n), psi(n), prefix(n), fprev(n), fcur(n);
    double change = 0.0;
    std::size_t iter = 0;
    for (; iter < opt.max_iter; ++iter) {
        change = 0.0;
        std::fill(T.begin(), T.end(), 0.0);
        auto fval = [&](std::size_t it, std::size_t js) {
            double t = h * it, s = h * js;
            return q(0.5 * (t + s)) * B[idx(it, js)];
        };
        for (std::size_t it = 0; it < n; ++it) fprev[it] = fval(it, 0);
        for (std::size_t je = 0; je < n; ++je) {
            if (je > 0) {
                for (std::size_t it = je; it < n; ++it) {
                    fcur[it] = fval(it, je);
                    T[it] += 0.5 * (fprev[it] + fcur[it]);
                    fprev[it] = fcur[it];
                }
            }
            for (std::size_t it = je; it < n; ++it) {
                double val;
                if (je >= 8) {
                    val = T[it];
                    for (int j = 0; j < 3; ++j) val += kGreg[j] * (fval(it, j) + fval(it, je - j));
                } else {
                    val = simpson_short([&](std::size_t js) { return fval(it, js); }, 0, je, it);
                }
                psi[it] = val * h;
            }
            // prefix over t starting at eta
            prefix[je] = 0.0;
            for (std::size_t it = je + 1; it < n; ++it)
                prefix[it] = prefix[it - 1] + 0.5 * (psi[it - 1] + psi[it]);
            for (std::size_t ix = je; ix < n; ++ix) {
                double O;
                if (ix - je >= 8) {
                    O = prefix[ix];
                    for (int j = 0; j < 3; ++j) O += kGreg[j] * (psi[je + j] + psi[ix - j]);
                } else {
                    O = simpson_short([&](std::size_t it) { return psi[it]; }, je, ix, n - 1);
                }
                O *= h;
                double nv_ = 0.5 * (Qhalf[ix] - Qhalf[je]) + 0.25 * O;
                double& slot = Bn[idx(ix, je)];
                change = std::max(change, std::abs(nv_ - slot));
                slot = nv_;
            }
        }
        std::swap(B, Bn);
        if (change < opt.tol) break;
    }
    if (iter == opt.max_iter)
        throw SolverError(Err::IterationDivergence,
                          "regular kernel sweep stalled, last change " + std::to_string(change));

    const std::size_t nx = static_cast<std::size_t>(std::round(b / h)) + 1;
    TransformationKernel K(TransformationKernel::Kind::K_regular, h, nx, nx);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j <= i; ++j) K.node(i, j) = B[idx(i + j, i - j)];
    return K;
}

std::vector<double> x_derivative_row0(const TransformationKernel& A) {
    if (A.kind() != TransformationKernel::Kind::A_outgoing)
        throw ConfigError("x_derivative_row0: outgoing kernel expected");
    double h = A.step();
    std::size_t ny = A.ny();
    std::vector<double> d(ny, 0.0);
    for (std::size_t j = 2; j < ny; ++j)
        d[j] = (-3.0 * A.node(0, j) + 4.0 * A.node(1, j) - A.node(2, j)) / (2.0 * h);
    if (ny > 5) {
        d[1] = 3.0 * d[2] - 3.0 * d[3] + d[4];
        d[0] = 3.0 * d[1] - 3.0 * d[2] + d[3];
    }
    return d;
}

std::vector<double> potential_kinks(const Potential& q) {
    std::vector<double> kinks;
    const auto& s = q.samples();
    double h = q.step();
    double scale = q.sup_abs();
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        double d2 = std::abs(s[i - 1] - 2.0 * s[i] + s[i + 1]) / h;
        if (d2 > 20.0 * scale) kinks.push_back(q.grid()[i]);
    }
    kinks.push_back(q.support());
    return kinks;
}

double goursat_residual(const TransformationKernel& k, const Potential& q) {
    auto kinks = potential_kinks(q);
    double h = k.step();
    auto masked = [&](double x, double y) {
        for (double c : kinks) {
            if (std::abs(x - c) < 4.0 * h) return true;
            if (std::abs(0.5 * (x + y) - c) < 4.0 * h) return true;
            if (std::abs(0.5 * std::abs(x - y) - c) < 4.0 * h) return true;
        }
        return false;
    };
    auto d2 = [&](double fm2, double fm1, double f0, double fp1, double fp2) {
        return (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    };
    double worst = 0.0;
    bool outgoing = k.kind() == TransformationKernel::Kind::A_outgoing;
    for (std::size_t i = 2; i + 2 < k.nx(); ++i) {
        for (std::size_t j = 2; j + 2 < k.ny(); ++j) {
            bool interior = outgoing ? (j >= i + 2) : (j + 2 <= i && j >= 2);
            if (!interior) continue;
            double x = h * i, y = h * j;
            if (masked(x, y)) continue;
            double kxx = d2(k.node(i - 2, j), k.node(i - 1, j), k.node(i, j), k.node(i + 1, j),
                            k.node(i + 2, j));
            double kyy = d2(k.node(i, j - 2), k.node(i, j - 1), k.node(i, j), k.node(i, j + 1),
                            k.node(i, j + 2));
            double r = kxx - kyy - q(x) * k.node(i, j);
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

}  // namespace kernels
}  // namespace iscat
