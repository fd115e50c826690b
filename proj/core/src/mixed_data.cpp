#include "iscat/mixed_data.hpp"

#include <cmath>

#include "iscat/errors.hpp"
#include "iscat/linalg.hpp"
#include "iscat/parallel.hpp"
#include "iscat/quadrature.hpp"

namespace iscat {
namespace mixed {

namespace {

// Scaled Pruefer angle at x = 1:  theta' = omega - (q/omega) sin^2 theta.
double prufer_angle(const Potential& q, double omega) {
    double theta = 0.0;
    double x = 0.0;
    double hq = q.step();
    while (x < 1.0 - 1e-14) {
        double step = std::min({hq, 0.2 / omega, 1.0 - x});
        auto rhs = [&](double xx, double th) {
            double s = std::sin(th);
            return omega - q(xx) / omega * s * s;
        };
        double k1 = rhs(x, theta);
        double k2 = rhs(x + 0.5 * step, theta + 0.5 * step * k1);
        double k3 = rhs(x + 0.5 * step, theta + 0.5 * step * k2);
        double k4 = rhs(x + step, theta + step * k3);
        theta += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        x += step;
    }
    return theta;
}

double eigenvalue_near(const Potential& q, double omega_free, int n, double robin_h, bool robin) {
    // target theta(1) = n pi - atan2(omega, robin_h) (Robin) or n pi (Dirichlet)
    auto gap = [&](double om) {
        double target = robin ? n * M_PI - std::atan2(om, robin_h) : n * M_PI;
        return prufer_angle(q, om) - target;
    };
    double pad = q.sup_abs() + 1.0;
    double lo = std::max(0.02, omega_free - pad), hi = omega_free + pad;
    double glo = gap(lo), ghi = gap(hi);
    int expand = 0;
    while (glo > 0.0 && expand < 6) {
        lo = std::max(0.01, lo - pad);
        glo = gap(lo);
        if (lo <= 0.011) break;
        ++expand;
    }
    while (ghi < 0.0 && expand < 12) {
        hi += pad;
        ghi = gap(hi);
        ++expand;
    }
    if (!(glo <= 0.0 && ghi >= 0.0))
        throw SolverError(Err::BracketingFailure,
                          "eigenvalue bracket failed near omega = " + std::to_string(omega_free));
    for (int it = 0; it < 64; ++it) {
        double mid = 0.5 * (lo + hi);
        if (gap(mid) <= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double om = 0.5 * (lo + hi);
    return om * om;
}

}  // namespace

TwoSpectra two_spectra_from_potential(const Potential& q01, double robin_h, std::size_t n_max) {
    if (q01.x_max() < 1.0 - 1e-12)
        throw ConfigError("two_spectra_from_potential: potential must cover [0,1]");
    TwoSpectra ts;
    ts.robin_h = robin_h;
    ts.lambda.resize(n_max);
    ts.mu.resize(n_max);
    parallel_for(n_max, [&](std::size_t i) {
        int n = static_cast<int>(i) + 1;
        ts.lambda[i] = eigenvalue_near(q01, n * M_PI, n, 0.0, false);
        double om_free = n * M_PI - std::atan2(n * M_PI, robin_h);
        ts.mu[i] = eigenvalue_near(q01, om_free, n, robin_h, true);
    });
    return ts;
}

CauchyData cauchy_from_spectra(const TwoSpectra& ts, std::size_t n_y) {
    std::size_t n = ts.lambda.size();
    if (n < 20) throw ConfigError("cauchy_from_spectra: need n_max >= 20");
    CauchyData cd;
    cd.h = 1.0 / static_cast<double>(n_y - 1);

    // c0 from the Dirichlet residuals; K(1,1) = (int q)/2
    double c0 = 0.0;
    {
        std::size_t m = n / 2;
        for (std::size_t i = n - m; i < n; ++i) {
            double npi = (static_cast<double>(i) + 1.0) * M_PI;
            c0 += ts.lambda[i] - npi * npi;
        }
        c0 /= static_cast<double>(m);
    }
    cd.K11 = 0.5 * c0;

    std::vector<double> W(n_y, cd.h);
    W.front() = W.back() = 0.5 * cd.h;

    // K(1,y) = K11 y + R(y):
    //   int_0^1 R(y) sin(w_n y) dy = -sin(w_n) - K11 (sin w_n - w_n cos w_n)/w_n^2
    {
        std::vector<double> A(n * n_y), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            double w = std::sqrt(ts.lambda[i]);
            for (std::size_t m = 0; m < n_y; ++m) {
                double y = cd.h * static_cast<double>(m);
                A[i * n_y + m] = std::sin(w * y) * W[m];
            }
            b[i] = -std::sin(w) - cd.K11 * (std::sin(w) - w * std::cos(w)) / (w * w);
        }
        double cond = 0.0;
        auto R = lstsq_tsvd(n, n_y, A, b, 1e-8, &cond);
        if (!std::isfinite(cond))
            throw SolverError(Err::BasisIllConditioned, "sine system unusable");
        cd.K1.resize(n_y);
        for (std::size_t m = 0; m < n_y; ++m)
            cd.K1[m] = cd.K11 * (cd.h * static_cast<double>(m)) + R[m];
        double rn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = -b[i];
            for (std::size_t m = 0; m < n_y; ++m) acc += A[i * n_y + m] * R[m];
            rn += acc * acc;
        }
        cd.fit_residual_lambda = std::sqrt(rn / static_cast<double>(n));
    }

    // K_x(1,y) = c_x y + R_x(y); the eigencondition is phi'(1) + h phi(1) = 0,
    // so the Robin term h phi(1) (computable from the fitted K(1,.)) moves
    // to the right-hand side alongside the K(1,1) part:
    //   int_0^1 K_x(1,y) sin(v_n y) dy
    //     = -v_n cos(v_n) - K11 sin(v_n) - h [sin(v_n) + int K(1,y) sin(v_n y) dy]
    {
        std::vector<double> A(n * (n_y + 1)), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            double v = std::sqrt(ts.mu[i]);
            double kphi = 0.0;
            for (std::size_t m = 0; m < n_y; ++m) {
                double y = cd.h * static_cast<double>(m);
                A[i * (n_y + 1) + m] = std::sin(v * y) * W[m];
                kphi += cd.K1[m] * std::sin(v * y) * W[m];
            }
            A[i * (n_y + 1) + n_y] = (std::sin(v) - v * std::cos(v)) / (v * v);
            b[i] = -v * std::cos(v) - cd.K11 * std::sin(v) -
                   ts.robin_h * (std::sin(v) + kphi);
        }
        double cond = 0.0;
        auto sol = lstsq_tsvd(n, n_y + 1, A, b, 1e-8, &cond);
        if (!std::isfinite(cond))
            throw SolverError(Err::BasisIllConditioned, "sine system unusable");
        double cx = sol[n_y];
        cd.K1x.resize(n_y);
        for (std::size_t m = 0; m < n_y; ++m)
            cd.K1x[m] = cx * (cd.h * static_cast<double>(m)) + sol[m];
        double rn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = -b[i];
            for (std::size_t m = 0; m <= n_y; ++m) acc += A[i * (n_y + 1) + m] * sol[m];
            rn += acc * acc;
        }
        cd.fit_residual_mu = std::sqrt(rn / static_cast<double>(n));
    }
    return cd;
}

double window_width(double R, double R_tilde) {
    return std::min(8.0 * (R_tilde - R) / (5.0 * R_tilde * R_tilde), 2.0 / (5.0 * R_tilde));
}

double UVector::norm() const {
    double nq = 0.0, nk = 0.0;
    for (double v : q) nq = std::max(nq, std::abs(v));
    std::size_t nx = geom.nx(), ny = geom.ny();
    for (std::size_t i = 0; i < nx; ++i) {
        double x = geom.x_of(i);
        for (std::size_t j = 0; j < ny; ++j) {
            if (std::abs(geom.y_of(j)) > x + 1e-12) continue;
            nk = std::max(nk, std::abs(K[i * ny + j]));
        }
    }
    return nq + nk;
}

UVector contraction_step(const UVector& U, const UVector& h_vec) {
    const WindowGeometry& g = U.geom;
    std::size_t nx = g.nx(), ny = g.ny();
    double h = g.h;
    UVector out;
    out.geom = g;
    out.q.assign(nx, 0.0);
    out.K.assign(nx * ny, 0.0);

    auto kat = [&](std::size_t i, std::size_t j) { return U.K[i * ny + j]; };
    auto jy = [&](double y) { return static_cast<std::size_t>(std::round((y + g.x1) / h)); };

    // composite Simpson weights over short lattice spans
    auto span_weights = [](std::size_t n_pts) {
        std::vector<double> w(n_pts, 0.0);
        if (n_pts < 2) return w;
        if (n_pts == 2) {
            w[0] = w[1] = 0.5;
            return w;
        }
        std::size_t m = n_pts - 1;
        std::size_t even_end = (m % 2 == 0) ? n_pts - 1 : n_pts - 4;
        for (std::size_t i = 0; i + 2 <= even_end; i += 2) {
            w[i] += 1.0 / 3.0;
            w[i + 1] += 4.0 / 3.0;
            w[i + 2] += 1.0 / 3.0;
        }
        if (m % 2 != 0) {
            if (n_pts >= 4) {
                w[n_pts - 4] += 3.0 / 8.0;
                w[n_pts - 3] += 9.0 / 8.0;
                w[n_pts - 2] += 9.0 / 8.0;
                w[n_pts - 1] += 3.0 / 8.0;
            } else {
                w[n_pts - 2] += 0.5;
                w[n_pts - 1] += 0.5;
            }
        }
        return w;
    };

    // q-component: -2 int_x^c q(s) K(s, 2x - s) ds
    for (std::size_t i = 0; i < nx; ++i) {
        double x = g.x_of(i);
        double acc = 0.0;
        std::size_t ns = nx - i;
        auto w = span_weights(ns);
        for (std::size_t m = 0; m < ns; ++m) {
            double s = g.x_of(i + m);
            double t = 2.0 * x - s;
            acc += w[m] * U.q[i + m] * kat(i + m, jy(t));
        }
        out.q[i] = -2.0 * acc * h + h_vec.q[i];
    }

    // K-component: (1/2) double integral over the leftward cone
    parallel_for(nx, [&](std::size_t i) {
        double x = g.x_of(i);
        std::size_t ns = nx - i;
        auto ws = span_weights(ns);
        std::vector<double> inner(ns, 0.0);
        for (std::size_t j = 0; j < ny; ++j) {
            double y = g.y_of(j);
            if (std::abs(y) > x + 1e-12) continue;
            double acc = 0.0;
            for (std::size_t m = 1; m < ns; ++m) {  // m = 0 has zero width
                std::size_t j0 = jy(y - (g.x_of(i + m) - x)), j1 = jy(y + (g.x_of(i + m) - x));
                auto wt = span_weights(j1 - j0 + 1);
                double in = 0.0;
                for (std::size_t jj = j0; jj <= j1; ++jj) in += wt[jj - j0] * kat(i + m, jj);
                acc += ws[m] * in * h * U.q[i + m];
            }
            out.K[i * ny + j] = 0.5 * acc * h + h_vec.K[i * ny + j];
        }
    });
    return out;
}

double fixed_point_residual(const UVector& U, const UVector& h_vec) {
    UVector W = contraction_step(U, h_vec);
    double worst = 0.0;
    std::size_t nx = U.geom.nx(), ny = U.geom.ny();
    for (std::size_t i = 0; i < nx; ++i) {
        worst = std::max(worst, std::abs(U.q[i] - W.q[i]));
        double x = U.geom.x_of(i);
        for (std::size_t j = 0; j < ny; ++j) {
            if (std::abs(U.geom.y_of(j)) > x + 1e-12) continue;
            worst = std::max(worst, std::abs(U.K[i * ny + j] - W.K[i * ny + j]));
        }
    }
    return worst;
}

namespace {

// boundary data on the right edge x = c: K(c, y), K_x(c, y) on y >= 0,
// odd in y; K_y is even
struct EdgeData {
    double c = 0.0, h = 0.0;
    std::vector<double> K, Kx, Ky, CKx;  // CKx = int_0^y Kx

    double odd_at(const std::vector<double>& v, double y) const {
        double s = y < 0.0 ? -1.0 : 1.0;
        return s * lerp_on(UniformGrid{0.0, h, v.size()}, v, std::abs(y));
    }
    double even_at(const std::vector<double>& v, double y) const {
        return lerp_on(UniformGrid{0.0, h, v.size()}, v, std::abs(y));
    }

    void finalize() {
        if (K.size() >= 5) {
            Ky = derivative_five_point(K, h);
        } else {
            Ky.assign(K.size(), 0.0);
            for (std::size_t i = 0; i < K.size(); ++i) {
                std::size_t lo = i > 0 ? i - 1 : 0;
                std::size_t hi = i + 1 < K.size() ? i + 1 : K.size() - 1;
                Ky[i] = (K[hi] - K[lo]) / (h * static_cast<double>(hi - lo));
            }
        }
        CKx = cumulative_integral(Kx, h);
    }
};

UVector build_h(const EdgeData& e, const WindowGeometry& g) {
    UVector hv;
    hv.geom = g;
    std::size_t nx = g.nx(), ny = g.ny();
    hv.q.assign(nx, 0.0);
    hv.K.assign(nx * ny, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
        double x = g.x_of(i);
        double t = 2.0 * x - e.c;
        hv.q[i] = 2.0 * (e.even_at(e.Ky, t) + e.odd_at(e.Kx, t));
        for (std::size_t j = 0; j < ny; ++j) {
            double y = g.y_of(j);
            if (std::abs(y) > x + 1e-12) continue;
            double tlo = y + x - e.c, thi = y - x + e.c;
            double part = 0.5 * (e.odd_at(e.K, thi) + e.odd_at(e.K, tlo));
            double integral = e.even_at(e.CKx, thi) - e.even_at(e.CKx, tlo);
            hv.K[i * ny + j] = part - 0.5 * integral;
        }
    }
    return hv;
}

}  // namespace

Reconstruction reconstruct(const CauchyData& cd, double R_tilde, double h_grid) {
    if (!(R_tilde > 0.0)) throw ConfigError("reconstruct: R_tilde must be positive");
    std::size_t n_out = static_cast<std::size_t>(std::round(1.0 / h_grid)) + 1;
    std::vector<double> q_out(n_out, 0.0);
    std::vector<char> filled(n_out, 0);

    EdgeData edge;
    edge.c = 1.0;
    edge.h = h_grid;
    {
        // resample the Cauchy data onto the working lattice
        UniformGrid gy{0.0, cd.h, cd.K1.size()};
        std::size_t m = static_cast<std::size_t>(std::round(1.0 / h_grid)) + 1;
        edge.K.resize(m);
        edge.Kx.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            double y = h_grid * static_cast<double>(i);
            edge.K[i] = lerp_on(gy, cd.K1, y);
            edge.Kx[i] = lerp_on(gy, cd.K1x, y);
        }
        edge.finalize();
    }

    Reconstruction rec;
    double c = 1.0;
    int guard = 0;
    while (c > 1e-9 && guard++ < 200) {
        // probe the data norm on the widest admissible window
        double mu_cap = 0.9 * 2.0 / (5.0 * R_tilde);  // R-independent part of the bound
        double x_probe = std::max(0.0, c - mu_cap);
        x_probe = h_grid * std::floor(x_probe / h_grid + 1e-9);
        WindowGeometry probe{x_probe, c, h_grid};
        UVector hv = build_h(edge, probe);
        double R = hv.norm();
        if (!(R < R_tilde))
            throw SolverError(Err::ContractionViolated,
                              "data norm " + std::to_string(R) + " >= R_tilde; raise R_tilde");
        double mu = 0.9 * window_width(R, R_tilde);
        double x0 = std::max(0.0, c - mu);
        x0 = h_grid * std::floor(x0 / h_grid + 1e-9);
        if (c - x0 < 2.0 * h_grid) x0 = std::max(0.0, c - 2.0 * h_grid);
        WindowGeometry geom{x0, c, h_grid};
        if (std::abs(x0 - probe.x0) > 1e-12) hv = build_h(edge, geom);

        UVector U = hv;
        double prev_diff = -1.0, ratio_max = 0.0;
        std::size_t it = 0;
        int noncontracting = 0;
        for (; it < 400; ++it) {
            UVector next = contraction_step(U, hv);
            double diff = 0.0;
            for (std::size_t i = 0; i < U.q.size(); ++i)
                diff = std::max(diff, std::abs(next.q[i] - U.q[i]));
            for (std::size_t i = 0; i < U.K.size(); ++i)
                diff = std::max(diff, std::abs(next.K[i] - U.K[i]));
            U = std::move(next);
            if (prev_diff > 0.0 && diff > 1e-13) {
                double ratio = diff / prev_diff;
                if (it > 2) ratio_max = std::max(ratio_max, ratio);
                noncontracting = ratio >= 1.0 ? noncontracting + 1 : 0;
                if (noncontracting >= 3 && diff > 1e-9 * (1.0 + U.norm()))
                    throw SolverError(Err::ContractionViolated,
                                      "window map not contracting; raise R_tilde");
            }
            prev_diff = diff;
            if (diff < 1e-11 * (1.0 + U.norm())) break;
        }

        WindowReport wr;
        wr.x0 = x0;
        wr.x1 = c;
        wr.R = R;
        wr.ratio_bound = (c - x0) * 2.5 * R_tilde;
        wr.ratio_measured = ratio_max;
        wr.iterations = it + 1;
        rec.windows.push_back(wr);

        // harvest q on this window
        for (std::size_t i = 0; i < geom.nx(); ++i) {
            double x = geom.x_of(i);
            std::size_t gi = static_cast<std::size_t>(std::round(x / h_grid));
            if (gi < n_out && !filled[gi]) {
                q_out[gi] = U.q[i];
                filled[gi] = 1;
            }
        }
        if (x0 <= 1e-9) break;

        // continuation data at the new edge
        EdgeData ne;
        ne.c = x0;
        ne.h = h_grid;
        std::size_t m_new = static_cast<std::size_t>(std::round(x0 / h_grid)) + 1;
        ne.K.resize(m_new);
        ne.Kx.resize(m_new);
        std::size_t ny = geom.ny();
        for (std::size_t j = 0; j < m_new; ++j) {
            double y = h_grid * static_cast<double>(j);
            std::size_t jj = static_cast<std::size_t>(std::round((y + geom.x1) / h_grid));
            double k0 = U.K[0 * ny + jj];
            double k1 = U.K[1 * ny + jj];
            double k2 = U.K[2 * ny + jj];
            ne.K[j] = k0;
            ne.Kx[j] = (-3.0 * k0 + 4.0 * k1 - k2) / (2.0 * h_grid);
        }
        ne.finalize();
        edge = std::move(ne);
        c = x0;
    }

    for (std::size_t i = n_out; i-- > 0;)
        if (!filled[i]) q_out[i] = i + 1 < n_out ? q_out[i + 1] : 0.0;
    rec.q = Potential(std::move(q_out), h_grid, 1.0);
    return rec;
}

}  // namespace mixed
}  // namespace iscat
