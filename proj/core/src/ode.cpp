#include "iscat/ode.hpp"

#include <algorithm>
#include <cmath>

#include "iscat/errors.hpp"
#include "iscat/parallel.hpp"

namespace iscat {
namespace ode {

namespace {

struct Env {
    cplx w, wp;
};

// One RK4 step of w'' + 2ik w' = q w on [x, x+step] (step may be negative).
// q is linear inside a grid cell, so the midpoint value is exact.
inline Env rk4_env(const Potential& q, cplx two_ik, double x, double step, Env y) {
    auto rhs = [&](double xx, const Env& s) {
        return Env{s.wp, q(xx) * s.w - two_ik * s.wp};
    };
    Env k1 = rhs(x, y);
    Env k2 = rhs(x + 0.5 * step, {y.w + 0.5 * step * k1.w, y.wp + 0.5 * step * k1.wp});
    Env k3 = rhs(x + 0.5 * step, {y.w + 0.5 * step * k2.w, y.wp + 0.5 * step * k2.wp});
    Env k4 = rhs(x + step, {y.w + step * k3.w, y.wp + step * k3.wp});
    y.w += step / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
    y.wp += step / 6.0 * (k1.wp + 2.0 * k2.wp + 2.0 * k3.wp + k4.wp);
    return y;
}

// Substeps per cell: the fast factor e^{-2ikx} must stay inside the RK4
// stability region and the forced response must be resolved accurately;
// the envelope scale sqrt(|q|) matters at small k.
inline int substeps(const Potential& q, cplx k, double h) {
    double speed = std::abs(k) * h;
    int m = static_cast<int>(std::ceil(speed / 0.03));
    double env = std::sqrt(q.sup_abs() + 1.0) * h;
    m = std::max(m, static_cast<int>(std::ceil(env / 0.25)));
    return std::max(m, 1);
}

// Envelope at every grid node, marching backward from the support edge.
std::vector<Env> march_envelope(const Potential& q, cplx k, int extra_sub = 1) {
    const auto& g = q.grid();
    double h = q.step();
    cplx two_ik = 2.0 * cplx(0.0, 1.0) * k;
    std::size_t n = g.n;
    std::vector<Env> w(n);
    // cells fully beyond the sampled support are exactly free
    double edge = q.support_edge();
    std::size_t i_edge = n - 1;
    while (i_edge > 0 && g[i_edge - 1] >= edge) --i_edge;
    for (std::size_t i = i_edge; i < n; ++i) w[i] = {1.0, 0.0};
    int m = substeps(q, k, h) * extra_sub;
    double sub = -h / m;
    for (std::size_t i = i_edge; i-- > 0;) {
        Env y = w[i + 1];
        double x = g[i + 1];
        for (int s = 0; s < m; ++s) {
            y = rk4_env(q, two_ik, x, sub, y);
            x += sub;
        }
        w[i] = y;
    }
    return w;
}

Env envelope_at_origin(const Potential& q, cplx k, int extra_sub = 1) {
    const auto& g = q.grid();
    double h = q.step();
    cplx two_ik = 2.0 * cplx(0.0, 1.0) * k;
    std::size_t n = g.n;
    double edge = q.support_edge();
    std::size_t i_edge = n - 1;
    while (i_edge > 0 && g[i_edge - 1] >= edge) --i_edge;
    Env y{1.0, 0.0};
    int m = substeps(q, k, h) * extra_sub;
    double sub = -h / m;
    for (std::size_t i = i_edge; i-- > 0;) {
        double x = g[i + 1];
        for (int s = 0; s < m; ++s) {
            y = rk4_env(q, two_ik, x, sub, y);
            x += sub;
        }
    }
    return y;
}

}  // namespace

JostPoint jost_point(const Potential& q, cplx k) {
    Env y = envelope_at_origin(q, k);
    return {y.w, cplx(0.0, 1.0) * k * y.w + y.wp};
}

JostProfile jost_profile(const Potential& q, cplx k) {
    auto env = march_envelope(q, k);
    const auto& g = q.grid();
    JostProfile p;
    p.f.resize(g.n);
    p.fp.resize(g.n);
    cplx ik(0.0, 1.0);
    ik *= k;
    for (std::size_t i = 0; i < g.n; ++i) {
        cplx osc = std::exp(ik * g[i]);
        p.f[i] = osc * env[i].w;
        p.fp[i] = osc * (ik * env[i].w + env[i].wp);
    }
    return p;
}

JostTable solve_jost(const Potential& q, const std::vector<double>& k_grid,
                     const JostOptions& opt) {
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        if (k_grid[i] <= 0.0) throw ConfigError("solve_jost: k grid must be positive");
        if (i > 0 && k_grid[i] <= k_grid[i - 1])
            throw ConfigError("solve_jost: k grid must be sorted");
    }
    JostTable t;
    t.k_grid = k_grid;
    t.f0.resize(k_grid.size());
    t.fp0.resize(k_grid.size());
    if (opt.profiles) {
        t.x_grid = q.grid().points();
        t.f_xk.resize(k_grid.size() * t.x_grid.size());
    }
    parallel_for(k_grid.size(), [&](std::size_t i) {
        cplx k(k_grid[i], 0.0);
        if (opt.profiles) {
            auto p = jost_profile(q, k);
            t.f0[i] = p.f[0];
            t.fp0[i] = p.fp[0];
            std::copy(p.f.begin(), p.f.end(), t.f_xk.begin() + i * t.x_grid.size());
        } else {
            auto jp = jost_point(q, k);
            t.f0[i] = jp.f;
            t.fp0[i] = jp.fp0;
        }
    });
    if (opt.check_resolution && !k_grid.empty()) {
        std::size_t mid = k_grid.size() / 2;
        for (std::size_t i : {std::size_t(0), mid, k_grid.size() - 1}) {
            cplx k(k_grid[i], 0.0);
            Env c = envelope_at_origin(q, k, 1);
            Env fine = envelope_at_origin(q, k, 2);
            double err = std::abs(c.w - fine.w) / (std::abs(fine.w) + 1e-300);
            if (err > opt.resolution_budget)
                throw SolverError(Err::GridTooCoarse,
                                  "jost envelope error " + std::to_string(err) + " at k=" +
                                      std::to_string(k_grid[i]));
        }
    }
    return t;
}

RegularPair solve_regular(const Potential& q, cplx k) {
    const auto& g = q.grid();
    double h = q.step();
    RegularPair r;
    r.k = k;
    r.x_grid = g.points();
    std::size_t n = g.n;
    r.phi.resize(n);
    r.phi_p.resize(n);
    r.psi.resize(n);
    r.psi_p.resize(n);

    bool oscillatory = k.imag() == 0.0 && std::abs(k) * h > 0.15;
    if (oscillatory) {
        // phi = Im(conj(f(k)) f(x,k)) / k,  psi = -Im(conj(f'(0,k)) f(x,k)) / k
        auto p = jost_profile(q, k);
        double kr = k.real();
        cplx f0c = std::conj(p.f[0]);
        cplx fp0c = std::conj(p.fp[0]);
        for (std::size_t i = 0; i < n; ++i) {
            r.phi[i] = std::imag(f0c * p.f[i]) / kr;
            r.phi_p[i] = std::imag(f0c * p.fp[i]) / kr;
            r.psi[i] = -std::imag(fp0c * p.f[i]) / kr;
            r.psi_p[i] = -std::imag(fp0c * p.fp[i]) / kr;
        }
        return r;
    }
    if (std::abs(k) * h > 0.3)
        throw SolverError(Err::GridTooCoarse, "solve_regular: |k| h too large for direct march");

    // direct march of u'' = (q - k^2) u for both initial conditions
    cplx k2 = k * k;
    struct S {
        cplx u, up;
    };
    auto rhs = [&](double x, const S& s) { return S{s.up, (q(x) - k2) * s.u}; };
    auto step_rk4 = [&](double x, double dt, S y) {
        S k1 = rhs(x, y);
        S k2s = rhs(x + 0.5 * dt, {y.u + 0.5 * dt * k1.u, y.up + 0.5 * dt * k1.up});
        S k3 = rhs(x + 0.5 * dt, {y.u + 0.5 * dt * k2s.u, y.up + 0.5 * dt * k2s.up});
        S k4 = rhs(x + dt, {y.u + dt * k3.u, y.up + dt * k3.up});
        y.u += dt / 6.0 * (k1.u + 2.0 * k2s.u + 2.0 * k3.u + k4.u);
        y.up += dt / 6.0 * (k1.up + 2.0 * k2s.up + 2.0 * k3.up + k4.up);
        return y;
    };
    int m = std::max(1, static_cast<int>(std::ceil(std::sqrt(q.sup_abs() + 1.0) * h / 0.2)));
    m = std::max(m, static_cast<int>(std::ceil(std::abs(k) * h / 0.03)));
    S phi{0.0, 1.0}, psi{1.0, 0.0};
    r.phi[0] = 0.0;
    r.phi_p[0] = 1.0;
    r.psi[0] = 1.0;
    r.psi_p[0] = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double x = g[i];
        double dt = h / m;
        for (int s = 0; s < m; ++s) {
            phi = step_rk4(x, dt, phi);
            psi = step_rk4(x, dt, psi);
            x += dt;
        }
        r.phi[i + 1] = phi.u;
        r.phi_p[i + 1] = phi.up;
        r.psi[i + 1] = psi.u;
        r.psi_p[i + 1] = psi.up;
    }
    return r;
}

BoundStates bound_states(const Potential& q, const BoundStateOptions& opt) {
    BoundStates out;
    double kmax = opt.kappa_max > 0.0 ? opt.kappa_max : 1.0 + std::sqrt(q.sup_abs());
    out.kappa_max = kmax;

    auto f_imag_axis = [&](double kappa) { return jost_point(q, cplx(0.0, kappa)).f.real(); };

    // all zeros sit below sqrt(sup q_-); past kappa_max the function must
    // stay positive and drift toward its asymptote 1
    double settle1 = f_imag_axis(kmax), settle2 = f_imag_axis(2.0 * kmax),
           settle4 = f_imag_axis(4.0 * kmax);
    if (!(settle1 > 0.0) || !(settle2 > 0.0) || std::abs(settle4 - 1.0) > 0.5)
        throw SolverError(Err::KappaMaxTooSmall,
                          "f(i kappa) = " + std::to_string(settle1) + ", " +
                              std::to_string(settle4) + " past the scan edge");

    std::size_t ns = std::max<std::size_t>(opt.scan_points, 16);
    double klo = kmax / static_cast<double>(ns) * 1e-3;
    std::vector<double> kappas = linspace(klo, kmax, ns);
    double fprev = f_imag_axis(kappas[0]);
    for (std::size_t i = 1; i < ns; ++i) {
        double fcur = f_imag_axis(kappas[i]);
        if (fprev == 0.0) out.kj.push_back(kappas[i - 1]);
        if (fprev * fcur < 0.0) {
            double lo = kappas[i - 1], hi = kappas[i], flo = fprev;
            while (hi - lo > opt.bisect_tol) {
                double midp = 0.5 * (lo + hi);
                double fm = f_imag_axis(midp);
                if (flo * fm <= 0.0)
                    hi = midp;
                else {
                    lo = midp;
                    flo = fm;
                }
            }
            out.kj.push_back(0.5 * (lo + hi));
        }
        fprev = fcur;
    }
    std::sort(out.kj.begin(), out.kj.end());

    // zero-energy resonance: |f(k_min)| below the local slope scale
    double kmin = 1e-3;
    cplx f1 = jost_point(q, cplx(kmin, 0.0)).f;
    cplx f2 = jost_point(q, cplx(2.0 * kmin, 0.0)).f;
    double fdot = std::abs(f2 - f1) / kmin;
    out.resonance = std::abs(f1) < 10.0 * kmin * fdot;
    return out;
}

double wronskian_defect(const JostTable& t) {
    double worst = 0.0;
    for (std::size_t i = 0; i < t.k_grid.size(); ++i) {
        double k = t.k_grid[i];
        cplx fm = std::conj(t.f0[i]);
        cplx fpm = std::conj(t.fp0[i]);
        cplx wr = t.fp0[i] * fm - fpm * t.f0[i] - cplx(0.0, 2.0 * k);
        worst = std::max(worst, std::abs(wr) / (2.0 * k));
    }
    return worst;
}

}  // namespace ode
}  // namespace iscat
