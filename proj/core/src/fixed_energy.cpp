#include "iscat/fixed_energy.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "iscat/errors.hpp"
#include "iscat/linalg.hpp"
#include "iscat/parallel.hpp"
#include "iscat/quadrature.hpp"

namespace iscat {
namespace fe {

RiccatiBesselRow riccati_bessel_row(unsigned l_max, double r) {
    if (!(r > 0.0)) throw ConfigError("riccati_bessel: r must be positive");
    unsigned n = l_max + 1;
    RiccatiBesselRow row;
    row.u.assign(n, 0.0);
    row.up.assign(n, 0.0);
    row.v.assign(n, 0.0);
    row.vp.assign(n, 0.0);

    // v upward (stable direction)
    row.v[0] = -std::cos(r);
    double v1 = -std::cos(r) / r - std::sin(r);
    if (n > 1) row.v[1] = v1;
    for (unsigned l = 2; l < n; ++l) {
        row.v[l] = (2.0 * l - 1.0) / r * row.v[l - 1] - row.v[l - 2];
        if (!std::isfinite(row.v[l]))
            throw SolverError(Err::OrderOverflow, "v_l overflow at l = " + std::to_string(l));
    }
    row.vp[0] = std::sin(r);
    for (unsigned l = 1; l < n; ++l) row.vp[l] = row.v[l - 1] - static_cast<double>(l) / r * row.v[l];

    // u downward from a padded start (Miller), normalised through
    // u_0 v_1 - u_1 v_0 = -1
    unsigned start = l_max + 16 + static_cast<unsigned>(r);
    std::vector<double> tmp(l_max + 2, 0.0);
    double above = 0.0, cur = 1e-280;
    for (unsigned l = start; l-- > 0;) {
        double below = (2.0 * l + 3.0) / r * cur - above;
        above = cur;
        cur = below;
        if (std::abs(cur) > 1e260) {
            double s = 1e-260;
            cur *= s;
            above *= s;
            for (auto& t : tmp) t *= s;
        }
        if (l < tmp.size()) tmp[l] = cur;
    }
    double u1 = tmp.size() > 1 ? tmp[1] : 0.0;
    double cross = tmp[0] * v1 - u1 * row.v[0];
    if (cross == 0.0 || !std::isfinite(cross))
        throw SolverError(Err::OrderOverflow, "downward recurrence lost normalisation");
    double scale = -1.0 / cross;
    for (unsigned l = 0; l < n; ++l) row.u[l] = tmp[l] * scale;
    row.up[0] = std::cos(r);
    for (unsigned l = 1; l < n; ++l) row.up[l] = row.u[l - 1] - static_cast<double>(l) / r * row.u[l];
    return row;
}

RiccatiBessel riccati_bessel(unsigned l, double r) {
    auto row = riccati_bessel_row(l, r);
    if (l > 0 && row.u[l] == 0.0)
        throw SolverError(Err::OrderOverflow, "u_l underflow at l = " + std::to_string(l));
    return {row.u[l], row.up[l], row.v[l], row.vp[l]};
}

double poisson_weight(unsigned l) {
    // sqrt(2/pi) Gamma(1/2) 2^{l+1/2} Gamma(l+1) = 2^{l+1} l!
    double lg = (l + 1.0) * std::log(2.0) + std::lgamma(l + 1.0);
    return std::exp(lg);
}

PartialWaveSet phase_shifts(const Potential& q, unsigned L_max) {
    double a = q.support();
    if (!(a > 0.0)) throw ConfigError("phase_shifts: potential support must be positive");
    PartialWaveSet pw;
    pw.a = a;
    pw.L_max = L_max;
    pw.delta.assign(L_max + 1, 0.0);
    pw.psi_at_a.assign(L_max + 1, cplx(0.0, 0.0));

    double h = q.step();
    parallel_for(L_max + 1, [&](std::size_t lz) {
        unsigned l = static_cast<unsigned>(lz);
        double ll1 = static_cast<double>(l) * (l + 1.0);

        // start just off the origin on the regular branch psi ~ r^{l+1}
        double r0 = std::min(0.05, 0.2 * a);
        double c1 = (q(r0) - 1.0) / (4.0 * l + 6.0);
        double psi = 1.0, psip = (l + 1.0) / r0 + 2.0 * c1 * r0 / (1.0 + c1 * r0 * r0);
        int nodes = 0;
        double r = r0;
        auto rhs = [&](double rr, double u, double up, double& du, double& dup) {
            du = up;
            dup = (ll1 / (rr * rr) + q(rr) - 1.0) * u;
        };
        while (r < a - 1e-12) {
            double step = std::min({h, 0.2 * r / (l + 1.0), a - r});
            double k1u, k1p, k2u, k2p, k3u, k3p, k4u, k4p;
            rhs(r, psi, psip, k1u, k1p);
            rhs(r + 0.5 * step, psi + 0.5 * step * k1u, psip + 0.5 * step * k1p, k2u, k2p);
            rhs(r + 0.5 * step, psi + 0.5 * step * k2u, psip + 0.5 * step * k2p, k3u, k3p);
            rhs(r + step, psi + step * k3u, psip + step * k3p, k4u, k4p);
            double npsi = psi + step / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            double npsip = psip + step / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            if (npsi * psi < 0.0) ++nodes;
            psi = npsi;
            psip = npsip;
            r += step;
            if (std::abs(psi) > 1e200) {
                psi *= 1e-200;
                psip *= 1e-200;
            }
        }

        auto rb = riccati_bessel_row(l, a);
        double alpha = psi * rb.vp[l] - psip * rb.v[l];
        double beta = psip * rb.u[l] - psi * rb.up[l];
        double norm = std::hypot(alpha, beta);
        if (norm < 1e-280)
            throw SolverError(Err::MatchingSingular, "free-solution match degenerate at l = " +
                                                         std::to_string(l));
        double dprin = std::atan2(-beta, alpha);
        // fold to (-pi/2, pi/2]
        dprin -= M_PI * std::round(dprin / M_PI);

        // winding from node counts: interior zeros of psi vs of u_l
        int nodes_free = 0;
        {
            double prev = 0.0;
            bool first = true;
            for (double rr = r0; rr < a - 1e-12; rr += h) {
                double u = riccati_bessel_row(l, rr).u[l];
                if (!first && prev * u < 0.0) ++nodes_free;
                prev = u;
                first = false;
            }
        }
        double delta = dprin + M_PI * static_cast<double>(nodes - nodes_free);

        // deep quasi-classical orders: the matched value drowns in
        // cancellation, but the first-order integral is exact enough there
        if (std::abs(delta) < 1e-8) {
            const auto& s = q.samples();
            std::vector<double> integ(s.size(), 0.0);
            for (std::size_t i = 1; i < s.size(); ++i) {
                double rr = q.grid()[i];
                if (rr > a + 1e-12) break;
                double u = riccati_bessel_row(l, rr).u[l];
                integ[i] = s[i] * u * u;
            }
            delta = -simpson(integ, h);
        }
        pw.delta[l] = delta;
        cplx e(std::cos(delta), std::sin(delta));
        pw.psi_at_a[l] = e * (std::cos(delta) * rb.u[l] - std::sin(delta) * rb.v[l]);
    });
    return pw;
}

MomentInversion moment_inversion(const PartialWaveSet& pw, double a, double reg, std::size_t n_r) {
    MomentInversion out;
    std::size_t L = pw.delta.size();
    out.r_grid = linspace(a / static_cast<double>(n_r), a, n_r);
    double hr = out.r_grid[1] - out.r_grid[0];

    // trapezoid weights on the open grid
    std::vector<double> W(n_r, hr);
    W.back() = 0.5 * hr;

    std::vector<double> A(L * n_r), b(L);
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t m = 0; m < n_r; ++m) {
            double u = riccati_bessel_row(static_cast<unsigned>(l), out.r_grid[m]).u[l];
            A[l * n_r + m] = u * u * W[m];
        }
        b[l] = -0.5 * std::sin(2.0 * pw.delta[l]);
    }

    // gradient-penalty ridge: constants lie in the null space of the
    // penalty, so a plateau is reconstructible even though span{u_l^2}
    // alone misses it by ~40% in L2
    auto solve_with = [&](double lam) {
        Eigen::MatrixXd Am(L, n_r);
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t m = 0; m < n_r; ++m) Am(l, m) = A[l * n_r + m];
        Eigen::VectorXd bv = Eigen::Map<const Eigen::VectorXd>(b.data(), L);
        Eigen::MatrixXd N = Am.transpose() * Am;
        for (std::size_t m = 0; m + 1 < n_r; ++m) {
            N(m, m) += lam * lam;
            N(m + 1, m + 1) += lam * lam;
            N(m, m + 1) -= lam * lam;
            N(m + 1, m) -= lam * lam;
        }
        N.diagonal().array() += 1e-14;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(N);
        double lo = es.eigenvalues()(0), hi = es.eigenvalues()(n_r - 1);
        out.condition = lo > 0.0 ? std::sqrt(hi / lo) : 0.0;
        Eigen::VectorXd x = N.ldlt().solve(Am.transpose() * bv);
        return std::vector<double>(x.data(), x.data() + n_r);
    };
    if (reg > 0.0) {
        out.q = solve_with(reg);
        out.reg_used = reg;
    } else {
        // L-curve corner over a small logarithmic scan
        double best_lam = 1e-6, best_score = -1e300;
        std::vector<double> lams;
        for (int i = 0; i < 8; ++i) lams.push_back(std::pow(10.0, -9.0 + 1.0 * i));
        std::vector<double> rn(lams.size()), xn(lams.size());
        for (std::size_t i = 0; i < lams.size(); ++i) {
            auto x = solve_with(lams[i]);
            double rsq = 0.0;
            for (std::size_t l = 0; l < L; ++l) {
                double acc = -b[l];
                for (std::size_t m = 0; m < n_r; ++m) acc += A[l * n_r + m] * x[m];
                rsq += acc * acc;
            }
            double xsq = 0.0;
            for (double v : x) xsq += v * v;
            rn[i] = 0.5 * std::log(rsq + 1e-300);
            xn[i] = 0.5 * std::log(xsq + 1e-300);
        }
        for (std::size_t i = 1; i + 1 < lams.size(); ++i) {
            double curv = (rn[i + 1] - 2 * rn[i] + rn[i - 1]) + (xn[i + 1] - 2 * xn[i] + xn[i - 1]);
            if (curv > best_score) {
                best_score = curv;
                best_lam = lams[i];
            }
        }
        out.q = solve_with(best_lam);
        out.reg_used = best_lam;
    }
    out.ill_posed_warning = out.condition > 1e8;
    return out;
}

double ns_coupling(unsigned l, unsigned lp) {
    unsigned d = l > lp ? l - lp : lp - l;
    if (d % 2 == 0) return 0.0;
    double lph = lp + 0.5, lh = l + 0.5;
    return 1.0 / (lph * lph - lh * lh);
}

NSState newton_sabatier(const PartialWaveSet& pw, const std::vector<double>& r_grid) {
    NSState st;
    st.r_grid = r_grid;
    unsigned L = pw.L_max;
    std::vector<double> t(L + 1);
    for (unsigned l = 0; l <= L; ++l) {
        t[l] = std::tan(pw.delta[l]);
        if (!std::isfinite(t[l]) || std::abs(t[l]) > 1e6)
            throw ConfigError("newton_sabatier: tan(delta) blows up at l = " + std::to_string(l));
    }
    auto Mll = ns_coupling;
    auto solve_order = [&](unsigned Lo) {
        Eigen::MatrixXd B(Lo + 1, Lo + 1);
        Eigen::VectorXd rhs(Lo + 1);
        for (unsigned l = 0; l <= Lo; ++l) {
            rhs(l) = t[l];
            for (unsigned lp = 0; lp <= Lo; ++lp)
                B(l, lp) = Mll(l, lp) * (1.0 + t[l] * t[lp]);
        }
        Eigen::VectorXd x = B.fullPivLu().solve(rhs);
        return std::vector<double>(x.data(), x.data() + Lo + 1);
    };
    auto a_full = solve_order(L);
    if (L >= 4) {
        auto a_half = solve_order(L / 2);
        double worst = 0.0;
        for (unsigned l = 0; l <= L / 2; ++l)
            worst = std::max(worst, std::abs(a_half[l] - a_full[l]));
        st.truncation_converged = worst < 1e-6;
    }
    st.a_coeffs = a_full;

    st.c_coeffs.assign(L + 1, 0.0);
    bool all_zero = true;
    for (unsigned l = 0; l <= L; ++l) {
        double al = a_full[l];
        double t2 = 1.0 + t[l] * t[l];
        double bracket = 1.0 - M_PI * al * t2 / (4.0 * l + 2.0);
        for (unsigned lp = 0; lp <= L; ++lp) bracket -= Mll(l, lp) * a_full[lp] * (t[lp] - t[l]);
        st.c_coeffs[l] = al * t2 / bracket;
        if (st.c_coeffs[l] != 0.0) all_zero = false;
        st.c_growth += std::abs(st.c_coeffs[l]) / ((l + 1.0) * (l + 1.0));
    }

    std::size_t nr = r_grid.size();
    st.K_diag.assign(nr, 0.0);
    st.q_rec.assign(nr, 0.0);
    st.sigma_min.assign(nr, 0.0);
    if (all_zero) {
        for (std::size_t i = 0; i < nr; ++i) st.sigma_min[i] = 1.0;
        return st;
    }

    // kernel sum f(t,s) = sum c_l u_l(t) u_l(s); rows cached per argument
    auto urow = [&](double x) { return riccati_bessel_row(L, x).u; };
    const std::size_t ntau = 65;
    std::vector<double> tau = linspace(0.0, 1.0, ntau);
    std::vector<std::pair<double, double>> breakdowns;

    std::vector<double> kdiag(nr, 0.0), smin(nr, 0.0);
    std::vector<char> broke(nr, 0);
    parallel_for(nr, [&](std::size_t ir) {
        double r = r_grid[ir];
        std::vector<std::vector<double>> u_at(ntau);
        for (std::size_t i = 0; i < ntau; ++i)
            u_at[i] = tau[i] > 0.0 ? urow(r * tau[i]) : std::vector<double>(L + 1, 0.0);
        auto u_r = urow(r);
        // f(r tau, r sigma) / (r tau sigma), with the tau -> 0 limit
        auto kernel = [&](std::size_t is, std::size_t it) {
            double sg = tau[is], tu = tau[it];
            if (tu == 0.0 && sg == 0.0) return st.c_coeffs[0] * r;
            if (tu == 0.0) return st.c_coeffs[0] * u_at[is][0] / sg;
            if (sg == 0.0) return st.c_coeffs[0] * u_at[it][0] / tu;
            double f = 0.0;
            for (unsigned l = 0; l <= L; ++l) f += st.c_coeffs[l] * u_at[it][l] * u_at[is][l];
            return f / (r * tu * sg);
        };
        auto gfun = [&](std::size_t is) {
            double sg = tau[is];
            if (sg == 0.0) return r * st.c_coeffs[0] * u_r[0];  // sigma -> 0 limit
            double f = 0.0;
            for (unsigned l = 0; l <= L; ++l) f += st.c_coeffs[l] * u_r[l] * u_at[is][l];
            return f / sg;
        };
        double htau = tau[1] - tau[0];
        Eigen::MatrixXd M(ntau, ntau);
        Eigen::VectorXd rhs(ntau);
        for (std::size_t is = 0; is < ntau; ++is) {
            rhs(is) = gfun(is);
            for (std::size_t it = 0; it < ntau; ++it) {
                double w = (it == 0 || it + 1 == ntau) ? 0.5 * htau : htau;
                M(is, it) = (is == it ? 1.0 : 0.0) + w * kernel(is, it);
            }
        }
        Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        smin[ir] = sv(sv.size() - 1);
        if (smin[ir] < 1e-10 * sv(0)) {
            broke[ir] = 1;
            return;
        }
        Eigen::VectorXd b = svd.solve(rhs);
        kdiag[ir] = b(ntau - 1);  // K(r,r) = b(tau = 1)
    });
    st.K_diag = kdiag;
    st.sigma_min = smin;
    for (std::size_t i = 0; i < nr; ++i)
        if (broke[i]) st.breakdown_r.push_back(r_grid[i]);
    // fill broken radii by neighbour interpolation before differentiating
    for (std::size_t i = 0; i < nr; ++i) {
        if (!broke[i]) continue;
        std::size_t lo = i, hi = i;
        while (lo > 0 && broke[lo]) --lo;
        while (hi + 1 < nr && broke[hi]) ++hi;
        st.K_diag[i] = 0.5 * (st.K_diag[lo] + st.K_diag[hi]);
    }

    // q(r) = -(2/r) d/dr [ K(r,r)/r ]
    std::vector<double> phi(nr);
    for (std::size_t i = 0; i < nr; ++i) phi[i] = st.K_diag[i] / r_grid[i];
    auto dphi = derivative_five_point(phi, r_grid[1] - r_grid[0]);
    for (std::size_t i = 0; i < nr; ++i) st.q_rec[i] = -2.0 / r_grid[i] * dphi[i];
    return st;
}

DecayEstimate decay_rate_estimate(const PartialWaveSet& pw) {
    DecayEstimate out;
    std::vector<double> ls, ds;
    for (unsigned l = 2; l <= pw.L_max; ++l) {
        double ad = std::abs(pw.delta[l]);
        if (ad == 0.0) continue;
        if (ad < 1e-270) {
            out.underflow_tail = true;
            break;
        }
        double d = (2.0 * l / M_E) * std::pow(ad, 1.0 / (2.0 * l));
        ls.push_back(static_cast<double>(l));
        ds.push_back(d);
    }
    if (ls.size() < 4)
        throw SolverError(Err::OrderOverflow, "too few resolvable phase shifts for a decay fit");
    // trailing window, model d = a + b ln(l)/l + c/l
    std::size_t m = std::min<std::size_t>(12, ls.size());
    std::size_t off = ls.size() - m;
    std::vector<double> A(m * 3), b(m);
    for (std::size_t i = 0; i < m; ++i) {
        double l = ls[off + i];
        A[i * 3 + 0] = 1.0;
        A[i * 3 + 1] = std::log(l) / l;
        A[i * 3 + 2] = 1.0 / l;
        b[i] = ds[off + i];
    }
    auto coef = lstsq_tsvd(m, 3, A, b, 1e-12);
    out.a_hat = coef[0];
    out.l_lo = static_cast<unsigned>(ls[off]);
    out.l_hi = static_cast<unsigned>(ls.back());
    return out;
}

}  // namespace fe
}  // namespace iscat
