#include "iscat/ifunction.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "iscat/errors.hpp"
#include "iscat/ode.hpp"
#include "iscat/parallel.hpp"
#include "iscat/quadrature.hpp"
#include "iscat/special.hpp"

namespace iscat {
namespace ifn {

namespace {

void require_uniform(const std::vector<double>& kg) {
    if (kg.size() < 16) throw ConfigError("I-function grid too short");
    double dk = kg[1] - kg[0];
    if (std::abs(kg[0] - dk) > 1e-9 * dk)
        throw ConfigError("I-function grid must start at its step");
    for (std::size_t i = 1; i < kg.size(); ++i)
        if (std::abs(kg[i] - kg[i - 1] - dk) > 1e-9 * dk)
            throw ConfigError("I-function grid must be uniform");
}

double fdot_imag_axis(const Potential& q, double kappa) {
    double h = 1e-4 * kappa;
    auto fr = [&](double kk) { return ode::jost_point(q, cplx(0.0, kk)).f.real(); };
    return (-fr(kappa + 2 * h) + 8.0 * fr(kappa + h) - 8.0 * fr(kappa - h) + fr(kappa - 2 * h)) /
           (12.0 * h);
}

}  // namespace

IFunctionData I_from_potential(const Potential& q, const std::vector<double>& k_grid) {
    require_uniform(k_grid);
    IFunctionData out;
    out.k_grid = k_grid;
    auto table = ode::solve_jost(q, k_grid);
    out.I.resize(k_grid.size());
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        double af = std::abs(table.f0[i]);
        if (af < 1e-10 * (1.0 + std::abs(table.fp0[i])))
            throw SolverError(Err::PoleOnGrid,
                              "f(k) ~ 0 at real k = " + std::to_string(k_grid[i]));
        out.I[i] = table.fp0[i] / table.f0[i];
    }
    auto bs = ode::bound_states(q);
    for (double kj : bs.kj) {
        double g = fdot_imag_axis(q, kj);
        double fp0 = ode::jost_point(q, cplx(0.0, kj)).fp0.real();
        out.poles.emplace_back(kj, fp0 / g);  // r_j = c_j / (2 k_j)
    }
    if (bs.resonance) {
        // r0 = -1/fdot(0)^2 with fdot(0) = i * lim Im f(k)/k
        auto im_over_k = [&](double k) {
            return ode::jost_point(q, cplx(k, 0.0)).f.imag() / k;
        };
        double d1 = im_over_k(1e-3), d2 = im_over_k(2e-3);
        double d0 = (4.0 * d1 - d2) / 3.0;
        out.r0 = 1.0 / (d0 * d0);
    }
    return out;
}

PoleExtraction poles_from_I(const std::vector<double>& k_grid, const std::vector<cplx>& I) {
    require_uniform(k_grid);
    double dk = k_grid[0];
    std::size_t n = k_grid.size();

    // resonance strength from k Im(I - ik) as k -> 0
    auto p_of = [&](std::size_t i) { return I[i] - cplx(0.0, k_grid[i]); };
    double e0 = k_grid[0] * p_of(0).imag();
    double e1 = k_grid[1] * p_of(1).imag();
    double r0_raw = (4.0 * e0 - e1) / 3.0;
    double iscale = 0.0;
    for (std::size_t i = 0; i < n / 4; ++i) iscale = std::max(iscale, std::abs(p_of(i)));
    if (std::abs(r0_raw) < 1e-6 * (1.0 + iscale)) r0_raw = 0.0;

    // regular part of I - ik (resonance pole removed), k = 0 extrapolated
    std::vector<cplx> p(n + 1);
    for (std::size_t i = 0; i < n; ++i) p[i + 1] = p_of(i) - cplx(0.0, r0_raw / k_grid[i]);
    p[0] = 3.0 * p[1] - 3.0 * p[2] + p[3];
    TailFit tail = fit_tail(p, 0.0, dk, 0.3);

    // geometric t-grid on [-T, -t_min]; the transform of the removed pole
    // term is the constant -r0_raw/2 on t < 0
    const double T = 40.0, t_min = 0.01;
    const std::size_t nt = 220;
    std::vector<double> ts(nt), gv(nt);
    double ratio = std::pow(T / t_min, 1.0 / static_cast<double>(nt - 1));
    for (std::size_t i = 0; i < nt; ++i)
        ts[i] = -T * std::pow(ratio, -static_cast<double>(i));
    parallel_for(nt, [&](std::size_t i) {
        gv[i] = fourier_symmetric(p, dk, tail, -ts[i]) - 0.5 * r0_raw;
    });

    double gmax = 0.0;
    for (double v : gv) gmax = std::max(gmax, std::abs(v));

    // constant term and quadrature noise floor from the most negative
    // decade, where every exponential is dead
    double r0_fit, noise;
    {
        std::size_t m = nt / 8;
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += gv[i];
        double far_mean = acc / static_cast<double>(m);
        double dev = 0.0;
        for (std::size_t i = 0; i < m; ++i) dev += (gv[i] - far_mean) * (gv[i] - far_mean);
        noise = std::sqrt(dev / static_cast<double>(m));
        r0_fit = -2.0 * far_mean;
        if (std::abs(r0_fit) < std::max(1e-5 * (1.0 + iscale), 10.0 * noise)) r0_fit = 0.0;
    }
    const double floor = std::max(noise, 1e-10 * (1.0 + iscale));

    // sequential peeling: at the far end the smallest k_j dominates
    std::vector<std::pair<double, double>> poles;
    std::vector<double> resid(nt);
    for (std::size_t i = 0; i < nt; ++i) resid[i] = -(gv[i] + 0.5 * r0_fit);
    for (int pass = 0; pass < 6; ++pass) {
        // detection threshold sits well above the transform noise; the
        // later polish still uses every sample
        std::size_t i0 = nt;
        for (std::size_t i = 0; i < nt; ++i)
            if (std::abs(resid[i]) > std::max(20.0 * floor, 1e-6 * gmax)) {
                i0 = i;
                break;
            }
        if (i0 + 12 > nt) break;
        // log-linear fit over a window of 12 samples
        double st = 0.0, sv = 0.0, stt = 0.0, stv = 0.0;
        std::size_t m = 12;
        bool positive = true;
        for (std::size_t i = i0; i < i0 + m; ++i) positive = positive && resid[i] > 0.0;
        if (!positive) break;
        for (std::size_t i = i0; i < i0 + m; ++i) {
            double lv = std::log(resid[i]);
            st += ts[i];
            sv += lv;
            stt += ts[i] * ts[i];
            stv += ts[i] * lv;
        }
        double denom = stt - st * st / static_cast<double>(m);
        double khat = (stv - st * sv / static_cast<double>(m)) / denom;
        double lr = (sv - khat * st) / static_cast<double>(m);
        if (!(khat > 0.0) || !std::isfinite(lr)) break;
        double rhat = std::exp(lr);
        double before = 0.0, after = 0.0;
        for (std::size_t i = i0; i < i0 + m; ++i) before = std::max(before, std::abs(resid[i]));
        for (std::size_t i = 0; i < nt; ++i) resid[i] -= rhat * std::exp(khat * ts[i]);
        for (std::size_t i = i0; i < i0 + m; ++i) after = std::max(after, std::abs(resid[i]));
        if (after > 0.7 * before)
            throw SolverError(Err::PeelingStalled,
                              "exponential peel did not reduce the residual");
        poles.emplace_back(khat, rhat);
    }

    // Gauss-Newton polish of (r0, k_j, r_j) against all samples
    bool fit_r0 = r0_fit != 0.0;
    std::size_t np = (fit_r0 ? 1 : 0) + 2 * poles.size();
    if (np > 0) {
        Eigen::VectorXd theta(np);
        std::size_t off = 0;
        if (fit_r0) theta(off++) = r0_fit;
        for (auto& pr : poles) {
            theta(off++) = pr.first;
            theta(off++) = pr.second;
        }
        std::vector<double> sw(nt);
        for (std::size_t i = 0; i < nt; ++i) sw[i] = 1.0 / (std::abs(gv[i]) + 1e-2 * gmax + floor);
        auto model = [&](const Eigen::VectorXd& th, std::size_t i) {
            std::size_t o = 0;
            double r0v = fit_r0 ? th(o++) : 0.0;
            double mv = -0.5 * r0v;
            for (std::size_t j = 0; j < poles.size(); ++j) {
                double kj = th(o), rj = th(o + 1);
                o += 2;
                mv -= rj * std::exp(kj * ts[i]);
            }
            return mv;
        };
        double prev = 1e300;
        for (int it = 0; it < 60; ++it) {
            Eigen::MatrixXd Jm(nt, np);
            Eigen::VectorXd r(nt);
            for (std::size_t i = 0; i < nt; ++i) {
                r(i) = (gv[i] - model(theta, i)) * sw[i];
                std::size_t o = 0;
                if (fit_r0) Jm(i, o++) = -0.5 * sw[i];
                for (std::size_t j = 0; j < poles.size(); ++j) {
                    double kj = theta(o), rj = theta(o + 1);
                    double e = std::exp(kj * ts[i]);
                    Jm(i, o) = -rj * ts[i] * e * sw[i];
                    Jm(i, o + 1) = -e * sw[i];
                    o += 2;
                }
            }
            double rn = r.norm();
            if (std::abs(prev - rn) < 1e-13 * (1.0 + rn)) break;
            prev = rn;
            Eigen::MatrixXd N = Jm.transpose() * Jm;
            N.diagonal().array() += 1e-12 * (N.diagonal().mean() + 1.0);
            Eigen::VectorXd step = N.ldlt().solve(Jm.transpose() * r);
            double scale = 1.0;
            for (int half = 0; half < 12; ++half) {
                Eigen::VectorXd trial = theta + scale * step;
                double rn_t = 0.0;
                for (std::size_t i = 0; i < nt; ++i) {
                    double d = (gv[i] - model(trial, i)) * sw[i];
                    rn_t += d * d;
                }
                if (std::sqrt(rn_t) <= rn) {
                    theta = trial;
                    break;
                }
                scale *= 0.5;
            }
        }
        std::size_t o = 0;
        if (fit_r0) r0_fit = std::max(0.0, theta(o++));
        for (auto& pr : poles) {
            pr.first = theta(o);
            pr.second = theta(o + 1);
            o += 2;
        }
        // final weighted residual
        double rn = 0.0;
        for (std::size_t i = 0; i < nt; ++i) {
            double d = (gv[i] - model(theta, i)) * sw[i];
            rn = std::max(rn, std::abs(d));
        }
        PoleExtraction out;
        out.r0 = fit_r0 ? r0_fit : 0.0;
        for (auto& pr : poles)
            if (pr.second > 1e-7 * (1.0 + iscale) && pr.first > 0.0)
                out.poles.push_back(pr);
        std::sort(out.poles.begin(), out.poles.end());
        out.fit_residual = rn;
        return out;
    }
    PoleExtraction out;
    out.r0 = r0_fit;
    out.fit_residual = gmax;
    return out;
}

JostFactorization jost_from_I(const IFunctionData& data) {
    require_uniform(data.k_grid);
    std::size_t n = data.k_grid.size();
    double dk = data.k_grid[0];

    JostFactorization F;
    F.dk_ = dk;
    F.resonant_ = data.resonant();
    for (const auto& pr : data.poles) F.kj_.push_back(pr.first);

    F.ln_g_.resize(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        double k = data.k_grid[i];
        double im = data.I[i].imag();
        if (!(im > 0.0))
            throw SolverError(Err::GNotPositive, "Im I <= 0 at k = " + std::to_string(k));
        double g = k / im;
        if (F.resonant_) g *= (k * k + 1.0) / (k * k);
        if (!(g > 0.0))
            throw SolverError(Err::GNotPositive, "g <= 0 at k = " + std::to_string(k));
        F.ln_g_[i + 1] = std::log(g);
    }
    // one-sided quadratic extrapolation to k = 0
    F.ln_g_[0] = 3.0 * F.ln_g_[1] - 3.0 * F.ln_g_[2] + F.ln_g_[3];
    F.ln_g_deriv_ = derivative_five_point(F.ln_g_, dk);
    // ln g ~ beta/k^2 at the tail
    {
        std::size_t m = std::max<std::size_t>(8, n / 10);
        double num = 0.0, den = 0.0;
        for (std::size_t i = n - m; i <= n; ++i) {
            double k = dk * static_cast<double>(i);
            num += F.ln_g_[i] * (1.0 / (k * k));
            den += 1.0 / (k * k * k * k);
        }
        F.beta_ = num / den;
    }

    // defect | |f|^2 Im I / k - 1 | sampled across the usable range
    double defect = 0.0;
    std::size_t n_use = static_cast<std::size_t>(0.9 * static_cast<double>(n));
    for (std::size_t i = 4; i < n_use; i += std::max<std::size_t>(1, n / 64)) {
        double k = data.k_grid[i];
        cplx f = F.eval_real(k);
        defect = std::max(defect, std::abs(std::norm(f) * data.I[i].imag() / k - 1.0));
    }
    F.defect_ = defect;
    return F;
}

cplx JostFactorization::eval_real(double k) const {
    std::size_t n = ln_g_.size();
    double K = dk_ * static_cast<double>(n - 1);
    if (!(k > 0.0) || k >= 0.95 * K)
        throw ConfigError("factorization eval outside the covered range");
    // ln g at k and its derivative (linear interp on the lattice)
    UniformGrid g0{0.0, dk_, n};
    double lgk = lerp_on(g0, ln_g_, k);
    double lgpk = lerp_on(g0, ln_g_deriv_, k);

    std::size_t isng = static_cast<std::size_t>(std::round(k / dk_));
    std::vector<double> integ(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = dk_ * static_cast<double>(i);
        if (i == isng && std::abs(t - k) < 0.25 * dk_) {
            integ[i] = lgpk / (2.0 * k);
            continue;
        }
        integ[i] = (ln_g_[i] - lgk) / (t * t - k * k);
    }
    double val = simpson(integ, dk_);
    // algebraic tail of ln g
    double lr = std::log((K + k) / (K - k)) / (2.0 * k);
    double Ia = (lr - 1.0 / K) / (k * k);
    val += beta_ * Ia - lgk * lr;
    double theta = -(k / M_PI) * val;
    cplx h = std::sqrt(std::exp(lgk)) * std::exp(cplx(0.0, theta));
    cplx w(1.0, 0.0);
    cplx kk(k, 0.0);
    for (double kj : kj_) w *= (kk - cplx(0.0, kj)) / (kk + cplx(0.0, kj));
    if (resonant_) w *= kk / (kk + cplx(0.0, 1.0));
    return w * h;
}

double JostFactorization::eval_imag(double kappa) const {
    std::size_t n = ln_g_.size();
    double K = dk_ * static_cast<double>(n - 1);
    if (!(kappa > 0.0)) throw ConfigError("eval_imag needs kappa > 0");
    std::vector<double> integ(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = dk_ * static_cast<double>(i);
        integ[i] = ln_g_[i] / (t * t + kappa * kappa);
    }
    double val = simpson(integ, dk_);
    val += beta_ * (1.0 / K - (M_PI_2 - std::atan(K / kappa)) / kappa) / (kappa * kappa);
    double E = (kappa / M_PI) * val;
    double w = 1.0;
    for (double kj : kj_) w *= (kappa - kj) / (kappa + kj);
    if (resonant_) w *= kappa / (kappa + 1.0);
    return w * std::exp(E);
}

ScatteringData scattering_from_I(const IFunctionData& data) {
    JostFactorization F = jost_from_I(data);
    ScatteringData sd;
    // the factorization integral needs headroom below the sampled k_max,
    // so the output grid is the input one trimmed to 90%
    std::size_t n_out = static_cast<std::size_t>(0.9 * static_cast<double>(data.k_grid.size()));
    sd.k_grid.assign(data.k_grid.begin(), data.k_grid.begin() + n_out);
    sd.S.resize(n_out);
    parallel_for(n_out, [&](std::size_t i) {
        cplx f = F.eval_real(sd.k_grid[i]);
        sd.S[i] = std::conj(f) / f;
    });
    sd.resonance = data.resonant();
    for (const auto& pr : data.poles) {
        double kj = pr.first, rj = pr.second;
        double h = 1e-4 * kj;
        double gd = (-F.eval_imag(kj + 2 * h) + 8.0 * F.eval_imag(kj + h) -
                     8.0 * F.eval_imag(kj - h) + F.eval_imag(kj - 2 * h)) /
                    (12.0 * h);
        sd.kj.push_back(kj);
        sd.sj.push_back(2.0 * kj / (rj * gd * gd));
    }
    return sd;
}

std::vector<double> representation_remainder(const IFunctionData& data,
                                             const std::vector<double>& t_grid, double* l1_out) {
    require_uniform(data.k_grid);
    std::size_t n = data.k_grid.size();
    double dk = data.k_grid[0];
    std::vector<cplx> R(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        double k = data.k_grid[i];
        cplx v = data.I[i] - cplx(0.0, k);
        if (data.resonant()) v -= cplx(0.0, data.r0 / k);
        for (const auto& pr : data.poles)
            v -= cplx(0.0, pr.second) / (cplx(k, 0.0) - cplx(0.0, pr.first));
        R[i + 1] = v;
    }
    R[0] = 3.0 * R[1] - 3.0 * R[2] + R[3];
    TailFit tail = fit_tail(R, 0.0, dk, 0.15);
    std::vector<double> a(t_grid.size());
    parallel_for(t_grid.size(), [&](std::size_t i) {
        a[i] = fourier_symmetric(R, dk, tail, -t_grid[i]);
    });
    if (l1_out) {
        double l1 = 0.0;
        for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
            l1 += 0.5 * (std::abs(a[i]) + std::abs(a[i + 1])) * (t_grid[i + 1] - t_grid[i]);
        *l1_out = l1;
    }
    return a;
}

SpectralMeasure spectral_from_I(const IFunctionData& data) {
    SpectralMeasure rho;
    std::size_t n = data.k_grid.size();
    rho.lambda.resize(n);
    rho.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double k = data.k_grid[i];
        rho.lambda[i] = k * k;
        rho.w[i] = data.I[i].imag() / M_PI;
    }
    for (const auto& pr : data.poles)
        rho.atoms.emplace_back(-pr.first * pr.first, 2.0 * pr.first * pr.second);
    return rho;
}

}  // namespace ifn
}  // namespace iscat
