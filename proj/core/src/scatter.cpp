#include "iscat/scatter.hpp"

#include <cmath>

#include "iscat/errors.hpp"
#include "iscat/marchenko.hpp"

namespace iscat {
namespace scatter {

namespace {

// d/dkappa of f(i kappa) by a 5-point stencil; f is analytic near the
// simple zero so a relative step of 1e-4 is safe.
double fdot_imag_axis(const Potential& q, double kappa) {
    double h = 1e-4 * kappa;
    auto fr = [&](double kk) { return ode::jost_point(q, cplx(0.0, kk)).f.real(); };
    return (-fr(kappa + 2 * h) + 8.0 * fr(kappa + h) - 8.0 * fr(kappa - h) + fr(kappa - 2 * h)) /
           (12.0 * h);
}

}  // namespace

ScatteringData scattering_from_potential(const Potential& q, const std::vector<double>& k_grid) {
    ScatteringData sd;
    sd.k_grid = k_grid;
    auto table = ode::solve_jost(q, k_grid);
    sd.S.resize(k_grid.size());
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        cplx f = table.f0[i];
        if (std::abs(f) < 1e-12)
            throw SolverError(Err::PoleOnGrid, "f(k) vanished at real k = " +
                                                   std::to_string(k_grid[i]));
        sd.S[i] = std::conj(f) / f;
    }
    auto bs = ode::bound_states(q);
    sd.kj = bs.kj;
    sd.resonance = bs.resonance;
    sd.sj.resize(sd.kj.size());
    for (std::size_t j = 0; j < sd.kj.size(); ++j) {
        double kj = sd.kj[j];
        double g = fdot_imag_axis(q, kj);  // fdot(i kj) = -i g
        double fp0 = ode::jost_point(q, cplx(0.0, kj)).fp0.real();
        double s = 2.0 * kj / (g * fp0);
        if (!(s > 0.0))
            throw SolverError(Err::IndexMismatch,
                              "norming constant not positive at k_j = " + std::to_string(kj));
        sd.sj[j] = s;
    }
    return sd;
}

PhaseShift phase_shift(const ScatteringData& sd) {
    PhaseShift ps;
    ps.k_grid = sd.k_grid;
    std::size_t n = sd.S.size();
    ps.delta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double m = std::abs(std::abs(sd.S[i]) - 1.0);
        if (m > 1e-6)
            throw ConfigError("phase_shift: S not unit modulus (defect " + std::to_string(m) + ")");
    }
    ps.delta[n - 1] = 0.5 * std::arg(sd.S[n - 1]);
    for (std::size_t i = n - 1; i-- > 0;) {
        double raw = 0.5 * std::arg(sd.S[i]);
        double m = std::round((ps.delta[i + 1] - raw) / M_PI);
        double cand = raw + M_PI * m;
        if (std::abs(cand - ps.delta[i + 1]) > 0.45 * M_PI)
            throw SolverError(Err::BranchAmbiguity,
                              "phase jump too large near k = " + std::to_string(sd.k_grid[i]));
        ps.delta[i] = cand;
    }
    return ps;
}

int s_index(const ScatteringData& sd) {
    PhaseShift ps = phase_shift(sd);
    // quadratic extrapolation of delta to k -> 0+
    double k0 = sd.k_grid[0], k1 = sd.k_grid[1], k2 = sd.k_grid[2];
    double d0 = ps.delta[0], d1 = ps.delta[1], d2 = ps.delta[2];
    double l0 = (0 - k1) * (0 - k2) / ((k0 - k1) * (k0 - k2));
    double l1 = (0 - k0) * (0 - k2) / ((k1 - k0) * (k1 - k2));
    double l2 = (0 - k0) * (0 - k1) / ((k2 - k0) * (k2 - k1));
    double delta_zero = d0 * l0 + d1 * l1 + d2 * l2;
    double nu_f = -2.0 * delta_zero / M_PI;
    int nu = static_cast<int>(std::lround(nu_f));
    if (std::abs(nu_f - nu) > 0.2)
        throw SolverError(Err::IndexMismatch,
                          "winding " + std::to_string(nu_f) + " not close to an integer");
    int expected = sd.resonance ? -2 * static_cast<int>(sd.J()) - 1
                                : -2 * static_cast<int>(sd.J());
    if (nu != expected)
        throw SolverError(Err::IndexMismatch, "index " + std::to_string(nu) + " vs expected " +
                                                  std::to_string(expected));
    return nu;
}

CharacterizationReport validate_characterization(const ScatteringData& sd) {
    CharacterizationReport r;

    r.ok_positivity = true;
    for (double k : sd.kj)
        if (!(k > 0.0)) r.ok_positivity = false;
    for (double s : sd.sj)
        if (!(s > 0.0)) r.ok_positivity = false;

    r.unitarity_defect = 0.0;
    for (const auto& s : sd.S) r.unitarity_defect = std::max(r.unitarity_defect, std::abs(std::abs(s) - 1.0));
    double settle = std::abs(sd.S.back() - cplx(1.0, 0.0));
    r.ok_unitarity = r.unitarity_defect < 1e-6 && settle < 0.2;

    try {
        int nu = s_index(sd);
        r.index = nu;
        r.ok_index = true;
    } catch (const std::exception&) {
        r.ok_index = false;
    }

    try {
        double x_max = 12.0;
        double hx = 0.02;
        auto F = marchenko::F_from_scattering(sd, 0.0, x_max, hx);
        const auto& v = F.F;
        double sup = 0.0, l1 = 0.0, xfp = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            sup = std::max(sup, std::abs(v[i]));
            l1 += std::abs(v[i]) * hx;
            if (i > 0 && i + 1 < v.size()) {
                double fp = (v[i + 1] - v[i - 1]) / (2.0 * hx);
                xfp += (F.x0 + hx * i) * std::abs(fp) * hx;
            }
        }
        double tail = 0.0;
        for (std::size_t i = v.size() - v.size() / 10; i < v.size(); ++i)
            tail = std::max(tail, std::abs(v[i]));
        r.f_sup = sup;
        r.f_l1 = l1;
        r.xfp_l1 = xfp;
        r.f_tail_ratio = sup > 0.0 ? tail / sup : 0.0;
        r.ok_regularity = std::isfinite(sup) && std::isfinite(l1) && std::isfinite(xfp) &&
                          (sup == 0.0 || r.f_tail_ratio < 1e-2);
    } catch (const std::exception&) {
        r.ok_regularity = false;
    }
    return r;
}

double residue_defect(const Potential& q, const ScatteringData& sd) {
    double worst = 0.0;
    for (std::size_t j = 0; j < sd.kj.size(); ++j) {
        double kj = sd.kj[j];
        // (k - i k_j) S(k) along the imaginary axis, Richardson in t
        auto val = [&](double t) {
            double num = ode::jost_point(q, cplx(0.0, -(kj + t))).f.real();
            double den = ode::jost_point(q, cplx(0.0, kj + t)).f.real();
            return cplx(0.0, t) * (num / den);
        };
        double t1 = 5e-3 * kj, t2 = 2.5e-3 * kj;
        cplx r1 = 0.5 * (val(t1) + val(-t1));
        cplx r2 = 0.5 * (val(t2) + val(-t2));
        cplx res = (4.0 * r2 - r1) / 3.0;  // removes the O(t^2) term
        cplx target = cplx(0.0, -sd.sj[j]);  // s_j / i
        worst = std::max(worst, std::abs(res - target));
    }
    return worst;
}

}  // namespace scatter
}  // namespace iscat
