#ifndef ISCAT_FIXED_ENERGY_HPP
#define ISCAT_FIXED_ENERGY_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "iscat/potential.hpp"

namespace iscat {
namespace fe {

using cplx = std::complex<double>;

// Riccati-Bessel pair u_l(r) = sqrt(pi r/2) J_{l+1/2}(r),
// v_l(r) = sqrt(pi r/2) N_{l+1/2}(r), with derivatives.
// u by downward recurrence (series in the deep classically-forbidden
// regime), v by upward recurrence.
struct RiccatiBessel {
    double u, up, v, vp;
};
RiccatiBessel riccati_bessel(unsigned l, double r);

// All orders 0..l_max at once (shared recurrences).
struct RiccatiBesselRow {
    std::vector<double> u, up, v, vp;
};
RiccatiBesselRow riccati_bessel_row(unsigned l_max, double r);

// Weight in the plane-wave integral representation of u_l:
//   weight(l) * u_l(r) = r^{l+1} int_{-1}^{1} (1-t^2)^l e^{irt} dt.
double poisson_weight(unsigned l);

// Fixed-energy (k = 1) partial-wave data for a compactly supported q.
struct PartialWaveSet {
    double a = 0.0;        // matching radius (support edge)
    unsigned L_max = 0;
    std::vector<double> delta;    // absolute phase shifts, node-counted branch
    std::vector<cplx> psi_at_a;   // e^{i delta} [cos(delta) u_l(a) - sin(delta) v_l(a)]
};

PartialWaveSet phase_shifts(const Potential& q, unsigned L_max);

// Small-potential inversion of fixed-energy phase shifts: the moment
// system int_0^a u_l^2 q = -sin(2 delta_l)/2 solved by Tikhonov least
// squares.  reg <= 0 picks the parameter from an L-curve corner.
struct MomentInversion {
    std::vector<double> r_grid;
    std::vector<double> q;
    double condition = 0.0;
    double reg_used = 0.0;
    bool ill_posed_warning = false;
};
MomentInversion moment_inversion(const PartialWaveSet& pw, double a, double reg = 1e-6,
                                 std::size_t n_r = 161);

// Coupling matrix element of the fixed-energy linear system: zero for
// even |l - l'|, else 1/((l'+1/2)^2 - (l+1/2)^2).
double ns_coupling(unsigned l, unsigned lp);

// Newton-Sabatier fixed-energy procedure; per-radius Fredholm solves with
// solvability diagnostics (the procedure is carried past local breakdowns,
// which are recorded).
struct NSState {
    std::vector<double> a_coeffs;
    std::vector<double> c_coeffs;
    std::vector<double> r_grid;
    std::vector<double> K_diag;      // K(r,r)
    std::vector<double> q_rec;
    std::vector<double> sigma_min;   // per r
    std::vector<double> breakdown_r;
    bool truncation_converged = true;
    double c_growth = 0.0;           // sum |c_l| / l^2 over the truncation
};
NSState newton_sabatier(const PartialWaveSet& pw, const std::vector<double>& r_grid);

// Support-radius estimate off the super-geometric decay of delta_l.
struct DecayEstimate {
    double a_hat = 0.0;
    unsigned l_lo = 0, l_hi = 0;
    bool underflow_tail = false;  // trailing delta below the floor were dropped
};
DecayEstimate decay_rate_estimate(const PartialWaveSet& pw);

}  // namespace fe
}  // namespace iscat

#endif
