#ifndef ISCAT_ODE_HPP
#define ISCAT_ODE_HPP

#include <complex>
#include <vector>

#include "iscat/potential.hpp"

namespace iscat {

using cplx = std::complex<double>;

namespace ode {

// Jost solution of u'' + k^2 u - q u = 0 with u = e^{ikx} for x >= a.
// Computed by integrating the envelope w = u e^{-ikx} backward from the
// support edge:  w'' + 2ik w' = q w,  w(a) = 1, w'(a) = 0.  The envelope
// carries no oscillation, so the step never has to resolve e^{ikx}.
struct JostPoint {
    cplx f;    // f(k) = f(0, k)
    cplx fp0;  // f'(0, k)
};

JostPoint jost_point(const Potential& q, cplx k);

// f(x_i, k) and f'(x_i, k) on the potential grid.
struct JostProfile {
    std::vector<cplx> f;
    std::vector<cplx> fp;
};
JostProfile jost_profile(const Potential& q, cplx k);

struct JostTable {
    std::vector<double> k_grid;
    std::vector<double> x_grid;        // empty unless profiles requested
    std::vector<cplx> f_xk;            // row-major [k][x], empty if no profiles
    std::vector<cplx> f0;              // f(k)
    std::vector<cplx> fp0;             // f'(0,k)

    cplx f_at(std::size_t ik, std::size_t ix) const { return f_xk[ik * x_grid.size() + ix]; }
};

struct JostOptions {
    bool profiles = false;
    // Spot-check the local truncation error by step halving.
    bool check_resolution = true;
    double resolution_budget = 1e-7;
};

JostTable solve_jost(const Potential& q, const std::vector<double>& k_grid,
                     const JostOptions& opt = {});

// Regular solutions: phi(0)=0, phi'(0)=1; psi(0)=1, psi'(0)=0.
// For real k away from zero they are assembled from the Jost envelopes at
// +-k through the Wronskian relations; small and imaginary k integrate
// directly.
struct RegularPair {
    cplx k;
    std::vector<double> x_grid;
    std::vector<cplx> phi, phi_p;
    std::vector<cplx> psi, psi_p;
};

RegularPair solve_regular(const Potential& q, cplx k);

struct BoundStates {
    std::vector<double> kj;  // ascending, f(i kj) = 0
    bool resonance = false;  // f(0) = 0
    double kappa_max = 0.0;
};

struct BoundStateOptions {
    double kappa_max = 0.0;       // 0: use 1 + sqrt(sup|q|)
    double bisect_tol = 1e-10;
    std::size_t scan_points = 240;
};

BoundStates bound_states(const Potential& q, const BoundStateOptions& opt = {});

// max over the k-grid of |f'(0,k) f(-k) - f'(0,-k) f(k) - 2ik| / (2k).
double wronskian_defect(const JostTable& t);

}  // namespace ode
}  // namespace iscat

#endif
