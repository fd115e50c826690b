#ifndef ISCAT_MIXED_DATA_HPP
#define ISCAT_MIXED_DATA_HPP

#include <cstddef>
#include <vector>

#include "iscat/potential.hpp"

namespace iscat {
namespace mixed {

// Dirichlet-Dirichlet eigenvalues lambda_n and Dirichlet-Robin eigenvalues
// mu_n of -u'' + q u on [0,1], n = 1..n_max.
struct TwoSpectra {
    std::vector<double> lambda;
    std::vector<double> mu;
    double robin_h = 0.0;
};

TwoSpectra two_spectra_from_potential(const Potential& q01, double robin_h, std::size_t n_max);

// Boundary data of the transformation kernel on the right edge:
// K(1,y), K_x(1,y) on y in [0,1] (odd in y), and K(1,1) = (1/2) int q.
struct CauchyData {
    double h = 0.0;
    std::vector<double> K1;
    std::vector<double> K1x;
    double K11 = 0.0;
    double fit_residual_lambda = 0.0;  // least-squares residuals of the two fits
    double fit_residual_mu = 0.0;
};

CauchyData cauchy_from_spectra(const TwoSpectra& ts, std::size_t n_y = 401);

// One reconstruction window (x0, x1] with kernel rows on |y| <= x1.
struct WindowGeometry {
    double x0 = 0.0, x1 = 0.0, h = 0.0;
    std::size_t nx() const { return static_cast<std::size_t>(std::round((x1 - x0) / h)) + 1; }
    std::size_t ny() const { return 2 * static_cast<std::size_t>(std::round(x1 / h)) + 1; }
    double x_of(std::size_t i) const { return x0 + h * static_cast<double>(i); }
    double y_of(std::size_t j) const { return -x1 + h * static_cast<double>(j); }
};

struct UVector {
    WindowGeometry geom;
    std::vector<double> q;  // on the window x-nodes
    std::vector<double> K;  // row-major nx x ny, masked to |y| <= x
    double norm() const;    // sup|q| + sup|K|
};

// One application of the fixed-point map: returns W(U) + h.
UVector contraction_step(const UVector& U, const UVector& h_vec);

// Admissible window width before the 0.9 safety factor:
// min(8(Rt - R)/(5 Rt^2), 2/(5 Rt)).
double window_width(double R, double R_tilde);

struct WindowReport {
    double x0 = 0.0, x1 = 0.0;
    double R = 0.0;             // norm of the data term
    double ratio_bound = 0.0;   // (x1-x0) * (5/2) * R_tilde
    double ratio_measured = 0.0;
    std::size_t iterations = 0;
};

struct Reconstruction {
    Potential q;
    std::vector<WindowReport> windows;
};

// Iterate the window map from the right edge leftward until x = 0.
Reconstruction reconstruct(const CauchyData& cd, double R_tilde, double h_grid = 0.005);

// Diagnostic: residual |U - W(U) - h| for externally supplied exact data.
double fixed_point_residual(const UVector& U, const UVector& h_vec);

}  // namespace mixed
}  // namespace iscat

#endif
