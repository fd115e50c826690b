#ifndef ISCAT_GELFAND_LEVITAN_HPP
#define ISCAT_GELFAND_LEVITAN_HPP

#include <utility>
#include <vector>

#include "iscat/kernels.hpp"
#include "iscat/potential.hpp"

namespace iscat {

// Spectral measure of the half-line Dirichlet operator: absolutely
// continuous density w(lambda) on lambda > 0 stored on lambda_i = k_i^2
// for a uniform k lattice, plus finitely many negative atoms (-k_j^2, c_j).
struct SpectralMeasure {
    std::vector<double> lambda;               // (dk)^2, (2dk)^2, ...
    std::vector<double> w;                    // density at lambda_i
    std::vector<std::pair<double, double>> atoms;  // (lambda_j < 0, c_j > 0)

    double dk() const;  // underlying k step
    // density minus the free reference sqrt(lambda)/pi, read at k
    double dsigma_at_k(double k) const;
};

// Symmetric input kernel of the regular-solution inversion, held through
// its one-variable profile:  L(x,y) = (L(x+y) - L(|x-y|)) / 2.
struct GLKernel {
    double h = 0.0;              // s lattice step
    double b = 0.0;              // kernel defined for x, y in [0, b]
    std::vector<double> Ls;      // profile on s in [0, 2b]

    double profile_at(double s) const;
    double at(double x, double y) const { return 0.5 * (profile_at(x + y) - profile_at(std::abs(x - y))); }
};

namespace gl {

SpectralMeasure spectral_from_potential(const Potential& q, double k_max, std::size_t n_k);

GLKernel L_from_spectral(const SpectralMeasure& rho, double b, double h);

// One row K(x, .) on y in [0, x]; optionally reports the smallest singular
// value of the Nystrom matrix (solvability margin).
std::vector<double> gl_row(const GLKernel& L, double x, double* sigma_min = nullptr,
                           double* residual = nullptr);

TransformationKernel gl_kernel(const GLKernel& L, double b);

// q = +2 d/dx K(x,x).
Potential potential_from_K(const TransformationKernel& K);

// Inverse arrow K => L by marching the profile equation in s.
GLKernel L_profile_from_K(const TransformationKernel& K);

struct SpectralFitOptions {
    std::size_t density_nodes = 64;
    double k_fit_max = 10.0;
    std::size_t max_atoms = 3;
    std::size_t max_iter = 200;
    double tol = 1e-10;
    // curvature penalty on the density-node weights; the cosine columns of
    // neighbouring nodes are nearly collinear and need this ridge
    double smoothness = 1e-3;
};

// Inverse arrow L => rho: atoms and a density correction recovered by a
// damped Gauss-Newton fit of the profile.
SpectralMeasure spectral_from_L(const GLKernel& L, const SpectralFitOptions& opt = {});

}  // namespace gl
}  // namespace iscat

#endif
