#ifndef ISCAT_KERNELS_HPP
#define ISCAT_KERNELS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "iscat/potential.hpp"

namespace iscat {

// Triangular transformation kernels on a uniform lattice.
//  A-kind: A(x,y), y >= x >= 0, decays as x+y grows; f(x,k) = e^{ikx} + int_x A e^{iky} dy.
//  K-kind: K(x,y), 0 <= y <= x <= b, K(x,0) = 0; maps sin(kx)/k to the regular solution.
class TransformationKernel {
  public:
    enum class Kind { A_outgoing, K_regular };

    TransformationKernel() = default;
    TransformationKernel(Kind kind, double h, std::size_t nx, std::size_t ny);

    Kind kind() const { return kind_; }
    double step() const { return h_; }
    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    double x_max() const { return h_ * static_cast<double>(nx_ - 1); }
    double y_max() const { return h_ * static_cast<double>(ny_ - 1); }

    double& node(std::size_t i, std::size_t j) { return v_[i * ny_ + j]; }
    double node(std::size_t i, std::size_t j) const { return v_[i * ny_ + j]; }

    // Bilinear off-lattice read (clamped to the rectangle).
    double at(double x, double y) const;

    std::vector<double> diagonal() const;  // A(x,x) or K(x,x) on the x-lattice
    std::vector<double> row(std::size_t i) const;

    void save_csv(const std::string& path) const;  // x,y,value triples

  private:
    Kind kind_ = Kind::A_outgoing;
    double h_ = 0.0;
    std::size_t nx_ = 0, ny_ = 0;
    std::vector<double> v_;
};

namespace kernels {

struct VolterraOptions {
    double tol = 1e-12;       // sup-norm stop for successive approximation
    std::size_t max_iter = 200;
};

// Outgoing kernel from the potential; lattice step h covers x in [0,x_max],
// y in [0,y_max].  h must be an even multiple of the internal half-step.
TransformationKernel kernel_A_from_potential(const Potential& q, double x_max, double y_max,
                                             double h, const VolterraOptions& opt = {});

// Regular kernel on the triangle 0 <= y <= x <= b.
TransformationKernel kernel_K_from_potential(const Potential& q, double b, double h,
                                             const VolterraOptions& opt = {});

// Max interior residual of the hyperbolic equation the kernel satisfies,
// skipping lattice points within reach of kinks of q (finite differences
// are meaningless across a derivative jump).
double goursat_residual(const TransformationKernel& k, const Potential& q);

// Lattice x-positions where q has a visible derivative jump (+ support edge).
std::vector<double> potential_kinks(const Potential& q);

// A_x(0, y) for an outgoing kernel by one-sided differences across the
// first rows; the sub-diagonal corner (y < 2h) is filled by extrapolation
// since the triangle holds no data there.
std::vector<double> x_derivative_row0(const TransformationKernel& A);

}  // namespace kernels
}  // namespace iscat

#endif
