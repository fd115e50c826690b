#ifndef ISCAT_MARCHENKO_HPP
#define ISCAT_MARCHENKO_HPP

#include <vector>

#include "iscat/kernels.hpp"
#include "iscat/potential.hpp"
#include "iscat/scatter.hpp"

namespace iscat {

// F(x) = (1/2pi) int (1 - S) e^{ikx} dk + sum_j s_j e^{-k_j x}, sampled on
// x0 + i h.  x0 may be negative (needed to read bound-state data back off
// the exponential growth).
struct MarchenkoKernel {
    double x0 = 0.0;
    double h = 0.0;
    std::vector<double> F;
    std::vector<double> F_S, F_d;  // split parts (same grid)
    double imag_residual = 0.0;    // diagnostic from the Fourier step

    double x_max() const { return x0 + h * static_cast<double>(F.size() - 1); }
    double at(double x) const;
};

namespace marchenko {

MarchenkoKernel F_from_scattering(const ScatteringData& sd, double x0, double x_max, double h);

// One row A(x, .) of the outgoing kernel: solves
//   A(x,y) + F(x+y) + int_x^{ymax} A(x,t) F(t+y) dt = 0,  y in [x, y_max].
std::vector<double> solve_marchenko(const MarchenkoKernel& F, double x, double y_max = -1.0,
                                    double* residual_out = nullptr);

// All rows x in [0, x_max] assembled into an A-kind kernel (parallel over x).
TransformationKernel marchenko_kernel(const MarchenkoKernel& F, double x_max, double y_max = -1.0);

// q = -2 d/dx A(x,x) from the kernel diagonal.
Potential potential_from_A(const TransformationKernel& A);

// Inverse arrow F => S: bound-state part off the growth at x -> -inf
// (Hankel-pencil exponential fit), then S from the Fourier transform of
// the smooth remainder.
ScatteringData scattering_from_F(const MarchenkoKernel& F, const std::vector<double>& k_grid);

// Inverse arrow A => (f, bound states, norming constants) from the x = 0
// data A(0,y) and optionally A_x(0,y).
struct JostFromA0 {
    std::vector<double> k_grid;
    std::vector<cplx> f;
    std::vector<double> kj;
    std::vector<double> sj;  // filled when A0x supplied
    bool resonance = false;
};
JostFromA0 jost_from_A0(const std::vector<double>& A0, double h, const std::vector<double>& k_grid,
                        const std::vector<double>& A0x = {});

// Residual profile of the one-equation form that extends the x = 0
// Marchenko equation to the whole line:
//   F(y) + A(y) + int_0^inf A(t) F(t+y) dt - A(-y),   A := A(0,.) for y>=0, 0 else.
std::vector<double> generalized_residual(const std::vector<double>& A0, double h,
                                         const MarchenkoKernel& F,
                                         const std::vector<double>& y_grid);

}  // namespace marchenko
}  // namespace iscat

#endif
