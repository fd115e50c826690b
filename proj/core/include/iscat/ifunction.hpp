#ifndef ISCAT_IFUNCTION_HPP
#define ISCAT_IFUNCTION_HPP

#include <utility>
#include <vector>

#include "iscat/gelfand_levitan.hpp"
#include "iscat/potential.hpp"
#include "iscat/scatter.hpp"

namespace iscat {

// Boundary values of the Weyl function I(k) = f'(0,k)/f(k) on a uniform
// k > 0 lattice, with its pole data on the positive imaginary axis:
// simple poles i k_j with residues i r_j, plus the resonance term i r_0 / k.
struct IFunctionData {
    std::vector<double> k_grid;  // dk, 2dk, ...
    std::vector<cplx> I;
    double r0 = 0.0;
    std::vector<std::pair<double, double>> poles;  // (k_j, r_j), r_j > 0

    bool resonant() const { return r0 > 1e-6; }
};

namespace ifn {

IFunctionData I_from_potential(const Potential& q, const std::vector<double>& k_grid);

// Recover (r0, {k_j, r_j}) from the samples alone: Fourier transform of
// I - ik on t < 0 is -sum r_j e^{k_j t} - r0/2, peeled exponential by
// exponential from the far end and polished by Gauss-Newton.
struct PoleExtraction {
    double r0 = 0.0;
    std::vector<std::pair<double, double>> poles;
    double fit_residual = 0.0;
};
PoleExtraction poles_from_I(const std::vector<double>& k_grid, const std::vector<cplx>& I);

// Multiplicative splitting f = w h: w carries the zeros (and the resonance
// factor), h solves the scalar Riemann problem |h|^2 = g on the axis via a
// principal-value Cauchy integral of ln g.
class JostFactorization {
  public:
    cplx eval_real(double k) const;      // f(k) for k > 0
    double eval_imag(double kappa) const;  // f(i kappa), kappa > 0

    const std::vector<double>& bound_state_k() const { return kj_; }
    bool resonant() const { return resonant_; }
    // max over the grid of | |f|^2 Im I / k - 1 |
    double factorization_defect() const { return defect_; }

  private:
    friend JostFactorization jost_from_I(const IFunctionData&);
    std::vector<double> ln_g_;  // on k = 0, dk, ...
    std::vector<double> ln_g_deriv_;
    double dk_ = 0.0;
    double beta_ = 0.0;  // ln g ~ beta / k^2 past the grid
    bool resonant_ = false;
    std::vector<double> kj_;
    double defect_ = 0.0;
};

JostFactorization jost_from_I(const IFunctionData& I);

// Full scattering data through the factorization; norming constants from
// the residues and the reconstructed f on the imaginary axis.
ScatteringData scattering_from_I(const IFunctionData& I);

// Remainder a(t), t > 0, of the pole representation of I; l1_out gets
// int |a| over the grid.
std::vector<double> representation_remainder(const IFunctionData& I,
                                             const std::vector<double>& t_grid,
                                             double* l1_out = nullptr);

SpectralMeasure spectral_from_I(const IFunctionData& I);

}  // namespace ifn
}  // namespace iscat

#endif
