#ifndef ISCAT_SCATTER_HPP
#define ISCAT_SCATTER_HPP

#include <complex>
#include <vector>

#include "iscat/ode.hpp"
#include "iscat/potential.hpp"

namespace iscat {

// Half-line scattering data {S(k), k_j, s_j} with the zero-energy
// resonance flag.  S is stored on k > 0 only; S(-k) = conj S(k).
struct ScatteringData {
    std::vector<double> k_grid;
    std::vector<cplx> S;
    std::vector<double> kj;  // ascending
    std::vector<double> sj;  // norming constants, > 0
    bool resonance = false;

    std::size_t J() const { return kj.size(); }
};

struct PhaseShift {
    std::vector<double> k_grid;
    std::vector<double> delta;  // continuous branch, delta(k_max) ~ 0
};

struct CharacterizationReport {
    bool ok_index = false;       // ind S = -2J or -2J-1, matching the flags
    bool ok_positivity = false;  // k_j > 0, s_j > 0
    bool ok_unitarity = false;   // |S| = 1, S(k_max) ~ 1
    bool ok_regularity = false;  // norms of F and xF' finite, tail decayed
    int index = 0;
    double unitarity_defect = 0.0;
    double f_sup = 0.0, f_l1 = 0.0, xfp_l1 = 0.0, f_tail_ratio = 0.0;
    bool all_ok() const { return ok_index && ok_positivity && ok_unitarity && ok_regularity; }
};

namespace scatter {

ScatteringData scattering_from_potential(const Potential& q, const std::vector<double>& k_grid);

// Unwrapped s-wave phase shift, S = e^{2 i delta}, anchored at large k.
PhaseShift phase_shift(const ScatteringData& sd);

// Winding index of S over the full line; consistency-checked against
// (J, resonance).
int s_index(const ScatteringData& sd);

CharacterizationReport validate_characterization(const ScatteringData& sd);

// max_j | residue of S at i k_j - s_j / i |, residue by extrapolated
// finite differences on the imaginary axis (compact support assumed).
double residue_defect(const Potential& q, const ScatteringData& sd);

}  // namespace scatter
}  // namespace iscat

#endif
