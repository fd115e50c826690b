#ifndef ISCAT_POTENTIAL_HPP
#define ISCAT_POTENTIAL_HPP

#include <functional>
#include <string>
#include <vector>

#include "iscat/grid.hpp"

namespace iscat {

// Real potential q(x) on [0, x_max], sampled on a uniform grid and read as
// the piecewise-linear interpolant; q = 0 for x > a (finite numerical
// support).  Samples past the declared support are forced to zero.
class Potential {
  public:
    Potential() = default;
    Potential(std::vector<double> samples, double h, double a);

    // Samples f(x_i) on [0, x_max]; a defaults to x_max.
    static Potential from_function(const std::function<double(double)>& f, double x_max,
                                   double h, double a = -1.0);

    double operator()(double x) const;
    const std::vector<double>& samples() const { return q_; }
    double step() const { return h_; }
    double support() const { return a_; }
    double x_max() const { return grid_.back(); }
    const UniformGrid& grid() const { return grid_; }
    std::size_t size() const { return q_.size(); }

    double sup_abs() const;
    // First lattice point past which every sample vanishes; the sampled
    // interpolant is identically zero from here on.  The declared support
    // radius a may sit one ramp cell earlier.
    double support_edge() const;
    // sigma(x) = int_x^inf |q| dt  (trapezoid on the grid).
    double sigma(double x) const;
    // int_0^inf q dt and int_x^inf q dt.
    double integral(double x = 0.0) const;
    // Discrete weight sum (1 + x_i)|q_i| h, recorded for diagnostics.
    double weight_l11() const { return weight_; }

    // Resample to a new step (piecewise-linear read of the current data).
    Potential resampled(double h) const;

    static Potential load_json(const std::string& path);
    void save_json(const std::string& path) const;

  private:
    std::vector<double> q_;
    UniformGrid grid_;
    double h_ = 0.0;
    double a_ = 0.0;
    double weight_ = 0.0;
};

}  // namespace iscat

#endif
