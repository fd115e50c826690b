#ifndef ISCAT_GRID_HPP
#define ISCAT_GRID_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace iscat {

// Uniform grid x_i = x0 + i*h, i = 0..n-1.
struct UniformGrid {
    double x0 = 0.0;
    double h = 0.0;
    std::size_t n = 0;

    double operator[](std::size_t i) const { return x0 + h * static_cast<double>(i); }
    double back() const { return (*this)[n - 1]; }
    std::vector<double> points() const {
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = (*this)[i];
        return p;
    }
    // Index of the cell containing x, clamped to valid range.
    std::size_t cell(double x) const {
        double t = (x - x0) / h;
        if (t <= 0.0) return 0;
        std::size_t i = static_cast<std::size_t>(t);
        return i >= n - 1 ? n - 2 : i;
    }
};

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + h * static_cast<double>(i);
    v.back() = b;
    return v;
}

// Piecewise-linear value of samples f on grid g at point x (clamped).
inline double lerp_on(const UniformGrid& g, const std::vector<double>& f, double x) {
    if (g.n == 1) return f[0];
    std::size_t i = g.cell(x);
    double t = (x - g[i]) / g.h;
    if (t < 0.0) t = 0.0;
    if (t > 1.0) t = 1.0;
    return f[i] + t * (f[i + 1] - f[i]);
}

}  // namespace iscat

#endif
