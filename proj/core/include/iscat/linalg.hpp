#ifndef ISCAT_LINALG_HPP
#define ISCAT_LINALG_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace iscat {

// Dense helpers over row-major flat storage.  Implementation wraps Eigen;
// kept out of the public surface so installed headers carry no third-party
// dependency.

// Solve A x = b, A is n x n row-major.  Throws on numerically singular A.
std::vector<double> solve_dense(std::size_t n, const std::vector<double>& a,
                                const std::vector<double>& b);

// Singular values of an m x n row-major matrix, descending.
std::vector<double> svd_values(std::size_t m, std::size_t n, const std::vector<double>& a);

// Minimum-norm least squares via truncated SVD: singular values below
// rtol * sigma_max are dropped.
std::vector<double> lstsq_tsvd(std::size_t m, std::size_t n, const std::vector<double>& a,
                               const std::vector<double>& b, double rtol,
                               double* cond_out = nullptr);

// Tikhonov-regularised least squares: min |Ax-b|^2 + lambda^2 |x|^2.
std::vector<double> lstsq_tikhonov(std::size_t m, std::size_t n, const std::vector<double>& a,
                                   const std::vector<double>& b, double lambda,
                                   double* cond_out = nullptr);

// Eigenvalues of a general real n x n matrix.
std::vector<std::complex<double>> eig_general(std::size_t n, const std::vector<double>& a);

}  // namespace iscat

#endif
