#include "iscat/linalg.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace iscat {

namespace {
Eigen::MatrixXd to_eigen(std::size_t m, std::size_t n, const std::vector<double>& a) {
    if (a.size() != m * n) throw std::invalid_argument("linalg: shape mismatch");
    Eigen::MatrixXd A(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) A(i, j) = a[i * n + j];
    return A;
}
}  // namespace

std::vector<double> solve_dense(std::size_t n, const std::vector<double>& a,
                                const std::vector<double>& b) {
    Eigen::MatrixXd A = to_eigen(n, n, a);
    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b.data(), n);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    double rc = lu.rcond();
    if (!(rc > 1e-14)) throw std::runtime_error("solve_dense: matrix numerically singular");
    Eigen::VectorXd x = lu.solve(rhs);
    return std::vector<double>(x.data(), x.data() + n);
}

std::vector<double> svd_values(std::size_t m, std::size_t n, const std::vector<double>& a) {
    Eigen::MatrixXd A = to_eigen(m, n, a);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
    const auto& s = svd.singularValues();
    return std::vector<double>(s.data(), s.data() + s.size());
}

std::vector<double> lstsq_tsvd(std::size_t m, std::size_t n, const std::vector<double>& a,
                               const std::vector<double>& b, double rtol, double* cond_out) {
    Eigen::MatrixXd A = to_eigen(m, n, a);
    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b.data(), m);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    double smax = s.size() ? s(0) : 0.0;
    if (cond_out) *cond_out = (s.size() && s(s.size() - 1) > 0.0) ? smax / s(s.size() - 1) : 0.0;
    Eigen::VectorXd ub = svd.matrixU().transpose() * rhs;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rtol * smax) y(i) = ub(i) / s(i);
    Eigen::VectorXd x = svd.matrixV() * y;
    return std::vector<double>(x.data(), x.data() + n);
}

std::vector<double> lstsq_tikhonov(std::size_t m, std::size_t n, const std::vector<double>& a,
                                   const std::vector<double>& b, double lambda,
                                   double* cond_out) {
    Eigen::MatrixXd A = to_eigen(m, n, a);
    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b.data(), m);
    Eigen::MatrixXd N = A.transpose() * A;
    N.diagonal().array() += lambda * lambda;
    if (cond_out) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(N);
        double lo = es.eigenvalues()(0), hi = es.eigenvalues()(es.eigenvalues().size() - 1);
        *cond_out = lo > 0.0 ? std::sqrt(hi / lo) : 0.0;
    }
    Eigen::VectorXd x = N.ldlt().solve(A.transpose() * rhs);
    return std::vector<double>(x.data(), x.data() + n);
}

std::vector<std::complex<double>> eig_general(std::size_t n, const std::vector<double>& a) {
    Eigen::MatrixXd A = to_eigen(n, n, a);
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    std::vector<std::complex<double>> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = es.eigenvalues()(i);
    return ev;
}

}  // namespace iscat
