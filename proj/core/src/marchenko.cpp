#include "iscat/marchenko.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "iscat/errors.hpp"
#include "iscat/linalg.hpp"
#include "iscat/parallel.hpp"
#include "iscat/quadrature.hpp"

namespace iscat {

double MarchenkoKernel::at(double x) const {
    double t = (x - x0) / h;
    if (t <= 0.0) return F.front();
    std::size_t i = static_cast<std::size_t>(t);
    if (i >= F.size() - 1) return F.back();
    double w = t - static_cast<double>(i);
    return F[i] + w * (F[i + 1] - F[i]);
}

namespace marchenko {

namespace {

std::vector<double> simpson_weights(std::size_t n) {
    std::vector<double> w(n, 0.0);
    if (n < 2) return w;
    if (n == 2) {
        w[0] = w[1] = 0.5;
        return w;
    }
    std::size_t m = n - 1;
    std::size_t even_end = (m % 2 == 0) ? n - 1 : n - 4;
    for (std::size_t i = 0; i + 2 <= even_end; i += 2) {
        w[i] += 1.0 / 3.0;
        w[i + 1] += 4.0 / 3.0;
        w[i + 2] += 1.0 / 3.0;
    }
    if (m % 2 != 0) {
        if (n >= 4) {
            w[n - 4] += 3.0 / 8.0;
            w[n - 3] += 9.0 / 8.0;
            w[n - 2] += 9.0 / 8.0;
            w[n - 1] += 3.0 / 8.0;
        } else {
            w[n - 2] += 0.5;
            w[n - 1] += 0.5;
        }
    }
    return w;
}

}  // namespace

MarchenkoKernel F_from_scattering(const ScatteringData& sd, double x0, double x_max, double h) {
    const auto& kg = sd.k_grid;
    if (kg.size() < 8) throw ConfigError("F_from_scattering: k grid too short");
    double dk = kg[1] - kg[0];
    for (std::size_t i = 1; i < kg.size(); ++i)
        if (std::abs(kg[i] - kg[i - 1] - dk) > 1e-9 * dk)
            throw ConfigError("F_from_scattering: k grid must be uniform");
    if (std::abs(kg[0] - dk) > 1e-9 * dk)
        throw ConfigError("F_from_scattering: k grid must start at dk");

    // samples of 1 - S on k = 0, dk, 2dk, ...; k = 0 by quadratic extrapolation
    std::vector<cplx> p(kg.size() + 1);
    for (std::size_t i = 0; i < kg.size(); ++i) p[i + 1] = 1.0 - sd.S[i];
    p[0] = 3.0 * p[1] - 3.0 * p[2] + p[3];
    if (std::abs(p.back()) > 0.2)
        throw SolverError(Err::TailTooHeavy, "1 - S at k_max is " + std::to_string(std::abs(p.back())));
    // a near-threshold state makes S swing on a scale the grid must resolve
    for (std::size_t i = 1; i < std::min<std::size_t>(kg.size(), 64); ++i)
        if (std::abs(sd.S[i] - sd.S[i - 1]) > 0.5)
            throw ConfigError("F_from_scattering: S undersampled near k = " +
                              std::to_string(kg[i]));

    SymmetricTransform tr = SymmetricTransform::build(p, dk);

    MarchenkoKernel out;
    out.x0 = x0;
    out.h = h;
    std::size_t n = static_cast<std::size_t>(std::round((x_max - x0) / h)) + 1;
    out.F.resize(n);
    out.F_S.resize(n);
    out.F_d.resize(n);
    parallel_for(n, [&](std::size_t i) {
        double x = x0 + h * static_cast<double>(i);
        // F carries a jump at x = 0; store the limit from above there,
        // which is the value the inversion consumes.
        double fs = (x == 0.0) ? tr.from_above(0.0) : tr(x);
        double fd = 0.0;
        for (std::size_t j = 0; j < sd.kj.size(); ++j) fd += sd.sj[j] * std::exp(-sd.kj[j] * x);
        out.F_S[i] = fs;
        out.F_d[i] = fd;
        out.F[i] = fs + fd;
    });
    // imaginary-part telemetry of the two-sided transform at a few points
    double imag = 0.0;
    std::vector<cplx> pc(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) pc[i] = std::conj(p[i]);
    for (double x : {x0, 0.5 * (x0 + x_max), x_max}) {
        cplx plus = filon_exp(p, 0.0, dk, x);
        cplx minus = filon_exp(pc, 0.0, dk, -x);
        imag = std::max(imag, std::abs(std::imag(plus + minus)) / (2.0 * M_PI));
    }
    out.imag_residual = imag;
    return out;
}

std::vector<double> solve_marchenko(const MarchenkoKernel& F, double x, double y_max,
                                    double* residual_out) {
    double h = F.h;
    if (y_max < 0.0) y_max = 0.5 * F.x_max();
    std::size_t m = static_cast<std::size_t>(std::round((y_max - x) / h)) + 1;
    if (m < 8) throw ConfigError("solve_marchenko: y range too short");
    if (x + y_max > F.x_max() + 1e-9)
        throw ConfigError("solve_marchenko: F not defined up to x + y_max");

    auto w = simpson_weights(m);
    Eigen::MatrixXd M(m, m);
    Eigen::VectorXd rhs(m);
    for (std::size_t j = 0; j < m; ++j) {
        double y = x + h * static_cast<double>(j);
        for (std::size_t l = 0; l < m; ++l) {
            double t = x + h * static_cast<double>(l);
            M(j, l) = (j == l ? 1.0 : 0.0) + w[l] * h * F.at(t + y);
        }
        rhs(j) = -F.at(x + y);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    if (!(lu.rcond() > 1e-12))
        throw SolverError(Err::SingularFredholm,
                          "I + T numerically singular at x = " + std::to_string(x));
    Eigen::VectorXd a = lu.solve(rhs);
    if (residual_out) {
        double res = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double y = x + h * static_cast<double>(j);
            double r = a(j) + F.at(x + y);
            for (std::size_t l = 0; l < m; ++l)
                r += w[l] * h * a(l) * F.at(x + h * l + y);
            res = std::max(res, std::abs(r));
        }
        *residual_out = res;
    }
    return std::vector<double>(a.data(), a.data() + m);
}

TransformationKernel marchenko_kernel(const MarchenkoKernel& F, double x_max, double y_max) {
    double h = F.h;
    if (y_max < 0.0) y_max = 0.5 * F.x_max();
    std::size_t nx = static_cast<std::size_t>(std::round(x_max / h)) + 1;
    std::size_t ny = static_cast<std::size_t>(std::round(y_max / h)) + 1;
    TransformationKernel A(TransformationKernel::Kind::A_outgoing, h, nx, ny);
    parallel_for(nx, [&](std::size_t i) {
        double x = h * static_cast<double>(i);
        auto row = solve_marchenko(F, x, y_max);
        for (std::size_t j = 0; j < row.size() && i + j < ny; ++j) A.node(i, i + j) = row[j];
    });
    return A;
}

Potential potential_from_A(const TransformationKernel& A) {
    auto d = A.diagonal();
    std::size_t n = d.size();
    if (n < 5) throw ConfigError("potential_from_A: diagonal too short");
    double h = A.step();

    // five-point derivative, one-sided at the ends
    std::vector<double> q(n);
    auto d5 = [&](std::size_t i) {
        return (-d[i + 2] + 8.0 * d[i + 1] - 8.0 * d[i - 1] + d[i - 2]) / (12.0 * h);
    };
    for (std::size_t i = 2; i + 2 < n; ++i) q[i] = -2.0 * d5(i);
    q[0] = -2.0 * (-25.0 * d[0] + 48.0 * d[1] - 36.0 * d[2] + 16.0 * d[3] - 3.0 * d[4]) / (12.0 * h);
    q[1] = -2.0 * (-3.0 * d[0] - 10.0 * d[1] + 18.0 * d[2] - 6.0 * d[3] + d[4]) / (12.0 * h);
    q[n - 2] = -2.0 * (3.0 * d[n - 1] + 10.0 * d[n - 2] - 18.0 * d[n - 3] + 6.0 * d[n - 4] - d[n - 5]) /
               (12.0 * h);
    q[n - 1] = -2.0 * (25.0 * d[n - 1] - 48.0 * d[n - 2] + 36.0 * d[n - 3] - 16.0 * d[n - 4] +
                       3.0 * d[n - 5]) /
               (12.0 * h);

    // derivative-amplification guard: 3- vs 5-point disagreement
    double sup = 0.0, dis = 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        double q3 = -2.0 * (d[i + 1] - d[i - 1]) / (2.0 * h);
        sup = std::max(sup, std::abs(q[i]));
        dis = std::max(dis, std::abs(q[i] - q3));
    }
    if (dis > 0.5 * sup + 0.1)
        throw SolverError(Err::DiagonalTooNoisy, "stencil disagreement " + std::to_string(dis));
    return Potential(std::move(q), h, A.x_max());
}

ScatteringData scattering_from_F(const MarchenkoKernel& F, const std::vector<double>& k_grid) {
    ScatteringData sd;
    sd.k_grid = k_grid;
    double h = F.h;

    std::vector<double> kj, sj;
    if (F.x0 < -1.0) {
        // scale of the smooth part near the origin
        double smooth_scale = 0.0;
        for (double x = 0.0; x <= std::min(1.0, F.x_max()); x += h)
            smooth_scale = std::max(smooth_scale, std::abs(F.at(x)));
        double left = std::abs(F.F.front());
        if (left > 3.0 * smooth_scale + 1e-8) {
            // exponential fit on [x0, x0/2] via a Hankel pencil
            std::size_t M = 48;
            double span = -F.x0 / 2.0;
            std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(span / (h * M)));
            double step = h * static_cast<double>(stride);
            M = std::min<std::size_t>(M, static_cast<std::size_t>(span / step));
            std::vector<double> g(M);
            for (std::size_t i = 0; i < M; ++i) g[i] = F.at(F.x0 + step * static_cast<double>(i));
            std::size_t p = M / 2;
            std::vector<double> H0(p * p), H1(p * p);
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t j = 0; j < p; ++j) {
                    H0[i * p + j] = g[i + j];
                    H1[i * p + j] = g[i + j + 1];
                }
            Eigen::MatrixXd h0(p, p), h1(p, p);
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t j = 0; j < p; ++j) {
                    h0(i, j) = H0[i * p + j];
                    h1(i, j) = H1[i * p + j];
                }
            Eigen::BDCSVD<Eigen::MatrixXd> svd(h0, Eigen::ComputeThinU | Eigen::ComputeThinV);
            const auto& s = svd.singularValues();
            std::size_t J = 0;
            while (J < p && s(J) > s(0) / 1e6) ++J;
            if (J == 0 || J > 4)
                throw SolverError(Err::PronyIllConditioned, "rank detection failed, J = " +
                                                                std::to_string(J));
            if (J < p && s(J) > s(J - 1) / 1e3)
                throw SolverError(Err::PronyIllConditioned, "no clean singular-value gap");
            Eigen::MatrixXd core = svd.matrixU().leftCols(J).transpose() * h1 *
                                   svd.matrixV().leftCols(J);
            for (std::size_t i = 0; i < J; ++i) core.col(i) /= s(i);
            Eigen::EigenSolver<Eigen::MatrixXd> es(core);
            for (std::size_t i = 0; i < J; ++i) {
                cplx mu = es.eigenvalues()(i);
                if (std::abs(mu.imag()) > 1e-6 * std::abs(mu) || mu.real() <= 0.0 ||
                    mu.real() >= 1.0)
                    throw SolverError(Err::PronyIllConditioned,
                                      "pencil eigenvalue off the decay axis");
                kj.push_back(-std::log(mu.real()) / step);
            }
            std::sort(kj.begin(), kj.end());
            // amplitudes by least squares on the same samples
            std::vector<double> Avm(M * J), bv(M);
            for (std::size_t i = 0; i < M; ++i) {
                double x = F.x0 + step * static_cast<double>(i);
                for (std::size_t j = 0; j < J; ++j) Avm[i * J + j] = std::exp(-kj[j] * x);
                bv[i] = g[i];
            }
            sj = lstsq_tsvd(M, J, Avm, bv, 1e-12);
            for (double s_ : sj)
                if (!(s_ > 0.0))
                    throw SolverError(Err::PronyIllConditioned, "non-positive amplitude");
        }
    }
    sd.kj = kj;
    sd.sj = sj;

    // subtract the discrete part, transform the rest
    std::size_t n = F.F.size();
    std::vector<cplx> fs(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = F.x0 + h * static_cast<double>(i);
        double fd = 0.0;
        for (std::size_t j = 0; j < kj.size(); ++j) fd += sj[j] * std::exp(-kj[j] * x);
        fs[i] = F.F[i] - fd;
    }
    // the transform wants the midpoint value at the structural jump of F
    {
        double t0 = -F.x0 / h;
        if (t0 > 3.0 && std::abs(t0 - std::round(t0)) < 1e-9) {
            std::size_t i0 = static_cast<std::size_t>(std::round(t0));
            if (i0 + 3 < n) {
                cplx left = 3.0 * fs[i0 - 1] - 3.0 * fs[i0 - 2] + fs[i0 - 3];
                cplx right = 3.0 * fs[i0 + 1] - 3.0 * fs[i0 + 2] + fs[i0 + 3];
                fs[i0] = 0.5 * (left + right);
            }
        }
    }
    sd.S.resize(k_grid.size());
    parallel_for(k_grid.size(), [&](std::size_t i) {
        cplx integral = filon_exp(fs, F.x0, h, -k_grid[i]);
        sd.S[i] = 1.0 - integral;
    });
    // resonance shows up as S -> -1 at small k
    cplx s0 = 3.0 * sd.S[0] - 3.0 * sd.S[1] + sd.S[2];
    sd.resonance = s0.real() < 0.0;
    return sd;
}

JostFromA0 jost_from_A0(const std::vector<double>& A0, double h, const std::vector<double>& k_grid,
                        const std::vector<double>& A0x) {
    JostFromA0 out;
    out.k_grid = k_grid;
    std::size_t n = A0.size();
    double sup = 0.0;
    for (double v : A0) sup = std::max(sup, std::abs(v));
    if (std::abs(A0.back()) > 1e-10 + 1e-8 * sup)
        throw ConfigError("jost_from_A0: A(0,y) not decayed at y_max");

    std::vector<cplx> a0c(A0.begin(), A0.end());
    out.f.resize(k_grid.size());
    parallel_for(k_grid.size(), [&](std::size_t i) {
        out.f[i] = 1.0 + filon_exp(a0c, 0.0, h, k_grid[i]);
    });

    auto f_imag = [&](double kappa) {
        std::vector<double> integ(n);
        for (std::size_t i = 0; i < n; ++i) integ[i] = A0[i] * std::exp(-kappa * h * i);
        return 1.0 + simpson(integ, h);
    };
    auto fdot_imag = [&](double kappa) {
        std::vector<double> integ(n);
        for (std::size_t i = 0; i < n; ++i) {
            double y = h * static_cast<double>(i);
            integ[i] = -y * A0[i] * std::exp(-kappa * y);
        }
        return simpson(integ, h);  // d/dkappa f(i kappa)
    };

    double kappa_max = 1.0 + 4.0 * sup;
    std::size_t ns = 200;
    auto ks = linspace(kappa_max / ns * 1e-2, kappa_max, ns);
    double fprev = f_imag(ks[0]);
    for (std::size_t i = 1; i < ns; ++i) {
        double fcur = f_imag(ks[i]);
        if (fprev * fcur < 0.0) {
            double lo = ks[i - 1], hi = ks[i], flo = fprev;
            while (hi - lo > 1e-12) {
                double mid = 0.5 * (lo + hi);
                double fm = f_imag(mid);
                if (flo * fm <= 0.0)
                    hi = mid;
                else {
                    lo = mid;
                    flo = fm;
                }
            }
            out.kj.push_back(0.5 * (lo + hi));
        }
        fprev = fcur;
    }
    out.resonance = std::abs(f_imag(1e-6)) < 1e-3 * (1.0 + sup);

    if (!A0x.empty()) {
        if (A0x.size() != n) throw ConfigError("jost_from_A0: A0x grid mismatch");
        for (double kjv : out.kj) {
            std::vector<double> integ(n);
            for (std::size_t i = 0; i < n; ++i) integ[i] = A0x[i] * std::exp(-kjv * h * i);
            double fp0 = -kjv - A0[0] + simpson(integ, h);
            double g = fdot_imag(kjv);
            out.sj.push_back(2.0 * kjv / (g * fp0));
        }
    }
    return out;
}

std::vector<double> generalized_residual(const std::vector<double>& A0, double h,
                                         const MarchenkoKernel& F,
                                         const std::vector<double>& y_grid) {
    std::size_t n = A0.size();
    std::vector<double> res(y_grid.size());
    // F carries a jump of int q at argument zero; split the convolution
    // there so each piece is smooth under the end-corrected weights.
    auto gregory_range = [&](const std::vector<double>& f, std::size_t i0, std::size_t i1) {
        if (i1 <= i0) return 0.0;
        std::vector<double> seg(f.begin() + i0, f.begin() + i1 + 1);
        return gregory(seg, h);
    };
    for (std::size_t m = 0; m < y_grid.size(); ++m) {
        double y = y_grid[m];
        std::vector<double> integrand(n);
        for (std::size_t i = 0; i < n; ++i) integrand[i] = A0[i] * F.at(h * i + y);
        double conv;
        if (y < 0.0) {
            std::size_t jsplit = static_cast<std::size_t>(std::round(-y / h));
            if (jsplit >= n) jsplit = n - 1;
            if (jsplit >= 3) {
                // the stored F value at the kink is the limit from above;
                // the left piece needs the limit from below
                std::vector<double> left(integrand.begin(), integrand.begin() + jsplit + 1);
                left[jsplit] = 3.0 * left[jsplit - 1] - 3.0 * left[jsplit - 2] + left[jsplit - 3];
                conv = gregory(left, h) + gregory_range(integrand, jsplit, n - 1);
            } else {
                conv = gregory_range(integrand, 0, jsplit) + gregory_range(integrand, jsplit, n - 1);
            }
        } else {
            conv = gregory(integrand, h);
        }
        double a_plus = 0.0, a_minus = 0.0;
        if (y >= 0.0) a_plus = lerp_on(UniformGrid{0.0, h, n}, A0, y);
        if (y < 0.0) a_minus = lerp_on(UniformGrid{0.0, h, n}, A0, -y);
        res[m] = F.at(y) + a_plus + conv - a_minus;
    }
    return res;
}

}  // namespace marchenko
}  // namespace iscat
