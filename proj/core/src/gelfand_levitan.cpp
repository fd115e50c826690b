#include "iscat/gelfand_levitan.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "iscat/errors.hpp"
#include "iscat/ode.hpp"
#include "iscat/parallel.hpp"
#include "iscat/quadrature.hpp"
#include "iscat/special.hpp"

namespace iscat {

double SpectralMeasure::dk() const {
    if (lambda.empty()) return 0.0;
    return std::sqrt(lambda[0]);
}

double SpectralMeasure::dsigma_at_k(double k) const {
    double d = dk();
    UniformGrid g{d, d, lambda.size()};
    std::vector<double> tmp(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        double ki = d * static_cast<double>(i + 1);
        tmp[i] = w[i] - ki / M_PI;
    }
    return lerp_on(g, tmp, k);
}

double GLKernel::profile_at(double s) const {
    s = std::abs(s);
    UniformGrid g{0.0, h, Ls.size()};
    if (s >= g.back()) return Ls.back();
    return lerp_on(g, Ls, s);
}

namespace gl {

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

double fdot_imag_axis(const Potential& q, double kappa) {
    double h = 1e-4 * kappa;
    auto fr = [&](double kk) { return ode::jost_point(q, cplx(0.0, kk)).f.real(); };
    return (-fr(kappa + 2 * h) + 8.0 * fr(kappa + h) - 8.0 * fr(kappa - h) + fr(kappa - 2 * h)) /
           (12.0 * h);
}

}  // namespace

SpectralMeasure spectral_from_potential(const Potential& q, double k_max, std::size_t n_k) {
    SpectralMeasure rho;
    double dk = k_max / static_cast<double>(n_k);
    std::vector<double> kg(n_k);
    for (std::size_t i = 0; i < n_k; ++i) kg[i] = dk * static_cast<double>(i + 1);
    auto table = ode::solve_jost(q, kg);
    rho.lambda.resize(n_k);
    rho.w.resize(n_k);
    for (std::size_t i = 0; i < n_k; ++i) {
        rho.lambda[i] = kg[i] * kg[i];
        rho.w[i] = kg[i] / (M_PI * std::norm(table.f0[i]));
    }
    auto bs = ode::bound_states(q);
    for (double kj : bs.kj) {
        double g = fdot_imag_axis(q, kj);
        double fp0 = ode::jost_point(q, cplx(0.0, kj)).fp0.real();
        double cj = 2.0 * kj * fp0 / g;
        if (!(cj > 0.0))
            throw SolverError(Err::IndexMismatch,
                              "spectral atom weight not positive at k_j = " + std::to_string(kj));
        rho.atoms.emplace_back(-kj * kj, cj);
    }
    return rho;
}

GLKernel L_from_spectral(const SpectralMeasure& rho, double b, double h) {
    GLKernel L;
    L.h = h;
    L.b = b;
    std::size_t n = rho.lambda.size();
    double dk = rho.dk();
    double kmax = dk * static_cast<double>(n);

    // density difference against the free measure, on k = 0, dk, ...
    std::vector<double> dsig(n + 1);
    dsig[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        dsig[i + 1] = rho.w[i] - dk * static_cast<double>(i + 1) / M_PI;
    // tail behaviour: |dsigma| must be decaying at k_max
    {
        double mid = 0.0, tail = 0.0;
        std::size_t i_mid0 = n / 2, cnt = n / 10 + 1;
        for (std::size_t i = 0; i < cnt; ++i) {
            mid += std::abs(dsig[std::min(i_mid0 + i, n)]);
            tail += std::abs(dsig[n - i]);
        }
        if (tail > 2.0 * mid + 1e-12 * static_cast<double>(cnt))
            throw SolverError(Err::TailDivergence, "spectral density tail not decaying");
    }
    (void)kmax;
    // Ls(s) = 2 int (1 - cos sk)/k dsigma = C - Re-transform of 2 dsigma/k,
    // with C pinned by Ls(0) = 0.  The same Filon-plus-fitted-tail machinery
    // as the scattering side handles the slow oscillatory tails of dsigma.
    std::vector<cplx> phat(n + 1);
    for (std::size_t i = 1; i <= n; ++i)
        phat[i] = 2.0 * dsig[i] / (dk * static_cast<double>(i));
    phat[0] = 3.0 * phat[1] - 3.0 * phat[2] + phat[3];
    TailFit tail = fit_tail(phat, 0.0, dk, 0.25);
    double C = filon_exp(phat, 0.0, dk, 0.0).real() + tail_re(tail, 0.0);

    std::size_t ns = static_cast<std::size_t>(std::round(2.0 * b / h)) + 1;
    L.Ls.resize(ns);
    parallel_for(ns, [&](std::size_t m) {
        double s = h * static_cast<double>(m);
        if (m == 0) {
            L.Ls[0] = 0.0;
            return;
        }
        double val = C - (filon_exp(phat, 0.0, dk, s).real() + tail_re(tail, s));
        for (const auto& atom : rho.atoms) {
            double kj = std::sqrt(-atom.first);
            val += atom.second * (std::cosh(kj * s) - 1.0) / (kj * kj);
        }
        L.Ls[m] = val;
    });
    return L;
}

std::vector<double> gl_row(const GLKernel& L, double x, double* sigma_min, double* residual) {
    double h = L.h;
    std::size_t m = static_cast<std::size_t>(std::round(x / h)) + 1;
    if (m < 2) return {0.0};
    auto w = simpson_weights(m);
    Eigen::MatrixXd M(m, m);
    Eigen::VectorXd rhs(m);
    for (std::size_t j = 0; j < m; ++j) {
        double y = h * static_cast<double>(j);
        for (std::size_t l = 0; l < m; ++l) {
            double t = h * static_cast<double>(l);
            M(j, l) = (j == l ? 1.0 : 0.0) + w[l] * h * L.at(t, y);
        }
        rhs(j) = -L.at(x, y);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    if (!(lu.rcond() > 1e-12))
        throw SolverError(Err::SingularFredholm,
                          "I + L_x numerically singular at x = " + std::to_string(x));
    Eigen::VectorXd u = lu.solve(rhs);
    if (sigma_min) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
        *sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
    }
    if (residual) {
        double res = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double y = h * static_cast<double>(j);
            double r = u(j) + L.at(x, y);
            for (std::size_t l = 0; l < m; ++l) r += w[l] * h * u(l) * L.at(h * l, y);
            res = std::max(res, std::abs(r));
        }
        *residual = res;
    }
    return std::vector<double>(u.data(), u.data() + m);
}

TransformationKernel gl_kernel(const GLKernel& L, double b) {
    double h = L.h;
    std::size_t nx = static_cast<std::size_t>(std::round(b / h)) + 1;
    TransformationKernel K(TransformationKernel::Kind::K_regular, h, nx, nx);
    parallel_for(nx, [&](std::size_t i) {
        double x = h * static_cast<double>(i);
        auto row = gl_row(L, x);
        for (std::size_t j = 0; j < row.size() && j <= i; ++j) K.node(i, j) = row[j];
    });
    return K;
}

Potential potential_from_K(const TransformationKernel& K) {
    auto d = K.diagonal();
    double h = K.step();
    auto dd = derivative_five_point(d, h);
    std::vector<double> q(dd.size());
    for (std::size_t i = 0; i < dd.size(); ++i) q[i] = 2.0 * dd[i];
    return Potential(std::move(q), h, K.x_max());
}

GLKernel L_profile_from_K(const TransformationKernel& K) {
    GLKernel L;
    double h = K.step();
    L.h = h;
    L.b = K.x_max();
    std::size_t ns = 2 * (K.nx() - 1) + 1;
    L.Ls.assign(ns, 0.0);

    // march in s; each step solves for the newest profile value.  Node
    // spans take end-corrected weights; the partial cells next to the
    // moving endpoints carry integrands vanishing at s' = x (K(x,0) = 0).
    for (std::size_t m = 1; m < ns; ++m) {
        double s = h * static_cast<double>(m);
        double x = 0.5 * s;
        double kxx = K.at(x, x);

        double known = 0.0, coef = 1.0;
        {
            // int_x^{2x} K(x, s'-x) L(s') ds', s' = s endpoint unknown
            std::size_t j0 = static_cast<std::size_t>(std::floor(x / h + 1e-9)) + 1;
            if (j0 <= m) {
                auto w = gregory_weights(m - j0 + 1);
                for (std::size_t j = j0; j < m; ++j)
                    known += w[j - j0] * h * K.at(x, h * static_cast<double>(j) - x) * L.Ls[j];
                coef += w[m - j0] * h * kxx;
                // partial cell [x, j0 h]: integrand rises linearly from 0
                double wp = h * static_cast<double>(j0) - x;
                if (wp > 1e-12 && j0 < m)
                    known += 0.5 * wp * K.at(x, h * static_cast<double>(j0) - x) * L.Ls[j0];
                else if (wp > 1e-12 && j0 == m)
                    coef += 0.5 * wp * kxx;
            }
            // minus int_0^x K(x, x-s') L(s') ds'
            std::size_t j1 = static_cast<std::size_t>(std::floor(x / h + 1e-9));
            if (j1 >= 1) {
                auto w = gregory_weights(j1 + 1);
                double acc = 0.0;
                for (std::size_t j = 0; j <= j1; ++j)
                    acc += w[j] * h * K.at(x, x - h * static_cast<double>(j)) * L.Ls[j];
                double sj = h * static_cast<double>(j1);
                if (x - sj > 1e-12) acc += 0.5 * (x - sj) * K.at(x, x - sj) * L.Ls[j1];
                known -= acc;
            }
        }
        if (std::abs(coef) < 0.1)
            throw SolverError(Err::IterationDivergence,
                              "profile march lost diagonal dominance at s = " + std::to_string(s));
        L.Ls[m] = (-2.0 * kxx - known) / coef;
    }
    return L;
}

SpectralMeasure spectral_from_L(const GLKernel& L, const SpectralFitOptions& opt) {
    std::size_t ns = L.Ls.size();
    double h = L.h;

    // thinned sample set
    std::size_t stride = std::max<std::size_t>(1, ns / 400);
    std::vector<double> s_pts, target;
    for (std::size_t m = 1; m < ns; m += stride) {
        s_pts.push_back(h * static_cast<double>(m));
        target.push_back(L.Ls[m]);
    }
    std::size_t nd = opt.density_nodes;
    double dknode = opt.k_fit_max / static_cast<double>(nd);
    std::vector<double> knodes(nd), wq(nd, dknode);
    for (std::size_t m = 0; m < nd; ++m) knodes[m] = dknode * (static_cast<double>(m) + 0.5);

    // decide the atom count from tail growth
    double head = 1e-14;
    for (std::size_t m = 1; m < ns / 4; ++m) head = std::max(head, std::abs(L.Ls[m]));
    std::size_t n_atoms = 0;
    double k_guess = 1.0;
    if (std::abs(L.Ls[ns - 1]) > 10.0 * head + 1e-10) {
        n_atoms = 1;
        double s2 = h * static_cast<double>(ns - 1);
        double s1 = 0.8 * s2;
        double v2 = std::abs(L.profile_at(s2)), v1 = std::abs(L.profile_at(s1));
        if (v1 > 0.0 && v2 > v1) k_guess = std::log(v2 / v1) / (s2 - s1);
        k_guess = std::max(0.05, std::min(k_guess, 20.0));
    }

    // Everything except the atom positions k_j enters linearly, so the fit
    // minimises over the k_j alone; each evaluation solves the augmented
    // ridge least squares over (c_j, density weights) exactly.
    std::vector<double> betas;
    auto run_fit = [&](std::size_t J, std::vector<double>& p, double& resnorm) {
        std::size_t nr = s_pts.size();
        double data_scale = 0.0;
        for (double v : target) data_scale = std::max(data_scale, std::abs(v));
        double mu = opt.smoothness * (1.0 + data_scale);

        Eigen::MatrixXd D(nr, nd);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t m = 0; m < nd; ++m) {
                double km = knodes[m];
                D(i, m) = wq[m] * 2.0 * (1.0 - std::cos(s_pts[i] * km)) / km;
            }
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(nd, nd);
        for (std::size_t m = 1; m + 1 < nd; ++m) {
            Eigen::VectorXd row = Eigen::VectorXd::Zero(nd);
            row(m - 1) = 1.0;
            row(m) = -2.0;
            row(m + 1) = 1.0;
            P += mu * mu * row * row.transpose();
        }
        Eigen::VectorXd tv = Eigen::Map<const Eigen::VectorXd>(target.data(), nr);

        Eigen::VectorXd coef;  // (c_j..., beta_j..., w...)
        // each atom drags a slow Lorentzian density component along; its
        // profile shape has the closed form (1 - e^{-k_j s})/k_j, so it gets
        // its own linear column rather than burdening the node basis
        auto inner = [&](const std::vector<double>& kvec) {
            std::size_t np = 2 * J + nd;
            Eigen::MatrixXd M(nr, np);
            for (std::size_t j = 0; j < J; ++j)
                for (std::size_t i = 0; i < nr; ++i) {
                    M(i, j) = (std::cosh(kvec[j] * s_pts[i]) - 1.0) / (kvec[j] * kvec[j]);
                    M(i, J + j) = (1.0 - std::exp(-kvec[j] * s_pts[i])) / kvec[j];
                }
            M.rightCols(nd) = D;
            Eigen::MatrixXd N = M.transpose() * M;
            N.bottomRightCorner(nd, nd) += P;
            N.diagonal().head(2 * J).array() +=
                1e-12 * (N.diagonal().head(std::max<std::size_t>(2 * J, 1)).mean());
            coef = Eigen::LDLT<Eigen::MatrixXd>(N).solve(M.transpose() * tv);
            for (std::size_t j = 0; j < J; ++j)
                if (!(coef(j) > 0.0)) return 1e280;  // atom weights must stay positive
            double obj = (tv - M * coef).squaredNorm();
            Eigen::VectorXd w = coef.tail(nd);
            obj += w.transpose() * P * w;
            return obj;
        };

        std::vector<double> kvec(J);
        for (std::size_t j = 0; j < J; ++j) kvec[j] = std::exp(p[2 * j]);
        double obj = J == 0 ? inner(kvec) : 0.0;
        if (J > 0) {
            // coordinate-wise golden-section passes in log k
            const double gr = 0.61803398874989485;
            for (int pass = 0; pass < (J == 1 ? 1 : 4); ++pass) {
                for (std::size_t j = 0; j < J; ++j) {
                    double lo = std::log(kvec[j]) - 0.8, hi = std::log(kvec[j]) + 0.8;
                    auto eval = [&](double lk) {
                        std::vector<double> kv = kvec;
                        kv[j] = std::exp(lk);
                        return inner(kv);
                    };
                    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
                    double f1 = eval(x1), f2 = eval(x2);
                    for (int it = 0; it < 70; ++it) {
                        if (f1 < f2) {
                            hi = x2;
                            x2 = x1;
                            f2 = f1;
                            x1 = hi - gr * (hi - lo);
                            f1 = eval(x1);
                        } else {
                            lo = x1;
                            x1 = x2;
                            f1 = f2;
                            x2 = lo + gr * (hi - lo);
                            f2 = eval(x2);
                        }
                        if (hi - lo < 1e-10) break;
                    }
                    kvec[j] = std::exp(0.5 * (lo + hi));
                }
            }
            obj = inner(kvec);
            if (obj > 1e270) return false;
        }
        for (std::size_t j = 0; j < J; ++j) {
            p[2 * j] = std::log(kvec[j]);
            p[2 * j + 1] = std::log(std::max(coef(j), 1e-300));
        }
        betas.assign(J, 0.0);
        for (std::size_t j = 0; j < J; ++j) betas[j] = coef(J + j);
        for (std::size_t m = 0; m < nd; ++m) p[2 * J + m] = coef(2 * J + m);
        resnorm = std::sqrt(obj);
        return resnorm < 1e-4 * (1.0 + data_scale) * std::sqrt(static_cast<double>(nr));
    };

    double scale = 0.0;
    for (double v : target) scale = std::max(scale, std::abs(v));
    std::vector<double> best_betas;
    std::vector<double> best_p;
    std::size_t best_J = 0;
    double best_res = 1e300;
    std::size_t J_hi = n_atoms == 0 ? 0 : opt.max_atoms;
    for (std::size_t J = n_atoms; J <= J_hi; ++J) {
        std::vector<double> p(2 * J + nd, 0.0);
        for (std::size_t j = 0; j < J; ++j) {
            p[2 * j] = std::log(k_guess * (1.0 + 0.5 * static_cast<double>(j)));
            p[2 * j + 1] = std::log(std::max(1e-3, scale * 1e-2));
        }
        double resn;
        betas.clear();
        bool ok = run_fit(J, p, resn);
        if (ok) best_betas = betas;
        if (std::getenv("ISCAT_FIT_DEBUG"))
            std::fprintf(stderr, "[fit] J=%zu ok=%d resn=%.4e", J, (int)ok, resn),
                std::fprintf(stderr, J ? " k=%.4f c=%.4f\n" : "\n",
                             J ? std::exp(p[0]) : 0.0, J ? std::exp(p[1]) : 0.0);
        if (ok && resn < best_res) {
            best_res = resn;
            best_p = p;
            best_J = J;
        }
        // prefer the smallest atom count that already explains the profile
        if (ok && resn < 1e-6 * (1.0 + scale)) break;
    }
    if (best_p.empty()) {
        std::vector<double> p(nd, 0.0);
        double resn;
        betas.clear();
        if (!run_fit(0, p, resn))
            throw SolverError(Err::FitNotConverged, "spectral fit stalled");
        best_p = p;
        best_betas = betas;
        best_J = 0;
        best_res = resn;
    }

    SpectralMeasure rho;
    std::size_t n_out = 400;
    double dk = opt.k_fit_max / static_cast<double>(n_out);
    rho.lambda.resize(n_out);
    rho.w.resize(n_out);
    UniformGrid gnodes{knodes[0], dknode, nd};
    std::vector<double> wt(nd);
    for (std::size_t m = 0; m < nd; ++m) wt[m] = best_p[2 * best_J + m];
    for (std::size_t i = 0; i < n_out; ++i) {
        double k = dk * static_cast<double>(i + 1);
        rho.lambda[i] = k * k;
        double w = k / M_PI + lerp_on(gnodes, wt, k);
        for (std::size_t j = 0; j < best_J; ++j) {
            double kj = std::exp(best_p[2 * j]);
            w += best_betas[j] * k / (M_PI * (k * k + kj * kj));
        }
        rho.w[i] = w;
    }
    for (std::size_t j = 0; j < best_J; ++j) {
        double kj = std::exp(best_p[2 * j]), cj = std::exp(best_p[2 * j + 1]);
        rho.atoms.emplace_back(-kj * kj, cj);
    }
    return rho;
}

}  // namespace gl
}  // namespace iscat
