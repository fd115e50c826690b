#include <doctest.h>

#include <cmath>

#include "iscat/gelfand_levitan.hpp"
#include "iscat/kernels.hpp"
#include "iscat/ode.hpp"
#include "iscat/quadrature.hpp"
#include "iscat/special.hpp"
#include "oracles.hpp"

using namespace iscat;
using namespace iscat::gl;

namespace {

// input-kernel profile of the single-atom chain (k1, r1) with no density
// correction: L(s) = (r1/2k1)(1 - e^{-k1 s}) + c1 (cosh(k1 s) - 1)/k1^2
double chain_profile(double s, double k1, double r1) {
    double c1 = 2.0 * k1 * r1;
    return r1 / k1 * (1.0 - std::exp(-k1 * s)) +
           c1 * (std::cosh(k1 * s) - 1.0) / (k1 * k1);
}

SpectralMeasure chain_measure(double k1, double r1, double kmax, std::size_t n) {
    SpectralMeasure rho;
    double dk = kmax / static_cast<double>(n);
    rho.lambda.resize(n);
    rho.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double k = dk * static_cast<double>(i + 1);
        rho.lambda[i] = k * k;
        rho.w[i] = (k + r1 * k / (k * k + k1 * k1)) / M_PI;
    }
    rho.atoms.emplace_back(-k1 * k1, 2.0 * k1 * r1);
    return rho;
}

}  // namespace

TEST_CASE("free spectral measure gives a vanishing input kernel") {
    SpectralMeasure rho;
    std::size_t n = 2000;
    double dk = 30.0 / n;
    rho.lambda.resize(n);
    rho.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double k = dk * (i + 1);
        rho.lambda[i] = k * k;
        rho.w[i] = k / M_PI;
    }
    auto L = L_from_spectral(rho, 2.0, 0.01);
    for (double v : L.Ls) CHECK(std::abs(v) < 1e-12);
    auto row = gl_row(L, 1.0);
    for (double v : row) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("free density plus one atom matches the closed-form profile") {
    double k1 = 1.0, r1 = 3.0;
    auto rho = chain_measure(k1, r1, 60.0, 12000);
    auto L = L_from_spectral(rho, 1.6, 0.01);
    for (std::size_t m = 0; m < L.Ls.size(); m += 13) {
        double s = 0.01 * static_cast<double>(m);
        CHECK(std::abs(L.Ls[m] - chain_profile(s, k1, r1)) < 1e-5);
    }
    // two-variable form against an independent 2d quadrature of
    // phi0(x) phi0(y) over the measure difference
    double x = 0.7, y = 0.4;
    double direct = 0.0;
    {
        std::size_t nq = 12000;
        double dk = 60.0 / nq;
        std::vector<double> integ(nq + 1, 0.0);
        for (std::size_t i = 1; i <= nq; ++i) {
            double k = dk * static_cast<double>(i);
            double dsig = r1 * k / (k * k + k1 * k1) / M_PI;  // w - k/pi
            integ[i] = 2.0 * std::sin(k * x) * std::sin(k * y) / k * dsig;
        }
        direct = simpson(integ, dk);
        // tail: integrand ~ (r1/pi)[cos(k(x-y)) - cos(k(x+y))]/k^2 past K
        double K = 60.0;
        auto re_t2 = [&](double u) {
            double au = std::abs(u);
            double si_rem = M_PI_2 - sin_integral(K * au);
            return std::cos(K * u) / K - au * si_rem;
        };
        direct += (r1 / M_PI) * (re_t2(x - y) - re_t2(x + y));
        direct += 2.0 * k1 * r1 * std::sinh(k1 * x) * std::sinh(k1 * y) / (k1 * k1);
    }
    CHECK(L.at(x, y) == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("spectral data of the flat well from the forward solver") {
    auto q = oracle::square_well(4.0, 2.0, 0.005, 3.0);
    auto rho = spectral_from_potential(q, 40.0, 8000);
    REQUIRE(rho.atoms.size() == 1);
    CHECK(rho.atoms[0].first == doctest::Approx(-1.571337730179 * 1.571337730179).epsilon(1e-5));
    CHECK(rho.atoms[0].second > 0.0);
    // density positive and asymptotically free
    for (std::size_t i = 0; i < rho.w.size(); i += 500) CHECK(rho.w[i] > 0.0);
    CHECK(rho.w.back() == doctest::Approx(std::sqrt(rho.lambda.back()) / M_PI).epsilon(1e-2));
}

TEST_CASE("round trip through the spectral chain recovers the potential") {
    auto q = oracle::square_well(1.0, 1.0, 0.0025, 2.0);
    auto rho = spectral_from_potential(q, 60.0, 12000);
    auto L = L_from_spectral(rho, 2.0, 0.01);
    auto K = gl_kernel(L, 2.0);
    auto qr = potential_from_K(K);
    for (double x = 0.05; x <= 1.9; x += 0.07) {
        if (std::abs(x - 1.0) < 0.08) continue;  // skip the jump
        CHECK(qr(x) == doctest::Approx(q(x)).epsilon(1e-3).scale(1.0));
    }
    // diagonal identity K(x,x) = (1/2) int_0^x q
    auto d = K.diagonal();
    for (std::size_t i = 0; i < d.size(); i += 20) {
        double x = 0.01 * static_cast<double>(i);
        double want = q.integral(0.0) - q.integral(x);  // int_0^x q
        CHECK(std::abs(d[i] - 0.5 * want) < 5e-4);  // limited by the well's slow spectral tails
    }
}

TEST_CASE("regular kernel from the spectral route matches the direct one") {
    auto q = oracle::square_well(1.0, 1.0, 0.0025, 2.0);
    auto rho = spectral_from_potential(q, 60.0, 12000);
    auto L = L_from_spectral(rho, 1.6, 0.01);
    auto Kgl = gl_kernel(L, 1.6);
    auto Kq = kernels::kernel_K_from_potential(q, 1.6, 0.01);
    double worst = 0.0;
    for (double x = 0.1; x <= 1.6; x += 0.13)
        for (double y = 0.0; y <= x; y += 0.11)
            worst = std::max(worst, std::abs(Kgl.at(x, y) - Kq.at(x, y)));
    CHECK(worst < 5e-4);  // limited by the well's slow spectral tails
}

TEST_CASE("profile recovered from the regular kernel") {
    SUBCASE("zero kernel") {
        TransformationKernel K(TransformationKernel::Kind::K_regular, 0.01, 101, 101);
        auto L = L_profile_from_K(K);
        for (double v : L.Ls) CHECK(std::abs(v) < 1e-14);
    }
    SUBCASE("single-atom chain kernel round trip") {
        // the march resolvent scales with the profile growth, so the
        // meaningful measure is relative to the profile size
        double k1 = 1.0, r1 = 3.0;
        auto rho = chain_measure(k1, r1, 60.0, 12000);
        auto L = L_from_spectral(rho, 0.8, 0.0025);
        auto K = gl_kernel(L, 0.8);
        auto L2 = L_profile_from_K(K);
        double lmax = 0.0, worst = 0.0;
        for (std::size_t m = 0; m < L2.Ls.size(); ++m) {
            lmax = std::max(lmax, std::abs(L.Ls[m]));
            worst = std::max(worst, std::abs(L2.Ls[m] - L.Ls[m]));
        }
        CHECK(worst / (1.0 + lmax) < 5e-6);
        for (std::size_t m = 0; m < L2.Ls.size(); m += 17) {
            double s = 0.0025 * static_cast<double>(m);
            CHECK(std::abs(L.Ls[m] - chain_profile(s, k1, r1)) < 2e-5);
        }
    }
    SUBCASE("constant potential kernel against the forward profile") {
        auto q = Potential(std::vector<double>(601, -0.8), 0.0025, 1.5);
        auto rho = spectral_from_potential(q, 60.0, 12000);
        auto Lfwd = L_from_spectral(rho, 1.2, 0.005);
        auto K = kernels::kernel_K_from_potential(q, 1.2, 0.005);
        auto Lrec = L_profile_from_K(K);
        for (std::size_t m = 0; m < Lrec.Ls.size(); m += 19) {
            CHECK(std::abs(Lrec.Ls[m] - Lfwd.profile_at(0.005 * m)) < 1e-5);
        }
    }
}

TEST_CASE("gl solvability margin is reported") {
    double k1 = 1.0, r1 = 3.0;
    auto rho = chain_measure(k1, r1, 40.0, 8000);
    auto L = L_from_spectral(rho, 1.2, 0.01);
    double sig = 0.0, res = 0.0;
    auto row = gl_row(L, 1.0, &sig, &res);
    CHECK(sig > 0.05);
    CHECK(res < 1e-8);
    CHECK(row.size() == 101);
}

TEST_CASE("atom recovered from the profile by the spectral fit") {
    double k1 = 1.0, r1 = 3.0;
    GLKernel L;
    L.h = 0.01;
    L.b = 1.5;
    std::size_t ns = 301;
    L.Ls.resize(ns);
    for (std::size_t m = 0; m < ns; ++m) L.Ls[m] = chain_profile(0.01 * m, k1, r1);
    auto rho = spectral_from_L(L);
    REQUIRE(rho.atoms.size() == 1);
    double kj = std::sqrt(-rho.atoms[0].first);
    CHECK(kj == doctest::Approx(k1).epsilon(1e-4));
    CHECK(rho.atoms[0].second == doctest::Approx(2.0 * k1 * r1).epsilon(1e-4));
}

TEST_CASE("density bump recovered from the profile by the spectral fit") {
    // dsigma = gaussian bump centred at lambda = 2.5; the profile range
    // sets the k-resolution, so it must extend well past 1/width
    auto bump = [](double k) {
        double lam = k * k;
        return 0.05 * std::exp(-4.0 * (lam - 2.5) * (lam - 2.5));
    };
    GLKernel L;
    L.h = 0.01;
    L.b = 14.0;
    std::size_t ns = 2801;
    L.Ls.assign(ns, 0.0);
    std::size_t nq = 8000;
    double dk = 10.0 / nq;
    for (std::size_t m = 1; m < ns; ++m) {
        double s = 0.01 * static_cast<double>(m);
        double acc = 0.0;
        for (std::size_t i = 1; i <= nq; ++i) {
            double k = dk * i;
            double w = (i == nq) ? 0.5 : 1.0;
            acc += w * 2.0 * (1.0 - std::cos(s * k)) / k * bump(k);
        }
        L.Ls[m] = acc * dk;
    }
    SpectralFitOptions opt;
    opt.k_fit_max = 4.0;
    opt.density_nodes = 96;
    opt.smoothness = 1e-5;
    auto rho = spectral_from_L(L, opt);
    CHECK(rho.atoms.empty());
    double err2 = 0.0;
    for (std::size_t i = 0; i + 1 < rho.lambda.size(); ++i) {
        double k = std::sqrt(rho.lambda[i]);
        double d = rho.w[i] - k / M_PI - bump(k);
        err2 += d * d * (rho.lambda[i + 1] - rho.lambda[i]);
    }
    CHECK(std::sqrt(err2) < 1e-3);
}

TEST_CASE("goursat consistency of the forward regular kernel") {
    auto q = Potential::from_function(
        [](double x) {
            double z = (x - 0.8) / 0.3;
            return 1.1 * std::exp(-z * z);
        },
        1.8, 0.005, 1.8);
    auto K = kernels::kernel_K_from_potential(q, 1.5, 0.01);
    CHECK(kernels::goursat_residual(K, q) < 1e-5);
}
