#include <doctest.h>

#include <cmath>

#include "iscat/errors.hpp"
#include "iscat/ifunction.hpp"
#include "oracles.hpp"

using namespace iscat;
using namespace iscat::ifn;

namespace {

std::vector<double> kgrid(double dk, double kmax) {
    std::size_t n = static_cast<std::size_t>(std::round(kmax / dk));
    std::vector<double> kg(n);
    for (std::size_t i = 0; i < n; ++i) kg[i] = dk * static_cast<double>(i + 1);
    return kg;
}

// Weyl-function samples of the two closed-form chains
IFunctionData chain_bound_state(double dk, double kmax, double k1 = 1.0, double r1 = 3.0) {
    IFunctionData d;
    d.k_grid = kgrid(dk, kmax);
    d.I.resize(d.k_grid.size());
    for (std::size_t i = 0; i < d.I.size(); ++i) {
        cplx k(d.k_grid[i], 0.0);
        d.I[i] = cplx(0, 1) * k + cplx(0, r1) / (k - cplx(0, k1));
    }
    d.poles.emplace_back(k1, r1);
    return d;
}

IFunctionData chain_resonance(double dk, double kmax, double r0 = 1.0) {
    IFunctionData d;
    d.k_grid = kgrid(dk, kmax);
    d.I.resize(d.k_grid.size());
    for (std::size_t i = 0; i < d.I.size(); ++i) {
        double k = d.k_grid[i];
        d.I[i] = cplx(0.0, k + r0 / k);
    }
    d.r0 = r0;
    return d;
}

}  // namespace

TEST_CASE("weyl function of the free and sech^2 problems") {
    Potential q0(std::vector<double>(201, 0.0), 0.01, 2.0);
    auto d0 = I_from_potential(q0, kgrid(0.05, 10.0));
    for (std::size_t i = 0; i < d0.I.size(); ++i)
        CHECK(std::abs(d0.I[i] - cplx(0.0, d0.k_grid[i])) < 1e-12);
    CHECK(d0.poles.empty());
    CHECK(d0.r0 == 0.0);

    auto qs = oracle::sech2_well(0.002);
    auto ds = I_from_potential(qs, kgrid(0.02, 10.0));
    CHECK(ds.resonant());
    CHECK(ds.r0 == doctest::Approx(1.0).epsilon(1e-3));
    for (std::size_t i = 0; i < ds.I.size(); i += 40) {
        double k = ds.k_grid[i];
        cplx target(0.0, k + 1.0 / k);
        CHECK(std::abs(ds.I[i] - target) < 2e-4 * (1.0 + std::abs(target)));
    }
    // Herglotz positivity on forward data
    for (auto& v : ds.I) CHECK(v.imag() > 0.0);
}

TEST_CASE("pole data read back from the samples") {
    SUBCASE("free") {
        auto d = chain_bound_state(0.005, 200.0, 1.0, 0.0);
        d.poles.clear();
        auto pe = poles_from_I(d.k_grid, d.I);
        CHECK(pe.r0 == 0.0);
        CHECK(pe.poles.empty());
    }
    SUBCASE("single bound state") {
        auto d = chain_bound_state(0.005, 200.0);
        auto pe = poles_from_I(d.k_grid, d.I);
        CHECK(pe.r0 == 0.0);
        REQUIRE(pe.poles.size() == 1);
        CHECK(pe.poles[0].first == doctest::Approx(1.0).epsilon(2e-5));
        CHECK(pe.poles[0].second == doctest::Approx(3.0).epsilon(2e-5));
    }
    SUBCASE("zero-energy resonance") {
        auto d = chain_resonance(0.005, 200.0);
        auto pe = poles_from_I(d.k_grid, d.I);
        CHECK(pe.poles.empty());
        CHECK(pe.r0 == doctest::Approx(1.0).epsilon(1e-5));
    }
}

TEST_CASE("jost function rebuilt from the boundary values") {
    SUBCASE("free") {
        auto d = chain_bound_state(0.01, 100.0, 1.0, 0.0);
        d.poles.clear();
        auto F = jost_from_I(d);
        for (double k : {0.5, 2.0, 10.0})
            CHECK(std::abs(F.eval_real(k) - cplx(1.0, 0.0)) < 1e-8);
    }
    SUBCASE("bound-state chain") {
        auto d = chain_bound_state(0.005, 200.0);
        auto F = jost_from_I(d);
        CHECK(F.factorization_defect() < 1e-6);
        for (double k : {0.1, 0.7, 1.0, 5.0, 20.0}) {
            cplx kk(k, 0.0);
            cplx target = (kk - cplx(0, 1)) / (kk + cplx(0, 2));
            CHECK(std::abs(F.eval_real(k) - target) < 2e-5);
        }
        // imaginary axis: f(i kappa) = (kappa - 1)/(kappa + 2)
        for (double kap : {0.5, 1.0, 3.0}) {
            double target = (kap - 1.0) / (kap + 2.0);
            CHECK(F.eval_imag(kap) == doctest::Approx(target).epsilon(1e-5).scale(1.0));
        }
    }
    SUBCASE("resonance chain") {
        auto d = chain_resonance(0.005, 200.0);
        auto F = jost_from_I(d);
        for (double k : {0.1, 1.0, 10.0}) {
            cplx kk(k, 0.0);
            cplx target = kk / (kk + cplx(0, 1));
            CHECK(std::abs(F.eval_real(k) - target) < 2e-5);
        }
    }
    SUBCASE("non-herglotz input is rejected") {
        auto d = chain_bound_state(0.01, 50.0);
        d.I[40] = cplx(1.0, -0.5);
        CHECK_THROWS_AS(jost_from_I(d), SolverError);
    }
}

TEST_CASE("scattering data recovered through the factorization") {
    SUBCASE("resonance chain") {
        auto d = chain_resonance(0.005, 200.0);
        auto sd = scattering_from_I(d);
        CHECK(sd.J() == 0);
        CHECK(sd.resonance);
        for (std::size_t i = 0; i < sd.k_grid.size(); i += 499) {
            cplx k(sd.k_grid[i], 0.0);
            cplx target = (k + cplx(0, 1)) / (k - cplx(0, 1));
            CHECK(std::abs(sd.S[i] - target) < 5e-5);
        }
    }
    SUBCASE("square well cross-module") {
        auto q = oracle::square_well(4.0, 2.0, 0.0025, 3.0);
        auto kg = kgrid(0.005, 120.0);
        auto d = I_from_potential(q, kg);
        // rebuild the pole data from samples alone, then reconstruct
        auto pe = poles_from_I(d.k_grid, d.I);
        REQUIRE(pe.poles.size() == 1);
        IFunctionData d2 = d;
        d2.poles = pe.poles;
        d2.r0 = pe.r0;
        auto sd_rec = scattering_from_I(d2);
        auto sd_fwd = scatter::scattering_from_potential(q, kg);
        CHECK(sd_rec.kj[0] == doctest::Approx(sd_fwd.kj[0]).epsilon(1e-3));
        CHECK(sd_rec.sj[0] == doctest::Approx(sd_fwd.sj[0]).epsilon(5e-3));
        // formula-level consistency on forward data: s_j from the residue
        // form equals s_j from the wronskian form
        {
            double kj = sd_fwd.kj[0];
            double h = 1e-4 * kj;
            auto fr = [&](double kk) { return ode::jost_point(q, cplx(0.0, kk)).f.real(); };
            double g = (-fr(kj + 2 * h) + 8.0 * fr(kj + h) - 8.0 * fr(kj - h) + fr(kj - 2 * h)) /
                       (12.0 * h);
            double fp0 = ode::jost_point(q, cplx(0.0, kj)).fp0.real();
            double rj = fp0 / g;                      // residue of I at i k_j (over i)
            double s_res = 2.0 * kj / (rj * g * g);   // residue form
            double s_wr = 2.0 * kj / (g * fp0);       // wronskian form
            CHECK(s_res == doctest::Approx(s_wr).epsilon(1e-10));
            CHECK(s_wr == doctest::Approx(sd_fwd.sj[0]).epsilon(1e-12));
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < sd_rec.k_grid.size(); i += 37)
            worst = std::max(worst, std::abs(sd_rec.S[i] - sd_fwd.S[i]));
        CHECK(worst < 1e-3);
    }
}

TEST_CASE("representation remainder vanishes exactly on the rational chains") {
    auto tgrid = linspace(0.05, 12.0, 120);
    {
        auto d = chain_bound_state(0.005, 200.0);
        double l1 = 0.0;
        auto a = representation_remainder(d, tgrid, &l1);
        for (double v : a) CHECK(std::abs(v) < 1e-6);
        CHECK(l1 < 1e-5);
    }
    {
        auto d = chain_resonance(0.005, 200.0);
        auto a = representation_remainder(d, tgrid);
        for (double v : a) CHECK(std::abs(v) < 1e-6);
    }
}

TEST_CASE("representation remainder of a square well stays integrable") {
    auto q = oracle::square_well(1.0, 1.0, 0.0025, 2.0);
    auto d = I_from_potential(q, kgrid(0.005, 120.0));
    auto tgrid = linspace(0.02, 16.0, 400);
    double l1 = 0.0;
    auto a = representation_remainder(d, tgrid, &l1);
    CHECK(std::isfinite(l1));
    CHECK(l1 < 10.0);
    double head = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < 40; ++i) head = std::max(head, std::abs(a[i]));
    for (std::size_t i = a.size() - 40; i < a.size(); ++i) tail = std::max(tail, std::abs(a[i]));
    CHECK(head > 1e-3);           // genuinely nonzero
    CHECK(tail < 1e-2 * head);    // decays along t
}

TEST_CASE("spectral data read from the boundary values") {
    SUBCASE("free") {
        auto d = chain_bound_state(0.01, 60.0, 1.0, 0.0);
        d.poles.clear();
        auto rho = spectral_from_I(d);
        CHECK(rho.atoms.empty());
        for (std::size_t i = 0; i < rho.lambda.size(); i += 300)
            CHECK(rho.w[i] == doctest::Approx(std::sqrt(rho.lambda[i]) / M_PI).epsilon(1e-12));
    }
    SUBCASE("bound-state chain") {
        auto d = chain_bound_state(0.01, 60.0);
        auto rho = spectral_from_I(d);
        REQUIRE(rho.atoms.size() == 1);
        CHECK(rho.atoms[0].first == doctest::Approx(-1.0));
        CHECK(rho.atoms[0].second == doctest::Approx(6.0));
        for (std::size_t i = 0; i < rho.lambda.size(); i += 300) {
            double lam = rho.lambda[i];
            double want = (std::sqrt(lam) + 3.0 * std::sqrt(lam) / (lam + 1.0)) / M_PI;
            CHECK(rho.w[i] == doctest::Approx(want).epsilon(1e-12));
        }
    }
    SUBCASE("square well cross-module") {
        auto q = oracle::square_well(1.0, 1.0, 0.005, 2.0);
        auto kg = kgrid(0.01, 40.0);
        auto d = I_from_potential(q, kg);
        auto rho_i = spectral_from_I(d);
        auto rho_q = gl::spectral_from_potential(q, 40.0, kg.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < rho_i.w.size(); ++i)
            worst = std::max(worst, std::abs(rho_i.w[i] - rho_q.w[i]));
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("large-k weyl asymptotics reach the boundary value of q") {
    // valid for potentials continuous everywhere: an interior jump of q
    // radiates an e^{2ika} term into k(I - ik) that never decays
    auto q = Potential::from_function(
        [](double x) { return x <= 1.0 ? -0.5 * (1.0 + std::cos(M_PI * x)) : 0.0; }, 2.0,
        0.0025, 1.0);
    double k = 50.0 * (1.0 + q.sup_abs());
    auto jp = ode::jost_point(q, cplx(k, 0.0));
    cplx I = jp.fp0 / jp.f;
    cplx dev = k * (I - cplx(0.0, k)) - q(0.0) / cplx(0.0, 2.0);
    CHECK(std::abs(dev) < 0.05 * std::abs(q(0.0)));
}
