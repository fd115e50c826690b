#include <doctest.h>

#include <cmath>
#include <random>

#include "iscat/errors.hpp"
#include "iscat/ode.hpp"
#include "oracles.hpp"

using namespace iscat;

namespace {
Potential zero_potential() {
    return Potential(std::vector<double>(201, 0.0), 0.005, 1.0);
}
}  // namespace

TEST_CASE("free Jost solution is the plane wave") {
    auto q = zero_potential();
    for (double k : {0.3, 1.0, 6.0}) {
        auto jp = ode::jost_point(q, cplx(k, 0.0));
        CHECK(std::abs(jp.f - cplx(1.0, 0.0)) < 1e-14);
        CHECK(std::abs(jp.fp0 - cplx(0.0, k)) < 1e-13 * k);
        auto prof = ode::jost_profile(q, cplx(k, 0.0));
        for (std::size_t i = 0; i < prof.f.size(); i += 40) {
            double x = q.grid()[i];
            CHECK(std::abs(prof.f[i] - std::exp(cplx(0.0, k * x))) < 1e-13);
        }
    }
}

TEST_CASE("square well against the adaptive oracle") {
    auto q = oracle::square_well(1.0, 1.0);
    // frozen Cash-Karp (tol 1e-12) values for the grid potential
    const cplx f05(0.57670132109847, -0.14319980047454);
    const cplx f10(0.671989289547698, -0.246157416235518);
    const cplx f20(0.896741090540955, -0.268442791375234);
    const cplx fp10(0.6235289879758, 1.25971310635446);
    CHECK(std::abs(ode::jost_point(q, cplx(0.5, 0.0)).f - f05) < 1e-8);
    CHECK(std::abs(ode::jost_point(q, cplx(1.0, 0.0)).f - f10) < 1e-8);
    CHECK(std::abs(ode::jost_point(q, cplx(2.0, 0.0)).f - f20) < 1e-8);
    CHECK(std::abs(ode::jost_point(q, cplx(1.0, 0.0)).fp0 - fp10) < 1e-8);
}

TEST_CASE("truncated sech^2 well reproduces the rational Jost function") {
    auto q = oracle::sech2_well();
    double worst = 0.0;
    for (double k = 0.2; k <= 5.0; k += 0.2) {
        cplx target = cplx(k, 0.0) / cplx(k, 1.0);
        cplx got = ode::jost_point(q, cplx(k, 0.0)).f;
        worst = std::max(worst, std::abs(got - target) / std::abs(target));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("regular pair: free solutions and initial conditions") {
    auto q = zero_potential();
    for (double k : {0.7, 2.0, 60.0}) {
        auto rp = ode::solve_regular(q, cplx(k, 0.0));
        CHECK(std::abs(rp.phi[0]) < 1e-14);
        CHECK(std::abs(rp.phi_p[0] - cplx(1.0, 0.0)) < 1e-12);
        CHECK(std::abs(rp.psi[0] - cplx(1.0, 0.0)) < 1e-14);
        CHECK(std::abs(rp.psi_p[0]) < 1e-12);
        for (std::size_t i = 0; i < rp.x_grid.size(); i += 50) {
            double x = rp.x_grid[i];
            CHECK(std::abs(rp.phi[i] - std::sin(k * x) / k) < 2e-9 * (1.0 + 1.0 / k));
            CHECK(std::abs(rp.psi[i] - std::cos(k * x)) < 2e-9 * k);
        }
    }
    // k -> 0 limit: phi = x, psi = 1
    auto rp0 = ode::solve_regular(q, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < rp0.x_grid.size(); i += 50) {
        CHECK(std::abs(rp0.phi[i] - rp0.x_grid[i]) < 1e-13);
        CHECK(std::abs(rp0.psi[i] - 1.0) < 1e-13);
    }
}

TEST_CASE("regular solution matches the oracle inside the well") {
    auto q = oracle::square_well(1.0, 1.0);
    auto rp = ode::solve_regular(q, cplx(2.0, 0.0));
    std::size_t i1 = 200;  // x = 1.0
    CHECK(rp.x_grid[i1] == doctest::Approx(1.0));
    CHECK(std::abs(rp.phi[i1] - cplx(0.351845644083115, 0.0)) < 1e-8);
    CHECK(std::abs(rp.phi_p[i1] - cplx(-0.616831793160815, 0.0)) < 1e-8);
}

TEST_CASE("wronskian of the regular pair stays pinned") {
    auto q = oracle::square_well(1.0, 1.0);
    for (double k : {0.2, 1.5, 4.0}) {
        auto rp = ode::solve_regular(q, cplx(k, 0.0));
        for (std::size_t i = 0; i < rp.x_grid.size(); i += 25) {
            cplx w = rp.psi[i] * rp.phi_p[i] - rp.psi_p[i] * rp.phi[i];
            CHECK(std::abs(w - cplx(1.0, 0.0)) < 1e-9);
        }
    }
}

TEST_CASE("bound states of a well against the shooting oracle") {
    auto q = oracle::square_well(4.0, 2.0);
    auto bs = ode::bound_states(q);
    REQUIRE(bs.kj.size() == 1);
    CHECK(bs.kj[0] == doctest::Approx(1.571337730179).epsilon(1e-6));
    CHECK_FALSE(bs.resonance);

    auto deep = oracle::square_well(6.0, 2.0);
    auto bs2 = ode::bound_states(deep);
    REQUIRE(bs2.kj.size() == 2);
    CHECK(bs2.kj[0] == doctest::Approx(0.339865238584).epsilon(1e-6));
    CHECK(bs2.kj[1] == doctest::Approx(2.080538585556).epsilon(1e-6));
}

TEST_CASE("zero potential has no bound states and no resonance") {
    auto q = zero_potential();
    auto bs = ode::bound_states(q);
    CHECK(bs.kj.empty());
    CHECK_FALSE(bs.resonance);
}

TEST_CASE("resonance flag fires on the sech^2 chain") {
    auto q = oracle::sech2_well();
    auto bs = ode::bound_states(q);
    CHECK(bs.kj.empty());
    CHECK(bs.resonance);
}

TEST_CASE("wronskian identity on a forward table") {
    auto q = oracle::square_well(4.0, 2.0);
    auto kg = linspace(0.05, 30.0, 600);
    auto t = ode::solve_jost(q, kg);
    CHECK(ode::wronskian_defect(t) < 1e-6);
}

TEST_CASE("entire-type bound along the continued imaginary ray") {
    auto q = oracle::square_well(1.0, 1.0);
    double a = 1.0;
    for (double kappa : {0.5, 1.0, 2.0}) {
        double f = std::abs(ode::jost_point(q, cplx(0.0, -kappa)).f);
        CHECK(f <= 2.0 * std::exp(2.0 * a * kappa));
    }
}

TEST_CASE("large-k limit of f approaches one at the inverse-k rate") {
    auto q = oracle::square_well(1.0, 1.0);
    double a00 = 0.5 * q.integral(0.0);  // A(0,0) = (1/2) int q
    double prev = 1e9;
    for (double k : {15.0, 30.0, 60.0}) {
        cplx f = ode::jost_point(q, cplx(k, 0.0)).f;
        double dev = std::abs(cplx(0.0, k) * (f - 1.0) + a00);
        CHECK(dev < 0.3 * std::abs(a00));
        CHECK(dev < prev + 1e-12);
        prev = dev;
    }
}

TEST_CASE("validation rejects bad inputs") {
    std::vector<double> nan_q(50, 0.0);
    nan_q[10] = std::nan("");
    CHECK_THROWS_AS(Potential(std::move(nan_q), 0.01, 0.3), SolverError);
    auto q = zero_potential();
    CHECK_THROWS_AS(ode::solve_jost(q, {0.5, 0.4}), ConfigError);
    CHECK_THROWS_AS(ode::solve_jost(q, {-1.0, 0.4}), ConfigError);
}

TEST_CASE("property: random smooth bumps keep the wronskian and unit S") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> amp(-3.0, 3.0), cen(0.4, 1.6), wid(0.15, 0.5);
    for (int trial = 0; trial < 4; ++trial) {
        double A = amp(rng), c = cen(rng), w = wid(rng);
        auto q = Potential::from_function(
            [&](double x) {
                double z = (x - c) / w;
                return A * std::exp(-z * z);
            },
            3.0, 0.005, 3.0);
        auto kg = linspace(0.1, 20.0, 240);
        auto t = ode::solve_jost(q, kg);
        CHECK(ode::wronskian_defect(t) < 1e-6);
        for (std::size_t i = 0; i < kg.size(); i += 17) {
            cplx S = std::conj(t.f0[i]) / t.f0[i];
            CHECK(std::abs(std::abs(S) - 1.0) < 1e-12);
        }
    }
}
