#include <doctest.h>

#include <cmath>

#include "iscat/errors.hpp"
#include "iscat/scatter.hpp"
#include "oracles.hpp"

using namespace iscat;
using namespace iscat::scatter;

namespace {

std::vector<double> kgrid(double dk, double kmax) {
    std::size_t n = static_cast<std::size_t>(std::round(kmax / dk));
    std::vector<double> kg(n);
    for (std::size_t i = 0; i < n; ++i) kg[i] = dk * static_cast<double>(i + 1);
    return kg;
}

// hand-built rational data: one bound state at k = i, norming constant 6
// (the bound-state chain used across the suite)
ScatteringData rational_one_bound_state(double dk, double kmax) {
    ScatteringData sd;
    sd.k_grid = kgrid(dk, kmax);
    sd.S.resize(sd.k_grid.size());
    for (std::size_t i = 0; i < sd.S.size(); ++i) {
        cplx k(sd.k_grid[i], 0.0);
        sd.S[i] = (k + cplx(0, 1)) * (k + cplx(0, 2)) / ((k - cplx(0, 1)) * (k - cplx(0, 2)));
    }
    sd.kj = {1.0};
    sd.sj = {6.0};
    sd.resonance = false;
    return sd;
}

}  // namespace

TEST_CASE("free data: unit S-matrix, zero phase, zero index") {
    Potential q(std::vector<double>(101, 0.0), 0.01, 1.0);
    auto sd = scattering_from_potential(q, kgrid(0.05, 12.0));
    CHECK(sd.J() == 0);
    CHECK_FALSE(sd.resonance);
    for (const auto& s : sd.S) CHECK(std::abs(s - cplx(1.0, 0.0)) < 1e-12);
    auto ps = phase_shift(sd);
    for (double d : ps.delta) CHECK(std::abs(d) < 1e-12);
    CHECK(s_index(sd) == 0);
}

TEST_CASE("resonance chain: rational S-matrix and half-integer phase at zero") {
    // S = conj(f)/f amplifies f-errors by 1/|f| ~ 1/k near the resonance,
    // so the sampling bias of q must be kept tight
    auto q = oracle::sech2_well(0.002);
    auto sd = scattering_from_potential(q, kgrid(0.01, 12.0));
    CHECK(sd.J() == 0);
    CHECK(sd.resonance);
    double worst = 0.0;
    for (std::size_t i = 0; i < sd.k_grid.size(); ++i) {
        cplx k(sd.k_grid[i], 0.0);
        cplx target = (k + cplx(0, 1)) / (k - cplx(0, 1));
        worst = std::max(worst, std::abs(sd.S[i] - target));
    }
    CHECK(worst < 2e-4);

    auto ps = phase_shift(sd);
    // delta(k) = atan(1/k) on this chain
    std::size_t i1 = 99;  // k = 1
    CHECK(sd.k_grid[i1] == doctest::Approx(1.0));
    CHECK(ps.delta[i1] == doctest::Approx(M_PI / 4.0).epsilon(1e-4));
    CHECK(s_index(sd) == -1);  // J = 0 with a zero-energy resonance
}

TEST_CASE("index counts bound states of a deep well") {
    auto q = oracle::square_well(4.0, 2.0);
    auto sd = scattering_from_potential(q, kgrid(0.01, 12.0));
    CHECK(sd.J() == 1);
    CHECK(s_index(sd) == -2);
    for (double s : sd.sj) CHECK(s > 0.0);
}

TEST_CASE("phase shift rejects non-unitary input") {
    auto sd = rational_one_bound_state(0.02, 10.0);
    sd.S[10] *= 1.1;
    CHECK_THROWS_AS(phase_shift(sd), ConfigError);
}

TEST_CASE("unwrapped phase of the rational bound-state chain lands on pi") {
    auto sd = rational_one_bound_state(0.005, 40.0);
    auto ps = phase_shift(sd);
    // delta(0+) = pi for J = 1 without resonance
    CHECK(ps.delta[0] == doctest::Approx(M_PI).epsilon(1e-2));
    CHECK(s_index(sd) == -2);
}

TEST_CASE("characterization report accepts forward data") {
    auto q = oracle::square_well(1.0, 1.0);
    auto sd = scattering_from_potential(q, kgrid(0.01, 25.0));
    auto rep = validate_characterization(sd);
    CHECK(rep.ok_index);
    CHECK(rep.ok_positivity);
    CHECK(rep.ok_unitarity);
    CHECK(rep.ok_regularity);
    CHECK(rep.all_ok());
}

TEST_CASE("characterization flags violations") {
    auto sd = rational_one_bound_state(0.01, 25.0);
    SUBCASE("negative norming constant") {
        sd.sj[0] = -0.7;
        auto rep = validate_characterization(sd);
        CHECK_FALSE(rep.ok_positivity);
    }
    SUBCASE("scaled S-matrix sample") {
        sd.S[40] *= 1.1;
        auto rep = validate_characterization(sd);
        CHECK_FALSE(rep.ok_unitarity);
    }
}

TEST_CASE("bound-state wronskian product and residue identity") {
    auto q = oracle::square_well(4.0, 2.0);
    auto sd = scattering_from_potential(q, kgrid(0.02, 10.0));
    REQUIRE(sd.J() == 1);
    double kj = sd.kj[0];
    // f'(0, i k_j) f(-i k_j) = -2 k_j
    double fp0 = ode::jost_point(q, cplx(0.0, kj)).fp0.real();
    double fm = ode::jost_point(q, cplx(0.0, -kj)).f.real();
    CHECK(fp0 * fm == doctest::Approx(-2.0 * kj).epsilon(1e-6));
    CHECK(fp0 * fm < 0.0);
    // residue of S at i k_j equals s_j / i
    CHECK(residue_defect(q, sd) < 1e-5);
}

TEST_CASE("norming constant of the closed-form bound-state chain") {
    // s_1 = -2 k_1 / (r_1 fdot(i k_1)^2) = 6 for f = (k-i)/(k+2i), r_1 = 3
    cplx fdot_i = 3.0 * cplx(0, 1) / std::pow(cplx(0, 3), 2);
    double s1 = (-2.0 / (3.0 * (fdot_i * fdot_i))).real();
    CHECK(s1 == doctest::Approx(6.0).epsilon(1e-14));
}
