#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "skys3/elsolver.hpp"
#include "skys3/model.hpp"
#include "skys3/profile.hpp"
#include "skys3/quadrature.hpp"
#include "skys3/types.hpp"

using namespace skys3;
using namespace skys3::elsolver;

namespace {
const double sqrt2 = std::sqrt(2.0);

double pair_energy(const ShootingResult& s, Radius L) {
    return model::energy(*s.profile, L).total;
}
} // namespace

TEST_CASE("endpoint series carries the forced cubic coefficient") {
    for (double l : {0.7, 1.0, sqrt2, 2.5}) {
        for (double a : {0.3, 1.0, 1.8, 4.0}) {
            const Radius L(l);
            const EndpointSeries s(a, L, ChargeSector{1}, Endpoint::left);
            CHECK(s.slope_coefficient() == doctest::Approx(a).epsilon(1e-15));
            const double b = a * (1 - a * a) * (2 * l * l + a * a) / (15 * (l * l + 2 * a * a));
            CHECK(s.cubic_coefficient() == doctest::Approx(b).epsilon(1e-13).scale(1.0));
            // Value and slope are consistent: F = a psi + b psi^3.
            const double h = 1e-3;
            CHECK(s.value(h) == doctest::Approx(a * h + b * h * h * h).epsilon(1e-14));
            CHECK(s.slope(h) == doctest::Approx(a + 3 * b * h * h).epsilon(1e-14));
        }
    }
}

TEST_CASE("endpoint series leaves only a high-order equation residual") {
    // With the cubic coefficient matched, substituting the series into the
    // field equation leaves O(psi^3); an unmatched cubic term leaves O(psi).
    const Radius L(2.0);
    const double a = 1.5;
    const EndpointSeries s(a, L, ChargeSector{1}, Endpoint::left);
    auto residual_at = [&](double psi) {
        const double b = s.cubic_coefficient();
        return el_residual(a * psi + b * psi * psi * psi, a + 3 * b * psi * psi, 6 * b * psi, psi,
                           L);
    };
    // Frozen independent evaluation: |residual(1e-3)| ~ 3e-15 at a=1.5, L=2.
    CHECK(std::abs(residual_at(1e-3)) <= 1e-13);
    const double r2 = std::abs(residual_at(1e-2));
    const double r1 = std::abs(residual_at(1e-1));
    // Decay by at least two orders per decade (cubic leading order).
    CHECK(r1 / r2 >= 1e2);

    // Mangling the cubic coefficient reintroduces a linear-order residual.
    const double bad = s.cubic_coefficient() + 0.05;
    const double r_bad =
        std::abs(el_residual(a * 1e-3 + bad * 1e-9, a + 3 * bad * 1e-6, 6 * bad * 1e-3, 1e-3, L));
    CHECK(r_bad > 1e3 * std::abs(residual_at(1e-3)));
}

TEST_CASE("endpoint series mirrors at the right end") {
    const Radius L(1.3);
    const double a = 0.8;
    const EndpointSeries left(a, L, ChargeSector{1}, Endpoint::left);
    const EndpointSeries right(a, L, ChargeSector{1}, Endpoint::right);
    const double h = 1e-4;
    // F_right(pi - h) = pi - F_left(h) for charge 1 and equal slopes.
    CHECK(right.value(pi - h) == doctest::Approx(pi - left.value(h)).epsilon(1e-14));
    CHECK(right.slope(pi - h) == doctest::Approx(left.slope(h)).epsilon(1e-12));
}

TEST_CASE("endpoint series rejects non-positive slopes in the unit sector") {
    CHECK_THROWS_AS(EndpointSeries(-0.5, Radius(1.5), ChargeSector{1}, Endpoint::left),
                    std::invalid_argument);
    CHECK_THROWS_AS(EndpointSeries(0.0, Radius(1.5), ChargeSector{1}, Endpoint::left),
                    std::invalid_argument);
}

TEST_CASE("shooting from the identity slope stays on the identity map") {
    // The right endpoint is a singular point of the equation (indicial
    // exponents 1 and -2), so a one-sided traversal amplifies integration
    // noise into the reported boundary miss; the trajectory itself stays on
    // the identity away from the endpoint.
    const Radius L(1.3);
    const ShootingResult r = shoot(L, ChargeSector{1}, 1.0);
    REQUIRE(r.profile.has_value());
    CHECK(r.status != ShootStatus::diverged);
    CHECK(std::abs(r.boundary_miss) <= 1e-4);
    double worst = 0.0;
    const std::size_t m = r.profile->size();
    for (std::size_t i = 0; i + 5 < m; ++i)
        worst = std::max(worst,
                         std::abs(r.profile->values()[i] - r.profile->grid()[i]));
    CHECK(worst <= 1e-6);
    CHECK(model::topological_charge(*r.profile) == 1);
}

TEST_CASE("two-sided matching at the identity slope reproduces the identity map") {
    const Radius L(1.3);
    const ShootingResult r = shoot_two_sided(L, ChargeSector{1}, 1.0, 1.0);
    REQUIRE(r.status == ShootStatus::converged);
    REQUIRE(r.profile.has_value());
    CHECK(r.residual_norm <= 1e-10);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.profile->size(); ++i)
        worst = std::max(worst,
                         std::abs(r.profile->values()[i] - r.profile->grid()[i]));
    CHECK(worst <= 1e-9);
    CHECK(model::topological_charge(*r.profile) == 1);
}

TEST_CASE("clearly wrong slopes leave the admissible window") {
    const ShootingResult r = shoot(Radius(2.0), ChargeSector{1}, 40.0);
    CHECK(r.status == ShootStatus::diverged);
    CHECK_FALSE(r.profile.has_value());
    CHECK(r.psi_fail > 0.0);
    CHECK(r.psi_fail < pi);
}

TEST_CASE("below the critical radius only the identity solves the problem") {
    const auto sols = solve_bvp(Radius(1.2), ChargeSector{1});
    REQUIRE(sols.size() == 1);
    CHECK(sols[0].slope0 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(sols[0].residual_norm <= 1e-8);
}

TEST_CASE("above the critical radius a symmetric pair flanks the identity") {
    const Radius L(2.0);
    const double tol = 1e-8;
    const auto sols = solve_bvp(L, ChargeSector{1}, tol);
    REQUIRE(sols.size() == 3);
    // Sorted by initial slope; the identity sits in the middle.
    CHECK(sols[0].slope0 < 1.0);
    CHECK(sols[1].slope0 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(sols[2].slope0 > 1.0);
    for (const auto& s : sols) {
        CHECK(s.status == ShootStatus::converged);
        CHECK(s.residual_norm <= tol);
        CHECK(model::topological_charge(*s.profile) == 1);
    }

    const double e_minus = pair_energy(sols[0], L);
    const double e_id = pair_energy(sols[1], L);
    const double e_plus = pair_energy(sols[2], L);
    CHECK(std::abs(e_plus - e_minus) <= 1e-8 * e_plus);
    CHECK(e_plus < e_id);
    CHECK(e_id == doctest::Approx(model::identity_energy(L)).epsilon(1e-10));

    // The two pair members are reflections of each other.
    const Profile mirrored = model::reflect_profile(*sols[0].profile);
    for (double psi : {0.4, 1.1, 1.9, 2.8})
        CHECK(mirrored.value_at(psi) ==
              doctest::Approx(sols[2].profile->value_at(psi)).epsilon(1e-6));
}

TEST_CASE("strongly unstable trajectories are recovered by two-sided matching") {
    // At L = 3 the one-sided boundary miss sits on an amplified-noise floor
    // well above the convergence tolerance, so this exercises the fallback.
    const Radius L(3.0);
    const auto sols = solve_bvp(L, ChargeSector{1});
    REQUIRE(sols.size() == 3);
    const double e_minus = pair_energy(sols[0], L);
    const double e_plus = pair_energy(sols[2], L);
    CHECK(std::abs(e_plus - e_minus) <= 1e-8 * e_plus);
    CHECK(e_plus < model::identity_energy(L));
    // Identity energy at this radius: 6 pi^2 (3 + 1/3) = 20 pi^2.
    CHECK(model::identity_energy(L) == doctest::Approx(20 * pi * pi).epsilon(1e-14));
    for (const auto& s : sols) CHECK(s.residual_norm <= 1e-8);
}

TEST_CASE("near the critical radius the close pair is still separated") {
    const Radius L(sqrt2 + 0.002);
    const auto sols = solve_bvp(L, ChargeSector{1});
    REQUIRE(sols.size() == 3);
    CHECK(sols[0].slope0 == doctest::Approx(0.9145022832).epsilon(1e-6));
    CHECK(sols[1].slope0 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(sols[2].slope0 == doctest::Approx(1.0901274851).epsilon(1e-6));
    const double e_minus = pair_energy(sols[0], L);
    const double e_plus = pair_energy(sols[2], L);
    CHECK(std::abs(e_plus - e_minus) <= 1e-8 * e_plus);
    CHECK(e_plus < model::identity_energy(L));
}

TEST_CASE("two-sided matching converges when seeded near a known pair") {
    const Radius L(2.0);
    const ShootingResult r = shoot_two_sided(L, ChargeSector{1}, 3.1886, 0.17189);
    REQUIRE(r.status == ShootStatus::converged);
    CHECK(r.slope0 == doctest::Approx(3.18865245734).epsilon(1e-6));
    CHECK(r.residual_norm <= 1e-8);
    CHECK(model::energy(*r.profile, L).total == doctest::Approx(135.668695822).epsilon(1e-9));
}

TEST_CASE("the negative-charge sector mirrors the positive one") {
    const Radius L(2.0);
    const auto neg = solve_bvp(L, ChargeSector{-1});
    REQUIRE(neg.size() == 3);
    const auto pos = solve_bvp(L, ChargeSector{1});
    for (std::size_t i = 0; i < 3; ++i) {
        // F -> -F: slopes negate (ordering reverses), energies coincide.
        CHECK(neg[i].slope0 == doctest::Approx(-pos[2 - i].slope0).epsilon(1e-9));
        CHECK(model::topological_charge(*neg[i].profile) == -1);
        CHECK(pair_energy(neg[i], L) ==
              doctest::Approx(pair_energy(pos[2 - i], L)).epsilon(1e-10));
    }
}

TEST_CASE("the vacuum sector has no nontrivial solutions") {
    CHECK(solve_bvp(Radius(2.0), ChargeSector{0}).empty());
}

TEST_CASE("solver options are validated") {
    CHECK_THROWS_AS(solve_bvp(Radius(1.5), ChargeSector{1}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_bvp(Radius(1.5), ChargeSector{1}, -1e-8), std::invalid_argument);
    SolveOptions bad;
    bad.slope_min = 2.0;
    bad.slope_max = 1.0;
    CHECK_THROWS_AS(solve_bvp(Radius(1.5), ChargeSector{1}, 1e-8, bad), std::invalid_argument);
    CHECK_THROWS_AS(shoot(Radius(1.5), ChargeSector{1}, 1.0, ShootOptions{.grid_size = 3}),
                    std::invalid_argument);
}

TEST_CASE("an unreachable residual tolerance is reported, not silently violated") {
    // The five-point stencil truncation floor in the soliton wall exceeds
    // such a tolerance at the default grid; the solver must say so.
    CHECK_THROWS_AS(solve_bvp(Radius(5.0), ChargeSector{1}, 1e-13), std::runtime_error);
}
