#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "skys3/elsolver.hpp"
#include "skys3/hessian.hpp"
#include "skys3/model.hpp"
#include "skys3/profile.hpp"
#include "skys3/quadrature.hpp"
#include "skys3/types.hpp"

using namespace skys3;
using namespace skys3::hessian;

namespace {

const double sqrt2 = std::sqrt(2.0);

double mode_g_product(const SpectrumResult& sr, std::size_t i, std::size_t j,
                      const QuadratureRule& rule) {
    std::vector<double> u(rule.size()), v(rule.size());
    for (std::size_t k = 0; k < rule.size(); ++k) {
        u[k] = eval_sine_series(sr.coefficients[i], rule.nodes()[k]);
        v[k] = eval_sine_series(sr.coefficients[j], rule.nodes()[k]);
    }
    return model::inner_g(u, v, rule);
}

int sign_changes(const std::vector<double>& values) {
    int changes = 0;
    double prev = 0.0;
    for (double v : values) {
        if (std::abs(v) < 1e-9) continue; // endpoint zeros and grid hits
        if (prev != 0.0 && (v < 0) != (prev < 0)) ++changes;
        prev = v;
    }
    return changes;
}

} // namespace

TEST_CASE("closed-form eigenvalues at frozen reference points") {
    CHECK(analytic_lambda(0, Radius(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(analytic_lambda(1, Radius(2.0)) == doctest::Approx(14.0).epsilon(1e-15));
    CHECK(analytic_lambda(2, Radius(1.0)) == doctest::Approx(37.0).epsilon(1e-15));
    // The lowest eigenvalue is 2/L - L: zero exactly at L = sqrt(2).
    CHECK(std::abs(analytic_lambda(0, Radius(sqrt2))) <= 1e-15);
    for (double l : {0.6, 1.1, 1.9, 3.3})
        CHECK(analytic_lambda(0, Radius(l)) == doctest::Approx(2 / l - l).epsilon(1e-15));
    // General n at a generic radius.
    const double l = 1.7;
    for (int n : {0, 1, 2, 5, 10})
        CHECK(analytic_lambda(n, Radius(l)) ==
              doctest::Approx((2 / l) * (n * n + 4 * n + 1) + l * (n * n + 4 * n - 1))
                  .epsilon(1e-15));
}

TEST_CASE("closed-form eigenmode coefficient patterns") {
    // Even modes: odd sines with odd-integer coefficients; odd modes: even
    // sines with even-integer coefficients.
    auto trimmed = [](int n) {
        auto c = analytic_mode(n);
        while (!c.empty() && c.back() == 0.0) c.pop_back();
        return c;
    };
    CHECK(trimmed(0) == std::vector<double>{1});
    CHECK(trimmed(1) == std::vector<double>{0, 2});
    CHECK(trimmed(2) == std::vector<double>{1, 0, 3});
    CHECK(trimmed(3) == std::vector<double>{0, 2, 0, 4});
    CHECK(trimmed(4) == std::vector<double>{1, 0, 3, 0, 5});
}

TEST_CASE("sine series evaluation and derivative") {
    const std::vector<double> c{0.5, -1.0, 0.25};
    for (double psi : {0.3, 1.4, 2.9}) {
        const double expected =
            0.5 * std::sin(psi) - std::sin(2 * psi) + 0.25 * std::sin(3 * psi);
        const double expected_slope =
            0.5 * std::cos(psi) - 2 * std::cos(2 * psi) + 0.75 * std::cos(3 * psi);
        CHECK(eval_sine_series(c, psi) == doctest::Approx(expected).epsilon(1e-15));
        CHECK(eval_sine_series_slope(c, psi) == doctest::Approx(expected_slope).epsilon(1e-14));
    }
}

TEST_CASE("closed-form modes have the frozen weighted norms") {
    const auto rule = QuadratureRule::gauss_legendre_composite();
    const double p2 = pi * pi;
    const double expected[] = {1.5 * p2, 4 * p2, 7.5 * p2, 12 * p2};
    for (int n = 0; n < 4; ++n) {
        const auto c = analytic_mode(n);
        std::vector<double> v(rule.size());
        for (std::size_t k = 0; k < rule.size(); ++k)
            v[k] = eval_sine_series(c, rule.nodes()[k]);
        CHECK(model::inner_g(v, v, rule) == doctest::Approx(expected[n]).epsilon(1e-12));
    }
}

TEST_CASE("second variation about the identity equals eigenvalue times norm") {
    const auto rule = QuadratureRule::gauss_legendre_composite();
    const double p2 = pi * pi;
    const double gnorm[] = {1.5 * p2, 4 * p2, 7.5 * p2, 12 * p2};
    for (double l : {1.0, sqrt2, 2.0}) {
        const Radius L(l);
        const Profile id = model::identity_profile();
        for (int n = 0; n < 4; ++n) {
            const double d2u = second_variation_modes(id, analytic_mode(n), L, rule);
            CHECK(d2u == doctest::Approx(analytic_lambda(n, L) * gnorm[n])
                             .epsilon(1e-11)
                             .scale(gnorm[n]));
        }
    }
}

TEST_CASE("grid-sampled and coefficient forms of the second variation agree") {
    const Radius L(1.8);
    const Profile id = model::identity_profile();
    const auto rule = QuadratureRule::gauss_legendre_composite();
    const auto c = analytic_mode(1);
    std::vector<double> xi(id.size());
    for (std::size_t i = 0; i < id.size(); ++i)
        xi[i] = eval_sine_series(c, id.grid()[i]);
    const double via_grid = second_variation(id, xi, L, rule);
    const double via_modes = second_variation_modes(id, c, L, rule);
    CHECK(via_grid == doctest::Approx(via_modes).epsilon(1e-10));
}

TEST_CASE("reduced Sturm-Liouville operator maps eigenmodes to scaled eigenmodes") {
    // T xi_n = lambda_n (L/(L^2+2)) sin^2(psi) xi_n.
    for (double l : {1.0, 2.0}) {
        const Radius L(l);
        const std::vector<double> points{0.4, 1.0, 1.6, 2.3, 2.9};
        for (int n = 0; n < 4; ++n) {
            const auto c = analytic_mode(n);
            const auto applied = sl_operator_apply(c, L, points);
            const double scale = analytic_lambda(n, L) * l / (l * l + 2);
            for (std::size_t k = 0; k < points.size(); ++k) {
                const double s = std::sin(points[k]);
                const double expected = scale * s * s * eval_sine_series(c, points[k]);
                CHECK(applied[k] == doctest::Approx(expected).epsilon(1e-10).scale(1.0));
            }
        }
    }
}

TEST_CASE("Galerkin spectrum about the identity reproduces the closed form") {
    const Profile id = model::identity_profile();
    for (double l : {1.0, sqrt2}) {
        const Radius L(l);
        const auto sr = spectrum(id, L, ModeBasis{32}, 6);
        REQUIRE(sr.eigenvalues.size() == 6);
        CHECK(sr.about == "identity");
        for (int n = 0; n < 6; ++n) {
            const double exact = analytic_lambda(n, L);
            if (std::abs(exact) < 1e-6)
                CHECK(std::abs(sr.eigenvalues[n] - exact) <= 1e-8);
            else
                CHECK(sr.eigenvalues[n] == doctest::Approx(exact).epsilon(1e-10));
        }
        // Ascending order.
        for (int n = 1; n < 6; ++n) CHECK(sr.eigenvalues[n] > sr.eigenvalues[n - 1]);
    }
}

TEST_CASE("spectrum modes are orthonormal in the weighted inner product") {
    const auto rule = QuadratureRule::gauss_legendre_composite();
    const auto sr = spectrum(model::identity_profile(), Radius(1.0), ModeBasis{32}, 6);
    REQUIRE(sr.coefficients.size() == 6);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i; j < 6; ++j) {
            const double g = mode_g_product(sr, i, j, rule);
            const double expected = i == j ? 1.0 : 0.0;
            CHECK(std::abs(g - expected) <= 1e-10);
        }
}

TEST_CASE("mode n oscillates n times inside the interval") {
    const auto sr = spectrum(model::identity_profile(), Radius(1.0), ModeBasis{32}, 7);
    REQUIRE(sr.modes.size() == 7);
    for (int n = 0; n < 7; ++n) CHECK(sign_changes(sr.modes[n]) == n);
}

TEST_CASE("mode sign convention fixes the largest coefficient positive") {
    const auto sr = spectrum(model::identity_profile(), Radius(1.3), ModeBasis{32}, 5);
    for (const auto& c : sr.coefficients) {
        double largest = 0.0;
        for (double v : c)
            if (std::abs(v) > std::abs(largest)) largest = v;
        CHECK(largest > 0.0);
    }
}

TEST_CASE("finite-difference discretization cross-checks the Galerkin spectrum") {
    const Profile id = model::identity_profile();
    const Radius L(sqrt2);
    SpectrumOptions fd_opts;
    fd_opts.method = SpectrumMethod::finite_difference;
    fd_opts.fd_nodes = 801;
    const auto fd = spectrum(id, L, ModeBasis{32}, 4, fd_opts);
    CHECK(fd.method == SpectrumMethod::finite_difference);
    for (int n = 0; n < 4; ++n) {
        const double exact = analytic_lambda(n, L);
        // Second-order discretization on 801 nodes.
        CHECK(std::abs(fd.eigenvalues[n] - exact) <= 1e-3 * std::max(1.0, std::abs(exact)));
    }
}

TEST_CASE("spectrum about the stable soliton is positive definite") {
    const Radius L(2.0);
    const auto sols = elsolver::solve_bvp(L, ChargeSector{1});
    REQUIRE(sols.size() == 3);
    // sols[0] is the small-slope pair member, sols[1] the identity.
    const auto sky = spectrum(*sols[0].profile, L, ModeBasis{48}, 4);
    CHECK(sky.about == "numeric");
    CHECK(sky.eigenvalues[0] > 0.0);
    const auto id = spectrum(*sols[1].profile, L, ModeBasis{48}, 4);
    CHECK(id.eigenvalues[0] == doctest::Approx(2.0 / 2.0 - 2.0).epsilon(1e-8));

    // Both discretizations agree about the soliton too.
    SpectrumOptions fd_opts;
    fd_opts.method = SpectrumMethod::finite_difference;
    fd_opts.fd_nodes = 801;
    const auto sky_fd = spectrum(*sols[0].profile, L, ModeBasis{48}, 4, fd_opts);
    for (int n = 0; n < 4; ++n)
        CHECK(std::abs(sky_fd.eigenvalues[n] - sky.eigenvalues[n]) <=
              2e-3 * std::max(1.0, std::abs(sky.eigenvalues[n])));
}

TEST_CASE("basis must leave a truncation margin above the requested modes") {
    CHECK_THROWS_AS(spectrum(model::identity_profile(), Radius(1.0), ModeBasis{10}, 6),
                    std::invalid_argument);
}
