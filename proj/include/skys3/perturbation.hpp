#pragma once

#include <array>

#include "skys3/profile.hpp"
#include "skys3/quadrature.hpp"
#include "skys3/types.hpp"

namespace skys3::perturbation {

/// Reading of the amplitude-radius relation near the critical radius.
/// `adopted` is x^2 = (60/11)(L/sqrt2 - 1), under which the x^2 terms of the
/// skyrmion and identity energies cancel exactly and the skyrmion sits below
/// the identity, as it must.  `literal` keeps the extra square root,
/// x^2 = sqrt((60/11)(L/sqrt2 - 1)); it is kept selectable because the
/// numerical branch is the arbiter between the two.
enum class AmplitudeRelation { adopted, literal };

/// Largest amplitude at which the truncated series is trusted (the x^6
/// energy term stays below 1% of the leading one).  Exceeding it is
/// legitimate but should be surfaced as a warning by callers.
inline constexpr double amplitude_guard = 0.5;

/// Truncated expansion of the bifurcating profile about the identity:
/// F = psi + x sin(psi) + (3/20) x^2 sin(2 psi)
///       - x^3 ((29369/316800) sin(psi) - (11/480) sin(3 psi)).
double perturbative_profile(double psi, double x);
/// dF/dpsi of the truncated expansion.
double perturbative_profile_slope(double psi, double x);
/// The expansion tabulated on m uniform nodes, with exact slopes.
Profile perturbative_profile_on_grid(double x, std::size_t m = 2001);

/// Energy of the expansion:
/// 12 pi^2 (3 sqrt2/4)(1 + (11/180) x^2 - (209/10800) x^4 + (5209/864000) x^6).
double perturbative_energy(double x);

/// L(x) under the chosen reading (adopted: L = sqrt2 (1 + (11/60) x^2)).
Radius radius_from_amplitude(double x, AmplitudeRelation rel = AmplitudeRelation::adopted);

/// Inverse of radius_from_amplitude; returns 0 for L <= sqrt2 (the branch
/// only exists to the right of the critical radius).
double amplitude_from_radius(Radius L, AmplitudeRelation rel = AmplitudeRelation::adopted);

/// Amplitude of a numerical solution: g-projection of F - psi onto the
/// bifurcating mode sin(psi),
///   x_meas = g(F - psi, sin psi) / g(sin psi, sin psi).
double measure_amplitude(const Profile& p,
                         const QuadratureRule& rule = QuadratureRule::gauss_legendre_composite());

/// Bundled expansion state at amplitude x.
struct PerturbativeState {
    double x = 0.0;
    double l_implied = 0.0; ///< adopted-reading radius
    /// profile_coeffs[o-1][h-1] multiplies x^o sin(h psi), o,h = 1..3.
    std::array<std::array<double, 3>, 3> profile_coeffs{};
    double energy_series_value = 0.0;
};

PerturbativeState perturbative_state(double x);

} // namespace skys3::perturbation
