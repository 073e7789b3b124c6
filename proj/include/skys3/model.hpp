#pragma once

#include <span>

#include "skys3/profile.hpp"
#include "skys3/quadrature.hpp"
#include "skys3/types.hpp"

namespace skys3::model {

/// sin(F)/sin(psi) with the 0/0 endpoint limits resolved analytically.
/// Within 1e-6 of an endpoint the ratio is evaluated from the exactly
/// cancelling differences F/psi and (q*pi - F)/(pi - psi); elsewhere it is
/// the literal quotient.  Requires 0 < psi < pi.
double chiral_sin_ratio(double f, double psi, int q);

/// The identity-map configuration F(psi) = psi on m uniform nodes
/// (slopes stored exactly).
Profile identity_profile(std::size_t m = 2001);

/// Winding number (F(pi) - F(0))/pi, checked to be an integer within 1e-6.
int topological_charge(const Profile& p);

/// Pullback of the profile under the orientation-reversing isometry
/// psi -> pi - psi:  F~(psi) = q*pi - F(pi - psi).  An involution that
/// preserves the energy and the charge.
Profile reflect_profile(const Profile& p);

/// Static energy of the configuration at three-sphere radius L, split into
/// the sigma-model term (proportional to L) and the Skyrme term
/// (proportional to 1/L).
EnergyBreakdown energy(const Profile& p, Radius L,
                       const QuadratureRule& rule = QuadratureRule::gauss_legendre_composite());

/// Energy of the identity map in closed form: 6*pi^2*(L + 1/L).
double identity_energy(Radius L);

/// L^2 inner product with the radial volume weight,
/// g(u, v) = 4*pi * int_0^pi u v sin^2(psi) dpsi,
/// for samples of u and v at the rule's nodes.
double inner_g(std::span<const double> u, std::span<const double> v,
               const QuadratureRule& rule);

} // namespace skys3::model
