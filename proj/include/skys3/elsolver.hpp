#pragma once

#include <optional>
#include <vector>

#include "skys3/profile.hpp"
#include "skys3/types.hpp"

namespace skys3::elsolver {

/// Left-hand side of the radial Euler-Lagrange equation
///
///   (L + (2/L) sin^2F/sin^2psi) sin^2psi F''
///     + (L + (1/L)(sin2F/sin2psi) F') sin2psi F'
///     - (L + (1/L) sin^2F/sin^2psi) sin2F  =  0.
///
/// The middle term is evaluated through its expanded form
/// L sin2psi F' + (1/L) sin2F F'^2 when |sin2psi| < 1e-8 (the two factors
/// cancel exactly at psi = pi/2 where sin2psi changes sign).
/// psi must lie strictly inside (0, pi).
double el_residual(double f, double fp, double fpp, double psi, Radius L);

enum class Endpoint { left, right };

/// Frobenius expansion of a regular trajectory about an endpoint:
/// F = a psi + b psi^3 near psi = 0 (and its mirror image near psi = pi),
/// with the cubic coefficient forced by the equation,
///
///   b(a, L) = a (1 - a^2) (2 L^2 + a^2) / (15 (L^2 + 2 a^2)).
///
/// Substituting the series back into the equation leaves a residual of
/// order psi^5.
class EndpointSeries {
public:
    EndpointSeries(double slope, Radius L, ChargeSector q, Endpoint end);
    /// F(psi); valid for psi near the expansion endpoint.
    double value(double psi) const;
    /// dF/dpsi.
    double slope(double psi) const;
    double slope_coefficient() const { return a_; }
    double cubic_coefficient() const { return b_; }

private:
    double a_, b_;
    int q_;
    Endpoint end_;
};

enum class ShootStatus { converged, diverged, not_converged };

struct ShootOptions {
    std::size_t grid_size = 2001; ///< nodes of the returned profile
    double endpoint_offset = 1e-6; ///< series-to-integrator handover distance
    double abs_tol = 1e-12;        ///< integrator absolute tolerance
    double rel_tol = 1e-10;        ///< integrator relative tolerance
    double boundary_tol = 1e-7;    ///< |boundary_miss| accepted as converged
};

struct ShootingResult {
    ShootStatus status = ShootStatus::not_converged;
    /// Present unless the trajectory diverged.
    std::optional<Profile> profile;
    double slope0 = 0.0;        ///< F'(0) of the trajectory
    double boundary_miss = 0.0; ///< F(pi-eps) + eps F'(pi-eps) - q*pi
    double residual_norm = 0.0; ///< max interior |el_residual| (stencil F'')
    long iterations = 0;        ///< accepted integrator steps
    double psi_fail = 0.0;      ///< where the trajectory left the admissible
                                ///< window (diverged only)
};

/// Integrate the equation from psi = eps (seeded by the endpoint series with
/// initial slope `slope0`) to psi = pi - eps, with forced stops at the
/// profile nodes.  Trajectories leaving F in [-pi, (q+1) pi] are reported
/// as diverged with the exit location.
ShootingResult shoot(Radius L, ChargeSector q, double slope0, const ShootOptions& opts = {});

struct SolveOptions {
    ShootOptions shoot;
    double slope_min = 0.05;
    double slope_max = 50.0;
    int mesh_points = 64;   ///< coarse logarithmic slope mesh
    int subdivisions = 8;   ///< linear rescan inside every coarse interval
    int max_bracket_iterations = 200;
};

/// All solutions of the boundary-value problem F(0) = 0, F(pi) = q*pi at
/// radius L: scan the slope mesh for sign changes of the boundary miss,
/// polish each bracket by safeguarded secant/bisection, then re-shoot and
/// validate (residual_norm <= tol, boundary miss within tolerance).
/// Results are sorted by slope0; roots closer than 10*tol are merged.
/// Throws on bracket non-convergence or when a polished root fails
/// validation.
std::vector<ShootingResult> solve_bvp(Radius L, ChargeSector q, double tol = 1e-8,
                                      const SolveOptions& opts = {});

/// Fallback for trajectories too unstable to cross the whole interval:
/// shoot from both endpoints and match (F, F') at pi/2 with a two-variable
/// Newton iteration on the endpoint slopes.  boundary_miss reports the final
/// matching mismatch hypot(dF, dF').
ShootingResult shoot_two_sided(Radius L, ChargeSector q, double slope_left,
                               double slope_right, const ShootOptions& opts = {});

} // namespace skys3::elsolver
