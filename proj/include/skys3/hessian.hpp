#pragma once

#include <span>
#include <string>
#include <vector>

#include "skys3/profile.hpp"
#include "skys3/quadrature.hpp"
#include "skys3/types.hpp"

namespace skys3::hessian {

/// Truncated trial space for the Hessian eigenproblem: sin(k psi),
/// k = 1..size.  Every basis element vanishes at both endpoints, as the
/// admissible perturbations must.
struct ModeBasis {
    int size = 48;
};

/// Closed-form Hessian eigenvalue about the identity map,
/// lambda_n = (2/L)(n^2 + 4n + 1) + L (n^2 + 4n - 1), n >= 0.
/// lambda_0 = 2/L - L changes sign at L = sqrt(2).
double analytic_lambda(int n, Radius L);

/// Sine coefficients (entry [k-1] multiplies sin(k psi)) of the closed-form
/// eigenmode about the identity:
///   xi_{2m}   = sum_{k=0}^{m} (2k+1) sin((2k+1) psi)
///   xi_{2m+1} = sum_{k=1}^{m+1} 2k sin(2k psi).
/// Unnormalized integer coefficients.
std::vector<double> analytic_mode(int n);

/// sum_k c_k sin(k psi) and its derivative.
double eval_sine_series(std::span<const double> coeffs, double psi);
double eval_sine_series_slope(std::span<const double> coeffs, double psi);

/// Second variation of the energy about `about` in the direction xi
/// (one-parameter family F + t*xi, second t-derivative at t = 0):
///
///   d2U(xi, xi) = 4 pi * int { P xi'^2 + 2 R xi xi' + S xi^2 } dpsi,
///     P = L sin^2 psi + (2/L) sin^2 F
///     R = (2/L) sin 2F F'
///     S = (2/L)(1 + 2 cos 2F) sin^2 F / sin^2 psi + 2 cos 2F (L + F'^2 / L).
///
/// `xi` holds values at the nodes of `about.grid()` and must vanish at both
/// endpoints; it is interpolated like a profile.
double second_variation(const Profile& about, std::span<const double> xi, Radius L,
                        const QuadratureRule& rule = QuadratureRule::gauss_legendre_composite());

/// Same bilinear form with xi given by sine coefficients (evaluated exactly).
double second_variation_modes(const Profile& about, std::span<const double> coeffs, Radius L,
                              const QuadratureRule& rule = QuadratureRule::gauss_legendre_composite());

/// Reduced Sturm-Liouville operator equivalent to the second variation about
/// the identity:  (T xi)(psi) = -(sin^2 psi xi')' + 2 (1 - 2 c sigma^2) xi
/// with c = (L^2+1)/(L^2+2); eigenpairs satisfy
/// T xi_n = lambda_n (L/(L^2+2)) sin^2 psi xi_n.  xi given by sine
/// coefficients; returns values at `points` (all strictly inside (0, pi)).
std::vector<double> sl_operator_apply(std::span<const double> coeffs, Radius L,
                                      std::span<const double> points);

enum class SpectrumMethod { galerkin, finite_difference };

struct SpectrumOptions {
    SpectrumMethod method = SpectrumMethod::galerkin;
    int quadrature_nodes = 2048; ///< Galerkin assembly quadrature
    int fd_nodes = 601;          ///< P1 finite-element grid (cross-check method)
    int output_grid = 801;       ///< where mode shapes are tabulated
};

struct SpectrumResult {
    double radius = 0.0;
    std::string about;       ///< "identity" or "numeric"
    SpectrumMethod method = SpectrumMethod::galerkin;
    int basis_size = 0;
    /// Ascending; g-orthonormal eigenvectors underneath.
    std::vector<double> eigenvalues;
    /// Galerkin only: sine coefficients per mode (g-normalized, sign-fixed so
    /// the largest-|.| coefficient is positive).
    std::vector<std::vector<double>> coefficients;
    /// Mode shapes tabulated on `grid` (uniform; endpoints included).
    std::vector<double> grid;
    std::vector<std::vector<double>> modes;
};

/// Lowest n_modes eigenpairs of the second variation about `about`,
/// generalized symmetric problem A c = lambda B c with the g-inner-product
/// mass matrix B.  Requires basis.size >= n_modes + 8 (truncation margin).
SpectrumResult spectrum(const Profile& about, Radius L, ModeBasis basis, int n_modes,
                        const SpectrumOptions& opts = {});

} // namespace skys3::hessian
