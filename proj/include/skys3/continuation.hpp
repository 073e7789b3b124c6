#pragma once

#include <string>
#include <vector>

#include "skys3/elsolver.hpp"
#include "skys3/hessian.hpp"
#include "skys3/types.hpp"

namespace skys3::continuation {

enum class BranchId { identity, skyrmion_plus, skyrmion_minus };

std::string branch_name(BranchId id);

struct BranchPoint {
    double l = 0.0;
    BranchId branch = BranchId::identity;
    double slope0 = 0.0;
    double energy = 0.0;
    double lambda0 = 0.0; ///< lowest Hessian eigenvalue about this solution
    double x_meas = 0.0;  ///< g-projection amplitude of F - psi on sin(psi)
};

struct SweepFailure {
    double l = 0.0;
    std::string message;
};

struct SweepConfig {
    double tol = 1e-8;                ///< solve_bvp residual tolerance
    elsolver::SolveOptions solve;     ///< shooting/bracketing parameters
    hessian::ModeBasis basis{48};     ///< Hessian trial space
    hessian::SpectrumOptions spectrum;
    int quadrature_nodes = 2048;      ///< energy/amplitude quadrature
    /// The pair amplitude varies like sqrt(L - sqrt2); extra samples are
    /// inserted in [sqrt2 + refine_lo, sqrt2 + refine_hi] to resolve it.
    bool near_critical_refinement = true;
    int refine_samples = 8;
    double refine_lo = 0.002;
    double refine_hi = 0.05;
};

struct SweepMetadata {
    double l_min = 0.0, l_max = 0.0;
    int steps = 0;
    double tol = 0.0;
    std::size_t grid_size = 0;
    int basis_size = 0;
    int quadrature_nodes = 0;
    double slope_min = 0.0, slope_max = 0.0;
    int mesh_points = 0, subdivisions = 0;
    std::vector<double> samples;       ///< all L values actually visited
    std::vector<SweepFailure> failures;
};

struct BranchTable {
    /// Ordered by (L, branch id) with identity < skyrmion_plus < skyrmion_minus.
    std::vector<BranchPoint> points;
    SweepMetadata metadata;
};

/// Solve the BVP across [l_min, l_max] (uniform `steps` samples plus the
/// near-critical refinement), compute energy, amplitude and the lowest
/// Hessian eigenvalue for every solution, and classify the solutions into
/// branches by nearest-slope matching against the previous sample (falling
/// back to the slope0-around-1 ordering when matching is ambiguous, e.g.
/// where the pair is born).  Solver failures at individual samples are
/// recorded in the metadata, not fatal.
BranchTable sweep(Radius l_min, Radius l_max, int steps, const SweepConfig& cfg = {});

struct CriticalRadiusResult {
    double numeric = 0.0;     ///< bisection on the numerically assembled lambda0(L)
    double closed_form = 0.0; ///< bisection on analytic_lambda(0, L)
    double tol = 0.0;
    int numeric_iterations = 0;
    int closed_form_iterations = 0;
};

/// Locate the sign change of the lowest identity-background eigenvalue.
/// The numeric root uses the assembled spectrum; the closed-form root
/// bisects 2/L - L (both sit at sqrt2).  Throws if lambda0 does not change
/// sign over [bracket_lo, bracket_hi].
CriticalRadiusResult critical_radius(double tol, double bracket_lo = 1.0,
                                     double bracket_hi = 2.0);

struct StabilityRow {
    double l = 0.0;
    bool has_identity = false, has_plus = false, has_minus = false;
    double lambda0_identity = 0.0;
    double lambda0_plus = 0.0;
    double lambda0_minus = 0.0;
    double identity_closed_form = 0.0; ///< 2/L - L
};

struct StabilityReport {
    std::vector<StabilityRow> rows; ///< ascending L
    /// lambda0 about the skyrmion is positive and shrinks toward 0 as L
    /// decreases to sqrt2 (monotone over the sampled points near sqrt2).
    bool skyrmion_tends_to_zero = false;
    /// lambda0 about the identity is negative above sqrt2 and rises toward 0
    /// as L decreases to sqrt2.
    bool identity_tends_to_zero = false;
    /// max |lambda0_identity - (2/L - L)| over the rows.
    double identity_closed_form_deviation = 0.0;
    std::string notes;
};

/// Tabulate lambda0 per branch versus L and check the stability-exchange
/// trends near the critical radius.  Throws when fewer than 3 skyrmion
/// samples lie near sqrt2 (nothing to base a trend on).
StabilityReport stability_exchange_report(const BranchTable& table);

} // namespace skys3::continuation
