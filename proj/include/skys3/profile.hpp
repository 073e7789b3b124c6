#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "skys3/types.hpp"

namespace skys3 {

/// Radial chiral profile F(psi) on [0, pi], stored on a strictly increasing
/// grid with the boundary values pinned exactly: F(0) = 0, F(pi) = q*pi.
/// Construction projects endpoint values that are within `boundary_tol` of
/// the required ones onto them and rejects anything farther away.
///
/// Evaluation between nodes is cubic Hermite.  Slopes either come from the
/// producer (the shooting integrator stores its own F') or are reconstructed
/// by five-point finite differences.
class Profile {
public:
    Profile(std::vector<double> psi, std::vector<double> f, ChargeSector charge,
            double boundary_tol = 1e-6);
    /// Variant with producer-supplied slopes dF/dpsi at the grid nodes.
    Profile(std::vector<double> psi, std::vector<double> f, std::vector<double> df,
            ChargeSector charge, double boundary_tol = 1e-6);

    const std::vector<double>& grid() const { return psi_; }
    const std::vector<double>& values() const { return f_; }
    const std::vector<double>& slopes() const { return df_; }
    ChargeSector charge() const { return charge_; }
    std::size_t size() const { return psi_.size(); }
    /// True when slopes were supplied at construction rather than
    /// reconstructed by finite differences.
    bool has_producer_slopes() const { return producer_slopes_; }

    /// F(psi), cubic Hermite between nodes.  psi is clamped to [0, pi].
    double value_at(double psi) const;
    /// dF/dpsi of the interpolant.
    double slope_at(double psi) const;

    /// Batch evaluation at an ascending sequence of points (single sweep).
    void sample(std::span<const double> psi, std::span<double> f_out,
                std::span<double> df_out) const;

private:
    void validate_and_project(double boundary_tol);
    std::size_t locate(double psi) const;

    std::vector<double> psi_, f_, df_;
    ChargeSector charge_;
    bool producer_slopes_ = false;
};

/// Uniform grid of m nodes with psi[0] = 0 and psi[m-1] = pi exactly.
std::vector<double> uniform_grid(std::size_t m);

/// Finite-difference weights for the `order`-th derivative at x0 from the
/// given stencil nodes (Fornberg's algorithm).  Works on arbitrary spacing.
std::vector<double> fd_weights(std::span<const double> nodes, double x0, int order);

} // namespace skys3
