#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace skys3 {

inline constexpr double pi = 3.14159265358979323846;

/// Dimensionless radius L of the spatial three-sphere, in units e*f_pi = 1.
class Radius {
public:
    explicit Radius(double value) : value_(value) {
        if (!std::isfinite(value) || value <= 0.0)
            throw std::invalid_argument("Radius: value must be finite and > 0, got " +
                                        std::to_string(value));
    }
    double value() const { return value_; }

private:
    double value_;
};

/// Topological sector: winding number of the chiral field, F(pi) = q*pi.
struct ChargeSector {
    int q = 1;
};

/// Energy of a configuration split into the two scale-competing pieces.
/// sigma_term scales like L, skyrme_term like 1/L; total = sigma_term + skyrme_term.
struct EnergyBreakdown {
    double sigma_term = 0.0;
    double skyrme_term = 0.0;
    double total = 0.0;
};

} // namespace skys3
