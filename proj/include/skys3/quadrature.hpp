#pragma once

#include <span>
#include <vector>

namespace skys3 {

/// Fixed quadrature rule on [0, pi].  Composite Gauss-Legendre with 16-point
/// panels; nodes are strictly interior, so integrands may be singular at the
/// endpoints as long as their limits are finite.
///
/// The constructor self-validates against int sin^2 = pi/2 and
/// int sin^4 = 3*pi/8 and throws if either misses by more than 1e-13 relative.
class QuadratureRule {
public:
    /// Rule with approximately `total_nodes` nodes (rounded up to a whole
    /// number of 16-point panels).  Default matches the library-wide default
    /// of 2048 nodes.
    static QuadratureRule gauss_legendre_composite(int total_nodes = 2048);

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    /// weights()[i] * sin^2(nodes()[i]), cached: the measure sin^2(psi) d(psi)
    /// appears in every functional of the model.
    const std::vector<double>& sin2_weights() const { return sin2_weights_; }

    std::size_t size() const { return nodes_.size(); }
    /// Polynomial degree integrated exactly on each panel.
    int order() const { return order_; }

    /// sum_i weights[i] * values[i]; `values` must be sampled at nodes().
    double integrate(std::span<const double> values) const;
    /// sum_i weights[i] * sin^2(nodes[i]) * values[i].
    double integrate_sin2(std::span<const double> values) const;

private:
    QuadratureRule() = default;
    std::vector<double> nodes_, weights_, sin2_weights_;
    int order_ = 0;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
void gauss_legendre_reference(int n, std::vector<double>& x, std::vector<double>& w);

} // namespace skys3
