#include "skys3/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "skys3/types.hpp"

namespace skys3 {

void gauss_legendre_reference(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw std::invalid_argument("gauss_legendre_reference: n must be >= 1");
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess for the i-th positive root of P_n.
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    if (n % 2 == 1) x[half - 1] = 0.0;
}

QuadratureRule QuadratureRule::gauss_legendre_composite(int total_nodes) {
    if (total_nodes < 1)
        throw std::invalid_argument("QuadratureRule: total_nodes must be >= 1");
    const int per_panel = 16;
    const int panels = (total_nodes + per_panel - 1) / per_panel;

    std::vector<double> xr, wr;
    gauss_legendre_reference(per_panel, xr, wr);

    QuadratureRule rule;
    rule.order_ = 2 * per_panel - 1;
    rule.nodes_.reserve(panels * per_panel);
    rule.weights_.reserve(panels * per_panel);
    const double h = pi / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (int j = 0; j < per_panel; ++j) {
            rule.nodes_.push_back(mid + 0.5 * h * xr[j]);
            rule.weights_.push_back(0.5 * h * wr[j]);
        }
    }
    rule.sin2_weights_.resize(rule.nodes_.size());
    for (std::size_t i = 0; i < rule.nodes_.size(); ++i) {
        const double s = std::sin(rule.nodes_[i]);
        rule.sin2_weights_[i] = rule.weights_[i] * s * s;
    }

    // Self-check: int_0^pi sin^2 = pi/2 and int_0^pi sin^4 = 3*pi/8.
    double i2 = 0.0, i4 = 0.0;
    for (std::size_t i = 0; i < rule.nodes_.size(); ++i) {
        const double s2 = std::sin(rule.nodes_[i]) * std::sin(rule.nodes_[i]);
        i2 += rule.weights_[i] * s2;
        i4 += rule.weights_[i] * s2 * s2;
    }
    if (std::abs(i2 - pi / 2.0) > 1e-13 * (pi / 2.0) ||
        std::abs(i4 - 3.0 * pi / 8.0) > 1e-13 * (3.0 * pi / 8.0))
        throw std::runtime_error("QuadratureRule: self-validation failed (sin^2/sin^4 moments)");
    return rule;
}

double QuadratureRule::integrate(std::span<const double> values) const {
    if (values.size() != nodes_.size())
        throw std::invalid_argument("QuadratureRule::integrate: expected " +
                                    std::to_string(nodes_.size()) + " values, got " +
                                    std::to_string(values.size()));
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += weights_[i] * values[i];
    return acc;
}

double QuadratureRule::integrate_sin2(std::span<const double> values) const {
    if (values.size() != nodes_.size())
        throw std::invalid_argument("QuadratureRule::integrate_sin2: expected " +
                                    std::to_string(nodes_.size()) + " values, got " +
                                    std::to_string(values.size()));
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += sin2_weights_[i] * values[i];
    return acc;
}

} // namespace skys3
