#include "skys3/model.hpp"

#include <cmath>
#include <stdexcept>

namespace skys3::model {

namespace {
// Below this distance from an endpoint sin(psi) loses relative accuracy in
// the quotient, so the exactly-cancelling difference form takes over.
constexpr double ratio_guard = 1e-6;
} // namespace

double chiral_sin_ratio(double f, double psi, int q) {
    if (!(psi > 0.0 && psi < pi))
        throw std::invalid_argument("chiral_sin_ratio: psi must lie strictly inside (0, pi)");
    if (psi < ratio_guard) return f / psi;
    if (pi - psi < ratio_guard) {
        // sin F = (-1)^(q+1) sin(q*pi - F); both differences below are exact
        // (Sterbenz) because F ~ q*pi and psi ~ pi.
        const double sign = (q % 2 == 0) ? -1.0 : 1.0;
        return sign * (q * pi - f) / (pi - psi);
    }
    return std::sin(f) / std::sin(psi);
}

Profile identity_profile(std::size_t m) {
    std::vector<double> psi = uniform_grid(m);
    std::vector<double> f = psi;
    std::vector<double> df(m, 1.0);
    return Profile(std::move(psi), std::move(f), std::move(df), ChargeSector{1});
}

int topological_charge(const Profile& p) {
    const double ratio = (p.values().back() - p.values().front()) / pi;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-6)
        throw std::invalid_argument("topological_charge: boundary values are not an integer "
                                    "multiple of pi");
    return static_cast<int>(rounded);
}

Profile reflect_profile(const Profile& p) {
    const std::size_t m = p.size();
    const double f_end = p.charge().q * pi;
    std::vector<double> psi(m), f(m), df(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = m - 1 - i;
        psi[i] = pi - p.grid()[j];
        f[i] = f_end - p.values()[j];
        df[i] = p.slopes()[j];
    }
    psi.front() = 0.0;
    psi.back() = pi;
    return Profile(std::move(psi), std::move(f), std::move(df), p.charge());
}

EnergyBreakdown energy(const Profile& p, Radius L, const QuadratureRule& rule) {
    const int q = p.charge().q;
    const std::size_t n = rule.size();
    std::vector<double> f(n), df(n);
    p.sample(rule.nodes(), f, df);

    double sigma_acc = 0.0, skyrme_acc = 0.0;
    const auto& w2 = rule.sin2_weights();
    for (std::size_t i = 0; i < n; ++i) {
        const double r = chiral_sin_ratio(f[i], rule.nodes()[i], q);
        const double fp2 = df[i] * df[i];
        const double r2 = r * r;
        sigma_acc += w2[i] * (fp2 + 2.0 * r2);
        skyrme_acc += w2[i] * (2.0 * fp2 + r2) * r2;
    }
    EnergyBreakdown e;
    e.sigma_term = 4.0 * pi * L.value() * sigma_acc;
    e.skyrme_term = 4.0 * pi / L.value() * skyrme_acc;
    e.total = e.sigma_term + e.skyrme_term;
    return e;
}

double identity_energy(Radius L) {
    return 6.0 * pi * pi * (L.value() + 1.0 / L.value());
}

double inner_g(std::span<const double> u, std::span<const double> v,
               const QuadratureRule& rule) {
    if (u.size() != rule.size() || v.size() != rule.size())
        throw std::invalid_argument("inner_g: samples must match the quadrature nodes");
    double acc = 0.0;
    const auto& w2 = rule.sin2_weights();
    for (std::size_t i = 0; i < u.size(); ++i) acc += w2[i] * u[i] * v[i];
    return 4.0 * pi * acc;
}

} // namespace skys3::model
