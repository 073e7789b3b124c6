#include "skys3/perturbation.hpp"

#include <cmath>

#include "skys3/model.hpp"

namespace skys3::perturbation {

namespace {
constexpr double c1_3 = 29369.0 / 316800.0; // sin(psi) coefficient at x^3
constexpr double c2_2 = 3.0 / 20.0;         // sin(2 psi) coefficient at x^2
constexpr double c3_3 = 11.0 / 480.0;       // sin(3 psi) coefficient at x^3
const double sqrt2 = std::sqrt(2.0);
} // namespace

double perturbative_profile(double psi, double x) {
    return psi + x * std::sin(psi) + c2_2 * x * x * std::sin(2.0 * psi) -
           x * x * x * (c1_3 * std::sin(psi) - c3_3 * std::sin(3.0 * psi));
}

double perturbative_profile_slope(double psi, double x) {
    return 1.0 + x * std::cos(psi) + 2.0 * c2_2 * x * x * std::cos(2.0 * psi) -
           x * x * x * (c1_3 * std::cos(psi) - 3.0 * c3_3 * std::cos(3.0 * psi));
}

Profile perturbative_profile_on_grid(double x, std::size_t m) {
    std::vector<double> psi = uniform_grid(m);
    std::vector<double> f(m), df(m);
    for (std::size_t i = 0; i < m; ++i) {
        f[i] = perturbative_profile(psi[i], x);
        df[i] = perturbative_profile_slope(psi[i], x);
    }
    f.front() = 0.0;
    f.back() = pi; // the series leaves the boundary values exact
    return Profile(std::move(psi), std::move(f), std::move(df), ChargeSector{1});
}

double perturbative_energy(double x) {
    const double x2 = x * x;
    const double poly =
        1.0 + (11.0 / 180.0) * x2 +
        x2 * x2 * (-209.0 / 10800.0 + (5209.0 / 864000.0) * x2);
    return 12.0 * pi * pi * (3.0 * sqrt2 / 4.0) * poly;
}

Radius radius_from_amplitude(double x, AmplitudeRelation rel) {
    const double x2 = x * x;
    const double shift = (rel == AmplitudeRelation::adopted) ? x2 : x2 * x2;
    return Radius(sqrt2 * (1.0 + (11.0 / 60.0) * shift));
}

double amplitude_from_radius(Radius L, AmplitudeRelation rel) {
    const double t = (60.0 / 11.0) * (L.value() / sqrt2 - 1.0);
    if (t <= 0.0) return 0.0;
    return (rel == AmplitudeRelation::adopted) ? std::sqrt(t) : std::pow(t, 0.25);
}

double measure_amplitude(const Profile& p, const QuadratureRule& rule) {
    const std::size_t n = rule.size();
    std::vector<double> f(n), df(n);
    p.sample(rule.nodes(), f, df);
    std::vector<double> dev(n), mode(n);
    for (std::size_t i = 0; i < n; ++i) {
        dev[i] = f[i] - rule.nodes()[i];
        mode[i] = std::sin(rule.nodes()[i]);
    }
    return model::inner_g(dev, mode, rule) / model::inner_g(mode, mode, rule);
}

PerturbativeState perturbative_state(double x) {
    PerturbativeState st;
    st.x = x;
    st.l_implied = radius_from_amplitude(x, AmplitudeRelation::adopted).value();
    st.profile_coeffs = {{{1.0, 0.0, 0.0}, {0.0, c2_2, 0.0}, {-c1_3, 0.0, c3_3}}};
    st.energy_series_value = perturbative_energy(x);
    return st;
}

} // namespace skys3::perturbation
