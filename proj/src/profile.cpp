#include "skys3/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace skys3 {

std::vector<double> uniform_grid(std::size_t m) {
    if (m < 2) throw std::invalid_argument("uniform_grid: need at least 2 nodes");
    std::vector<double> psi(m);
    for (std::size_t i = 0; i < m; ++i)
        psi[i] = pi * (static_cast<double>(i) / static_cast<double>(m - 1));
    psi.front() = 0.0;
    psi.back() = pi;
    return psi;
}

std::vector<double> fd_weights(std::span<const double> nodes, double x0, int order) {
    // Fornberg, Math. Comp. 51 (1988): weights for derivatives 0..order at x0
    // from an arbitrary stencil; we return the row for `order`.
    const int n = static_cast<int>(nodes.size()) - 1;
    if (n < order)
        throw std::invalid_argument("fd_weights: stencil too small for requested derivative");
    std::vector<std::vector<double>> c(nodes.size(), std::vector<double>(order + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) w[i] = c[i][order];
    return w;
}

namespace {

// Slopes by five-point finite differences (one-sided near the ends),
// falling back to the full stencil when the grid is tiny.
std::vector<double> fd_slopes(const std::vector<double>& psi, const std::vector<double>& f) {
    const std::size_t m = psi.size();
    const std::size_t width = std::min<std::size_t>(5, m);
    std::vector<double> df(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t lo = (i >= width / 2) ? i - width / 2 : 0;
        lo = std::min(lo, m - width);
        const auto w =
            fd_weights(std::span<const double>(psi.data() + lo, width), psi[i], 1);
        double s = 0.0;
        for (std::size_t j = 0; j < width; ++j) s += w[j] * f[lo + j];
        df[i] = s;
    }
    return df;
}

} // namespace

Profile::Profile(std::vector<double> psi, std::vector<double> f, ChargeSector charge,
                 double boundary_tol)
    : psi_(std::move(psi)), f_(std::move(f)), charge_(charge) {
    validate_and_project(boundary_tol);
    df_ = fd_slopes(psi_, f_);
}

Profile::Profile(std::vector<double> psi, std::vector<double> f, std::vector<double> df,
                 ChargeSector charge, double boundary_tol)
    : psi_(std::move(psi)), f_(std::move(f)), df_(std::move(df)), charge_(charge),
      producer_slopes_(true) {
    if (df_.size() != psi_.size())
        throw std::invalid_argument("Profile: slope array size mismatch");
    validate_and_project(boundary_tol);
}

void Profile::validate_and_project(double boundary_tol) {
    if (psi_.size() < 3)
        throw std::invalid_argument("Profile: need at least 3 grid nodes");
    if (f_.size() != psi_.size())
        throw std::invalid_argument("Profile: value array size mismatch");
    for (std::size_t i = 0; i + 1 < psi_.size(); ++i)
        if (!(psi_[i] < psi_[i + 1]))
            throw std::invalid_argument("Profile: grid must be strictly increasing");
    for (double v : f_)
        if (!std::isfinite(v)) throw std::invalid_argument("Profile: non-finite value");
    if (std::abs(psi_.front()) > 1e-12 || std::abs(psi_.back() - pi) > 1e-12)
        throw std::invalid_argument("Profile: grid must span [0, pi]");
    psi_.front() = 0.0;
    psi_.back() = pi;

    const double f_end = charge_.q * pi;
    if (std::abs(f_.front()) > boundary_tol)
        throw std::invalid_argument("Profile: F(0) = " + std::to_string(f_.front()) +
                                    " violates the boundary condition F(0) = 0");
    if (std::abs(f_.back() - f_end) > boundary_tol)
        throw std::invalid_argument("Profile: F(pi) = " + std::to_string(f_.back()) +
                                    " violates the boundary condition F(pi) = q*pi with q = " +
                                    std::to_string(charge_.q));
    f_.front() = 0.0;
    f_.back() = f_end;
}

std::size_t Profile::locate(double psi) const {
    // Index of the interval [psi_[i], psi_[i+1]] containing psi.
    const auto it = std::upper_bound(psi_.begin(), psi_.end(), psi);
    std::size_t i = static_cast<std::size_t>(it - psi_.begin());
    if (i == 0) return 0;
    if (i >= psi_.size()) return psi_.size() - 2;
    return i - 1;
}

namespace {

inline void hermite_eval(double x, double x0, double x1, double f0, double f1, double d0,
                         double d1, double& f, double& df) {
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    f = (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0 +
        (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * h * d1;
    df = ((6 * t2 - 6 * t) * f0 + (3 * t2 - 4 * t + 1) * h * d0 + (6 * t - 6 * t2) * f1 +
          (3 * t2 - 2 * t) * h * d1) /
         h;
}

} // namespace

double Profile::value_at(double psi) const {
    psi = std::clamp(psi, psi_.front(), psi_.back());
    const std::size_t i = locate(psi);
    double f, df;
    hermite_eval(psi, psi_[i], psi_[i + 1], f_[i], f_[i + 1], df_[i], df_[i + 1], f, df);
    return f;
}

double Profile::slope_at(double psi) const {
    psi = std::clamp(psi, psi_.front(), psi_.back());
    const std::size_t i = locate(psi);
    double f, df;
    hermite_eval(psi, psi_[i], psi_[i + 1], f_[i], f_[i + 1], df_[i], df_[i + 1], f, df);
    return df;
}

void Profile::sample(std::span<const double> psi, std::span<double> f_out,
                     std::span<double> df_out) const {
    if (psi.size() != f_out.size() || psi.size() != df_out.size())
        throw std::invalid_argument("Profile::sample: output size mismatch");
    std::size_t i = 0;
    for (std::size_t k = 0; k < psi.size(); ++k) {
        const double x = std::clamp(psi[k], psi_.front(), psi_.back());
        if (k > 0 && psi[k] < psi[k - 1])
            throw std::invalid_argument("Profile::sample: points must be ascending");
        while (i + 2 < psi_.size() && psi_[i + 1] <= x) ++i;
        hermite_eval(x, psi_[i], psi_[i + 1], f_[i], f_[i + 1], df_[i], df_[i + 1], f_out[k],
                     df_out[k]);
    }
}

} // namespace skys3
