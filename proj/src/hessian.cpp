#include "skys3/hessian.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "skys3/model.hpp"

namespace skys3::hessian {

double analytic_lambda(int n, Radius L) {
    if (n < 0) throw std::invalid_argument("analytic_lambda: mode index must be >= 0");
    const double m = double(n) * n + 4.0 * n;
    return (2.0 / L.value()) * (m + 1.0) + L.value() * (m - 1.0);
}

std::vector<double> analytic_mode(int n) {
    if (n < 0) throw std::invalid_argument("analytic_mode: mode index must be >= 0");
    std::vector<double> c(n + 2, 0.0);
    if (n % 2 == 0) {
        for (int k = 0; 2 * k + 1 <= n + 1; ++k) c[2 * k] = 2.0 * k + 1.0;
    } else {
        for (int k = 1; 2 * k <= n + 1; ++k) c[2 * k - 1] = 2.0 * k;
    }
    return c;
}

double eval_sine_series(std::span<const double> coeffs, double psi) {
    double acc = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        acc += coeffs[k] * std::sin((k + 1) * psi);
    return acc;
}

double eval_sine_series_slope(std::span<const double> coeffs, double psi) {
    double acc = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        acc += coeffs[k] * (k + 1) * std::cos((k + 1) * psi);
    return acc;
}

namespace {

// Pointwise coefficients of the second-variation integrand at a node.
struct SvCoefficients {
    double p;  // multiplies xi'^2
    double r;  // multiplies 2 xi xi'
    double s;  // multiplies xi^2
    double b;  // mass weight sin^2 psi (for the g-inner product)
};

SvCoefficients sv_coefficients(double f, double fp, double psi, double l, int q) {
    const double li = 1.0 / l;
    const double sig = std::sin(psi);
    const double sig2 = sig * sig;
    const double ratio = model::chiral_sin_ratio(f, psi, q);
    const double r2 = ratio * ratio;
    const double cos2f = std::cos(2.0 * f);
    SvCoefficients c;
    c.p = sig2 * (l + 2.0 * li * r2);
    c.r = 2.0 * li * std::sin(2.0 * f) * fp;
    c.s = 2.0 * li * (1.0 + 2.0 * cos2f) * r2 + 2.0 * cos2f * (l + fp * fp * li);
    c.b = sig2;
    return c;
}

template <class Xi, class DXi>
double sv_integral(const Profile& about, Radius L, const QuadratureRule& rule, Xi&& xi,
                   DXi&& dxi) {
    const std::size_t n = rule.size();
    std::vector<double> f(n), df(n);
    about.sample(rule.nodes(), f, df);
    const int q = about.charge().q;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double psi = rule.nodes()[i];
        const SvCoefficients c = sv_coefficients(f[i], df[i], psi, L.value(), q);
        const double u = xi(i, psi);
        const double up = dxi(i, psi);
        acc += rule.weights()[i] * (c.p * up * up + 2.0 * c.r * u * up + c.s * u * u);
    }
    return 4.0 * pi * acc;
}

} // namespace

double second_variation(const Profile& about, std::span<const double> xi, Radius L,
                        const QuadratureRule& rule) {
    if (xi.size() != about.size())
        throw std::invalid_argument("second_variation: xi must be sampled on about.grid()");
    // The perturbation must vanish at the endpoints; a charge-0 profile
    // enforces exactly that and provides the interpolant.
    Profile xi_p(about.grid(), std::vector<double>(xi.begin(), xi.end()), ChargeSector{0});
    const std::size_t n = rule.size();
    std::vector<double> xv(n), xs(n);
    xi_p.sample(rule.nodes(), xv, xs);
    return sv_integral(
        about, L, rule, [&](std::size_t i, double) { return xv[i]; },
        [&](std::size_t i, double) { return xs[i]; });
}

double second_variation_modes(const Profile& about, std::span<const double> coeffs, Radius L,
                              const QuadratureRule& rule) {
    return sv_integral(
        about, L, rule, [&](std::size_t, double psi) { return eval_sine_series(coeffs, psi); },
        [&](std::size_t, double psi) { return eval_sine_series_slope(coeffs, psi); });
}

std::vector<double> sl_operator_apply(std::span<const double> coeffs, Radius L,
                                      std::span<const double> points) {
    const double l2 = L.value() * L.value();
    const double c = (l2 + 1.0) / (l2 + 2.0);
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double psi = points[i];
        if (!(psi > 0.0 && psi < pi))
            throw std::invalid_argument("sl_operator_apply: points must lie inside (0, pi)");
        const double sig = std::sin(psi);
        const double sig2 = sig * sig;
        double xi = 0.0, dxi = 0.0, d2xi = 0.0;
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            const double kk = double(k + 1);
            const double s = std::sin(kk * psi), co = std::cos(kk * psi);
            xi += coeffs[k] * s;
            dxi += coeffs[k] * kk * co;
            d2xi -= coeffs[k] * kk * kk * s;
        }
        // -(sigma^2 xi')' = -sin(2 psi) xi' - sigma^2 xi''
        out[i] = -std::sin(2.0 * psi) * dxi - sig2 * d2xi + 2.0 * (1.0 - 2.0 * c * sig2) * xi;
    }
    return out;
}

namespace {

void fix_sign(std::vector<double>& v) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    if (v[imax] < 0.0)
        for (auto& x : v) x = -x;
}

SpectrumResult spectrum_galerkin(const Profile& about, Radius L, ModeBasis basis, int n_modes,
                                 const SpectrumOptions& opts) {
    const auto rule = QuadratureRule::gauss_legendre_composite(opts.quadrature_nodes);
    const std::size_t n = rule.size();
    const int k_max = basis.size;

    std::vector<double> f(n), df(n);
    about.sample(rule.nodes(), f, df);
    const int q = about.charge().q;

    Eigen::VectorXd wp(n), wr(n), ws(n), wb(n);
    for (std::size_t i = 0; i < n; ++i) {
        const SvCoefficients c = sv_coefficients(f[i], df[i], rule.nodes()[i], L.value(), q);
        const double w = rule.weights()[i];
        wp[i] = w * c.p;
        wr[i] = w * c.r;
        ws[i] = w * c.s;
        wb[i] = w * c.b;
    }

    Eigen::MatrixXd S(n, k_max), D(n, k_max);
    for (std::size_t i = 0; i < n; ++i) {
        const double psi = rule.nodes()[i];
        for (int k = 0; k < k_max; ++k) {
            const double kk = double(k + 1);
            S(i, k) = std::sin(kk * psi);
            D(i, k) = kk * std::cos(kk * psi);
        }
    }

    Eigen::MatrixXd A = D.transpose() * wp.asDiagonal() * D;
    const Eigen::MatrixXd cross = S.transpose() * wr.asDiagonal() * D;
    A += cross + cross.transpose();
    A += S.transpose() * ws.asDiagonal() * S;
    A *= 4.0 * pi;
    Eigen::MatrixXd B = 4.0 * pi * (S.transpose() * wb.asDiagonal() * S);
    A = 0.5 * (A + A.transpose()).eval();
    B = 0.5 * (B + B.transpose()).eval();

    const Eigen::LLT<Eigen::MatrixXd> llt(B);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("spectrum: mass matrix is not positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(A, B);
    if (ges.info() != Eigen::Success)
        throw std::runtime_error("spectrum: generalized eigensolver failed to converge");

    SpectrumResult res;
    res.basis_size = k_max;
    res.eigenvalues.resize(n_modes);
    res.coefficients.resize(n_modes);
    for (int j = 0; j < n_modes; ++j) {
        res.eigenvalues[j] = ges.eigenvalues()[j];
        std::vector<double> c(k_max);
        for (int k = 0; k < k_max; ++k) c[k] = ges.eigenvectors()(k, j);
        fix_sign(c);
        res.coefficients[j] = std::move(c);
    }
    res.grid = uniform_grid(opts.output_grid);
    res.modes.resize(n_modes);
    for (int j = 0; j < n_modes; ++j) {
        res.modes[j].resize(res.grid.size());
        for (std::size_t i = 0; i < res.grid.size(); ++i)
            res.modes[j][i] = eval_sine_series(res.coefficients[j], res.grid[i]);
    }
    return res;
}

SpectrumResult spectrum_fd(const Profile& about, Radius L, int n_modes,
                           const SpectrumOptions& opts) {
    // P1 finite elements on a uniform grid: independent discretization used
    // to cross-check the Galerkin sine expansion.
    const int m = opts.fd_nodes;
    if (m < n_modes + 10)
        throw std::invalid_argument("spectrum: fd_nodes too small for requested modes");
    const std::vector<double> grid = uniform_grid(m);
    const double h = grid[1] - grid[0];
    const int ni = m - 2; // interior nodes carry the unknowns
    const int q = about.charge().q;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ni, ni);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(ni, ni);

    std::vector<double> gx(4), gw(4);
    gauss_legendre_reference(4, gx, gw);
    for (int e = 0; e + 1 < m; ++e) {
        const double x0 = grid[e], x1 = grid[e + 1];
        double a00 = 0, a01 = 0, a11 = 0, b00 = 0, b01 = 0, b11 = 0;
        for (int g = 0; g < 4; ++g) {
            const double psi = 0.5 * (x0 + x1) + 0.5 * h * gx[g];
            const double w = 0.5 * h * gw[g];
            const double fv = about.value_at(psi);
            const double dv = about.slope_at(psi);
            const SvCoefficients c = sv_coefficients(fv, dv, psi, L.value(), q);
            const double n0 = (x1 - psi) / h, n1 = (psi - x0) / h;
            const double d0 = -1.0 / h, d1 = 1.0 / h;
            a00 += w * (c.p * d0 * d0 + 2.0 * c.r * n0 * d0 + c.s * n0 * n0);
            a01 += w * (c.p * d0 * d1 + c.r * (n0 * d1 + n1 * d0) + c.s * n0 * n1);
            a11 += w * (c.p * d1 * d1 + 2.0 * c.r * n1 * d1 + c.s * n1 * n1);
            b00 += w * c.b * n0 * n0;
            b01 += w * c.b * n0 * n1;
            b11 += w * c.b * n1 * n1;
        }
        const int i0 = e - 1, i1 = e; // interior indices of the two nodes
        if (i0 >= 0) {
            A(i0, i0) += a00;
            B(i0, i0) += b00;
        }
        if (i1 < ni) {
            A(i1, i1) += a11;
            B(i1, i1) += b11;
        }
        if (i0 >= 0 && i1 < ni) {
            A(i0, i1) += a01;
            A(i1, i0) += a01;
            B(i0, i1) += b01;
            B(i1, i0) += b01;
        }
    }
    A *= 4.0 * pi;
    B *= 4.0 * pi;

    const Eigen::LLT<Eigen::MatrixXd> llt(B);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("spectrum: mass matrix is not positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(A, B);
    if (ges.info() != Eigen::Success)
        throw std::runtime_error("spectrum: generalized eigensolver failed to converge");

    SpectrumResult res;
    res.basis_size = ni;
    res.grid = grid;
    res.eigenvalues.resize(n_modes);
    res.modes.resize(n_modes);
    for (int j = 0; j < n_modes; ++j) {
        res.eigenvalues[j] = ges.eigenvalues()[j];
        std::vector<double> v(m, 0.0);
        for (int i = 0; i < ni; ++i) v[i + 1] = ges.eigenvectors()(i, j);
        fix_sign(v);
        res.modes[j] = std::move(v);
    }
    return res;
}

} // namespace

SpectrumResult spectrum(const Profile& about, Radius L, ModeBasis basis, int n_modes,
                        const SpectrumOptions& opts) {
    if (n_modes < 1) throw std::invalid_argument("spectrum: n_modes must be >= 1");
    if (opts.method == SpectrumMethod::galerkin && basis.size < n_modes + 8)
        throw std::invalid_argument("spectrum: basis size " + std::to_string(basis.size) +
                                    " too small for " + std::to_string(n_modes) +
                                    " modes (need n_modes + 8 margin)");

    SpectrumResult res = (opts.method == SpectrumMethod::galerkin)
                             ? spectrum_galerkin(about, L, basis, n_modes, opts)
                             : spectrum_fd(about, L, n_modes, opts);
    res.radius = L.value();
    res.method = opts.method;
    double dev = 0.0;
    for (std::size_t i = 0; i < about.size(); ++i)
        dev = std::max(dev, std::abs(about.values()[i] - about.grid()[i]));
    res.about = (dev < 1e-12) ? "identity" : "numeric";
    return res;
}

} // namespace skys3::hessian
