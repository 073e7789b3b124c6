#include "skys3/elsolver.hpp"

#include <algorithm>
#include <cstdio>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "skys3/ode.hpp"

namespace skys3::elsolver {

double el_residual(double f, double fp, double fpp, double psi, Radius L) {
    if (!std::isfinite(f) || !std::isfinite(fp) || !std::isfinite(fpp) || !std::isfinite(psi))
        throw std::invalid_argument("el_residual: non-finite input");
    if (!(psi > 0.0 && psi < pi))
        throw std::invalid_argument("el_residual: psi must lie strictly inside (0, pi)");
    const double l = L.value(), li = 1.0 / l;
    const double s = std::sin(f), sig = std::sin(psi);
    const double s2 = s * s, sig2 = sig * sig;
    const double sin2f = std::sin(2.0 * f), sin2psi = std::sin(2.0 * psi);

    const double lead = (l * sig2 + 2.0 * li * s2) * fpp;
    double middle;
    if (std::abs(sin2psi) < 1e-8) {
        // (sin2F/sin2psi) * sin2psi cancels exactly; expanded form avoids the
        // 0/0 at psi = pi/2.
        middle = (l * sin2psi + li * sin2f * fp) * fp;
    } else {
        middle = (l + li * (sin2f / sin2psi) * fp) * sin2psi * fp;
    }
    const double tail = (l * sig2 + li * s2) * sin2f / sig2;
    return lead + middle - tail;
}

EndpointSeries::EndpointSeries(double slope, Radius L, ChargeSector q, Endpoint end)
    : a_(slope), q_(q.q), end_(end) {
    if (!std::isfinite(slope)) throw std::invalid_argument("EndpointSeries: non-finite slope");
    if (q.q == 1 && slope <= 0.0)
        throw std::invalid_argument("EndpointSeries: charge-1 trajectories need slope > 0, got " +
                                    std::to_string(slope));
    const double l2 = L.value() * L.value();
    const double a2 = slope * slope;
    b_ = slope * (1.0 - a2) * (2.0 * l2 + a2) / (15.0 * (l2 + 2.0 * a2));
}

double EndpointSeries::value(double psi) const {
    if (end_ == Endpoint::left) return a_ * psi + b_ * psi * psi * psi;
    const double u = pi - psi;
    return q_ * pi - (a_ * u + b_ * u * u * u);
}

double EndpointSeries::slope(double psi) const {
    const double u = (end_ == Endpoint::left) ? psi : pi - psi;
    return a_ + 3.0 * b_ * u * u;
}

namespace {

struct ElRhs {
    double l, li;
    std::array<double, 2> operator()(double psi, const std::array<double, 2>& y) const {
        const double f = y[0], fp = y[1];
        const double s = std::sin(f), sig = std::sin(psi);
        const double s2 = s * s, sig2 = sig * sig;
        const double sin2f = std::sin(2.0 * f), sin2psi = std::sin(2.0 * psi);
        const double lead = l * sig2 + 2.0 * li * s2;
        const double middle = (l * sin2psi + li * sin2f * fp) * fp;
        const double tail = (l * sig2 + li * s2) * sin2f / sig2;
        return {fp, (tail - middle) / lead};
    }
};

struct Window {
    double lo, hi;
    bool contains(double f) const { return f >= lo && f <= hi; }
};

Window admissible_window(int q) {
    const double f_end = q * pi;
    return {std::min(0.0, f_end) - pi, std::max(0.0, f_end) + pi};
}

ode::StepControl step_control(const ShootOptions& opts) {
    ode::StepControl ctl;
    ctl.abs_tol = opts.abs_tol;
    ctl.rel_tol = opts.rel_tol;
    ctl.h_max = 0.05;
    return ctl;
}

struct CrossResult {
    bool ok = false;       // reached pi - eps
    double miss = 0.0;     // converged: first-order extrapolation to pi;
                           // diverged: window-exit value minus q*pi
    double f = 0.0, fp = 0.0;
    double psi_fail = 0.0;
    long steps = 0;
};

// Light traversal without node stops; used for bracketing.
CrossResult integrate_across(Radius L, ChargeSector q, double slope0,
                             const ShootOptions& opts) {
    const double eps = opts.endpoint_offset;
    const EndpointSeries series(slope0, L, q, Endpoint::left);
    const ElRhs rhs{L.value(), 1.0 / L.value()};
    const Window win = admissible_window(q.q);

    std::array<double, 2> y{series.value(eps), series.slope(eps)};
    double t_last = eps;
    std::array<double, 2> y_last = y;
    ode::DormandPrince5<2> integ(step_control(opts));
    const auto status = integ.integrate(rhs, eps, pi - eps, y, [&](double t, const auto& s) {
        t_last = t;
        y_last = s;
        return win.contains(s[0]);
    });

    CrossResult res;
    res.steps = integ.accepted_steps();
    if (status == ode::StepStatus::done) {
        res.ok = true;
        res.f = y[0];
        res.fp = y[1];
        res.miss = y[0] + eps * y[1] - q.q * pi;
    } else {
        res.psi_fail = t_last;
        res.f = y_last[0];
        res.fp = y_last[1];
        res.miss = y_last[0] - q.q * pi;
    }
    return res;
}

constexpr std::size_t no_seam = std::numeric_limits<std::size_t>::max();

// F'' at the interior nodes of a uniform grid by five-point first-derivative
// stencils applied to the stored slopes.  When the data was assembled from
// two trajectories matched at a seam (`seam` = last index of the left half),
// stencils are kept on one side of it: samples from the two halves agree
// only to the matching tolerance, and a stencil mixing them would amplify
// that mismatch by 1/h.
std::vector<double> second_derivative_from_slopes(const std::vector<double>& psi,
                                                  const std::vector<double>& df,
                                                  std::size_t seam = no_seam) {
    const std::size_t m = psi.size();
    std::vector<double> fpp(m, 0.0);
    const std::size_t width = std::min<std::size_t>(5, m);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        std::size_t win_lo = 0, win_hi = m - 1; // inclusive node range open to the stencil
        if (seam != no_seam) {
            if (i <= seam)
                win_hi = seam;
            else
                win_lo = seam + 1;
        }
        std::size_t lo = (i >= width / 2) ? i - width / 2 : 0;
        lo = std::max(lo, win_lo);
        lo = std::min(lo, win_hi + 1 - width);
        const auto w = fd_weights(std::span<const double>(psi.data() + lo, width), psi[i], 1);
        double acc = 0.0;
        for (std::size_t j = 0; j < width; ++j) acc += w[j] * df[lo + j];
        fpp[i] = acc;
    }
    return fpp;
}

double residual_norm_of(const std::vector<double>& psi, const std::vector<double>& f,
                        const std::vector<double>& df, Radius L, std::size_t seam = no_seam) {
    const auto fpp = second_derivative_from_slopes(psi, df, seam);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < psi.size(); ++i)
        worst = std::max(worst, std::abs(el_residual(f[i], df[i], fpp[i], psi[i], L)));
    return worst;
}

} // namespace

ShootingResult shoot(Radius L, ChargeSector q, double slope0, const ShootOptions& opts) {
    if (opts.grid_size < 5) throw std::invalid_argument("shoot: grid_size must be >= 5");
    const double eps = opts.endpoint_offset;
    const EndpointSeries series(slope0, L, q, Endpoint::left);
    const ElRhs rhs{L.value(), 1.0 / L.value()};
    const Window win = admissible_window(q.q);

    const std::vector<double> psi = uniform_grid(opts.grid_size);
    const std::size_t m = psi.size();
    std::vector<double> f(m), df(m);
    f[0] = 0.0;
    df[0] = slope0;

    ShootingResult res;
    res.slope0 = slope0;

    std::array<double, 2> y{series.value(eps), series.slope(eps)};
    double t_last = eps;
    std::array<double, 2> y_last = y;
    ode::DormandPrince5<2> integ(step_control(opts));
    const auto monitor = [&](double t, const std::array<double, 2>& s) {
        t_last = t;
        y_last = s;
        return win.contains(s[0]);
    };

    // Segment-by-segment traversal with forced stops at the interior nodes;
    // the integrator keeps its adaptive step across segments.
    double t = eps;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const auto status = integ.integrate(rhs, t, psi[i], y, monitor);
        if (status != ode::StepStatus::done) {
            res.status = ShootStatus::diverged;
            res.psi_fail = t_last;
            res.boundary_miss = y_last[0] - q.q * pi;
            res.iterations = integ.accepted_steps();
            return res;
        }
        t = psi[i];
        f[i] = y[0];
        df[i] = y[1];
    }
    const auto status = integ.integrate(rhs, t, pi - eps, y, monitor);
    if (status != ode::StepStatus::done) {
        res.status = ShootStatus::diverged;
        res.psi_fail = t_last;
        res.boundary_miss = y_last[0] - q.q * pi;
        res.iterations = integ.accepted_steps();
        return res;
    }
    res.iterations = integ.accepted_steps();
    res.boundary_miss = y[0] + eps * y[1] - q.q * pi;

    f[m - 1] = q.q * pi;
    df[m - 1] = y[1];
    res.residual_norm = residual_norm_of(psi, f, df, L);
    // Boundary projection of the profile is justified only within the miss.
    const double profile_tol = std::max(opts.boundary_tol, 2.0 * std::abs(res.boundary_miss));
    res.profile.emplace(psi, f, df, q, profile_tol);
    res.status = (std::abs(res.boundary_miss) <= opts.boundary_tol) ? ShootStatus::converged
                                                                    : ShootStatus::not_converged;
    return res;
}

namespace {

struct MeshPoint {
    double slope;
    double miss;
    bool ok;
};

struct RefineOutcome {
    double slope = 0.0;
    /// Smallest |miss| seen among converged trajectories during refinement.
    /// Stays O(1) when the sign change is a discontinuity between trajectory
    /// families (a spurious crossing), shrinks toward 0 at a genuine root.
    double best_abs_miss = std::numeric_limits<double>::infinity();
};

// Safeguarded secant (Illinois) on the boundary miss; both bracket ends may
// be diverged trajectories, their capped miss still carries the sign.
RefineOutcome refine_bracket(Radius L, ChargeSector q, const ShootOptions& opts, MeshPoint a,
                             MeshPoint b, int max_iter) {
    RefineOutcome out;
    auto note = [&](const MeshPoint& p) {
        if (p.ok) out.best_abs_miss = std::min(out.best_abs_miss, std::abs(p.miss));
    };
    note(a);
    note(b);
    auto eval = [&](double s) {
        const CrossResult c = integrate_across(L, q, s, opts);
        const MeshPoint p{s, c.miss, c.ok};
        note(p);
        return p;
    };
    int last_side = 0;
    for (int iter = 0; iter < max_iter; ++iter) {
        const double width = b.slope - a.slope;
        if (width <= 1e-12 * std::max(1.0, std::abs(b.slope))) {
            out.slope = 0.5 * (a.slope + b.slope);
            return out;
        }
        double cand;
        const double denom = b.miss - a.miss;
        if (denom != 0.0 && a.ok && b.ok) {
            cand = a.slope - a.miss * width / denom;
            const double margin = 0.01 * width;
            if (!(cand > a.slope + margin && cand < b.slope - margin))
                cand = 0.5 * (a.slope + b.slope);
        } else {
            cand = 0.5 * (a.slope + b.slope);
        }
        MeshPoint p = eval(cand);
        if ((p.miss < 0.0) == (a.miss < 0.0)) {
            a = p;
            if (last_side == -1) b.miss *= 0.5; // Illinois: unstick the far end
            last_side = -1;
        } else {
            b = p;
            if (last_side == +1) a.miss *= 0.5;
            last_side = +1;
        }
    }
    throw std::runtime_error("solve_bvp: bracket refinement did not converge near slope " +
                             std::to_string(0.5 * (a.slope + b.slope)));
}

// Integrate one half of the domain from the given end to pi/2 without node
// recording; returns (F, F') at pi/2, or nothing when the trajectory leaves
// the admissible window.
std::optional<std::array<double, 2>> half_state(Radius L, ChargeSector q,
                                                const ShootOptions& opts, double slope,
                                                Endpoint end) {
    const ElRhs rhs{L.value(), 1.0 / L.value()};
    const Window win = admissible_window(q.q);
    const EndpointSeries series(slope, L, q, end);
    ode::DormandPrince5<2> integ(step_control(opts));
    bool exited = false;
    const auto monitor = [&](double, const std::array<double, 2>& s) {
        exited = !win.contains(s[0]);
        return !exited;
    };
    const double t0 = (end == Endpoint::left) ? opts.endpoint_offset : pi - opts.endpoint_offset;
    std::array<double, 2> y{series.value(t0), series.slope(t0)};
    double t = t0;
    if (integ.integrate(rhs, t, pi / 2.0, y, monitor) != ode::StepStatus::done)
        return std::nullopt;
    return y;
}

// Scan right-end slopes for a sign change of the position mismatch at pi/2
// against the frozen left half, then bisect it.  Hands the two-sided matcher
// a seed inside its convergence basin when nothing else hints at the value
// (the mirror root may lie outside the bracketing mesh entirely).
std::optional<double> scan_right_seed(Radius L, ChargeSector q, const ShootOptions& opts,
                                      double slope_left, double lo, double hi) {
    const auto yl = half_state(L, q, opts, slope_left, Endpoint::left);
    if (!yl) return std::nullopt;
    const double target = (*yl)[0];
    auto delta = [&](double a) -> std::optional<double> {
        const auto yr = half_state(L, q, opts, a, Endpoint::right);
        if (!yr) return std::nullopt;
        return target - (*yr)[0];
    };
    constexpr int n_scan = 48;
    double prev_a = 0.0;
    std::optional<double> prev_d;
    for (int k = 0; k < n_scan; ++k) {
        const double a = lo * std::pow(hi / lo, double(k) / (n_scan - 1));
        const auto d = delta(a);
        if (d && prev_d && (*d < 0.0) != (*prev_d < 0.0)) {
            double a0 = prev_a, a1 = a, d0 = *prev_d;
            for (int it = 0; it < 40 && (a1 - a0) > 1e-9 * a1; ++it) {
                const double am = 0.5 * (a0 + a1);
                const auto dm = delta(am);
                if (!dm) break; // window exit inside the bracket: take what we have
                if ((*dm < 0.0) == (d0 < 0.0)) {
                    a0 = am;
                    d0 = *dm;
                } else {
                    a1 = am;
                }
            }
            return 0.5 * (a0 + a1);
        }
        if (d) {
            prev_d = *d;
            prev_a = a;
        } else {
            prev_d.reset();
        }
    }
    return std::nullopt;
}

// The boundary miss can be extremely sensitive to the initial slope (the
// flat-side member of the skyrmion pair at larger L reaches d miss/d slope
// of order 1e6), and the light traversal used for bracketing differs from
// the node-stopping one by enough to matter at that sensitivity.  Finish
// the polish with secant iterations on the full shoot itself.
ShootingResult polish_on_full_shoot(Radius L, ChargeSector q, double root,
                                    const ShootOptions& opts) {
    ShootingResult r1 = shoot(L, q, root, opts);
    if (r1.status != ShootStatus::not_converged) return r1;
    double s1 = root;
    double s2 = root * (1.0 + 1e-9) + 1e-13;
    ShootingResult r2 = shoot(L, q, s2, opts);
    const double step_cap = 1e-5 * std::max(1.0, std::abs(root));
    double best = std::min(std::abs(r1.boundary_miss), std::abs(r2.boundary_miss));
    int stalled = 0;
    for (int iter = 0; iter < 30; ++iter) {
        if (r2.status == ShootStatus::converged) return r2;
        if (r2.status == ShootStatus::diverged) return r2;
        // When the miss is dominated by amplified integration noise, secant
        // steps stop improving it; give up and let the caller fall back.
        if (std::abs(r2.boundary_miss) < 0.5 * best) {
            best = std::abs(r2.boundary_miss);
            stalled = 0;
        } else if (++stalled >= 6) {
            break;
        }
        const double denom = r2.boundary_miss - r1.boundary_miss;
        if (denom == 0.0) break;
        double step = -r2.boundary_miss * (s2 - s1) / denom;
        step = std::clamp(step, -step_cap, step_cap);
        const double s3 = s2 + step;
        if (s3 == s2) break;
        r1 = std::move(r2);
        s1 = s2;
        r2 = shoot(L, q, s3, opts);
        s2 = s3;
    }
    return std::abs(r1.boundary_miss) < std::abs(r2.boundary_miss) ? r1 : r2;
}

ShootingResult negate(ShootingResult r) {
    r.slope0 = -r.slope0;
    r.boundary_miss = -r.boundary_miss;
    if (r.profile) {
        std::vector<double> f = r.profile->values(), df = r.profile->slopes();
        for (auto& v : f) v = -v;
        for (auto& v : df) v = -v;
        ChargeSector q{-r.profile->charge().q};
        r.profile.emplace(r.profile->grid(), std::move(f), std::move(df), q);
    }
    return r;
}

} // namespace

std::vector<ShootingResult> solve_bvp(Radius L, ChargeSector q, double tol,
                                      const SolveOptions& opts) {
    if (tol <= 0.0) throw std::invalid_argument("solve_bvp: tol must be > 0");
    if (q.q == 0) return {}; // the vacuum sector has only F == 0
    if (q.q < 0) {
        // F -> -F maps sector q to -q; solve there and map back.  Negating
        // reverses the slope ordering, so restore the ascending sort.
        auto sols = solve_bvp(L, ChargeSector{-q.q}, tol, opts);
        for (auto& s : sols) s = negate(std::move(s));
        std::reverse(sols.begin(), sols.end());
        return sols;
    }

    if (opts.mesh_points < 2 || opts.subdivisions < 1 ||
        !(opts.slope_min > 0.0 && opts.slope_min < opts.slope_max))
        throw std::invalid_argument("solve_bvp: invalid slope-mesh options");

    // Coarse logarithmic mesh with a linear rescan inside every interval:
    // close root pairs (the near-critical skyrmion pair flanking slope 1)
    // would not change the miss sign at the coarse resolution.
    std::vector<double> slopes;
    const int n_coarse = opts.mesh_points;
    const double ratio = opts.slope_max / opts.slope_min;
    for (int k = 0; k < n_coarse; ++k) {
        const double s = opts.slope_min * std::pow(ratio, double(k) / double(n_coarse - 1));
        slopes.push_back(s);
        if (k + 1 < n_coarse) {
            const double next =
                opts.slope_min * std::pow(ratio, double(k + 1) / double(n_coarse - 1));
            for (int j = 1; j < opts.subdivisions; ++j)
                slopes.push_back(s + (next - s) * double(j) / double(opts.subdivisions));
        }
    }

    std::vector<MeshPoint> mesh;
    mesh.reserve(slopes.size());
    for (double s : slopes) {
        const CrossResult c = integrate_across(L, q, s, opts.shoot);
        mesh.push_back({s, c.miss, c.ok});
    }

    // A sign change across a divergence boundary (both trajectory families
    // blow up, in opposite directions) is not a root: there the miss stays at
    // the window-cap plateau (about pi/2) as the bracket shrinks, while at a
    // genuine root it collapses to the integration noise floor, which stays
    // well below this for the radii the slope mesh covers.
    constexpr double spurious_floor = 0.3;
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
        const MeshPoint& a = mesh[i];
        const MeshPoint& b = mesh[i + 1];
        if (a.miss == 0.0) {
            roots.push_back(a.slope);
            continue;
        }
        if ((a.miss < 0.0) != (b.miss < 0.0)) {
            const RefineOutcome ro =
                refine_bracket(L, q, opts.shoot, a, b, opts.max_bracket_iterations);
            if (ro.best_abs_miss < spurious_floor) roots.push_back(ro.slope);
        }
    }
    if (mesh.back().miss == 0.0) roots.push_back(mesh.back().slope);

    std::sort(roots.begin(), roots.end());
    std::vector<double> distinct;
    for (double r : roots)
        if (distinct.empty() || r - distinct.back() > 10.0 * tol) distinct.push_back(r);

    ShootOptions shoot_opts = opts.shoot;
    std::vector<ShootingResult> out;
    for (double r : distinct) {
        ShootingResult full = polish_on_full_shoot(L, q, r, shoot_opts);
        if (full.status != ShootStatus::converged) {
            // Last resort: match left and right trajectories at the middle.
            // The right slope of a genuine solution is itself a root of the
            // same miss function (the equation is symmetric under reflection
            // about pi/2).  Its best estimate is the arrival slope of the
            // polish trajectory one node before the endpoint: the endpoint
            // node itself carries the singular response to the leftover
            // miss and can be wildly off.  The other found roots serve as
            // further seeds.
            double arrival = 0.0;
            if (full.profile && full.profile->slopes().size() >= 2) {
                const auto& sl = full.profile->slopes();
                arrival = sl[sl.size() - 2];
            }
            std::vector<double> seeds;
            auto add_seed = [&](double s) {
                if (!(s > 0.0) || !std::isfinite(s)) return;
                for (double t : seeds)
                    if (std::abs(std::log(t / s)) < 1e-6) return;
                seeds.push_back(s);
            };
            add_seed(arrival);
            const double ref = seeds.empty() ? r : arrival;
            std::vector<double> by_dist = distinct;
            std::sort(by_dist.begin(), by_dist.end(), [&](double x, double y) {
                return std::abs(std::log(x / ref)) < std::abs(std::log(y / ref));
            });
            for (double s : by_dist) add_seed(s);
            add_seed(r);
            // The matched solution must still be the root we started from,
            // not a neighbour the Newton drifted to.  Genuine matches
            // reproduce the candidate slope to a small fraction of a
            // percent; the nearest distinct solution (the other member of
            // a near-critical pair) sits several percent away.
            const auto kept_candidate = [&](const ShootingResult& s) {
                return s.status == ShootStatus::converged && s.slope0 > r / 1.05 &&
                       s.slope0 < r * 1.05;
            };
            for (double seed : seeds) {
                full = shoot_two_sided(L, q, r, seed, shoot_opts);
                if (kept_candidate(full)) break;
                full.status = ShootStatus::not_converged;
            }
            if (full.status != ShootStatus::converged) {
                const auto scanned = scan_right_seed(L, q, shoot_opts, r, opts.slope_min / 10.0,
                                                     opts.slope_max * 10.0);
                if (scanned) {
                    full = shoot_two_sided(L, q, r, *scanned, shoot_opts);
                    if (!kept_candidate(full)) full.status = ShootStatus::not_converged;
                }
            }
        }
        // A candidate no matching arrangement can close is not a regular
        // solution: the boundary miss also crosses zero where the endpoint
        // value sweeps through q*pi with a singular (non-Frobenius) slope,
        // and no trajectory pair meets there.  Drop it.
        if (full.status != ShootStatus::converged) continue;
        if (full.residual_norm > tol) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "solve_bvp: residual norm %.3e at slope %.9g exceeds tol %.3e at L = %g;"
                          " increase grid_size or relax tol",
                          full.residual_norm, r, tol, L.value());
            throw std::runtime_error(buf);
        }
        out.push_back(std::move(full));
    }
    std::sort(out.begin(), out.end(),
              [](const ShootingResult& x, const ShootingResult& y) { return x.slope0 < y.slope0; });
    // Two candidates can resolve to the same solution when the miss sits on
    // a noise plateau around a root; keep one result per distinct slope.
    std::vector<ShootingResult> uniq;
    for (auto& s : out) {
        if (!uniq.empty() && s.slope0 - uniq.back().slope0 <= 10.0 * tol) {
            if (std::abs(s.boundary_miss) < std::abs(uniq.back().boundary_miss))
                uniq.back() = std::move(s);
            continue;
        }
        uniq.push_back(std::move(s));
    }
    return uniq;
}

ShootingResult shoot_two_sided(Radius L, ChargeSector q, double slope_left, double slope_right,
                               const ShootOptions& opts) {
    if (opts.grid_size < 11)
        throw std::invalid_argument("shoot_two_sided: grid_size must be >= 11");
    const double eps = opts.endpoint_offset;
    const ElRhs rhs{L.value(), 1.0 / L.value()};
    const Window win = admissible_window(q.q);
    const double mid = pi / 2.0;

    // (F, F') at pi/2 reached from one endpoint; nodes filled when recording.
    const std::vector<double> psi = uniform_grid(opts.grid_size);
    const std::size_t m = psi.size();
    // Last node belonging to the left half (matching the recording rule below).
    std::size_t seam = 0;
    while (seam + 1 < m && psi[seam + 1] <= mid) ++seam;

    auto half_traversal = [&](double a, Endpoint end, std::vector<double>* f_out,
                              std::vector<double>* df_out,
                              long* steps) -> std::optional<std::array<double, 2>> {
        const EndpointSeries series(a, L, q, end);
        ode::DormandPrince5<2> integ(step_control(opts));
        bool exited = false;
        const auto monitor = [&](double, const std::array<double, 2>& s) {
            exited = !win.contains(s[0]);
            return !exited;
        };
        const double t0 = (end == Endpoint::left) ? eps : pi - eps;
        std::array<double, 2> y{series.value(t0), series.slope(t0)};
        double t = t0;
        if (f_out) {
            // Record trajectory values at the grid nodes on this half.
            if (end == Endpoint::left) {
                for (std::size_t i = 1; i + 1 < m && psi[i] <= mid; ++i) {
                    if (integ.integrate(rhs, t, psi[i], y, monitor) != ode::StepStatus::done)
                        return std::nullopt;
                    t = psi[i];
                    (*f_out)[i] = y[0];
                    (*df_out)[i] = y[1];
                }
            } else {
                for (std::size_t i = m - 2; i >= 1 && psi[i] > mid; --i) {
                    if (integ.integrate(rhs, t, psi[i], y, monitor) != ode::StepStatus::done)
                        return std::nullopt;
                    t = psi[i];
                    (*f_out)[i] = y[0];
                    (*df_out)[i] = y[1];
                }
            }
        }
        if (integ.integrate(rhs, t, mid, y, monitor) != ode::StepStatus::done)
            return std::nullopt;
        if (steps) *steps += integ.accepted_steps();
        return y;
    };

    auto mismatch = [&](double al, double ar) -> std::optional<std::array<double, 2>> {
        const auto yl = half_traversal(al, Endpoint::left, nullptr, nullptr, nullptr);
        const auto yr = half_traversal(ar, Endpoint::right, nullptr, nullptr, nullptr);
        if (!yl || !yr) return std::nullopt;
        return std::array<double, 2>{(*yl)[0] - (*yr)[0], (*yl)[1] - (*yr)[1]};
    };

    double al = slope_left, ar = slope_right;
    ShootingResult res;
    constexpr int max_newton = 50;
    constexpr double match_tol = 1e-10;
    // Keep the iteration near the seeds: a Newton step off a noisy or
    // near-singular Jacobian must not walk the slopes out of the basin
    // (or through zero, where the endpoint series changes character).
    const double wander = 50.0;
    const double al_lo = slope_left / wander, al_hi = slope_left * wander;
    const double ar_lo = slope_right / wander, ar_hi = slope_right * wander;
    std::array<double, 2> mm{};
    bool matched = false;
    for (int iter = 0; iter < max_newton; ++iter) {
        const auto m0 = mismatch(al, ar);
        if (!m0) {
            res.status = ShootStatus::diverged;
            res.slope0 = al;
            return res;
        }
        mm = *m0;
        if (std::hypot(mm[0], mm[1]) <= match_tol) {
            matched = true;
            break;
        }
        const double dl = 1e-7 * std::max(1.0, std::abs(al));
        const double dr = 1e-7 * std::max(1.0, std::abs(ar));
        const auto ml = mismatch(al + dl, ar);
        const auto mr = mismatch(al, ar + dr);
        if (!ml || !mr) {
            res.status = ShootStatus::diverged;
            res.slope0 = al;
            return res;
        }
        // 2x2 Newton step on (dF, dF') at the matching point.
        const double j11 = ((*ml)[0] - mm[0]) / dl, j12 = ((*mr)[0] - mm[0]) / dr;
        const double j21 = ((*ml)[1] - mm[1]) / dl, j22 = ((*mr)[1] - mm[1]) / dr;
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0 || !std::isfinite(det)) break;
        double step_l = (-mm[0] * j22 + mm[1] * j12) / det;
        double step_r = (-j11 * mm[1] + j21 * mm[0]) / det;
        const double cap = 0.5 * std::max({1.0, std::abs(al), std::abs(ar)});
        step_l = std::clamp(step_l, -cap, cap);
        step_r = std::clamp(step_r, -cap, cap);
        al = std::clamp(al + step_l, al_lo, al_hi);
        ar = std::clamp(ar + step_r, ar_lo, ar_hi);
    }

    res.slope0 = al;
    res.boundary_miss = std::hypot(mm[0], mm[1]);
    if (!matched && res.boundary_miss > opts.boundary_tol) {
        res.status = ShootStatus::not_converged;
        return res;
    }

    std::vector<double> f(m, 0.0), df(m, 0.0);
    f[0] = 0.0;
    df[0] = al;
    f[m - 1] = q.q * pi;
    df[m - 1] = ar; // mirrored series slope at pi equals the right shooting slope
    long steps = 0;
    const auto yl = half_traversal(al, Endpoint::left, &f, &df, &steps);
    const auto yr = half_traversal(ar, Endpoint::right, &f, &df, &steps);
    if (!yl || !yr) {
        res.status = ShootStatus::diverged;
        return res;
    }
    res.iterations = steps;
    res.residual_norm = residual_norm_of(psi, f, df, L, seam);
    res.profile.emplace(psi, f, df, q, std::max(opts.boundary_tol, 2.0 * res.boundary_miss));
    res.status = (res.boundary_miss <= opts.boundary_tol) ? ShootStatus::converged
                                                          : ShootStatus::not_converged;
    return res;
}

} // namespace skys3::elsolver
