#include "skys3/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "skys3/model.hpp"
#include "skys3/perturbation.hpp"

namespace skys3::continuation {

namespace {
const double sqrt2 = std::sqrt(2.0);
} // namespace

std::string branch_name(BranchId id) {
    switch (id) {
    case BranchId::identity: return "identity";
    case BranchId::skyrmion_plus: return "skyrmion_plus";
    case BranchId::skyrmion_minus: return "skyrmion_minus";
    }
    return "unknown";
}

namespace {

// Fallback classification where nearest-slope matching has no usable
// predecessor: the identity root sits at slope0 = 1 (the bracketing solver
// polishes it to ~1e-10), the pair flanks it.
BranchId classify_by_slope(double slope0) {
    if (std::abs(slope0 - 1.0) <= 1e-6) return BranchId::identity;
    return slope0 > 1.0 ? BranchId::skyrmion_plus : BranchId::skyrmion_minus;
}

int branch_rank(BranchId id) {
    switch (id) {
    case BranchId::identity: return 0;
    case BranchId::skyrmion_plus: return 1;
    case BranchId::skyrmion_minus: return 2;
    }
    return 3;
}

} // namespace

BranchTable sweep(Radius l_min, Radius l_max, int steps, const SweepConfig& cfg) {
    if (!(l_min.value() < l_max.value()))
        throw std::invalid_argument("sweep: need l_min < l_max");
    if (steps < 2) throw std::invalid_argument("sweep: need steps >= 2");

    std::vector<double> samples;
    for (int k = 0; k < steps; ++k)
        samples.push_back(l_min.value() +
                          (l_max.value() - l_min.value()) * double(k) / double(steps - 1));
    if (cfg.near_critical_refinement && cfg.refine_samples > 0) {
        const double lo = sqrt2 + cfg.refine_lo, hi = sqrt2 + cfg.refine_hi;
        for (int j = 0; j < cfg.refine_samples; ++j) {
            const double l = (cfg.refine_samples == 1)
                                 ? lo
                                 : lo * std::pow(hi / lo, double(j) / (cfg.refine_samples - 1));
            if (l >= l_min.value() && l <= l_max.value()) samples.push_back(l);
        }
    }
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end(),
                              [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                  samples.end());

    const auto rule = QuadratureRule::gauss_legendre_composite(cfg.quadrature_nodes);

    BranchTable table;
    table.metadata.l_min = l_min.value();
    table.metadata.l_max = l_max.value();
    table.metadata.steps = steps;
    table.metadata.tol = cfg.tol;
    table.metadata.grid_size = cfg.solve.shoot.grid_size;
    table.metadata.basis_size = cfg.basis.size;
    table.metadata.quadrature_nodes = cfg.quadrature_nodes;
    table.metadata.slope_min = cfg.solve.slope_min;
    table.metadata.slope_max = cfg.solve.slope_max;
    table.metadata.mesh_points = cfg.solve.mesh_points;
    table.metadata.subdivisions = cfg.solve.subdivisions;
    table.metadata.samples = samples;

    std::vector<std::pair<double, BranchId>> previous; // (slope0, label) at the last L

    for (double l : samples) {
        const Radius L(l);
        std::vector<elsolver::ShootingResult> sols;
        try {
            sols = elsolver::solve_bvp(L, ChargeSector{1}, cfg.tol, cfg.solve);
            if (sols.empty()) throw std::runtime_error("no solutions found");
        } catch (const std::exception& e) {
            table.metadata.failures.push_back({l, e.what()});
            continue;
        }

        // Nearest-slope matching against the previous sample; positional
        // fallback whenever that leaves duplicates (branch births).
        std::vector<BranchId> labels(sols.size());
        bool ok = !previous.empty() && previous.size() >= sols.size();
        if (ok) {
            std::vector<bool> seen(3, false);
            for (std::size_t i = 0; i < sols.size(); ++i) {
                double best = std::numeric_limits<double>::infinity();
                BranchId pick = BranchId::identity;
                for (const auto& [s, id] : previous) {
                    const double d = std::abs(s - sols[i].slope0);
                    if (d < best) {
                        best = d;
                        pick = id;
                    }
                }
                labels[i] = pick;
                if (seen[branch_rank(pick)]) ok = false;
                seen[branch_rank(pick)] = true;
            }
        }
        if (!ok)
            for (std::size_t i = 0; i < sols.size(); ++i)
                labels[i] = classify_by_slope(sols[i].slope0);

        previous.clear();
        std::vector<BranchPoint> here;
        for (std::size_t i = 0; i < sols.size(); ++i) {
            const Profile& p = *sols[i].profile;
            BranchPoint bp;
            bp.l = l;
            bp.branch = labels[i];
            bp.slope0 = sols[i].slope0;
            bp.energy = model::energy(p, L, rule).total;
            bp.x_meas = perturbation::measure_amplitude(p, rule);
            try {
                bp.lambda0 =
                    hessian::spectrum(p, L, cfg.basis, 1, cfg.spectrum).eigenvalues.front();
            } catch (const std::exception& e) {
                table.metadata.failures.push_back({l, e.what()});
                continue;
            }
            here.push_back(bp);
            previous.emplace_back(bp.slope0, bp.branch);
        }
        std::sort(here.begin(), here.end(), [](const BranchPoint& a, const BranchPoint& b) {
            return branch_rank(a.branch) < branch_rank(b.branch);
        });
        table.points.insert(table.points.end(), here.begin(), here.end());
    }
    return table;
}

namespace {

double lambda0_numeric(Radius L) {
    static const Profile id = model::identity_profile(101);
    hessian::SpectrumOptions opts;
    return hessian::spectrum(id, L, hessian::ModeBasis{40}, 1, opts).eigenvalues.front();
}

template <class Fn>
double bisect_sign_change(Fn&& f, double lo, double hi, double tol, int& iterations,
                          const char* what) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0))
        throw std::runtime_error(std::string(what) + ": no sign change in bracket [" +
                                 std::to_string(lo) + ", " + std::to_string(hi) + "]");
    iterations = 0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break; // bracket narrower than spacing
        const double fm = f(mid);
        ++iterations;
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        if (iterations > 200) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace

CriticalRadiusResult critical_radius(double tol, double bracket_lo, double bracket_hi) {
    if (tol <= 0.0) throw std::invalid_argument("critical_radius: tol must be > 0");
    if (!(bracket_lo > 0.0 && bracket_lo < bracket_hi))
        throw std::invalid_argument("critical_radius: invalid bracket");
    CriticalRadiusResult res;
    res.tol = tol;
    res.numeric = bisect_sign_change([](double l) { return lambda0_numeric(Radius(l)); },
                                     bracket_lo, bracket_hi, tol, res.numeric_iterations,
                                     "critical_radius");
    // The closed-form eigenvalue costs nothing to evaluate; bisect it to
    // machine precision regardless of the numeric tolerance.
    res.closed_form = bisect_sign_change(
        [](double l) { return hessian::analytic_lambda(0, Radius(l)); }, bracket_lo, bracket_hi,
        std::min(tol, 1e-15), res.closed_form_iterations, "critical_radius (closed form)");
    return res;
}

StabilityReport stability_exchange_report(const BranchTable& table) {
    StabilityReport rep;
    // One row per distinct L, ascending (table points are ordered by L).
    for (const auto& bp : table.points) {
        if (rep.rows.empty() || std::abs(rep.rows.back().l - bp.l) > 1e-12) {
            rep.rows.push_back({});
            rep.rows.back().l = bp.l;
            rep.rows.back().identity_closed_form = 2.0 / bp.l - bp.l;
        }
        StabilityRow& row = rep.rows.back();
        switch (bp.branch) {
        case BranchId::identity:
            row.has_identity = true;
            row.lambda0_identity = bp.lambda0;
            break;
        case BranchId::skyrmion_plus:
            row.has_plus = true;
            row.lambda0_plus = bp.lambda0;
            break;
        case BranchId::skyrmion_minus:
            row.has_minus = true;
            row.lambda0_minus = bp.lambda0;
            break;
        }
    }

    for (const auto& row : rep.rows)
        if (row.has_identity)
            rep.identity_closed_form_deviation =
                std::max(rep.identity_closed_form_deviation,
                         std::abs(row.lambda0_identity - row.identity_closed_form));

    // Trend checks over the window reaching down to sqrt2.
    const double window_hi = sqrt2 + 0.06;
    std::vector<const StabilityRow*> near;
    for (const auto& row : rep.rows)
        if (row.l > sqrt2 && row.l <= window_hi && row.has_plus && row.has_identity)
            near.push_back(&row);
    if (near.size() < 3)
        throw std::runtime_error("stability_exchange_report: fewer than 3 skyrmion samples "
                                 "near sqrt(2); sweep a range reaching the critical radius");

    rep.skyrmion_tends_to_zero = true;
    rep.identity_tends_to_zero = true;
    for (std::size_t i = 0; i < near.size(); ++i) {
        if (!(near[i]->lambda0_plus > 0.0)) rep.skyrmion_tends_to_zero = false;
        if (!(near[i]->lambda0_identity < 0.0)) rep.identity_tends_to_zero = false;
        if (i + 1 < near.size()) {
            if (!(near[i]->lambda0_plus < near[i + 1]->lambda0_plus))
                rep.skyrmion_tends_to_zero = false;
            if (!(near[i]->lambda0_identity > near[i + 1]->lambda0_identity))
                rep.identity_tends_to_zero = false;
        }
    }
    rep.notes = "lambda0 trends checked over " + std::to_string(near.size()) +
                " samples in (sqrt2, sqrt2+0.06]";
    return rep;
}

} // namespace skys3::continuation
