#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "skys3/continuation.hpp"
#include "skys3/perturbation.hpp"
#include "skys3/types.hpp"

using namespace skys3;
using namespace skys3::continuation;

namespace {
const double sqrt2 = std::sqrt(2.0);
}

TEST_CASE("critical radius from the assembled and closed-form lowest eigenvalue") {
    const CriticalRadiusResult cr = critical_radius(1e-10);
    CHECK(std::abs(cr.numeric - sqrt2) <= 1e-8);
    CHECK(std::abs(cr.closed_form - sqrt2) <= 1e-12);
    CHECK(cr.tol == 1e-10);
    CHECK(cr.numeric_iterations > 0);
    CHECK(cr.closed_form_iterations > 0);
}

TEST_CASE("critical radius requires a sign change in the bracket") {
    CHECK_THROWS_AS(critical_radius(1e-10, 2.0, 3.0), std::exception);
}

TEST_CASE("branch names are stable strings") {
    CHECK(branch_name(BranchId::identity) == "identity");
    CHECK(branch_name(BranchId::skyrmion_plus) == "skyrmion_plus");
    CHECK(branch_name(BranchId::skyrmion_minus) == "skyrmion_minus");
}

TEST_CASE("sweep classifies branches across the critical radius") {
    SweepConfig cfg;
    cfg.near_critical_refinement = false;
    const BranchTable table = sweep(Radius(1.3), Radius(1.5), 3, cfg);
    CHECK(table.metadata.failures.empty());
    CHECK(table.metadata.samples == std::vector<double>{1.3, 1.4, 1.5});

    // Below the critical radius only the identity branch exists; above it
    // the symmetric pair joins.
    std::multiset<std::pair<double, BranchId>> seen;
    for (const auto& bp : table.points) seen.insert({bp.l, bp.branch});
    CHECK(seen.count({1.3, BranchId::identity}) == 1);
    CHECK(seen.count({1.3, BranchId::skyrmion_plus}) == 0);
    CHECK(seen.count({1.4, BranchId::skyrmion_plus}) == 0);
    CHECK(seen.count({1.5, BranchId::identity}) == 1);
    CHECK(seen.count({1.5, BranchId::skyrmion_plus}) == 1);
    CHECK(seen.count({1.5, BranchId::skyrmion_minus}) == 1);

    for (const auto& bp : table.points) {
        if (bp.branch == BranchId::identity) {
            CHECK(bp.slope0 == doctest::Approx(1.0).epsilon(1e-8));
            // The lowest identity eigenvalue matches 2/L - L.
            CHECK(bp.lambda0 == doctest::Approx(2 / bp.l - bp.l).epsilon(1e-7).scale(1.0));
            CHECK(std::abs(bp.x_meas) <= 1e-9);
        } else {
            CHECK(bp.l > sqrt2);
            CHECK(bp.lambda0 > 0.0); // the pair is the stable branch
        }
        CHECK(bp.energy > 0.0);
    }

    // Points are ordered by radius, identity first within a radius.
    for (std::size_t i = 1; i < table.points.size(); ++i) {
        const auto& a = table.points[i - 1];
        const auto& b = table.points[i];
        CHECK(a.l <= b.l);
        if (a.l == b.l) CHECK(static_cast<int>(a.branch) < static_cast<int>(b.branch));
    }

    // Metadata records the sweep geometry.
    CHECK(table.metadata.l_min == 1.3);
    CHECK(table.metadata.l_max == 1.5);
    CHECK(table.metadata.steps == 3);
    CHECK(table.metadata.grid_size > 0);
}

TEST_CASE("near-critical refinement resolves the square-root branch shape") {
    SweepConfig cfg; // refinement on by default
    const BranchTable table = sweep(Radius(sqrt2 + 0.002), Radius(sqrt2 + 0.05), 2, cfg);
    CHECK(table.metadata.failures.empty());
    // The refinement inserts extra samples between the two endpoints.
    CHECK(table.metadata.samples.size() >= 8);

    double prev_plus = 0.0, prev_l = 0.0;
    int plus_count = 0;
    for (const auto& bp : table.points) {
        if (bp.branch != BranchId::skyrmion_plus) continue;
        ++plus_count;
        CHECK(bp.lambda0 > 0.0);
        if (plus_count > 1) {
            // lambda0 decreases monotonically toward zero as L drops to
            // sqrt2; the amplitude shrinks with it.
            CHECK(bp.lambda0 > prev_plus);
            CHECK(bp.l > prev_l);
        }
        prev_plus = bp.lambda0;
        prev_l = bp.l;

        // The measured amplitude follows the adopted square-root law within
        // a few percent over this window.
        const double predicted = perturbation::amplitude_from_radius(Radius(bp.l));
        CHECK(bp.x_meas == doctest::Approx(predicted).epsilon(0.03));
    }
    CHECK(plus_count >= 8);

    // The pair is symmetric: equal energies, opposite amplitudes.
    for (const auto& p : table.points) {
        if (p.branch != BranchId::skyrmion_plus) continue;
        for (const auto& m : table.points) {
            if (m.branch != BranchId::skyrmion_minus || m.l != p.l) continue;
            CHECK(m.energy == doctest::Approx(p.energy).epsilon(1e-8));
            CHECK(m.x_meas == doctest::Approx(-p.x_meas).epsilon(1e-5));
            CHECK(m.lambda0 == doctest::Approx(p.lambda0).epsilon(1e-5));
        }
    }
}

TEST_CASE("stability exchange report summarizes the eigenvalue trends") {
    const BranchTable table = sweep(Radius(sqrt2 + 0.002), Radius(sqrt2 + 0.05), 2, {});
    const StabilityReport rep = stability_exchange_report(table);
    CHECK(rep.skyrmion_tends_to_zero);
    CHECK(rep.identity_tends_to_zero);
    CHECK(rep.identity_closed_form_deviation <= 1e-8);
    REQUIRE(!rep.rows.empty());
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        CHECK(rep.rows[i].l > rep.rows[i - 1].l);
    for (const auto& row : rep.rows) {
        CHECK(row.has_identity);
        CHECK(row.identity_closed_form == doctest::Approx(2 / row.l - row.l).epsilon(1e-15));
        if (row.has_plus) {
            CHECK(row.lambda0_plus > 0.0);
            CHECK(row.lambda0_identity < 0.0); // instability above sqrt2
        }
    }
}

TEST_CASE("stability report needs enough near-critical samples") {
    BranchTable empty;
    CHECK_THROWS_AS(stability_exchange_report(empty), std::exception);
}

TEST_CASE("sweeps are deterministic") {
    SweepConfig cfg;
    cfg.near_critical_refinement = false;
    const BranchTable a = sweep(Radius(1.35), Radius(1.55), 3, cfg);
    const BranchTable b = sweep(Radius(1.35), Radius(1.55), 3, cfg);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].l == b.points[i].l);
        CHECK(a.points[i].branch == b.points[i].branch);
        // Bitwise equality, not approximate.
        CHECK(a.points[i].slope0 == b.points[i].slope0);
        CHECK(a.points[i].energy == b.points[i].energy);
        CHECK(a.points[i].lambda0 == b.points[i].lambda0);
        CHECK(a.points[i].x_meas == b.points[i].x_meas);
    }
}
