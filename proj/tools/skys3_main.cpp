#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "skys3/continuation.hpp"
#include "skys3/elsolver.hpp"
#include "skys3/hessian.hpp"
#include "skys3/io.hpp"
#include "skys3/model.hpp"
#include "skys3/perturbation.hpp"
#include "skys3/types.hpp"

namespace {

using namespace skys3;

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::filesystem::path sidecar_path(const std::filesystem::path& output) {
    std::filesystem::path p = output;
    p.replace_extension(".meta.json");
    return p;
}

struct Options {
    double radius = 0.0;
    int charge = 1;
    std::size_t grid = 2001;
    std::size_t spectrum_grid = 601;
    double tol = 1e-8;
    double critical_tol = 1e-10;
    int modes = 8;
    int steps = 16;
    double radius_min = 0.0;
    double radius_max = 0.0;
    std::string output;
    std::string format = "csv";
    std::string method = "galerkin";
    std::string relation = "adopted";
    std::string profile_path;
};

// Every run records its full configuration (defaults included) so the file
// alone reproduces it.
void write_common_meta(io::JsonWriter& w, const char* command, const Options& o) {
    w.key("command").value(command);
    w.key("timestamp").value(iso_timestamp());
    w.key("parameters").begin_object();
    w.key("radius").value(o.radius);
    w.key("charge").value(o.charge);
    w.key("grid").value(o.grid);
    w.key("tol").value(o.tol);
    w.key("modes").value(o.modes);
    w.key("steps").value(o.steps);
    w.key("radius_min").value(o.radius_min);
    w.key("radius_max").value(o.radius_max);
    w.key("output").value(o.output);
    w.key("format").value(o.format);
    w.key("method").value(o.method);
    w.key("relation").value(o.relation);
    w.key("profile").value(o.profile_path);
    w.end_object();
    w.key("defaults").begin_object();
    w.key("quadrature_nodes").value(2048);
    w.key("endpoint_offset").value(1e-6);
    w.key("integrator_abs_tol").value(1e-12);
    w.key("integrator_rel_tol").value(1e-10);
    w.key("slope_min").value(0.05);
    w.key("slope_max").value(50.0);
    w.key("mesh_points").value(64);
    w.key("subdivisions").value(8);
    w.key("basis_size").value(48);
    w.key("boundary_tol").value(1e-7);
    w.end_object();
}

Profile load_or_identity(const Options& o) {
    if (!o.profile_path.empty()) return io::read_profile_csv(o.profile_path);
    return model::identity_profile(o.grid);
}

int cmd_solve(const Options& o) {
    const Radius L(o.radius);
    elsolver::SolveOptions sopts;
    sopts.shoot.grid_size = o.grid;
    const auto sols = elsolver::solve_bvp(L, ChargeSector{o.charge}, o.tol, sopts);
    if (sols.empty()) {
        std::cerr << "solve: no solution converged in sector Q=" << o.charge
                  << " at L=" << o.radius << "\n";
        return 1;
    }
    const auto rule = QuadratureRule::gauss_legendre_composite();
    std::vector<double> energies(sols.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < sols.size(); ++i) {
        energies[i] = model::energy(*sols[i].profile, L, rule).total;
        if (energies[i] < energies[best]) best = i;
    }
    for (std::size_t i = 0; i < sols.size(); ++i)
        std::printf("solution %zu: slope0=%.12g  energy=%.12g  miss=%.3g  residual=%.3g%s\n", i,
                    sols[i].slope0, energies[i], sols[i].boundary_miss, sols[i].residual_norm,
                    i == best ? "  [written]" : "");

    const Profile& p = *sols[best].profile;
    const EnergyBreakdown eb = model::energy(p, L, rule);

    io::JsonWriter meta;
    meta.begin_object();
    write_common_meta(meta, "solve", o);
    meta.key("solutions").begin_array();
    for (std::size_t i = 0; i < sols.size(); ++i) {
        meta.begin_object();
        meta.key("slope0").value(sols[i].slope0);
        meta.key("energy").value(energies[i]);
        meta.key("boundary_miss").value(sols[i].boundary_miss);
        meta.key("residual_norm").value(sols[i].residual_norm);
        meta.key("written").value(i == best);
        meta.end_object();
    }
    meta.end_array();
    meta.key("energy_breakdown").begin_object();
    meta.key("sigma_term").value(eb.sigma_term);
    meta.key("skyrme_term").value(eb.skyrme_term);
    meta.key("total").value(eb.total);
    meta.end_object();

    if (o.format == "csv") {
        io::write_profile_csv(o.output, p);
        meta.end_object();
        io::write_text_file(sidecar_path(o.output), meta.str());
    } else {
        meta.key("data").begin_object();
        meta.key("psi").begin_array();
        for (double v : p.grid()) meta.value(v);
        meta.end_array();
        meta.key("F").begin_array();
        for (double v : p.values()) meta.value(v);
        meta.end_array();
        meta.end_object();
        meta.end_object();
        io::write_text_file(o.output, meta.str());
    }
    std::printf("wrote %s\n", o.output.c_str());
    return 0;
}

int cmd_energy(const Options& o) {
    const Radius L(o.radius);
    const Profile p = load_or_identity(o);
    const auto rule = QuadratureRule::gauss_legendre_composite();
    const EnergyBreakdown eb = model::energy(p, L, rule);
    std::printf("L=%.12g  sigma_term=%.15g  skyrme_term=%.15g  total=%.15g\n", o.radius,
                eb.sigma_term, eb.skyrme_term, eb.total);
    if (o.output.empty()) return 0;

    io::JsonWriter meta;
    meta.begin_object();
    write_common_meta(meta, "energy", o);
    if (o.format == "csv") {
        io::Csv csv;
        csv.header = {"L", "sigma_term", "skyrme_term", "total"};
        csv.rows.push_back({io::format_double(o.radius, 15), io::format_double(eb.sigma_term, 15),
                            io::format_double(eb.skyrme_term, 15),
                            io::format_double(eb.total, 15)});
        io::write_text_file(o.output, io::to_string(csv));
        meta.end_object();
        io::write_text_file(sidecar_path(o.output), meta.str());
    } else {
        meta.key("data").begin_object();
        meta.key("L").value(o.radius);
        meta.key("sigma_term").value(eb.sigma_term);
        meta.key("skyrme_term").value(eb.skyrme_term);
        meta.key("total").value(eb.total);
        meta.end_object();
        meta.end_object();
        io::write_text_file(o.output, meta.str());
    }
    std::printf("wrote %s\n", o.output.c_str());
    return 0;
}

int cmd_spectrum(const Options& o) {
    const Radius L(o.radius);
    const Profile about = o.profile_path.empty()
                              ? model::identity_profile(o.spectrum_grid)
                              : io::read_profile_csv(o.profile_path);
    hessian::SpectrumOptions sopts;
    sopts.method = (o.method == "fd") ? hessian::SpectrumMethod::finite_difference
                                      : hessian::SpectrumMethod::galerkin;
    sopts.fd_nodes = static_cast<int>(o.spectrum_grid);
    const hessian::ModeBasis basis{std::max(2 * o.modes + 8, 40)};
    const auto res = hessian::spectrum(about, L, basis, o.modes, sopts);

    const bool about_identity = (res.about == "identity");
    for (int n = 0; n < o.modes; ++n) {
        if (about_identity)
            std::printf("lambda_%d = %.15g  (closed form %.15g)\n", n, res.eigenvalues[n],
                        hessian::analytic_lambda(n, L));
        else
            std::printf("lambda_%d = %.15g\n", n, res.eigenvalues[n]);
    }
    if (o.output.empty()) return 0;

    io::JsonWriter meta;
    meta.begin_object();
    Options om = o; // record the grid the spectrum command actually used
    om.grid = o.spectrum_grid;
    write_common_meta(meta, "spectrum", om);
    meta.key("basis_size").value(res.basis_size);
    meta.key("about").value(res.about);

    if (o.format == "csv") {
        io::Csv csv;
        csv.header = {"n", "lambda", "analytic_lambda", "abs_error"};
        for (int n = 0; n < o.modes; ++n) {
            std::vector<std::string> row{std::to_string(n),
                                         io::format_double(res.eigenvalues[n], 15), "", ""};
            if (about_identity) {
                const double an = hessian::analytic_lambda(n, L);
                row[2] = io::format_double(an, 15);
                row[3] = io::format_double(std::abs(res.eigenvalues[n] - an), 15);
            }
            csv.rows.push_back(std::move(row));
        }
        io::write_text_file(o.output, io::to_string(csv));
        meta.end_object();
        io::write_text_file(sidecar_path(o.output), meta.str());
    } else {
        meta.key("data").begin_array();
        for (int n = 0; n < o.modes; ++n) {
            meta.begin_object();
            meta.key("n").value(n);
            meta.key("lambda").value(res.eigenvalues[n]);
            if (about_identity) {
                const double an = hessian::analytic_lambda(n, L);
                meta.key("analytic_lambda").value(an);
                meta.key("abs_error").value(std::abs(res.eigenvalues[n] - an));
            }
            meta.end_object();
        }
        meta.end_array();
        meta.end_object();
        io::write_text_file(o.output, meta.str());
    }
    std::printf("wrote %s\n", o.output.c_str());
    return 0;
}

int cmd_critical(const Options& o) {
    const auto res = continuation::critical_radius(o.critical_tol);
    std::printf("critical radius (numeric lambda0 bisection): %.12f\n", res.numeric);
    std::printf("critical radius (closed-form bisection):     %.12f\n", res.closed_form);
    std::printf("analytic value sqrt(2):                      %.12f\n", std::sqrt(2.0));
    if (o.output.empty()) return 0;

    io::JsonWriter meta;
    meta.begin_object();
    Options om = o; // record the tolerance the bisection actually used
    om.tol = o.critical_tol;
    write_common_meta(meta, "critical", om);
    meta.key("numeric_iterations").value(res.numeric_iterations);
    meta.key("closed_form_iterations").value(res.closed_form_iterations);
    if (o.format == "csv") {
        io::Csv csv;
        csv.header = {"numeric", "closed_form", "tol"};
        csv.rows.push_back({io::format_double(res.numeric, 15),
                            io::format_double(res.closed_form, 15),
                            io::format_double(res.tol, 15)});
        io::write_text_file(o.output, io::to_string(csv));
        meta.end_object();
        io::write_text_file(sidecar_path(o.output), meta.str());
    } else {
        meta.key("data").begin_object();
        meta.key("numeric").value(res.numeric);
        meta.key("closed_form").value(res.closed_form);
        meta.key("tol").value(res.tol);
        meta.end_object();
        meta.end_object();
        io::write_text_file(o.output, meta.str());
    }
    std::printf("wrote %s\n", o.output.c_str());
    return 0;
}

void branch_meta(io::JsonWriter& meta, const continuation::BranchTable& table) {
    const auto& md = table.metadata;
    meta.key("sweep").begin_object();
    meta.key("l_min").value(md.l_min);
    meta.key("l_max").value(md.l_max);
    meta.key("steps").value(md.steps);
    meta.key("tol").value(md.tol);
    meta.key("grid_size").value(md.grid_size);
    meta.key("basis_size").value(md.basis_size);
    meta.key("quadrature_nodes").value(md.quadrature_nodes);
    meta.key("slope_min").value(md.slope_min);
    meta.key("slope_max").value(md.slope_max);
    meta.key("mesh_points").value(md.mesh_points);
    meta.key("subdivisions").value(md.subdivisions);
    meta.key("samples").begin_array();
    for (double l : md.samples) meta.value(l);
    meta.end_array();
    meta.key("failures").begin_array();
    for (const auto& f : md.failures) {
        meta.begin_object();
        meta.key("L").value(f.l);
        meta.key("message").value(f.message);
        meta.end_object();
    }
    meta.end_array();
    meta.end_object();
}

int cmd_branch(const Options& o) {
    continuation::SweepConfig cfg;
    cfg.tol = o.tol;
    cfg.solve.shoot.grid_size = o.grid;
    const auto table =
        continuation::sweep(Radius(o.radius_min), Radius(o.radius_max), o.steps, cfg);
    for (const auto& f : table.metadata.failures)
        std::fprintf(stderr, "branch: L=%.12g failed: %s\n", f.l, f.message.c_str());
    if (table.points.empty()) {
        std::cerr << "branch: no sample produced a solution\n";
        return 1;
    }
    std::printf("branch: %zu points over %zu radii (%zu failures)\n", table.points.size(),
                table.metadata.samples.size(), table.metadata.failures.size());

    io::JsonWriter meta;
    meta.begin_object();
    write_common_meta(meta, "branch", o);
    branch_meta(meta, table);

    if (o.format == "csv") {
        io::Csv csv;
        csv.header = {"L", "branch", "slope0", "energy", "lambda0", "x_meas"};
        for (const auto& bp : table.points)
            csv.rows.push_back({io::format_double(bp.l, 15), continuation::branch_name(bp.branch),
                                io::format_double(bp.slope0, 15),
                                io::format_double(bp.energy, 15),
                                io::format_double(bp.lambda0, 15),
                                io::format_double(bp.x_meas, 15)});
        io::write_text_file(o.output, io::to_string(csv));
        meta.end_object();
        io::write_text_file(sidecar_path(o.output), meta.str());
    } else {
        meta.key("data").begin_array();
        for (const auto& bp : table.points) {
            meta.begin_object();
            meta.key("L").value(bp.l);
            meta.key("branch").value(continuation::branch_name(bp.branch));
            meta.key("slope0").value(bp.slope0);
            meta.key("energy").value(bp.energy);
            meta.key("lambda0").value(bp.lambda0);
            meta.key("x_meas").value(bp.x_meas);
            meta.end_object();
        }
        meta.end_array();
        meta.end_object();
        io::write_text_file(o.output, meta.str());
    }
    std::printf("wrote %s\n", o.output.c_str());
    return 0;
}

int cmd_perturb(const Options& o) {
    const auto rel = (o.relation == "literal") ? perturbation::AmplitudeRelation::literal
                                               : perturbation::AmplitudeRelation::adopted;
    const auto rule = QuadratureRule::gauss_legendre_composite();
    elsolver::SolveOptions sopts;
    sopts.shoot.grid_size = o.grid;

    struct Row {
        double x, l_adopted, l_literal, e_series, e_numeric, x_meas;
    };
    std::vector<Row> rows;
    for (int k = 0; k < o.steps; ++k) {
        const double l =
            o.radius_min + (o.radius_max - o.radius_min) *
                               (o.steps == 1 ? 0.0 : double(k) / double(o.steps - 1));
        const Radius L(l);
        const double x = perturbation::amplitude_from_radius(L, rel);
        if (std::abs(x) > perturbation::amplitude_guard)
            std::fprintf(stderr,
                         "perturb: |x| = %.3g exceeds the series validity guard %.2g at L=%.6g\n",
                         std::abs(x), perturbation::amplitude_guard, l);
        Row row{};
        row.x = x;
        row.l_adopted =
            perturbation::radius_from_amplitude(x, perturbation::AmplitudeRelation::adopted)
                .value();
        row.l_literal =
            perturbation::radius_from_amplitude(x, perturbation::AmplitudeRelation::literal)
                .value();
        row.e_series = perturbation::perturbative_energy(x);

        const auto sols = elsolver::solve_bvp(L, ChargeSector{1}, o.tol, sopts);
        if (sols.empty()) throw std::runtime_error("perturb: no solution at L=" + std::to_string(l));
        // Confront the series with the bifurcating branch when it exists
        // (largest measured amplitude), otherwise with the identity.
        std::size_t pick = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < sols.size(); ++i) {
            const double xm = perturbation::measure_amplitude(*sols[i].profile, rule);
            if (xm > best) {
                best = xm;
                pick = i;
            }
        }
        row.e_numeric = model::energy(*sols[pick].profile, L, rule).total;
        row.x_meas = perturbation::measure_amplitude(*sols[pick].profile, rule);
        rows.push_back(row);
    }

    io::JsonWriter meta;
    meta.begin_object();
    write_common_meta(meta, "perturb", o);
    if (o.format == "csv") {
        io::Csv csv;
        csv.header = {"x", "L_adopted", "L_literal", "energy_series", "energy_numeric", "x_meas"};
        for (const auto& r : rows)
            csv.rows.push_back(
                {io::format_double(r.x, 15), io::format_double(r.l_adopted, 15),
                 io::format_double(r.l_literal, 15), io::format_double(r.e_series, 15),
                 io::format_double(r.e_numeric, 15), io::format_double(r.x_meas, 15)});
        io::write_text_file(o.output, io::to_string(csv));
        meta.end_object();
        io::write_text_file(sidecar_path(o.output), meta.str());
    } else {
        meta.key("data").begin_array();
        for (const auto& r : rows) {
            meta.begin_object();
            meta.key("x").value(r.x);
            meta.key("L_adopted").value(r.l_adopted);
            meta.key("L_literal").value(r.l_literal);
            meta.key("energy_series").value(r.e_series);
            meta.key("energy_numeric").value(r.e_numeric);
            meta.key("x_meas").value(r.x_meas);
            meta.end_object();
        }
        meta.end_array();
        meta.end_object();
        io::write_text_file(o.output, meta.str());
    }
    std::printf("wrote %s\n", o.output.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Skyrme field on the three-sphere: shooting solver, Hessian spectra and "
                 "bifurcation diagnostics"};
    app.require_subcommand(1);
    Options o;

    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--output", o.output, "Output file path");
        cmd->add_option("--format", o.format, "Output format")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    CLI::App* solve = app.add_subcommand("solve", "Solve the hedgehog boundary-value problem");
    solve->add_option("--radius", o.radius, "Three-sphere radius L")->required();
    solve->add_option("--charge", o.charge, "Topological charge Q");
    solve->add_option("--grid", o.grid, "Profile grid nodes");
    solve->add_option("--tol", o.tol, "Residual tolerance");
    add_format(solve);

    CLI::App* energy = app.add_subcommand("energy", "Energy breakdown of a configuration");
    energy->add_option("--radius", o.radius, "Three-sphere radius L")->required();
    energy->add_option("--grid", o.grid, "Identity-profile grid nodes");
    energy->add_option("--profile", o.profile_path, "Profile CSV (default: identity map)");
    add_format(energy);

    CLI::App* spectrum = app.add_subcommand("spectrum", "Hessian spectrum about a configuration");
    spectrum->add_option("--radius", o.radius, "Three-sphere radius L")->required();
    spectrum->add_option("--modes", o.modes, "Number of eigenvalues");
    spectrum->add_option("--method", o.method, "Discretization")
        ->check(CLI::IsMember({"galerkin", "fd"}));
    spectrum->add_option("--grid", o.spectrum_grid, "Grid nodes (fd method / identity tabulation)");
    spectrum->add_option("--profile", o.profile_path, "Profile CSV (default: identity map)");
    add_format(spectrum);

    CLI::App* critical = app.add_subcommand("critical", "Locate the critical radius");
    critical->add_option("--tol", o.critical_tol, "Bisection tolerance");
    add_format(critical);

    CLI::App* branch = app.add_subcommand("branch", "Sweep L and tabulate solution branches");
    branch->add_option("--radius-min", o.radius_min, "Lower end of the L sweep")->required();
    branch->add_option("--radius-max", o.radius_max, "Upper end of the L sweep")->required();
    branch->add_option("--steps", o.steps, "Uniform samples across the sweep");
    branch->add_option("--grid", o.grid, "Profile grid nodes");
    branch->add_option("--tol", o.tol, "Residual tolerance");
    add_format(branch);

    CLI::App* perturb =
        app.add_subcommand("perturb", "Perturbative series vs the numerical branch");
    perturb->add_option("--radius-min", o.radius_min, "Lower end of the L sweep")->required();
    perturb->add_option("--radius-max", o.radius_max, "Upper end of the L sweep")->required();
    perturb->add_option("--steps", o.steps, "Samples across the sweep");
    perturb->add_option("--relation", o.relation, "Amplitude-radius relation reading")
        ->check(CLI::IsMember({"adopted", "literal"}));
    perturb->add_option("--grid", o.grid, "Profile grid nodes");
    perturb->add_option("--tol", o.tol, "Residual tolerance");
    add_format(perturb);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (o.output.empty()) {
        if (solve->parsed()) o.output = "solution.csv";
        if (spectrum->parsed()) o.output = "spectrum.csv";
        if (branch->parsed()) o.output = "branch.csv";
        if (perturb->parsed()) o.output = "perturb.csv";
    }

    try {
        if (solve->parsed()) return cmd_solve(o);
        if (energy->parsed()) return cmd_energy(o);
        if (spectrum->parsed()) return cmd_spectrum(o);
        if (critical->parsed()) return cmd_critical(o);
        if (branch->parsed()) return cmd_branch(o);
        if (perturb->parsed()) return cmd_perturb(o);
    } catch (const io::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
