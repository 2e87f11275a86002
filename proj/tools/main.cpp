#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "sbiga/builtin.hpp"
#include "sbiga/errors.hpp"
#include "sbiga/geometry.hpp"
#include "sbiga/geometry_io.hpp"
#include "sbiga/radial.hpp"
#include "sbiga/solver.hpp"

namespace {

// Exit codes: 0 success, 1 usage or generic failure, 2 schema error,
// 3 regularity failure, 4 solver failure.
constexpr int kExitOk = 0;
constexpr int kExitGeneric = 1;
constexpr int kExitSchema = 2;
constexpr int kExitRegularity = 3;
constexpr int kExitSolver = 4;

std::string fmt(double value) {
    char buf[64];
    const auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    (void)ec;
    return std::string(buf, ptr);
}

sbiga::GeometryMap load_map(const std::string& spec) {
    const auto tags = sbiga::builtin::map_tags();
    if (std::find(tags.begin(), tags.end(), spec) != tags.end()) {
        return sbiga::builtin::map_by_tag(spec);
    }
    if (sbiga::io::peek_type(spec) != sbiga::io::DocumentType::Map) {
        throw sbiga::SchemaError("'" + spec + "' is a curve document; run parametrize first", 0);
    }
    return sbiga::io::read_map(spec);
}

sbiga::CurveGeometry load_curve(const std::string& spec) {
    const auto tags = sbiga::builtin::curve_tags();
    if (std::find(tags.begin(), tags.end(), spec) != tags.end()) {
        return sbiga::builtin::curve_by_tag(spec);
    }
    if (sbiga::io::peek_type(spec) != sbiga::io::DocumentType::Curve) {
        throw sbiga::SchemaError("'" + spec + "' is not a curve document", 0);
    }
    return sbiga::io::read_curve(spec);
}

sbiga::ManufacturedProblem problem_by_tag(const std::string& tag, double a) {
    if (tag == "square-cos") {
        return sbiga::square_cos_problem();
    }
    if (tag == "paraboloid" || tag == "paraboloid-a") {
        return sbiga::paraboloid_problem(a);
    }
    if (tag == "zero") {
        return sbiga::zero_problem();
    }
    if (tag == "harmonic") {
        return sbiga::harmonic_problem();
    }
    throw sbiga::DomainError("unknown problem tag '" + tag + "'");
}

sbiga::GeometryMap prepare(sbiga::GeometryMap map, int degree, int refine) {
    if (degree > 0) {
        if (degree < map.radial_kv().degree() || degree < map.circ_kv().degree()) {
            throw sbiga::DomainError("--degree cannot lower the degree of the geometry");
        }
        map = sbiga::refine_radial(map, {}, degree);
        map = sbiga::refine_circumferential(map, {}, degree);
    }
    for (int r = 0; r < refine; ++r) {
        map = sbiga::refine_uniform(map);
    }
    return map;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw sbiga::Error("cannot write '" + path + "'");
    }
    return out;
}

int cmd_parametrize(const std::string& boundary_spec, double cx, double cy, int radial_degree,
                    const std::vector<double>& radial_knots, int refine,
                    const std::string& output) {
    sbiga::CurveGeometry boundary = load_curve(boundary_spec);
    if (!boundary.closed()) {
        throw sbiga::StructureError("parametrize expects a closed boundary curve");
    }
    if (boundary.signed_area() < 0.0) {
        std::cout << "note: boundary was clockwise, orientation flipped\n";
        boundary = boundary.reversed();
    }
    sbiga::GeometryMap map = sbiga::build_sb_map(boundary, {cx, cy});
    map = sbiga::refine_radial(map, radial_knots,
                               std::max(radial_degree, map.radial_kv().degree()));
    for (int r = 0; r < refine; ++r) {
        map = sbiga::refine_uniform(map);
    }

    const sbiga::RegularityReport report = sbiga::validate_regularity(map);
    if (!output.empty()) {
        sbiga::io::write_map(output, map);
    }
    std::cout << "net " << map.num_radial() << " x " << map.num_circ() << "\n";
    std::cout << "min_J " << fmt(report.min_J) << "\n";
    std::cout << "sign_changes " << report.sign_changes << "\n";
    std::cout << "c0_rays";
    for (double r : report.c0_rays) {
        std::cout << " " << fmt(r);
    }
    std::cout << "\n";
    std::cout << "injective_sampling_ok " << (report.injective_sampling_ok ? "true" : "false")
              << "\n";
    return report.injective_sampling_ok ? kExitOk : kExitRegularity;
}

int cmd_solve(const std::string& geometry, const std::string& problem_tag, double a, int degree,
              int refine, int quad_order, const std::string& assembly, bool merge_center,
              int threads, int grid, const std::string& output) {
    const sbiga::GeometryMap map = prepare(load_map(geometry), degree, refine);
    const sbiga::ManufacturedProblem problem = problem_by_tag(problem_tag, a);

    sbiga::SolveOptions options;
    options.backend = (assembly == "separated") ? sbiga::AssemblyBackend::Separated
                                                : sbiga::AssemblyBackend::Standard;
    options.merge_center = merge_center;
    options.quad_order = quad_order;
    options.threads = threads;

    const sbiga::SolveResult result = sbiga::solve_poisson(map, problem, options);
    const double error = sbiga::l2_error(result.solution, problem.exact);

    if (!output.empty()) {
        auto out = open_output(output);
        out << "x,y,u_h,u_exact,abs_error\n";
        for (const auto& s : sbiga::sample_field(result.solution, problem.exact, grid)) {
            out << fmt(s.x) << "," << fmt(s.y) << "," << fmt(s.u_h) << "," << fmt(s.u_exact)
                << "," << fmt(s.abs_error) << "\n";
        }
    }
    std::cout << "dofs " << result.dofs << " l2_error " << fmt(error) << " residual "
              << fmt(result.solution.residual) << "\n";
    return kExitOk;
}

int cmd_convergence(const std::string& geometry, const std::string& problem_tag, double a,
                    int levels, int degree, int refine, int quad_order,
                    const std::string& assembly, bool merge_center, int threads,
                    const std::string& output) {
    const sbiga::GeometryMap map = prepare(load_map(geometry), degree, refine);
    const sbiga::ManufacturedProblem problem = problem_by_tag(problem_tag, a);

    sbiga::StudyOptions options;
    options.levels = levels;
    options.solve.backend = (assembly == "separated") ? sbiga::AssemblyBackend::Separated
                                                      : sbiga::AssemblyBackend::Standard;
    options.solve.merge_center = merge_center;
    options.solve.quad_order = quad_order;
    options.solve.threads = threads;

    const auto rows = sbiga::convergence_study(map, problem, options);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!output.empty()) {
        file = open_output(output);
        out = &file;
    }
    (*out) << "level,dofs,l2_error,rate\n";
    for (const auto& row : rows) {
        (*out) << row.level << "," << row.dofs << "," << fmt(row.l2) << "," << fmt(row.rate)
               << "\n";
    }
    if (!output.empty()) {
        std::cout << "wrote " << rows.size() << " levels to " << output << "\n";
    }
    return kExitOk;
}

int cmd_radial(const std::string& geometry, const std::string& data, double value, int mode,
               int degree, int refine, int radial_reference_refines, int grid,
               const std::string& output) {
    const sbiga::GeometryMap map = prepare(load_map(geometry), degree, refine);
    if (!map.structure().has_straight_rays || !map.circ_closed()) {
        throw sbiga::StructureError(
            "the radial pipeline needs a closed straight-ray scaled-boundary map");
    }

    const sbiga::RadialODE ode = sbiga::assemble_radial_matrices(map);
    const Eigen::MatrixXd H = sbiga::build_hamiltonian(ode);
    const sbiga::HamiltonianSpectrum spectrum = sbiga::eigen_split(H, ode);

    // Boundary coefficients for the requested data.
    Eigen::VectorXd coeffs;
    std::function<double(double, double)> physical;
    if (data == "constant") {
        physical = [value](double, double) { return value; };
        coeffs = sbiga::interpolate_edge_coefficients(map, sbiga::Side::XiMax, physical);
    } else if (data == "cosine") {
        const double k = 2.0 * std::numbers::pi * mode;
        coeffs = sbiga::interpolate_edge_parametric(
            map, sbiga::Side::XiMax, [k](double t) { return std::cos(k * t); });
    } else if (data == "harmonic") {
        physical = [](double x, double y) { return x * x - y * y; };
        coeffs = sbiga::interpolate_edge_coefficients(map, sbiga::Side::XiMax, physical);
    } else {
        throw sbiga::DomainError("unknown boundary data '" + data + "'");
    }
    const Eigen::VectorXd reduced = coeffs.head(coeffs.size() - 1);
    const sbiga::ModalSolution modal = sbiga::solve_laplace_modal(spectrum, reduced);

    // 2D Galerkin reference on the same circumferential space with extra
    // radial refinement.
    sbiga::GeometryMap fine = map;
    for (int r = 0; r < radial_reference_refines; ++r) {
        const auto breaks = fine.radial_kv().breakpoints();
        std::vector<double> mids;
        for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
            mids.push_back(0.5 * (breaks[s] + breaks[s + 1]));
        }
        fine = sbiga::refine_radial(fine, mids, fine.radial_kv().degree());
    }
    const sbiga::DofMap dofmap = sbiga::build_dofmap(fine, true, false, {sbiga::Side::XiMax});
    Eigen::VectorXd prescribed = Eigen::VectorXd::Zero(dofmap.num_fixed());
    for (int j = 0; j < fine.num_circ(); ++j) {
        const int slot = dofmap.fixed_slot(fine.num_radial() - 1, j);
        if (slot >= 0) {
            prescribed(slot) = coeffs(std::min<int>(j, coeffs.size() - 1));
        }
    }
    const int order = std::max(fine.radial_kv().degree(), fine.circ_kv().degree()) + 1;
    const sbiga::QuadratureRule rrule(fine.radial_kv(), order);
    const sbiga::QuadratureRule crule(fine.circ_kv(), order);
    const sbiga::SourceField f0{[](double, double) { return 0.0; }, "zero"};
    const sbiga::LinearSystem system =
        sbiga::assemble_standard(fine, dofmap, rrule, crule, f0, prescribed);
    const sbiga::DiscreteSolution sol = sbiga::solve(fine, dofmap, system);
    const double diff = sbiga::l2_modal_vs_solution(fine, modal, sol);

    auto spec_out = open_output(output + "_spectrum.csv");
    spec_out << "re_lambda,im_lambda,stable\n";
    std::vector<int> order_idx(static_cast<std::size_t>(spectrum.exponents.size()));
    for (std::size_t i = 0; i < order_idx.size(); ++i) {
        order_idx[i] = static_cast<int>(i);
    }
    std::sort(order_idx.begin(), order_idx.end(), [&](int lhs, int rhs) {
        return spectrum.exponents(lhs).real() < spectrum.exponents(rhs).real();
    });
    for (int idx : order_idx) {
        const bool stable = std::find(spectrum.stable.begin(), spectrum.stable.end(), idx) !=
                            spectrum.stable.end();
        spec_out << fmt(spectrum.exponents(idx).real()) << ","
                 << fmt(spectrum.exponents(idx).imag()) << "," << (stable ? 1 : 0) << "\n";
    }

    auto field_out = open_output(output + "_radial.csv");
    field_out << "xi,eta,x,y,u_modal\n";
    double max_imag = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double xi = static_cast<double>(i) / (grid - 1);
        max_imag = std::max(max_imag, modal.imag_residual(xi));
        for (int j = 0; j < grid; ++j) {
            const double eta = static_cast<double>(j) / (grid - 1);
            const Eigen::Vector2d x = map.eval(xi, eta).point;
            field_out << fmt(xi) << "," << fmt(eta) << "," << fmt(x.x()) << "," << fmt(x.y())
                      << "," << fmt(sbiga::eval_modal_field(map, modal, xi, eta)) << "\n";
        }
    }

    std::cout << "modes " << spectrum.n << " l2_modal_vs_2d " << fmt(diff);
    if (physical) {
        std::cout << " l2_error_2d " << fmt(sbiga::l2_error(sol, physical));
    }
    std::cout << " residual_2d " << fmt(sol.residual) << "\n";
    if (max_imag > 1e-8) {
        std::cout << "warning: imaginary residual " << fmt(max_imag)
                  << " in the modal solution\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scaled-boundary isogeometric Poisson toolkit"};
    app.require_subcommand(1);

    // parametrize
    auto* par = app.add_subcommand("parametrize",
                                   "Build a scaled-boundary map from a boundary curve");
    std::string par_boundary;
    std::vector<double> par_center{0.5, 0.5};
    int par_radial_degree = 2;
    std::vector<double> par_knots;
    int par_refine = 0;
    std::string par_output;
    par->add_option("--boundary", par_boundary, "curve document or tag (square, square-smooth, circle)")
        ->required();
    par->add_option("--center", par_center, "scaling center x y")->expected(2);
    par->add_option("--radial-degree", par_radial_degree, "target radial degree");
    par->add_option("--radial-knots", par_knots, "radial knots to insert");
    par->add_option("--refine", par_refine, "uniform dyadic refinements");
    par->add_option("--output", par_output, "map document to write");

    // solve
    auto* sol = app.add_subcommand("solve", "Solve the Poisson problem on a geometry");
    std::string sol_geometry;
    std::string sol_problem = "square-cos";
    double sol_a = 1.0;
    int sol_degree = 0;
    int sol_refine = 0;
    int sol_quad = 0;
    std::string sol_assembly = "standard";
    bool sol_merge = false;
    int sol_threads = 1;
    int sol_grid = 33;
    std::string sol_output;
    sol->add_option("--geometry", sol_geometry, "map document or built-in tag")->required();
    sol->add_option("--problem", sol_problem, "square-cos | paraboloid | zero | harmonic");
    sol->add_option("--a", sol_a, "paraboloid parameter a");
    sol->add_option("--degree", sol_degree, "elevate both directions to this degree");
    sol->add_option("--refine", sol_refine, "uniform dyadic refinements");
    sol->add_option("--quad-order", sol_quad, "Gauss points per span per direction");
    sol->add_option("--assembly", sol_assembly, "standard | separated")
        ->check(CLI::IsMember({"standard", "separated"}));
    sol->add_flag("--merge-center", sol_merge, "merge the scaling-center DoFs");
    sol->add_option("--threads", sol_threads, "assembly threads");
    sol->add_option("--grid", sol_grid, "field sample grid");
    sol->add_option("--output", sol_output, "field CSV path");

    // convergence
    auto* conv = app.add_subcommand("convergence", "Dyadic refinement study");
    std::string conv_geometry;
    std::string conv_problem = "square-cos";
    double conv_a = 1.0;
    int conv_levels = 4;
    int conv_degree = 0;
    int conv_refine = 0;
    int conv_quad = 0;
    std::string conv_assembly = "standard";
    bool conv_merge = false;
    int conv_threads = 1;
    std::string conv_output;
    conv->add_option("--geometry", conv_geometry, "map document or built-in tag")->required();
    conv->add_option("--problem", conv_problem, "square-cos | paraboloid | zero | harmonic");
    conv->add_option("--a", conv_a, "paraboloid parameter a");
    conv->add_option("--levels", conv_levels, "number of refinement levels")
        ->check(CLI::Range(2, 12));
    conv->add_option("--degree", conv_degree, "elevate both directions to this degree");
    conv->add_option("--refine", conv_refine, "pre-refinements before level 0");
    conv->add_option("--quad-order", conv_quad, "Gauss points per span per direction");
    conv->add_option("--assembly", conv_assembly, "standard | separated")
        ->check(CLI::IsMember({"standard", "separated"}));
    conv->add_flag("--merge-center", conv_merge, "merge the scaling-center DoFs");
    conv->add_option("--threads", conv_threads, "assembly threads");
    conv->add_option("--output", conv_output, "CSV path (stdout when omitted)");

    // radial
    auto* rad = app.add_subcommand("radial",
                                   "Semi-analytical radial solve and 2D comparison");
    std::string rad_geometry;
    std::string rad_data = "harmonic";
    double rad_value = 1.0;
    int rad_mode = 1;
    int rad_degree = 0;
    int rad_refine = 0;
    int rad_reference = 3;
    int rad_grid = 17;
    std::string rad_output = "radial";
    rad->add_option("--geometry", rad_geometry, "closed scaled-boundary map or tag")->required();
    rad->add_option("--data", rad_data, "constant | cosine | harmonic");
    rad->add_option("--value", rad_value, "constant boundary value");
    rad->add_option("--mode", rad_mode, "cosine mode number");
    rad->add_option("--degree", rad_degree, "elevate both directions to this degree");
    rad->add_option("--refine", rad_refine, "uniform dyadic refinements");
    rad->add_option("--reference-refines", rad_reference,
                    "extra radial refinements of the 2D reference");
    rad->add_option("--grid", rad_grid, "modal field sample grid");
    rad->add_option("--output", rad_output, "output file prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitGeneric;
    }

    try {
        if (par->parsed()) {
            return cmd_parametrize(par_boundary, par_center.at(0), par_center.at(1),
                                   par_radial_degree, par_knots, par_refine, par_output);
        }
        if (sol->parsed()) {
            return cmd_solve(sol_geometry, sol_problem, sol_a, sol_degree, sol_refine, sol_quad,
                             sol_assembly, sol_merge, sol_threads, sol_grid, sol_output);
        }
        if (conv->parsed()) {
            return cmd_convergence(conv_geometry, conv_problem, conv_a, conv_levels, conv_degree,
                                   conv_refine, conv_quad, conv_assembly, conv_merge, conv_threads,
                                   conv_output);
        }
        if (rad->parsed()) {
            return cmd_radial(rad_geometry, rad_data, rad_value, rad_mode, rad_degree, rad_refine,
                              rad_reference, rad_grid, rad_output);
        }
    } catch (const sbiga::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const sbiga::RegularityError& e) {
        std::cerr << "regularity error: " << e.what() << "\n";
        return kExitRegularity;
    } catch (const sbiga::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitGeneric;
    }
    return kExitGeneric;
}
