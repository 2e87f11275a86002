#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sbiga/builtin.hpp"
#include "sbiga/errors.hpp"
#include "sbiga/geometry.hpp"
#include "sbiga/geometry_io.hpp"
#include "sbiga/quadrature.hpp"
#include "sbiga/radial.hpp"
#include "sbiga/solver.hpp"
#include "sbiga/splines.hpp"

namespace py = pybind11;
using namespace sbiga;

namespace {

std::vector<Eigen::Vector2d> to_points(const Eigen::MatrixXd& pts) {
    if (pts.cols() != 2) {
        throw DomainError("control points must be an (n, 2) array");
    }
    std::vector<Eigen::Vector2d> out(static_cast<std::size_t>(pts.rows()));
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        out[static_cast<std::size_t>(i)] = pts.row(i).transpose();
    }
    return out;
}

SolveOptions make_options(const std::string& assembly, bool merge_center, int quad_order,
                          int threads) {
    SolveOptions options;
    options.backend =
        assembly == "separated" ? AssemblyBackend::Separated : AssemblyBackend::Standard;
    options.merge_center = merge_center;
    options.quad_order = quad_order;
    options.threads = threads;
    return options;
}

}  // namespace

PYBIND11_MODULE(pysbiga, m) {
    m.doc() = "Scaled-boundary isogeometric analysis: splines, geometry maps, Galerkin "
              "Poisson solves and the semi-analytical radial method";

    py::register_exception<Error>(m, "SbigaError");

    py::class_<KnotVector>(m, "KnotVector")
        .def(py::init<std::vector<double>, int>(), py::arg("knots"), py::arg("degree"))
        .def_property_readonly("degree", &KnotVector::degree)
        .def_property_readonly("num_basis", &KnotVector::num_basis)
        .def_property_readonly("knots", &KnotVector::knots)
        .def("find_span", &KnotVector::find_span)
        .def("greville", &KnotVector::greville)
        .def("breakpoints", &KnotVector::breakpoints);

    py::class_<BasisEval>(m, "BasisEval")
        .def_readonly("span", &BasisEval::span)
        .def_readonly("first_index", &BasisEval::first_index)
        .def_readonly("values", &BasisEval::values)
        .def_readonly("derivatives", &BasisEval::derivatives);

    m.def("eval_basis", &eval_basis, py::arg("kv"), py::arg("t"), py::arg("nderiv") = 0);
    m.def(
        "eval_rational_basis",
        [](const KnotVector& kv, const std::vector<double>& w, double t, int nderiv) {
            return eval_rational_basis(kv, w, t, nderiv);
        },
        py::arg("kv"), py::arg("weights"), py::arg("t"), py::arg("nderiv") = 0);

    py::class_<CurveGeometry>(m, "CurveGeometry")
        .def(py::init([](const KnotVector& kv, const Eigen::MatrixXd& pts,
                         const std::vector<double>& weights, bool closed) {
                 return CurveGeometry(kv, to_points(pts), weights, closed);
             }),
             py::arg("kv"), py::arg("control_points"),
             py::arg("weights") = std::vector<double>{}, py::arg("closed") = false)
        .def_property_readonly("knot_vector", &CurveGeometry::knot_vector)
        .def_property_readonly("control_points",
                               [](const CurveGeometry& c) {
                                   Eigen::MatrixXd pts(c.num_points(), 2);
                                   for (int i = 0; i < c.num_points(); ++i) {
                                       pts.row(i) =
                                           c.control_points()[static_cast<std::size_t>(i)];
                                   }
                                   return pts;
                               })
        .def_property_readonly("weights", &CurveGeometry::weights)
        .def_property_readonly("closed", &CurveGeometry::closed)
        .def("reversed", &CurveGeometry::reversed)
        .def("signed_area", &CurveGeometry::signed_area, py::arg("quad_order") = 8);

    m.def(
        "eval_curve",
        [](const CurveGeometry& curve, double t, int nderiv) {
            const CurveJet jet = eval_curve(curve, t, nderiv);
            return py::make_tuple(jet.point, jet.derivatives);
        },
        py::arg("curve"), py::arg("t"), py::arg("nderiv") = 0);
    m.def("insert_knot", py::overload_cast<const CurveGeometry&, double>(&insert_knot));
    m.def("elevate_degree", py::overload_cast<const CurveGeometry&>(&elevate_degree));

    py::class_<SbStructure>(m, "SbStructure")
        .def_readonly("is_scaled_boundary", &SbStructure::is_scaled_boundary)
        .def_readonly("has_straight_rays", &SbStructure::has_straight_rays);

    py::class_<GeometryMap>(m, "GeometryMap")
        .def_property_readonly("radial_kv", &GeometryMap::radial_kv)
        .def_property_readonly("circ_kv", &GeometryMap::circ_kv)
        .def_property_readonly("num_radial", &GeometryMap::num_radial)
        .def_property_readonly("num_circ", &GeometryMap::num_circ)
        .def_property_readonly("net_x", &GeometryMap::net_x)
        .def_property_readonly("net_y", &GeometryMap::net_y)
        .def_property_readonly("weights", &GeometryMap::weights)
        .def_property_readonly("structure", &GeometryMap::structure)
        .def_property_readonly("scaling_center",
                               [](const GeometryMap& g) { return g.scaling_center(); })
        .def_property_readonly("circ_closed", &GeometryMap::circ_closed)
        .def("boundary_curve", &GeometryMap::boundary_curve)
        .def("eval", [](const GeometryMap& g, double xi, double eta) {
            const auto jet = g.eval(xi, eta);
            return py::make_tuple(jet.point, jet.jacobian);
        });

    m.def("build_sb_map", &build_sb_map, py::arg("boundary"), py::arg("center"));
    m.def("build_wedge", &build_wedge, py::arg("segment"), py::arg("center"));
    m.def(
        "refine_radial",
        [](const GeometryMap& map, const std::vector<double>& knots, int degree) {
            return refine_radial(map, knots, degree);
        },
        py::arg("map"), py::arg("new_knots"), py::arg("target_degree"));
    m.def(
        "refine_circumferential",
        [](const GeometryMap& map, const std::vector<double>& knots, int degree) {
            return refine_circumferential(map, knots, degree);
        },
        py::arg("map"), py::arg("new_knots"), py::arg("target_degree"));
    m.def("refine_uniform", &refine_uniform);
    m.def(
        "set_interior_points",
        [](const GeometryMap& map, const std::vector<std::tuple<int, int, Eigen::Vector2d>>& edits) {
            std::vector<InteriorOverride> overrides;
            overrides.reserve(edits.size());
            for (const auto& [i, j, p] : edits) {
                overrides.push_back({i, j, p});
            }
            return set_interior_points(map, overrides);
        },
        py::arg("map"), py::arg("overrides"));

    py::class_<MetricSample>(m, "MetricSample")
        .def_readonly("point", &MetricSample::point)
        .def_readonly("jacobian", &MetricSample::jacobian)
        .def_readonly("det", &MetricSample::det)
        .def_readonly("metric", &MetricSample::metric)
        .def_property_readonly("has_sb_factors", &MetricSample::has_sb_factors)
        .def_property_readonly("b1", &MetricSample::b1)
        .def_property_readonly("b2", &MetricSample::b2)
        .def_property_readonly("J", &MetricSample::J);
    m.def("metric", &metric, py::arg("map"), py::arg("xi"), py::arg("eta"));

    py::class_<RegularityReport>(m, "RegularityReport")
        .def_readonly("min_J", &RegularityReport::min_J)
        .def_readonly("sign_changes", &RegularityReport::sign_changes)
        .def_readonly("c0_rays", &RegularityReport::c0_rays)
        .def_readonly("injective_sampling_ok", &RegularityReport::injective_sampling_ok);
    m.def("validate_regularity", &validate_regularity, py::arg("map"), py::arg("grid") = 64);
    m.def("center_in_kernel_sampled", &center_in_kernel_sampled, py::arg("boundary"),
          py::arg("center"), py::arg("samples") = 256);

    m.def("gauss_rule", [](int order) {
        const GaussRule rule = gauss_rule(order);
        return py::make_tuple(rule.nodes, rule.weights);
    });
    m.def("singular_element_check", &singular_element_check, py::arg("h"));

    py::module_ builtin_mod = m.def_submodule("builtin", "Built-in reference geometries");
    builtin_mod.def("map_tags", &builtin::map_tags);
    builtin_mod.def("map_by_tag", &builtin::map_by_tag);
    builtin_mod.def("curve_tags", &builtin::curve_tags);
    builtin_mod.def("curve_by_tag", &builtin::curve_by_tag);

    py::class_<ManufacturedProblem>(m, "ManufacturedProblem")
        .def_readonly("tag", &ManufacturedProblem::tag)
        .def("exact", [](const ManufacturedProblem& p, double x, double y) {
            return p.exact(x, y);
        });
    m.def("square_cos_problem", &square_cos_problem);
    m.def("paraboloid_problem", &paraboloid_problem, py::arg("a"));
    m.def("zero_problem", &zero_problem);
    m.def("harmonic_problem", &harmonic_problem);

    py::class_<DiscreteSolution>(m, "DiscreteSolution")
        .def_readonly("coefficients", &DiscreteSolution::coefficients)
        .def_readonly("residual", &DiscreteSolution::residual)
        .def_readonly("unknowns", &DiscreteSolution::unknowns)
        .def("evaluate", &DiscreteSolution::evaluate, py::arg("xi"), py::arg("eta"));

    py::class_<AssemblyStats>(m, "AssemblyStats")
        .def_readonly("stiffness_evals_2d", &AssemblyStats::stiffness_evals_2d)
        .def_readonly("stiffness_evals_1d", &AssemblyStats::stiffness_evals_1d)
        .def_readonly("rhs_evals_2d", &AssemblyStats::rhs_evals_2d);

    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("solution", &SolveResult::solution)
        .def_readonly("stats", &SolveResult::stats)
        .def_readonly("dofs", &SolveResult::dofs);

    m.def(
        "solve_poisson",
        [](const GeometryMap& map, const ManufacturedProblem& problem, const std::string& assembly,
           bool merge_center, int quad_order, int threads) {
            return solve_poisson(map, problem,
                                 make_options(assembly, merge_center, quad_order, threads));
        },
        py::arg("map"), py::arg("problem"), py::arg("assembly") = "standard",
        py::arg("merge_center") = false, py::arg("quad_order") = 0, py::arg("threads") = 1);

    m.def(
        "l2_error",
        [](const DiscreteSolution& sol, const ManufacturedProblem& problem, int quad_order) {
            return l2_error(sol, problem.exact, quad_order);
        },
        py::arg("solution"), py::arg("problem"), py::arg("quad_order") = 0);
    m.def("l2_difference", &l2_difference, py::arg("a"), py::arg("b"), py::arg("quad_order") = 0);

    py::class_<ConvergenceRow>(m, "ConvergenceRow")
        .def_readonly("level", &ConvergenceRow::level)
        .def_readonly("dofs", &ConvergenceRow::dofs)
        .def_readonly("l2", &ConvergenceRow::l2)
        .def_readonly("rate", &ConvergenceRow::rate);

    m.def(
        "convergence_study",
        [](const GeometryMap& map, const ManufacturedProblem& problem, int levels,
           const std::string& assembly, bool merge_center, int quad_order, int threads) {
            StudyOptions options;
            options.levels = levels;
            options.solve = make_options(assembly, merge_center, quad_order, threads);
            return convergence_study(map, problem, options);
        },
        py::arg("map"), py::arg("problem"), py::arg("levels") = 4,
        py::arg("assembly") = "standard", py::arg("merge_center") = false,
        py::arg("quad_order") = 0, py::arg("threads") = 1);

    py::class_<RadialODE>(m, "RadialODE")
        .def_readonly("M", &RadialODE::M)
        .def_readonly("C", &RadialODE::C)
        .def_readonly("K", &RadialODE::K)
        .def_readonly("n", &RadialODE::n);
    m.def("assemble_radial_matrices", &assemble_radial_matrices, py::arg("map"),
          py::arg("quad_order") = 0);
    m.def("build_hamiltonian", &build_hamiltonian);

    py::class_<HamiltonianSpectrum>(m, "HamiltonianSpectrum")
        .def_readonly("exponents", &HamiltonianSpectrum::exponents)
        .def_readonly("stable", &HamiltonianSpectrum::stable)
        .def_readonly("n", &HamiltonianSpectrum::n);
    m.def("eigen_split", &eigen_split, py::arg("H"), py::arg("ode"));

    py::class_<ModalSolution>(m, "ModalSolution")
        .def("evaluate", &ModalSolution::evaluate, py::arg("xi"))
        .def("imag_residual", &ModalSolution::imag_residual, py::arg("xi"))
        .def_property_readonly("exponents", &ModalSolution::exponents);
    m.def("solve_laplace_modal", &solve_laplace_modal, py::arg("spectrum"),
          py::arg("boundary_values"));
    m.def(
        "reduced_boundary_coefficients",
        [](const GeometryMap& map, const std::function<double(double, double)>& g) {
            return reduced_boundary_coefficients(map, g);
        },
        py::arg("map"), py::arg("g"));
    m.def("eval_modal_field", &eval_modal_field, py::arg("map"), py::arg("modal"), py::arg("xi"),
          py::arg("eta"));

    py::module_ io_mod = m.def_submodule("io", "Geometry document reading and writing");
    io_mod.def("read_map", &io::read_map, py::arg("path"));
    io_mod.def("read_curve", &io::read_curve, py::arg("path"));
    io_mod.def("write_map", &io::write_map, py::arg("path"), py::arg("map"), py::arg("kind") = "");
    io_mod.def("write_curve", &io::write_curve, py::arg("path"), py::arg("curve"),
               py::arg("kind") = "");
}
