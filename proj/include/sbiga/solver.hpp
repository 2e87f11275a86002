#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "sbiga/assembly.hpp"
#include "sbiga/geometry.hpp"

namespace sbiga {

/// Exact solution with analytically consistent source and boundary data.
struct ManufacturedProblem {
    std::string tag;
    std::function<double(double, double)> exact;
    std::function<double(double, double)> source;    ///< f = -laplace(u*)
    std::function<double(double, double)> boundary;  ///< g = u* on the boundary
};

ManufacturedProblem square_cos_problem();
ManufacturedProblem paraboloid_problem(double a);
ManufacturedProblem zero_problem();
/// Harmonic polynomial x^2 - y^2 (f = 0); used for the Laplace comparisons.
ManufacturedProblem harmonic_problem();

/// Discrete solution with the full tensor coefficient grid (unknowns and
/// prescribed values back-substituted; periodic copies filled in).
struct DiscreteSolution {
    GeometryMap map;
    DofMap dofmap;
    Eigen::MatrixXd coefficients;  ///< m x n
    double residual = 0.0;         ///< |A q - r| of the solved system
    int unknowns = 0;

    double evaluate(double xi, double eta) const;
};

/// Sparse solve honoring the residual contract |A q - r| <= 1e-10 |r|
/// (Cholesky below 20k unknowns, conjugate gradients above; either may
/// stand in for the other when it fails to meet the contract).
DiscreteSolution solve(const GeometryMap& map, const DofMap& dofmap, const LinearSystem& system);

/// L2 norm of (u_h - exact) over the physical domain, by tensor Gauss
/// quadrature in parametric coordinates (order >= degree + 2 by default).
double l2_error(const DiscreteSolution& sol, const std::function<double(double, double)>& exact,
                int quad_order = 0);

/// L2 norm of the difference of two solutions on the same geometry.
double l2_difference(const DiscreteSolution& a, const DiscreteSolution& b, int quad_order = 0);

enum class AssemblyBackend { Standard, Separated };

struct SolveOptions {
    AssemblyBackend backend = AssemblyBackend::Standard;
    bool merge_center = false;
    int quad_order = 0;  ///< 0: max(p, q) + 1 points per span per direction
    int threads = 1;
};

struct SolveResult {
    DiscreteSolution solution;
    AssemblyStats stats;
    int dofs = 0;
};

/// Assembles and solves the Poisson problem on a map: scaled-boundary maps
/// get periodic identification (closed curves) and Dirichlet data on the
/// xi = 1 edge; plain tensor maps get Dirichlet data on all four sides.
SolveResult solve_poisson(const GeometryMap& map, const ManufacturedProblem& problem,
                          const SolveOptions& options = {});

/// The Dirichlet sides solve_poisson uses for a map.
std::set<Side> physical_boundary_sides(const GeometryMap& map);

struct ConvergenceRow {
    int level = 0;
    int dofs = 0;
    double l2 = 0.0;
    double rate = 0.0;  ///< log2(e_{l-1} / e_l); 0 on the first row
};

struct StudyOptions {
    int levels = 4;
    SolveOptions solve;
};

/// Uniform dyadic h-refinement study: refines geometry and solution space
/// together (knot insertion preserves the geometry exactly) and reports
/// L2 errors and rates per level.
std::vector<ConvergenceRow> convergence_study(const GeometryMap& base,
                                              const ManufacturedProblem& problem,
                                              const StudyOptions& options);

struct FieldSample {
    double x = 0.0;
    double y = 0.0;
    double u_h = 0.0;
    double u_exact = 0.0;
    double abs_error = 0.0;
};

/// Uniform parametric grid pushed through the geometry map, one row per
/// sample point (plot-ready).
std::vector<FieldSample> sample_field(const DiscreteSolution& sol,
                                      const std::function<double(double, double)>& exact,
                                      int grid);

}  // namespace sbiga
