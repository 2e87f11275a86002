#include "sbiga/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <numbers>

#include "sbiga/errors.hpp"

namespace sbiga {

ManufacturedProblem square_cos_problem() {
    const double pi = std::numbers::pi;
    auto u = [pi](double x, double y) {
        return std::cos(pi * (x - 0.5)) * std::cos(pi * (y - 0.5));
    };
    return ManufacturedProblem{
        .tag = "square-cos",
        .exact = u,
        .source = [pi, u](double x, double y) { return 2.0 * pi * pi * u(x, y); },
        .boundary = u,
    };
}

ManufacturedProblem paraboloid_problem(double a) {
    auto u = [a](double x, double y) { return a * a - x * x - y * y; };
    return ManufacturedProblem{
        .tag = "paraboloid",
        .exact = u,
        .source = [](double, double) { return 4.0; },
        .boundary = u,
    };
}

ManufacturedProblem zero_problem() {
    auto zero = [](double, double) { return 0.0; };
    return ManufacturedProblem{.tag = "zero", .exact = zero, .source = zero, .boundary = zero};
}

ManufacturedProblem harmonic_problem() {
    auto u = [](double x, double y) { return x * x - y * y; };
    return ManufacturedProblem{
        .tag = "harmonic",
        .exact = u,
        .source = [](double, double) { return 0.0; },
        .boundary = u,
    };
}

double DiscreteSolution::evaluate(double xi, double eta) const {
    const BasisEval rad = eval_basis(map.radial_kv(), xi, 1);
    const BasisEval circ = eval_basis(map.circ_kv(), eta, 1);
    const LocalShape shape = local_shape(map, rad, circ);
    double value = 0.0;
    for (int a = 0; a < shape.val.rows(); ++a) {
        for (int b = 0; b < shape.val.cols(); ++b) {
            value += shape.val(a, b) * coefficients(shape.rad_first + a, shape.circ_first + b);
        }
    }
    return value;
}

DiscreteSolution solve(const GeometryMap& map, const DofMap& dofmap, const LinearSystem& system) {
    const int K = dofmap.num_unknowns();
    if (system.matrix.rows() != K || system.rhs.size() != K) {
        throw DomainError("linear system size does not match the DofMap");
    }

    Eigen::VectorXd q = Eigen::VectorXd::Zero(K);
    const double rhs_norm = system.rhs.norm();
    const double target = 1e-10 * std::max(rhs_norm, 1e-300);
    double residual = 0.0;

    if (K > 0 && rhs_norm > 0.0) {
        const bool prefer_direct = K <= 20000;
        bool solved = false;
        if (prefer_direct) {
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(system.matrix);
            if (ldlt.info() == Eigen::Success) {
                q = ldlt.solve(system.rhs);
                residual = (system.matrix * q - system.rhs).norm();
                solved = residual <= target;
            }
        }
        if (!solved) {
            Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper>
                cg(system.matrix);
            cg.setTolerance(1e-14);
            cg.setMaxIterations(20L * K + 1000);
            q = cg.solve(system.rhs);
            residual = (system.matrix * q - system.rhs).norm();
            solved = residual <= target;
        }
        if (!solved) {
            throw SolverError("linear solve failed the residual contract: |Aq-r| = " +
                              std::to_string(residual) + ", target " + std::to_string(target));
        }
    }

    DiscreteSolution sol{.map = map,
                         .dofmap = dofmap,
                         .coefficients = Eigen::MatrixXd::Zero(map.num_radial(), map.num_circ()),
                         .residual = residual,
                         .unknowns = K};
    for (int i = 0; i < map.num_radial(); ++i) {
        for (int j = 0; j < map.num_circ(); ++j) {
            const int id = dofmap.id(i, j);
            if (id >= 0) {
                sol.coefficients(i, j) = q(id);
            } else {
                sol.coefficients(i, j) = system.prescribed(dofmap.fixed_slot(i, j));
            }
        }
    }
    return sol;
}

namespace {

int default_error_order(const GeometryMap& map) {
    return std::max(map.radial_kv().degree(), map.circ_kv().degree()) + 2;
}

double l2_of(const GeometryMap& map, int quad_order,
             const std::function<double(double, double, const Eigen::Vector2d&)>& integrand) {
    const QuadratureRule radial(map.radial_kv(), quad_order);
    const QuadratureRule circ(map.circ_kv(), quad_order);
    double acc = 0.0;
    for (const auto& rspan : radial.spans()) {
        for (const auto& cspan : circ.spans()) {
            for (std::size_t gr = 0; gr < rspan.nodes.size(); ++gr) {
                for (std::size_t gc = 0; gc < cspan.nodes.size(); ++gc) {
                    const double xi = rspan.nodes[gr];
                    const double eta = cspan.nodes[gc];
                    const GeometryMap::Jet jet = map.eval(xi, eta);
                    const double diff = integrand(xi, eta, jet.point);
                    acc += diff * diff * std::abs(jet.jacobian.determinant()) *
                           rspan.weights[gr] * cspan.weights[gc];
                }
            }
        }
    }
    return std::sqrt(acc);
}

}  // namespace

double l2_error(const DiscreteSolution& sol, const std::function<double(double, double)>& exact,
                int quad_order) {
    if (quad_order <= 0) {
        quad_order = default_error_order(sol.map);
    }
    return l2_of(sol.map, quad_order, [&](double xi, double eta, const Eigen::Vector2d& x) {
        return sol.evaluate(xi, eta) - exact(x.x(), x.y());
    });
}

double l2_difference(const DiscreteSolution& a, const DiscreteSolution& b, int quad_order) {
    if (quad_order <= 0) {
        quad_order = default_error_order(a.map);
    }
    return l2_of(a.map, quad_order, [&](double xi, double eta, const Eigen::Vector2d&) {
        return a.evaluate(xi, eta) - b.evaluate(xi, eta);
    });
}

std::set<Side> physical_boundary_sides(const GeometryMap& map) {
    if (map.structure().is_scaled_boundary) {
        if (map.circ_closed()) {
            return {Side::XiMax};
        }
        return {Side::XiMax, Side::EtaMin, Side::EtaMax};  // wedge: curve plus the two rays
    }
    return {Side::XiMin, Side::XiMax, Side::EtaMin, Side::EtaMax};
}

SolveResult solve_poisson(const GeometryMap& map, const ManufacturedProblem& problem,
                          const SolveOptions& options) {
    const bool periodic = map.structure().is_scaled_boundary && map.circ_closed();
    const DofMap dofmap =
        build_dofmap(map, periodic, options.merge_center, physical_boundary_sides(map));

    int order = options.quad_order;
    if (order <= 0) {
        order = std::max(map.radial_kv().degree(), map.circ_kv().degree()) + 1;
    }
    const QuadratureRule radial_rule(map.radial_kv(), order);
    const QuadratureRule circ_rule(map.circ_kv(), order);

    const Eigen::VectorXd prescribed = apply_dirichlet(map, dofmap, problem.boundary);
    const SourceField f{problem.source, problem.tag};

    AssemblyStats stats;
    LinearSystem system;
    if (options.backend == AssemblyBackend::Separated) {
        system = assemble_separated(map, dofmap, radial_rule, circ_rule, f, prescribed, &stats);
    } else {
        system = assemble_standard(map, dofmap, radial_rule, circ_rule, f, prescribed, &stats,
                                   options.threads);
    }
    return SolveResult{solve(map, dofmap, system), stats, dofmap.num_unknowns()};
}

std::vector<ConvergenceRow> convergence_study(const GeometryMap& base,
                                              const ManufacturedProblem& problem,
                                              const StudyOptions& options) {
    if (options.levels < 2) {
        throw DomainError("a convergence study needs at least 2 levels");
    }
    std::vector<ConvergenceRow> rows;
    GeometryMap map = base;
    for (int level = 0; level < options.levels; ++level) {
        if (level > 0) {
            map = refine_uniform(map);
        }
        const SolveResult res = solve_poisson(map, problem, options.solve);
        ConvergenceRow row;
        row.level = level;
        row.dofs = res.dofs;
        row.l2 = l2_error(res.solution, problem.exact);
        row.rate = rows.empty() ? 0.0 : std::log2(rows.back().l2 / row.l2);
        rows.push_back(row);
    }
    return rows;
}

std::vector<FieldSample> sample_field(const DiscreteSolution& sol,
                                      const std::function<double(double, double)>& exact,
                                      int grid) {
    if (grid < 2) {
        throw DomainError("sample grid must have at least 2 points per direction");
    }
    std::vector<FieldSample> samples;
    samples.reserve(static_cast<std::size_t>(grid) * grid);
    for (int i = 0; i < grid; ++i) {
        const double xi = static_cast<double>(i) / (grid - 1);
        for (int j = 0; j < grid; ++j) {
            const double eta = static_cast<double>(j) / (grid - 1);
            const Eigen::Vector2d x = sol.map.eval(xi, eta).point;
            FieldSample s;
            s.x = x.x();
            s.y = x.y();
            s.u_h = sol.evaluate(xi, eta);
            s.u_exact = exact(s.x, s.y);
            s.abs_error = std::abs(s.u_h - s.u_exact);
            samples.push_back(s);
        }
    }
    return samples;
}

}  // namespace sbiga
