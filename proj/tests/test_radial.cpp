#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "sbiga/builtin.hpp"
#include "sbiga/errors.hpp"
#include "sbiga/radial.hpp"

using namespace sbiga;

namespace {

Eigen::MatrixXd skew_form(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return J;
}

// Independent route to M, C, K: the kernels are rebuilt from bivariate map
// derivatives (J from det DF / xi, gamma' from F_eta / xi) instead of the
// curve formulas, on the same quadrature rule.
RadialODE radial_matrices_from_map_derivatives(const GeometryMap& map, int quad_order) {
    const int n = map.num_circ();
    const Eigen::Vector2d center = *map.scaling_center();
    const QuadratureRule rule(map.circ_kv(), quad_order);
    const CurveGeometry boundary = map.boundary_curve();
    const double xi_probe = 0.625;

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    for (const auto& span : rule.spans()) {
        for (std::size_t g = 0; g < span.nodes.size(); ++g) {
            const double eta = span.nodes[g];
            const double w = span.weights[g];
            const GeometryMap::Jet jet = map.eval(xi_probe, eta);
            const double J = jet.jacobian.determinant() / xi_probe;
            const Eigen::Vector2d tangent = jet.jacobian.col(1) / xi_probe;
            const Eigen::Vector2d secant = map.eval(1.0, eta).point - center;
            const Eigen::Vector2d b1(tangent.y(), -tangent.x());
            const Eigen::Vector2d b2(-secant.y(), secant.x());
            const BasisEval basis =
                map.rational() ? eval_rational_basis(map.circ_kv(), boundary.weights(), eta, 1)
                               : eval_basis(map.circ_kv(), eta, 1);
            for (std::size_t a = 0; a < basis.values.size(); ++a) {
                const int ia = basis.first_index + static_cast<int>(a);
                for (std::size_t b = 0; b < basis.values.size(); ++b) {
                    const int ib = basis.first_index + static_cast<int>(b);
                    M(ia, ib) += w * b1.dot(b1) / J * basis.values[a] * basis.values[b];
                    C(ia, ib) += w * b1.dot(b2) / J * basis.values[a] * basis.derivatives[0][b];
                    K(ia, ib) +=
                        w * b2.dot(b2) / J * basis.derivatives[0][a] * basis.derivatives[0][b];
                }
            }
        }
    }
    const auto fold = [n](Eigen::MatrixXd full) {
        Eigen::MatrixXd reduced = full.topLeftCorner(n - 1, n - 1);
        reduced.row(0) += full.row(n - 1).head(n - 1);
        reduced.col(0) += full.col(n - 1).head(n - 1);
        reduced(0, 0) += full(n - 1, n - 1);
        return reduced;
    };
    return RadialODE{fold(M), fold(C), fold(K), n - 1};
}

std::vector<double> smallest_stable_exponents(const GeometryMap& map, int count) {
    const RadialODE ode = assemble_radial_matrices(map);
    const HamiltonianSpectrum spectrum = eigen_split(build_hamiltonian(ode), ode);
    std::vector<double> exps;
    for (int idx : spectrum.stable) {
        exps.push_back(spectrum.exponents(idx).real());
    }
    std::sort(exps.begin(), exps.end());
    exps.resize(static_cast<std::size_t>(count));
    return exps;
}

}  // namespace

TEST_CASE("radial matrices: structure and independent oracle") {
    for (const char* tag : {"center-scaled", "off-center-scaled", "disk"}) {
        const GeometryMap map = builtin::map_by_tag(tag);
        const RadialODE ode = assemble_radial_matrices(map);
        CHECK(ode.n == map.num_circ() - 1);

        // K annihilates constants, M admits a Cholesky factorization.
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ode.n);
        CHECK((ode.K * ones).cwiseAbs().maxCoeff() <=
              1e-10 * std::max(1.0, ode.K.cwiseAbs().maxCoeff()));
        Eigen::LLT<Eigen::MatrixXd> llt(ode.M);
        CHECK(llt.info() == Eigen::Success);

        const RadialODE oracle = radial_matrices_from_map_derivatives(
            map, std::max(map.radial_kv().degree(), map.circ_kv().degree()) + 1);
        const double scale = ode.K.cwiseAbs().maxCoeff();
        CHECK((ode.M - oracle.M).cwiseAbs().maxCoeff() <= 1e-10 * scale);
        CHECK((ode.C - oracle.C).cwiseAbs().maxCoeff() <= 1e-10 * scale);
        CHECK((ode.K - oracle.K).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    }

    CHECK_THROWS_AS(assemble_radial_matrices(builtin::rectangular_square()), StructureError);
    CHECK_THROWS_AS(assemble_radial_matrices(builtin::internally_smooth_square()),
                    StructureError);
}

TEST_CASE("hamiltonian structure") {
    for (const char* tag : {"center-scaled", "disk"}) {
        const RadialODE ode = assemble_radial_matrices(builtin::map_by_tag(tag));
        const Eigen::MatrixXd H = build_hamiltonian(ode);
        const Eigen::MatrixXd JH = skew_form(ode.n) * H;
        CHECK((JH - JH.transpose()).cwiseAbs().maxCoeff() <=
              1e-10 * JH.cwiseAbs().maxCoeff());

        const HamiltonianSpectrum spectrum = eigen_split(H, ode);
        CHECK(static_cast<int>(spectrum.stable.size()) == ode.n);

        // Negation symmetry of the exponent multiset.
        std::vector<double> re;
        for (int i = 0; i < spectrum.exponents.size(); ++i) {
            re.push_back(spectrum.exponents(i).real());
        }
        std::sort(re.begin(), re.end());
        for (std::size_t i = 0; i < re.size(); ++i) {
            CHECK(std::abs(re[i] + re[re.size() - 1 - i]) <=
                  1e-8 * std::max(1.0, std::abs(re[i])));
        }
    }
}

TEST_CASE("scalar radial problem has closed-form exponents") {
    const double m = 2.0;
    const double c = 0.3;
    const double k = 5.0;
    RadialODE ode;
    ode.M = Eigen::MatrixXd::Constant(1, 1, m);
    ode.C = Eigen::MatrixXd::Constant(1, 1, c);
    ode.K = Eigen::MatrixXd::Constant(1, 1, k);
    ode.n = 1;
    const Eigen::MatrixXd H = build_hamiltonian(ode);

    // Closed form from the 2x2 characteristic polynomial of H.
    const double tr = H.trace();
    const double det = H.determinant();
    const double mu_plus = tr / 2.0 + std::sqrt(tr * tr / 4.0 - det);
    CHECK(tr == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(mu_plus == doctest::Approx(std::sqrt(k / m)).epsilon(1e-12));

    const HamiltonianSpectrum spectrum = eigen_split(H, ode);
    REQUIRE(spectrum.stable.size() == 1);
    CHECK(spectrum.exponents(spectrum.stable[0]).real() ==
          doctest::Approx(std::sqrt(k / m)).epsilon(1e-10));
    CHECK(std::abs(spectrum.exponents(spectrum.stable[0]).imag()) < 1e-10);
}

TEST_CASE("disk exponents approximate the Fourier orders") {
    GeometryMap coarse = builtin::disk();
    GeometryMap fine = refine_circumferential(coarse, std::vector<double>{0.125, 0.375, 0.625, 0.875}, 2);

    const std::vector<double> target = {0.0, 1.0, 1.0, 2.0, 2.0};
    const auto error_of = [&](const GeometryMap& map) {
        const auto exps = smallest_stable_exponents(map, 5);
        double err = 0.0;
        for (std::size_t i = 0; i < target.size(); ++i) {
            err = std::max(err, std::abs(exps[i] - target[i]));
        }
        return err;
    };
    const double coarse_err = error_of(coarse);
    const double fine_err = error_of(fine);
    CHECK(coarse_err < 0.35);
    CHECK(fine_err < coarse_err);
}

TEST_CASE("modal laplace solution") {
    const GeometryMap map = builtin::disk();
    const RadialODE ode = assemble_radial_matrices(map);
    const HamiltonianSpectrum spectrum = eigen_split(build_hamiltonian(ode), ode);

    SUBCASE("constant boundary data propagates as a constant") {
        const Eigen::VectorXd ubc = Eigen::VectorXd::Constant(ode.n, 3.25);
        const ModalSolution modal = solve_laplace_modal(spectrum, ubc);
        for (const double xi : {0.0, 0.1, 0.35, 0.82, 1.0}) {
            const Eigen::VectorXd U = modal.evaluate(xi);
            CHECK((U - ubc).cwiseAbs().maxCoeff() < 1e-9);
            CHECK(modal.imag_residual(xi) < 1e-9);
        }
    }

    SUBCASE("discrete maximum principle spot check") {
        const Eigen::VectorXd ubc = reduced_boundary_coefficients(
            map, [](double x, double y) { return x * x - y * y; });
        const ModalSolution modal = solve_laplace_modal(spectrum, ubc);
        const double bound = ubc.cwiseAbs().maxCoeff() * 1.05;
        for (int k = 1; k <= 20; ++k) {
            const Eigen::VectorXd U = modal.evaluate(k / 20.0);
            CHECK(U.cwiseAbs().maxCoeff() <= bound);
        }
    }
}

TEST_CASE("modal solution matches the 2D Galerkin reference") {
    for (const char* tag : {"disk", "center-scaled"}) {
        GeometryMap map = builtin::map_by_tag(tag);
        map = refine_circumferential(map, std::vector<double>{0.125, 0.375, 0.625, 0.875}, 2);

        const ManufacturedProblem problem = harmonic_problem();
        const Eigen::VectorXd ubc = reduced_boundary_coefficients(map, problem.boundary);
        const RadialODE ode = assemble_radial_matrices(map);
        const HamiltonianSpectrum spectrum = eigen_split(build_hamiltonian(ode), ode);
        const ModalSolution modal = solve_laplace_modal(spectrum, ubc);

        // 2D reference: same circumferential space, fine radial refinement.
        GeometryMap fine = map;
        for (int r = 0; r < 3; ++r) {
            const auto breaks = fine.radial_kv().breakpoints();
            std::vector<double> mids;
            for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
                mids.push_back(0.5 * (breaks[s] + breaks[s + 1]));
            }
            fine = refine_radial(fine, mids, fine.radial_kv().degree());
        }
        const SolveResult res = solve_poisson(fine, problem);
        const double e2d = l2_error(res.solution, problem.exact);
        const double diff = l2_modal_vs_solution(fine, modal, res.solution);
        CHECK(diff <= 2.0 * e2d);
    }
}
