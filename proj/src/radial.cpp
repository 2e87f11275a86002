#include "sbiga/radial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "sbiga/errors.hpp"
#include "sbiga/quadrature.hpp"

namespace sbiga {

namespace {

constexpr double kPairTol = 1e-8;

void require_closed_straight_rays(const GeometryMap& map) {
    if (!map.structure().has_straight_rays) {
        throw StructureError("radial projection requires a straight-ray scaled-boundary map");
    }
    if (!map.circ_closed()) {
        throw StructureError("radial projection requires a closed boundary curve");
    }
}

// Folds the periodic identification (last circumferential index onto the
// first) into a dense matrix.
Eigen::MatrixXd fold_periodic(const Eigen::MatrixXd& full) {
    const int n = static_cast<int>(full.rows());
    Eigen::MatrixXd reduced = full.topLeftCorner(n - 1, n - 1);
    reduced.row(0) += full.row(n - 1).head(n - 1);
    reduced.col(0) += full.col(n - 1).head(n - 1);
    reduced(0, 0) += full(n - 1, n - 1);
    return reduced;
}

BasisEval circ_basis(const GeometryMap& map, const CurveGeometry& boundary, double eta) {
    return map.rational() ? eval_rational_basis(map.circ_kv(), boundary.weights(), eta, 1)
                          : eval_basis(map.circ_kv(), eta, 1);
}

int default_order(const GeometryMap& map) {
    return std::max(map.radial_kv().degree(), map.circ_kv().degree()) + 1;
}

}  // namespace

RadialODE assemble_radial_matrices(const GeometryMap& map, int quad_order) {
    require_closed_straight_rays(map);
    if (quad_order <= 0) {
        quad_order = default_order(map);
    }
    const int n = map.num_circ();
    const CurveGeometry boundary = map.boundary_curve();
    const QuadratureRule rule(map.circ_kv(), quad_order);

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    for (const auto& span : rule.spans()) {
        for (std::size_t g = 0; g < span.nodes.size(); ++g) {
            const double eta = span.nodes[g];
            const double w = span.weights[g];
            const SbKernel kernel = sb_kernel(map, eta);
            if (!(kernel.J > 0.0)) {
                throw RegularityError("non-positive J(eta) at a quadrature node");
            }
            const double k11 = kernel.b1.dot(kernel.b1) / kernel.J;
            const double k12 = kernel.b1.dot(kernel.b2) / kernel.J;
            const double k22 = kernel.b2.dot(kernel.b2) / kernel.J;
            const BasisEval basis = circ_basis(map, boundary, eta);
            const int q = static_cast<int>(basis.values.size()) - 1;
            for (int a = 0; a <= q; ++a) {
                const int ia = basis.first_index + a;
                for (int b = 0; b <= q; ++b) {
                    const int ib = basis.first_index + b;
                    const double va = basis.values[static_cast<std::size_t>(a)];
                    const double vb = basis.values[static_cast<std::size_t>(b)];
                    const double da = basis.derivatives[0][static_cast<std::size_t>(a)];
                    const double db = basis.derivatives[0][static_cast<std::size_t>(b)];
                    M(ia, ib) += w * k11 * va * vb;
                    C(ia, ib) += w * k12 * va * db;
                    K(ia, ib) += w * k22 * da * db;
                }
            }
        }
    }

    RadialODE ode;
    ode.M = fold_periodic(M);
    ode.C = fold_periodic(C);
    ode.K = fold_periodic(K);
    ode.n = n - 1;
    return ode;
}

Eigen::VectorXd radial_source(const GeometryMap& map, const RadialODE& ode,
                              const std::function<double(double, double)>& f, double xi,
                              int quad_order) {
    require_closed_straight_rays(map);
    if (quad_order <= 0) {
        quad_order = default_order(map);
    }
    const int n = map.num_circ();
    const CurveGeometry boundary = map.boundary_curve();
    const QuadratureRule rule(map.circ_kv(), quad_order);
    Eigen::VectorXd S = Eigen::VectorXd::Zero(n);
    for (const auto& span : rule.spans()) {
        for (std::size_t g = 0; g < span.nodes.size(); ++g) {
            const double eta = span.nodes[g];
            const double w = span.weights[g];
            const SbKernel kernel = sb_kernel(map, eta);
            const Eigen::Vector2d x = map.eval(xi, eta).point;
            const double fval = f(x.x(), x.y());
            const BasisEval basis = circ_basis(map, boundary, eta);
            for (std::size_t a = 0; a < basis.values.size(); ++a) {
                S(basis.first_index + static_cast<int>(a)) -=
                    w * kernel.J * fval * basis.values[a];
            }
        }
    }
    Eigen::VectorXd reduced = S.head(n - 1);
    reduced(0) += S(n - 1);
    if (reduced.size() != ode.n) {
        throw DomainError("radial source size mismatch");
    }
    return reduced;
}

Eigen::MatrixXd build_hamiltonian(const RadialODE& ode) {
    const int n = ode.n;
    Eigen::LLT<Eigen::MatrixXd> llt(ode.M);
    if (llt.info() != Eigen::Success) {
        throw StructureError("mass matrix of the radial ODE is not positive definite");
    }
    const Eigen::MatrixXd Minv_Ct = llt.solve(ode.C.transpose());
    const Eigen::MatrixXd Minv = llt.solve(Eigen::MatrixXd::Identity(n, n));

    Eigen::MatrixXd H(2 * n, 2 * n);
    H.topLeftCorner(n, n) = Minv_Ct;
    H.topRightCorner(n, n) = -Minv;
    H.bottomLeftCorner(n, n) = -ode.K + ode.C * Minv_Ct;
    H.bottomRightCorner(n, n) = -(ode.C * Minv);
    return H;
}

HamiltonianSpectrum eigen_split(const Eigen::MatrixXd& H, const RadialODE& ode) {
    const int n = ode.n;
    if (H.rows() != 2 * n || H.cols() != 2 * n) {
        throw DomainError("Hamiltonian size does not match the radial ODE");
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) {
        throw DefectError("eigen decomposition of the Hamiltonian failed");
    }

    HamiltonianSpectrum spectrum;
    spectrum.n = n;
    // Modes behave like xi^lambda with lambda = -eigenvalue of H.
    spectrum.exponents = -es.eigenvalues();
    spectrum.eigenvectors = es.eigenvectors();

    const double scale = std::max(1.0, spectrum.exponents.cwiseAbs().maxCoeff());
    const double zero_tol = kPairTol * scale;

    std::vector<int> zero_modes;
    std::vector<int> positive;
    std::vector<int> negative;
    for (int i = 0; i < 2 * n; ++i) {
        const std::complex<double> lambda = spectrum.exponents(i);
        if (std::abs(lambda) <= zero_tol) {
            zero_modes.push_back(i);
        } else if (lambda.real() > 0.0) {
            positive.push_back(i);
        } else {
            negative.push_back(i);
        }
    }

    // Negation-symmetry check: every decisively positive exponent must have
    // a partner near its negation.
    if (positive.size() != negative.size()) {
        throw DefectError("spectrum is not symmetric under negation");
    }
    std::vector<bool> used(negative.size(), false);
    for (int ip : positive) {
        const std::complex<double> lambda = spectrum.exponents(ip);
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_k = 0;
        for (std::size_t k = 0; k < negative.size(); ++k) {
            if (used[k]) {
                continue;
            }
            const double dist = std::abs(spectrum.exponents(negative[k]) + lambda);
            if (dist < best) {
                best = dist;
                best_k = k;
            }
        }
        const double tol = kPairTol * std::max(1.0, std::abs(lambda));
        if (!(best <= tol)) {
            throw DefectError("unpaired eigenvalue in the Hamiltonian spectrum");
        }
        used[best_k] = true;
    }

    spectrum.stable = positive;
    if (!zero_modes.empty()) {
        if (zero_modes.size() != 2) {
            throw DefectError("unexpected zero-exponent multiplicity " +
                              std::to_string(zero_modes.size()));
        }
        // The genuine zero mode has a constant U-block (K annihilates
        // constants); the second zero exponent belongs to the logarithmic
        // companion and stays out of the stable set. Overwrite one reported
        // zero column with the analytic mode.
        const int idx = zero_modes.front();
        Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
        Eigen::VectorXcd y(2 * n);
        y.head(n) = u.cast<std::complex<double>>();
        y.tail(n) = (ode.C.transpose() * u).cast<std::complex<double>>();
        spectrum.eigenvectors.col(idx) = y;
        spectrum.exponents(idx) = 0.0;
        spectrum.stable.push_back(idx);
    }

    if (static_cast<int>(spectrum.stable.size()) != n) {
        throw DefectError("stable subspace dimension " + std::to_string(spectrum.stable.size()) +
                          " does not match the circumferential DoF count " + std::to_string(n));
    }
    std::sort(spectrum.stable.begin(), spectrum.stable.end(), [&](int a, int b) {
        return spectrum.exponents(a).real() < spectrum.exponents(b).real();
    });
    return spectrum;
}

ModalSolution::ModalSolution(Eigen::VectorXcd coefficients, Eigen::VectorXcd exponents,
                             Eigen::MatrixXcd u_blocks)
    : coefficients_(std::move(coefficients)), exponents_(std::move(exponents)),
      u_blocks_(std::move(u_blocks)) {}

Eigen::VectorXcd ModalSolution::evaluate_complex(double xi) const {
    if (!(xi >= 0.0 && xi <= 1.0)) {
        throw DomainError("radial parameter outside [0, 1]");
    }
    Eigen::VectorXcd U = Eigen::VectorXcd::Zero(u_blocks_.rows());
    for (int k = 0; k < exponents_.size(); ++k) {
        std::complex<double> factor;
        if (xi == 0.0) {
            factor = (std::abs(exponents_(k)) == 0.0) ? 1.0 : 0.0;
        } else {
            factor = std::pow(std::complex<double>(xi, 0.0), exponents_(k));
        }
        U += coefficients_(k) * factor * u_blocks_.col(k);
    }
    return U;
}

Eigen::VectorXd ModalSolution::evaluate(double xi) const {
    return evaluate_complex(xi).real();
}

double ModalSolution::imag_residual(double xi) const {
    return evaluate_complex(xi).imag().cwiseAbs().maxCoeff();
}

ModalSolution solve_laplace_modal(const HamiltonianSpectrum& spectrum,
                                  const Eigen::VectorXd& boundary_values) {
    const int n = spectrum.n;
    if (boundary_values.size() != n) {
        throw DomainError("boundary coefficient vector does not match the reduced DoF count");
    }
    Eigen::MatrixXcd B(n, n);
    Eigen::VectorXcd exponents(n);
    for (int k = 0; k < n; ++k) {
        const int idx = spectrum.stable[static_cast<std::size_t>(k)];
        B.col(k) = spectrum.eigenvectors.col(idx).head(n);
        exponents(k) = spectrum.exponents(idx);
    }

    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 0.0) || smax / smin > 1e12) {
        throw ConditioningError("mode-matching system condition exceeds 1e12");
    }

    const Eigen::VectorXcd c = B.partialPivLu().solve(boundary_values.cast<std::complex<double>>());
    return ModalSolution(c, exponents, B);
}

Eigen::VectorXd reduced_boundary_coefficients(const GeometryMap& map,
                                              const std::function<double(double, double)>& g) {
    require_closed_straight_rays(map);
    const Eigen::VectorXd full = interpolate_edge_coefficients(map, Side::XiMax, g);
    // The collocation is interpolatory at both ends of the closed curve, so
    // the folded coefficient equals the dropped one.
    return full.head(full.size() - 1);
}

double eval_modal_field(const GeometryMap& map, const ModalSolution& modal, double xi,
                        double eta) {
    const CurveGeometry boundary = map.boundary_curve();
    const BasisEval basis = circ_basis(map, boundary, eta);
    const Eigen::VectorXd U = modal.evaluate(xi);
    const int n_red = static_cast<int>(U.size());
    double value = 0.0;
    for (std::size_t a = 0; a < basis.values.size(); ++a) {
        int j = basis.first_index + static_cast<int>(a);
        if (j == n_red) {
            j = 0;  // periodic copy
        }
        value += basis.values[a] * U(j);
    }
    return value;
}

double l2_modal_vs_solution(const GeometryMap& map, const ModalSolution& modal,
                            const DiscreteSolution& sol, int quad_order) {
    if (quad_order <= 0) {
        quad_order = std::max(map.radial_kv().degree(), map.circ_kv().degree()) + 2;
    }
    const QuadratureRule radial(map.radial_kv(), quad_order);
    const QuadratureRule circ(map.circ_kv(), quad_order);
    const CurveGeometry boundary = map.boundary_curve();
    double acc = 0.0;
    for (const auto& rspan : radial.spans()) {
        for (const auto& cspan : circ.spans()) {
            for (std::size_t gr = 0; gr < rspan.nodes.size(); ++gr) {
                const Eigen::VectorXd U = modal.evaluate(rspan.nodes[gr]);
                for (std::size_t gc = 0; gc < cspan.nodes.size(); ++gc) {
                    const double xi = rspan.nodes[gr];
                    const double eta = cspan.nodes[gc];
                    const BasisEval basis = circ_basis(map, boundary, eta);
                    double modal_value = 0.0;
                    for (std::size_t a = 0; a < basis.values.size(); ++a) {
                        int j = basis.first_index + static_cast<int>(a);
                        if (j == U.size()) {
                            j = 0;
                        }
                        modal_value += basis.values[a] * U(j);
                    }
                    const double diff = modal_value - sol.evaluate(xi, eta);
                    const double det = std::abs(map.eval(xi, eta).jacobian.determinant());
                    acc += diff * diff * det * rspan.weights[gr] * cspan.weights[gc];
                }
            }
        }
    }
    return std::sqrt(acc);
}

}  // namespace sbiga
