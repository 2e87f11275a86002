#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "sbiga/geometry.hpp"
#include "sbiga/solver.hpp"

namespace sbiga {

/// Coefficient matrices of the radial boundary value problem
/// xi^2 M U'' + xi (M - C + C^T) U' - K U = 0 obtained by circumferential
/// Galerkin projection, with periodic identification applied (n is the
/// reduced circumferential DoF count).
struct RadialODE {
    Eigen::MatrixXd M;
    Eigen::MatrixXd C;
    Eigen::MatrixXd K;
    int n = 0;
};

/// Assembles M, C, K by 1D circumferential quadrature of the scaled-boundary
/// kernels. Requires a straight-ray map over a closed boundary curve.
RadialODE assemble_radial_matrices(const GeometryMap& map, int quad_order = 0);

/// Inhomogeneous term S(xi) = -int N J f(F(xi, eta)) d eta of the radial
/// BVP, reduced periodically (assembled for completeness; the modal solver
/// handles the homogeneous case only).
Eigen::VectorXd radial_source(const GeometryMap& map, const RadialODE& ode,
                              const std::function<double(double, double)>& f, double xi,
                              int quad_order = 0);

/// First-order form: 2n x 2n Hamiltonian matrix
/// H = [[M^-1 C^T, -M^-1], [-K + C M^-1 C^T, -C M^-1]].
Eigen::MatrixXd build_hamiltonian(const RadialODE& ode);

/// Eigen-structure of H. Solution exponents are the negated eigenvalues of
/// H (modes behave like xi^lambda); the stable subspace collects the modes
/// finite at the scaling center: Re(lambda) > 0 plus exactly one zero mode
/// whose U-block is the constant vector.
struct HamiltonianSpectrum {
    Eigen::VectorXcd exponents;     ///< all 2n solution exponents
    Eigen::MatrixXcd eigenvectors;  ///< columns [U; W], matching exponents
    std::vector<int> stable;        ///< indices of the stable modes, size n
    int n = 0;
};

/// Decomposes H and partitions the spectrum. Throws DefectError when the
/// (-lambda, lambda) pairing fails beyond tolerance or the stable count is
/// off (a Jordan defect beyond the handled zero pair).
HamiltonianSpectrum eigen_split(const Eigen::MatrixXd& H, const RadialODE& ode);

/// Semi-analytical radial solution U(xi) = sum c_i xi^lambda_i phi_i for the
/// homogeneous (Laplace) problem, with coefficients matched to the boundary
/// values U(1).
class ModalSolution {
public:
    ModalSolution(Eigen::VectorXcd coefficients, Eigen::VectorXcd exponents,
                  Eigen::MatrixXcd u_blocks);

    /// Real part of U(xi); finite for xi -> 0 by construction.
    Eigen::VectorXd evaluate(double xi) const;
    /// Largest imaginary component of U(xi) (should be rounding noise; a
    /// value above 1e-8 deserves a warning).
    double imag_residual(double xi) const;

    const Eigen::VectorXcd& exponents() const { return exponents_; }

private:
    Eigen::VectorXcd evaluate_complex(double xi) const;

    Eigen::VectorXcd coefficients_;
    Eigen::VectorXcd exponents_;
    Eigen::MatrixXcd u_blocks_;
};

/// Matches the stable modes to the boundary coefficient vector (size n,
/// periodically reduced). Throws ConditioningError if the mode-matching
/// system has condition number above 1e12.
ModalSolution solve_laplace_modal(const HamiltonianSpectrum& spectrum,
                                  const Eigen::VectorXd& boundary_values);

/// Periodically reduced boundary coefficients of g on the xi = 1 edge
/// (Greville interpolation, last coefficient folded onto the first).
Eigen::VectorXd reduced_boundary_coefficients(const GeometryMap& map,
                                              const std::function<double(double, double)>& g);

/// Semi-discrete field N(eta)^T U(xi) of a modal solution on the map.
double eval_modal_field(const GeometryMap& map, const ModalSolution& modal, double xi, double eta);

/// L2 norm of (modal field - 2D discrete solution) over the domain.
double l2_modal_vs_solution(const GeometryMap& map, const ModalSolution& modal,
                            const DiscreteSolution& sol, int quad_order = 0);

}  // namespace sbiga
