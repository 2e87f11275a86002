#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "sbiga/geometry.hpp"
#include "sbiga/quadrature.hpp"

namespace sbiga {

/// Parametric sides of the unit square.
enum class Side { XiMin, XiMax, EtaMin, EtaMax };

/// Classification of a tensor-product degree of freedom.
enum class DofClass : std::uint8_t {
    Interior,           ///< unknown with its own id
    BoundaryFixed,      ///< prescribed by Dirichlet data
    PeriodicSecondary,  ///< last circumferential column, identified with the first
    CenterMerged        ///< xi = 0 row collapsed to a single unknown
};

/// Global numbering of the tensor-product DoFs with periodic identification,
/// optional center merge, and Dirichlet elimination.
class DofMap {
public:
    int num_radial() const { return m_; }
    int num_circ() const { return n_; }
    bool periodic() const { return periodic_; }
    bool merge_center() const { return merge_center_; }
    const std::set<Side>& dirichlet_sides() const { return sides_; }

    int num_unknowns() const { return num_unknowns_; }
    int num_fixed() const { return num_fixed_; }

    DofClass cls(int i, int j) const { return classes_[index(i, j)]; }
    /// Unknown id of (i, j), or -1 when the DoF is prescribed.
    int id(int i, int j) const { return ids_[index(i, j)]; }
    /// Slot into the prescribed-value vector, or -1 when the DoF is unknown.
    int fixed_slot(int i, int j) const { return fixed_slots_[index(i, j)]; }

    friend DofMap build_dofmap(const GeometryMap&, bool, bool, const std::set<Side>&);

private:
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

    int m_ = 0;
    int n_ = 0;
    bool periodic_ = false;
    bool merge_center_ = false;
    std::set<Side> sides_;
    std::vector<DofClass> classes_;
    std::vector<int> ids_;
    std::vector<int> fixed_slots_;
    int num_unknowns_ = 0;
    int num_fixed_ = 0;
};

/// Builds the DoF numbering. Periodic identification maps the last
/// circumferential column onto the first (requires a closed boundary);
/// merge_center collapses the remaining xi = 0 DoFs into one unknown.
DofMap build_dofmap(const GeometryMap& map, bool periodic, bool merge_center,
                    const std::set<Side>& dirichlet_sides);

/// Source term in physical coordinates.
struct SourceField {
    std::function<double(double, double)> f;
    std::string tag;
};

/// Assembled stiffness and right-hand side over the unknowns, plus the
/// prescribed values of the eliminated DoFs (for back-substitution).
struct LinearSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
    Eigen::VectorXd prescribed;
};

/// Instrumentation counters. 2D counts are integrand evaluations at tensor
/// quadrature nodes; 1D counts are evaluations of univariate kernels.
struct AssemblyStats {
    long stiffness_evals_2d = 0;
    long stiffness_evals_1d = 0;
    long rhs_evals_2d = 0;
};

/// Greville interpolation of g restricted to one parametric edge of the map:
/// solves the edge collocation system for the control coefficients of
/// g composed with the edge curve.
Eigen::VectorXd interpolate_edge_coefficients(const GeometryMap& map, Side side,
                                              const std::function<double(double, double)>& g);

/// Parametric counterpart: interpolates h(t) given directly in the edge
/// parameter instead of physical coordinates.
Eigen::VectorXd interpolate_edge_parametric(const GeometryMap& map, Side side,
                                            const std::function<double(double)>& h);

/// Fills the prescribed-value vector of a DofMap from boundary data g by
/// Greville interpolation on every Dirichlet side.
Eigen::VectorXd apply_dirichlet(const GeometryMap& map, const DofMap& dofmap,
                                const std::function<double(double, double)>& g);

/// Galerkin assembly of the transformed Poisson weak form by tensor-product
/// Gauss quadrature of the full 2D integrand.
LinearSystem assemble_standard(const GeometryMap& map, const DofMap& dofmap,
                               const QuadratureRule& radial_rule, const QuadratureRule& circ_rule,
                               const SourceField& f, const Eigen::VectorXd& prescribed,
                               AssemblyStats* stats = nullptr, int threads = 1);

/// Separated assembly: every stiffness entry is a sum of four products of
/// cached 1D radial and circumferential integrals, exploiting the
/// multiplicative Jacobian of straight-ray scaled-boundary maps. The
/// right-hand side still uses 2D quadrature (the source pullback does not
/// separate).
LinearSystem assemble_separated(const GeometryMap& map, const DofMap& dofmap,
                                const QuadratureRule& radial_rule, const QuadratureRule& circ_rule,
                                const SourceField& f, const Eigen::VectorXd& prescribed,
                                AssemblyStats* stats = nullptr);

}  // namespace sbiga
