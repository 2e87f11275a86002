#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

namespace sbiga {

/// Open (clamped) knot vector on the normalized parameter domain [0, 1].
///
/// Construction rescales arbitrary knot ranges to [0, 1] and validates:
/// non-decreasing knots, end multiplicities exactly degree + 1, interior
/// multiplicities at most degree + 1, and at least degree + 1 basis
/// functions.
class KnotVector {
public:
    KnotVector(std::vector<double> knots, int degree);

    int degree() const { return degree_; }
    /// Number of basis functions, n = #knots - degree - 1.
    int num_basis() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
    int num_knots() const { return static_cast<int>(knots_.size()); }
    const std::vector<double>& knots() const { return knots_; }
    double operator[](int i) const { return knots_[static_cast<std::size_t>(i)]; }

    /// Index i with knots[i] <= t < knots[i+1]; at t = 1 the last non-empty
    /// span. Throws DomainError for t outside [0, 1].
    int find_span(double t) const;

    /// Multiplicity of t as a knot (0 if t is not a knot).
    int multiplicity(double t) const;

    /// Distinct knot values (span breakpoints), ascending.
    std::vector<double> breakpoints() const;

    /// Greville abscissae, one per basis function.
    std::vector<double> greville() const;

    /// Knot vector with the midpoint of every non-empty span inserted once.
    KnotVector midpoint_refined() const;

    bool operator==(const KnotVector&) const = default;

private:
    std::vector<double> knots_;
    int degree_;
};

/// Values and derivatives of the degree + 1 basis functions that are
/// nonzero at a query parameter. Function j of the full basis corresponds
/// to local index j - first_index.
struct BasisEval {
    int span = 0;
    int first_index = 0;
    std::vector<double> values;                      ///< size degree + 1
    std::vector<std::vector<double>> derivatives;    ///< [order-1], orders 1..nderiv
};

/// Cox-de Boor evaluation of basis values and derivatives. Fractions with
/// zero denominators are treated as zero. Throws DomainError for t outside
/// [0, 1] and DomainError for nderiv > degree (a degenerate request; the
/// recursion does not produce those orders).
BasisEval eval_basis(const KnotVector& kv, double t, int nderiv = 0);

/// Rational basis R_j = N_j w_j / sum_k N_k w_k with derivatives by the
/// quotient rule. Derivative orders above 2 are not supported.
BasisEval eval_rational_basis(const KnotVector& kv, std::span<const double> weights, double t,
                              int nderiv = 0);

/// Point and derivatives of a parametric curve.
struct CurveJet {
    Eigen::Vector2d point = Eigen::Vector2d::Zero();
    std::vector<Eigen::Vector2d> derivatives;  ///< orders 1..nderiv
};

/// A planar B-spline or NURBS curve. Closed curves use an open knot vector
/// with coincident end control points (and end weights, when rational).
class CurveGeometry {
public:
    CurveGeometry(KnotVector kv, std::vector<Eigen::Vector2d> control_points,
                  std::vector<double> weights = {}, bool closed = false);

    const KnotVector& knot_vector() const { return kv_; }
    const std::vector<Eigen::Vector2d>& control_points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    bool rational() const { return !weights_.empty(); }
    bool closed() const { return closed_; }
    int num_points() const { return static_cast<int>(points_.size()); }

    /// Curve with reversed orientation (same trace, parameter t -> 1 - t).
    CurveGeometry reversed() const;

    /// Signed area enclosed by the curve, by Gauss quadrature of the
    /// shoelace integrand. Positive for counterclockwise orientation.
    double signed_area(int quad_order = 8) const;

private:
    KnotVector kv_;
    std::vector<Eigen::Vector2d> points_;
    std::vector<double> weights_;
    bool closed_;
};

CurveJet eval_curve(const CurveGeometry& curve, double t, int nderiv = 0);

/// Result of a refinement step on a univariate control sequence. Control
/// values are laid out one row per basis function; the column count is
/// caller-defined (coordinates, homogeneous coordinates, whole rings of a
/// tensor net, ...).
struct RefinedBasis {
    KnotVector kv;
    Eigen::MatrixXd control;
};

/// Boehm single-knot insertion. Geometry-preserving; the basis count grows
/// by one. Throws RefinementError if the resulting multiplicity would
/// exceed the degree.
RefinedBasis insert_knot(const KnotVector& kv, const Eigen::MatrixXd& control, double t);

/// Degree elevation by one, geometry-preserving (every distinct knot gains
/// one multiplicity).
RefinedBasis elevate_degree(const KnotVector& kv, const Eigen::MatrixXd& control);

/// Curve-level wrappers; rational curves are processed in homogeneous
/// coordinates.
CurveGeometry insert_knot(const CurveGeometry& curve, double t);
CurveGeometry elevate_degree(const CurveGeometry& curve);

}  // namespace sbiga
