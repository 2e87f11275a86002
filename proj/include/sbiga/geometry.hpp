#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "sbiga/splines.hpp"

namespace sbiga {

/// Structural flags of a geometry map.
struct SbStructure {
    bool is_scaled_boundary = false;  ///< xi = 0 row collapses to the scaling center
    bool has_straight_rays = false;   ///< interior control points lie on center-boundary rays
};

/// Tensor-product (possibly rational) map F: [0,1]^2 -> Omega. The first
/// parametric direction (xi) is radial, the second (eta) circumferential.
/// For scaled-boundary maps xi = 0 is the scaling center and xi = 1 the
/// boundary curve.
class GeometryMap {
public:
    GeometryMap(KnotVector radial_kv, KnotVector circ_kv, Eigen::MatrixXd net_x,
                Eigen::MatrixXd net_y, Eigen::MatrixXd weights = {},
                std::optional<Eigen::Vector2d> scaling_center = std::nullopt,
                SbStructure structure = {});

    const KnotVector& radial_kv() const { return radial_kv_; }
    const KnotVector& circ_kv() const { return circ_kv_; }
    int num_radial() const { return static_cast<int>(net_x_.rows()); }
    int num_circ() const { return static_cast<int>(net_x_.cols()); }
    const Eigen::MatrixXd& net_x() const { return net_x_; }
    const Eigen::MatrixXd& net_y() const { return net_y_; }
    const Eigen::MatrixXd& weights() const { return weights_; }
    bool rational() const { return weights_.size() > 0; }
    const SbStructure& structure() const { return structure_; }
    const std::optional<Eigen::Vector2d>& scaling_center() const { return scaling_center_; }
    Eigen::Vector2d control_point(int i, int j) const { return {net_x_(i, j), net_y_(i, j)}; }

    /// True if the first and last circumferential control columns coincide.
    bool circ_closed() const { return circ_closed_; }

    /// The xi = 1 boundary row as a curve (circumferential weights attached
    /// when the map is rational).
    CurveGeometry boundary_curve() const;

    /// Point and first derivatives, rational-aware.
    struct Jet {
        Eigen::Vector2d point;
        Eigen::Matrix2d jacobian;  ///< columns: d/dxi, d/deta
    };
    Jet eval(double xi, double eta) const;

private:
    KnotVector radial_kv_;
    KnotVector circ_kv_;
    Eigen::MatrixXd net_x_;
    Eigen::MatrixXd net_y_;
    Eigen::MatrixXd weights_;
    std::optional<Eigen::Vector2d> scaling_center_;
    SbStructure structure_;
    bool circ_closed_ = false;
};

/// Jacobian and metric data at a parametric point. The closed-form scaled
/// boundary factors b1, b2, J are available only on maps with straight
/// rays; accessing them elsewhere is a structure error.
class MetricSample {
public:
    Eigen::Vector2d point = Eigen::Vector2d::Zero();
    Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();
    double det = 0.0;
    Eigen::Matrix2d metric = Eigen::Matrix2d::Zero();  ///< g = DF^T DF

    bool has_sb_factors() const { return has_sb_; }
    const Eigen::Vector2d& b1() const;
    const Eigen::Vector2d& b2() const;
    double J() const;

    void set_sb_factors(const Eigen::Vector2d& b1, const Eigen::Vector2d& b2, double J);

private:
    bool has_sb_ = false;
    Eigen::Vector2d b1_ = Eigen::Vector2d::Zero();
    Eigen::Vector2d b2_ = Eigen::Vector2d::Zero();
    double J_ = 0.0;
};

/// Regularity diagnostics from sampling; see validate_regularity.
struct RegularityReport {
    double min_J = 0.0;
    int sign_changes = 0;
    std::vector<double> c0_rays;  ///< eta values of reduced-continuity rays
    bool injective_sampling_ok = false;
};

/// Values and first parametric derivatives of the (possibly rational)
/// bivariate shape functions that are nonzero at a point, indexed locally;
/// tensor index of entry (a, b) is (rad_first + a, circ_first + b). The
/// univariate evaluations must carry at least one derivative.
struct LocalShape {
    int rad_first = 0;
    int circ_first = 0;
    Eigen::MatrixXd val;
    Eigen::MatrixXd dxi;
    Eigen::MatrixXd deta;
};
LocalShape local_shape(const GeometryMap& map, const BasisEval& rad, const BasisEval& circ);

/// Point and Jacobian of the map from an evaluated local shape.
GeometryMap::Jet jet_from_shape(const GeometryMap& map, const LocalShape& shape);

/// Circumferential scaled-boundary kernel at a parameter eta:
/// b1 = rotated tangent, b2 = rotated secant to the center, J = cross
/// product of secant and tangent (the eta factor of det DF).
struct SbKernel {
    Eigen::Vector2d b1;
    Eigen::Vector2d b2;
    double J;
};
SbKernel sb_kernel(const GeometryMap& map, double eta);

/// Two-ring scaled-boundary map from a closed boundary curve and a scaling
/// center: linear radial direction, collapsed center row, boundary row
/// reproducing the curve exactly.
GeometryMap build_sb_map(const CurveGeometry& boundary, const Eigen::Vector2d& center);

/// Same construction for an open curve segment; the two straight edges of
/// the wedge are the rays to the segment endpoints.
GeometryMap build_wedge(const CurveGeometry& segment, const Eigen::Vector2d& center);

/// Radial knot insertion and degree elevation; geometry-preserving,
/// straight rays and the collapsed center row survive.
GeometryMap refine_radial(const GeometryMap& map, std::span<const double> new_knots,
                          int target_degree);

/// Circumferential knot insertion and degree elevation; geometry-preserving.
GeometryMap refine_circumferential(const GeometryMap& map, std::span<const double> new_knots,
                                   int target_degree);

/// Midpoint knot insertion in both directions (one dyadic refinement step).
GeometryMap refine_uniform(const GeometryMap& map);

/// Replacement for one interior control point.
struct InteriorOverride {
    int i = 0;  ///< radial index, 0 < i < m-1
    int j = 0;  ///< circumferential index
    Eigen::Vector2d point = Eigen::Vector2d::Zero();
};

/// Curved-ray edit: moves interior control points, clears the straight-ray
/// flag, and refuses to touch the center or boundary rows.
GeometryMap set_interior_points(const GeometryMap& map, std::span<const InteriorOverride> edits);

/// Full metric data at a parametric point, by basis derivatives; closed-form
/// b1/b2/J attached on straight-ray maps.
MetricSample metric(const GeometryMap& map, double xi, double eta);

/// Samples the Jacobian factor on an interior grid (J(eta) for straight-ray
/// maps, det DF / xi otherwise), reports the minimum, sign changes, and the
/// C0 rays implied by circumferential knot multiplicities.
RegularityReport validate_regularity(const GeometryMap& map, int grid = 64);

/// Sampling-based kernel membership test: true if the center sees every
/// sampled boundary point, i.e. cross(gamma - center, gamma') > 0 at all
/// sample parameters.
bool center_in_kernel_sampled(const CurveGeometry& boundary, const Eigen::Vector2d& center,
                              int samples = 256);

/// Detects the scaled-boundary flags of a raw control net (within 1e-12):
/// collapsed first row, interior points on the center-boundary rays, and
/// column-constant weights.
SbStructure detect_structure(const Eigen::MatrixXd& net_x, const Eigen::MatrixXd& net_y,
                             const Eigen::MatrixXd& weights,
                             const std::optional<Eigen::Vector2d>& center);

}  // namespace sbiga
