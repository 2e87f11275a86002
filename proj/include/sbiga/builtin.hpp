#pragma once

#include <string>
#include <vector>

#include "sbiga/geometry.hpp"

namespace sbiga::builtin {

/// Closed quadratic boundary of the unit square: nine control points, double
/// corner knots, counterclockwise, uniform speed along each edge.
CurveGeometry square_boundary();

/// Closed quadratic boundary of the unit square with doubled corner control
/// points and single interior knots: the trace keeps its sharp corners while
/// the curve stays C1 in the parameter (vanishing tangent at the corners).
CurveGeometry smooth_square_boundary();

/// Standard nine-point quadratic NURBS unit circle.
CurveGeometry circle_boundary();

/// Identity parametrization of the unit square, quadratic in both directions.
GeometryMap rectangular_square();

/// Scaled-boundary unit square, center (0.5, 0.5), radial degree elevated to
/// two.
GeometryMap center_scaled_square();

/// Scaled-boundary unit square with an off-center scaling point (a config
/// default, not a reference value).
GeometryMap off_center_scaled_square(const Eigen::Vector2d& center = {0.25, 0.25});

/// Scaled-boundary unit square whose middle control ring is placed so only
/// the seam ray has reduced continuity; rays are curved.
GeometryMap internally_smooth_square();

/// Scaled-boundary unit disk over the NURBS circle, center at the origin,
/// radial degree elevated to two.
GeometryMap disk(const Eigen::Vector2d& center = {0.0, 0.0});

/// Synthetic non-star-shaped test geometry: the disk net bent around the
/// origin into a fat C shape (wrap > pi), giving curved rays. Exercises the
/// user-supplied-geometry path.
GeometryMap bent_disk();

/// Map tags accepted by the CLI and test drivers.
std::vector<std::string> map_tags();
GeometryMap map_by_tag(const std::string& tag);

/// Curve tags for the parametrize pipeline.
std::vector<std::string> curve_tags();
CurveGeometry curve_by_tag(const std::string& tag);

}  // namespace sbiga::builtin
