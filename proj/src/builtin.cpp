#include "sbiga/builtin.hpp"

#include <cmath>

#include "sbiga/errors.hpp"

namespace sbiga::builtin {

namespace {

KnotVector quarter_kv() {
    return KnotVector({0, 0, 0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75, 1, 1, 1}, 2);
}

}  // namespace

CurveGeometry square_boundary() {
    std::vector<Eigen::Vector2d> pts = {{0, 0},   {0.5, 0}, {1, 0},   {1, 0.5}, {1, 1},
                                        {0.5, 1}, {0, 1},   {0, 0.5}, {0, 0}};
    return CurveGeometry(quarter_kv(), std::move(pts), {}, true);
}

CurveGeometry smooth_square_boundary() {
    KnotVector kv({0, 0, 0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1, 1, 1}, 2);
    std::vector<Eigen::Vector2d> pts = {{0, 0}, {0, 0}, {1, 0}, {1, 0}, {1, 1},
                                        {1, 1}, {0, 1}, {0, 1}, {0, 0}, {0, 0}};
    return CurveGeometry(std::move(kv), std::move(pts), {}, true);
}

CurveGeometry circle_boundary() {
    const double s = std::sqrt(0.5);
    std::vector<Eigen::Vector2d> pts = {{1, 0},   {1, 1},   {0, 1},  {-1, 1}, {-1, 0},
                                        {-1, -1}, {0, -1},  {1, -1}, {1, 0}};
    std::vector<double> weights = {1, s, 1, s, 1, s, 1, s, 1};
    return CurveGeometry(quarter_kv(), std::move(pts), std::move(weights), true);
}

GeometryMap rectangular_square() {
    const KnotVector kv({0, 0, 0, 1, 1, 1}, 2);
    const std::vector<double> greville = kv.greville();
    const int n = kv.num_basis();
    Eigen::MatrixXd nx(n, n);
    Eigen::MatrixXd ny(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            nx(i, j) = greville[static_cast<std::size_t>(i)];
            ny(i, j) = greville[static_cast<std::size_t>(j)];
        }
    }
    return GeometryMap(kv, kv, std::move(nx), std::move(ny));
}

GeometryMap center_scaled_square() {
    return refine_radial(build_sb_map(square_boundary(), {0.5, 0.5}), {}, 2);
}

GeometryMap off_center_scaled_square(const Eigen::Vector2d& center) {
    return refine_radial(build_sb_map(square_boundary(), center), {}, 2);
}

GeometryMap internally_smooth_square() {
    const CurveGeometry boundary = smooth_square_boundary();
    const Eigen::Vector2d center(0.5, 0.5);
    const int n = boundary.num_points();

    // The middle ring places every control point so that only the seam ray
    // keeps reduced continuity; the rays away from the seam are curved.
    const std::vector<Eigen::Vector2d> middle = {
        {0.25, 0.25},  {0.375, 0.125}, {0.625, 0.125}, {0.875, 0.375}, {0.875, 0.625},
        {0.625, 0.875}, {0.375, 0.875}, {0.125, 0.625}, {0.125, 0.375}, {0.25, 0.25}};

    Eigen::MatrixXd nx(3, n);
    Eigen::MatrixXd ny(3, n);
    for (int j = 0; j < n; ++j) {
        nx(0, j) = center.x();
        ny(0, j) = center.y();
        nx(1, j) = middle[static_cast<std::size_t>(j)].x();
        ny(1, j) = middle[static_cast<std::size_t>(j)].y();
        nx(2, j) = boundary.control_points()[static_cast<std::size_t>(j)].x();
        ny(2, j) = boundary.control_points()[static_cast<std::size_t>(j)].y();
    }
    return GeometryMap(KnotVector({0, 0, 0, 1, 1, 1}, 2), boundary.knot_vector(), std::move(nx),
                       std::move(ny), {}, center, SbStructure{.is_scaled_boundary = true});
}

GeometryMap disk(const Eigen::Vector2d& center) {
    return refine_radial(build_sb_map(circle_boundary(), center), {}, 2);
}

GeometryMap bent_disk() {
    GeometryMap base =
        refine_radial(build_sb_map(circle_boundary(), {0.0, 0.0}), std::vector<double>{0.5}, 2);
    base = refine_uniform(refine_uniform(base));
    // Bend the control net around the origin: (x, y) -> ((2+y) sin(ax),
    // (2+y) cos(ax)). The wrap exceeds pi, so no point sees the whole
    // boundary and the domain is not star-shaped. The net is pre-refined so
    // the bent control polygon tracks the curved rays without folding.
    const double alpha = 2.4;
    const int m = base.num_radial();
    const int n = base.num_circ();
    Eigen::MatrixXd nx(m, n);
    Eigen::MatrixXd ny(m, n);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            const double x = base.net_x()(i, j);
            const double y = base.net_y()(i, j);
            nx(i, j) = (2.0 + y) * std::sin(alpha * x);
            ny(i, j) = (2.0 + y) * std::cos(alpha * x);
        }
    }
    const Eigen::Vector2d center(0.0, 2.0);
    for (int j = 0; j < n; ++j) {
        nx(0, j) = center.x();
        ny(0, j) = center.y();
    }
    return GeometryMap(base.radial_kv(), base.circ_kv(), std::move(nx), std::move(ny),
                       base.weights(), center, SbStructure{.is_scaled_boundary = true});
}

std::vector<std::string> map_tags() {
    return {"rectangular", "center-scaled", "off-center-scaled", "internally-smooth", "disk",
            "bent-disk"};
}

GeometryMap map_by_tag(const std::string& tag) {
    if (tag == "rectangular") {
        return rectangular_square();
    }
    if (tag == "center-scaled") {
        return center_scaled_square();
    }
    if (tag == "off-center-scaled") {
        return off_center_scaled_square();
    }
    if (tag == "internally-smooth") {
        return internally_smooth_square();
    }
    if (tag == "disk") {
        return disk();
    }
    if (tag == "bent-disk") {
        return bent_disk();
    }
    throw DomainError("unknown geometry tag '" + tag + "'");
}

std::vector<std::string> curve_tags() { return {"square", "square-smooth", "circle"}; }

CurveGeometry curve_by_tag(const std::string& tag) {
    if (tag == "square") {
        return square_boundary();
    }
    if (tag == "square-smooth") {
        return smooth_square_boundary();
    }
    if (tag == "circle") {
        return circle_boundary();
    }
    throw DomainError("unknown curve tag '" + tag + "'");
}

}  // namespace sbiga::builtin
