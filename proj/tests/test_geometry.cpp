#include <cmath>
#include <random>

#include "doctest.h"
#include "sbiga/builtin.hpp"
#include "sbiga/errors.hpp"
#include "sbiga/geometry.hpp"

using namespace sbiga;

namespace {

CurveGeometry quarter_circle_arc() {
    KnotVector kv({0, 0, 0, 1, 1, 1}, 2);
    std::vector<Eigen::Vector2d> pts = {{1, 0}, {1, 1}, {0, 1}};
    std::vector<double> w = {1.0, std::sqrt(0.5), 1.0};
    return CurveGeometry(kv, pts, w, false);
}

CurveGeometry second_quarter_arc() {
    KnotVector kv({0, 0, 0, 1, 1, 1}, 2);
    std::vector<Eigen::Vector2d> pts = {{0, 1}, {-1, 1}, {-1, 0}};
    std::vector<double> w = {1.0, std::sqrt(0.5), 1.0};
    return CurveGeometry(kv, pts, w, false);
}

}  // namespace

TEST_CASE("scaled-boundary construction") {
    const CurveGeometry boundary = builtin::square_boundary();
    const GeometryMap map = build_sb_map(boundary, {0.5, 0.5});
    CHECK(map.num_radial() == 2);
    CHECK(map.num_circ() == 9);
    CHECK(map.structure().is_scaled_boundary);
    CHECK(map.structure().has_straight_rays);
    CHECK(map.circ_closed());

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> par(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double eta = par(rng);
        // Boundary edge reproduces the curve; the xi = 0 edge collapses.
        const Eigen::Vector2d on_boundary = map.eval(1.0, eta).point;
        const Eigen::Vector2d on_curve = eval_curve(boundary, eta).point;
        CHECK((on_boundary - on_curve).norm() < 1e-14);
        const Eigen::Vector2d at_center = map.eval(0.0, eta).point;
        CHECK(std::abs(at_center.x() - 0.5) < 1e-14);
        CHECK(std::abs(at_center.y() - 0.5) < 1e-14);
    }

    CHECK_THROWS_AS(build_sb_map(quarter_circle_arc(), {0, 0}), StructureError);
}

TEST_CASE("radial elevation reproduces the midpoint ring") {
    const GeometryMap map = builtin::center_scaled_square();
    REQUIRE(map.num_radial() == 3);
    // Middle ring is the exact average of center and boundary control points.
    CHECK(map.net_x()(1, 0) == 0.25);
    CHECK(map.net_y()(1, 0) == 0.25);
    CHECK(map.net_x()(1, 1) == 0.5);
    CHECK(map.net_y()(1, 1) == 0.25);
    CHECK(map.structure().has_straight_rays);
    for (int j = 0; j < map.num_circ(); ++j) {
        CHECK(map.net_x()(0, j) == 0.5);
        CHECK(map.net_y()(0, j) == 0.5);
    }
}

TEST_CASE("refinement preserves the map pointwise") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> par(0.0, 1.0);
    for (const char* tag : {"center-scaled", "disk", "internally-smooth"}) {
        const GeometryMap base = builtin::map_by_tag(tag);
        GeometryMap refined = refine_radial(base, std::vector<double>{0.3, 0.7}, 3);
        refined = refine_circumferential(refined, std::vector<double>{0.1}, 3);
        refined = refine_uniform(refined);
        CHECK(refined.structure().is_scaled_boundary == base.structure().is_scaled_boundary);
        CHECK(refined.structure().has_straight_rays == base.structure().has_straight_rays);
        for (int trial = 0; trial < 100; ++trial) {
            const double xi = par(rng);
            const double eta = par(rng);
            const Eigen::Vector2d a = base.eval(xi, eta).point;
            const Eigen::Vector2d b = refined.eval(xi, eta).point;
            CHECK((a - b).norm() < 1e-12);
        }
        if (base.structure().is_scaled_boundary) {
            for (int j = 0; j < refined.num_circ(); ++j) {
                CHECK((refined.control_point(0, j) - *base.scaling_center()).norm() < 1e-13);
            }
        }
    }
}

TEST_CASE("interior point edits") {
    const GeometryMap map = builtin::center_scaled_square();
    const InteriorOverride off_ray{1, 2, {0.7, 0.31}};
    const GeometryMap edited = set_interior_points(map, std::vector<InteriorOverride>{off_ray});
    CHECK_FALSE(edited.structure().has_straight_rays);
    CHECK(edited.structure().is_scaled_boundary);

    // On-ray move: flag is cleared conservatively as well.
    const InteriorOverride on_ray{1, 0, {0.375, 0.375}};
    const GeometryMap edited2 = set_interior_points(map, std::vector<InteriorOverride>{on_ray});
    CHECK_FALSE(edited2.structure().has_straight_rays);

    // Boundary row untouched by any override.
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> par(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double eta = par(rng);
        CHECK((edited.eval(1.0, eta).point - map.eval(1.0, eta).point).norm() < 1e-14);
    }

    CHECK_THROWS_AS(set_interior_points(map, std::vector<InteriorOverride>{{0, 1, {0, 0}}}),
                    ConstraintError);
    CHECK_THROWS_AS(set_interior_points(map, std::vector<InteriorOverride>{{2, 1, {0, 0}}}),
                    ConstraintError);
}

TEST_CASE("wedges") {
    const GeometryMap wedge = build_wedge(quarter_circle_arc(), {0, 0});
    CHECK(wedge.structure().is_scaled_boundary);
    CHECK_FALSE(wedge.circ_closed());

    std::mt19937 rng(13);
    std::uniform_real_distribution<double> par(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double xi = par(rng);
        const double eta = par(rng);
        const Eigen::Vector2d x = wedge.eval(xi, eta).point;
        CHECK(x.norm() <= 1.0 + 1e-12);  // the wedge stays inside the quarter disk
        CHECK(x.x() >= -1e-12);
        CHECK(x.y() >= -1e-12);
    }
    for (int trial = 0; trial < 20; ++trial) {
        CHECK((wedge.eval(0.0, par(rng)).point).norm() < 1e-14);
    }

    // Adjacent wedges agree along the shared ray.
    const GeometryMap next = build_wedge(second_quarter_arc(), {0, 0});
    for (int trial = 0; trial < 50; ++trial) {
        const double xi = par(rng);
        const Eigen::Vector2d a = wedge.eval(xi, 1.0).point;
        const Eigen::Vector2d b = next.eval(xi, 0.0).point;
        CHECK((a - b).norm() < 1e-12);
    }

    CHECK_THROWS_AS(build_wedge(builtin::square_boundary(), {0.5, 0.5}), StructureError);
}

TEST_CASE("metric and the multiplicative Jacobian") {
    std::mt19937 rng(33);
    std::uniform_real_distribution<double> par(0.01, 0.99);
    for (const char* tag : {"center-scaled", "off-center-scaled", "disk"}) {
        const GeometryMap map = builtin::map_by_tag(tag);
        for (int trial = 0; trial < 200; ++trial) {
            const double xi = par(rng);
            const double eta = par(rng);
            const MetricSample sample = metric(map, xi, eta);
            REQUIRE(sample.has_sb_factors());
            // det DF = xi J(eta), and det g = (det DF)^2.
            CHECK(std::abs(sample.det - xi * sample.J()) <=
                  1e-10 * (1.0 + std::abs(sample.det)));
            CHECK(std::abs(sample.metric.determinant() - sample.det * sample.det) <=
                  1e-10 * (1.0 + sample.det * sample.det));
        }
    }
}

TEST_CASE("jacobian matches finite differences") {
    const GeometryMap map = builtin::map_by_tag("disk");
    const double h = 1e-6;
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> par(0.05, 0.95);
    for (int trial = 0; trial < 50; ++trial) {
        const double xi = par(rng);
        const double eta = par(rng);
        const Eigen::Matrix2d jac = map.eval(xi, eta).jacobian;
        const Eigen::Vector2d dxi =
            (map.eval(xi + h, eta).point - map.eval(xi - h, eta).point) / (2 * h);
        const Eigen::Vector2d deta =
            (map.eval(xi, eta + h).point - map.eval(xi, eta - h).point) / (2 * h);
        CHECK((jac.col(0) - dxi).norm() < 1e-6);
        CHECK((jac.col(1) - deta).norm() < 1e-6);
    }
}

TEST_CASE("circumferential derivative vanishes at the center") {
    const GeometryMap map = builtin::center_scaled_square();
    for (const double eta : {0.0, 0.31, 0.77, 1.0}) {
        CHECK(map.eval(0.0, eta).jacobian.col(1).norm() < 1e-14);
    }
}

TEST_CASE("sb factors are a structure error off scaled-boundary maps") {
    const GeometryMap plain = builtin::rectangular_square();
    const MetricSample sample = metric(plain, 0.4, 0.6);
    CHECK_FALSE(sample.has_sb_factors());
    CHECK_THROWS_AS(sample.b1(), StructureError);
    CHECK_THROWS_AS(sample.b2(), StructureError);
    CHECK_THROWS_AS(sample.J(), StructureError);
    CHECK_THROWS_AS(sb_kernel(plain, 0.5), StructureError);
}

TEST_CASE("regularity reports") {
    SUBCASE("center scaled square") {
        const RegularityReport report = validate_regularity(builtin::center_scaled_square());
        CHECK(report.min_J > 0.0);
        CHECK(report.sign_changes == 0);
        CHECK(report.injective_sampling_ok);
        REQUIRE(report.c0_rays.size() == 4);  // seam plus the three corner knots
        CHECK(report.c0_rays[0] == 0.0);
        CHECK(report.c0_rays[1] == 0.25);
        CHECK(report.c0_rays[2] == 0.5);
        CHECK(report.c0_rays[3] == 0.75);
    }

    SUBCASE("center outside the square") {
        const GeometryMap bad = build_sb_map(builtin::square_boundary(), {2.0, 2.0});
        const RegularityReport report = validate_regularity(bad);
        CHECK(report.sign_changes > 0);
        CHECK_FALSE(report.injective_sampling_ok);
    }

    SUBCASE("internally smooth square has only the seam ray") {
        const RegularityReport report = validate_regularity(builtin::internally_smooth_square());
        REQUIRE(report.c0_rays.size() == 1);
        CHECK(report.c0_rays[0] == 0.0);
        CHECK(report.min_J > 0.0);
    }
}

TEST_CASE("kernel sampling check") {
    const CurveGeometry square = builtin::square_boundary();
    CHECK(center_in_kernel_sampled(square, {0.5, 0.5}));
    CHECK(center_in_kernel_sampled(square, {0.25, 0.25}));
    CHECK_FALSE(center_in_kernel_sampled(square, {2.0, 2.0}));
    CHECK_FALSE(center_in_kernel_sampled(square, {1.5, 0.5}));
}

TEST_CASE("bent disk is regular but not star shaped") {
    const GeometryMap map = builtin::bent_disk();
    CHECK(map.structure().is_scaled_boundary);
    CHECK_FALSE(map.structure().has_straight_rays);

    const RegularityReport report = validate_regularity(map, 48);
    CHECK(report.min_J > 0.0);
    CHECK(report.injective_sampling_ok);

    // No sampled interior point sees the whole boundary.
    const CurveGeometry boundary = map.boundary_curve();
    bool any_kernel_point = false;
    for (int i = 1; i < 8 && !any_kernel_point; ++i) {
        for (int j = 0; j < 16 && !any_kernel_point; ++j) {
            const Eigen::Vector2d candidate =
                map.eval(i / 8.0, (j + 0.5) / 16.0).point;
            any_kernel_point = center_in_kernel_sampled(boundary, candidate, 128);
        }
    }
    CHECK_FALSE(any_kernel_point);
}
