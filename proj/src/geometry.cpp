#include "sbiga/geometry.hpp"

#include <cmath>
#include <limits>

#include "sbiga/errors.hpp"

namespace sbiga {

namespace {

constexpr double kStructureTol = 1e-12;

bool row_collapsed_to(const Eigen::MatrixXd& nx, const Eigen::MatrixXd& ny,
                      const Eigen::Vector2d& center) {
    for (int j = 0; j < nx.cols(); ++j) {
        if (std::abs(nx(0, j) - center.x()) > kStructureTol ||
            std::abs(ny(0, j) - center.y()) > kStructureTol) {
            return false;
        }
    }
    return true;
}

bool on_segment(const Eigen::Vector2d& q, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    const Eigen::Vector2d v = b - a;
    const double len2 = v.squaredNorm();
    if (len2 < kStructureTol * kStructureTol) {
        return (q - a).norm() <= kStructureTol;
    }
    const double s = (q - a).dot(v) / len2;
    if (s < -kStructureTol || s > 1.0 + kStructureTol) {
        return false;
    }
    const Eigen::Vector2d foot = a + s * v;
    return (q - foot).norm() <= kStructureTol * std::max(1.0, std::sqrt(len2));
}

bool straight_rays_hold(const Eigen::MatrixXd& nx, const Eigen::MatrixXd& ny,
                        const Eigen::MatrixXd& w, const Eigen::Vector2d& center) {
    const int m = static_cast<int>(nx.rows());
    const int n = static_cast<int>(nx.cols());
    for (int j = 0; j < n; ++j) {
        const Eigen::Vector2d boundary(nx(m - 1, j), ny(m - 1, j));
        for (int i = 1; i + 1 < m; ++i) {
            if (!on_segment({nx(i, j), ny(i, j)}, center, boundary)) {
                return false;
            }
        }
        if (w.size() > 0) {
            for (int i = 0; i < m; ++i) {
                if (std::abs(w(i, j) - w(m - 1, j)) > kStructureTol) {
                    return false;
                }
            }
        }
    }
    return true;
}

}  // namespace

GeometryMap::GeometryMap(KnotVector radial_kv, KnotVector circ_kv, Eigen::MatrixXd net_x,
                         Eigen::MatrixXd net_y, Eigen::MatrixXd weights,
                         std::optional<Eigen::Vector2d> scaling_center, SbStructure structure)
    : radial_kv_(std::move(radial_kv)), circ_kv_(std::move(circ_kv)), net_x_(std::move(net_x)),
      net_y_(std::move(net_y)), weights_(std::move(weights)),
      scaling_center_(std::move(scaling_center)), structure_(structure) {
    const int m = radial_kv_.num_basis();
    const int n = circ_kv_.num_basis();
    if (net_x_.rows() != m || net_x_.cols() != n || net_y_.rows() != m || net_y_.cols() != n) {
        throw DomainError("control net dimensions do not match the basis counts");
    }
    if (weights_.size() > 0) {
        if (weights_.rows() != m || weights_.cols() != n) {
            throw DomainError("weight grid dimensions do not match the control net");
        }
        if ((weights_.array() <= 0.0).any()) {
            throw DomainError("weights must be positive");
        }
    }
    if (structure_.is_scaled_boundary) {
        if (!scaling_center_) {
            throw StructureError("scaled-boundary map requires a scaling center");
        }
        if (!row_collapsed_to(net_x_, net_y_, *scaling_center_)) {
            throw StructureError("xi = 0 control row does not collapse to the scaling center");
        }
    }
    if (structure_.has_straight_rays) {
        if (!structure_.is_scaled_boundary) {
            throw StructureError("straight rays require scaled-boundary structure");
        }
        if (!straight_rays_hold(net_x_, net_y_, weights_, *scaling_center_)) {
            throw StructureError("interior control points leave the center-boundary rays");
        }
    }

    circ_closed_ = true;
    for (int i = 0; i < m; ++i) {
        const double dx = net_x_(i, 0) - net_x_(i, n - 1);
        const double dy = net_y_(i, 0) - net_y_(i, n - 1);
        double dw = 0.0;
        if (weights_.size() > 0) {
            dw = weights_(i, 0) - weights_(i, n - 1);
        }
        if (std::abs(dx) > kStructureTol || std::abs(dy) > kStructureTol ||
            std::abs(dw) > kStructureTol) {
            circ_closed_ = false;
            break;
        }
    }
}

CurveGeometry GeometryMap::boundary_curve() const {
    const int m = num_radial();
    const int n = num_circ();
    std::vector<Eigen::Vector2d> pts(static_cast<std::size_t>(n));
    std::vector<double> w;
    for (int j = 0; j < n; ++j) {
        pts[static_cast<std::size_t>(j)] = control_point(m - 1, j);
    }
    if (rational()) {
        w.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            w[static_cast<std::size_t>(j)] = weights_(m - 1, j);
        }
    }
    return CurveGeometry(circ_kv_, std::move(pts), std::move(w), circ_closed_);
}

LocalShape local_shape(const GeometryMap& map, const BasisEval& rad, const BasisEval& circ) {
    const int pr = static_cast<int>(rad.values.size());
    const int pc = static_cast<int>(circ.values.size());
    LocalShape shape;
    shape.rad_first = rad.first_index;
    shape.circ_first = circ.first_index;
    shape.val.resize(pr, pc);
    shape.dxi.resize(pr, pc);
    shape.deta.resize(pr, pc);

    if (!map.rational()) {
        for (int a = 0; a < pr; ++a) {
            for (int b = 0; b < pc; ++b) {
                shape.val(a, b) = rad.values[a] * circ.values[b];
                shape.dxi(a, b) = rad.derivatives[0][a] * circ.values[b];
                shape.deta(a, b) = rad.values[a] * circ.derivatives[0][b];
            }
        }
        return shape;
    }

    const Eigen::MatrixXd& w = map.weights();
    double W = 0.0;
    double Wxi = 0.0;
    double Weta = 0.0;
    for (int a = 0; a < pr; ++a) {
        for (int b = 0; b < pc; ++b) {
            const double wab = w(rad.first_index + a, circ.first_index + b);
            W += rad.values[a] * circ.values[b] * wab;
            Wxi += rad.derivatives[0][a] * circ.values[b] * wab;
            Weta += rad.values[a] * circ.derivatives[0][b] * wab;
        }
    }
    for (int a = 0; a < pr; ++a) {
        for (int b = 0; b < pc; ++b) {
            const double wab = w(rad.first_index + a, circ.first_index + b);
            const double r = rad.values[a] * circ.values[b] * wab / W;
            shape.val(a, b) = r;
            shape.dxi(a, b) = (rad.derivatives[0][a] * circ.values[b] * wab - r * Wxi) / W;
            shape.deta(a, b) = (rad.values[a] * circ.derivatives[0][b] * wab - r * Weta) / W;
        }
    }
    return shape;
}

GeometryMap::Jet jet_from_shape(const GeometryMap& map, const LocalShape& shape) {
    GeometryMap::Jet jet;
    jet.point.setZero();
    jet.jacobian.setZero();
    for (int a = 0; a < shape.val.rows(); ++a) {
        for (int b = 0; b < shape.val.cols(); ++b) {
            const Eigen::Vector2d cp =
                map.control_point(shape.rad_first + a, shape.circ_first + b);
            jet.point += shape.val(a, b) * cp;
            jet.jacobian.col(0) += shape.dxi(a, b) * cp;
            jet.jacobian.col(1) += shape.deta(a, b) * cp;
        }
    }
    return jet;
}

GeometryMap::Jet GeometryMap::eval(double xi, double eta) const {
    const BasisEval rad = eval_basis(radial_kv_, xi, 1);
    const BasisEval circ = eval_basis(circ_kv_, eta, 1);
    return jet_from_shape(*this, local_shape(*this, rad, circ));
}

const Eigen::Vector2d& MetricSample::b1() const {
    if (!has_sb_) {
        throw StructureError("b1 requested on a map without straight-ray structure");
    }
    return b1_;
}

const Eigen::Vector2d& MetricSample::b2() const {
    if (!has_sb_) {
        throw StructureError("b2 requested on a map without straight-ray structure");
    }
    return b2_;
}

double MetricSample::J() const {
    if (!has_sb_) {
        throw StructureError("J requested on a map without straight-ray structure");
    }
    return J_;
}

void MetricSample::set_sb_factors(const Eigen::Vector2d& b1, const Eigen::Vector2d& b2, double J) {
    has_sb_ = true;
    b1_ = b1;
    b2_ = b2;
    J_ = J;
}

SbKernel sb_kernel(const GeometryMap& map, double eta) {
    if (!map.structure().has_straight_rays) {
        throw StructureError("scaled-boundary kernel requires straight rays");
    }
    const Eigen::Vector2d center = *map.scaling_center();
    const CurveJet jet = eval_curve(map.boundary_curve(), eta, 1);
    const Eigen::Vector2d secant = jet.point - center;
    const Eigen::Vector2d tangent = jet.derivatives[0];
    SbKernel kernel;
    kernel.b1 = Eigen::Vector2d(tangent.y(), -tangent.x());
    kernel.b2 = Eigen::Vector2d(-secant.y(), secant.x());
    kernel.J = secant.x() * tangent.y() - secant.y() * tangent.x();
    return kernel;
}

namespace {

GeometryMap build_from_curve(const CurveGeometry& boundary, const Eigen::Vector2d& center) {
    const int n = boundary.num_points();
    Eigen::MatrixXd nx(2, n);
    Eigen::MatrixXd ny(2, n);
    Eigen::MatrixXd w;
    for (int j = 0; j < n; ++j) {
        const Eigen::Vector2d& cp = boundary.control_points()[static_cast<std::size_t>(j)];
        nx(0, j) = center.x();
        ny(0, j) = center.y();
        nx(1, j) = cp.x();
        ny(1, j) = cp.y();
    }
    if (boundary.rational()) {
        // Boundary weights are carried along the rays; this keeps the map an
        // affine blend of center and curve, so det DF = xi J(eta) holds
        // exactly for rational boundaries as well.
        w.resize(2, n);
        for (int j = 0; j < n; ++j) {
            w(0, j) = boundary.weights()[static_cast<std::size_t>(j)];
            w(1, j) = boundary.weights()[static_cast<std::size_t>(j)];
        }
    }
    return GeometryMap(KnotVector({0, 0, 1, 1}, 1), boundary.knot_vector(), std::move(nx),
                       std::move(ny), std::move(w), center,
                       SbStructure{.is_scaled_boundary = true, .has_straight_rays = true});
}

}  // namespace

GeometryMap build_sb_map(const CurveGeometry& boundary, const Eigen::Vector2d& center) {
    if (!boundary.closed()) {
        throw StructureError("scaled-boundary construction requires a closed boundary curve");
    }
    return build_from_curve(boundary, center);
}

GeometryMap build_wedge(const CurveGeometry& segment, const Eigen::Vector2d& center) {
    if (segment.closed()) {
        throw StructureError("wedge construction requires an open curve segment");
    }
    const Eigen::Vector2d start = eval_curve(segment, 0.0).point;
    const Eigen::Vector2d end = eval_curve(segment, 1.0).point;
    if ((start - end).norm() <= kStructureTol) {
        throw StructureError("wedge segment endpoints coincide");
    }
    return build_from_curve(segment, center);
}

namespace {

enum class Direction { Radial, Circumferential };

// Packs the control strands of one parametric direction into the row-per-
// basis-function layout of the univariate refinement routines; rational
// nets travel in homogeneous coordinates.
Eigen::MatrixXd pack_strands(const GeometryMap& map, Direction dir) {
    const int m = map.num_radial();
    const int n = map.num_circ();
    const bool rational = map.rational();
    const int k = rational ? 3 : 2;
    const int rows = (dir == Direction::Radial) ? m : n;
    const int strands = (dir == Direction::Radial) ? n : m;
    Eigen::MatrixXd packed(rows, strands * k);
    for (int r = 0; r < rows; ++r) {
        for (int s = 0; s < strands; ++s) {
            const int i = (dir == Direction::Radial) ? r : s;
            const int j = (dir == Direction::Radial) ? s : r;
            const double x = map.net_x()(i, j);
            const double y = map.net_y()(i, j);
            if (rational) {
                const double w = map.weights()(i, j);
                packed(r, s * 3 + 0) = w * x;
                packed(r, s * 3 + 1) = w * y;
                packed(r, s * 3 + 2) = w;
            } else {
                packed(r, s * 2 + 0) = x;
                packed(r, s * 2 + 1) = y;
            }
        }
    }
    return packed;
}

GeometryMap unpack_strands(const GeometryMap& source, Direction dir, const KnotVector& new_kv,
                           const Eigen::MatrixXd& packed) {
    const bool rational = source.rational();
    const int k = rational ? 3 : 2;
    const int rows = static_cast<int>(packed.rows());
    const int strands = static_cast<int>(packed.cols()) / k;
    const int m = (dir == Direction::Radial) ? rows : strands;
    const int n = (dir == Direction::Radial) ? strands : rows;
    Eigen::MatrixXd nx(m, n);
    Eigen::MatrixXd ny(m, n);
    Eigen::MatrixXd w;
    if (rational) {
        w.resize(m, n);
    }
    for (int r = 0; r < rows; ++r) {
        for (int s = 0; s < strands; ++s) {
            const int i = (dir == Direction::Radial) ? r : s;
            const int j = (dir == Direction::Radial) ? s : r;
            if (rational) {
                const double wij = packed(r, s * 3 + 2);
                nx(i, j) = packed(r, s * 3 + 0) / wij;
                ny(i, j) = packed(r, s * 3 + 1) / wij;
                w(i, j) = wij;
            } else {
                nx(i, j) = packed(r, s * 2 + 0);
                ny(i, j) = packed(r, s * 2 + 1);
            }
        }
    }

    SbStructure structure = source.structure();
    // The collapsed center row survives any clamped refinement; straight
    // rays are re-detected because circumferential blending can tilt points
    // off their original rays.
    if (structure.has_straight_rays) {
        structure.has_straight_rays =
            straight_rays_hold(nx, ny, w, *source.scaling_center());
    }
    const KnotVector radial = (dir == Direction::Radial) ? new_kv : source.radial_kv();
    const KnotVector circ = (dir == Direction::Radial) ? source.circ_kv() : new_kv;
    return GeometryMap(radial, circ, std::move(nx), std::move(ny), std::move(w),
                       source.scaling_center(), structure);
}

GeometryMap refine_direction(const GeometryMap& map, Direction dir,
                             std::span<const double> new_knots, int target_degree) {
    const KnotVector& kv = (dir == Direction::Radial) ? map.radial_kv() : map.circ_kv();
    if (target_degree < kv.degree()) {
        throw DomainError("cannot lower the degree of an existing map");
    }
    RefinedBasis rb{kv, pack_strands(map, dir)};
    for (int d = kv.degree(); d < target_degree; ++d) {
        rb = elevate_degree(rb.kv, rb.control);
    }
    for (double t : new_knots) {
        rb = insert_knot(rb.kv, rb.control, t);
    }
    return unpack_strands(map, dir, rb.kv, rb.control);
}

}  // namespace

GeometryMap refine_radial(const GeometryMap& map, std::span<const double> new_knots,
                          int target_degree) {
    return refine_direction(map, Direction::Radial, new_knots, target_degree);
}

GeometryMap refine_circumferential(const GeometryMap& map, std::span<const double> new_knots,
                                   int target_degree) {
    return refine_direction(map, Direction::Circumferential, new_knots, target_degree);
}

GeometryMap refine_uniform(const GeometryMap& map) {
    const auto mids = [](const KnotVector& kv) {
        std::vector<double> out;
        const auto breaks = kv.breakpoints();
        for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
            out.push_back(0.5 * (breaks[s] + breaks[s + 1]));
        }
        return out;
    };
    GeometryMap out = refine_radial(map, mids(map.radial_kv()), map.radial_kv().degree());
    return refine_circumferential(out, mids(map.circ_kv()), map.circ_kv().degree());
}

GeometryMap set_interior_points(const GeometryMap& map, std::span<const InteriorOverride> edits) {
    const int m = map.num_radial();
    const int n = map.num_circ();
    Eigen::MatrixXd nx = map.net_x();
    Eigen::MatrixXd ny = map.net_y();
    for (const auto& edit : edits) {
        if (edit.i <= 0 || edit.i >= m - 1) {
            throw ConstraintError("only interior control rows may be edited (row " +
                                  std::to_string(edit.i) + ")");
        }
        if (edit.j < 0 || edit.j >= n) {
            throw ConstraintError("circumferential index out of range");
        }
        nx(edit.i, edit.j) = edit.point.x();
        ny(edit.i, edit.j) = edit.point.y();
    }
    SbStructure structure = map.structure();
    structure.has_straight_rays = false;
    return GeometryMap(map.radial_kv(), map.circ_kv(), std::move(nx), std::move(ny),
                       map.weights(), map.scaling_center(), structure);
}

MetricSample metric(const GeometryMap& map, double xi, double eta) {
    const GeometryMap::Jet jet = map.eval(xi, eta);
    MetricSample sample;
    sample.point = jet.point;
    sample.jacobian = jet.jacobian;
    sample.det = jet.jacobian.determinant();
    sample.metric = jet.jacobian.transpose() * jet.jacobian;
    if (map.structure().has_straight_rays) {
        const SbKernel kernel = sb_kernel(map, eta);
        sample.set_sb_factors(kernel.b1, kernel.b2, kernel.J);
    }
    return sample;
}

RegularityReport validate_regularity(const GeometryMap& map, int grid) {
    if (grid < 2) {
        throw DomainError("regularity sample grid must have at least 2 points");
    }
    RegularityReport report;

    const int q = map.circ_kv().degree();
    if (map.circ_closed()) {
        report.c0_rays.push_back(0.0);  // the seam
    }
    for (const double b : map.circ_kv().breakpoints()) {
        if (b > 0.0 && b < 1.0 && map.circ_kv().multiplicity(b) >= q) {
            report.c0_rays.push_back(b);
        }
    }

    double min_value = std::numeric_limits<double>::infinity();
    int sign_changes = 0;
    if (map.structure().has_straight_rays) {
        double prev = 0.0;
        for (int k = 0; k < grid; ++k) {
            const double eta = (k + 0.5) / grid;
            const double J = sb_kernel(map, eta).J;
            min_value = std::min(min_value, J);
            if (k > 0 && J * prev < 0.0) {
                ++sign_changes;
            }
            prev = J;
        }
    } else {
        for (int i = 0; i < grid; ++i) {
            const double xi = (i + 0.5) / grid;
            double prev = 0.0;
            for (int k = 0; k < grid; ++k) {
                const double eta = (k + 0.5) / grid;
                const double value = metric(map, xi, eta).det / xi;
                min_value = std::min(min_value, value);
                if (k > 0 && value * prev < 0.0) {
                    ++sign_changes;
                }
                prev = value;
            }
        }
    }
    report.min_J = min_value;
    report.sign_changes = sign_changes;
    report.injective_sampling_ok = min_value > 0.0;
    return report;
}

SbStructure detect_structure(const Eigen::MatrixXd& net_x, const Eigen::MatrixXd& net_y,
                             const Eigen::MatrixXd& weights,
                             const std::optional<Eigen::Vector2d>& center) {
    SbStructure structure;
    if (!center) {
        return structure;
    }
    structure.is_scaled_boundary = row_collapsed_to(net_x, net_y, *center);
    if (structure.is_scaled_boundary) {
        structure.has_straight_rays = straight_rays_hold(net_x, net_y, weights, *center);
    }
    return structure;
}

bool center_in_kernel_sampled(const CurveGeometry& boundary, const Eigen::Vector2d& center,
                              int samples) {
    for (int k = 0; k < samples; ++k) {
        const double eta = (k + 0.5) / samples;
        const CurveJet jet = eval_curve(boundary, eta, 1);
        const Eigen::Vector2d secant = jet.point - center;
        const double J = secant.x() * jet.derivatives[0].y() - secant.y() * jet.derivatives[0].x();
        if (!(J > 0.0)) {
            return false;
        }
    }
    return true;
}

}  // namespace sbiga
