#include "sbiga/splines.hpp"

#include <algorithm>
#include <cmath>

#include "sbiga/errors.hpp"
#include "sbiga/quadrature.hpp"

namespace sbiga {

namespace {

void check_parameter(double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError("parameter " + std::to_string(t) + " outside [0, 1]");
    }
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r *= static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return r;
}

}  // namespace

KnotVector::KnotVector(std::vector<double> knots, int degree)
    : knots_(std::move(knots)), degree_(degree) {
    if (degree_ < 0) {
        throw DomainError("negative spline degree");
    }
    if (knots_.size() < static_cast<std::size_t>(2 * (degree_ + 1))) {
        throw DomainError("knot vector too short for degree " + std::to_string(degree_));
    }
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
        if (knots_[i] > knots_[i + 1]) {
            throw DomainError("knots must be non-decreasing");
        }
    }
    const double a = knots_.front();
    const double b = knots_.back();
    if (!(b > a)) {
        throw DomainError("degenerate knot range");
    }
    if (a != 0.0 || b != 1.0) {
        for (double& k : knots_) {
            k = (k - a) / (b - a);
        }
        knots_.front() = 0.0;
        knots_.back() = 1.0;
    }
    const int p = degree_;
    const int n = num_basis();
    for (int i = 0; i <= p; ++i) {
        if (knots_[static_cast<std::size_t>(i)] != 0.0 ||
            knots_[static_cast<std::size_t>(n + i)] != 1.0) {
            throw DomainError("knot vector is not open (clamped)");
        }
    }
    if (knots_[static_cast<std::size_t>(p + 1)] == 0.0 ||
        knots_[static_cast<std::size_t>(n - 1)] == 1.0) {
        throw DomainError("end knot multiplicity exceeds degree + 1");
    }
    int mult = 1;
    for (int i = p + 2; i < n; ++i) {
        mult = (knots_[static_cast<std::size_t>(i)] == knots_[static_cast<std::size_t>(i - 1)])
                   ? mult + 1
                   : 1;
        if (mult > p + 1) {
            throw DomainError("interior knot multiplicity exceeds degree + 1");
        }
    }
}

int KnotVector::find_span(double t) const {
    check_parameter(t);
    const int p = degree_;
    const int n = num_basis();
    if (t >= 1.0) {
        return n - 1;  // last non-empty span
    }
    int low = p;
    int high = n;
    int mid = (low + high) / 2;
    while (t < knots_[static_cast<std::size_t>(mid)] ||
           t >= knots_[static_cast<std::size_t>(mid + 1)]) {
        if (t < knots_[static_cast<std::size_t>(mid)]) {
            high = mid;
        } else {
            low = mid;
        }
        mid = (low + high) / 2;
    }
    return mid;
}

int KnotVector::multiplicity(double t) const {
    int count = 0;
    for (double k : knots_) {
        if (k == t) {
            ++count;
        }
    }
    return count;
}

std::vector<double> KnotVector::breakpoints() const {
    std::vector<double> out;
    for (double k : knots_) {
        if (out.empty() || k != out.back()) {
            out.push_back(k);
        }
    }
    return out;
}

std::vector<double> KnotVector::greville() const {
    const int p = degree_;
    const int n = num_basis();
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        if (p == 0) {
            out[static_cast<std::size_t>(j)] =
                0.5 * (knots_[static_cast<std::size_t>(j)] + knots_[static_cast<std::size_t>(j + 1)]);
            continue;
        }
        double s = 0.0;
        for (int k = 1; k <= p; ++k) {
            s += knots_[static_cast<std::size_t>(j + k)];
        }
        out[static_cast<std::size_t>(j)] = s / p;
    }
    return out;
}

KnotVector KnotVector::midpoint_refined() const {
    std::vector<double> out;
    out.reserve(knots_.size() * 2);
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        out.push_back(knots_[i]);
        if (i + 1 < knots_.size() && knots_[i] < knots_[i + 1]) {
            out.push_back(0.5 * (knots_[i] + knots_[i + 1]));
        }
    }
    std::sort(out.begin(), out.end());
    return KnotVector(out, degree_);
}

BasisEval eval_basis(const KnotVector& kv, double t, int nderiv) {
    check_parameter(t);
    const int p = kv.degree();
    if (nderiv < 0 || nderiv > p) {
        throw DomainError("derivative order " + std::to_string(nderiv) +
                          " not produced by a degree-" + std::to_string(p) + " basis");
    }
    const auto& U = kv.knots();
    const int span = kv.find_span(t);

    BasisEval out;
    out.span = span;
    out.first_index = span - p;
    out.values.assign(static_cast<std::size_t>(p + 1), 0.0);

    // Triangular table of the non-vanishing basis functions and the knot
    // differences, following the standard derivative-capable recursion.
    Eigen::MatrixXd ndu(p + 1, p + 1);
    std::vector<double> left(static_cast<std::size_t>(p + 1), 0.0);
    std::vector<double> right(static_cast<std::size_t>(p + 1), 0.0);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[static_cast<std::size_t>(j)] = t - U[static_cast<std::size_t>(span + 1 - j)];
        right[static_cast<std::size_t>(j)] = U[static_cast<std::size_t>(span + j)] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
            const double temp = ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right[static_cast<std::size_t>(r + 1)] * temp;
            saved = left[static_cast<std::size_t>(j - r)] * temp;
        }
        ndu(j, j) = saved;
    }
    for (int j = 0; j <= p; ++j) {
        out.values[static_cast<std::size_t>(j)] = ndu(j, p);
    }
    if (nderiv == 0) {
        return out;
    }

    out.derivatives.assign(static_cast<std::size_t>(nderiv),
                           std::vector<double>(static_cast<std::size_t>(p + 1), 0.0));
    Eigen::MatrixXd a(2, p + 1);
    for (int r = 0; r <= p; ++r) {
        int s1 = 0;
        int s2 = 1;
        a(0, 0) = 1.0;
        for (int k = 1; k <= nderiv; ++k) {
            double d = 0.0;
            const int rk = r - k;
            const int pk = p - k;
            if (r >= k) {
                a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                d = a(s2, 0) * ndu(rk, pk);
            }
            const int j1 = (rk >= -1) ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                d += a(s2, j) * ndu(rk + j, pk);
            }
            if (r <= pk) {
                a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
                d += a(s2, k) * ndu(r, pk);
            }
            out.derivatives[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(r)] = d;
            std::swap(s1, s2);
        }
    }
    double factor = p;
    for (int k = 1; k <= nderiv; ++k) {
        for (int j = 0; j <= p; ++j) {
            out.derivatives[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j)] *= factor;
        }
        factor *= (p - k);
    }
    return out;
}

BasisEval eval_rational_basis(const KnotVector& kv, std::span<const double> weights, double t,
                              int nderiv) {
    if (nderiv > 2) {
        throw DomainError("rational basis derivatives supported up to order 2");
    }
    if (weights.size() != static_cast<std::size_t>(kv.num_basis())) {
        throw DomainError("weight count does not match basis count");
    }
    const int p = kv.degree();
    const int poly_order = std::min(nderiv, p);
    BasisEval poly = eval_basis(kv, t, poly_order);

    const auto wval = [&](int local) {
        return weights[static_cast<std::size_t>(poly.first_index + local)];
    };
    const auto poly_deriv = [&](int order, int local) -> double {
        if (order == 0) {
            return poly.values[static_cast<std::size_t>(local)];
        }
        if (order > poly_order) {
            return 0.0;
        }
        return poly.derivatives[static_cast<std::size_t>(order - 1)][static_cast<std::size_t>(local)];
    };

    double w0 = 0.0;
    double w1 = 0.0;
    double w2 = 0.0;
    for (int a = 0; a <= p; ++a) {
        w0 += poly_deriv(0, a) * wval(a);
        w1 += poly_deriv(1, a) * wval(a);
        w2 += poly_deriv(2, a) * wval(a);
    }

    BasisEval out;
    out.span = poly.span;
    out.first_index = poly.first_index;
    out.values.assign(static_cast<std::size_t>(p + 1), 0.0);
    if (nderiv >= 1) {
        out.derivatives.assign(static_cast<std::size_t>(nderiv),
                               std::vector<double>(static_cast<std::size_t>(p + 1), 0.0));
    }
    for (int a = 0; a <= p; ++a) {
        const double r0 = poly_deriv(0, a) * wval(a) / w0;
        out.values[static_cast<std::size_t>(a)] = r0;
        if (nderiv >= 1) {
            const double r1 = (poly_deriv(1, a) * wval(a) - r0 * w1) / w0;
            out.derivatives[0][static_cast<std::size_t>(a)] = r1;
            if (nderiv >= 2) {
                out.derivatives[1][static_cast<std::size_t>(a)] =
                    (poly_deriv(2, a) * wval(a) - 2.0 * r1 * w1 - r0 * w2) / w0;
            }
        }
    }
    return out;
}

CurveGeometry::CurveGeometry(KnotVector kv, std::vector<Eigen::Vector2d> control_points,
                             std::vector<double> weights, bool closed)
    : kv_(std::move(kv)), points_(std::move(control_points)), weights_(std::move(weights)),
      closed_(closed) {
    if (points_.size() != static_cast<std::size_t>(kv_.num_basis())) {
        throw DomainError("control point count does not match basis count");
    }
    if (!weights_.empty()) {
        if (weights_.size() != points_.size()) {
            throw DomainError("weight count does not match control point count");
        }
        for (double w : weights_) {
            if (!(w > 0.0)) {
                throw DomainError("weights must be positive");
            }
        }
    }
    if (closed_) {
        if ((points_.front() - points_.back()).norm() > 1e-12) {
            throw DomainError("closed curve requires coincident end control points");
        }
        if (!weights_.empty() && std::abs(weights_.front() - weights_.back()) > 1e-12) {
            throw DomainError("closed curve requires coincident end weights");
        }
    }
}

CurveGeometry CurveGeometry::reversed() const {
    std::vector<double> rknots(kv_.knots().rbegin(), kv_.knots().rend());
    for (double& k : rknots) {
        k = 1.0 - k;
    }
    std::vector<Eigen::Vector2d> rpoints(points_.rbegin(), points_.rend());
    std::vector<double> rweights(weights_.rbegin(), weights_.rend());
    return CurveGeometry(KnotVector(std::move(rknots), kv_.degree()), std::move(rpoints),
                         std::move(rweights), closed_);
}

double CurveGeometry::signed_area(int quad_order) const {
    const QuadratureRule rule(kv_, quad_order);
    double area = 0.0;
    for (const auto& span : rule.spans()) {
        for (std::size_t g = 0; g < span.nodes.size(); ++g) {
            const CurveJet jet = eval_curve(*this, span.nodes[g], 1);
            area += span.weights[g] * jet.point.x() * jet.derivatives[0].y();
        }
    }
    return area;
}

CurveJet eval_curve(const CurveGeometry& curve, double t, int nderiv) {
    const int p = curve.knot_vector().degree();
    CurveJet jet;
    jet.derivatives.assign(static_cast<std::size_t>(nderiv), Eigen::Vector2d::Zero());

    BasisEval basis;
    if (curve.rational()) {
        basis = eval_rational_basis(curve.knot_vector(), curve.weights(), t, nderiv);
    } else {
        basis = eval_basis(curve.knot_vector(), t, std::min(nderiv, p));
    }
    for (int a = 0; a <= p; ++a) {
        const Eigen::Vector2d& cp =
            curve.control_points()[static_cast<std::size_t>(basis.first_index + a)];
        jet.point += basis.values[static_cast<std::size_t>(a)] * cp;
        const int avail = static_cast<int>(basis.derivatives.size());
        for (int k = 1; k <= std::min(nderiv, avail); ++k) {
            jet.derivatives[static_cast<std::size_t>(k - 1)] +=
                basis.derivatives[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(a)] * cp;
        }
    }
    return jet;
}

RefinedBasis insert_knot(const KnotVector& kv, const Eigen::MatrixXd& control, double t) {
    check_parameter(t);
    const int p = kv.degree();
    const int n = kv.num_basis();
    if (control.rows() != n) {
        throw DomainError("control row count does not match basis count");
    }
    if (kv.multiplicity(t) + 1 > p) {
        throw RefinementError("inserting knot " + std::to_string(t) +
                              " would exceed multiplicity " + std::to_string(p));
    }
    const auto& U = kv.knots();
    const int k = kv.find_span(t);

    Eigen::MatrixXd refined(n + 1, control.cols());
    for (int i = 0; i <= k - p; ++i) {
        refined.row(i) = control.row(i);
    }
    for (int i = k - p + 1; i <= k; ++i) {
        const double denom = U[static_cast<std::size_t>(i + p)] - U[static_cast<std::size_t>(i)];
        const double alpha = (t - U[static_cast<std::size_t>(i)]) / denom;
        refined.row(i) = alpha * control.row(i) + (1.0 - alpha) * control.row(i - 1);
    }
    for (int i = k + 1; i <= n; ++i) {
        refined.row(i) = control.row(i - 1);
    }

    std::vector<double> knots = U;
    knots.insert(knots.begin() + (k + 1), t);
    return RefinedBasis{KnotVector(std::move(knots), p), std::move(refined)};
}

// Degree elevation by one. Bezier-segment elevation with on-the-fly knot
// insertion/removal (the standard one-pass algorithm).
RefinedBasis elevate_degree(const KnotVector& kv, const Eigen::MatrixXd& control) {
    const int p = kv.degree();
    const int n = kv.num_basis() - 1;  // highest control index
    if (control.rows() != n + 1) {
        throw DomainError("control row count does not match basis count");
    }
    const auto& U = kv.knots();
    const int cols = static_cast<int>(control.cols());
    constexpr int t_elev = 1;

    const int m = n + p + 1;
    const int ph = p + t_elev;
    const int ph2 = ph / 2;

    Eigen::MatrixXd bezalfs = Eigen::MatrixXd::Zero(ph + 1, p + 1);
    bezalfs(0, 0) = 1.0;
    bezalfs(ph, p) = 1.0;
    for (int i = 1; i <= ph2; ++i) {
        const double inv = 1.0 / binomial(ph, i);
        const int mpi = std::min(p, i);
        for (int j = std::max(0, i - t_elev); j <= mpi; ++j) {
            bezalfs(i, j) = inv * binomial(p, j) * binomial(t_elev, i - j);
        }
    }
    for (int i = ph2 + 1; i <= ph - 1; ++i) {
        const int mpi = std::min(p, i);
        for (int j = std::max(0, i - t_elev); j <= mpi; ++j) {
            bezalfs(i, j) = bezalfs(ph - i, p - j);
        }
    }

    // Upper bounds on the output sizes.
    const int distinct = static_cast<int>(kv.breakpoints().size());
    const int max_basis = n + 1 + distinct;
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(max_basis + 2, cols);
    std::vector<double> Uh(static_cast<std::size_t>(max_basis + ph + 3), 0.0);
    Eigen::MatrixXd bpts(p + 1, cols);
    Eigen::MatrixXd ebpts(ph + 1, cols);
    Eigen::MatrixXd next_bpts(std::max(p - 1, 1), cols);
    std::vector<double> alfs(static_cast<std::size_t>(std::max(p - 1, 1)), 0.0);

    int mh = ph;
    int kind = ph + 1;
    int r = -1;
    int a = p;
    int b = p + 1;
    int cind = 1;
    double ua = U[0];
    Q.row(0) = control.row(0);
    for (int i = 0; i <= ph; ++i) {
        Uh[static_cast<std::size_t>(i)] = ua;
    }
    for (int i = 0; i <= p; ++i) {
        bpts.row(i) = control.row(i);
    }

    int lbz = 1;
    while (b < m) {
        const int i0 = b;
        while (b < m && U[static_cast<std::size_t>(b)] == U[static_cast<std::size_t>(b + 1)]) {
            ++b;
        }
        const int mul = b - i0 + 1;
        mh += mul + t_elev;
        const double ub = U[static_cast<std::size_t>(b)];
        const int oldr = r;
        r = p - mul;
        lbz = (oldr > 0) ? (oldr + 2) / 2 : 1;
        const int rbz = (r > 0) ? ph - (r + 1) / 2 : ph;
        if (r > 0) {
            // Insert ub to reach full multiplicity: extract the Bezier segment.
            const double numer = ub - ua;
            for (int k = p; k > mul; --k) {
                alfs[static_cast<std::size_t>(k - mul - 1)] =
                    numer / (U[static_cast<std::size_t>(a + k)] - ua);
            }
            for (int j = 1; j <= r; ++j) {
                const int save = r - j;
                const int s = mul + j;
                for (int k = p; k >= s; --k) {
                    const double alf = alfs[static_cast<std::size_t>(k - s)];
                    bpts.row(k) = alf * bpts.row(k) + (1.0 - alf) * bpts.row(k - 1);
                }
                next_bpts.row(save) = bpts.row(p);
            }
        }
        for (int i = lbz; i <= ph; ++i) {
            ebpts.row(i).setZero();
            const int mpi = std::min(p, i);
            for (int j = std::max(0, i - t_elev); j <= mpi; ++j) {
                ebpts.row(i) += bezalfs(i, j) * bpts.row(j);
            }
        }
        if (oldr > 1) {
            // Remove the knot ua oldr - 1 times from the elevated data.
            int first = kind - 2;
            int last = kind;
            const double den = ub - ua;
            const double bet = (ub - Uh[static_cast<std::size_t>(kind - 1)]) / den;
            for (int tr = 1; tr < oldr; ++tr) {
                int i = first;
                int j = last;
                int kj = j - kind + 1;
                while (j - i > tr) {
                    if (i < cind) {
                        const double alf = (ub - Uh[static_cast<std::size_t>(i)]) /
                                           (ua - Uh[static_cast<std::size_t>(i)]);
                        Q.row(i) = alf * Q.row(i) + (1.0 - alf) * Q.row(i - 1);
                    }
                    if (j >= lbz) {
                        if (j - tr <= kind - ph + oldr) {
                            const double gam = (ub - Uh[static_cast<std::size_t>(j - tr)]) / den;
                            ebpts.row(kj) = gam * ebpts.row(kj) + (1.0 - gam) * ebpts.row(kj + 1);
                        } else {
                            ebpts.row(kj) = bet * ebpts.row(kj) + (1.0 - bet) * ebpts.row(kj + 1);
                        }
                    }
                    ++i;
                    --j;
                    --kj;
                }
                --first;
                ++last;
            }
        }
        if (a != p) {
            for (int i = 0; i < ph - oldr; ++i) {
                Uh[static_cast<std::size_t>(kind)] = ua;
                ++kind;
            }
        }
        for (int j = lbz; j <= rbz; ++j) {
            Q.row(cind) = ebpts.row(j);
            ++cind;
        }
        if (b < m) {
            for (int j = 0; j < r; ++j) {
                bpts.row(j) = next_bpts.row(j);
            }
            for (int j = r; j <= p; ++j) {
                bpts.row(j) = control.row(b - p + j);
            }
            a = b;
            ++b;
            ua = ub;
        } else {
            for (int i = 0; i <= ph; ++i) {
                Uh[static_cast<std::size_t>(kind + i)] = ub;
            }
        }
    }

    const int nh = mh - ph - 1;  // highest elevated control index
    std::vector<double> knots(Uh.begin(), Uh.begin() + (nh + ph + 2));
    Eigen::MatrixXd out = Q.topRows(nh + 1);
    return RefinedBasis{KnotVector(std::move(knots), ph), std::move(out)};
}

namespace {

Eigen::MatrixXd curve_to_rows(const CurveGeometry& curve) {
    const int n = curve.num_points();
    const bool rational = curve.rational();
    Eigen::MatrixXd rows(n, rational ? 3 : 2);
    for (int j = 0; j < n; ++j) {
        const Eigen::Vector2d& cp = curve.control_points()[static_cast<std::size_t>(j)];
        if (rational) {
            const double w = curve.weights()[static_cast<std::size_t>(j)];
            rows.row(j) << w * cp.x(), w * cp.y(), w;
        } else {
            rows.row(j) << cp.x(), cp.y();
        }
    }
    return rows;
}

CurveGeometry rows_to_curve(const RefinedBasis& rb, bool rational, bool closed) {
    const int n = static_cast<int>(rb.control.rows());
    std::vector<Eigen::Vector2d> points(static_cast<std::size_t>(n));
    std::vector<double> weights;
    if (rational) {
        weights.resize(static_cast<std::size_t>(n));
    }
    for (int j = 0; j < n; ++j) {
        if (rational) {
            const double w = rb.control(j, 2);
            points[static_cast<std::size_t>(j)] = rb.control.row(j).head<2>().transpose() / w;
            weights[static_cast<std::size_t>(j)] = w;
        } else {
            points[static_cast<std::size_t>(j)] = rb.control.row(j).transpose();
        }
    }
    return CurveGeometry(rb.kv, std::move(points), std::move(weights), closed);
}

}  // namespace

CurveGeometry insert_knot(const CurveGeometry& curve, double t) {
    const RefinedBasis rb = insert_knot(curve.knot_vector(), curve_to_rows(curve), t);
    return rows_to_curve(rb, curve.rational(), curve.closed());
}

CurveGeometry elevate_degree(const CurveGeometry& curve) {
    const RefinedBasis rb = elevate_degree(curve.knot_vector(), curve_to_rows(curve));
    return rows_to_curve(rb, curve.rational(), curve.closed());
}

}  // namespace sbiga
