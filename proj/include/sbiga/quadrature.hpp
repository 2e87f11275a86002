#pragma once

#include <vector>

#include "sbiga/splines.hpp"

namespace sbiga {

/// Gauss-Legendre nodes and weights on the reference interval [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order (number of points), exact for
/// polynomials of degree 2*order - 1. Supported orders: 1..16.
GaussRule gauss_rule(int order);

/// A Gauss rule mapped affinely onto every non-empty span of a knot vector.
/// All nodes are strictly interior to their span, so span endpoints (in
/// particular the singular point xi = 0 of a scaled-boundary map) are never
/// evaluated.
class QuadratureRule {
public:
    struct Span {
        double a = 0.0;
        double b = 0.0;
        std::vector<double> nodes;    ///< in (a, b)
        std::vector<double> weights;  ///< sum to b - a
    };

    QuadratureRule(const KnotVector& kv, int order);

    int order() const { return order_; }
    const std::vector<Span>& spans() const { return spans_; }
    std::size_t total_points() const;

private:
    int order_;
    std::vector<Span> spans_;
};

/// Convenience alias for the constructor.
QuadratureRule span_rule(const KnotVector& kv, int order);

/// One-point (midpoint) rule applied to the first-element kernel
/// integral(0..h) (1/xi - 2/h + xi/h^2) dxi, whose exact value diverges
/// while the quadrature evaluation equals 1/2 for every h > 0. Exposed as a
/// self-test of the singular-element mechanism.
double singular_element_check(double h);

}  // namespace sbiga
