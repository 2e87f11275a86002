#include "sbiga/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "sbiga/errors.hpp"

namespace sbiga {

GaussRule gauss_rule(int order) {
    if (order < 1 || order > 16) {
        throw DomainError("unsupported Gauss rule order " + std::to_string(order));
    }
    GaussRule rule;
    rule.nodes.assign(static_cast<std::size_t>(order), 0.0);
    rule.weights.assign(static_cast<std::size_t>(order), 0.0);

    // Newton iteration on the Legendre polynomial; roots converge from the
    // Chebyshev-like initial guess in a handful of steps.
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(order - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(order - 1 - i)] = w;
    }
    if (order % 2 == 1) {
        rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
    }
    return rule;
}

QuadratureRule::QuadratureRule(const KnotVector& kv, int order) : order_(order) {
    if (order < 1) {
        throw DomainError("quadrature order must be at least 1");
    }
    const GaussRule ref = gauss_rule(order);
    const std::vector<double> breaks = kv.breakpoints();
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        Span span;
        span.a = breaks[s];
        span.b = breaks[s + 1];
        const double mid = 0.5 * (span.a + span.b);
        const double scale = 0.5 * (span.b - span.a);
        span.nodes.reserve(ref.nodes.size());
        span.weights.reserve(ref.nodes.size());
        for (std::size_t g = 0; g < ref.nodes.size(); ++g) {
            span.nodes.push_back(mid + scale * ref.nodes[g]);
            span.weights.push_back(scale * ref.weights[g]);
        }
        spans_.push_back(std::move(span));
    }
}

std::size_t QuadratureRule::total_points() const {
    std::size_t total = 0;
    for (const auto& span : spans_) {
        total += span.nodes.size();
    }
    return total;
}

QuadratureRule span_rule(const KnotVector& kv, int order) { return QuadratureRule(kv, order); }

double singular_element_check(double h) {
    if (!(h > 0.0)) {
        throw DomainError("element size must be positive");
    }
    const double mid = 0.5 * h;
    // xi/h^2 evaluated as (xi/h)/h so the exact cancellation against 2/h
    // survives in floating point for every h.
    const double integrand = 1.0 / mid - 2.0 / h + (mid / h) / h;
    return h * integrand;
}

}  // namespace sbiga
