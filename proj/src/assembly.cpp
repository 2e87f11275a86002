#include "sbiga/assembly.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <thread>

#include "sbiga/errors.hpp"

namespace sbiga {

DofMap build_dofmap(const GeometryMap& map, bool periodic, bool merge_center,
                    const std::set<Side>& dirichlet_sides) {
    if (periodic && !map.circ_closed()) {
        throw StructureError("periodic identification requires a closed boundary curve");
    }
    if (periodic && (dirichlet_sides.count(Side::EtaMin) || dirichlet_sides.count(Side::EtaMax))) {
        throw StructureError("periodic identification conflicts with eta-side Dirichlet data");
    }
    if (merge_center && !map.structure().is_scaled_boundary) {
        throw StructureError("center merge requires a scaled-boundary map");
    }

    DofMap dm;
    const int m = map.num_radial();
    const int n = map.num_circ();
    dm.m_ = m;
    dm.n_ = n;
    dm.periodic_ = periodic;
    dm.merge_center_ = merge_center;
    dm.sides_ = dirichlet_sides;
    dm.classes_.assign(static_cast<std::size_t>(m) * n, DofClass::Interior);
    dm.ids_.assign(static_cast<std::size_t>(m) * n, -1);
    dm.fixed_slots_.assign(static_cast<std::size_t>(m) * n, -1);

    const auto on_fixed_side = [&](int i, int j) {
        if (dirichlet_sides.count(Side::XiMin) && i == 0) return true;
        if (dirichlet_sides.count(Side::XiMax) && i == m - 1) return true;
        if (dirichlet_sides.count(Side::EtaMin) && j == 0) return true;
        if (dirichlet_sides.count(Side::EtaMax) && j == n - 1) return true;
        return false;
    };

    const int n_canon = periodic ? n - 1 : n;
    int center_id = -1;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n_canon; ++j) {
            const std::size_t idx = dm.index(i, j);
            if (on_fixed_side(i, j)) {
                dm.classes_[idx] = DofClass::BoundaryFixed;
                dm.fixed_slots_[idx] = dm.num_fixed_++;
            } else if (merge_center && i == 0) {
                dm.classes_[idx] = DofClass::CenterMerged;
                if (center_id < 0) {
                    center_id = dm.num_unknowns_++;
                }
                dm.ids_[idx] = center_id;
            } else {
                dm.ids_[idx] = dm.num_unknowns_++;
            }
        }
    }
    if (periodic) {
        for (int i = 0; i < m; ++i) {
            const std::size_t idx = dm.index(i, n - 1);
            const std::size_t canon = dm.index(i, 0);
            dm.classes_[idx] = DofClass::PeriodicSecondary;
            dm.ids_[idx] = dm.ids_[canon];
            dm.fixed_slots_[idx] = dm.fixed_slots_[canon];
        }
    }
    return dm;
}

namespace {

CurveGeometry edge_curve(const GeometryMap& map, Side side) {
    const int m = map.num_radial();
    const int n = map.num_circ();
    const bool circ_edge = (side == Side::XiMin || side == Side::XiMax);
    const int count = circ_edge ? n : m;
    const int fixed = (side == Side::XiMin) ? 0 : (side == Side::XiMax) ? m - 1
                      : (side == Side::EtaMin) ? 0 : n - 1;

    std::vector<Eigen::Vector2d> pts(static_cast<std::size_t>(count));
    std::vector<double> weights;
    if (map.rational()) {
        weights.resize(static_cast<std::size_t>(count));
    }
    for (int k = 0; k < count; ++k) {
        const int i = circ_edge ? fixed : k;
        const int j = circ_edge ? k : fixed;
        pts[static_cast<std::size_t>(k)] = map.control_point(i, j);
        if (map.rational()) {
            weights[static_cast<std::size_t>(k)] = map.weights()(i, j);
        }
    }
    const KnotVector& kv = circ_edge ? map.circ_kv() : map.radial_kv();
    return CurveGeometry(kv, std::move(pts), std::move(weights), false);
}

Eigen::VectorXd collocate_edge(const CurveGeometry& edge,
                               const std::function<double(double, const Eigen::Vector2d&)>& data) {
    const KnotVector& kv = edge.knot_vector();
    const int n = kv.num_basis();
    const std::vector<double> greville = kv.greville();

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd values(n);
    for (int k = 0; k < n; ++k) {
        const double t = greville[static_cast<std::size_t>(k)];
        const BasisEval basis = edge.rational()
                                    ? eval_rational_basis(kv, edge.weights(), t)
                                    : eval_basis(kv, t);
        for (std::size_t a = 0; a < basis.values.size(); ++a) {
            B(k, basis.first_index + static_cast<int>(a)) = basis.values[a];
        }
        values(k) = data(t, eval_curve(edge, t).point);
    }
    return B.partialPivLu().solve(values);
}

}  // namespace

Eigen::VectorXd interpolate_edge_coefficients(const GeometryMap& map, Side side,
                                              const std::function<double(double, double)>& g) {
    return collocate_edge(edge_curve(map, side),
                          [&](double, const Eigen::Vector2d& x) { return g(x.x(), x.y()); });
}

Eigen::VectorXd interpolate_edge_parametric(const GeometryMap& map, Side side,
                                            const std::function<double(double)>& h) {
    return collocate_edge(edge_curve(map, side),
                          [&](double t, const Eigen::Vector2d&) { return h(t); });
}

Eigen::VectorXd apply_dirichlet(const GeometryMap& map, const DofMap& dofmap,
                                const std::function<double(double, double)>& g) {
    Eigen::VectorXd prescribed = Eigen::VectorXd::Zero(dofmap.num_fixed());
    const int m = map.num_radial();
    const int n = map.num_circ();
    for (Side side : dofmap.dirichlet_sides()) {
        const Eigen::VectorXd coeffs = interpolate_edge_coefficients(map, side, g);
        const bool circ_edge = (side == Side::XiMin || side == Side::XiMax);
        const int fixed = (side == Side::XiMin) ? 0 : (side == Side::XiMax) ? m - 1
                          : (side == Side::EtaMin) ? 0 : n - 1;
        for (int k = 0; k < coeffs.size(); ++k) {
            const int i = circ_edge ? fixed : k;
            const int j = circ_edge ? k : fixed;
            const int slot = dofmap.fixed_slot(i, j);
            if (slot >= 0) {
                prescribed(slot) = coeffs(k);
            }
        }
    }
    return prescribed;
}

namespace {

// Per-node basis values of one parametric direction, tabulated over the
// quadrature rule.
std::vector<std::vector<BasisEval>> tabulate(const KnotVector& kv, const QuadratureRule& rule) {
    std::vector<std::vector<BasisEval>> table;
    table.reserve(rule.spans().size());
    for (const auto& span : rule.spans()) {
        std::vector<BasisEval> per_node;
        per_node.reserve(span.nodes.size());
        for (double t : span.nodes) {
            per_node.push_back(eval_basis(kv, t, 1));
        }
        table.push_back(std::move(per_node));
    }
    return table;
}

// Right-hand-side contributions are collected as (row, value) pairs and
// folded in traversal order afterwards, so chunked runs reproduce the
// serial accumulation order bit for bit.
struct Scatter {
    const DofMap& dm;
    const Eigen::VectorXd& prescribed;
    std::vector<Eigen::Triplet<double>>& triplets;
    std::vector<std::pair<int, double>>& rhs_contribs;

    void add(int ti, int tj, int si, int sj, double value) {
        const int row = dm.id(ti, tj);
        if (row < 0) {
            return;
        }
        const int col = dm.id(si, sj);
        if (col < 0) {
            rhs_contribs.emplace_back(row, -value * prescribed(dm.fixed_slot(si, sj)));
        } else {
            triplets.emplace_back(row, col, value);
        }
    }

    void add_rhs(int ti, int tj, double value) {
        const int row = dm.id(ti, tj);
        if (row >= 0) {
            rhs_contribs.emplace_back(row, value);
        }
    }
};

void fold_rhs(const std::vector<std::pair<int, double>>& contribs, Eigen::VectorXd& rhs) {
    for (const auto& [row, value] : contribs) {
        rhs(row) += value;
    }
}

void check_sample(double det, const Eigen::Vector2d& point) {
    if (!std::isfinite(det) || !point.allFinite()) {
        throw AssemblyError("non-finite integrand sample at a quadrature node");
    }
    if (det <= 0.0) {
        throw RegularityError("non-positive Jacobian determinant at a quadrature node");
    }
}

void assemble_rhs_2d(const GeometryMap& map, const DofMap& dofmap,
                     const QuadratureRule& radial_rule, const QuadratureRule& circ_rule,
                     const SourceField& f, Eigen::VectorXd& rhs, AssemblyStats* stats) {
    const auto rad_tab = tabulate(map.radial_kv(), radial_rule);
    const auto circ_tab = tabulate(map.circ_kv(), circ_rule);
    std::vector<Eigen::Triplet<double>> unused;
    std::vector<std::pair<int, double>> contribs;
    Eigen::VectorXd no_prescribed;
    Scatter scatter{dofmap, no_prescribed, unused, contribs};

    for (std::size_t rs = 0; rs < rad_tab.size(); ++rs) {
        const auto& rspan = radial_rule.spans()[rs];
        for (std::size_t cs = 0; cs < circ_tab.size(); ++cs) {
            const auto& cspan = circ_rule.spans()[cs];
            for (std::size_t gr = 0; gr < rspan.nodes.size(); ++gr) {
                for (std::size_t gc = 0; gc < cspan.nodes.size(); ++gc) {
                    const LocalShape shape = local_shape(map, rad_tab[rs][gr], circ_tab[cs][gc]);
                    const GeometryMap::Jet jet = jet_from_shape(map, shape);
                    const double det = jet.jacobian.determinant();
                    check_sample(det, jet.point);
                    const double weight =
                        std::abs(det) * rspan.weights[gr] * cspan.weights[gc];
                    const double fval = f.f(jet.point.x(), jet.point.y());
                    if (!std::isfinite(fval)) {
                        throw AssemblyError("non-finite source sample");
                    }
                    if (stats) {
                        ++stats->rhs_evals_2d;
                    }
                    for (int a = 0; a < shape.val.rows(); ++a) {
                        for (int b = 0; b < shape.val.cols(); ++b) {
                            scatter.add_rhs(shape.rad_first + a, shape.circ_first + b,
                                            fval * shape.val(a, b) * weight);
                        }
                    }
                }
            }
        }
    }
    fold_rhs(contribs, rhs);
}

}  // namespace

LinearSystem assemble_standard(const GeometryMap& map, const DofMap& dofmap,
                               const QuadratureRule& radial_rule, const QuadratureRule& circ_rule,
                               const SourceField& f, const Eigen::VectorXd& prescribed,
                               AssemblyStats* stats, int threads) {
    if (prescribed.size() != dofmap.num_fixed()) {
        throw DomainError("prescribed-value vector does not match the DofMap");
    }
    const auto rad_tab = tabulate(map.radial_kv(), radial_rule);
    const auto circ_tab = tabulate(map.circ_kv(), circ_rule);

    struct Element {
        std::size_t rs;
        std::size_t cs;
    };
    std::vector<Element> elements;
    for (std::size_t rs = 0; rs < rad_tab.size(); ++rs) {
        for (std::size_t cs = 0; cs < circ_tab.size(); ++cs) {
            elements.push_back({rs, cs});
        }
    }

    const int K = dofmap.num_unknowns();
    const int chunk_count = std::max(1, std::min<int>(threads, static_cast<int>(elements.size())));
    std::vector<std::vector<Eigen::Triplet<double>>> chunk_triplets(chunk_count);
    std::vector<std::vector<std::pair<int, double>>> chunk_rhs(chunk_count);
    std::vector<AssemblyStats> chunk_stats(chunk_count);

    const auto run_chunk = [&](int c) {
        const std::size_t begin = elements.size() * c / chunk_count;
        const std::size_t end = elements.size() * (c + 1) / chunk_count;
        Scatter scatter{dofmap, prescribed, chunk_triplets[c], chunk_rhs[c]};
        AssemblyStats& st = chunk_stats[c];

        for (std::size_t e = begin; e < end; ++e) {
            const auto& rspan = radial_rule.spans()[elements[e].rs];
            const auto& cspan = circ_rule.spans()[elements[e].cs];
            const auto& rnodes = rad_tab[elements[e].rs];
            const auto& cnodes = circ_tab[elements[e].cs];
            const int nr = static_cast<int>(rnodes.front().values.size());
            const int nc = static_cast<int>(cnodes.front().values.size());
            const int nloc = nr * nc;
            Eigen::MatrixXd ke = Eigen::MatrixXd::Zero(nloc, nloc);
            Eigen::VectorXd re = Eigen::VectorXd::Zero(nloc);
            int rad_first = 0;
            int circ_first = 0;

            for (std::size_t gr = 0; gr < rspan.nodes.size(); ++gr) {
                for (std::size_t gc = 0; gc < cspan.nodes.size(); ++gc) {
                    const LocalShape shape = local_shape(map, rnodes[gr], cnodes[gc]);
                    rad_first = shape.rad_first;
                    circ_first = shape.circ_first;
                    const GeometryMap::Jet jet = jet_from_shape(map, shape);
                    const double det = jet.jacobian.determinant();
                    check_sample(det, jet.point);
                    const double weight =
                        std::abs(det) * rspan.weights[gr] * cspan.weights[gc];
                    const Eigen::Matrix2d inv = jet.jacobian.inverse();
                    const Eigen::Matrix2d G = inv * inv.transpose();
                    ++st.stiffness_evals_2d;

                    Eigen::MatrixXd grads(2, nloc);
                    for (int a = 0; a < nr; ++a) {
                        for (int b = 0; b < nc; ++b) {
                            grads(0, a * nc + b) = shape.dxi(a, b);
                            grads(1, a * nc + b) = shape.deta(a, b);
                        }
                    }
                    ke.noalias() += weight * grads.transpose() * G * grads;

                    const double fval = f.f(jet.point.x(), jet.point.y());
                    if (!std::isfinite(fval)) {
                        throw AssemblyError("non-finite source sample");
                    }
                    ++st.rhs_evals_2d;
                    for (int a = 0; a < nr; ++a) {
                        for (int b = 0; b < nc; ++b) {
                            re(a * nc + b) += fval * shape.val(a, b) * weight;
                        }
                    }
                }
            }

            for (int a = 0; a < nloc; ++a) {
                const int ti = rad_first + a / nc;
                const int tj = circ_first + a % nc;
                scatter.add_rhs(ti, tj, re(a));
                for (int b = 0; b < nloc; ++b) {
                    scatter.add(ti, tj, rad_first + b / nc, circ_first + b % nc, ke(a, b));
                }
            }
        }
    };

    if (chunk_count == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(chunk_count));
        for (int c = 0; c < chunk_count; ++c) {
            workers.emplace_back(run_chunk, c);
        }
        for (auto& w : workers) {
            w.join();
        }
    }

    // Deterministic merge in chunk order; with one chunk this is exactly the
    // serial traversal.
    std::vector<Eigen::Triplet<double>> triplets;
    std::size_t total = 0;
    for (const auto& tl : chunk_triplets) {
        total += tl.size();
    }
    triplets.reserve(total);
    LinearSystem system;
    system.rhs = Eigen::VectorXd::Zero(K);
    for (int c = 0; c < chunk_count; ++c) {
        triplets.insert(triplets.end(), chunk_triplets[c].begin(), chunk_triplets[c].end());
        fold_rhs(chunk_rhs[c], system.rhs);
        if (stats) {
            stats->stiffness_evals_2d += chunk_stats[c].stiffness_evals_2d;
            stats->rhs_evals_2d += chunk_stats[c].rhs_evals_2d;
        }
    }
    system.matrix.resize(K, K);
    system.matrix.setFromTriplets(triplets.begin(), triplets.end());
    system.prescribed = prescribed;
    return system;
}

LinearSystem assemble_separated(const GeometryMap& map, const DofMap& dofmap,
                                const QuadratureRule& radial_rule, const QuadratureRule& circ_rule,
                                const SourceField& f, const Eigen::VectorXd& prescribed,
                                AssemblyStats* stats) {
    if (!map.structure().has_straight_rays) {
        throw StructureError("separated assembly requires a straight-ray scaled-boundary map");
    }
    if (prescribed.size() != dofmap.num_fixed()) {
        throw DomainError("prescribed-value vector does not match the DofMap");
    }
    const int m = map.num_radial();
    const int n = map.num_circ();
    const int p = map.radial_kv().degree();
    const int q = map.circ_kv().degree();

    // Radial 1D kernels: R1 = int xi M' M', R2 = int M M', R4 = int M M / xi.
    Eigen::MatrixXd R1 = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd R2 = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd R4 = Eigen::MatrixXd::Zero(m, m);
    for (const auto& span : radial_rule.spans()) {
        for (std::size_t g = 0; g < span.nodes.size(); ++g) {
            const double xi = span.nodes[g];
            const double w = span.weights[g];
            const BasisEval basis = eval_basis(map.radial_kv(), xi, 1);
            if (stats) {
                ++stats->stiffness_evals_1d;
            }
            for (int a = 0; a <= p; ++a) {
                const int ja = basis.first_index + a;
                for (int b = 0; b <= p; ++b) {
                    const int jb = basis.first_index + b;
                    const double va = basis.values[static_cast<std::size_t>(a)];
                    const double vb = basis.values[static_cast<std::size_t>(b)];
                    const double da = basis.derivatives[0][static_cast<std::size_t>(a)];
                    const double db = basis.derivatives[0][static_cast<std::size_t>(b)];
                    R1(ja, jb) += w * xi * da * db;
                    R2(ja, jb) += w * va * db;
                    R4(ja, jb) += w * va * vb / xi;
                }
            }
        }
    }

    // Circumferential 1D kernels against the scaled-boundary factors:
    // C1 = int (b1.b1/J) N N, C2 = int (b1.b2/J) N' N, C4 = int (b2.b2/J) N' N'.
    const CurveGeometry boundary = map.boundary_curve();
    Eigen::MatrixXd C1 = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd C2 = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd C4 = Eigen::MatrixXd::Zero(n, n);
    for (const auto& span : circ_rule.spans()) {
        for (std::size_t g = 0; g < span.nodes.size(); ++g) {
            const double eta = span.nodes[g];
            const double w = span.weights[g];
            const SbKernel kernel = sb_kernel(map, eta);
            if (!(kernel.J > 0.0)) {
                throw RegularityError("non-positive J(eta) at a circumferential quadrature node");
            }
            const double k11 = kernel.b1.dot(kernel.b1) / kernel.J;
            const double k12 = kernel.b1.dot(kernel.b2) / kernel.J;
            const double k22 = kernel.b2.dot(kernel.b2) / kernel.J;
            const BasisEval basis = map.rational()
                                        ? eval_rational_basis(map.circ_kv(), boundary.weights(),
                                                              eta, 1)
                                        : eval_basis(map.circ_kv(), eta, 1);
            if (stats) {
                ++stats->stiffness_evals_1d;
            }
            for (int a = 0; a <= q; ++a) {
                const int ia = basis.first_index + a;
                for (int b = 0; b <= q; ++b) {
                    const int ib = basis.first_index + b;
                    const double va = basis.values[static_cast<std::size_t>(a)];
                    const double vb = basis.values[static_cast<std::size_t>(b)];
                    const double da = basis.derivatives[0][static_cast<std::size_t>(a)];
                    const double db = basis.derivatives[0][static_cast<std::size_t>(b)];
                    C1(ia, ib) += w * k11 * va * vb;
                    C2(ia, ib) += w * k12 * da * vb;
                    C4(ia, ib) += w * k22 * da * db;
                }
            }
        }
    }

    const int K = dofmap.num_unknowns();
    LinearSystem system;
    system.rhs = Eigen::VectorXd::Zero(K);
    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<std::pair<int, double>> contribs;
    Scatter scatter{dofmap, prescribed, triplets, contribs};

    // Each entry is the four-term sum of radial x circumferential products.
    for (int jr = 0; jr < m; ++jr) {
        const int lr_lo = std::max(0, jr - p);
        const int lr_hi = std::min(m - 1, jr + p);
        for (int lr = lr_lo; lr <= lr_hi; ++lr) {
            for (int ic = 0; ic < n; ++ic) {
                const int kc_lo = std::max(0, ic - q);
                const int kc_hi = std::min(n - 1, ic + q);
                for (int kc = kc_lo; kc <= kc_hi; ++kc) {
                    const double value = R1(jr, lr) * C1(ic, kc) + R2(jr, lr) * C2(ic, kc) +
                                         R2(lr, jr) * C2(kc, ic) + R4(jr, lr) * C4(ic, kc);
                    scatter.add(jr, ic, lr, kc, value);
                }
            }
        }
    }

    fold_rhs(contribs, system.rhs);
    assemble_rhs_2d(map, dofmap, radial_rule, circ_rule, f, system.rhs, stats);

    system.matrix.resize(K, K);
    system.matrix.setFromTriplets(triplets.begin(), triplets.end());
    system.prescribed = prescribed;
    return system;
}

}  // namespace sbiga
