#pragma once

// Quantities describing the family Q_L as L -> 0: the diagnostic fields
// X_L, Y_L, Z_L, the remainder R_L of the rewritten Euler-Lagrange equation,
// the first-order corrector Q_L ~ Q_* + L (A + B), the linearized harmonic-map
// operator, the projection-equation residual, and log-log rate fits.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "ldg/bulk.hpp"
#include "ldg/error.hpp"
#include "ldg/field.hpp"
#include "ldg/manifold.hpp"
#include "ldg/parallel.hpp"
#include "ldg/params.hpp"
#include "ldg/solver.hpp"

namespace ldg {

namespace detail {

template <class Fn>
void for_interior(const GridSpec& g, int min_layer, Fn&& fn) {
  const auto nodes = g.interior_nodes(min_layer);
  parallel_for(nodes.size(), [&](std::size_t t) { fn(nodes[t]); });
}

inline ManifoldPoint base_point(const QTensor& q, const LimitManifold& m) {
  return make_point(m, eig3(q.sym()).vector(0));
}

inline void require_on_manifold(const TensorField& f, double s, const char* what) {
  const double r = max_poly_min_residual(f, s, false);
  if (r > 1e-8 * std::max(1.0, s * s)) {
    std::ostringstream os;
    os << what << " is not S_*-valued (poly_min residual " << r << ")";
    throw Error(ErrorCode::NotOnManifold, os.str());
  }
}

inline Mat3 sym_mat(const QTensor& q) { return q.sym().to_mat(); }

}  // namespace detail

// ---- X, Y, Z and the remainder ----------------------------------------------

struct DiagnosticFields {
  SymField x;     // poly_min(Q_L) / L
  ScalarField y;  // tr X + (6 / (6a^2 + b^2 s)) |grad Q_L|^2
  MatrixField z;
  MatrixField r;  // c^2 Y Q + (b^2/3) Y I - b^2 Z
};

/// Diagnostic fields at interior nodes (boundary entries are zero).
/// Gradient squares use the edge form of sum_alpha (grad_alpha Q)^2.
inline DiagnosticFields compute_xyz(const TensorField& q, const MaterialParams& p) {
  const GridSpec& g = q.grid();
  const double s = p.s_plus(), L = p.L();
  const double d = p.corrector_denominator();
  const Mat3 id = Mat3::identity();
  DiagnosticFields out{SymField(g), ScalarField(g, 0.0), MatrixField(g), MatrixField(g)};
  detail::for_interior(g, 1, [&](const Node& n) {
    const SymMatrix& qn = q(n).sym();
    const SymMatrix sigma = grad_square_at(q, n);
    const double g2 = sigma.trace();
    const SymMatrix x = (1.0 / L) * poly_min(qn, s);
    const double y = x.trace() + (6.0 / d) * g2;
    const Mat3 qm = qn.to_mat();
    const Mat3 brace = (-6.0 * s * s / d) * g2 * (p.c2() * qm + (p.b2() / 3.0) * id) +
                       4.0 * ((qm - (s / 6.0) * id) * sigma.to_mat());
    const Mat3 z = x.to_mat() - (1.0 / (p.b2() * s * s)) * brace;
    out.x(n) = x;
    out.y(n) = y;
    out.z(n) = z;
    out.r(n) = p.c2() * y * qm + (p.b2() / 3.0) * y * id - p.b2() * z;
  });
  return out;
}

/// R_L on its own.
inline MatrixField remainder_field(const TensorField& q, const MaterialParams& p) { return compute_xyz(q, p).r; }

/// || lap Q - (-(4/s^2)(Q - s/6) Sigma) - R || at interior nodes.
inline ScalarField remainder_identity_residual(const TensorField& q, const MaterialParams& p) {
  const GridSpec& g = q.grid();
  const LimitManifold m(p);
  const MatrixField r = remainder_field(q, p);
  ScalarField out(g, 0.0);
  detail::for_interior(g, 1, [&](const Node& n) {
    const Mat3 rhs = harmonic_rhs_raw(q(n).sym(), grad_square_at(q, n), m, HarmonicForm::iv);
    out(n) = frob_norm(detail::sym_mat(laplacian_at(q, n)) - rhs - r(n));
  });
  return out;
}

// ---- corrector ----------------------------------------------------------------

/// Normal corrector
/// A = -(2/(b^2 s^2)) [ (6/(6a^2+b^2 s)) |grad Q_*|^2 (c^2 Q_* + b^2/3 I)(Q_* - s/6 I) - Sigma ]
/// at interior nodes.
inline TensorField corrector_a(const TensorField& q_star, const MaterialParams& p) {
  const double s = p.s_plus();
  detail::require_on_manifold(q_star, s, "Q_*");
  const GridSpec& g = q_star.grid();
  const double d = p.corrector_denominator();
  const SymMatrix id = SymMatrix::identity();
  TensorField out(g);
  detail::for_interior(g, 1, [&](const Node& n) {
    const SymMatrix& qs = q_star(n).sym();
    const SymMatrix sigma = grad_square_at(q_star, n);
    const Mat3 prod = (p.c2() * qs + (p.b2() / 3.0) * id).to_mat() * (qs - (s / 6.0) * id).to_mat();
    const Mat3 bracket = (6.0 / d) * sigma.trace() * prod - sigma.to_mat();
    out(n) = QTensor::from((-2.0 / (p.b2() * s * s)) * bracket);
  });
  return out;
}

/// Coefficient k of the bracket in corrector_a on the hedgehog s(x x^T/r^2 - I/3):
/// bracket = (k/r^2)(x x^T/r^2 - I/3) with k = (3/2) s^2 (4s(2c^2 s + b^2)/(6a^2+b^2 s) - 2).
inline double hedgehog_bracket_coefficient(const MaterialParams& p) {
  const double s = p.s_plus();
  return 1.5 * s * s * (4.0 * s * (2.0 * p.c2() * s + p.b2()) / p.corrector_denominator() - 2.0);
}

/// corrector_a on the hedgehog equals (k/r^2)(x x^T/r^2 - I/3) with this k
/// (the bracket coefficient times -2/(b^2 s^2); -18/5 at a^2 = b^2 = c^2 = 1).
inline double hedgehog_corrector_coefficient(const MaterialParams& p) {
  const double s = p.s_plus();
  return -2.0 / (p.b2() * s * s) * hedgehog_bracket_coefficient(p);
}

struct CorrectorFields {
  TensorField a_field;     // corrector_a(Q_*)
  TensorField b_field;     // tangential part of qdot at Q_*
  TensorField qdot_field;  // (Q_L - Q_*) / L
  TensorField a_emp;       // normal part of qdot at Q_*
};

/// Splits the empirical corrector (Q_L - Q_*)/L at every node into parts
/// tangent and normal to S_* at Q_*.
inline CorrectorFields split_corrector(const TensorField& q_l, const TensorField& q_star, const MaterialParams& p) {
  require_same_grid(q_l, q_star);
  const LimitManifold m(p);
  const GridSpec& g = q_star.grid();
  CorrectorFields out{corrector_a(q_star, p), TensorField(g), TensorField(g), TensorField(g)};
  const double inv_l = 1.0 / p.L();
  parallel_for(g.node_count(), [&](std::size_t idx) {
    const QTensor qdot = inv_l * (q_l[idx] - q_star[idx]);
    const auto split = split_tangent_normal(qdot.sym(), detail::base_point(q_star[idx], m), m);
    out.qdot_field[idx] = qdot;
    out.b_field[idx] = split.tangential;
    out.a_emp[idx] = QTensor(split.normal);
  });
  return out;
}

/// Pointwise residual of the tangential corrector equation
/// lap B = [-b^2 (BA + AB) - (6c^2/(6a^2+b^2 s)) |grad Q_*|^2 B]
///         - (4/s^2) sum_alpha [(grad_alpha B)^par grad_alpha Q_* + grad_alpha Q_* (grad_alpha B)^par](Q_* - s/6 I)
///         - (lap A)^par,
/// evaluated at nodes two or more layers inside (zero elsewhere).
inline ScalarField corrector_b_residual(const TensorField& q_star, const TensorField& a, const TensorField& b,
                                        const MaterialParams& p) {
  require_same_grid(q_star, a);
  require_same_grid(q_star, b);
  const LimitManifold m(p);
  const double s = m.s;
  const double d = p.corrector_denominator();
  const GridSpec& g = q_star.grid();
  const Mat3 id = Mat3::identity();
  ScalarField out(g, 0.0);
  detail::for_interior(g, 2, [&](const Node& n) {
    const ManifoldPoint base = detail::base_point(q_star(n), m);
    const Mat3 am = detail::sym_mat(a(n)), bm = detail::sym_mat(b(n));
    const double g2 = grad_square_at(q_star, n).trace();
    const Mat3 zeroth = -p.b2() * (bm * am + am * bm) - (6.0 * p.c2() / d) * g2 * bm;
    const auto gq = gradient(q_star, n);
    const auto gb = gradient(b, n);
    Mat3 mixed;
    for (int k = 0; k < 3; ++k) {
      const Mat3 gbt = detail::sym_mat(tangential_part(gb[k].sym(), base, m));
      const Mat3 gqk = detail::sym_mat(gq[k]);
      mixed += gbt * gqk + gqk * gbt;
    }
    const Mat3 first = (-4.0 / (s * s)) * (mixed * (detail::sym_mat(q_star(n)) - (s / 6.0) * id));
    const Mat3 lap_a_par = detail::sym_mat(tangential_part(laplacian_at(a, n).sym(), base, m));
    out(n) = frob_norm(detail::sym_mat(laplacian_at(b, n)) - zeroth - first + lap_a_par);
  });
  return out;
}

// ---- linearized operator --------------------------------------------------------

/// F(Q) = lap Q + (4/s^2)(Q - s/6 I) Sigma(Q), the harmonic-map residual map.
inline MatrixField harmonic_map_residual(const TensorField& q, const MaterialParams& p) {
  const double s = p.s_plus();
  const GridSpec& g = q.grid();
  const Mat3 id = Mat3::identity();
  MatrixField out(g);
  detail::for_interior(g, 1, [&](const Node& n) {
    out(n) = detail::sym_mat(laplacian_at(q, n)) +
             (4.0 / (s * s)) * ((detail::sym_mat(q(n)) - (s / 6.0) * id) * grad_square_at(q, n).to_mat());
  });
  return out;
}

/// L_{Q_*} Psi = lap Psi + (4/s^2)(Q_* - s/6 I) sum_alpha (grad Q_* grad Psi + grad Psi grad Q_*)
///             + (4/s^2) Psi Sigma(Q_*),
/// with the edge form of the gradient products, so that it is the exact
/// derivative of harmonic_map_residual. Psi must vanish on the boundary.
inline MatrixField linearized_apply(const TensorField& q_star, const TensorField& psi, const MaterialParams& p) {
  require_same_grid(q_star, psi);
  const GridSpec& g = q_star.grid();
  for (std::size_t idx = 0; idx < psi.size(); ++idx)
    if (g.is_boundary(g.node(idx)) && frob_norm(psi[idx]) != 0.0)
      throw Error(ErrorCode::InvalidArgument, "psi must vanish on the boundary");
  const double s = p.s_plus();
  const Mat3 id = Mat3::identity();
  MatrixField out(g);
  detail::for_interior(g, 1, [&](const Node& n) {
    const Mat3 cross_terms = grad_product_at(q_star, psi, n) + grad_product_at(psi, q_star, n);
    out(n) = detail::sym_mat(laplacian_at(psi, n)) +
             (4.0 / (s * s)) * ((detail::sym_mat(q_star(n)) - (s / 6.0) * id) * cross_terms) +
             (4.0 / (s * s)) * (detail::sym_mat(psi(n)) * grad_square_at(q_star, n).to_mat());
  });
  return out;
}

/// Smallest singular value of the discrete L_{Q_*} acting on S_0-valued fields
/// vanishing on the boundary (orthonormal S_0 basis per node, Frobenius
/// norm on the output). Dense; meant for coarse grids.
inline double linearized_min_singular_value(const TensorField& q_star, const MaterialParams& p) {
  const GridSpec& g = q_star.grid();
  const auto nodes = g.interior_nodes();
  const std::size_t cols = 5 * nodes.size(), rows = 9 * nodes.size();
  if (cols > 5000) throw Error(ErrorCode::InvalidArgument, "grid too large for a dense singular value");
  const double r2 = 1.0 / std::sqrt(2.0), r6 = 1.0 / std::sqrt(6.0);
  const std::array<QTensor, 5> basis{QTensor(SymMatrix{r2, -r2, 0, 0, 0, 0}),
                                     QTensor(SymMatrix{-r6, -r6, 2 * r6, 0, 0, 0}),
                                     QTensor(SymMatrix{0, 0, 0, r2, 0, 0}), QTensor(SymMatrix{0, 0, 0, 0, r2, 0}),
                                     QTensor(SymMatrix{0, 0, 0, 0, 0, r2})};
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  TensorField psi(g);
  for (std::size_t c = 0; c < nodes.size(); ++c) {
    for (int b = 0; b < 5; ++b) {
      psi(nodes[c]) = basis[b];
      const MatrixField col = linearized_apply(q_star, psi, p);
      for (std::size_t r = 0; r < nodes.size(); ++r)
        for (int e = 0; e < 9; ++e)
          mat(static_cast<Eigen::Index>(9 * r + e), static_cast<Eigen::Index>(5 * c + b)) = col(nodes[r]).a[e];
      psi(nodes[c]) = QTensor();
    }
  }
  const Eigen::MatrixXd gram = mat.transpose() * mat;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(eig.eigenvalues()(0), 0.0));
}

// ---- projection equation ----------------------------------------------------------

inline constexpr double kMaxConditionT = 1e8;

namespace detail {

/// (Q^sharp)^{-1} for Q^sharp = s (n n^T - I/3): (3/s)((3/2) n n^T - I).
inline SymMatrix manifold_inverse(const ManifoldPoint& pt, double s) {
  return (3.0 / s) * (1.5 * SymMatrix::outer(pt.director) - SymMatrix::identity());
}

struct ProjectionData {
  TensorField sharp;  // Q^sharp
  MatrixField k;      // (Q^sharp)^{-1} Q_L
};

inline ProjectionData projection_data(const TensorField& q, const LimitManifold& m) {
  const GridSpec& g = q.grid();
  ProjectionData out{TensorField(g), MatrixField(g)};
  parallel_for(g.node_count(), [&](std::size_t idx) {
    const ManifoldPoint pt = project_to_manifold(q[idx].sym(), m);
    out.sharp[idx] = pt.q;
    out.k[idx] = manifold_inverse(pt, m.s).to_mat() * q[idx].sym().to_mat();
  });
  return out;
}

/// Residual of the projection equation with coefficient w_coeff on the
/// (Q_L Sigma^sharp - Sigma^sharp Q_L) term of W.
inline ScalarField projection_residual_with(const TensorField& q, const MaterialParams& p, double beta,
                                            double w_coeff) {
  const LimitManifold m(p);
  const double s = m.s;
  const GridSpec& g = q.grid();
  const ProjectionData pd = projection_data(q, m);
  const Mat3 id = Mat3::identity();
  ScalarField out(g, 0.0);
  const auto nodes = g.interior_nodes();
  std::vector<double> conds(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t t) {
    const Node& n = nodes[t];
    const Mat3 sharp = sym_mat(pd.sharp(n));
    const Mat3 ql = sym_mat(q(n));
    const SymMatrix sigma = grad_square_at(pd.sharp, n);
    const Mat3 sig = sigma.to_mat();
    const Mat3 w = 2.0 * (grad_product_at(pd.sharp, pd.k, n) * sharp) -
                   2.0 * (sharp * grad_product_at(pd.k, pd.sharp, n)) - (w_coeff / s) * (ql * sig - sig * ql);
    const double tr_k = pd.k(n).trace();
    const SymMatrix t_mat = q(n).sym() - (2.0 / 9.0) * s * tr_k * SymMatrix::identity() +
                            beta * ((1.0 / s) * pd.sharp(n).sym() + (1.0 / 3.0) * SymMatrix::identity());
    const Vec3 ev = eigenvalues(t_mat);
    const double lo = std::min({std::abs(ev[0]), std::abs(ev[1]), std::abs(ev[2])});
    const double hi = std::max({std::abs(ev[0]), std::abs(ev[1]), std::abs(ev[2])});
    conds[t] = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(conds[t] <= kMaxConditionT)) {
      std::ostringstream os;
      os << "T at node (" << n.i << "," << n.j << "," << n.k << ") has condition estimate " << conds[t];
      throw Error(ErrorCode::IllConditionedT, os.str());
    }
    const Mat3 t_inv = inverse(t_mat).to_mat();
    const Mat3 proj = (1.0 / s) * sharp - (2.0 / 3.0) * id;
    const Mat3 y = harmonic_rhs_raw(pd.sharp(n).sym(), sigma, m, HarmonicForm::ii);
    const Mat3 correction = t_inv * proj * w - w * proj * t_inv;
    out(n) = frob_norm(sym_mat(laplacian_at(pd.sharp, n)) - y + correction);
  });
  return out;
}

}  // namespace detail

/// Residual of
/// lap Q^sharp = Y(Q^sharp) - [T^{-1} P W - W P T^{-1}],  P = Q^sharp/s - (2/3) I,
/// at interior nodes, where Q^sharp is the nearest-point projection of Q_L,
/// K = (Q^sharp)^{-1} Q_L,
/// W = 2 sum grad Q^sharp grad K Q^sharp - 2 Q^sharp sum grad K grad Q^sharp - (2/s)(Q_L Sigma^sharp - Sigma^sharp Q_L),
/// T = Q_L - (2/9) s tr(K) I + beta (Q^sharp/s + I/3).
inline ScalarField projection_residual(const TensorField& q, const MaterialParams& p, double beta) {
  if (beta == 0.0) throw Error(ErrorCode::InvalidArgument, "beta must be nonzero");
  return detail::projection_residual_with(q, p, beta, 2.0);
}

// ---- rate fits --------------------------------------------------------------------

struct RateFit {
  std::vector<double> ls;
  std::vector<double> errs;
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
};

/// Least-squares line through (log L, log err). Pairs with a non-positive or
/// non-finite error are dropped.
inline RateFit fit_rate(const std::vector<double>& ls, const std::vector<double>& errs) {
  if (ls.size() != errs.size()) throw Error(ErrorCode::InvalidArgument, "ls and errs differ in length");
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (!(ls[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "ladder values must be positive");
    if (i > 0 && !(ls[i] < ls[i - 1])) throw Error(ErrorCode::InvalidArgument, "ladder must be strictly decreasing");
  }
  RateFit fit;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (!(errs[i] > 0.0) || !std::isfinite(errs[i])) continue;
    fit.ls.push_back(ls[i]);
    fit.errs.push_back(errs[i]);
  }
  const std::size_t n = fit.ls.size();
  if (n < 3) throw Error(ErrorCode::DegenerateFit, "fewer than 3 usable ladder points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(fit.ls[i]);
    my += std::log(fit.errs[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(fit.ls[i]) - mx, dy = std::log(fit.errs[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::DegenerateFit, "zero variance in the fit data");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = sxy * sxy / (sxx * syy);
  return fit;
}

}  // namespace ldg
