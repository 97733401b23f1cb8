#pragma once

// Geometry of the limit manifold S_* = { s_+ (n n^T - I/3) : |n| = 1 } inside
// the space of symmetric traceless matrices.

#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "ldg/error.hpp"
#include "ldg/params.hpp"
#include "ldg/tensor.hpp"

namespace ldg {

/// The limit manifold is determined by s_+ alone. Implicit from MaterialParams so
/// that geometry calls accept either; constructing one directly allows
/// evaluating identities against a perturbed s_+.
struct LimitManifold {
  double s;

  LimitManifold(const MaterialParams& p) : s(p.s_plus()) {}  // NOLINT(google-explicit-constructor)
  explicit LimitManifold(double s_plus) : s(s_plus) {}

  /// Default eigen-gap for the nearest-point projection.
  double default_gap_tol() const { return 0.1 * s; }
};

/// A point of S_* together with its director.
struct ManifoldPoint {
  QTensor q;
  Vec3 director{1.0, 0.0, 0.0};
};

inline ManifoldPoint make_point(const LimitManifold& m, const Vec3& n) {
  const Vec3 u = normalized(n);
  return {QTensor::uniaxial(m.s, u), u};
}

/// Relative precondition tolerance for tangency and normality checks.
inline constexpr double kGeometryPreTol = 1e-8;

/// ||(s/3) x - (x Q + Q x)||: zero exactly when x is tangent at base.
inline double tangency_residual(const SymMatrix& x, const ManifoldPoint& base, const LimitManifold& m) {
  return frob_norm((m.s / 3.0) * x - anticommutator(x, base.q.sym()));
}

/// ||[z, Q]||: zero exactly when z is normal at base.
inline double normality_residual(const SymMatrix& z, const ManifoldPoint& base) {
  return frob_norm(commutator(z.to_mat(), base.q.sym().to_mat()));
}

/// Nearest point of S_* in the Frobenius metric: s_+ (n n^T - I/3) with n the
/// top eigenvector. Throws DegenerateSpectrum when the top eigen-gap is below
/// gap_tol (default 0.1 s_+), i.e. q is outside the tubular neighborhood.
inline ManifoldPoint project_to_manifold(const SymMatrix& q, const LimitManifold& m, double gap_tol = -1.0) {
  if (gap_tol < 0.0) gap_tol = m.default_gap_tol();
  const EigenDecomp e = eig3(q);
  const double gap = e.values[0] - e.values[1];
  if (!(gap >= gap_tol)) {
    std::ostringstream os;
    os << "top eigen-gap " << gap << " below " << gap_tol;
    throw Error(ErrorCode::DegenerateSpectrum, os.str());
  }
  return make_point(m, e.vector(0));
}

/// Decomposition a = tangential + normal relative to T_Q S_* and its
/// orthogonal complement in the symmetric matrices.
struct TangentNormalSplit {
  QTensor tangential;
  SymMatrix normal;
  ManifoldPoint base;
};

/// Normal part -(2/s^2) ((s/3) A - QA - AQ)(Q - (s/6) I). The left and right
/// factorisations agree exactly in real arithmetic; their mean is symmetric.
inline SymMatrix normal_part(const SymMatrix& a, const ManifoldPoint& base, const LimitManifold& m) {
  const double s = m.s;
  const Mat3 inner = ((s / 3.0) * a - anticommutator(base.q.sym(), a)).to_mat();
  const Mat3 shifted = (base.q.sym() - (s / 6.0) * SymMatrix::identity()).to_mat();
  const Mat3 both = inner * shifted + shifted * inner;
  return (-1.0 / (s * s)) * SymMatrix::sym_part(both);
}

inline TangentNormalSplit split_tangent_normal(const SymMatrix& a, const ManifoldPoint& base,
                                               const LimitManifold& m) {
  const SymMatrix normal = normal_part(a, base, m);
  return {QTensor(a - normal), normal, base};
}

/// Tangential part of a at base.
inline QTensor tangential_part(const SymMatrix& a, const ManifoldPoint& base, const LimitManifold& m) {
  return QTensor(a - normal_part(a, base, m));
}

namespace detail {
inline void require_tangent(const SymMatrix& x, const ManifoldPoint& base, const LimitManifold& m,
                            const char* what) {
  const double r = tangency_residual(x, base, m);
  if (r > kGeometryPreTol * std::max(1.0, frob_norm(x)) * std::max(1.0, m.s)) {
    std::ostringstream os;
    os << what << " is not tangent (residual " << r << ")";
    throw Error(ErrorCode::NotTangent, os.str());
  }
}
}  // namespace detail

/// II(X, Y)(Q) = -(1/s^2)(XY + YX)(2Q - (s/3) I).
inline QTensor second_fundamental_form(const SymMatrix& x, const SymMatrix& y, const ManifoldPoint& base,
                                       const LimitManifold& m) {
  detail::require_tangent(x, base, m, "x");
  detail::require_tangent(y, base, m, "y");
  const double s = m.s;
  const Mat3 shifted = (2.0 * base.q.sym() - (s / 3.0) * SymMatrix::identity()).to_mat();
  return QTensor::from((-1.0 / (s * s)) * (anticommutator(x, y).to_mat() * shifted));
}

enum class HarmonicForm { ii, iii, iv };

/// sum_alpha (grad_alpha Q)^2 for three directional derivatives.
inline SymMatrix gradient_square(const std::array<QTensor, 3>& grad) {
  return square(grad[0].sym()) + square(grad[1].sym()) + square(grad[2].sym());
}

/// Right-hand side of the harmonic-map equation given grad_sq = sum_alpha (grad_alpha Q)^2.
/// Returned unsymmetrised so forms can be compared as written.
inline Mat3 harmonic_rhs_raw(const SymMatrix& q, const SymMatrix& grad_sq, const LimitManifold& m,
                             HarmonicForm form) {
  const double s = m.s;
  const SymMatrix id = SymMatrix::identity();
  switch (form) {
    case HarmonicForm::ii: {
      const double g2 = grad_sq.trace();
      return ((-2.0 / (s * s)) * g2 * q + (2.0 / s) * (grad_sq - (g2 / 3.0) * id)).to_mat();
    }
    case HarmonicForm::iii:
      return (-4.0 / (s * s)) * (grad_sq.to_mat() * (q - (s / 6.0) * id).to_mat());
    case HarmonicForm::iv:
      return (-4.0 / (s * s)) * ((q - (s / 6.0) * id).to_mat() * grad_sq.to_mat());
  }
  return {};
}

inline QTensor harmonic_rhs_from_square(const SymMatrix& q, const SymMatrix& grad_sq, const LimitManifold& m,
                                        HarmonicForm form = HarmonicForm::iv) {
  return QTensor::from(harmonic_rhs_raw(q, grad_sq, m, form));
}

/// Harmonic-map right-hand side at base from tangent derivatives grad_alpha Q.
inline QTensor harmonic_rhs(const ManifoldPoint& base, const std::array<QTensor, 3>& grad, const LimitManifold& m,
                            HarmonicForm form) {
  for (const QTensor& g : grad) detail::require_tangent(g.sym(), base, m, "gradient component");
  return harmonic_rhs_from_square(base.q.sym(), gradient_square(grad), m, form);
}

/// ||[lap, Q]||: the "Laplacian commutes with Q" characterisation of harmonicity.
inline double harmonic_commutator_residual(const SymMatrix& lap, const SymMatrix& q) {
  return frob_norm(commutator(lap.to_mat(), q.to_mat()));
}

/// Residuals of the algebraic identities relating tangent and normal spaces.
struct IdentityResiduals {
  double trace_identity = 0;       // tr((XY+YX)Q) - (s/3) tr(XY)
  double product_identity = 0;     // (XY+YX)Q + (s/3)(XY+YX) - tr(XY)Q - (s/3)tr(XY) I
  double projector_identity = 0;   // P1 Z - (tr(QZ)/s + tr(Z)/3) P1
  double xy_normal = 0;            // [XY+YX, Q]
  double zw_normal = 0;            // [ZW+WZ, Q] with W = Q
  double xz_tangent = 0;           // tangency residual of XZ+ZX

  double worst() const {
    return std::max({std::abs(trace_identity), product_identity, projector_identity, xy_normal, zw_normal,
                     xz_tangent});
  }
};

inline IdentityResiduals check_identities(const SymMatrix& x, const SymMatrix& y, const SymMatrix& z,
                                          const ManifoldPoint& base, const LimitManifold& m) {
  const double s = m.s;
  const SymMatrix& q = base.q.sym();
  const SymMatrix id = SymMatrix::identity();
  const SymMatrix xy = anticommutator(x, y);
  const double tr_xy = mat_mul(x, y).trace();

  IdentityResiduals r;
  const Mat3 xyq = xy.to_mat() * q.to_mat();
  r.trace_identity = xyq.trace() - (s / 3.0) * tr_xy;
  r.product_identity =
      frob_norm(xyq - (-(s / 3.0) * xy + tr_xy * q + (s / 3.0) * tr_xy * id).to_mat());

  const SymMatrix p1 = (1.0 / s) * q + (1.0 / 3.0) * id;
  const double k = mat_mul(q, z).trace() / s + z.trace() / 3.0;
  r.projector_identity = frob_norm(mat_mul(p1, z) - (k * p1).to_mat());

  r.xy_normal = normality_residual(xy, base);
  r.zw_normal = normality_residual(anticommutator(z, q), base);
  r.xz_tangent = tangency_residual(anticommutator(x, z), base, m);
  return r;
}

/// Orthonormal basis {u, w} of the plane perpendicular to n.
inline std::array<Vec3, 2> perpendicular_frame(const Vec3& n) {
  const Vec3 trial = std::abs(n[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const Vec3 u = normalized(cross(n, trial));
  return {u, cross(n, u)};
}

/// Tangent vector n v^T + v n^T at a point with director n, v perpendicular to n.
inline QTensor tangent_vector(const ManifoldPoint& base, const Vec3& v) {
  const Vec3& n = base.director;
  return QTensor(SymMatrix{2 * n[0] * v[0], 2 * n[1] * v[1], 2 * n[2] * v[2], n[0] * v[1] + n[1] * v[0],
                           n[0] * v[2] + n[2] * v[0], n[1] * v[2] + n[2] * v[1]});
}

}  // namespace ldg
