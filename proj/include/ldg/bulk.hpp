#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ldg/error.hpp"
#include "ldg/manifold.hpp"
#include "ldg/params.hpp"
#include "ldg/tensor.hpp"

namespace ldg {

/// f_B(Q) = -(a^2/2) tr Q^2 - (b^2/3) tr Q^3 + (c^2/4) (tr Q^2)^2.
inline double f_bulk(const SymMatrix& q, const MaterialParams& p) {
  const double t2 = trace_sq(q);
  const double t3 = trace_cube(q);
  return -0.5 * p.a2() * t2 - p.b2() / 3.0 * t3 + 0.25 * p.c2() * t2 * t2;
}

/// min f_B over traceless symmetric matrices, attained on S_* where
/// tr Q^2 = 2 s^2/3 and tr Q^3 = 2 s^3/9.
inline double f_bulk_min(const MaterialParams& p) {
  const double s = p.s_plus();
  const double t2 = 2.0 * s * s / 3.0;
  const double t3 = 2.0 * s * s * s / 9.0;
  return -0.5 * p.a2() * t2 - p.b2() / 3.0 * t3 + 0.25 * p.c2() * t2 * t2;
}

inline double f_bulk_shifted(const SymMatrix& q, const MaterialParams& p) { return f_bulk(q, p) - f_bulk_min(p); }

/// f_B(q + d) - f_B(q), expanded so that the result carries the relative
/// precision of the increment rather than of f_B itself.
inline double f_bulk_increment(const SymMatrix& q, const SymMatrix& d, const MaterialParams& p) {
  const double t2 = trace_sq(q);
  const double dt2 = 2.0 * frob_inner(q, d) + trace_sq(d);
  const SymMatrix dd = square(d);
  const double dt3 = 3.0 * frob_inner(square(q), d) + 3.0 * frob_inner(q, dd) + frob_inner(dd, d);
  return -0.5 * p.a2() * dt2 - p.b2() / 3.0 * dt3 + 0.25 * p.c2() * dt2 * (2.0 * t2 + dt2);
}

/// Gradient of f_B on the traceless symmetric matrices:
/// -a^2 Q - b^2 (Q^2 - tr(Q^2) I/3) + c^2 tr(Q^2) Q.
inline QTensor grad_f_bulk(const SymMatrix& q, const MaterialParams& p) {
  const double t2 = trace_sq(q);
  return QTensor((-p.a2() + p.c2() * t2) * q - p.b2() * square(q));
}

/// Bound on the Hessian of f_B over the ball |Q| <= radius.
inline double bulk_hessian_bound(const MaterialParams& p, double radius) {
  return p.a2() + 2.0 * p.b2() * radius + 3.0 * p.c2() * radius * radius;
}

/// Frobenius distance to S_*. The nearest director is the top eigenvector, so
/// dist^2 = |q|^2 - 2 s lambda_max + 2 s^2/3 holds with or without an eigen-gap.
inline double distance_to_manifold(const SymMatrix& q, const LimitManifold& m) {
  const double lmax = eigenvalues(q)[0];
  const double d2 = trace_sq(q) - 2.0 * m.s * lmax + 2.0 * m.s * m.s / 3.0;
  return std::sqrt(std::max(d2, 0.0));
}

/// Coefficients of the comparability family
/// h(Q) = alpha t2^3 + beta s t2 t3 + gamma s^2 t2^2 + mu s^3 t3 + nu s^4 t2 + delta s^6.
struct BulkCoeffs {
  double alpha = 0, beta = 0, gamma = 0, mu = 0, nu = 0, delta = 0;

  double value_constraint() const {
    return 8.0 / 27 * alpha + 4.0 / 27 * beta + 4.0 / 9 * gamma + 2.0 / 9 * mu + 2.0 / 3 * nu + delta;
  }
  double slope_constraint() const { return 8.0 / 3 * alpha + 10.0 / 9 * beta + 8.0 / 3 * gamma + mu + 2 * nu; }
  double curvature_margin() const {
    const double u = 16 * alpha + 4 * beta + 8 * gamma;
    const double v = 16 * alpha + 6 * beta + 8 * gamma + 3 * mu;
    return u * u - v * v;
  }

  double evaluate(const SymMatrix& q, double s) const {
    const double t2 = trace_sq(q), t3 = trace_cube(q);
    const double s2 = s * s;
    return alpha * t2 * t2 * t2 + beta * s * t2 * t3 + gamma * s2 * t2 * t2 + mu * s2 * s * t3 +
           nu * s2 * s2 * t2 + delta * s2 * s2 * s2;
  }

  /// s^2 |poly_min(Q)|^2 = s^2 g(Q).
  static BulkCoeffs min_poly_square() { return {0, 0, 0.5, -2.0 / 3.0, -1.0 / 3.0, 4.0 / 27.0}; }

  /// s^2 times the shifted bulk density.
  static BulkCoeffs shifted_bulk(const MaterialParams& p) {
    const double s = p.s_plus();
    return {0, 0, p.c2() / 4.0, -p.b2() / (3.0 * s), -p.a2() / (2.0 * s * s), -f_bulk_min(p) / (s * s * s * s)};
  }
};

struct DistCompReport {
  double value_residual = 0;
  double slope_residual = 0;
  double curvature_margin = 0;
  double ratio_min = std::numeric_limits<double>::infinity();
  double ratio_max = 0;
  int samples_used = 0;
};

inline constexpr double kDistCompEqualityTol = 1e-10;
inline constexpr double kDistCompMarginTol = 1e-10;

/// Random Q with dist(Q, S_*) <= radius * s: a random point of S_* plus a
/// random traceless perturbation.
template <class Rng>
SymMatrix sample_near_manifold(const LimitManifold& m, double radius, Rng& rng) {
  std::normal_distribution<double> gauss;
  const Vec3 n{gauss(rng), gauss(rng), gauss(rng)};
  const QTensor base = QTensor::uniaxial(m.s, normalized(n));
  const QTensor dir(SymMatrix{gauss(rng), gauss(rng), gauss(rng), gauss(rng), gauss(rng), gauss(rng)});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double len = radius * m.s * unit(rng);
  return (base + (len / frob_norm(dir)) * dir).sym();
}

/// Checks the algebraic conditions on the coefficients and samples the ratio
/// h(Q)/dist(Q, S_*)^2 over points with dist < eps * s.
inline DistCompReport distcomp_check(const BulkCoeffs& c, const MaterialParams& p, int samples,
                                     std::uint64_t seed = 0, double eps = 0.1) {
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be >= 1");
  DistCompReport r;
  r.value_residual = c.value_constraint();
  r.slope_residual = c.slope_constraint();
  r.curvature_margin = c.curvature_margin();
  if (std::abs(r.value_residual) > kDistCompEqualityTol || std::abs(r.slope_residual) > kDistCompEqualityTol ||
      !(r.curvature_margin > kDistCompMarginTol)) {
    std::ostringstream os;
    os << "value=" << r.value_residual << " slope=" << r.slope_residual << " margin=" << r.curvature_margin;
    throw Error(ErrorCode::ConstraintViolated, os.str());
  }
  const LimitManifold m(p);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < samples; ++i) {
    const SymMatrix q = sample_near_manifold(m, eps, rng);
    const double d = distance_to_manifold(q, m);
    if (d < 1e-6 * m.s) continue;
    const double ratio = c.evaluate(q, m.s) / (d * d);
    r.ratio_min = std::min(r.ratio_min, ratio);
    r.ratio_max = std::max(r.ratio_max, ratio);
    ++r.samples_used;
  }
  return r;
}

}  // namespace ldg
