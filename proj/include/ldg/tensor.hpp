#pragma once

// Algebra of real 3x3 matrices specialised to the symmetric and the
// symmetric traceless (Q-tensor) cases.

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <numbers>

namespace ldg {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  return {a[0] / n, a[1] / n, a[2] / n};
}

/// General 3x3 matrix, row-major.
struct Mat3 {
  std::array<double, 9> a{};

  double& operator()(int i, int j) { return a[3 * i + j]; }
  double operator()(int i, int j) const { return a[3 * i + j]; }

  static Mat3 identity() {
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }
  static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    Mat3 m;
    for (int i = 0; i < 3; ++i) {
      m(i, 0) = c0[i];
      m(i, 1) = c1[i];
      m(i, 2) = c2[i];
    }
    return m;
  }

  Vec3 column(int j) const { return {a[j], a[3 + j], a[6 + j]}; }

  Mat3 transpose() const {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
    return t;
  }
  double trace() const { return a[0] + a[4] + a[8]; }

  Mat3& operator+=(const Mat3& o) {
    for (int k = 0; k < 9; ++k) a[k] += o.a[k];
    return *this;
  }
  Mat3& operator-=(const Mat3& o) {
    for (int k = 0; k < 9; ++k) a[k] -= o.a[k];
    return *this;
  }
  Mat3& operator*=(double s) {
    for (double& v : a) v *= s;
    return *this;
  }
};

inline Mat3 operator+(Mat3 x, const Mat3& y) { return x += y; }
inline Mat3 operator-(Mat3 x, const Mat3& y) { return x -= y; }
inline Mat3 operator-(Mat3 x) { return x *= -1.0; }
inline Mat3 operator*(double s, Mat3 x) { return x *= s; }
inline Mat3 operator*(Mat3 x, double s) { return x *= s; }

inline Mat3 operator*(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j) + x(i, 2) * y(2, j);
  return r;
}

inline Vec3 operator*(const Mat3& m, const Vec3& v) {
  return {m(0, 0) * v[0] + m(0, 1) * v[1] + m(0, 2) * v[2],
          m(1, 0) * v[0] + m(1, 1) * v[1] + m(1, 2) * v[2],
          m(2, 0) * v[0] + m(2, 1) * v[1] + m(2, 2) * v[2]};
}

inline double frob_inner(const Mat3& x, const Mat3& y) {
  double s = 0.0;
  for (int k = 0; k < 9; ++k) s += x.a[k] * y.a[k];
  return s;
}
inline double frob_norm(const Mat3& x) { return std::sqrt(frob_inner(x, x)); }

inline double det(const Mat3& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

inline Mat3 commutator(const Mat3& x, const Mat3& y) { return x * y - y * x; }

/// Real symmetric 3x3 matrix stored as (xx, yy, zz, xy, xz, yz).
class SymMatrix {
 public:
  SymMatrix() = default;
  SymMatrix(double xx, double yy, double zz, double xy, double xz, double yz)
      : c_{xx, yy, zz, xy, xz, yz} {}

  static SymMatrix identity() { return {1, 1, 1, 0, 0, 0}; }
  static SymMatrix outer(const Vec3& n) {
    return {n[0] * n[0], n[1] * n[1], n[2] * n[2], n[0] * n[1], n[0] * n[2], n[1] * n[2]};
  }
  /// Symmetric part (m + m^T)/2 of a general matrix.
  static SymMatrix sym_part(const Mat3& m) {
    return {m(0, 0), m(1, 1), m(2, 2), 0.5 * (m(0, 1) + m(1, 0)), 0.5 * (m(0, 2) + m(2, 0)),
            0.5 * (m(1, 2) + m(2, 1))};
  }

  double operator()(int i, int j) const { return c_[index(i, j)]; }
  const std::array<double, 6>& components() const { return c_; }

  double xx() const { return c_[0]; }
  double yy() const { return c_[1]; }
  double zz() const { return c_[2]; }
  double xy() const { return c_[3]; }
  double xz() const { return c_[4]; }
  double yz() const { return c_[5]; }

  double trace() const { return c_[0] + c_[1] + c_[2]; }

  Mat3 to_mat() const {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = (*this)(i, j);
    return m;
  }
  operator Mat3() const { return to_mat(); }

  SymMatrix& operator+=(const SymMatrix& o) {
    for (int k = 0; k < 6; ++k) c_[k] += o.c_[k];
    return *this;
  }
  SymMatrix& operator-=(const SymMatrix& o) {
    for (int k = 0; k < 6; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  SymMatrix& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }

 private:
  static constexpr int index(int i, int j) {
    constexpr int table[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
    return table[i][j];
  }
  std::array<double, 6> c_{};
};

inline SymMatrix operator+(SymMatrix x, const SymMatrix& y) { return x += y; }
inline SymMatrix operator-(SymMatrix x, const SymMatrix& y) { return x -= y; }
inline SymMatrix operator-(SymMatrix x) { return x *= -1.0; }
inline SymMatrix operator*(double s, SymMatrix x) { return x *= s; }
inline SymMatrix operator*(SymMatrix x, double s) { return x *= s; }

/// Frobenius inner product; off-diagonal entries count twice.
inline double frob_inner(const SymMatrix& x, const SymMatrix& y) {
  const auto& a = x.components();
  const auto& b = y.components();
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + 2.0 * (a[3] * b[3] + a[4] * b[4] + a[5] * b[5]);
}
inline double frob_norm(const SymMatrix& x) { return std::sqrt(frob_inner(x, x)); }

/// Exact product of two symmetric matrices; the result is in general not symmetric.
inline Mat3 mat_mul(const SymMatrix& a, const SymMatrix& b) { return a.to_mat() * b.to_mat(); }

/// a*a, computed directly in symmetric storage.
inline SymMatrix square(const SymMatrix& a) {
  const double xx = a.xx(), yy = a.yy(), zz = a.zz(), xy = a.xy(), xz = a.xz(), yz = a.yz();
  return {xx * xx + xy * xy + xz * xz, xy * xy + yy * yy + yz * yz, xz * xz + yz * yz + zz * zz,
          xx * xy + xy * yy + xz * yz, xx * xz + xy * yz + xz * zz, xy * xz + yy * yz + yz * zz};
}

/// Anticommutator a*b + b*a.
inline SymMatrix anticommutator(const SymMatrix& a, const SymMatrix& b) {
  const Mat3 p = mat_mul(a, b);
  return {2 * p(0, 0), 2 * p(1, 1), 2 * p(2, 2), p(0, 1) + p(1, 0), p(0, 2) + p(2, 0), p(1, 2) + p(2, 1)};
}

inline double det(const SymMatrix& m) { return det(m.to_mat()); }

inline SymMatrix inverse(const SymMatrix& m) {
  const double xx = m.xx(), yy = m.yy(), zz = m.zz(), xy = m.xy(), xz = m.xz(), yz = m.yz();
  const SymMatrix adj{yy * zz - yz * yz, xx * zz - xz * xz, xx * yy - xy * xy,
                      xz * yz - xy * zz, xy * yz - xz * yy, xy * xz - xx * yz};
  const double d = xx * adj.xx() + xy * adj.xy() + xz * adj.xz();
  return (1.0 / d) * adj;
}

/// Symmetric traceless 3x3 matrix. The trace is projected out on construction
/// and after every additive operation.
class QTensor {
 public:
  QTensor() = default;
  explicit QTensor(const SymMatrix& m) : m_(deviator(m)) {}
  QTensor(double xx, double yy, double xy, double xz, double yz) : m_(xx, yy, -xx - yy, xy, xz, yz) {}

  static QTensor from(const SymMatrix& m) { return QTensor(m); }
  /// Symmetric traceless part of a general matrix.
  static QTensor from(const Mat3& m) { return QTensor(SymMatrix::sym_part(m)); }
  /// s (n n^T - I/3).
  static QTensor uniaxial(double s, const Vec3& n) {
    return QTensor(s * (SymMatrix::outer(n) - (1.0 / 3.0) * SymMatrix::identity()));
  }

  const SymMatrix& sym() const { return m_; }
  operator const SymMatrix&() const { return m_; }
  operator Mat3() const { return m_.to_mat(); }

  double operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }

  QTensor& operator+=(const QTensor& o) {
    m_ = deviator(m_ + o.m_);
    return *this;
  }
  QTensor& operator-=(const QTensor& o) {
    m_ = deviator(m_ - o.m_);
    return *this;
  }
  QTensor& operator*=(double s) {
    m_ *= s;
    return *this;
  }

 private:
  static SymMatrix deviator(const SymMatrix& m) {
    const double t = m.trace() / 3.0;
    SymMatrix out{m.xx() - t, m.yy() - t, m.zz() - t, m.xy(), m.xz(), m.yz()};
    const double r = out.trace() / 3.0;  // second pass
    out = {out.xx() - r, out.yy() - r, out.zz() - r, out.xy(), out.xz(), out.yz()};
    assert(std::abs(out.trace()) <= 1e-14 * std::max(1.0, frob_norm(out)));
    return out;
  }
  SymMatrix m_;
};

inline QTensor operator+(QTensor x, const QTensor& y) { return x += y; }
inline QTensor operator-(QTensor x, const QTensor& y) { return x -= y; }
inline QTensor operator-(QTensor x) { return x *= -1.0; }
inline QTensor operator*(double s, QTensor x) { return x *= s; }
inline QTensor operator*(QTensor x, double s) { return x *= s; }

inline double frob_inner(const QTensor& x, const QTensor& y) { return frob_inner(x.sym(), y.sym()); }
inline double frob_norm(const QTensor& x) { return frob_norm(x.sym()); }
inline double trace_sq(const SymMatrix& q) { return frob_inner(q, q); }
inline double trace_cube(const SymMatrix& q) { return frob_inner(square(q), q); }

inline bool is_traceless(const SymMatrix& q, double rel_tol = 1e-14) {
  return std::abs(q.trace()) <= rel_tol * std::max(1.0, frob_norm(q));
}

/// Minimal-polynomial residual Q^2 - (s/3) Q - (2/9) s^2 I; vanishes exactly on the limit manifold.
inline SymMatrix poly_min(const SymMatrix& q, double s_plus) {
  return square(q) - (s_plus / 3.0) * q - (2.0 / 9.0) * s_plus * s_plus * SymMatrix::identity();
}

struct EigenDecomp {
  Vec3 values{};  // descending
  Mat3 vectors;   // orthonormal eigenvectors as columns, matching `values`

  Vec3 vector(int k) const { return vectors.column(k); }
};

namespace detail {

inline void jacobi_eigen(const SymMatrix& m, Vec3& values, Mat3& vectors) {
  Mat3 a = m.to_mat();
  Mat3 v = Mat3::identity();
  for (int sweep = 0; sweep < 50; ++sweep) {
    const double off = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    const double diag = a(0, 0) * a(0, 0) + a(1, 1) * a(1, 1) + a(2, 2) * a(2, 2);
    if (off <= 1e-36 * std::max(diag, 1e-300) || off == 0.0) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) > a(j, j); });
  for (int k = 0; k < 3; ++k) {
    values[k] = a(order[k], order[k]);
    for (int i = 0; i < 3; ++i) vectors(i, k) = v(i, order[k]);
  }
}

// Null vector of the rank-2 matrix m via the largest cross product of its rows.
inline Vec3 null_vector(const Mat3& m) {
  const Vec3 r0{m(0, 0), m(0, 1), m(0, 2)}, r1{m(1, 0), m(1, 1), m(1, 2)}, r2{m(2, 0), m(2, 1), m(2, 2)};
  const Vec3 c01 = cross(r0, r1), c02 = cross(r0, r2), c12 = cross(r1, r2);
  const double n01 = dot(c01, c01), n02 = dot(c02, c02), n12 = dot(c12, c12);
  if (n01 >= n02 && n01 >= n12) return normalized(c01);
  if (n02 >= n12) return normalized(c02);
  return normalized(c12);
}

}  // namespace detail

/// Eigenvalues of a symmetric 3x3 matrix in descending order, from the
/// trigonometric solution of the characteristic cubic.
inline Vec3 eigenvalues(const SymMatrix& m) {
  const double mean = m.trace() / 3.0;
  const SymMatrix d{m.xx() - mean, m.yy() - mean, m.zz() - mean, m.xy(), m.xz(), m.yz()};
  const double p2 = trace_sq(d) / 6.0;
  if (p2 <= 0.0) return {mean, mean, mean};
  const double p = std::sqrt(p2);
  const double r = std::clamp(det(d) / (2.0 * p * p2), -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double l1 = 2.0 * p * std::cos(phi);
  const double l3 = 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  return {mean + l1, mean - l1 - l3, mean + l3};
}

/// Symmetric eigendecomposition. Closed-form eigenvalues and cross-product
/// eigenvectors when the spectrum is well separated; cyclic Jacobi otherwise.
inline EigenDecomp eig3(const SymMatrix& m) {
  EigenDecomp out;
  const double scale = frob_norm(m);
  if (scale == 0.0) {
    out.vectors = Mat3::identity();
    return out;
  }
  const Vec3 lam = eigenvalues(m);
  const double sep_tol = 1e-3 * scale;
  if (lam[0] - lam[1] > sep_tol && lam[1] - lam[2] > sep_tol) {
    const Mat3 base = m.to_mat();
    Mat3 shifted0 = base, shifted2 = base;
    for (int i = 0; i < 3; ++i) {
      shifted0(i, i) -= lam[0];
      shifted2(i, i) -= lam[2];
    }
    const Vec3 v0 = detail::null_vector(shifted0);
    Vec3 v2 = detail::null_vector(shifted2);
    // Gram-Schmidt against v0 removes the O(eps/gap) skew between the two solves.
    const double c = dot(v0, v2);
    v2 = normalized({v2[0] - c * v0[0], v2[1] - c * v0[1], v2[2] - c * v0[2]});
    const Vec3 v1 = cross(v2, v0);
    out.values = lam;
    out.vectors = Mat3::from_columns(v0, v1, v2);
    return out;
  }
  detail::jacobi_eigen(m, out.values, out.vectors);
  return out;
}

}  // namespace ldg
