#pragma once

// Uniform-grid fields over a box with one layer of frozen Dirichlet nodes on
// every face, and the finite-difference calculus used by the solvers.
//
// Node (i, j, k), 0 <= i <= dims[0] + 1, sits at lo + i h; indices 0 and
// dims + 1 are boundary nodes. Storage is row-major with k fastest.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

#include "ldg/bulk.hpp"
#include "ldg/error.hpp"
#include "ldg/manifold.hpp"
#include "ldg/parallel.hpp"
#include "ldg/params.hpp"
#include "ldg/tensor.hpp"

namespace ldg {

struct Node {
  int i = 0, j = 0, k = 0;
};

class GridSpec {
 public:
  GridSpec(std::array<int, 3> dims, Vec3 lo, Vec3 hi) : dims_(dims), lo_(lo), hi_(hi) {
    for (int a = 0; a < 3; ++a) {
      if (dims[a] < 3) throw Error(ErrorCode::InvalidArgument, "grid needs at least 3 interior points per axis");
      if (!(hi[a] > lo[a])) throw Error(ErrorCode::InvalidArgument, "grid box must have positive extent");
    }
  }
  static GridSpec cube(int n, double lo, double hi) { return {{n, n, n}, {lo, lo, lo}, {hi, hi, hi}}; }

  const std::array<int, 3>& dims() const { return dims_; }
  const Vec3& lo() const { return lo_; }
  const Vec3& hi() const { return hi_; }

  double h(int axis) const { return (hi_[axis] - lo_[axis]) / (dims_[axis] + 1); }
  double width(int axis) const { return hi_[axis] - lo_[axis]; }
  double cell_volume() const { return h(0) * h(1) * h(2); }
  double volume() const { return width(0) * width(1) * width(2); }
  Vec3 center() const { return {0.5 * (lo_[0] + hi_[0]), 0.5 * (lo_[1] + hi_[1]), 0.5 * (lo_[2] + hi_[2])}; }

  int nodes(int axis) const { return dims_[axis] + 2; }
  std::size_t node_count() const {
    return static_cast<std::size_t>(nodes(0)) * static_cast<std::size_t>(nodes(1)) * static_cast<std::size_t>(nodes(2));
  }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * nodes(1) + static_cast<std::size_t>(j)) * nodes(2) + static_cast<std::size_t>(k);
  }
  std::size_t index(const Node& n) const { return index(n.i, n.j, n.k); }
  Node node(std::size_t idx) const {
    const int k = static_cast<int>(idx % nodes(2));
    idx /= nodes(2);
    const int j = static_cast<int>(idx % nodes(1));
    return {static_cast<int>(idx / nodes(1)), j, k};
  }

  Vec3 position(const Node& n) const {
    return {lo_[0] + n.i * h(0), lo_[1] + n.j * h(1), lo_[2] + n.k * h(2)};
  }
  bool is_boundary(const Node& n) const {
    return n.i == 0 || n.j == 0 || n.k == 0 || n.i == dims_[0] + 1 || n.j == dims_[1] + 1 || n.k == dims_[2] + 1;
  }
  /// Number of node layers between n and the nearest face (0 on the boundary).
  int layer(const Node& n) const {
    const int ni[3] = {n.i, n.j, n.k};
    int best = ni[0];
    for (int a = 0; a < 3; ++a) best = std::min({best, ni[a], dims_[a] + 1 - ni[a]});
    return best;
  }
  double distance_to_boundary(const Node& n) const {
    const Vec3 x = position(n);
    double d = x[0] - lo_[0];
    for (int a = 0; a < 3; ++a) d = std::min({d, x[a] - lo_[a], hi_[a] - x[a]});
    return d;
  }
  /// Trapezoid weight of a node: 1/2 per axis on which it is a boundary node.
  double trapezoid_weight(const Node& n) const {
    const int ni[3] = {n.i, n.j, n.k};
    double w = 1.0;
    for (int a = 0; a < 3; ++a)
      if (ni[a] == 0 || ni[a] == dims_[a] + 1) w *= 0.5;
    return w;
  }

  /// Interior nodes in storage order.
  std::vector<Node> interior_nodes(int min_layer = 1) const {
    std::vector<Node> out;
    for (int i = min_layer; i <= dims_[0] + 1 - min_layer; ++i)
      for (int j = min_layer; j <= dims_[1] + 1 - min_layer; ++j)
        for (int k = min_layer; k <= dims_[2] + 1 - min_layer; ++k) out.push_back({i, j, k});
    return out;
  }
  std::vector<Node> all_nodes() const {
    std::vector<Node> out;
    out.reserve(node_count());
    for (std::size_t idx = 0; idx < node_count(); ++idx) out.push_back(node(idx));
    return out;
  }

  bool operator==(const GridSpec& o) const { return dims_ == o.dims_ && lo_ == o.lo_ && hi_ == o.hi_; }

 private:
  std::array<int, 3> dims_;
  Vec3 lo_, hi_;
};

template <class T>
class Field {
 public:
  using value_type = T;

  explicit Field(GridSpec grid, T fill = T{}) : grid_(std::move(grid)), values_(grid_.node_count(), fill) {}

  const GridSpec& grid() const { return grid_; }

  T& operator()(const Node& n) { return values_[grid_.index(n)]; }
  const T& operator()(const Node& n) const { return values_[grid_.index(n)]; }
  T& operator[](std::size_t idx) { return values_[idx]; }
  const T& operator[](std::size_t idx) const { return values_[idx]; }

  std::size_t size() const { return values_.size(); }
  const std::vector<T>& values() const { return values_; }

 private:
  GridSpec grid_;
  std::vector<T> values_;
};

using TensorField = Field<QTensor>;
using SymField = Field<SymMatrix>;
using MatrixField = Field<Mat3>;
using ScalarField = Field<double>;

template <class A, class B>
void require_same_grid(const Field<A>& a, const Field<B>& b) {
  if (!(a.grid() == b.grid())) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
}

namespace detail {

inline const SymMatrix& raw(const QTensor& q) { return q.sym(); }
inline const SymMatrix& raw(const SymMatrix& q) { return q; }
inline const Mat3& raw(const Mat3& q) { return q; }
inline double raw(double q) { return q; }

template <class T> struct Accum { using type = T; };
template <> struct Accum<QTensor> { using type = SymMatrix; };

template <class T> T finish(const typename Accum<T>::type& acc) { return acc; }
template <> inline QTensor finish<QTensor>(const SymMatrix& acc) { return QTensor(acc); }

inline void require_interior(const GridSpec& g, const Node& n) {
  if (g.is_boundary(n)) {
    std::ostringstream os;
    os << "node (" << n.i << "," << n.j << "," << n.k << ") is on the boundary";
    throw Error(ErrorCode::BoundaryNode, os.str());
  }
}

inline Node shifted(Node n, int axis, int step) {
  (axis == 0 ? n.i : axis == 1 ? n.j : n.k) += step;
  return n;
}

inline Mat3 as_mat(const SymMatrix& m) { return m.to_mat(); }
inline Mat3 as_mat(const QTensor& m) { return m.sym().to_mat(); }
inline const Mat3& as_mat(const Mat3& m) { return m; }

}  // namespace detail

/// 7-point Laplacian without the boundary check.
template <class T>
T laplacian_at(const Field<T>& f, const Node& n) {
  const GridSpec& g = f.grid();
  const auto& c = detail::raw(f(n));
  typename detail::Accum<T>::type acc{};
  for (int a = 0; a < 3; ++a) {
    const double inv_h2 = 1.0 / (g.h(a) * g.h(a));
    const auto& up = detail::raw(f(detail::shifted(n, a, +1)));
    const auto& dn = detail::raw(f(detail::shifted(n, a, -1)));
    acc += inv_h2 * ((up - c) + (dn - c));
  }
  return detail::finish<T>(acc);
}

/// Componentwise 7-point Laplacian at an interior node.
template <class T>
T laplacian(const Field<T>& f, const Node& n) {
  detail::require_interior(f.grid(), n);
  return laplacian_at(f, n);
}

/// Centered differences at an interior node.
template <class T>
std::array<T, 3> gradient(const Field<T>& f, const Node& n) {
  detail::require_interior(f.grid(), n);
  const GridSpec& g = f.grid();
  std::array<T, 3> out;
  for (int a = 0; a < 3; ++a) {
    const auto diff = detail::raw(f(detail::shifted(n, a, +1))) - detail::raw(f(detail::shifted(n, a, -1)));
    out[a] = detail::finish<T>((0.5 / g.h(a)) * diff);
  }
  return out;
}

/// Discrete sum_alpha grad_alpha F grad_alpha G as the mean over the six
/// one-sided difference pairs: sum_{nbr} (F_nbr - F)(G_nbr - G) / (2 h^2).
/// Second-order consistent; the discrete product rule
/// lap(FG) = F lap G + lap F G + 2 grad_product(F, G) holds exactly.
template <class A, class B>
Mat3 grad_product_at(const Field<A>& f, const Field<B>& g, const Node& n) {
  const GridSpec& grid = f.grid();
  const Mat3 fc = detail::as_mat(detail::raw(f(n)));
  const Mat3 gc = detail::as_mat(detail::raw(g(n)));
  Mat3 acc;
  for (int a = 0; a < 3; ++a) {
    const double w = 0.5 / (grid.h(a) * grid.h(a));
    for (int step : {+1, -1}) {
      const Node nb = detail::shifted(n, a, step);
      acc += w * ((detail::as_mat(detail::raw(f(nb))) - fc) * (detail::as_mat(detail::raw(g(nb))) - gc));
    }
  }
  return acc;
}

template <class A, class B>
Mat3 grad_product(const Field<A>& f, const Field<B>& g, const Node& n) {
  require_same_grid(f, g);
  detail::require_interior(f.grid(), n);
  return grad_product_at(f, g, n);
}

/// grad_product(F, F) for symmetric F, computed in symmetric storage.
template <class T>
SymMatrix grad_square_at(const Field<T>& f, const Node& n) {
  const GridSpec& g = f.grid();
  const SymMatrix& c = detail::raw(f(n));
  SymMatrix acc;
  for (int a = 0; a < 3; ++a) {
    const double w = 0.5 / (g.h(a) * g.h(a));
    for (int step : {+1, -1}) acc += w * square(detail::raw(f(detail::shifted(n, a, step))) - c);
  }
  return acc;
}

template <class T>
SymMatrix grad_square(const Field<T>& f, const Node& n) {
  detail::require_interior(f.grid(), n);
  return grad_square_at(f, n);
}

/// Builds a field by evaluating fn(position) at every node.
template <class Fn>
auto sample_field(const GridSpec& g, Fn&& fn) {
  using T = std::decay_t<decltype(fn(Vec3{}))>;
  Field<T> f(g);
  for (std::size_t idx = 0; idx < g.node_count(); ++idx) f[idx] = fn(g.position(g.node(idx)));
  return f;
}

namespace detail {

// Dirichlet contribution of the edges owned by node n (edges to its +axis
// neighbours), weighted by the trapezoid rule on the perpendicular axes.
template <class T>
double owned_edge_energy(const Field<T>& f, const Node& n) {
  const GridSpec& g = f.grid();
  const int ni[3] = {n.i, n.j, n.k};
  double sum = 0.0;
  for (int a = 0; a < 3; ++a) {
    if (ni[a] == g.dims()[a] + 1) continue;
    double w = g.cell_volume() / (g.h(a) * g.h(a));
    for (int b = 0; b < 3; ++b)
      if (b != a && (ni[b] == 0 || ni[b] == g.dims()[b] + 1)) w *= 0.5;
    const auto d = raw(f(shifted(n, a, +1))) - raw(f(n));
    sum += w * frob_inner(d, d);
  }
  return sum;
}

template <class Fn>
double reduce_nodes(const GridSpec& g, Fn&& per_node) {
  std::vector<double> parts(g.node_count());
  parallel_for(parts.size(), [&](std::size_t idx) { parts[idx] = per_node(g.node(idx)); });
  return pairwise_sum(parts);
}

}  // namespace detail

/// Discrete Dirichlet integral of |grad Q|^2 (edge differences, trapezoid weights).
template <class T>
double energy_harmonic(const Field<T>& f) {
  return detail::reduce_nodes(f.grid(), [&](const Node& n) { return detail::owned_edge_energy(f, n); });
}

struct EnergyParts {
  double dirichlet = 0;  // integral of |grad Q|^2
  double bulk = 0;       // integral of the shifted bulk density
  double total = 0;      // (L/2) dirichlet + bulk
};

inline EnergyParts energy_ldg(const TensorField& f, const MaterialParams& p) {
  const GridSpec& g = f.grid();
  EnergyParts e;
  e.dirichlet = energy_harmonic(f);
  e.bulk = detail::reduce_nodes(
      g, [&](const Node& n) { return g.trapezoid_weight(n) * g.cell_volume() * f_bulk_shifted(f(n).sym(), p); });
  e.total = 0.5 * p.L() * e.dirichlet + e.bulk;
  return e;
}

struct FieldNorms {
  double l2 = 0;
  double h1_semi = 0;
  double sup_interior = 0;
};

/// Norms of f - g: L2 and H1-seminorm over the whole grid, sup over interior
/// nodes at distance >= margin from the boundary.
template <class T>
FieldNorms norms(const Field<T>& f, const Field<T>& g, double margin) {
  require_same_grid(f, g);
  const GridSpec& grid = f.grid();
  double half_min = 0.5 * std::min({grid.width(0), grid.width(1), grid.width(2)});
  if (!(margin >= 0.0 && margin < half_min))
    throw Error(ErrorCode::InvalidArgument, "margin must lie in [0, half box width)");
  Field<T> diff(grid);
  for (std::size_t idx = 0; idx < diff.size(); ++idx)
    diff[idx] = detail::finish<T>(detail::raw(f[idx]) - detail::raw(g[idx]));
  FieldNorms out;
  out.l2 = std::sqrt(detail::reduce_nodes(grid, [&](const Node& n) {
    const auto& d = detail::raw(diff(n));
    return grid.trapezoid_weight(n) * grid.cell_volume() * frob_inner(d, d);
  }));
  out.h1_semi = std::sqrt(energy_harmonic(diff));
  for (const Node& n : grid.interior_nodes()) {
    if (grid.distance_to_boundary(n) < margin) continue;
    const auto& d = detail::raw(diff(n));
    out.sup_interior = std::max(out.sup_interior, std::sqrt(frob_inner(d, d)));
  }
  return out;
}

/// Largest value of |v| over interior nodes at least `margin` from the boundary.
template <class T, class Fn>
double interior_sup(const Field<T>& f, double margin, Fn&& magnitude) {
  double best = 0.0;
  for (const Node& n : f.grid().interior_nodes())
    if (f.grid().distance_to_boundary(n) >= margin) best = std::max(best, magnitude(f(n)));
  return best;
}

// ---- boundary data ---------------------------------------------------------

/// s (x x^T/|x|^2 - I/3).
inline QTensor hedgehog_value(const Vec3& x, double s) { return QTensor::uniaxial(s, normalized(x)); }

/// Hedgehog centered at the box center on every node. Throws CenterOnLattice
/// when a node coincides with the center.
inline TensorField boundary_hedgehog(const GridSpec& g, const MaterialParams& p) {
  const Vec3 c = g.center();
  const double s = p.s_plus();
  const double tol = 1e-12 * std::max({g.width(0), g.width(1), g.width(2)});
  return sample_field(g, [&](const Vec3& x) {
    const Vec3 r{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
    if (norm(r) <= tol) throw Error(ErrorCode::CenterOnLattice, "hedgehog center coincides with a grid node");
    return hedgehog_value(r, s);
  });
}

enum class DirectorPattern {
  Constant,     // n = e1
  TiltSin,      // angle (eps/sqrt 2) sin(pi xi_1) in the e1-e2 plane
  TwistLinear,  // angle (eps/sqrt 2)(2 xi_3 - 1) in the e1-e2 plane
};

/// Director angle of the near-constant patterns at x; |Q - s(e1 e1 - I/3)| <= eps s follows from |angle| <= eps/sqrt 2.
inline double pattern_angle(const GridSpec& g, DirectorPattern pattern, double eps, const Vec3& x) {
  const double amp = eps / std::numbers::sqrt2;
  switch (pattern) {
    case DirectorPattern::Constant: return 0.0;
    case DirectorPattern::TiltSin: return amp * std::sin(std::numbers::pi * (x[0] - g.lo()[0]) / g.width(0));
    case DirectorPattern::TwistLinear: return amp * (2.0 * (x[2] - g.lo()[2]) / g.width(2) - 1.0);
  }
  return 0.0;
}

/// Boundary data within eps s (pointwise) of the constant p = s(e1 e1 - I/3).
/// Interior nodes receive the same formula as an initial guess.
inline TensorField boundary_near_constant(const GridSpec& g, const MaterialParams& p, double eps,
                                          DirectorPattern pattern) {
  if (!(eps >= 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be non-negative");
  const double s = p.s_plus();
  return sample_field(g, [&](const Vec3& x) {
    const double th = pattern_angle(g, pattern, eps, x);
    return QTensor::uniaxial(s, {std::cos(th), std::sin(th), 0.0});
  });
}

/// Largest poly_min residual over the nodes selected by `boundary_only`.
inline double max_poly_min_residual(const TensorField& f, double s, bool boundary_only) {
  double worst = 0.0;
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    if (boundary_only && !f.grid().is_boundary(f.grid().node(idx))) continue;
    worst = std::max(worst, frob_norm(poly_min(f[idx].sym(), s)));
  }
  return worst;
}

}  // namespace ldg
