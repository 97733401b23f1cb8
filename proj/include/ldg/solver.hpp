#pragma once

// Explicit gradient flows for the discrete Landau-de Gennes energy (over
// S0-valued fields) and for the Dirichlet energy over S_*-valued fields
// (projected flow). Both use a monotone step control: a trial step that
// raises the energy is rejected and dt halved.

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "ldg/bulk.hpp"
#include "ldg/error.hpp"
#include "ldg/field.hpp"
#include "ldg/manifold.hpp"
#include "ldg/parallel.hpp"
#include "ldg/params.hpp"

namespace ldg {

struct SolveConfig {
  double dt_safety = 0.9;
  int max_iters = 200000;
  double rel_energy_tol = 1e-22;  // stall threshold on the relative decrease over kStallWindow accepted steps
  double residual_tol = 1e-9;
  int log_every = 0;  // 0 disables progress lines
  std::ostream* log = nullptr;

  void validate() const {
    if (!(dt_safety > 0 && dt_safety <= 1)) throw Error(ErrorCode::InvalidArgument, "dt_safety must be in (0,1]");
    if (max_iters <= 0) throw Error(ErrorCode::InvalidArgument, "max_iters must be positive");
    if (!(rel_energy_tol > 0 && rel_energy_tol < 1))
      throw Error(ErrorCode::InvalidArgument, "rel_energy_tol must be in (0,1)");
    if (!(residual_tol > 0)) throw Error(ErrorCode::InvalidArgument, "residual_tol must be positive");
    if (log_every < 0) throw Error(ErrorCode::InvalidArgument, "log_every must be non-negative");
  }
};

struct SolveResult {
  TensorField field;
  int iterations = 0;
  double final_energy = 0;
  double el_residual = 0;
  bool converged = false;
  /// Energy after each accepted step, starting with the initial energy.
  std::vector<double> energies;
};

inline constexpr double kMinTimeStep = 1e-12;
inline constexpr std::size_t kStallWindow = 50;

namespace detail {

inline double explicit_diffusion_limit(const GridSpec& g) {
  return 1.0 / (2.0 * (1.0 / (g.h(0) * g.h(0)) + 1.0 / (g.h(1) * g.h(1)) + 1.0 / (g.h(2) * g.h(2))));
}

inline void log_progress(const SolveConfig& cfg, const char* solver, int iter, double energy, double residual,
                         double dt) {
  if (cfg.log == nullptr || cfg.log_every <= 0 || iter % cfg.log_every != 0) return;
  std::ostringstream os;
  os.precision(17);
  os << "solver=" << solver << " iter=" << iter << " energy=" << energy << " residual=" << residual
     << " dt=" << dt << '\n';
  *cfg.log << os.str();
}

// Visits the edges whose change is attributed to interior node n: every edge
// to its +axis neighbour, plus the edge from a boundary -axis neighbour.
template <class Fn>
double sum_owned_edges(const GridSpec& g, const Node& n, Fn&& edge) {
  double sum = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double w = g.cell_volume() / (g.h(a) * g.h(a));
    sum += w * edge(n, shifted(n, a, +1));
    const Node dn = shifted(n, a, -1);
    if (g.is_boundary(dn)) sum += w * edge(dn, n);
  }
  return sum;
}

// Change of the edge Dirichlet integral under the nodal displacement delta,
// via |d + dd|^2 - |d|^2 = <dd, 2d + dd>.
inline double dirichlet_increment(const TensorField& old_f, const SymField& delta, const Node& n) {
  return sum_owned_edges(old_f.grid(), n, [&](const Node& lo, const Node& hi) {
    const SymMatrix d = old_f(hi).sym() - old_f(lo).sym();
    const SymMatrix dd = delta(hi) - delta(lo);
    return frob_inner(dd, 2.0 * d + dd);
  });
}

// Same for S_*-valued fields in director form. With F(a, b) = |a x b|^2 / (|a|^2 |b|^2),
// |Q_a - Q_b|^2 = 2 s^2 F(n_a, n_b) for any nonzero representatives of the
// directors, so the increment is insensitive to their lengths.
inline double director_increment(const Field<Vec3>& dir, const Field<Vec3>& delta, double s, const Node& n) {
  return 2.0 * s * s * sum_owned_edges(dir.grid(), n, [&](const Node& lo, const Node& hi) {
    const Vec3 &a = dir(lo), &b = dir(hi), &da = delta(lo), &db = delta(hi);
    const Vec3 c = cross(a, b);
    const Vec3 b_new{b[0] + db[0], b[1] + db[1], b[2] + db[2]};
    const Vec3 u = cross(da, b_new), v = cross(a, db);
    const Vec3 dc{u[0] + v[0], u[1] + v[1], u[2] + v[2]};
    const double dnum = dot(dc, Vec3{2 * c[0] + dc[0], 2 * c[1] + dc[1], 2 * c[2] + dc[2]});
    const double aa = dot(a, a), bb = dot(b, b);
    const double x = (2 * dot(a, da) + dot(da, da)) / aa;
    const double y = (2 * dot(b, db) + dot(db, db)) / bb;
    return (dnum - dot(c, c) * (x + y + x * y)) / (aa * bb * (1 + x) * (1 + y));
  });
}

// Running energy E_0 + sum of accepted changes, held as an unevaluated sum
// hi + lo so that decrements below ulp(E) still register.
class EnergyTrack {
 public:
  explicit EnergyTrack(double e0) : hi_(e0) {}

  void add(double change) {
    const double sum = hi_ + change;
    const double bp = sum - hi_;
    lo_ += (hi_ - (sum - bp)) + (change - bp);
    hi_ = sum;
    recent_.push_back(change);
    if (recent_.size() > kStallWindow) recent_.erase(recent_.begin());
  }
  double value() const { return hi_ + lo_; }

  /// True when the last kStallWindow accepted steps together lowered the energy by at most rel_tol |E|.
  bool stalled(double rel_tol) const {
    if (recent_.size() < kStallWindow) return false;
    double drop = 0.0;
    for (double c : recent_) drop -= c;
    return drop <= rel_tol * std::max(std::abs(value()), 1e-300);
  }

 private:
  double hi_, lo_ = 0.0;
  std::vector<double> recent_;
};

inline void require_boundary_on_manifold(const TensorField& f, double s) {
  const double r = max_poly_min_residual(f, s, true);
  if (r > 1e-8 * std::max(1.0, s * s)) {
    std::ostringstream os;
    os << "boundary poly_min residual " << r;
    throw Error(ErrorCode::NonManifoldBoundary, os.str());
  }
}

}  // namespace detail

/// Residual of the rescaled Euler-Lagrange equation, lap Q - (1/L) grad f_B(Q), at an interior node.
inline QTensor ldg_velocity(const TensorField& f, const Node& n, const MaterialParams& p) {
  return laplacian_at(f, n) - (1.0 / p.L()) * grad_f_bulk(f(n).sym(), p);
}

/// Max-norm over interior nodes of lap Q - (1/L) grad f_B(Q).
inline double ldg_residual(const TensorField& f, const MaterialParams& p) {
  const auto nodes = f.grid().interior_nodes();
  std::vector<double> r(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t t) { r[t] = frob_norm(ldg_velocity(f, nodes[t], p)); });
  double worst = 0.0;
  for (double v : r) worst = std::max(worst, v);
  return worst;
}

/// Gradient flow of the discrete energy (1/L) I_L:
/// Q <- Q + dt (lap Q - (1/L) grad f_B(Q)) at interior nodes.
inline SolveResult solve_ldg(const TensorField& init, const MaterialParams& p, const SolveConfig& cfg) {
  cfg.validate();
  const GridSpec& g = init.grid();
  const double s = p.s_plus();
  detail::require_boundary_on_manifold(init, s);

  const double radius = std::sqrt(2.0 / 3.0) * s + 0.1;
  const double dt_max =
      cfg.dt_safety * std::min(detail::explicit_diffusion_limit(g), p.L() / bulk_hessian_bound(p, radius));
  double dt = dt_max;

  const auto nodes = g.interior_nodes();
  std::vector<QTensor> velocity(nodes.size());
  std::vector<double> vnorm(nodes.size());
  std::vector<double> dE(nodes.size());
  SymField delta(g);

  SolveResult res{init, 0, 0, 0, false, {}};
  TensorField& q = res.field;
  TensorField trial = q;
  detail::EnergyTrack track(energy_ldg(q, p).total);
  res.energies.push_back(track.value());

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    parallel_for(nodes.size(), [&](std::size_t t) {
      velocity[t] = ldg_velocity(q, nodes[t], p);
      vnorm[t] = frob_norm(velocity[t]);
    });
    double residual = 0.0;
    for (double v : vnorm) residual = std::max(residual, v);
    res.el_residual = residual;
    res.iterations = iter;
    detail::log_progress(cfg, "ldg", iter, track.value(), residual, dt);
    if (residual <= cfg.residual_tol) {
      res.converged = true;
      break;
    }

    bool accepted = false;
    while (!accepted) {
      parallel_for(nodes.size(), [&](std::size_t t) {
        const Node& n = nodes[t];
        trial(n) = q(n) + dt * velocity[t];
        delta(n) = (trial(n) - q(n)).sym();
      });
      parallel_for(nodes.size(), [&](std::size_t t) {
        const Node& n = nodes[t];
        const double bulk = g.cell_volume() * f_bulk_increment(q(n).sym(), delta(n), p);
        dE[t] = 0.5 * p.L() * detail::dirichlet_increment(q, delta, n) + bulk;
      });
      const double change = pairwise_sum(dE);
      if (change <= 0.0) {
        accepted = true;
        for (const Node& n : nodes) q(n) = trial(n);
        track.add(change);
        res.energies.push_back(track.value());
        dt = std::min(dt_max, 1.25 * dt);
        if (track.stalled(cfg.rel_energy_tol)) {
          res.converged = true;
          res.iterations = iter + 1;
          res.el_residual = ldg_residual(q, p);
          res.final_energy = energy_ldg(q, p).total;
          return res;
        }
      } else {
        dt *= 0.5;
        if (dt < kMinTimeStep) {
          std::ostringstream os;
          os << "time step underflow at iteration " << iter << " (L=" << p.L() << ", h=" << g.h(0) << ")";
          throw Error(ErrorCode::StiffnessFailure, os.str());
        }
      }
    }
    res.iterations = iter + 1;
  }
  if (!res.converged) res.el_residual = ldg_residual(q, p);
  res.final_energy = energy_ldg(q, p).total;
  return res;
}

/// lap Q - harmonic_rhs(Q, grad_square(Q), form iv) at an interior node. For
/// S_*-valued fields this equals the tangential part of the discrete Laplacian.
inline QTensor harmonic_residual_at(const TensorField& f, const Node& n, const LimitManifold& m) {
  return laplacian_at(f, n) - harmonic_rhs_from_square(f(n).sym(), grad_square_at(f, n), m, HarmonicForm::iv);
}

inline double harmonic_residual(const TensorField& f, const LimitManifold& m) {
  const auto nodes = f.grid().interior_nodes();
  std::vector<double> r(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t t) { r[t] = frob_norm(harmonic_residual_at(f, nodes[t], m)); });
  double worst = 0.0;
  for (double v : r) worst = std::max(worst, v);
  return worst;
}

/// Projected gradient flow of the Dirichlet energy over S_*-valued fields:
/// Q <- project(Q + dt lap Q) at interior nodes.
inline SolveResult solve_harmonic(const TensorField& init, const MaterialParams& p, const SolveConfig& cfg) {
  cfg.validate();
  const GridSpec& g = init.grid();
  const LimitManifold m(p);
  detail::require_boundary_on_manifold(init, m.s);
  if (max_poly_min_residual(init, m.s, false) > 1e-8 * std::max(1.0, m.s * m.s))
    throw Error(ErrorCode::NotOnManifold, "initial field must be S_*-valued");

  const double dt_max = cfg.dt_safety * detail::explicit_diffusion_limit(g);
  double dt = dt_max;

  const auto nodes = g.interior_nodes();
  std::vector<QTensor> lap(nodes.size());
  std::vector<double> rnorm(nodes.size());
  std::vector<double> dE(nodes.size());

  // Directors carry the state; q mirrors them as s (n n^T - I/3).
  Field<Vec3> dir(g), ddir(g, Vec3{0, 0, 0});
  for (std::size_t idx = 0; idx < dir.size(); ++idx) dir[idx] = eig3(init[idx].sym()).vector(0);

  SolveResult res{init, 0, 0, 0, false, {}};
  TensorField& q = res.field;
  for (std::size_t idx = 0; idx < dir.size(); ++idx)
    if (!g.is_boundary(g.node(idx))) q[idx] = QTensor::uniaxial(m.s, dir[idx]);
  detail::EnergyTrack track(energy_harmonic(q));
  res.energies.push_back(track.value());

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    parallel_for(nodes.size(), [&](std::size_t t) {
      lap[t] = laplacian_at(q, nodes[t]);
      rnorm[t] = frob_norm(lap[t] - harmonic_rhs_from_square(q(nodes[t]).sym(), grad_square_at(q, nodes[t]), m,
                                                             HarmonicForm::iv));
    });
    double residual = 0.0;
    for (double v : rnorm) residual = std::max(residual, v);
    res.el_residual = residual;
    res.iterations = iter;
    detail::log_progress(cfg, "harmonic", iter, track.value(), residual, dt);
    if (residual <= cfg.residual_tol) {
      res.converged = true;
      break;
    }

    bool accepted = false;
    while (!accepted) {
      parallel_for(nodes.size(), [&](std::size_t t) {
        const Node& n = nodes[t];
        Vec3 next = project_to_manifold((q(n) + dt * lap[t]).sym(), m).director;
        const Vec3& cur = dir(n);
        if (dot(next, cur) < 0.0) next = Vec3{-next[0], -next[1], -next[2]};
        Vec3 d{next[0] - cur[0], next[1] - cur[1], next[2] - cur[2]};
        const double radial = dot(cur, d) / dot(cur, cur);
        ddir(n) = Vec3{d[0] - radial * cur[0], d[1] - radial * cur[1], d[2] - radial * cur[2]};
      });
      parallel_for(nodes.size(),
                   [&](std::size_t t) { dE[t] = detail::director_increment(dir, ddir, m.s, nodes[t]); });
      const double change = pairwise_sum(dE);
      if (change <= 0.0) {
        accepted = true;
        for (const Node& n : nodes) {
          const Vec3& d = ddir(n);
          dir(n) = normalized(Vec3{dir(n)[0] + d[0], dir(n)[1] + d[1], dir(n)[2] + d[2]});
          q(n) = QTensor::uniaxial(m.s, dir(n));
        }
        track.add(change);
        res.energies.push_back(track.value());
        dt = std::min(dt_max, 1.25 * dt);
        if (track.stalled(cfg.rel_energy_tol)) {
          res.converged = true;
          res.iterations = iter + 1;
          res.el_residual = harmonic_residual(q, m);
          res.final_energy = energy_harmonic(q);
          return res;
        }
      } else {
        dt *= 0.5;
        if (dt < kMinTimeStep) {
          std::ostringstream os;
          os << "time step underflow at iteration " << iter;
          throw Error(ErrorCode::StiffnessFailure, os.str());
        }
      }
    }
    res.iterations = iter + 1;
  }
  if (!res.converged) res.el_residual = harmonic_residual(q, m);
  res.final_energy = energy_harmonic(q);
  return res;
}

}  // namespace ldg
