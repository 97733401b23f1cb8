#pragma once

// Experiment workflows behind the command-line subcommands.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "ldg/asymptotics.hpp"
#include "ldg/config.hpp"
#include "ldg/error.hpp"
#include "ldg/field.hpp"
#include "ldg/io.hpp"
#include "ldg/manifold.hpp"
#include "ldg/solver.hpp"

namespace ldg {

// ---- geometry identity suite ------------------------------------------------

struct IdentityStat {
  std::string name;
  double worst = 0;
  double tol = 0;
  bool ok() const { return worst <= tol; }
};

struct GeometryReport {
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<IdentityStat> stats;
  bool passed() const {
    return std::all_of(stats.begin(), stats.end(), [](const IdentityStat& s) { return s.ok(); });
  }
};

namespace detail {

template <class Rng>
Vec3 random_unit(Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  for (;;) {
    const Vec3 v{nd(rng), nd(rng), nd(rng)};
    if (norm(v) > 1e-3) return normalized(v);
  }
}

template <class Rng>
SymMatrix random_sym(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
}

// Unit-norm tangent vector at base.
template <class Rng>
SymMatrix random_tangent(Rng& rng, const ManifoldPoint& base) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto frame = perpendicular_frame(base.director);
  for (;;) {
    const double c0 = u(rng), c1 = u(rng);
    const SymMatrix t = c0 * tangent_vector(base, frame[0]).sym() + c1 * tangent_vector(base, frame[1]).sym();
    const double nt = frob_norm(t);
    if (nt > 1e-3) return (1.0 / nt) * t;
  }
}

inline void record(std::vector<IdentityStat>& stats, std::size_t i, double v) {
  if (!(v == v)) v = std::numeric_limits<double>::infinity();
  stats[i].worst = std::max(stats[i].worst, v);
}

}  // namespace detail

/// Randomized check of the tangent/normal decomposition, the interrelation
/// memberships, the three trace/product/projector identities, the second
/// fundamental form against a finite-difference curve, and agreement of the
/// harmonic-map forms. Identities are evaluated with s_+ scaled by
/// (1 + s_perturbation) while points are generated with the true s_+; a
/// nonzero perturbation is a mutation test.
inline GeometryReport run_check_geometry(std::uint64_t seed, int trials, double s_perturbation = 0.0) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
  GeometryReport rep{seed, trials, {}};
  const auto add = [&](const char* name, double tol) { rep.stats.push_back({name, 0.0, tol}); };
  enum : std::size_t {
    kRecon, kTangent, kNormal, kDirect, kXY, kZW, kXZ, kTrace, kProduct, kProjector, kCurve, kSym, kII_III,
    kII_IV, kIII_IV
  };
  add("split_reconstruction", 1e-12);
  add("split_tangential", 1e-10);
  add("split_normal", 1e-10);
  add("split_direct_sum", 1e-10);
  add("xy_anticommutator_normal", 1e-10);
  add("zw_anticommutator_normal", 1e-10);
  add("xz_anticommutator_tangent", 1e-10);
  add("trace_identity", 1e-10);
  add("product_identity", 1e-10);
  add("projector_identity", 1e-10);
  add("second_form_vs_curve", 1e-4);
  add("second_form_symmetry", 1e-12);
  add("harmonic_forms_ii_iii", 1e-10);
  add("harmonic_forms_ii_iv", 1e-10);
  add("harmonic_forms_iii_iv", 1e-10);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(0.5, 2.0);
  const double inf = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const MaterialParams p(coef(rng), coef(rng), coef(rng));
    const LimitManifold truth(p);
    const LimitManifold m(truth.s * (1.0 + s_perturbation));
    const double scale = std::max(1.0, m.s * m.s);
    const ManifoldPoint base = make_point(truth, detail::random_unit(rng));
    const SymMatrix x = detail::random_tangent(rng, base);
    const SymMatrix y = detail::random_tangent(rng, base);
    const SymMatrix z = normal_part(detail::random_sym(rng), base, truth);
    const SymMatrix a = detail::random_sym(rng);
    auto& st = rep.stats;

    const TangentNormalSplit sp = split_tangent_normal(a, base, m);
    detail::record(st, kRecon, frob_norm(sp.tangential.sym() + sp.normal - a) / std::max(1.0, frob_norm(a)));
    detail::record(st, kTangent, tangency_residual(sp.tangential.sym(), base, m) / scale);
    detail::record(st, kNormal, normality_residual(sp.normal, base) / scale);
    detail::record(st, kDirect, frob_norm(normal_part(sp.tangential.sym(), base, m)) / scale);

    const IdentityResiduals ids = check_identities(x, y, z, base, m);
    detail::record(st, kXY, ids.xy_normal / scale);
    detail::record(st, kZW, ids.zw_normal / scale);
    detail::record(st, kXZ, ids.xz_tangent / scale);
    detail::record(st, kTrace, std::abs(ids.trace_identity) / scale);
    detail::record(st, kProduct, ids.product_identity / scale);
    detail::record(st, kProjector, ids.projector_identity / scale);

    try {
      const double step = 1e-3;
      const auto curve = [&](double tt) { return project_to_manifold(base.q.sym() + tt * x, m).q.sym(); };
      const SymMatrix second = (1.0 / (step * step)) * (curve(step) - 2.0 * curve(0.0) + curve(-step));
      const QTensor ii_xx = second_fundamental_form(x, x, base, m);
      detail::record(st, kCurve, frob_norm(second - ii_xx.sym()) / scale);
      const QTensor ii_xy = second_fundamental_form(x, y, base, m);
      const QTensor ii_yx = second_fundamental_form(y, x, base, m);
      detail::record(st, kSym, frob_norm(ii_xy.sym() - ii_yx.sym()) / scale);
    } catch (const Error&) {
      detail::record(st, kCurve, inf);
      detail::record(st, kSym, inf);
    }

    const SymMatrix w = detail::random_tangent(rng, base);
    const SymMatrix gsq = square(x) + square(y) + square(w);
    const double gscale = std::max(1.0, frob_norm(gsq)) * std::max(1.0, 1.0 / m.s);
    const Mat3 f2 = harmonic_rhs_raw(base.q.sym(), gsq, m, HarmonicForm::ii);
    const Mat3 f3 = harmonic_rhs_raw(base.q.sym(), gsq, m, HarmonicForm::iii);
    const Mat3 f4 = harmonic_rhs_raw(base.q.sym(), gsq, m, HarmonicForm::iv);
    detail::record(st, kII_III, frob_norm(f2 - f3) / gscale);
    detail::record(st, kII_IV, frob_norm(f2 - f4) / gscale);
    detail::record(st, kIII_IV, frob_norm(f3 - f4) / gscale);
  }
  return rep;
}

inline void print_report(std::ostream& os, const GeometryReport& r) {
  os << "check=geometry seed=" << r.seed << " trials=" << r.trials << '\n';
  for (const auto& s : r.stats)
    os << "identity=" << s.name << " worst=" << format_double(s.worst) << " tol=" << format_double(s.tol)
       << " status=" << (s.ok() ? "ok" : "FAIL") << '\n';
  os << "result=" << (r.passed() ? "pass" : "fail") << '\n';
}

// ---- shared helpers ---------------------------------------------------------

namespace detail {

inline bool non_increasing(const std::vector<double>& e) {
  for (std::size_t i = 1; i < e.size(); ++i)
    if (!(e[i] <= e[i - 1])) return false;
  return true;
}

inline double sup_abs_q(const TensorField& f) {
  double best = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) best = std::max(best, frob_norm(f[i].sym()));
  return best;
}

// Re-raises a solver error with the ladder value attached.
[[noreturn]] inline void rethrow_at(const Error& e, double L) {
  std::string msg = e.what();
  const std::string prefix = std::string(to_string(e.code())) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
  throw Error(e.code(), "L=" + format_double(L) + ": " + msg);
}

inline SolveResult solve_ldg_at(const TensorField& init, const MaterialParams& p, const SolveConfig& cfg) {
  try {
    return solve_ldg(init, p, cfg);
  } catch (const Error& e) {
    rethrow_at(e, p.L());
  }
}

inline double min_width(const GridSpec& g) { return std::min({g.width(0), g.width(1), g.width(2)}); }

}  // namespace detail

// ---- single solves ------------------------------------------------------------

struct SolveSummary {
  std::string solver;
  double L = 0;
  SolveResult result;
  bool monotone = false;
};

inline void write_solve_outputs(const std::filesystem::path& dir, const std::string& stem, const SolveSummary& s) {
  write_field_binary(dir / (stem + ".bin"), s.result.field);
  write_field_csv(dir / (stem + ".csv"), s.result.field);
  CsvTable e({"step", "energy"});
  for (std::size_t i = 0; i < s.result.energies.size(); ++i)
    e.row().cell(static_cast<long long>(i)).cell(s.result.energies[i]);
  write_table(dir / (stem + "_energy.csv"), e);
}

inline void print_summary(std::ostream& os, const SolveSummary& s) {
  os << "solver=" << s.solver;
  if (s.solver == "ldg") os << " L=" << format_double(s.L);
  os << " iterations=" << s.result.iterations << " energy=" << format_double(s.result.final_energy)
     << " residual=" << format_double(s.result.el_residual) << " converged=" << (s.result.converged ? 1 : 0)
     << " monotone=" << (s.monotone ? 1 : 0) << '\n';
}

/// Projected flow for the limit problem from the configured initial field.
inline SolveSummary run_solve_harmonic(const ExperimentConfig& cfg) {
  cfg.validate();
  SolveSummary s{"harmonic", 0.0, solve_harmonic(cfg.initial_field(), cfg.params(), cfg.solver), false};
  s.monotone = detail::non_increasing(s.result.energies);
  return s;
}

/// Gradient flow at the first ladder value from the configured initial field.
inline SolveSummary run_solve_ldg(const ExperimentConfig& cfg) {
  cfg.validate();
  const double L = cfg.l_ladder.front();
  SolveSummary s{"ldg", L, detail::solve_ldg_at(cfg.initial_field(), cfg.params(L), cfg.solver), false};
  s.monotone = detail::non_increasing(s.result.energies);
  return s;
}

// ---- ladder sweep ----------------------------------------------------------------

struct SweepRow {
  double L = 0;
  double energy = 0;
  double el_residual = 0;
  int iterations = 0;
  bool converged = false;
  double l2_err = 0, h1_err = 0, sup_interior_err = 0;
  double sup_y = 0, sup_z = 0, sup_r_interior = 0;
  double a_err_interior = 0;
  double sup_abs_q = 0;
  double remainder_identity = 0;  // max over nodes two layers in
  bool monotone = false;
};

struct SweepFit {
  std::string quantity;
  std::optional<RateFit> fit;
  std::string status;  // "ok", "DegenerateFit" or "skipped"
};

struct SweepReport {
  SolveSummary harmonic;
  std::vector<SweepRow> rows;
  std::vector<TensorField> fields;  // converged Q_L per row
  std::vector<SweepFit> fits;
  std::vector<std::string> warnings;
  double margin = 0, r_margin = 0;

  const SweepFit* find_fit(const std::string& q) const {
    for (const auto& f : fits)
      if (f.quantity == q) return &f;
    return nullptr;
  }
};

inline const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols{
      "L",        "energy",         "el_residual", "iterations",         "converged", "l2_err",
      "h1_err",   "sup_interior_err", "supY",      "supZ",               "supR_interior", "a_err_interior",
      "sup_abs_q", "remainder_identity", "monotone"};
  return cols;
}

inline CsvTable sweep_table(const SweepReport& r) {
  CsvTable t(sweep_columns());
  for (const SweepRow& w : r.rows) {
    t.row()
        .cell(w.L)
        .cell(w.energy)
        .cell(w.el_residual)
        .cell(w.iterations)
        .cell(w.converged)
        .cell(w.l2_err)
        .cell(w.h1_err)
        .cell(w.sup_interior_err)
        .cell(w.sup_y)
        .cell(w.sup_z)
        .cell(w.sup_r_interior)
        .cell(w.a_err_interior)
        .cell(w.sup_abs_q)
        .cell(w.remainder_identity)
        .cell(w.monotone);
  }
  return t;
}

inline CsvTable rates_table(const SweepReport& r) {
  CsvTable t({"quantity", "points", "slope", "intercept", "r_squared", "status"});
  for (const SweepFit& f : r.fits) {
    t.row().text(f.quantity);
    if (f.fit) {
      t.cell(static_cast<long long>(f.fit->ls.size())).cell(f.fit->slope).cell(f.fit->intercept).cell(f.fit->r_squared);
    } else {
      t.text("0").text("").text("").text("");
    }
    t.text(f.status);
  }
  return t;
}

/// Solves the limit problem, then the ladder largest L first, each warm-started
/// from the previous solution, and evaluates all diagnostics against Q_*.
inline SweepReport run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const GridSpec g = cfg.grid();
  SweepReport rep{run_solve_harmonic(cfg), {}, {}, {}, {}, cfg.margin, 0.25 * detail::min_width(g)};
  const TensorField& q_star = rep.harmonic.result.field;

  TensorField current = q_star;
  for (double L : cfg.l_ladder) {
    const MaterialParams p = cfg.params(L);
    SolveResult res = detail::solve_ldg_at(current, p, cfg.solver);
    SweepRow row;
    row.L = L;
    row.energy = res.final_energy;
    row.el_residual = res.el_residual;
    row.iterations = res.iterations;
    row.converged = res.converged;
    row.monotone = detail::non_increasing(res.energies);
    const FieldNorms nm = norms(res.field, q_star, cfg.margin);
    row.l2_err = nm.l2;
    row.h1_err = nm.h1_semi;
    row.sup_interior_err = nm.sup_interior;
    const DiagnosticFields d = compute_xyz(res.field, p);
    row.sup_y = interior_sup(d.y, cfg.margin, [](double v) { return std::abs(v); });
    row.sup_z = interior_sup(d.z, cfg.margin, [](const Mat3& m) { return frob_norm(m); });
    row.sup_r_interior = interior_sup(d.r, rep.r_margin, [](const Mat3& m) { return frob_norm(m); });
    const CorrectorFields cf = split_corrector(res.field, q_star, p);
    TensorField a_diff(g);
    for (std::size_t i = 0; i < a_diff.size(); ++i) a_diff[i] = cf.a_emp[i] - cf.a_field[i];
    row.a_err_interior = interior_sup(a_diff, cfg.margin, [](const QTensor& q) { return frob_norm(q.sym()); });
    row.sup_abs_q = detail::sup_abs_q(res.field);
    const ScalarField rid = remainder_identity_residual(res.field, p);
    for (const Node& n : g.interior_nodes(2)) row.remainder_identity = std::max(row.remainder_identity, rid(n));
    rep.rows.push_back(row);
    current = res.field;
    rep.fields.push_back(std::move(res.field));
  }

  const std::vector<std::pair<std::string, double SweepRow::*>> quantities{
      {"l2_err", &SweepRow::l2_err},           {"h1_err", &SweepRow::h1_err},
      {"sup_interior_err", &SweepRow::sup_interior_err}, {"supY", &SweepRow::sup_y},
      {"supZ", &SweepRow::sup_z},              {"supR_interior", &SweepRow::sup_r_interior},
      {"a_err_interior", &SweepRow::a_err_interior}};
  if (cfg.l_ladder.size() < 3) {
    rep.warnings.push_back("ladder has " + std::to_string(cfg.l_ladder.size()) +
                           " value(s); at least 3 are needed for a rate fit");
    for (const auto& [name, member] : quantities) rep.fits.push_back({name, std::nullopt, "skipped"});
    return rep;
  }
  for (const auto& [name, member] : quantities) {
    std::vector<double> errs;
    for (const SweepRow& r : rep.rows) errs.push_back(r.*member);
    try {
      rep.fits.push_back({name, fit_rate(cfg.l_ladder, errs), "ok"});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateFit) throw;
      rep.fits.push_back({name, std::nullopt, "DegenerateFit"});
      rep.warnings.push_back(name + ": " + e.what());
    }
  }
  return rep;
}

inline void write_sweep_outputs(const std::filesystem::path& dir, const SweepReport& r) {
  write_table(dir / "sweep.csv", sweep_table(r));
  write_table(dir / "rates.csv", rates_table(r));
  write_field_binary(dir / "q_star.bin", r.harmonic.result.field);
  for (std::size_t i = 0; i < r.fields.size(); ++i)
    write_field_binary(dir / ("q_L" + std::to_string(i) + ".bin"), r.fields[i]);
}

inline void print_report(std::ostream& os, const SweepReport& r) {
  print_summary(os, r.harmonic);
  for (const SweepRow& w : r.rows)
    os << "L=" << format_double(w.L) << " iterations=" << w.iterations << " residual=" << format_double(w.el_residual)
       << " l2_err=" << format_double(w.l2_err) << " sup_interior_err=" << format_double(w.sup_interior_err)
       << " supY=" << format_double(w.sup_y) << " supZ=" << format_double(w.sup_z)
       << " supR_interior=" << format_double(w.sup_r_interior) << " a_err_interior=" << format_double(w.a_err_interior)
       << " monotone=" << (w.monotone ? 1 : 0) << '\n';
  for (const SweepFit& f : r.fits) {
    os << "fit=" << f.quantity << " status=" << f.status;
    if (f.fit) os << " slope=" << format_double(f.fit->slope) << " r_squared=" << format_double(f.fit->r_squared);
    os << '\n';
  }
  for (const auto& w : r.warnings) os << "warning: " << w << '\n';
}

// ---- corrector -------------------------------------------------------------------

/// max ||A - (k/r^2)(x x^T/r^2 - I/3)|| over interior nodes with r >= r_min,
/// r measured from the box center, for A = corrector_a of the sampled hedgehog.
inline double hedgehog_corrector_deviation(const GridSpec& g, const MaterialParams& p, double k, double r_min) {
  const TensorField q = boundary_hedgehog(g, p);
  const TensorField a = corrector_a(q, p);
  const Vec3 c = g.center();
  double worst = 0.0;
  for (const Node& n : g.interior_nodes()) {
    const Vec3 x0 = g.position(n);
    const Vec3 x{x0[0] - c[0], x0[1] - c[1], x0[2] - c[2]};
    const double r = norm(x);
    if (r < r_min) continue;
    const SymMatrix exact = (k / (r * r)) * (SymMatrix::outer(normalized(x)) - (1.0 / 3.0) * SymMatrix::identity());
    worst = std::max(worst, frob_norm(a(n).sym() - exact));
  }
  return worst;
}

struct HedgehogCheck {
  double coefficient = 0;          // k with A = (k/r^2)(x x^T/r^2 - I/3)
  double bracket_coefficient = 0;  // same without the -2/(b^2 s^2) prefactor
  double r_min = 0;
  std::array<int, 2> dims{};
  std::array<double, 2> h{};
  std::array<double, 2> dev{};
  std::array<double, 2> dev_bracket{};
  double ratio() const { return dev[0] / dev[1]; }
  double ratio_bracket() const { return dev_bracket[0] / dev_bracket[1]; }
};

struct CorrectorRow {
  double L = 0;
  double a_err_interior = 0;     // sup ||normal part of (Q_L - Q_*)/L - A||
  double b_residual_interior = 0;
  double a_norm_interior = 0;
  double qdot_norm_interior = 0;
};

struct CorrectorReport {
  std::optional<HedgehogCheck> hedgehog;
  std::vector<CorrectorRow> rows;
};

/// Two-grid comparison of corrector_a on the hedgehog (dims and 2 dims per axis).
inline HedgehogCheck check_hedgehog_corrector(const ExperimentConfig& cfg) {
  const MaterialParams p = cfg.params();
  const GridSpec coarse = cfg.grid();
  const GridSpec fine({2 * cfg.dims[0], 2 * cfg.dims[1], 2 * cfg.dims[2]}, cfg.box_lo, cfg.box_hi);
  HedgehogCheck hc;
  hc.coefficient = hedgehog_corrector_coefficient(p);
  hc.bracket_coefficient = hedgehog_bracket_coefficient(p);
  hc.r_min = 0.25 * detail::min_width(coarse);
  const GridSpec grids[2] = {coarse, fine};
  for (int i = 0; i < 2; ++i) {
    hc.dims[i] = grids[i].dims()[0];
    hc.h[i] = grids[i].h(0);
    hc.dev[i] = hedgehog_corrector_deviation(grids[i], p, hc.coefficient, hc.r_min);
    hc.dev_bracket[i] = hedgehog_corrector_deviation(grids[i], p, hc.bracket_coefficient, hc.r_min);
  }
  return hc;
}

/// Hedgehog boundary: closed-form comparison on two grids. Near-constant
/// boundary: empirical corrector along the ladder against corrector_a, plus
/// the residual of the tangential corrector equation.
inline CorrectorReport run_corrector(const ExperimentConfig& cfg) {
  cfg.validate();
  CorrectorReport rep;
  if (cfg.boundary == BoundaryKind::Hedgehog) {
    rep.hedgehog = check_hedgehog_corrector(cfg);
    return rep;
  }
  const SolveSummary harm = run_solve_harmonic(cfg);
  const TensorField& q_star = harm.result.field;
  TensorField current = q_star;
  const auto mag = [](const QTensor& q) { return frob_norm(q.sym()); };
  for (double L : cfg.l_ladder) {
    const MaterialParams p = cfg.params(L);
    const SolveResult res = detail::solve_ldg_at(current, p, cfg.solver);
    const CorrectorFields cf = split_corrector(res.field, q_star, p);
    TensorField diff(q_star.grid());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = cf.a_emp[i] - cf.a_field[i];
    const ScalarField br = corrector_b_residual(q_star, cf.a_field, cf.b_field, p);
    CorrectorRow row;
    row.L = L;
    row.a_err_interior = interior_sup(diff, cfg.margin, mag);
    row.b_residual_interior = interior_sup(br, cfg.margin, [](double v) { return v; });
    row.a_norm_interior = interior_sup(cf.a_field, cfg.margin, mag);
    row.qdot_norm_interior = interior_sup(cf.qdot_field, cfg.margin, mag);
    rep.rows.push_back(row);
    current = res.field;
  }
  return rep;
}

inline void write_corrector_outputs(const std::filesystem::path& dir, const CorrectorReport& r) {
  if (r.hedgehog) {
    const HedgehogCheck& h = *r.hedgehog;
    CsvTable t({"dims", "h", "coefficient", "dev", "bracket_coefficient", "dev_bracket"});
    for (int i = 0; i < 2; ++i)
      t.row().cell(h.dims[i]).cell(h.h[i]).cell(h.coefficient).cell(h.dev[i]).cell(h.bracket_coefficient).cell(h.dev_bracket[i]);
    write_table(dir / "corrector_hedgehog.csv", t);
    return;
  }
  CsvTable t({"L", "a_err_interior", "b_residual_interior", "a_norm_interior", "qdot_norm_interior"});
  for (const auto& w : r.rows)
    t.row().cell(w.L).cell(w.a_err_interior).cell(w.b_residual_interior).cell(w.a_norm_interior).cell(w.qdot_norm_interior);
  write_table(dir / "corrector.csv", t);
}

inline void print_report(std::ostream& os, const CorrectorReport& r) {
  if (r.hedgehog) {
    const HedgehogCheck& h = *r.hedgehog;
    os << "hedgehog coefficient=" << format_double(h.coefficient) << " r_min=" << format_double(h.r_min) << '\n';
    for (int i = 0; i < 2; ++i)
      os << "grid=" << h.dims[i] << " h=" << format_double(h.h[i]) << " dev=" << format_double(h.dev[i])
         << " dev_bracket=" << format_double(h.dev_bracket[i]) << '\n';
    os << "richardson_ratio=" << format_double(h.ratio()) << " richardson_ratio_bracket="
       << format_double(h.ratio_bracket()) << '\n';
    return;
  }
  for (const auto& w : r.rows)
    os << "L=" << format_double(w.L) << " a_err_interior=" << format_double(w.a_err_interior)
       << " b_residual_interior=" << format_double(w.b_residual_interior)
       << " a_norm_interior=" << format_double(w.a_norm_interior)
       << " qdot_norm_interior=" << format_double(w.qdot_norm_interior) << '\n';
}

}  // namespace ldg
