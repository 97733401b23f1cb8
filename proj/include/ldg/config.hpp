#pragma once

// Flat key=value experiment configuration. Blank lines and lines starting
// with '#' are ignored; every key may appear at most once; unknown keys are
// rejected. Lists are comma-separated. Defaults are resolved at parse time,
// so serialize() always writes every key.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ldg/error.hpp"
#include "ldg/field.hpp"
#include "ldg/io.hpp"
#include "ldg/params.hpp"
#include "ldg/solver.hpp"

namespace ldg {

enum class BoundaryKind { Hedgehog, NearConstant };

inline std::string_view to_string(BoundaryKind b) {
  return b == BoundaryKind::Hedgehog ? "hedgehog" : "near_constant";
}
inline std::string_view to_string(DirectorPattern p) {
  switch (p) {
    case DirectorPattern::Constant: return "constant";
    case DirectorPattern::TiltSin: return "tilt_sin";
    case DirectorPattern::TwistLinear: return "twist_linear";
  }
  return "constant";
}

struct ExperimentConfig {
  double a2 = 1.0, b2 = 1.0, c2 = 1.0;
  std::vector<double> l_ladder{0.16, 0.08, 0.04, 0.02};
  std::array<int, 3> dims{16, 16, 16};
  Vec3 box_lo{-4.0, -4.0, -4.0};
  Vec3 box_hi{4.0, 4.0, 4.0};
  BoundaryKind boundary = BoundaryKind::NearConstant;
  double eps = 0.2;
  DirectorPattern pattern = DirectorPattern::TiltSin;
  SolveConfig solver{};
  double margin = 2.0;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  int trials = 10000;

  MaterialParams params(double L = 1.0) const { return {a2, b2, c2, L}; }
  GridSpec grid() const { return {dims, box_lo, box_hi}; }

  /// Initial field: boundary data on every node.
  TensorField initial_field() const {
    const MaterialParams p = params();
    return boundary == BoundaryKind::Hedgehog ? boundary_hedgehog(grid(), p)
                                              : boundary_near_constant(grid(), p, eps, pattern);
  }

  void validate() const {
    (void)params();
    const GridSpec g = grid();
    if (l_ladder.empty()) throw Error(ErrorCode::InvalidArgument, "l_ladder must not be empty");
    for (std::size_t i = 0; i < l_ladder.size(); ++i) {
      if (!(l_ladder[i] > 0)) throw Error(ErrorCode::InvalidArgument, "l_ladder entries must be positive");
      if (i > 0 && !(l_ladder[i] < l_ladder[i - 1]))
        throw Error(ErrorCode::InvalidArgument, "l_ladder must be strictly descending");
    }
    if (!(eps >= 0)) throw Error(ErrorCode::InvalidArgument, "eps must be non-negative");
    solver.validate();
    const double hmax = std::max({g.h(0), g.h(1), g.h(2)});
    const double half = 0.5 * std::min({g.width(0), g.width(1), g.width(2)});
    if (!(margin >= 2.0 * hmax)) throw Error(ErrorCode::InvalidArgument, "margin must be at least 2h");
    if (!(margin < half)) throw Error(ErrorCode::InvalidArgument, "margin must be below half the box width");
    if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
    if (output_dir.empty()) throw Error(ErrorCode::InvalidArgument, "output_dir must not be empty");
  }

  bool operator==(const ExperimentConfig& o) const {
    const SolveConfig &s = solver, &t = o.solver;
    return a2 == o.a2 && b2 == o.b2 && c2 == o.c2 && l_ladder == o.l_ladder && dims == o.dims &&
           box_lo == o.box_lo && box_hi == o.box_hi && boundary == o.boundary && eps == o.eps &&
           pattern == o.pattern && s.dt_safety == t.dt_safety && s.max_iters == t.max_iters &&
           s.rel_energy_tol == t.rel_energy_tol && s.residual_tol == t.residual_tol &&
           s.log_every == t.log_every && margin == o.margin && output_dir == o.output_dir && seed == o.seed &&
           trials == o.trials;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

inline std::vector<double> parse_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  try {
    for (const auto& item : split_list(v)) out.push_back(parse_double(item));
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidArgument, key + ": " + e.what());
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, key + ": empty list");
  return out;
}

inline double parse_scalar(const std::string& key, const std::string& v) {
  const auto xs = parse_doubles(key, v);
  if (xs.size() != 1) throw Error(ErrorCode::InvalidArgument, key + ": expected one number");
  return xs[0];
}

inline long long parse_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw Error(ErrorCode::InvalidArgument, key + ": expected an integer, got '" + v + "'");
  return out;
}

// One value applies to all three axes.
inline Vec3 parse_vec3(const std::string& key, const std::string& v) {
  const auto xs = parse_doubles(key, v);
  if (xs.size() == 1) return {xs[0], xs[0], xs[0]};
  if (xs.size() == 3) return {xs[0], xs[1], xs[2]};
  throw Error(ErrorCode::InvalidArgument, key + ": expected 1 or 3 numbers");
}

inline std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_double(xs[i]);
  return out;
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = detail::trim(std::string_view(t).substr(0, eq));
    const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second) throw Error(ErrorCode::InvalidArgument, "duplicate key '" + key + "'");
  }

  ExperimentConfig c;
  std::optional<double> margin;
  for (const auto& [key, v] : kv) {
    if (key == "a2") c.a2 = detail::parse_scalar(key, v);
    else if (key == "b2") c.b2 = detail::parse_scalar(key, v);
    else if (key == "c2") c.c2 = detail::parse_scalar(key, v);
    else if (key == "l_ladder") c.l_ladder = detail::parse_doubles(key, v);
    else if (key == "grid") {
      const auto items = detail::split_list(v);
      if (items.size() != 1 && items.size() != 3) throw Error(ErrorCode::InvalidArgument, "grid: expected 1 or 3 integers");
      for (int a = 0; a < 3; ++a)
        c.dims[a] = static_cast<int>(detail::parse_integer(key, items[items.size() == 1 ? 0 : a]));
    } else if (key == "box_lo") c.box_lo = detail::parse_vec3(key, v);
    else if (key == "box_hi") c.box_hi = detail::parse_vec3(key, v);
    else if (key == "boundary") {
      if (v == "hedgehog") c.boundary = BoundaryKind::Hedgehog;
      else if (v == "near_constant") c.boundary = BoundaryKind::NearConstant;
      else throw Error(ErrorCode::InvalidArgument, "boundary: expected hedgehog or near_constant");
    } else if (key == "eps") c.eps = detail::parse_scalar(key, v);
    else if (key == "pattern") {
      if (v == "constant") c.pattern = DirectorPattern::Constant;
      else if (v == "tilt_sin") c.pattern = DirectorPattern::TiltSin;
      else if (v == "twist_linear") c.pattern = DirectorPattern::TwistLinear;
      else throw Error(ErrorCode::InvalidArgument, "pattern: expected constant, tilt_sin or twist_linear");
    } else if (key == "dt_safety") c.solver.dt_safety = detail::parse_scalar(key, v);
    else if (key == "max_iters") c.solver.max_iters = static_cast<int>(detail::parse_integer(key, v));
    else if (key == "rel_energy_tol") c.solver.rel_energy_tol = detail::parse_scalar(key, v);
    else if (key == "residual_tol") c.solver.residual_tol = detail::parse_scalar(key, v);
    else if (key == "log_every") c.solver.log_every = static_cast<int>(detail::parse_integer(key, v));
    else if (key == "margin") margin = detail::parse_scalar(key, v);
    else if (key == "output_dir") c.output_dir = v;
    else if (key == "seed") {
      const long long s = detail::parse_integer(key, v);
      if (s < 0) throw Error(ErrorCode::InvalidArgument, "seed must be non-negative");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "trials") c.trials = static_cast<int>(detail::parse_integer(key, v));
    else throw Error(ErrorCode::InvalidArgument, "unknown key '" + key + "'");
  }
  const GridSpec g = c.grid();
  c.margin = margin.value_or(0.25 * std::min({g.width(0), g.width(1), g.width(2)}));
  c.validate();
  return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  return parse_config(is);
}

inline std::string serialize(const ExperimentConfig& c) {
  std::ostringstream os;
  const auto vec = [](const Vec3& v) { return detail::join({v[0], v[1], v[2]}); };
  os << "a2=" << format_double(c.a2) << '\n'
     << "b2=" << format_double(c.b2) << '\n'
     << "c2=" << format_double(c.c2) << '\n'
     << "l_ladder=" << detail::join(c.l_ladder) << '\n'
     << "grid=" << c.dims[0] << ',' << c.dims[1] << ',' << c.dims[2] << '\n'
     << "box_lo=" << vec(c.box_lo) << '\n'
     << "box_hi=" << vec(c.box_hi) << '\n'
     << "boundary=" << to_string(c.boundary) << '\n'
     << "eps=" << format_double(c.eps) << '\n'
     << "pattern=" << to_string(c.pattern) << '\n'
     << "dt_safety=" << format_double(c.solver.dt_safety) << '\n'
     << "max_iters=" << c.solver.max_iters << '\n'
     << "rel_energy_tol=" << format_double(c.solver.rel_energy_tol) << '\n'
     << "residual_tol=" << format_double(c.solver.residual_tol) << '\n'
     << "log_every=" << c.solver.log_every << '\n'
     << "margin=" << format_double(c.margin) << '\n'
     << "output_dir=" << c.output_dir << '\n'
     << "seed=" << c.seed << '\n'
     << "trials=" << c.trials << '\n';
  return os.str();
}

}  // namespace ldg
