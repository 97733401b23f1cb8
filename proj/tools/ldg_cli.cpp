// Command-line runner for the Landau-de Gennes experiments.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ldg/ldg.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  int threads = 1;
  std::optional<long long> seed;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "key=value configuration file");
  if (config_required) opt->required();
  cmd->add_option("--out", c.out, "output directory (overrides output_dir)");
  cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "random seed (overrides seed)")->check(CLI::NonNegativeNumber);
}

ldg::ExperimentConfig resolve(const Common& c) {
  ldg::ExperimentConfig cfg = c.config.empty() ? ldg::ExperimentConfig{} : ldg::load_config(c.config);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.seed) cfg.seed = static_cast<std::uint64_t>(*c.seed);
  cfg.validate();
  ldg::set_thread_count(c.threads);
  if (cfg.solver.log_every > 0) cfg.solver.log = &std::cerr;
  return cfg;
}

void save_config(const ldg::ExperimentConfig& cfg) {
  const std::filesystem::path dir = cfg.output_dir;
  std::filesystem::create_directories(dir);
  std::ofstream os(dir / "config.cfg");
  os << ldg::serialize(cfg);
  if (!os) throw ldg::Error(ldg::ErrorCode::Io, "cannot write " + (dir / "config.cfg").string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landau-de Gennes gradient flows, harmonic-map limit and corrector diagnostics"};
  app.require_subcommand(1);

  Common geo, harm, ldgc, sweep, corr;
  int trials = -1;
  double perturb = 0.0;
  auto* c_geo = app.add_subcommand("check-geometry", "randomized identity suite for the limit manifold");
  add_common(c_geo, geo, false);
  c_geo->add_option("--trials", trials, "number of random trials (overrides trials)")->check(CLI::PositiveNumber);
  c_geo->add_option("--perturb-s", perturb, "relative perturbation of s_+ used when checking (mutation test)");
  auto* c_harm = app.add_subcommand("solve-harmonic", "projected gradient flow for the limit problem");
  add_common(c_harm, harm, true);
  auto* c_ldg = app.add_subcommand("solve-ldg", "gradient flow at the first ladder value of L");
  add_common(c_ldg, ldgc, true);
  auto* c_sweep = app.add_subcommand("sweep", "limit problem plus the L ladder, diagnostics and rate fits");
  add_common(c_sweep, sweep, true);
  auto* c_corr = app.add_subcommand("corrector", "first-order corrector checks");
  add_common(c_corr, corr, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_geo->parsed()) {
      ldg::ExperimentConfig cfg = resolve(geo);
      const int n = trials > 0 ? trials : cfg.trials;
      const ldg::GeometryReport rep = ldg::run_check_geometry(cfg.seed, n, perturb);
      ldg::print_report(std::cout, rep);
      return rep.passed() ? 0 : 1;
    }
    if (c_harm->parsed() || c_ldg->parsed()) {
      const bool harmonic = c_harm->parsed();
      const ldg::ExperimentConfig cfg = resolve(harmonic ? harm : ldgc);
      const ldg::SolveSummary s = harmonic ? ldg::run_solve_harmonic(cfg) : ldg::run_solve_ldg(cfg);
      save_config(cfg);
      ldg::write_solve_outputs(cfg.output_dir, harmonic ? "q_star" : "q_L", s);
      ldg::print_summary(std::cout, s);
      return s.result.converged ? 0 : 1;
    }
    if (c_sweep->parsed()) {
      const ldg::ExperimentConfig cfg = resolve(sweep);
      const ldg::SweepReport rep = ldg::run_sweep(cfg);
      save_config(cfg);
      ldg::write_sweep_outputs(cfg.output_dir, rep);
      ldg::print_report(std::cout, rep);
      return 0;
    }
    if (c_corr->parsed()) {
      const ldg::ExperimentConfig cfg = resolve(corr);
      const ldg::CorrectorReport rep = ldg::run_corrector(cfg);
      save_config(cfg);
      ldg::write_corrector_outputs(cfg.output_dir, rep);
      ldg::print_report(std::cout, rep);
      return 0;
    }
  } catch (const ldg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
