#include <iostream>

#include "CLI11.hpp"
#include "sweep/harness.hpp"

namespace {

void add_common(CLI::App* cmd, sweep::CommonOptions& o, std::optional<std::uint64_t>& seed) {
  cmd->add_option("--config", o.config, "experiment config (JSON)")->required();
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", seed, "override the config seed");
  cmd->add_flag("--strict", o.strict, "treat Picard non-convergence as an error");
  cmd->add_flag("--repro", o.repro, "omit timestamps so repeated runs produce identical files");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation harness for sweeping processes with rough perturbations"};
  app.require_subcommand(1);

  sweep::CommonOptions sim_opts, conv_opts;
  std::optional<std::uint64_t> sim_seed, conv_seed;
  auto* sim = app.add_subcommand("simulate", "solve one configured problem and write its trajectory");
  add_common(sim, sim_opts, sim_seed);

  auto* conv = app.add_subcommand("converge", "run a nested grid ladder and report sup gaps");
  add_common(conv, conv_opts, conv_seed);
  std::vector<std::size_t> levels;
  conv->add_option("--levels", levels, "grid sizes, ascending and nested")->delimiter(',');

  sweep::FbmOptions fbm_opts;
  std::string method = "hosking";
  auto* fbm = app.add_subcommand("fbm", "sample fractional Brownian motion");
  fbm->add_option("--hurst", fbm_opts.spec.hurst, "Hurst parameter in (1/3, 1)")->required();
  fbm->add_option("--T", fbm_opts.spec.horizon, "horizon");
  fbm->add_option("--n", fbm_opts.spec.n, "number of steps");
  fbm->add_option("--dims", fbm_opts.spec.dims, "independent components");
  fbm->add_option("--seed", fbm_opts.spec.seed, "seed");
  fbm->add_option("--method", method, "hosking or cholesky")->check(CLI::IsMember({"hosking", "cholesky"}));
  fbm->add_option("--out", fbm_opts.out, "output directory");
  fbm->add_option("--file", fbm_opts.file, "output file name");
  fbm->add_flag("--repro", fbm_opts.repro, "omit timestamps");

  sweep::PvarOptions pvar_opts;
  auto* pvar = app.add_subcommand("pvar", "p-variation of a path stored as CSV");
  pvar->add_option("--input", pvar_opts.input, "CSV file")->required();
  pvar->add_option("--p", pvar_opts.p, "exponent p >= 1");
  pvar->add_option("--columns", pvar_opts.columns, "columns forming the path (default: all but t)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : sweep::kExitConfig;
  }

  if (sim->parsed()) {
    sim_opts.seed = sim_seed;
    return sweep::run_simulate(sim_opts, std::cout, std::cerr);
  }
  if (conv->parsed()) {
    conv_opts.seed = conv_seed;
    return sweep::run_converge(conv_opts, levels, std::cout, std::cerr);
  }
  if (fbm->parsed()) {
    fbm_opts.method = sweep::fbm_method_from_string(method);
    return sweep::run_fbm(fbm_opts, std::cout, std::cerr);
  }
  return sweep::run_pvar(pvar_opts, std::cout, std::cerr);
}
