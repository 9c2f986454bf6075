#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sweep/csv.hpp"
#include "sweep/diagnostics.hpp"
#include "sweep/fbm.hpp"
#include "sweep/solvers.hpp"

namespace sweep {

/// Malformed or incomplete experiment configuration (exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3 };

struct FieldConfig {
  std::string kind = "zero";  // zero | constant | linear | scalar-trig
  Matrix constant;            // constant, linear
  std::vector<Matrix> slopes; // linear
  double amplitude = 1.0, frequency = 1.0, phase = 0.0;  // scalar-trig
};

struct DriverConfig {
  std::string kind = "zero";  // zero | csv | fbm | analytic
  int dims = 0;               // 0: inferred from scheme and field
  double scale = 1.0;
  // csv
  std::filesystem::path path;
  std::vector<std::string> columns;
  // fbm
  double hurst = 0.5;
  FbmMethod method = FbmMethod::Hosking;
  bool time_space = false;
  // analytic: slope t (+ amplitude sin(omega t) for "sine") in every coordinate
  std::string name = "linear";
  double slope = 1.0, amplitude = 0.0, omega = 0.0;
};

struct ExperimentConfig {
  Scheme scheme = Scheme::CatchingUp;
  double T = 1.0;
  std::size_t n = 256;
  std::uint64_t seed = 0;
  std::shared_ptr<const MovingConvexSet> set;
  Vector initial;
  FieldConfig field;
  DriverConfig driver;
  double proj_tol = kDefaultProjTol;
  double tol = 1e-8;
  double tol_u = 1e-6;
  std::size_t max_iter = 200;
  std::vector<std::size_t> levels;
  /// Time regularity exponent of the set motion used for the theoretical rate.
  double alpha = 1.0;
  /// Driver variation exponent; defaults to 1/H + 0.01 for fBm and 1 otherwise.
  std::optional<double> q;
  std::string trajectory_file = "trajectory.csv";
  std::string converge_file = "converge.csv";
  /// Canonical compact JSON of the parsed input.
  std::string echo;

  Eigen::Index state_dim() const { return initial.size(); }
  /// Driver dimension after time-space augmentation.
  Eigen::Index driver_dim() const;
  double theory_order() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Driver path on a uniform grid with n steps (CSV drivers keep their own grid
/// and ignore n).
SamplePath build_driver(const ExperimentConfig& cfg, std::size_t n);
VectorField build_field(const ExperimentConfig& cfg);
/// Runs the configured scheme against `driver` (built with cfg.n if absent).
SweepingRun run_experiment(const ExperimentConfig& cfg, const std::optional<SamplePath>& driver = std::nullopt);

struct RunSummary {
  double feasibility_max = 0.0;
  double y_one_variation = 0.0;
};
RunSummary summarize(const SweepingRun& run, const ExperimentConfig& cfg);

/// Columns t, X1..Xe, H1..He, Y1..Ye with '#' metadata; `timestamp` is
/// appended as a metadata line when nonempty.
CsvTable trajectory_table(const SweepingRun& run, const ExperimentConfig& cfg, const RunSummary& summary,
                          const std::string& timestamp = {});

// -- command entry points ---------------------------------------------------

struct CommonOptions {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  bool strict = false;
  bool repro = false;
};

int run_simulate(const CommonOptions& opts, std::ostream& out, std::ostream& err);
/// Empty n_list: take "levels" from the config.
int run_converge(const CommonOptions& opts, std::vector<std::size_t> n_list, std::ostream& out, std::ostream& err);

struct FbmOptions {
  FbmSpec spec;
  FbmMethod method = FbmMethod::Hosking;
  std::filesystem::path out = ".";
  std::string file = "fbm.csv";
  bool repro = false;
};
int run_fbm(const FbmOptions& opts, std::ostream& out, std::ostream& err);

struct PvarOptions {
  std::filesystem::path input;
  double p = 1.0;
  /// Columns forming the path; all columns other than "t" when empty.
  std::vector<std::string> columns;
};
int run_pvar(const PvarOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace sweep
