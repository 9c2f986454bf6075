#include "sweep/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "sweep/errors.hpp"

namespace sweep {

using json = nlohmann::json;

namespace {

// -- JSON helpers -----------------------------------------------------------

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw ConfigError("missing required field '" + where + (where.empty() ? "" : ".") + key + "'");
  return obj.at(key);
}

double as_double(const json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError("field '" + what + "' must be a number");
}

double get_double(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return as_double(obj.at(key), where + "." + key);
}

std::size_t as_size(const json& v, const std::string& what) {
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::size_t>(v.get<long long>());
  throw ConfigError("field '" + what + "' must be a nonnegative integer");
}

std::string as_string(const json& v, const std::string& what) {
  if (!v.is_string()) throw ConfigError("field '" + what + "' must be a string");
  return v.get<std::string>();
}

Vector as_vector(const json& v, const std::string& what) {
  if (v.is_number()) return Vector::Constant(1, v.get<double>());
  if (!v.is_array() || v.empty()) throw ConfigError("field '" + what + "' must be a nonempty array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = as_double(v[i], what);
  return out;
}

Matrix as_matrix(const json& v, const std::string& what) {
  if (v.is_number()) return Matrix::Constant(1, 1, v.get<double>());
  if (!v.is_array() || v.empty() || !v[0].is_array() || v[0].empty())
    throw ConfigError("field '" + what + "' must be a nonempty array of rows");
  const std::size_t cols = v[0].size();
  Matrix out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < v.size(); ++r) {
    if (!v[r].is_array() || v[r].size() != cols) throw ConfigError("field '" + what + "' has ragged rows");
    for (std::size_t c = 0; c < cols; ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = as_double(v[r][c], what);
  }
  return out;
}

// -- set --------------------------------------------------------------------

struct BaseSet {
  ConvexSet set;
  Vector gamma;
  double r;
};

BaseSet parse_base_set(const json& s, const json& params) {
  const std::string family = as_string(require(s, "family", "set"), "set.family");
  if (family == "ball") {
    const Vector c = as_vector(require(params, "center", "set.params"), "set.params.center");
    const double rad = as_double(require(params, "radius", "set.params"), "set.params.radius");
    return {ConvexSet::ball(c, rad), c, rad};
  }
  if (family == "box") {
    const Vector lo = as_vector(require(params, "lower", "set.params"), "set.params.lower");
    const Vector hi = as_vector(require(params, "upper", "set.params"), "set.params.upper");
    ConvexSet box = ConvexSet::box(lo, hi);
    if (!lo.allFinite() || !hi.allFinite()) return {box, Vector(), 0.0};
    return {box, 0.5 * (lo + hi), 0.5 * (hi - lo).minCoeff()};
  }
  if (family == "polytope") {
    const Matrix normals = as_matrix(require(params, "normals", "set.params"), "set.params.normals");
    const Vector offsets = as_vector(require(params, "offsets", "set.params"), "set.params.offsets");
    if (offsets.size() != normals.rows()) throw ConfigError("set.params: one offset per normal is required");
    std::vector<Halfspace> hs;
    for (Eigen::Index i = 0; i < normals.rows(); ++i) hs.push_back({normals.row(i).transpose(), offsets[i]});
    Polytope p(std::move(hs));
    Vector centre = p.chebyshev_center();
    const double rad = p.inradius();
    return {ConvexSet(std::move(p)), std::move(centre), rad};
  }
  throw ConfigError("set.family must be ball, box or polytope (got '" + family + "')");
}

struct SetParse {
  std::shared_ptr<const MovingConvexSet> set;
  double alpha;
};

SetParse parse_set(const json& s, double T) {
  static const json kEmpty = json::object();
  const json& params = s.contains("params") ? s.at("params") : kEmpty;
  BaseSet base = parse_base_set(s, params);
  if (s.contains("gamma")) base.gamma = as_vector(s.at("gamma"), "set.gamma");
  if (s.contains("r")) base.r = as_double(s.at("r"), "set.r");
  if (base.gamma.size() == 0)
    throw ConfigError("set: an unbounded box needs explicit 'gamma' and 'r'");
  if (base.gamma.size() != base.set.dim()) throw ConfigError("set.gamma has the wrong dimension");
  if (!(base.r > 0.0) || !std::isfinite(base.r)) throw ConfigError("set.r must be positive and finite");

  std::optional<Hoelder> declared;
  if (s.contains("hoelder")) {
    const json& h = s.at("hoelder");
    declared = Hoelder{as_double(require(h, "K", "set.hoelder"), "set.hoelder.K"),
                       as_double(require(h, "alpha", "set.hoelder"), "set.hoelder.alpha")};
    if (!(declared->alpha > 0.0 && declared->alpha <= 1.0)) throw ConfigError("set.hoelder.alpha must lie in (0, 1]");
  }

  std::string motion = "none";
  const json* mj = nullptr;
  if (s.contains("motion")) {
    mj = &s.at("motion");
    if (mj->is_string()) motion = mj->get<std::string>();
    else motion = as_string(require(*mj, "kind", "set.motion"), "set.motion.kind");
  }
  const Eigen::Index e = base.set.dim();
  if (motion == "none") {
    auto m = std::make_shared<MovingConvexSet>(MovingConvexSet::constant(T, base.set, base.gamma, base.r));
    return {m, declared ? declared->alpha : 1.0};
  }
  if (motion == "linear") {
    const Vector v = as_vector(require(*mj, "velocity", "set.motion"), "set.motion.velocity");
    if (v.size() != e) throw ConfigError("set.motion.velocity has the wrong dimension");
    const Hoelder h = declared.value_or(Hoelder{v.norm(), 1.0});
    auto m = std::make_shared<MovingConvexSet>(MovingConvexSet::translating(
        T, base.set, [v](double t) -> Vector { return t * v; }, base.gamma, base.r, h));
    return {m, h.alpha};
  }
  if (motion == "sine") {
    const Vector a = as_vector(require(*mj, "amplitude", "set.motion"), "set.motion.amplitude");
    const double f = as_double(require(*mj, "frequency", "set.motion"), "set.motion.frequency");
    if (a.size() != e) throw ConfigError("set.motion.amplitude has the wrong dimension");
    const double w = 2.0 * std::numbers::pi * f;
    const Hoelder h = declared.value_or(Hoelder{a.norm() * std::abs(w), 1.0});
    auto m = std::make_shared<MovingConvexSet>(MovingConvexSet::translating(
        T, base.set, [a, w](double t) -> Vector { return std::sin(w * t) * a; }, base.gamma, base.r, h));
    return {m, h.alpha};
  }
  throw ConfigError("set.motion must be none, linear or sine (got '" + motion + "')");
}

// -- field and driver -------------------------------------------------------

FieldConfig parse_field(const json& f) {
  FieldConfig out;
  out.kind = as_string(require(f, "kind", "field"), "field.kind");
  if (out.kind == "zero") return out;
  if (out.kind == "constant") {
    out.constant = as_matrix(require(f, "value", "field"), "field.value");
    return out;
  }
  if (out.kind == "linear") {
    out.constant = as_matrix(require(f, "constant", "field"), "field.constant");
    const json& sl = require(f, "slopes", "field");
    if (!sl.is_array()) throw ConfigError("field.slopes must be an array of matrices");
    for (const auto& s : sl) out.slopes.push_back(as_matrix(s, "field.slopes"));
    return out;
  }
  if (out.kind == "scalar-trig") {
    out.amplitude = get_double(f, "amplitude", 1.0, "field");
    out.frequency = get_double(f, "frequency", 1.0, "field");
    out.phase = get_double(f, "phase", 0.0, "field");
    return out;
  }
  throw ConfigError("field.kind must be zero, constant, linear or scalar-trig (got '" + out.kind + "')");
}

DriverConfig parse_driver(const json& d, const std::filesystem::path& base_dir) {
  DriverConfig out;
  out.kind = as_string(require(d, "kind", "driver"), "driver.kind");
  if (d.contains("dims")) out.dims = static_cast<int>(as_size(d.at("dims"), "driver.dims"));
  out.scale = get_double(d, "scale", 1.0, "driver");
  if (out.kind == "zero") return out;
  if (out.kind == "csv") {
    std::filesystem::path p = as_string(require(d, "path", "driver"), "driver.path");
    out.path = p.is_relative() ? base_dir / p : p;
    const json& cols = require(d, "columns", "driver");
    if (!cols.is_array() || cols.empty()) throw ConfigError("driver.columns must be a nonempty array of names");
    for (const auto& c : cols) out.columns.push_back(as_string(c, "driver.columns"));
    if (d.contains("time_space")) out.time_space = d.at("time_space").get<bool>();
    return out;
  }
  if (out.kind == "fbm") {
    out.hurst = as_double(require(d, "hurst", "driver"), "driver.hurst");
    if (d.contains("method")) {
      try {
        out.method = fbm_method_from_string(as_string(d.at("method"), "driver.method"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    if (d.contains("time_space")) {
      if (!d.at("time_space").is_boolean()) throw ConfigError("driver.time_space must be a boolean");
      out.time_space = d.at("time_space").get<bool>();
    }
    return out;
  }
  if (out.kind == "analytic") {
    out.name = as_string(require(d, "name", "driver"), "driver.name");
    if (out.name != "linear" && out.name != "sine") throw ConfigError("driver.name must be linear or sine");
    out.slope = get_double(d, "slope", out.name == "linear" ? 1.0 : 0.0, "driver");
    out.amplitude = get_double(d, "amplitude", out.name == "sine" ? 1.0 : 0.0, "driver");
    out.omega = get_double(d, "omega", out.name == "sine" ? 2.0 * std::numbers::pi : 0.0, "driver");
    if (d.contains("time_space")) out.time_space = d.at("time_space").get<bool>();
    return out;
  }
  throw ConfigError("driver.kind must be zero, csv, fbm or analytic (got '" + out.kind + "')");
}

ExperimentConfig parse_config_impl(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig cfg;
  try {
    cfg.echo = j.dump();
    cfg.scheme = scheme_from_string(as_string(require(j, "scheme", ""), "scheme"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  cfg.T = get_double(j, "T", 1.0, "");
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) throw ConfigError("T must be positive and finite");
  if (j.contains("n")) cfg.n = as_size(j.at("n"), "n");
  if (cfg.n < 1) throw ConfigError("n must be at least 1");
  if (j.contains("seed")) cfg.seed = as_size(j.at("seed"), "seed");

  try {
    auto sp = parse_set(require(j, "set", ""), cfg.T);
    cfg.set = std::move(sp.set);
    cfg.alpha = sp.alpha;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("set: ") + e.what());
  }
  cfg.initial = as_vector(require(j, "initial", ""), "initial");
  if (cfg.initial.size() != cfg.set->at(0.0).dim()) throw ConfigError("initial point has the wrong dimension");

  if (j.contains("field")) cfg.field = parse_field(j.at("field"));
  if (j.contains("driver")) cfg.driver = parse_driver(j.at("driver"), base_dir);

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    cfg.proj_tol = get_double(t, "proj_tol", cfg.proj_tol, "tolerances");
    cfg.tol = get_double(t, "tol", cfg.tol, "tolerances");
    cfg.tol_u = get_double(t, "tol_u", cfg.tol_u, "tolerances");
  }
  if (!(cfg.proj_tol > 0.0) || !(cfg.tol > 0.0) || !(cfg.tol_u > 0.0))
    throw ConfigError("tolerances must be positive");
  if (j.contains("max_iter")) cfg.max_iter = as_size(j.at("max_iter"), "max_iter");
  if (cfg.max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (j.contains("levels")) {
    const json& l = j.at("levels");
    if (!l.is_array()) throw ConfigError("levels must be an array of grid sizes");
    for (const auto& v : l) cfg.levels.push_back(as_size(v, "levels"));
  }
  if (j.contains("q")) cfg.q = as_double(j.at("q"), "q");
  if (j.contains("output")) {
    const json& o = j.at("output");
    if (o.contains("trajectory")) cfg.trajectory_file = as_string(o.at("trajectory"), "output.trajectory");
    if (o.contains("converge")) cfg.converge_file = as_string(o.at("converge"), "output.converge");
  }

  // Scheme compatibility.
  const bool needs_state_driver = cfg.scheme == Scheme::Skorokhod || cfg.scheme == Scheme::Euler;
  if (needs_state_driver && cfg.driver.time_space)
    throw ConfigError("time_space drivers are only meaningful for Picard schemes");
  if (needs_state_driver && cfg.driver.dims != 0 && cfg.driver.dims != cfg.initial.size())
    throw ConfigError("driver.dims must equal the state dimension for " + to_string(cfg.scheme));
  try {
    (void)build_field(cfg);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field: ") + e.what());
  }
  return cfg;
}

Eigen::Index field_driver_cols(const FieldConfig& f) {
  if (f.kind == "constant" || f.kind == "linear") return f.constant.cols();
  if (f.kind == "scalar-trig") return 1;
  return 0;
}

}  // namespace

// -- config -----------------------------------------------------------------

Eigen::Index ExperimentConfig::driver_dim() const {
  const Eigen::Index e = initial.size();
  switch (scheme) {
    case Scheme::Skorokhod:
    case Scheme::Euler:
      return e;
    case Scheme::CatchingUp:
      return driver.dims > 0 ? driver.dims : 1;
    case Scheme::PicardYoung:
    case Scheme::PicardRough: {
      const Eigen::Index ts = driver.time_space ? 1 : 0;
      if (driver.dims > 0) return driver.dims + ts;
      const Eigen::Index cols = field_driver_cols(field);
      return cols > 0 ? cols : 1 + ts;
    }
  }
  return 1;
}

double ExperimentConfig::theory_order() const {
  double qq = 1.0;
  if (q) qq = *q;
  else if (driver.kind == "fbm") qq = 1.0 / driver.hurst + 0.01;
  return std::min(alpha, 1.0 / qq);
}

ExperimentConfig parse_config(const std::string& json_text) { return parse_config_impl(json_text, "."); }

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_impl(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

VectorField build_field(const ExperimentConfig& cfg) {
  const Eigen::Index e = cfg.state_dim();
  const Eigen::Index d = cfg.scheme == Scheme::Euler ? 1 : cfg.driver_dim();
  const FieldConfig& f = cfg.field;
  VectorField out = [&]() {
    if (f.kind == "zero") return VectorField::zero(e, d);
    if (f.kind == "constant") return VectorField::constant(f.constant);
    if (f.kind == "linear") return VectorField::affine(f.constant, f.slopes);
    return VectorField::scalar_trig(f.amplitude, f.frequency, f.phase);
  }();
  const bool uses_field = cfg.scheme != Scheme::CatchingUp && cfg.scheme != Scheme::Skorokhod;
  if (uses_field && (out.state_dim() != e || out.driver_dim() != d))
    throw ConfigError("field has shape " + std::to_string(out.state_dim()) + "x" + std::to_string(out.driver_dim()) +
                      ", expected " + std::to_string(e) + "x" + std::to_string(d));
  return out;
}

SamplePath build_driver(const ExperimentConfig& cfg, std::size_t n) {
  const DriverConfig& dc = cfg.driver;
  const Eigen::Index ts = dc.time_space ? 1 : 0;
  const Eigen::Index base_dims = cfg.driver_dim() - ts;
  if (base_dims < 1) throw ConfigError("time_space driver needs at least one noise coordinate");
  SamplePath z = [&]() -> SamplePath {
    if (dc.kind == "zero") return SamplePath::zeros(Grid::uniform(cfg.T, n), base_dims);
    if (dc.kind == "analytic") {
      const double slope = dc.slope, amp = dc.amplitude, om = dc.omega;
      const bool sine = dc.name == "sine";
      return SamplePath::sample(Grid::uniform(cfg.T, n), [=](double t) -> Vector {
        const double v = sine ? amp * std::sin(om * t) + slope * t : slope * t;
        return Vector::Constant(base_dims, v);
      });
    }
    if (dc.kind == "fbm") {
      FbmSpec spec{dc.hurst, cfg.T, n, static_cast<int>(base_dims), cfg.seed};
      try {
        spec.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("driver: ") + e.what());
      }
      return FbmSampler(spec, dc.method).sample();
    }
    CsvTable table;
    try {
      table = read_csv(dc.path);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("driver: ") + e.what());
    }
    SamplePath p = path_from_csv(table, dc.columns);
    if (p.dim() != base_dims)
      throw ConfigError("driver CSV provides " + std::to_string(p.dim()) + " columns, expected " +
                        std::to_string(base_dims));
    if (std::abs(p.grid().horizon() - cfg.T) > 1e-12 * std::max(1.0, cfg.T))
      throw ConfigError("driver CSV horizon does not match T");
    return p;
  }();
  if (dc.scale != 1.0) z = SamplePath(z.grid(), dc.scale * z.values());
  return dc.time_space ? build_time_space_signal(z) : z;
}

SweepingRun run_experiment(const ExperimentConfig& cfg, const std::optional<SamplePath>& driver) {
  const SamplePath z = driver ? *driver : build_driver(cfg, cfg.n);
  const MovingConvexSet& m = *cfg.set;
  auto from_zero = [](const SamplePath& p) {
    Matrix v = p.values().colwise() - p.values().col(0);
    return SamplePath(p.grid(), std::move(v));
  };
  PicardOptions opts;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  opts.proj_tol = cfg.proj_tol;
  switch (cfg.scheme) {
    case Scheme::CatchingUp:
      return catching_up(m, cfg.initial, z.grid(), cfg.proj_tol);
    case Scheme::Skorokhod:
      return skorokhod_decompose(m, cfg.initial, from_zero(z), cfg.proj_tol);
    case Scheme::Euler:
      return euler_catching_up(m, cfg.initial, build_field(cfg), from_zero(z), cfg.proj_tol);
    case Scheme::PicardYoung:
      return picard_young(m, cfg.initial, build_field(cfg), z, opts);
    case Scheme::PicardRough:
      return picard_rough(m, cfg.initial, build_field(cfg), std::make_shared<const RoughLift>(lift_piecewise_linear(z)),
                          opts);
  }
  throw ConfigError("unsupported scheme");
}

RunSummary summarize(const SweepingRun& run, const ExperimentConfig& cfg) {
  return {feasibility_report(run, *cfg.set, cfg.proj_tol).max_violation, p_variation(run.Y, 1.0)};
}

CsvTable trajectory_table(const SweepingRun& run, const ExperimentConfig& cfg, const RunSummary& summary,
                          const std::string& timestamp) {
  CsvTable t;
  t.metadata = {
      " sweep trajectory",
      " config: " + cfg.echo,
      " seed: " + std::to_string(cfg.seed),
      " scheme: " + to_string(run.scheme),
      " iterations: " + std::to_string(run.iterations),
      " converged: " + std::string(run.converged ? "true" : "false"),
      " feasibility_max: " + format_double(summary.feasibility_max),
      " y_one_variation: " + format_double(summary.y_one_variation),
      " proj_tol: " + format_double(cfg.proj_tol),
      std::string(" rng: ") + CounterRng::kName,
  };
  if (!timestamp.empty()) t.metadata.push_back(" created: " + timestamp);
  const Eigen::Index e = run.X.dim();
  t.header.push_back("t");
  for (const char* name : {"X", "H", "Y"})
    for (Eigen::Index i = 1; i <= e; ++i) t.header.push_back(name + std::to_string(i));
  const auto rows = static_cast<Eigen::Index>(run.grid.size());
  t.body.resize(rows, 1 + 3 * e);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    t.body(k, 0) = run.grid[kk];
    t.body.row(k).segment(1, e) = run.X[kk].transpose();
    t.body.row(k).segment(1 + e, e) = run.H[kk].transpose();
    t.body.row(k).segment(1 + 2 * e, e) = run.Y[kk].transpose();
  }
  return t;
}

// -- commands ---------------------------------------------------------------

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ExperimentConfig load_for_command(const CommonOptions& opts) {
  if (opts.config.empty()) throw ConfigError("--config is required");
  ExperimentConfig cfg = load_config(opts.config);
  if (opts.seed) cfg.seed = *opts.seed;
  if (const char* env = std::getenv("SWEEP_PROJ_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) throw ConfigError("SWEEP_PROJ_TOL must be a positive number");
    cfg.proj_tol = v;
  }
  return cfg;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace

int run_simulate(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load_for_command(opts);
    const SweepingRun run = run_experiment(cfg);
    if (!run.converged) {
      const std::string msg = to_string(run.scheme) + " did not converge after " + std::to_string(run.iterations) +
                              " iterations (last update " + format_double(run.last_update) + ")";
      if (opts.strict) throw NoConvergence(msg);
      err << "warning: " << msg << '\n';
    }
    const RunSummary summary = summarize(run, cfg);
    ensure_dir(opts.out);
    const auto path = opts.out / cfg.trajectory_file;
    write_csv_atomic(path, trajectory_table(run, cfg, summary, opts.repro ? std::string() : utc_timestamp()));
    out << "scheme " << to_string(run.scheme) << ", " << run.grid.steps() << " steps, " << run.iterations
        << " iterations, converged " << (run.converged ? "yes" : "no") << '\n'
        << "feasibility max " << format_double(summary.feasibility_max) << ", |Y|_1-var "
        << format_double(summary.y_one_variation) << '\n'
        << "wrote " << path.string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int run_converge(const CommonOptions& opts, std::vector<std::size_t> n_list, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load_for_command(opts);
    if (n_list.empty()) n_list = cfg.levels;
    if (n_list.empty()) throw ConfigError("no grid levels given (use --levels or the 'levels' field)");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
      if (n_list[i] == 0) throw ConfigError("grid levels must be positive");
      if (i > 0 && (n_list[i] < n_list[i - 1] || n_list[i] % n_list[i - 1] != 0))
        throw ConfigError("grid levels must be ascending and nested");
    }
    const std::size_t n_max = n_list.back();
    const SamplePath fine = build_driver(cfg, n_max);
    if (fine.grid().steps() != n_max)
      throw ConfigError("driver grid has " + std::to_string(fine.grid().steps()) + " steps, finest level is " +
                        std::to_string(n_max));
    bool all_converged = true;
    std::mutex mu;
    const ConvergenceReport rep = convergence_study(
        [&](std::size_t n) {
          SweepingRun r = run_experiment(cfg, fine.subsample(n_max / n));
          if (!r.converged) {
            std::lock_guard lock(mu);
            all_converged = false;
          }
          return r;
        },
        n_list, cfg.theory_order());
    if (!all_converged) {
      if (opts.strict) throw NoConvergence("a Picard iteration in the ladder did not converge");
      err << "warning: a Picard iteration in the ladder did not converge\n";
    }

    CsvTable t;
    t.metadata = {" sweep convergence", " config: " + cfg.echo, " seed: " + std::to_string(cfg.seed),
                  " scheme: " + to_string(cfg.scheme),
                  " empirical_order: " + format_double(rep.empirical_order) +
                      ", theory_order: " + format_double(rep.theory_order)};
    if (!opts.repro) t.metadata.push_back(" created: " + utc_timestamp());
    t.header = {"n", "sup_gap", "ratio"};
    t.body.resize(static_cast<Eigen::Index>(rep.sup_gaps.size()), 3);
    for (std::size_t i = 0; i < rep.sup_gaps.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      t.body(r, 0) = static_cast<double>(rep.grid_sizes[i]);
      t.body(r, 1) = rep.sup_gaps[i];
      t.body(r, 2) = i == 0 ? std::numeric_limits<double>::quiet_NaN() : rep.sup_gaps[i - 1] / rep.sup_gaps[i];
    }
    ensure_dir(opts.out);
    const auto path = opts.out / cfg.converge_file;
    write_csv_atomic(path, t);
    for (std::size_t i = 0; i < rep.sup_gaps.size(); ++i)
      out << "n " << rep.grid_sizes[i] << "  sup gap " << format_double(rep.sup_gaps[i]) << '\n';
    out << "empirical_order " << format_double(rep.empirical_order) << ", theory_order "
        << format_double(rep.theory_order) << '\n'
        << "wrote " << path.string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int run_fbm(const FbmOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    try {
      opts.spec.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    const SamplePath b = FbmSampler(opts.spec, opts.method).sample();
    CsvTable t;
    t.metadata = {" sweep fbm hurst=" + format_double(opts.spec.hurst) + " T=" + format_double(opts.spec.horizon) +
                  " n=" + std::to_string(opts.spec.n) + " dims=" + std::to_string(opts.spec.dims) +
                  " seed=" + std::to_string(opts.spec.seed) + " method=" + to_string(opts.method) +
                  " rng=" + CounterRng::kName};
    if (!opts.repro) t.metadata.push_back(" created: " + utc_timestamp());
    t.header.push_back("t");
    for (int j = 1; j <= opts.spec.dims; ++j) t.header.push_back("B" + std::to_string(j));
    const auto rows = static_cast<Eigen::Index>(b.size());
    t.body.resize(rows, 1 + b.dim());
    for (Eigen::Index k = 0; k < rows; ++k) {
      t.body(k, 0) = b.grid()[static_cast<std::size_t>(k)];
      t.body.row(k).tail(b.dim()) = b[static_cast<std::size_t>(k)].transpose();
    }
    ensure_dir(opts.out);
    const auto path = opts.out / opts.file;
    write_csv_atomic(path, t);
    out << "wrote " << path.string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int run_pvar(const PvarOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(opts.p >= 1.0)) throw ConfigError("p must be at least 1");
    CsvTable table;
    try {
      table = read_csv(opts.input);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    std::vector<std::string> cols = opts.columns;
    if (cols.empty())
      for (const auto& h : table.header)
        if (h != "t") cols.push_back(h);
    if (cols.empty()) throw ConfigError("CSV has no data columns");
    const bool has_time = std::find(table.header.begin(), table.header.end(), "t") != table.header.end();
    SamplePath x = [&] {
      try {
        if (has_time) return path_from_csv(table, cols);
        CsvTable indexed = table;
        indexed.header.push_back("t");
        indexed.body.conservativeResize(Eigen::NoChange, indexed.body.cols() + 1);
        for (Eigen::Index r = 0; r < indexed.body.rows(); ++r) indexed.body(r, indexed.body.cols() - 1) = double(r);
        return path_from_csv(indexed, cols);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }();
    const PVariation pv = p_variation_argmax(x, opts.p, 0, x.size() - 1);
    out << format_double(pv.value) << '\n' << "dissection";
    for (std::size_t k : pv.dissection) out << ' ' << k;
    out << '\n';
    return static_cast<int>(kExitOk);
  });
}

}  // namespace sweep
