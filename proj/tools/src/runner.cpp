#include "dframe/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "dframe/io.hpp"
#include "dframe/lab.hpp"
#include "dframe/maps.hpp"
#include "dframe/measure.hpp"
#include "dframe/model.hpp"
#include "dframe/multiplier.hpp"

namespace dframe::runner {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string>& suite_order() {
  static const std::vector<std::string> order = {
      "diagnose",      "dual",    "multiplier", "calculus", "invert", "reconstruct",
      "orthogonality", "density", "sweep",      "quartet",  "oracle"};
  return order;
}

bool is_randomized(const std::string& suite) {
  static const std::set<std::string> randomized = {"dual", "calculus", "reconstruct", "quartet",
                                                   "oracle"};
  return randomized.count(suite) > 0;
}

namespace {

// -- typed access with field paths ----------------------------------------------

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string type_name(const json& j) { return j.type_name(); }

template <typename T>
T as(const json& j, const std::string& path);

template <>
double as<double>(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path + ": expected a number, got " + type_name(j));
  return j.get<double>();
}

template <>
std::size_t as<std::size_t>(const json& j, const std::string& path) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
    throw ParseError(path + ": expected a non-negative integer, got " + j.dump());
  return j.get<std::size_t>();
}

template <>
int as<int>(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path + ": expected an integer, got " + j.dump());
  return j.get<int>();
}

template <>
bool as<bool>(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ParseError(path + ": expected true or false, got " + type_name(j));
  return j.get<bool>();
}

template <>
std::string as<std::string>(const json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path + ": expected a string, got " + type_name(j));
  return j.get<std::string>();
}

template <>
Complex as<Complex>(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) {
    try {
      return parse_complex(j.get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(path + ": " + e.what());
    }
  }
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ParseError(path + ": expected a complex number (number, \"a+bi\" or [re, im])");
}

template <>
std::vector<double> as<std::vector<double>>(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array, got " + type_name(j));
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as<double>(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

template <>
CVector as<CVector>(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array, got " + type_name(j));
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = as<Complex>(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

const json& need(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path + ": expected an object");
  if (!obj.contains(key)) throw ValidationError(join(path, key), "missing required field");
  return obj.at(key);
}

template <typename T>
T need_as(const json& obj, const std::string& key, const std::string& path) {
  return as<T>(need(obj, key, path), join(path, key));
}

template <typename T>
T opt_as(const json& obj, const std::string& key, const std::string& path, T fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return as<T>(obj.at(key), join(path, key));
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ParseError((path.empty() ? "config" : path) + ": expected an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw ValidationError(join(path, key), "unknown field");
}

// -- experiment -------------------------------------------------------------------

struct SweepSpec {
  RefinementGenerator generator = RefinementGenerator::Symmetric;
  std::vector<Resolution> schedule;
  std::string builder = "weighted_delta";
  std::optional<double> linear_floor;
  double threshold = 0.25;
  bool check_doubling = true;
};

struct Experiment {
  std::string name;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> suites;
  Tolerances tol;
  SpacePtr space;
  ModelPtr model;
  std::optional<DistributionMap> omega;
  std::optional<DistributionMap> theta;
  std::optional<Symbol> symbol;
  std::optional<std::vector<CVector>> discrete;  // the family when omega is discrete
  std::size_t trials = 100;
  std::size_t half_width = 2;
  std::size_t indicator_width = 1;
  RVector alpha;
  std::vector<std::size_t> quartet_sizes = {4, 8, 16, 64};
  std::size_t quartet_symbols = 5;
  SweepSpec sweep;
  fs::path out_dir = "reports";
};

fs::path resolve(const fs::path& base, const std::string& file) {
  const fs::path p(file);
  return p.is_absolute() ? p : base / p;
}

SampledMeasureSpace build_space(const json& j, const std::string& path) {
  if (j.contains("points")) {
    check_keys(j, path, {"kind", "points", "weights", "extent", "layout"});
    try {
      return space_from_json(j);
    } catch (const ParseError& e) {
      throw ValidationError(path, e.what());
    }
  }
  check_keys(j, path, {"generator", "n", "L"});
  const auto gen = need_as<std::string>(j, "generator", path);
  const auto n = need_as<std::size_t>(j, "n", path);
  if (n == 0) throw ValidationError(join(path, "n"), "must be positive");
  if (gen == "counting") return SampledMeasureSpace::counting(n);
  if (gen == "periodic") return SampledMeasureSpace::periodic_unit(n);
  if (gen == "symmetric") {
    if (n < 2) throw ValidationError(join(path, "n"), "symmetric grids need n >= 2");
    const double L = need_as<double>(j, "L", path);
    if (!(L > 0.0)) throw ValidationError(join(path, "L"), "must be positive");
    return SampledMeasureSpace::symmetric(n, L);
  }
  throw ValidationError(join(path, "generator"),
                        "unknown generator '" + gen + "' (counting, periodic, symmetric)");
}

BasisFamily build_basis(const json& j, const std::string& path) {
  const auto family = need_as<std::string>(j, "family", path);
  if (family == "trigonometric") {
    check_keys(j, path, {"family", "max_degree"});
    const int d = need_as<int>(j, "max_degree", path);
    if (d < 0) throw ValidationError(join(path, "max_degree"), "must be non-negative");
    return Trigonometric{d};
  }
  if (family == "gaussian_bumps") {
    check_keys(j, path, {"family", "centers", "width"});
    GaussianBumps g{need_as<std::vector<double>>(j, "centers", path), need_as<double>(j, "width", path)};
    if (!(g.width > 0.0)) throw ValidationError(join(path, "width"), "must be positive");
    if (g.centers.empty()) throw ValidationError(join(path, "centers"), "needs at least one centre");
    return g;
  }
  if (family == "raw") {
    check_keys(j, path, {"family"});
    return RawSamples{};
  }
  throw ValidationError(join(path, "family"),
                        "unknown basis '" + family + "' (trigonometric, gaussian_bumps, raw)");
}

std::vector<CVector> read_vectors(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array of vectors");
  std::vector<CVector> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as<CVector>(j[i], path + "[" + std::to_string(i) + "]"));
  if (out.empty()) throw ValidationError(path, "needs at least one vector");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].size() != out[0].size())
      throw ValidationError(path + "[" + std::to_string(i) + "]", "length differs from the first vector");
  return out;
}

// Eval table of a discrete family on an existing counting model.
CMatrix discrete_eval(const ModelSpace& model, const std::vector<CVector>& vectors) {
  CMatrix e(static_cast<Eigen::Index>(vectors.size()), static_cast<Eigen::Index>(model.dim()));
  for (std::size_t j = 0; j < vectors.size(); ++j)
    e.row(static_cast<Eigen::Index>(j)) =
        vectors[j].adjoint() * model.h_gram() * model.on_basis();
  return e;
}

DistributionMap build_map(const json& j, const std::string& path, const Experiment& ex,
                          const fs::path& base) {
  const auto family = need_as<std::string>(j, "family", path);
  try {
    if (family == "delta") {
      check_keys(j, path, {"family"});
      return delta_frame(ex.model, ex.space);
    }
    if (family == "exponential") {
      check_keys(j, path, {"family"});
      return exponential_frame(ex.model, ex.space);
    }
    if (family == "weighted_delta") {
      check_keys(j, path, {"family", "weight"});
      const auto w = opt_as<std::string>(j, "weight", path, "x");
      std::function<Complex(double)> fn;
      if (w == "x")
        fn = [](double x) { return Complex(x); };
      else if (w == "one")
        fn = [](double) { return Complex(1.0); };
      else
        throw ValidationError(join(path, "weight"), "unknown weight '" + w + "' (x, one)");
      return weighted_delta_frame(ex.model, ex.space, fn);
    }
    if (family == "translated_window") {
      check_keys(j, path, {"family", "window"});
      return translated_window_frame(ex.model, ex.space, need_as<CVector>(j, "window", path));
    }
    if (family == "discrete") {
      check_keys(j, path, {"family", "vectors"});
      const auto vectors = read_vectors(need(j, "vectors", path), join(path, "vectors"));
      if (!ex.discrete) throw ValidationError(join(path, "family"), "discrete theta needs a discrete omega");
      if (vectors.size() != ex.discrete->size() || vectors[0].size() != (*ex.discrete)[0].size())
        throw ValidationError(join(path, "vectors"), "shape differs from omega.vectors");
      return DistributionMap(ex.space, ex.model, discrete_eval(*ex.model, vectors), "discrete");
    }
    if (family == "custom") {
      check_keys(j, path, {"family", "file"});
      const auto file = resolve(base, need_as<std::string>(j, "file", path));
      if (!fs::exists(file))
        throw ValidationError(join(path, "file"), "file not found: " + file.string());
      return DistributionMap(ex.space, ex.model, load_complex_table(file), "custom");
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(path, e.what());
  }
  throw ValidationError(join(path, "family"),
                        "unknown frame '" + family +
                            "' (delta, exponential, weighted_delta, translated_window, discrete, custom)");
}

Symbol build_symbol(const json& j, const std::string& path, const Experiment& ex,
                    const fs::path& base) {
  const auto family = need_as<std::string>(j, "family", path);
  const SampledMeasureSpace& space = *ex.space;
  try {
    if (family == "constant") {
      check_keys(j, path, {"family", "value"});
      return Symbol::constant(space, opt_as<Complex>(j, "value", path, Complex(1.0)));
    }
    if (family == "coordinate") {
      check_keys(j, path, {"family"});
      return Symbol::coordinate(space);
    }
    if (family == "step") {
      check_keys(j, path, {"family", "threshold", "lo", "hi"});
      return Symbol::step(space, need_as<double>(j, "threshold", path),
                          need_as<Complex>(j, "lo", path), need_as<Complex>(j, "hi", path));
    }
    if (family == "random_phase") {
      check_keys(j, path, {"family", "modulus"});
      if (!ex.seed) throw ValidationError("seed", "required by symbol.family random_phase");
      return Symbol::random_phase(space, derive_seed(*ex.seed, "symbol"),
                                  opt_as<double>(j, "modulus", path, 1.0));
    }
    if (family == "reciprocal_safe") {
      check_keys(j, path, {"family", "lo", "hi"});
      if (!ex.seed) throw ValidationError("seed", "required by symbol.family reciprocal_safe");
      return Symbol::reciprocal_safe(space, derive_seed(*ex.seed, "symbol"),
                                     opt_as<double>(j, "lo", path, 1.0), opt_as<double>(j, "hi", path, 2.0));
    }
    if (family == "file") {
      check_keys(j, path, {"family", "file"});
      const auto file = resolve(base, need_as<std::string>(j, "file", path));
      if (!fs::exists(file))
        throw ValidationError(join(path, "file"), "file not found: " + file.string());
      return symbol_on_space(load_symbol_csv(file), space);
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(path, e.what());
  }
  throw ValidationError(join(path, "family"),
                        "unknown symbol '" + family +
                            "' (constant, coordinate, step, random_phase, reciprocal_safe, file)");
}

Experiment build_experiment(const json& root, const fs::path& base, const std::string& name,
                            const Overrides& ov) {
  check_keys(root, "", {"name", "seed", "space", "model", "omega", "theta", "symbol", "suites",
                        "tolerances", "trials", "orthogonality", "quartet", "sweep", "output"});
  Experiment ex;
  ex.name = opt_as<std::string>(root, "name", "", name);
  if (root.contains("seed")) ex.seed = static_cast<std::uint64_t>(as<std::size_t>(root.at("seed"), "seed"));
  if (ov.seed) ex.seed = ov.seed;

  // suites
  const auto& suites = need(root, "suites", "");
  if (!suites.is_array()) throw ParseError("suites: expected an array of suite names");
  std::set<std::string> selected;
  for (std::size_t i = 0; i < suites.size(); ++i) {
    const auto s = as<std::string>(suites[i], "suites[" + std::to_string(i) + "]");
    if (std::find(suite_order().begin(), suite_order().end(), s) == suite_order().end())
      throw ValidationError("suites[" + std::to_string(i) + "]", "unknown suite '" + s + "'");
    selected.insert(s);
  }
  if (selected.empty()) throw ValidationError("suites", "select at least one suite");
  for (const auto& s : suite_order())
    if (selected.count(s)) ex.suites.push_back(s);
  for (const auto& s : ex.suites)
    if (is_randomized(s) && !ex.seed)
      throw ValidationError("seed", "required because suite '" + s + "' is randomized");

  if (root.contains("tolerances")) {
    const auto& t = root.at("tolerances");
    check_keys(t, "tolerances", {"residual", "bound", "rank", "support"});
    ex.tol.residual = opt_as<double>(t, "residual", "tolerances", ex.tol.residual);
    ex.tol.bound = opt_as<double>(t, "bound", "tolerances", ex.tol.bound);
    ex.tol.rank = opt_as<double>(t, "rank", "tolerances", ex.tol.rank);
    ex.tol.support = opt_as<double>(t, "support", "tolerances", ex.tol.support);
  }
  if (ov.tol) ex.tol.residual = *ov.tol;
  for (double t : {ex.tol.residual, ex.tol.bound, ex.tol.rank, ex.tol.support})
    if (!(t > 0.0)) throw ValidationError("tolerances", "all tolerances must be positive");
  ex.trials = opt_as<std::size_t>(root, "trials", "", ex.trials);
  if (ex.trials == 0) throw ValidationError("trials", "must be at least 1");

  // space, model, maps
  const auto& omega_j = need(root, "omega", "");
  const bool discrete = omega_j.is_object() && omega_j.contains("family") &&
                        omega_j.at("family").is_string() && omega_j.at("family") == "discrete";
  if (discrete) {
    check_keys(omega_j, "omega", {"family", "vectors"});
    if (root.contains("space")) throw ValidationError("space", "discrete omega defines its own counting space");
    if (root.contains("model")) throw ValidationError("model", "discrete omega defines its own model");
    ex.discrete = read_vectors(need(omega_j, "vectors", "omega"), "omega.vectors");
    try {
      auto m = discrete_sequence_map(*ex.discrete);
      ex.space = m.space();
      ex.model = m.model();
      ex.omega = std::move(m);
    } catch (const Error& e) {
      throw ValidationError("omega.vectors", e.what());
    }
  } else {
    ex.space = std::make_shared<const SampledMeasureSpace>([&] {
      try {
        return build_space(need(root, "space", ""), "space");
      } catch (const ValidationError&) {
        throw;
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ValidationError("space", e.what());
      }
    }());
    const BasisFamily basis =
        root.contains("model") ? build_basis(root.at("model"), "model") : BasisFamily(RawSamples{});
    try {
      ex.model = std::make_shared<const ModelSpace>(make_model(ex.space, basis));
    } catch (const Error& e) {
      throw ValidationError("model", e.what());
    }
    ex.omega = build_map(omega_j, "omega", ex, base);
  }

  if (root.contains("theta")) {
    const auto& tj = root.at("theta");
    if (tj.is_object() && tj.contains("family") && tj.at("family") == "canonical_dual") {
      check_keys(tj, "theta", {"family"});
      try {
        ex.theta = canonical_dual(*ex.omega, {ex.tol.bound, ex.tol.rank});
      } catch (const Error& e) {
        throw ValidationError("theta.family", std::string("canonical dual unavailable: ") + e.what());
      }
    } else {
      ex.theta = build_map(tj, "theta", ex, base);
    }
  } else {
    ex.theta = ex.omega;
  }
  if (ex.theta->points() != ex.omega->points() || ex.theta->dim() != ex.omega->dim())
    throw ValidationError("theta", "table shape differs from omega");

  ex.symbol = root.contains("symbol") ? build_symbol(root.at("symbol"), "symbol", ex, base)
                                      : Symbol::constant(*ex.space, 1.0);

  // suite parameters
  ex.alpha = RVector::Ones(static_cast<Eigen::Index>(ex.space->size()));
  if (root.contains("orthogonality")) {
    const auto& o = root.at("orthogonality");
    check_keys(o, "orthogonality", {"half_width", "width", "alpha"});
    ex.half_width = opt_as<std::size_t>(o, "half_width", "orthogonality", ex.half_width);
    ex.indicator_width = opt_as<std::size_t>(o, "width", "orthogonality", ex.indicator_width);
    if (ex.indicator_width == 0) throw ValidationError("orthogonality.width", "must be positive");
    if (o.contains("alpha")) {
      const auto& a = o.at("alpha");
      if (a.is_number()) {
        ex.alpha.setConstant(as<double>(a, "orthogonality.alpha"));
      } else {
        const auto v = as<std::vector<double>>(a, "orthogonality.alpha");
        if (v.size() != ex.space->size())
          throw ValidationError("orthogonality.alpha", "needs one value per point");
        for (std::size_t i = 0; i < v.size(); ++i) ex.alpha(static_cast<Eigen::Index>(i)) = v[i];
      }
      if (!(ex.alpha.minCoeff() > 0.0))
        throw ValidationError("orthogonality.alpha", "must be strictly positive");
    }
  }
  if (root.contains("quartet")) {
    const auto& q = root.at("quartet");
    check_keys(q, "quartet", {"sizes", "symbols"});
    if (q.contains("sizes")) {
      const auto& s = q.at("sizes");
      if (!s.is_array()) throw ParseError("quartet.sizes: expected an array");
      ex.quartet_sizes.clear();
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto n = as<std::size_t>(s[i], "quartet.sizes[" + std::to_string(i) + "]");
        if (n == 0) throw ValidationError("quartet.sizes[" + std::to_string(i) + "]", "must be positive");
        ex.quartet_sizes.push_back(n);
      }
    }
    ex.quartet_symbols = opt_as<std::size_t>(q, "symbols", "quartet", ex.quartet_symbols);
  }
  if (selected.count("sweep")) {
    const auto& s = need(root, "sweep", "");
    check_keys(s, "sweep", {"generator", "schedule", "builder", "linear_floor", "threshold",
                            "check_doubling"});
    const auto gen = opt_as<std::string>(s, "generator", "sweep", "symmetric");
    try {
      ex.sweep.generator = refinement_generator_from_string(gen);
    } catch (const Error& e) {
      throw ValidationError("sweep.generator", e.what());
    }
    const auto& sched = need(s, "schedule", "sweep");
    if (!sched.is_array()) throw ParseError("sweep.schedule: expected an array");
    for (std::size_t i = 0; i < sched.size(); ++i) {
      const std::string p = "sweep.schedule[" + std::to_string(i) + "]";
      check_keys(sched[i], p, {"n", "L"});
      ex.sweep.schedule.push_back({need_as<std::size_t>(sched[i], "n", p), opt_as<double>(sched[i], "L", p, 0.0)});
    }
    if (ex.sweep.schedule.size() < 3) throw ValidationError("sweep.schedule", "needs at least 3 steps");
    try {
      RefinementFamily(ex.sweep.generator, ex.sweep.schedule);
    } catch (const Error& e) {
      throw ValidationError("sweep.schedule", e.what());
    }
    ex.sweep.builder = opt_as<std::string>(s, "builder", "sweep", "weighted_delta");
    if (ex.sweep.builder != "weighted_delta" && ex.sweep.builder != "coordinate" && ex.sweep.builder != "bounded")
      throw ValidationError("sweep.builder",
                            "unknown builder '" + ex.sweep.builder + "' (weighted_delta, coordinate, bounded)");
    if (ex.sweep.builder == "bounded" && !ex.seed)
      throw ValidationError("seed", "required by sweep.builder bounded");
    if (s.contains("linear_floor"))
      ex.sweep.linear_floor = as<double>(s.at("linear_floor"), "sweep.linear_floor");
    else if (ex.sweep.builder != "bounded")
      ex.sweep.linear_floor = 0.9;
    ex.sweep.threshold = opt_as<double>(s, "threshold", "sweep", 0.25);
    ex.sweep.check_doubling = opt_as<bool>(s, "check_doubling", "sweep", true);
  }
  if (root.contains("output")) {
    const auto& o = root.at("output");
    check_keys(o, "output", {"dir"});
    if (o.contains("dir")) ex.out_dir = resolve(base, as<std::string>(o.at("dir"), "output.dir"));
  }
  if (ov.out) ex.out_dir = *ov.out;
  return ex;
}

// -- suites ---------------------------------------------------------------------

constexpr Eigen::Index kMaxTable = 64;

struct Context {
  const Experiment& ex;
  std::uint64_t seed;
  SuiteOutcome& out;

  void fail(const std::string& msg) { out.failures.push_back(msg); }
  void check(bool ok, const std::string& msg) {
    if (!ok) fail(msg);
  }
  json& report() { return out.report; }
};

std::string num(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

MultiplierOperator main_operator(const Experiment& ex) { return build(*ex.symbol, *ex.omega, *ex.theta); }

void suite_diagnose(Context& c) {
  const auto opts = DiagnoseOptions{c.ex.tol.bound, c.ex.tol.rank};
  c.report()["space"] = {{"N", c.ex.space->size()},
                         {"kind", to_string(c.ex.space->kind())},
                         {"layout", to_string(c.ex.space->layout())},
                         {"total_measure", c.ex.space->total_measure()}};
  c.report()["model"] = model_summary_json(*c.ex.model);
  c.report()["omega"] = diagnose(*c.ex.omega, opts);
  c.report()["omega"]["family"] = c.ex.omega->family();
  c.report()["omega"]["map_warnings"] = c.ex.omega->warnings();
  c.report()["theta"] = diagnose(*c.ex.theta, opts);
  c.report()["theta"]["family"] = c.ex.theta->family();
  c.report()["theta"]["map_warnings"] = c.ex.theta->warnings();
}

void suite_dual(Context& c) {
  const auto opts = DiagnoseOptions{c.ex.tol.bound, c.ex.tol.rank};
  const auto d = diagnose(*c.ex.omega, opts);
  c.report()["omega"] = {{"lower", d.lower}, {"upper", d.upper}, {"classification", to_string(d.classification)}};
  if (!d.total) {
    c.fail("omega is not a frame: no canonical dual");
    return;
  }
  const auto theta = canonical_dual(*c.ex.omega, opts);
  const auto dd = diagnose(theta, opts);
  const double want_lower = 1.0 / d.upper;
  const double want_upper = 1.0 / d.lower;
  const double bound_error = std::max(std::abs(dd.lower - want_lower), std::abs(dd.upper - want_upper));
  const double residual = brute_force_duality(*c.ex.omega, theta, c.ex.trials, c.seed);
  c.report()["dual"] = dd;
  c.report()["expected_bounds"] = {want_lower, want_upper};
  c.report()["bound_error"] = bound_error;
  c.report()["duality_residual"] = residual;
  if (theta.points() <= static_cast<std::size_t>(kMaxTable) && theta.dim() <= static_cast<std::size_t>(kMaxTable)) {
    // theta_j as elements of H in raw samples: Q conj(eval row j).
    const CMatrix elements = (c.ex.model->on_basis() * theta.eval().adjoint()).transpose();
    c.report()["elements"] = matrix_json(elements);
  }
  c.check(residual < c.ex.tol.residual, "duality residual " + num(residual));
  c.check(bound_error <= c.ex.tol.bound * std::max(1.0, want_upper), "dual bounds off by " + num(bound_error));
}

void suite_multiplier(Context& c) {
  const auto M = main_operator(c.ex);
  const auto k = static_cast<Eigen::Index>(M.dim());
  const double fact = M.factorization_residual();
  const auto nb = check_norm_bound(M, c.ex.tol);
  c.report()["K"] = M.dim();
  c.report()["factorization_residual"] = fact;
  c.report()["build_residual"] = M.build_residual();
  c.report()["identity_residual"] = spectral_norm(M.dense() - CMatrix::Identity(k, k));
  c.report()["norm_bound"] = nb;
  if (k <= kMaxTable) c.report()["dense"] = matrix_json(M.dense());
  c.check(fact < c.ex.tol.residual, "factorization residual " + num(fact));
  c.check(M.build_residual() < c.ex.tol.residual, "bilinear check residual " + num(M.build_residual()));
  c.check(nb.holds, "norm " + num(nb.norm) + " exceeds bound " + num(nb.bound));
}

void suite_calculus(Context& c) {
  const auto M1 = main_operator(c.ex);
  const Symbol m2 = Symbol::reciprocal_safe(*c.ex.space, c.seed);
  const auto M2 = build(m2, *c.ex.omega, *c.ex.theta);
  const auto r = compose(M1, M2, c.ex.tol);
  const double adj = spectral_norm(adjoint(M1).dense() - M1.dense().adjoint());
  c.report()["composition"] = r;
  c.report()["adjoint_residual"] = adj;
  if (!r.asserted)
    c.report()["note"] = "omega and theta are not a Riesz dual pair; composition identity reported, not asserted";
  c.check(r.passed, "composition residual " + num(r.residual) + ", adjoint " + num(r.adjoint_residual));
  c.check(adj < c.ex.tol.residual, "adjoint residual " + num(adj));
}

void suite_invert(Context& c) {
  const auto r = invert(main_operator(c.ex), c.ex.tol);
  c.report()["inverse"] = r;
  c.check(r.injectivity_ok, "injectivity preconditions hold but the multiplier is singular");
  c.check(r.bound_ok, "sigma_min " + num(r.sigma_min) + " below " + num(r.bound_lower));
  c.check(r.reciprocal_ok, "inverse differs from the reciprocal-symbol multiplier by " + num(r.reciprocal_residual));
  c.check(r.adjoint_inverse_ok, "adjoint/inverse residual " + num(r.adjoint_inverse_residual));
  c.check(!r.discretization_inconsistency, "discretization inconsistency");
}

void suite_reconstruct(Context& c) {
  const auto M = main_operator(c.ex);
  for (const auto side : {ReconstructionSide::Right, ReconstructionSide::Left}) {
    const std::string key = side == ReconstructionSide::Right ? "rho" : "tau";
    try {
      const auto rec = reconstruction_pair(M, side, c.ex.trials,
                                           derive_seed(c.seed, key.c_str()), c.ex.tol);
      const double delta_gap =
          spectral_norm(rec.map.eval() - delta_frame(c.ex.model, c.ex.space).eval());
      json j = {{"residual", rec.residual}};
      if (c.ex.model->ambient_dim() == c.ex.space->size()) j["distance_to_delta"] = delta_gap;
      c.report()[key] = j;
      c.check(rec.residual < c.ex.tol.residual, key + " reconstruction residual " + num(rec.residual));
    } catch (const MismatchError&) {
      c.report()[key] = {{"residual", nullptr}};
      c.check(false, key + ": delta frame unavailable on this model");
    }
  }
}

void suite_orthogonality(Context& c) {
  OrthogonalityOptions opts;
  opts.support_tol = c.ex.tol.support;
  opts.rank_tol = c.ex.tol.rank;
  const auto& model = *c.ex.model;
  const auto pseudo = check_pseudo_orthogonal(*c.ex.omega, bump_witnesses(model, c.ex.half_width), opts);
  const std::size_t width = c.ex.indicator_width;
  const auto hyper = check_hyper_orthogonal(
      *c.ex.omega, c.ex.alpha,
      [&model, width](const RVector& a) { return indicator_witnesses(model, a, width); }, opts);
  c.report()["pseudo"] = pseudo;
  c.report()["hyper"] = hyper;
  for (const auto& f : pseudo.failures) c.fail("pseudo: " + f);
  for (const auto& f : hyper.failures) c.fail("hyper: " + f);
  if (!pseudo.passed && pseudo.failures.empty()) c.fail("pseudo-orthogonality not certified");
  if (!hyper.passed && hyper.failures.empty()) c.fail("hyper-orthogonality not certified");
}

void suite_density(Context& c) {
  const auto witnesses = bump_witnesses(*c.ex.model, c.ex.half_width);
  const auto r = density_certificate(*c.ex.omega, *c.ex.theta, *c.ex.symbol, witnesses, c.ex.tol);
  const auto [m1, m2] = split_symbol(*c.ex.symbol);
  const double sum_residual = ((m1 + m2).values() - c.ex.symbol->values()).cwiseAbs().maxCoeff();
  c.report()["certificate"] = r;
  c.report()["split"] = {{"sum_residual", sum_residual},
                         {"m1_sup", m1.ess_sup()},
                         {"m2_min_modulus", m2.min_modulus()}};
  for (const auto& f : r.failures) c.fail(f);
  c.check(sum_residual <= c.ex.tol.residual, "split does not sum to m");
  c.check(m2.min_modulus() >= 1.0, "|m2| < 1 somewhere");
  c.check(m1.ess_sup() <= 3.0, "m1 exceeds 3");
}

MultiplierBuilder sweep_builder(const Experiment& ex, std::uint64_t seed) {
  if (ex.sweep.builder == "coordinate") return coordinate_symbol_builder();
  if (ex.sweep.builder == "bounded") return bounded_symbol_builder(seed);
  return weighted_delta_builder();
}

void suite_sweep(Context& c, std::string& csv) {
  const RefinementFamily family(c.ex.sweep.generator, c.ex.sweep.schedule);
  SweepOptions opts;
  opts.threshold = c.ex.sweep.threshold;
  opts.linear_floor = c.ex.sweep.linear_floor;
  const auto builder = sweep_builder(c.ex, c.seed);
  const auto r = unboundedness_sweep(family, builder, opts);
  c.report()["builder"] = c.ex.sweep.builder;
  c.report()["generator"] = to_string(c.ex.sweep.generator);
  c.report()["sweep"] = r;
  for (const auto& f : r.failures) c.fail(f);
  if (c.ex.sweep.check_doubling) {
    const auto d = unboundedness_sweep(family.doubled(), builder, opts);
    c.report()["doubled"] = {{"fitted_growth", d.fitted_growth}, {"verdict", to_string(d.verdict)}};
    c.check(d.verdict == r.verdict, "verdict changes when the schedule is doubled");
  }
  csv = sweep_csv(r);
}

void suite_quartet(Context& c) {
  json runs = json::array();
  for (const std::size_t n : c.ex.quartet_sizes) {
    for (std::size_t s = 0; s < c.ex.quartet_symbols; ++s) {
      Rng rng(derive_seed(c.seed, ("n" + std::to_string(n) + "s" + std::to_string(s)).c_str()));
      const Symbol m(random_cvector(rng, static_cast<Eigen::Index>(n)));
      const auto r = fourier_quartet_check(n, m, 4, rng(), c.ex.tol.residual);
      runs.push_back(r);
      for (const auto& f : r.failures) c.fail("n=" + std::to_string(n) + ": " + f);
    }
  }
  c.report()["convention"] = to_string(SignConvention::Negative);
  c.report()["runs"] = runs;
}

void suite_oracle(Context& c) {
  const auto M = main_operator(c.ex);
  const auto audit = audit_multiplier(M, c.ex.trials, c.seed, c.ex.tol.residual);
  c.report()["audit"] = audit;
  c.check(audit.passed, "loop-path audit disagrees with the optimized path");
  // Classical discrete bounds of phi_j = sqrt(w_j) conj(E(j, :)).
  std::vector<CVector> phi;
  const CMatrix& e = c.ex.omega->eval();
  for (Eigen::Index j = 0; j < e.rows(); ++j)
    phi.push_back(std::sqrt(c.ex.space->weight(static_cast<std::size_t>(j))) * e.row(j).adjoint());
  const auto cmp = discrete_reduction_oracle(phi);
  c.report()["discrete_reduction"] = cmp;
  c.check(cmp.agree, "classical and maps frame bounds disagree");
  if (c.ex.discrete) {
    const auto direct = discrete_reduction_oracle(*c.ex.discrete);
    c.report()["discrete_family"] = direct;
    c.check(direct.agree, "classical and maps bounds disagree on the discrete family");
  }
}

// -- driver ------------------------------------------------------------------------

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string parse_location(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

RunResult fail_early(int code, const std::string& message) {
  RunResult r;
  r.exit_code = code;
  r.error = message;
  r.summary = {{"schema_version", kSchemaVersion},
               {"passed", false},
               {"error", {{"kind", code == kExitParse ? "parse" : "validation"}, {"message", message}}}};
  return r;
}

}  // namespace

RunResult run_text(const std::string& text, const fs::path& base_dir, const std::string& config_name,
                   const Overrides& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    return fail_early(kExitParse, config_name + ": " + parse_location(text, e.byte) +
                                      ": invalid JSON");
  }
  std::optional<Experiment> ex;
  try {
    ex.emplace(build_experiment(root, base_dir, config_name, overrides));
  } catch (const ValidationError& e) {
    return fail_early(kExitValidation, config_name + ": " + e.what());
  } catch (const ParseError& e) {
    return fail_early(kExitParse, config_name + ": " + e.what());
  } catch (const json::exception& e) {
    return fail_early(kExitParse, config_name + ": " + e.what());
  } catch (const Error& e) {
    return fail_early(kExitValidation, config_name + ": " + e.what());
  }

  RunResult result;
  result.out_dir = ex->out_dir;
  std::error_code ec;
  fs::create_directories(ex->out_dir, ec);
  if (ec) return fail_early(kExitValidation, "output.dir: cannot create " + ex->out_dir.string());

  json summary_suites = json::array();
  json all_failures = json::array();
  bool all_passed = true;
  for (const auto& name : ex->suites) {
    SuiteOutcome out;
    out.name = name;
    const std::uint64_t seed = ex->seed ? derive_seed(*ex->seed, name.c_str()) : 0;
    Context ctx{*ex, seed, out};
    std::string csv;
    try {
      if (name == "diagnose") suite_diagnose(ctx);
      else if (name == "dual") suite_dual(ctx);
      else if (name == "multiplier") suite_multiplier(ctx);
      else if (name == "calculus") suite_calculus(ctx);
      else if (name == "invert") suite_invert(ctx);
      else if (name == "reconstruct") suite_reconstruct(ctx);
      else if (name == "orthogonality") suite_orthogonality(ctx);
      else if (name == "density") suite_density(ctx);
      else if (name == "sweep") suite_sweep(ctx, csv);
      else if (name == "quartet") suite_quartet(ctx);
      else if (name == "oracle") suite_oracle(ctx);
    } catch (const Error& e) {
      out.failures.push_back(std::string("error: ") + e.what());
    }
    out.passed = out.failures.empty();
    json report = {{"schema_version", kSchemaVersion},
                   {"suite", name},
                   {"experiment", ex->name},
                   {"seed", ex->seed ? json(seed) : json()},
                   {"passed", out.passed},
                   {"failures", out.failures}};
    report.update(out.report);
    out.report = report;
    try {
      write_file(ex->out_dir / (name + ".json"), out.report.dump(2) + "\n");
      if (!csv.empty()) write_file(ex->out_dir / "sweep.csv", csv);
    } catch (const Error& e) {
      return fail_early(kExitValidation, std::string("output.dir: ") + e.what());
    }
    summary_suites.push_back({{"name", name}, {"passed", out.passed}, {"report", name + ".json"}});
    for (const auto& f : out.failures) all_failures.push_back({{"suite", name}, {"message", f}});
    all_passed = all_passed && out.passed;
    result.suites.push_back(std::move(out));
  }
  result.summary = {{"schema_version", kSchemaVersion},
                    {"experiment", ex->name},
                    {"seed", ex->seed ? json(*ex->seed) : json()},
                    {"tolerances",
                     {{"residual", ex->tol.residual},
                      {"bound", ex->tol.bound},
                      {"rank", ex->tol.rank},
                      {"support", ex->tol.support}}},
                    {"suites", summary_suites},
                    {"passed", all_passed},
                    {"failures", all_failures}};
  write_file(ex->out_dir / "summary.json", result.summary.dump(2) + "\n");
  result.exit_code = all_passed ? kExitOk : kExitAssertion;
  return result;
}

RunResult run(const fs::path& config, const Overrides& overrides) {
  std::ifstream in(config, std::ios::binary);
  if (!in) return fail_early(kExitValidation, "config: file not found: " + config.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return run_text(buf.str(), config.parent_path().empty() ? fs::path(".") : config.parent_path(),
                  config.filename().string(), overrides);
}

json family_catalog() {
  auto entry = [](const std::string& name, json params, const std::string& reference) {
    return json{{"name", name}, {"parameters", std::move(params)}, {"reference", reference}};
  };
  json c;
  c["spaces"] = json::array({
      entry("counting", {{"n", "number of atoms"}}, "counting measure on {0, ..., n-1}, every point an atom"),
      entry("periodic", {{"n", "grid size"}}, "x_j = j/n on [0,1) with weights 1/n"),
      entry("symmetric", {{"n", "grid size"}, {"L", "half width"}},
            "n equispaced points on [-L, L], rectangle weights 2L/(n-1)"),
      entry("explicit", {{"kind", "atomic|quadrature"}, {"points", "[x]"}, {"weights", "[w]"}, {"extent", "domain size"}},
            "finite weighted point set (X, mu)"),
  });
  c["bases"] = json::array({
      entry("trigonometric", {{"max_degree", "|k| <= max_degree"}},
            "e^{2 pi i k x}; clipped to the alias window on periodic grids"),
      entry("gaussian_bumps", {{"centers", "[c]"}, {"width", "s"}}, "exp(-(x-c)^2 / (2 s^2))"),
      entry("raw", json::object(), "indicator of each sample point: D is the sampled H"),
  });
  c["frames"] = json::array({
      entry("delta", json::object(), "<f, delta_x> = f(x); a Parseval frame and Gel'fand basis"),
      entry("exponential", json::object(), "<f, theta_k> = dft(f)_k, the Fourier transform of f on a periodic grid"),
      entry("weighted_delta", {{"weight", "x|one"}}, "omega_x = x delta_x; unbounded as the domain grows"),
      entry("translated_window", {{"window", "[samples]"}}, "omega_{x_j}(t_i) = window((i - j) mod N)"),
      entry("discrete", {{"vectors", "[[c]]"}}, "Bessel sequence / frame {phi_n} on counting measure"),
      entry("custom", {{"file", "CSV, rows = points, columns = basis actions"}}, "eval(j, k) = <e_k, omega_{x_j}>"),
      entry("canonical_dual", json::object(), "theta_x = S^{-1} omega_x (theta only)"),
  });
  c["symbols"] = json::array({
      entry("constant", {{"value", "complex"}}, "m(x) = c"),
      entry("coordinate", json::object(), "m(x) = x; unbounded as the domain grows"),
      entry("step", {{"threshold", "t"}, {"lo", "complex"}, {"hi", "complex"}}, "m = lo for x < t, hi otherwise"),
      entry("random_phase", {{"modulus", "r"}}, "m_j = r e^{i phi_j} with seeded phases"),
      entry("reciprocal_safe", {{"lo", "> 0"}, {"hi", ">= lo"}}, "lo <= |m| <= hi so 1/m is bounded"),
      entry("file", {{"file", "CSV point,re,im"}}, "samples of m on the grid"),
  });
  c["suites"] = suite_order();
  return c;
}

std::string catalog_text(const json& catalog) {
  std::ostringstream out;
  for (const char* group : {"spaces", "bases", "frames", "symbols"}) {
    out << group << ":\n";
    for (const auto& e : catalog.at(group)) {
      out << "  " << e.at("name").get<std::string>();
      std::string params;
      for (const auto& [k, v] : e.at("parameters").items()) params += (params.empty() ? "" : ", ") + k;
      if (!params.empty()) out << " (" << params << ")";
      out << "\n      " << e.at("reference").get<std::string>() << "\n";
    }
  }
  out << "suites:";
  for (const auto& s : catalog.at("suites")) out << ' ' << s.get<std::string>();
  out << '\n';
  return out.str();
}

}  // namespace dframe::runner
