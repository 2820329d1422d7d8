#pragma once

// Command-line front end.  Every subcommand reads its parameters from an
// optional JSON file (--config) and from flags; flags win.  Parameters are
// validated before any work starts.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "jamming/analytics.hpp"
#include "jamming/fit.hpp"
#include "jamming/graphsim.hpp"
#include "jamming/io.hpp"
#include "jamming/parallel.hpp"
#include "jamming/scenarios.hpp"
#include "jamming/spatialsim.hpp"
#include "jamming/stats.hpp"

namespace jamming::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr const char* kSeedEnv = "JAMMING_DEFAULT_SEED";

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& constraint)
      : std::runtime_error("invalid value for '" + key + "': " + constraint), key_(key) {}

  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Flat key/value parameters from a JSON object overlaid with flag values.
class Settings {
 public:
  explicit Settings(std::vector<std::string> allowed) : allowed_(allowed.begin(), allowed.end()) {}

  void merge_json(const nlohmann::json& object) {
    if (!object.is_object()) throw ConfigError("config", "must be a JSON object");
    for (const auto& [key, value] : object.items()) {
      if (!allowed_.count(key)) throw ConfigError(key, "unknown key");
      values_[key] = value;
    }
  }

  void merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    nlohmann::json object;
    try {
      in >> object;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    merge_json(object);
  }

  void set(const std::string& key, nlohmann::json value) {
    if (!allowed_.count(key)) throw ConfigError(key, "unknown key");
    values_[key] = std::move(value);
  }

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) > 0; }

  [[nodiscard]] std::optional<double> number(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (it->second.is_number()) return it->second.get<double>();
    if (it->second.is_string()) {
      if (const auto v = detail::parse_double(it->second.get<std::string>())) return v;
    }
    throw ConfigError(key, "must be a number");
  }

  [[nodiscard]] std::optional<std::uint64_t> integer(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (it->second.is_number_unsigned()) return it->second.get<std::uint64_t>();
    if (it->second.is_number_integer()) throw ConfigError(key, "must be a non-negative integer");
    if (it->second.is_string()) {
      if (const auto v = detail::parse_uint(it->second.get<std::string>())) return v;
    }
    throw ConfigError(key, "must be a non-negative integer");
  }

  [[nodiscard]] std::optional<std::string> text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (!it->second.is_string()) throw ConfigError(key, "must be a string");
    return it->second.get<std::string>();
  }

  [[nodiscard]] std::optional<bool> flag(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (it->second.is_boolean()) return it->second.get<bool>();
    if (it->second.is_string()) {
      const auto s = it->second.get<std::string>();
      if (s == "true" || s == "1") return true;
      if (s == "false" || s == "0") return false;
    }
    throw ConfigError(key, "must be true or false");
  }

  /// JSON array of numbers, or a comma separated string.
  [[nodiscard]] std::optional<std::vector<double>> numbers(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    std::vector<double> out;
    if (it->second.is_array()) {
      for (const auto& v : it->second) {
        if (!v.is_number()) throw ConfigError(key, "must be a list of numbers");
        out.push_back(v.get<double>());
      }
      return out;
    }
    if (it->second.is_string()) {
      for (const auto& field : detail::split_csv(it->second.get<std::string>())) {
        const auto v = detail::parse_double(field);
        if (!v) throw ConfigError(key, "must be a list of numbers");
        out.push_back(*v);
      }
      return out;
    }
    throw ConfigError(key, "must be a list of numbers");
  }

  /// Comma separated string or JSON array of strings.
  [[nodiscard]] std::optional<std::vector<std::string>> words(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    std::vector<std::string> out;
    if (it->second.is_array()) {
      for (const auto& v : it->second) {
        if (!v.is_string()) throw ConfigError(key, "must be a list of names");
        out.push_back(v.get<std::string>());
      }
    } else if (it->second.is_string()) {
      for (auto& w : detail::split_csv(it->second.get<std::string>()))
        if (!w.empty()) out.push_back(std::move(w));
    } else {
      throw ConfigError(key, "must be a list of names");
    }
    return out;
  }

 private:
  std::set<std::string> allowed_;
  std::map<std::string, nlohmann::json> values_;
};

// --- typed run configurations ---------------------------------------------

namespace detail {

inline double positive(const Settings& s, const std::string& key) {
  const auto v = s.number(key);
  if (!v) throw ConfigError(key, "is required");
  if (!(*v > 0.0) || !std::isfinite(*v)) throw ConfigError(key, "must be > 0");
  return *v;
}

inline std::optional<double> optional_positive(const Settings& s, const std::string& key) {
  if (!s.has(key)) return std::nullopt;
  return positive(s, key);
}

inline std::uint64_t default_seed() {
  if (const char* env = std::getenv(kSeedEnv)) {
    if (const auto v = jamming::detail::parse_uint(env)) return *v;
    throw ConfigError(kSeedEnv, "must be a non-negative integer");
  }
  return 1;
}

struct TrialSettings {
  std::uint64_t trials = 1;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

inline TrialSettings trial_settings(const Settings& s, std::uint64_t default_trials) {
  TrialSettings t;
  t.trials = s.integer("trials").value_or(default_trials);
  if (t.trials < 1) throw ConfigError("trials", "must be >= 1");
  t.seed = s.has("seed") ? *s.integer("seed") : default_seed();
  const std::uint64_t workers = s.integer("workers").value_or(1);
  if (workers > 4096) throw ConfigError("workers", "must be <= 4096");
  t.workers = workers == 0 ? default_workers() : static_cast<unsigned>(workers);
  return t;
}

inline std::vector<double> time_grid(const Settings& s) {
  auto grid = s.numbers("t-grid").value_or(std::vector<double>{});
  if (grid.empty()) throw ConfigError("t-grid", "is required for timed runs");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw ConfigError("t-grid", "must be non-negative");
    if (i > 0 && grid[i] < grid[i - 1]) throw ConfigError("t-grid", "must be sorted");
  }
  return grid;
}

}  // namespace detail

inline const std::vector<std::string>& graph_keys() {
  static const std::vector<std::string> keys{"n",    "c",    "p",      "rho-v",  "trials", "seed",
                                             "workers", "mode", "rate", "t-grid", "output"};
  return keys;
}

struct GraphRunConfig {
  enum class Mode { recursion, explicit_graph };
  std::optional<ModelParams> model;  // fixed population
  std::optional<double> rho_v;       // Poisson population
  double c = 0.0;
  Mode mode = Mode::recursion;
  std::optional<double> rate;
  std::vector<double> t_grid;
  detail::TrialSettings run;
  std::string output;
};

inline GraphRunConfig parse_graph_config(const Settings& s) {
  GraphRunConfig cfg;
  cfg.run = detail::trial_settings(s, 1000);
  cfg.output = s.text("output").value_or("");
  const std::string mode = s.text("mode").value_or("recursion");
  if (mode == "recursion") {
    cfg.mode = GraphRunConfig::Mode::recursion;
  } else if (mode == "explicit") {
    cfg.mode = GraphRunConfig::Mode::explicit_graph;
  } else {
    throw ConfigError("mode", "must be 'recursion' or 'explicit'");
  }
  if (s.has("c") && s.has("p")) throw ConfigError("p", "cannot be combined with c");
  if (s.has("n") == s.has("rho-v")) throw ConfigError("n", "exactly one of n and rho-v is required");

  if (s.has("n")) {
    const std::uint64_t n = *s.integer("n");
    if (s.has("p")) {
      const double p = *s.number("p");
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p", "must lie in [0, 1]");
      cfg.model = ModelParams::with_probability(n, p);
    } else {
      cfg.c = detail::positive(s, "c");
      if (n > 0 && cfg.c > static_cast<double>(n)) throw ConfigError("c", "must be <= n");
      cfg.model = ModelParams::with_neighbors(n, cfg.c);
    }
    cfg.c = cfg.model->mean_neighbors();
  } else {
    if (s.has("p")) throw ConfigError("p", "use c with rho-v");
    cfg.rho_v = detail::positive(s, "rho-v");
    cfg.c = detail::positive(s, "c");
  }

  cfg.rate = detail::optional_positive(s, "rate");
  if (cfg.rate) {
    if (!cfg.model) throw ConfigError("rate", "timed runs need a fixed population n");
    if (cfg.mode != GraphRunConfig::Mode::recursion) throw ConfigError("rate", "timed runs use the recursion mode");
    cfg.t_grid = detail::time_grid(s);
  } else if (s.has("t-grid")) {
    throw ConfigError("t-grid", "requires rate");
  }
  if (cfg.rho_v && cfg.mode != GraphRunConfig::Mode::recursion)
    throw ConfigError("mode", "Poisson populations use the recursion mode");
  return cfg;
}

inline const std::vector<std::string>& spatial_keys() {
  static const std::vector<std::string> keys{
      "dimension", "length", "width",  "height",  "density", "radius",      "boundary", "population", "count",
      "slab-3d",   "trials", "seed",   "workers", "output",  "dump-points", "rate",     "t-grid"};
  return keys;
}

struct SpatialRunConfig {
  SpatialConfig geometry;
  detail::TrialSettings run;
  std::string output;
  std::string dump_points;
  std::optional<double> rate;
  std::vector<double> t_grid;
};

inline SpatialRunConfig parse_spatial_config(const Settings& s) {
  SpatialRunConfig cfg;
  cfg.run = detail::trial_settings(s, 1000);
  cfg.output = s.text("output").value_or("");
  cfg.dump_points = s.text("dump-points").value_or("");
  SpatialConfig& g = cfg.geometry;

  const std::string dim = s.text("dimension").value_or("slab");
  if (dim == "planar") {
    g.dimension = Dimension::planar;
  } else if (dim == "slab") {
    g.dimension = Dimension::slab;
  } else if (dim == "volume") {
    g.dimension = Dimension::volume;
  } else {
    throw ConfigError("dimension", "must be 'planar', 'slab' or 'volume'");
  }
  g.length = detail::positive(s, "length");
  g.width = detail::positive(s, "width");
  if (g.dimension != Dimension::planar) {
    g.height = detail::positive(s, "height");
  } else if (s.has("height")) {
    throw ConfigError("height", "not used by planar boxes");
  }
  g.radius = detail::positive(s, "radius");

  const std::string boundary = s.text("boundary").value_or("periodic");
  if (boundary == "periodic") {
    g.boundary = Boundary::periodic;
  } else if (boundary == "open") {
    g.boundary = Boundary::open;
  } else {
    throw ConfigError("boundary", "must be 'periodic' or 'open'");
  }

  const std::string population = s.text("population").value_or("poisson");
  if (population == "poisson") {
    g.population = PopulationMode::poisson;
    const auto density = s.number("density");
    if (!density) throw ConfigError("density", "is required");
    if (!(*density >= 0.0) || !std::isfinite(*density)) throw ConfigError("density", "must be >= 0");
    g.density = *density;
  } else if (population == "fixed") {
    g.population = PopulationMode::fixed;
    if (!s.has("count")) throw ConfigError("count", "is required for fixed populations");
    g.count = *s.integer("count");
    g.density = s.number("density").value_or(static_cast<double>(g.count) / g.measure());
    if (!(g.density >= 0.0)) throw ConfigError("density", "must be >= 0");
  } else {
    throw ConfigError("population", "must be 'poisson' or 'fixed'");
  }
  g.slab_full_distance = s.flag("slab-3d").value_or(false);
  if (g.slab_full_distance && g.dimension != Dimension::slab) throw ConfigError("slab-3d", "applies to slab boxes only");

  if (g.boundary == Boundary::periodic) {
    if (!(g.radius < std::min(g.length, g.width) / 2.0))
      throw ConfigError("radius", "must be < min(length, width) / 2 with periodic boundaries");
    if (g.dimension == Dimension::volume && !(g.radius < g.height / 2.0))
      throw ConfigError("radius", "must be < height / 2 with periodic boundaries");
  }
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("geometry", e.what());
  }

  cfg.rate = detail::optional_positive(s, "rate");
  if (cfg.rate) {
    cfg.t_grid = detail::time_grid(s);
  } else if (s.has("t-grid")) {
    throw ConfigError("t-grid", "requires rate");
  }
  return cfg;
}

// --- subcommand implementations --------------------------------------------

namespace detail {

/// Writes to `path`, or to `fallback` when the path is empty.
template <class Writer>
void emit(const std::string& path, std::ostream& fallback, Writer&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError(path, 0, "cannot open file for writing");
  write(file);
  if (!file) throw DataError(path, 0, "write failed");
}

inline void run_graph(const GraphRunConfig& cfg, std::ostream& out) {
  const auto& run = cfg.run;
  if (cfg.rate) {
    const auto per_trial = run_trials(run.trials, run.workers, [&](std::uint64_t i) {
      return simulate_timed(*cfg.model, *cfg.rate, RngSpec{run.seed, i}, cfg.t_grid).sampled;
    });
    std::vector<TimedRow> rows;
    rows.reserve(run.trials * cfg.t_grid.size());
    for (std::uint64_t i = 0; i < run.trials; ++i)
      for (std::size_t k = 0; k < cfg.t_grid.size(); ++k) rows.push_back({i, cfg.t_grid[k], per_trial[i][k]});
    emit(cfg.output, out, [&](std::ostream& o) { write_timed_samples(o, rows); });
    return;
  }
  const auto rows = run_trials(run.trials, run.workers, [&](std::uint64_t i) {
    const RngSpec rng{run.seed, i};
    JamOutcome o;
    if (cfg.rho_v) {
      o = simulate_unconditional(*cfg.rho_v, cfg.c, rng);
    } else if (cfg.mode == GraphRunConfig::Mode::explicit_graph) {
      o = simulate_explicit_graph(*cfg.model, rng);
    } else {
      o = simulate_recursion_jamming(*cfg.model, rng);
    }
    return SampleRow{i, o.n_realized, o.x_inf};
  });
  emit(cfg.output, out, [&](std::ostream& o) { write_samples(o, rows); });
}

inline void run_spatial(const SpatialRunConfig& cfg, std::ostream& out) {
  const auto& run = cfg.run;
  const SpatialConfig& geometry = cfg.geometry;
  const int coords = geometry.dimension == Dimension::planar ? 2 : 3;
  if (cfg.rate) {
    const auto per_trial = run_trials(run.trials, run.workers, [&](std::uint64_t i) {
      const RngSpec rng{run.seed, i};
      const PointSet points = sample_points(geometry, rng);
      const Adjacency graph = neighbor_graph(points, geometry.radius);
      return simulate_rsa_timed(points, graph, *cfg.rate, rng, cfg.t_grid).sampled;
    });
    std::vector<TimedRow> rows;
    for (std::uint64_t i = 0; i < run.trials; ++i)
      for (std::size_t k = 0; k < cfg.t_grid.size(); ++k) rows.push_back({i, cfg.t_grid[k], per_trial[i][k]});
    emit(cfg.output, out, [&](std::ostream& o) { write_timed_samples(o, rows); });
    return;
  }
  const bool dump = !cfg.dump_points.empty();
  const auto trials = run_trials(run.trials, run.workers, [&](std::uint64_t i) {
    SpatialTrial t = run_spatial_trial(geometry, RngSpec{run.seed, i});
    if (!dump) t.points.positions.clear();
    return t;
  });
  std::vector<SampleRow> rows;
  rows.reserve(trials.size());
  for (std::uint64_t i = 0; i < trials.size(); ++i) rows.push_back({i, trials[i].outcome.n_realized, trials[i].outcome.x_inf});
  emit(cfg.output, out, [&](std::ostream& o) { write_samples(o, rows); });
  if (dump) {
    emit(cfg.dump_points, out, [&](std::ostream& o) {
      write_points_header(o, coords);
      for (std::uint64_t i = 0; i < trials.size(); ++i) write_points(o, i, trials[i].points, coords, trials[i].outcome.excited);
    });
  }
}

inline std::vector<double> load_column(const std::string& path, const std::string& column) {
  auto in = jamming::detail::open_input(path);
  return read_column(in, column, path);
}

}  // namespace detail

inline nlohmann::json analytics_report(const Settings& s) {
  nlohmann::json report = nlohmann::json::object();
  double c = 0.0;
  if (s.has("c")) {
    if (s.has("geometry")) throw ConfigError("geometry", "cannot be combined with c");
    c = detail::positive(s, "c");
  } else if (s.has("geometry")) {
    BlockadeGeometry g;
    const std::string shape = *s.text("geometry");
    g.radius = detail::positive(s, "radius");
    if (shape == "sphere") {
      g.shape = BlockadeShape::sphere;
      g.density = detail::positive(s, "density");
    } else if (shape == "slab") {
      g.shape = BlockadeShape::slab_cylinder;
      g.density = detail::positive(s, "density");
      g.thickness = detail::positive(s, "thickness");
    } else if (shape == "lattice") {
      g.shape = BlockadeShape::square_lattice;
      g.lattice_spacing = detail::positive(s, "spacing");
    } else {
      throw ConfigError("geometry", "must be 'sphere', 'slab' or 'lattice'");
    }
    c = neighbors_from_geometry(g);
    if (!(c > 0.0)) throw ConfigError("radius", "geometry has no neighbors (c = 0)");
  } else {
    throw ConfigError("c", "c or geometry is required");
  }
  report["c"] = c;
  report["fStar"] = jam_fraction(c);

  std::optional<JamStats> detect_base;
  if (s.has("n")) {
    const std::uint64_t n = *s.integer("n");
    if (n < 1) throw ConfigError("n", "must be >= 1");
    const JamStats cond = conditional_jam_stats(static_cast<std::int64_t>(n), c);
    report["condMean"] = cond.mean;
    report["condVar"] = cond.variance;
    report["condQ"] = cond.mandel_q;
    detect_base = cond;
  }
  if (s.has("rho-v")) {
    const JamStats uncond = unconditional_jam_stats(detail::positive(s, "rho-v"), c);
    report["uncondMean"] = uncond.mean;
    report["uncondVar"] = uncond.variance;
    report["uncondQ"] = uncond.mandel_q;
    detect_base = uncond;
  }
  if (s.has("eta")) {
    const double eta = *s.number("eta");
    if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("eta", "must lie in [0, 1]");
    if (!detect_base) throw ConfigError("eta", "needs n or rho-v");
    const JamStats detected = detector_transform(*detect_base, DetectorModel{eta});
    report["detectedMean"] = detected.mean;
    report["detectedVar"] = detected.variance;
    report["detectedQ"] = detected.mandel_q;
  }
  return report;
}

inline FitSpec parse_fit_spec(const Settings& s) {
  FitSpec spec;
  const std::vector<std::pair<std::string, ParameterSetting*>> params{
      {"rate", &spec.rate}, {"neighbors", &spec.neighbors}, {"amplitude", &spec.amplitude}};
  for (const auto& [key, setting] : params) {
    if (s.has(key)) setting->value = detail::positive(s, key);
  }
  if (const auto free = s.words("free")) {
    for (const auto& [key, setting] : params) setting->free = false;
    for (const auto& name : *free) {
      auto it = std::find_if(params.begin(), params.end(), [&](const auto& p) { return p.first == name; });
      if (it == params.end()) throw ConfigError("free", "unknown parameter '" + name + "'");
      it->second->free = true;
    }
    for (const auto& [key, setting] : params) {
      if (!setting->free && !setting->value) throw ConfigError(key, "fixed parameters need a value");
    }
  } else {
    for (const auto& [key, setting] : params) setting->free = !setting->value.has_value();
  }
  if (!spec.rate.free && !spec.neighbors.free && !spec.amplitude.free)
    throw ConfigError("free", "at least one parameter must be free");
  spec.weighted = s.flag("weighted").value_or(false);
  return spec;
}

// --- reproduction bundles ---------------------------------------------------

struct ReproduceOptions {
  std::string target;
  detail::TrialSettings run;
  std::filesystem::path output_dir = ".";
  std::string input;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError(path.string(), 0, "cannot open file for writing");
  file << text;
}

template <class Writer>
std::string render(Writer&& write) {
  std::ostringstream os;
  write(os);
  return os.str();
}

inline nlohmann::json reproduce_slab(const ReproduceOptions& opt) {
  const SpatialConfig geometry = scenarios::slab_comparison();
  const auto rows = run_trials(opt.run.trials, opt.run.workers, [&](std::uint64_t i) {
    const auto trial = run_spatial_trial(geometry, RngSpec{opt.run.seed, i});
    return SampleRow{i, trial.outcome.n_realized, trial.outcome.x_inf};
  });
  std::vector<std::uint64_t> counts;
  counts.reserve(rows.size());
  for (const auto& r : rows) counts.push_back(r.x_inf);
  const JamStats er = conditional_jam_stats(scenarios::kSlabCount, scenarios::kSlabNeighbors);
  nlohmann::json report{{"trials", opt.run.trials},
                        {"seed", opt.run.seed},
                        {"n", scenarios::kSlabCount},
                        {"cGeometry", geometry.mean_neighbors()},
                        {"c", scenarios::kSlabNeighbors},
                        {"er", to_json(er)}};
  if (counts.size() >= 2) {
    const SampleSummary sim = summarize(std::span<const std::uint64_t>(counts));
    report["spatial"] = to_json(sim);
    report["meanOverestimatePercent"] = 100.0 * (er.mean - sim.mean) / sim.mean;
    report["varianceOverestimatePercent"] = 100.0 * (er.variance - sim.variance) / sim.variance;
    if (sim.mandel_q) report["qDifference"] = er.mandel_q - *sim.mandel_q;
  }
  Histogram hist = make_histogram(std::span<const std::uint64_t>(counts), 1.0, static_cast<double>(counts.size()));
  const auto normal = overlay_curve(hist, NormalModel{er.mean, er.variance});
  const auto poisson = overlay_curve(hist, PoissonModel{er.mean});
  write_text(opt.output_dir / "fig2_samples.csv", render([&](std::ostream& o) { write_samples(o, rows); }));
  write_text(opt.output_dir / "fig2_histogram.csv", render([&](std::ostream& o) { write_histogram(o, hist, normal, poisson); }));
  return report;
}

inline nlohmann::json reproduce_series(const ReproduceOptions& opt) {
  if (opt.input.empty()) throw ConfigError("input", "fig3 needs a t_seconds,count series");
  const TimeSeries series = read_timeseries(opt.input);
  FitSpec spec;
  spec.amplitude = ParameterSetting::fixed(scenarios::kSeriesAmplitude);
  const FitResult result = fit(series, spec);
  std::ostringstream curve;
  curve << "t_seconds,count,model\n";
  for (const auto& p : series.points)
    curve << format_double(p.t) << ',' << format_double(p.y) << ','
          << format_double(model_mean(p.t, result.rate, result.neighbors, result.amplitude)) << '\n';
  write_text(opt.output_dir / "fig3_curve.csv", curve.str());
  nlohmann::json report = to_json(result);
  report["input"] = std::filesystem::path(opt.input).filename().string();
  report["efficiency"] = scenarios::kSeriesEfficiency;
  report["rhoV"] = scenarios::kSeriesAtoms;
  return report;
}

inline nlohmann::json reproduce_polaritons(const ReproduceOptions& opt) {
  const double c = neighbors_from_geometry(scenarios::polariton_blockade());
  const double volume = excitation_volume(scenarios::kPolaritonDetectedMean, scenarios::kPolaritonDensity,
                                          scenarios::kPolaritonEfficiency, c);
  const JamStats jam = unconditional_jam_stats(scenarios::kPolaritonDensity * volume, c);
  const JamStats detected = detector_transform(jam, DetectorModel{scenarios::kPolaritonEfficiency});
  Histogram hist = make_bins(0.0, 30.0, 1.0, scenarios::kPolaritonScale);
  const auto normal = overlay_curve(hist, NormalModel{detected.mean, detected.variance});
  const auto poisson = overlay_curve(hist, PoissonModel{detected.mean});
  write_text(opt.output_dir / "fig4_overlay.csv", render([&](std::ostream& o) { write_histogram(o, hist, normal, poisson); }));
  return {{"c", c},
          {"volume", volume},
          {"rhoV", scenarios::kPolaritonDensity * volume},
          {"efficiency", scenarios::kPolaritonEfficiency},
          {"jam", to_json(jam)},
          {"detected", to_json(detected)},
          {"scale", scenarios::kPolaritonScale}};
}

inline nlohmann::json reproduce_lattice() {
  const auto points = lattice_neighbor_count(scenarios::kLatticeRadius / scenarios::kLatticeSpacing);
  const double c = static_cast<double>(points - 1);
  return {{"latticePoints", points}, {"c", c}, {"conditionalQ", conditional_mandel_q(c)}};
}

inline void run_reproduce(const ReproduceOptions& opt, std::ostream& out) {
  std::filesystem::create_directories(opt.output_dir);
  nlohmann::json report;
  if (opt.target == "fig2") {
    report = reproduce_slab(opt);
  } else if (opt.target == "fig3") {
    report = reproduce_series(opt);
  } else if (opt.target == "fig4") {
    report = reproduce_polaritons(opt);
  } else if (opt.target == "petrosyan") {
    report = reproduce_lattice();
  } else {
    throw ConfigError("target", "must be fig2, fig3, fig4 or petrosyan");
  }
  const std::string text = report.dump(2) + "\n";
  write_text(opt.output_dir / (opt.target + "_report.json"), text);
  out << text;
}

// --- argument wiring --------------------------------------------------------

namespace detail {

inline std::string key_help(const std::string& key) {
  static const std::map<std::string, std::string> text{
      {"n", "population size"},
      {"c", "mean number of neighbors"},
      {"p", "edge probability (instead of c)"},
      {"rho-v", "mean population rho V (Poisson population)"},
      {"trials", "number of trials"},
      {"seed", "base seed"},
      {"workers", "worker threads, 0 = hardware concurrency"},
      {"mode", "recursion | explicit"},
      {"rate", "excitation rate in 1/s"},
      {"t-grid", "comma-separated sample times in s, 'inf' allowed"},
      {"output", "output file (default stdout)"},
      {"dimension", "planar | slab | volume"},
      {"length", "box length in m"},
      {"width", "box width in m"},
      {"height", "box height in m"},
      {"density", "particle density in m^-3"},
      {"radius", "blockade radius in m"},
      {"boundary", "periodic | open"},
      {"population", "poisson | fixed"},
      {"count", "particle count for fixed populations"},
      {"slab-3d", "use full 3D distances in slabs"},
      {"dump-points", "CSV file for particle positions and excitations"},
      {"eta", "detector efficiency"},
      {"geometry", "sphere | slab | lattice"},
      {"thickness", "slab thickness in m"},
      {"spacing", "lattice spacing in m"},
      {"input", "input CSV file"},
      {"column", "sample column (default x_inf)"},
      {"bin-width", "histogram bin width"},
      {"scale", "overlay scale (default sample count)"},
      {"normal-mean", "normal overlay mean (default sample mean)"},
      {"normal-variance", "normal overlay variance (default sample variance)"},
      {"poisson-mean", "Poisson overlay mean (default sample mean)"},
      {"free", "comma-separated free parameters: rate, neighbors, amplitude"},
      {"neighbors", "c, fixed value or guess"},
      {"amplitude", "A, fixed value or guess"},
      {"output-dir", "directory for CSV and JSON outputs"},
  };
  const auto it = text.find(key);
  return it == text.end() ? std::string() : it->second;
}

/// String-valued CLI11 options mirroring configuration keys.
class FlagSet {
 public:
  void add(CLI::App* app, const std::string& key) { add(app, key, key_help(key)); }

  void add(CLI::App* app, const std::string& key, const std::string& help) {
    storage_[key] = std::string();
    options_[key] = app->add_option("--" + key, storage_[key], help);
  }

  void add_switch(CLI::App* app, const std::string& key, const std::string& help) {
    switches_[key] = false;
    options_[key] = app->add_flag("--" + key, switches_[key], help);
  }

  void apply(Settings& s) const {
    for (const auto& [key, opt] : options_) {
      if (opt->count() == 0) continue;
      if (const auto it = switches_.find(key); it != switches_.end()) {
        s.set(key, it->second);
      } else {
        s.set(key, storage_.at(key));
      }
    }
  }

 private:
  std::map<std::string, std::string> storage_;
  std::map<std::string, bool> switches_;
  std::map<std::string, CLI::Option*> options_;
};

inline Settings load_settings(const std::vector<std::string>& keys, const std::string& config_path, const FlagSet& flags) {
  Settings s(keys);
  if (!config_path.empty()) s.merge_file(config_path);
  flags.apply(s);
  return s;
}

}  // namespace detail

/// Entry point; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Jamming-limit statistics of blockaded excitation processes", "jamming"};
  app.require_subcommand(1);

  std::string config_path;
  auto add_config = [&](CLI::App* sub) { sub->add_option("--config", config_path, "JSON file with parameters"); };

  // analytics
  auto* analytics = app.add_subcommand("analytics", "Closed-form jamming statistics (JSON)");
  detail::FlagSet analytics_flags;
  const std::vector<std::string> analytics_keys{"c", "n", "rho-v", "eta", "geometry", "density", "radius", "thickness", "spacing"};
  for (const auto& k : analytics_keys) analytics_flags.add(analytics, k);
  add_config(analytics);

  // simulate graph / spatial
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo trials (CSV)");
  simulate->require_subcommand(1);
  auto* graph = simulate->add_subcommand("graph", "Erdos-Renyi jamming trials");
  detail::FlagSet graph_flags;
  for (const auto& k : graph_keys()) graph_flags.add(graph, k);
  add_config(graph);
  auto* spatial = simulate->add_subcommand("spatial", "Spatial random sequential activation trials");
  detail::FlagSet spatial_flags;
  for (const auto& k : spatial_keys()) {
    if (k == "slab-3d") {
      spatial_flags.add_switch(spatial, k, "use 3D distances inside the slab");
    } else {
      spatial_flags.add(spatial, k);
    }
  }
  add_config(spatial);

  // summarize / histogram
  auto* summarize_cmd = app.add_subcommand("summarize", "Mean, variance and Mandel Q of a sample column (JSON)");
  detail::FlagSet summarize_flags;
  const std::vector<std::string> summarize_keys{"input", "column"};
  for (const auto& k : summarize_keys) summarize_flags.add(summarize_cmd, k);
  add_config(summarize_cmd);

  auto* histogram_cmd = app.add_subcommand("histogram", "Histogram with normal and Poisson overlays (CSV)");
  detail::FlagSet histogram_flags;
  const std::vector<std::string> histogram_keys{"input",          "column",       "bin-width", "scale",
                                                "normal-mean",    "normal-variance", "poisson-mean", "output"};
  for (const auto& k : histogram_keys) histogram_flags.add(histogram_cmd, k);
  add_config(histogram_cmd);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit the detected mean-excitation curve (JSON)");
  detail::FlagSet fit_flags;
  const std::vector<std::string> fit_keys{"input", "free", "rate", "neighbors", "amplitude"};
  for (const auto& k : fit_keys) fit_flags.add(fit_cmd, k);
  fit_flags.add_switch(fit_cmd, "weighted", "weight residuals by the 'weight' column");
  add_config(fit_cmd);

  // reproduce
  auto* reproduce = app.add_subcommand("reproduce", "Bundled parameter sets: fig2, fig3, fig4, petrosyan");
  std::string target;
  reproduce->add_option("target", target, "fig2 | fig3 | fig4 | petrosyan")->required();
  detail::FlagSet reproduce_flags;
  const std::vector<std::string> reproduce_keys{"trials", "seed", "workers", "output-dir", "input"};
  for (const auto& k : reproduce_keys) reproduce_flags.add(reproduce, k);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (analytics->parsed()) {
      const Settings s = detail::load_settings(
          [&] {
            auto keys = analytics_keys;
            return keys;
          }(),
          config_path, analytics_flags);
      nlohmann::json report;
      try {
        report = analytics_report(s);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("analytics", e.what());
      }
      write_report(out, report);
    } else if (graph->parsed()) {
      const auto cfg = parse_graph_config(detail::load_settings(graph_keys(), config_path, graph_flags));
      detail::run_graph(cfg, out);
    } else if (spatial->parsed()) {
      const auto cfg = parse_spatial_config(detail::load_settings(spatial_keys(), config_path, spatial_flags));
      detail::run_spatial(cfg, out);
    } else if (summarize_cmd->parsed()) {
      const Settings s = detail::load_settings(summarize_keys, config_path, summarize_flags);
      const auto input = s.text("input");
      if (!input) throw ConfigError("input", "is required");
      const auto values = detail::load_column(*input, s.text("column").value_or("x_inf"));
      if (values.size() < 2) throw DataError(*input, 0, "summarize needs at least two samples");
      write_report(out, to_json(summarize(values)));
    } else if (histogram_cmd->parsed()) {
      const Settings s = detail::load_settings(histogram_keys, config_path, histogram_flags);
      const auto input = s.text("input");
      if (!input) throw ConfigError("input", "is required");
      const double width = s.has("bin-width") ? detail::positive(s, "bin-width") : 1.0;
      const auto scale = detail::optional_positive(s, "scale");
      const auto normal_mean = s.number("normal-mean");
      const auto normal_var = detail::optional_positive(s, "normal-variance");
      const auto poisson_mean = s.number("poisson-mean");
      if (poisson_mean && *poisson_mean < 0.0) throw ConfigError("poisson-mean", "must be >= 0");
      const auto values = detail::load_column(*input, s.text("column").value_or("x_inf"));
      const Histogram hist = make_histogram(std::span<const double>(values), width,
                                            scale.value_or(static_cast<double>(values.size())));
      std::optional<SampleSummary> summary;
      if (values.size() >= 2) summary = summarize(values);
      auto need = [&](const char* key) -> const SampleSummary& {
        if (!summary) throw ConfigError(key, "needs an explicit value for a single sample");
        return *summary;
      };
      const double nm = normal_mean ? *normal_mean : need("normal-mean").mean;
      const double nv = normal_var ? *normal_var : need("normal-variance").variance;
      if (!(nv > 0.0)) throw ConfigError("normal-variance", "must be > 0");
      const double pm = poisson_mean ? *poisson_mean : std::max(0.0, need("poisson-mean").mean);
      const auto normal = overlay_curve(hist, NormalModel{nm, nv});
      const auto poisson = overlay_curve(hist, PoissonModel{pm});
      detail::emit(s.text("output").value_or(""), out, [&](std::ostream& o) { write_histogram(o, hist, normal, poisson); });
    } else if (fit_cmd->parsed()) {
      const Settings s = detail::load_settings(
          [&] {
            auto keys = fit_keys;
            keys.push_back("weighted");
            return keys;
          }(),
          config_path, fit_flags);
      const auto input = s.text("input");
      if (!input) throw ConfigError("input", "is required");
      const FitSpec spec = parse_fit_spec(s);
      const TimeSeries series = read_timeseries(*input);
      write_report(out, to_json(fit(series, spec)));
    } else if (reproduce->parsed()) {
      Settings s(reproduce_keys);
      reproduce_flags.apply(s);
      ReproduceOptions opt;
      opt.target = target;
      const std::uint64_t default_trials = target == "fig2" ? 10000 : 1;
      opt.run = detail::trial_settings(s, default_trials);
      opt.output_dir = s.text("output-dir").value_or(".");
      opt.input = s.text("input").value_or(target == "fig3" ? "data/fig3_synthetic_stand_in.csv" : "");
      run_reproduce(opt, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

inline int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace jamming::cli
