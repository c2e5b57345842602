#include "iepinn/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "iepinn/calibration.hpp"
#include "iepinn/container.hpp"
#include "iepinn/forward_solver.hpp"
#include "iepinn/metrics.hpp"

namespace iepinn {

namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw ValidationError("config: malformed number for '" + key + "': " + v);
  }
}

std::int64_t to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::int64_t x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw ValidationError("config: malformed integer for '" + key + "': " + v);
  }
}

// Accessor that tracks defaults so the resolved snapshot lists every key.
class Resolver {
public:
  Resolver(const ConfigFile& cfg, std::set<std::string> allowed)
      : cfg_(cfg), allowed_(std::move(allowed)) {
    for (const auto& [k, v] : cfg.values)
      if (!allowed_.count(k))
        throw ValidationError("config: unknown key '" + k + "'");
  }

  double number(const std::string& key, double fallback) {
    const auto it = cfg_.values.find(key);
    const double v = it == cfg_.values.end() ? fallback : to_double(key, it->second);
    note(key, v);
    return v;
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const auto it = cfg_.values.find(key);
    const std::int64_t v =
        it == cfg_.values.end() ? fallback : to_int(key, it->second);
    resolved_[key] = std::to_string(v);
    return v;
  }
  std::optional<double> optional_number(const std::string& key) {
    const auto it = cfg_.values.find(key);
    if (it == cfg_.values.end()) return std::nullopt;
    const double v = to_double(key, it->second);
    note(key, v);
    return v;
  }
  std::optional<std::int64_t> optional_integer(const std::string& key) {
    const auto it = cfg_.values.find(key);
    if (it == cfg_.values.end()) return std::nullopt;
    const std::int64_t v = to_int(key, it->second);
    resolved_[key] = std::to_string(v);
    return v;
  }
  void note(const std::string& key, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    resolved_[key] = buf;
  }
  void note(const std::string& key, const std::string& v) { resolved_[key] = v; }

  void write_snapshot(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write config snapshot: " + path);
    for (const auto& [k, v] : resolved_) f << k << " = " << v << "\n";
  }

private:
  const ConfigFile& cfg_;
  std::set<std::string> allowed_;
  std::map<std::string, std::string> resolved_;
};

Inclusion parse_inclusion(const std::string& text) {
  std::istringstream in(text);
  std::string shape;
  in >> shape;
  Inclusion inc;
  if (shape == "disk") {
    inc.shape = Inclusion::Shape::disk;
    in >> inc.cx >> inc.cy >> inc.radius >> inc.E >> inc.nu;
  } else if (shape == "rect") {
    inc.shape = Inclusion::Shape::rectangle;
    in >> inc.x0 >> inc.y0 >> inc.x1 >> inc.y1 >> inc.E >> inc.nu;
  } else {
    throw ValidationError("config: inclusion shape must be 'disk' or 'rect', got '" +
                          shape + "'");
  }
  if (!in) throw ValidationError("config: malformed inclusion: " + text);
  return inc;
}

void require_exists(const std::string& path, const char* what) {
  if (!fs::exists(path))
    throw ValidationError(std::string(what) + " not found: " + path);
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& path) {
  require_exists(path, "config file");
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open config: " + path);
  ConfigFile cfg;
  std::string line;
  while (std::getline(f, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string s = trim(line);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path + ": malformed config line: " + s);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ValidationError(path + ": empty config key");
    if (key == "inclusion") {
      cfg.inclusions.push_back(value);
    } else {
      if (cfg.values.count(key))
        throw ValidationError(path + ": duplicate config key '" + key + "'");
      cfg.values[key] = value;
    }
  }
  return cfg;
}

void cmd_generate(const std::string& config_path, const std::string& out_dir,
                  const CliOverrides& overrides) {
  const ConfigFile cfg = ConfigFile::parse(config_path);
  Resolver r(cfg, {"ny", "nx", "h", "t", "stretch", "background_E", "background_nu",
                   "snr", "seed"});

  const auto ny = r.integer("ny", 32);
  const auto nx = r.integer("nx", 32);
  const double h = r.number("h", 1.0);
  const double t = r.number("t", 1.0);
  BoundaryCondition bc;
  bc.stretch = r.number("stretch", 0.01);

  PhantomSpec spec;
  spec.background_E = r.number("background_E", 1.0);
  spec.background_nu = r.number("background_nu", 0.3);
  for (const auto& text : cfg.inclusions) spec.inclusions.push_back(parse_inclusion(text));
  for (std::size_t k = 0; k < cfg.inclusions.size(); ++k)
    r.note("inclusion" + std::to_string(k), cfg.inclusions[k]);

  const auto snr = r.optional_number("snr");
  std::optional<std::int64_t> seed = r.optional_integer("seed");
  if (overrides.seed) {
    seed = static_cast<std::int64_t>(*overrides.seed);
    r.note("seed", std::to_string(*seed));
  }
  if (!seed) throw ValidationError("generate: a seed is required (config or --seed)");

  const ElasticityField elas = rasterize_phantom(spec, ny, nx, h, t);
  auto [disp, force] = solve_forward(elas, bc);

  Dataset dataset;
  dataset.truth_displacement = disp;
  dataset.truth_elasticity = elas;
  dataset.measured =
      snr ? add_noise(disp, *snr, static_cast<std::uint64_t>(*seed)) : disp;
  dataset.applied_force = force;
  dataset.calibration_capable = true;
  dataset.snr = snr;
  dataset.rng_seed = seed;

  fs::create_directories(out_dir);
  save_dataset(dataset, out_dir + "/dataset.efd");
  r.write_snapshot(out_dir + "/config.resolved");
  std::cout << "wrote " << out_dir << "/dataset.efd (applied force " << force
            << ")\n";
}

void cmd_train(const std::string& config_path, const std::string& dataset_path,
               const std::string& out_dir, const CliOverrides& overrides) {
  const ConfigFile cfg = ConfigFile::parse(config_path);
  Resolver r(cfg, {"depth", "width", "omega", "f_min", "sine_scale", "lambda_u",
                   "lambda_eps", "lambda_r", "lambda_E", "E_c", "learning_rate",
                   "stage_a", "stage_b", "stage_c", "desk_scale", "seed"});
  if (!cfg.inclusions.empty())
    throw ValidationError("config: unknown key 'inclusion'");

  NetworkConfig fit;
  fit.depth = static_cast<int>(r.integer("depth", 16));
  fit.width = static_cast<int>(r.integer("width", 128));
  fit.sine_scale = r.number("sine_scale", 30.0);
  NetworkConfig elas_cfg = fit;

  EncodingConfig enc;
  enc.omega = static_cast<int>(r.integer("omega", 64));
  enc.f_min = r.number("f_min", 1e-4);

  LossWeights weights;
  weights.lambda_u = r.number("lambda_u", 2.0);
  weights.lambda_eps = r.number("lambda_eps", 1.0);
  weights.lambda_r = r.number("lambda_r", 3.0);
  weights.lambda_E = r.number("lambda_E", 0.02);
  const double E_c = r.number("E_c", 0.25);

  TrainingSchedule schedule;
  schedule.stage_a_iters = r.integer("stage_a", 50'000);
  schedule.stage_b_iters = r.integer("stage_b", 100'000);
  schedule.stage_c_iters = r.integer("stage_c", 50'000);
  schedule.learning_rate = r.number("learning_rate", 1e-4);
  schedule.desk_scale_factor = r.number("desk_scale", 1.0);
  if (overrides.desk_scale) {
    schedule.desk_scale_factor = *overrides.desk_scale;
    r.note("desk_scale", *overrides.desk_scale);
  }

  std::optional<std::int64_t> seed = r.optional_integer("seed");
  if (overrides.seed) {
    seed = static_cast<std::int64_t>(*overrides.seed);
    r.note("seed", std::to_string(*seed));
  }
  if (!seed) throw ValidationError("train: a seed is required (config or --seed)");
  schedule.seed = static_cast<std::uint64_t>(*seed);

  require_exists(dataset_path, "dataset");
  const Dataset dataset = load_dataset(dataset_path);

  fs::create_directories(out_dir);
  r.note("dataset", dataset_path);
  r.write_snapshot(out_dir + "/config.resolved");

  TrainOptions options;
  options.checkpoint_dir = out_dir;
  const TrainingState state =
      train(dataset, schedule, weights, E_c, fit, elas_cfg, enc, options);

  write_history_csv(state.history, out_dir + "/history.csv");
  const PredictedFields fields = predict_fields(state, dataset);
  save_predicted_fields(fields, out_dir + "/predicted.pfd");
  if (!state.history.empty())
    std::cout << "trained " << state.iteration << " iterations, final total loss "
              << state.history.back().loss.total << "\n";
  else
    std::cout << "empty schedule: wrote initialized prediction\n";
}

void cmd_calibrate(const std::string& run_dir, const std::string& dataset_path) {
  require_exists(run_dir + "/predicted.pfd", "predicted fields");
  require_exists(dataset_path, "dataset");
  const PredictedFields fields = load_predicted_fields(run_dir + "/predicted.pfd");
  const Dataset dataset = load_dataset(dataset_path);
  if (!dataset.applied_force || !(*dataset.applied_force > 0.0))
    throw ValidationError("calibrate: dataset has no positive applied_force");

  const CalibrationResult result =
      calibrate(fields.elasticity.E, fields.stress, *dataset.applied_force,
                dataset.measured.h());
  save_calibration(result, run_dir + "/calibration.efd");
  std::cout << "c_hat = " << result.c_hat << " (predicted boundary force "
            << result.boundary_force_predicted << ")\n";
}

void cmd_evaluate(const std::string& run_dir, const std::string& dataset_path) {
  require_exists(run_dir + "/predicted.pfd", "predicted fields");
  require_exists(dataset_path, "dataset");
  const PredictedFields fields = load_predicted_fields(run_dir + "/predicted.pfd");
  const Dataset dataset = load_dataset(dataset_path);
  std::optional<ScalarGrid> E_abs;
  if (fs::exists(run_dir + "/calibration.efd"))
    E_abs = load_calibration(run_dir + "/calibration.efd").E_absolute;
  export_report(run_dir, fields, dataset, E_abs);
  std::cout << "wrote " << run_dir << "/metrics.csv\n";
}

void cmd_plot(const std::string& run_dir) {
  require_exists(run_dir + "/predicted.pfd", "predicted fields");
  const PredictedFields fields = load_predicted_fields(run_dir + "/predicted.pfd");
  export_heatmap(fields.elasticity.E, run_dir + "/pred_E.png");
  export_heatmap(fields.elasticity.nu, run_dir + "/pred_nu.png");
  export_heatmap(fields.displacement.ux, run_dir + "/pred_ux.png");
  export_heatmap(fields.displacement.uy, run_dir + "/pred_uy.png");
  export_heatmap(fields.stress.sxx, run_dir + "/pred_sxx.png");
  std::cout << "wrote heatmaps under " << run_dir << "\n";
}

void save_predicted_fields(const PredictedFields& fields, const std::string& path) {
  TextContainer c;
  c.magic = "pfd 1";
  c.set("ny", static_cast<std::int64_t>(fields.displacement.ny()));
  c.set("nx", static_cast<std::int64_t>(fields.displacement.nx()));
  c.set("h", fields.displacement.h());
  c.set("t", fields.displacement.t());
  c.add_block("ux", fields.displacement.ux.values);
  c.add_block("uy", fields.displacement.uy.values);
  c.add_block("exx", fields.strain.exx.values);
  c.add_block("eyy", fields.strain.eyy.values);
  c.add_block("gxy", fields.strain.gxy.values);
  c.add_block("sxx", fields.stress.sxx.values);
  c.add_block("syy", fields.stress.syy.values);
  c.add_block("txy", fields.stress.txy.values);
  c.add_block("E", fields.elasticity.E.values);
  c.add_block("nu", fields.elasticity.nu.values);
  c.add_block("rx", fields.residual.rx.values);
  c.add_block("ry", fields.residual.ry.values);
  c.write(path);
}

PredictedFields load_predicted_fields(const std::string& path) {
  const TextContainer c = TextContainer::read(path, "pfd 1");
  const double h = c.header_double("h");
  const double t = c.header_double("t");
  auto grid = [&](const char* name) {
    ScalarGrid g;
    g.values = c.block(name);
    g.h = h;
    g.t = t;
    return g;
  };
  PredictedFields f;
  f.displacement.ux = grid("ux");
  f.displacement.uy = grid("uy");
  f.strain.exx = grid("exx");
  f.strain.eyy = grid("eyy");
  f.strain.gxy = grid("gxy");
  f.stress.sxx = grid("sxx");
  f.stress.syy = grid("syy");
  f.stress.txy = grid("txy");
  f.elasticity.E = grid("E");
  f.elasticity.nu = grid("nu");
  f.residual.rx = grid("rx");
  f.residual.ry = grid("ry");
  if (f.displacement.ny() != c.header_int("ny") ||
      f.displacement.nx() != c.header_int("nx"))
    throw ValidationError(path + ": displacement block does not match header dims");
  return f;
}

}  // namespace iepinn
