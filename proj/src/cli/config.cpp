#include "lossypdc/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <toml.hpp>

#include "lossypdc/core/errors.hpp"

namespace lossypdc::cli {
namespace {

// Wraps one TOML table and rejects keys nobody asked for.
class Section {
 public:
  Section(const toml::table* table, std::string path) : table_(table), path_(std::move(path)) {}

  bool present() const { return table_ != nullptr; }
  bool has(const std::string& key) const { return table_ && table_->contains(key); }
  std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  Section sub(const std::string& key) {
    used_.insert(key);
    if (!table_ || !table_->contains(key)) return {nullptr, path(key)};
    const toml::table* t = table_->get(key)->as_table();
    if (!t) throw ConfigError(path(key), "expected a table");
    return {t, path(key)};
  }

  std::optional<double> number(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) {
      if (!std::isfinite(*v)) throw ConfigError(path(key), "must be finite");
      return *v;
    }
    throw ConfigError(path(key), "expected a number");
  }

  double number_or(const std::string& key, double fallback) { return number(key).value_or(fallback); }

  double required_number(const std::string& key) {
    auto v = number(key);
    if (!v) throw ConfigError(path(key), "required");
    return *v;
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (!n->is_integer()) throw ConfigError(path(key), "expected an integer");
    return n->value<std::int64_t>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (!n->is_boolean()) throw ConfigError(path(key), "expected true or false");
    return n->value<bool>();
  }

  std::optional<std::string> string(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (!n->is_string()) throw ConfigError(path(key), "expected a string");
    return n->value<std::string>();
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    const toml::array* a = n->as_array();
    if (!a) throw ConfigError(path(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < a->size(); ++i) {
      const toml::node& e = *a->get(i);
      auto v = e.value<double>();
      if (!v || !(e.is_integer() || e.is_floating_point()) || !std::isfinite(*v)) {
        throw ConfigError(path(key) + "[" + std::to_string(i) + "]", "expected a finite number");
      }
      out.push_back(*v);
    }
    return out;
  }

  std::optional<std::vector<std::string>> strings(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    const toml::array* a = n->as_array();
    if (!a) throw ConfigError(path(key), "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < a->size(); ++i) {
      auto v = a->get(i)->value<std::string>();
      if (!v || !a->get(i)->is_string()) {
        throw ConfigError(path(key) + "[" + std::to_string(i) + "]", "expected a string");
      }
      out.push_back(*v);
    }
    return out;
  }

  void finish() const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      const std::string key(k.str());
      if (!used_.count(key)) throw ConfigError(path(key), "unknown key");
    }
  }

 private:
  const toml::node* node(const std::string& key) {
    used_.insert(key);
    return table_ ? table_->get(key) : nullptr;
  }

  const toml::table* table_;
  std::string path_;
  std::set<std::string> used_;
};

double positive(Section& s, const std::string& key, double value) {
  if (!(value > 0.0)) throw ConfigError(s.path(key), "must be positive");
  return value;
}

pdc::FieldDispersion read_field(Section& wg, const std::string& name, double omega0,
                                const pdc::FieldDispersion* pump) {
  Section f = wg.sub(name);
  if (!f.present()) throw ConfigError(f.path(""), "required table");
  pdc::FieldDispersion out;
  out.n0 = positive(f, "n0", f.required_number("n0"));
  out.omega0_rad_s = positive(f, "omega0_rad_s", f.number_or("omega0_rad_s", omega0));

  int given = 0;
  if (auto v = f.number("vg_m_s")) {
    out.vg_m_s = positive(f, "vg_m_s", *v);
    ++given;
  }
  if (auto v = f.number("vg_c_over_n0")) {
    out.vg_m_s = positive(f, "vg_c_over_n0", *v) * pdc::kSpeedOfLight / out.n0;
    ++given;
  }
  if (auto v = f.number("vg_rel_pump")) {
    if (!pump) throw ConfigError(f.path("vg_rel_pump"), "not available for the pump itself");
    out.vg_m_s = positive(f, "vg_rel_pump", *v) * pump->vg_m_s;
    ++given;
  }
  if (given != 1) {
    throw ConfigError(f.path("vg_*"), "give exactly one of vg_m_s, vg_c_over_n0, vg_rel_pump");
  }
  f.finish();
  return out;
}

std::size_t count(Section& s, const std::string& key, std::int64_t value, std::int64_t min) {
  if (value < min) throw ConfigError(s.path(key), "must be at least " + std::to_string(min));
  return static_cast<std::size_t>(value);
}

}  // namespace

FrequencyGrid ScenarioConfig::grid() const {
  const double half = half_span_rad_s ? *half_span_rad_s : pdc::default_half_span(waveguide, pump, span_sigma);
  return FrequencyGrid::uniform(waveguide.signal.omega0_rad_s, half, grid_points);
}

pdc::SolverConfig ScenarioConfig::solver(double gain_per_m) const {
  return {grid(), gain_per_m, steps, step_check};
}

std::string ScenarioConfig::to_json() const {
  using nlohmann::json;
  auto field = [](const pdc::FieldDispersion& f) {
    return json{{"n0", f.n0}, {"vg_m_s", f.vg_m_s}, {"omega0_rad_s", f.omega0_rad_s}};
  };
  json bases_json = json::array();
  for (auto b : bases) bases_json.push_back(std::string(decomp::basis_label(b)));
  json j;
  j["scenario"] = name;
  j["waveguide"] = {{"length_m", waveguide.length_m},
                    {"k_qpm_rad_m", waveguide.k_qpm_rad_m},
                    {"pump", field(waveguide.pump)},
                    {"signal", field(waveguide.signal)},
                    {"idler", field(waveguide.idler)}};
  j["pump"] = {{"wavelength_m", pump.wavelength_m}, {"fwhm_s", pump.fwhm_s}};
  j["loss"] = {{"eta_bar_db", eta_bar_db}, {"r_eta", r_eta}};
  if (gain.kind == GainMode::Kind::kExplicit) {
    j["gain"] = {{"mode", "explicit"}, {"per_m", gain.per_m}};
  } else {
    j["gain"] = {{"mode", "calibrate"},
                 {"target_photons", gain.target_photons},
                 {"target", gain.target == pdc::PhotonTarget::kFirstMode ? "first_mode" : "total"}};
  }
  j["grid"] = {{"points", grid_points},
               {"half_span_rad_s",
                half_span_rad_s ? *half_span_rad_s : pdc::default_half_span(waveguide, pump, span_sigma)},
               {"center_rad_s", waveguide.signal.omega0_rad_s}};
  j["solver"] = {{"steps", steps}, {"step_check", step_check}};
  j["output"] = {{"bases", bases_json},
                 {"profiles", write_profiles},
                 {"profile_frame", lab_frame_profiles ? "lab" : "interaction"}};
  j["checks"] = {{"msq_optimality_trials", optimality_trials}};
  j["jsi"] = {{"low_gain", jsi_low_gain}};
  j["gain_sweep"] = {{"photons", sweep_photons}};
  return j.dump();
}

ScenarioConfig parse_config(const std::string& toml_text, const std::string& source) {
  toml::table doc;
  try {
    doc = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError("<toml>", msg.str());
  }
  Section root(&doc, "");
  ScenarioConfig cfg;

  Section scen = root.sub("scenario");
  cfg.name = scen.string("name").value_or("custom");
  if (cfg.name != "WG0" && cfg.name != "WG1" && cfg.name != "WG2" && cfg.name != "custom") {
    throw ConfigError("scenario.name", "expected WG0, WG1, WG2 or custom, got '" + cfg.name + "'");
  }
  scen.finish();

  Section pump = root.sub("pump");
  if (auto v = pump.number("wavelength_nm")) cfg.pump.wavelength_m = positive(pump, "wavelength_nm", *v) * 1e-9;
  if (auto v = pump.number("fwhm_ps")) cfg.pump.fwhm_s = positive(pump, "fwhm_ps", *v) * 1e-12;
  pump.finish();

  Section wg = root.sub("waveguide");
  if (!wg.present()) throw ConfigError("waveguide", "required table");
  cfg.waveguide.length_m = positive(wg, "length_m", wg.required_number("length_m"));
  const double wp = cfg.pump.center_rad_s();
  cfg.waveguide.pump = read_field(wg, "pump", wp, nullptr);
  cfg.waveguide.signal = read_field(wg, "signal", wp / 2.0, &cfg.waveguide.pump);
  cfg.waveguide.idler = read_field(wg, "idler", wp / 2.0, &cfg.waveguide.pump);
  const auto qpm = wg.string("qpm");
  const auto k_qpm = wg.number("k_qpm_rad_m");
  if (qpm && k_qpm) throw ConfigError("waveguide.qpm", "give either qpm or k_qpm_rad_m");
  if (qpm && *qpm != "degenerate") throw ConfigError("waveguide.qpm", "only \"degenerate\" is known");
  cfg.waveguide.k_qpm_rad_m = k_qpm ? *k_qpm : pdc::degenerate_qpm(cfg.waveguide);
  wg.finish();

  Section loss = root.sub("loss");
  auto list = loss.numbers("eta_bar_db");
  Section sweep = loss.sub("sweep");
  if (list && sweep.present()) throw ConfigError("loss", "give either eta_bar_db or [loss.sweep]");
  if (sweep.present()) {
    const double start = sweep.number_or("start_db", 0.0);
    const double stop = sweep.number_or("stop_db", 10.0);
    const double step = positive(sweep, "step_db", sweep.number_or("step_db", 0.25));
    if (stop < start) throw ConfigError("loss.sweep.stop_db", "must not be below start_db");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < n; ++k) cfg.eta_bar_db.push_back(start + step * static_cast<double>(k));
    sweep.finish();
  } else if (list) {
    if (list->empty()) throw ConfigError("loss.eta_bar_db", "must not be empty");
    cfg.eta_bar_db = *list;
  } else if (cfg.name == "WG0") {
    cfg.eta_bar_db = {0.0};
  } else {
    for (int k = 0; k <= 40; ++k) cfg.eta_bar_db.push_back(0.25 * k);
  }
  for (std::size_t k = 0; k < cfg.eta_bar_db.size(); ++k) {
    if (!(cfg.eta_bar_db[k] >= 0.0)) {
      throw ConfigError("loss.eta_bar_db[" + std::to_string(k) + "]", "must be non-negative");
    }
  }
  const auto r = loss.number("r_eta");
  if (cfg.name == "WG2") {
    if (r && std::abs(*r - 1.0 / 3.0) > 1e-9) throw ConfigError("loss.r_eta", "WG2 requires r_eta = 1/3");
    cfg.r_eta = 1.0 / 3.0;
  } else if (cfg.name == "WG1" || cfg.name == "WG0") {
    if (r && *r != 0.0) throw ConfigError("loss.r_eta", cfg.name + " requires r_eta = 0");
    cfg.r_eta = 0.0;
  } else {
    cfg.r_eta = r.value_or(0.0);
  }
  if (!(std::abs(cfg.r_eta) <= 1.0)) throw ConfigError("loss.r_eta", "|r_eta| must not exceed 1");
  if (cfg.name == "WG0") {
    for (double v : cfg.eta_bar_db) {
      if (v != 0.0) throw ConfigError("loss.eta_bar_db", "WG0 is lossless, every entry must be 0");
    }
  }
  loss.finish();

  Section gain = root.sub("gain");
  const std::string mode = gain.string("mode").value_or("calibrate");
  if (mode == "explicit") {
    cfg.gain.kind = GainMode::Kind::kExplicit;
    cfg.gain.per_m = gain.required_number("per_m");
    if (!(cfg.gain.per_m >= 0.0)) throw ConfigError("gain.per_m", "must be non-negative");
  } else if (mode == "calibrate") {
    cfg.gain.kind = GainMode::Kind::kCalibrate;
    cfg.gain.target_photons = positive(gain, "target_photons", gain.number_or("target_photons", 40.0));
    const std::string target = gain.string("target").value_or("first_mode");
    if (target == "first_mode") {
      cfg.gain.target = pdc::PhotonTarget::kFirstMode;
    } else if (target == "total") {
      cfg.gain.target = pdc::PhotonTarget::kTotal;
    } else {
      throw ConfigError("gain.target", "expected first_mode or total");
    }
  } else {
    throw ConfigError("gain.mode", "expected explicit or calibrate");
  }
  gain.finish();

  Section grid = root.sub("grid");
  if (auto v = grid.integer("points")) cfg.grid_points = count(grid, "points", *v, 1);
  const auto span = grid.number("span_sigma");
  const auto half = grid.number("half_span_rad_s");
  if (span && half) throw ConfigError("grid", "give either span_sigma or half_span_rad_s");
  if (span) cfg.span_sigma = positive(grid, "span_sigma", *span);
  if (half) cfg.half_span_rad_s = positive(grid, "half_span_rad_s", *half);
  grid.finish();

  Section solver = root.sub("solver");
  if (auto v = solver.integer("steps")) cfg.steps = count(solver, "steps", *v, 100);
  cfg.step_check = solver.boolean("step_check").value_or(false);
  solver.finish();

  Section out = root.sub("output");
  if (auto names = out.strings("bases")) {
    if (names->empty()) throw ConfigError("output.bases", "must not be empty");
    cfg.bases.clear();
    for (const auto& n : *names) {
      auto b = decomp::parse_basis(n);
      if (!b || *b == decomp::Basis::kCustom) {
        throw ConfigError("output.bases", "unknown basis '" + n + "' (MW, WE, MSq)");
      }
      if (std::find(cfg.bases.begin(), cfg.bases.end(), *b) != cfg.bases.end()) {
        throw ConfigError("output.bases", "duplicate basis '" + n + "'");
      }
      cfg.bases.push_back(*b);
    }
    std::sort(cfg.bases.begin(), cfg.bases.end());
  }
  cfg.write_profiles = out.boolean("profiles").value_or(true);
  const std::string frame = out.string("profile_frame").value_or("interaction");
  if (frame != "interaction" && frame != "lab") {
    throw ConfigError("output.profile_frame", "expected interaction or lab");
  }
  cfg.lab_frame_profiles = frame == "lab";
  out.finish();

  Section checks = root.sub("checks");
  if (auto v = checks.integer("msq_optimality_trials")) cfg.optimality_trials = count(checks, "msq_optimality_trials", *v, 0);
  checks.finish();

  Section jsi = root.sub("jsi");
  cfg.jsi_low_gain = jsi.boolean("low_gain").value_or(true);
  jsi.finish();

  Section gs = root.sub("gain_sweep");
  if (auto v = gs.numbers("photons")) {
    if (v->empty()) throw ConfigError("gain_sweep.photons", "must not be empty");
    for (std::size_t k = 0; k < v->size(); ++k) {
      if (!((*v)[k] > 0.0)) {
        throw ConfigError("gain_sweep.photons[" + std::to_string(k) + "]", "must be positive");
      }
    }
    cfg.sweep_photons = *v;
  }
  gs.finish();

  root.finish();
  try {
    cfg.waveguide.validate();
    (void)cfg.grid();
  } catch (const InvalidInput& e) {
    throw ConfigError("waveguide", e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

}  // namespace lossypdc::cli
