#include "lossypdc/cli/output.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>

#include <json.hpp>

#include "lossypdc/core/errors.hpp"
#include "lossypdc/simd/dispatch.hpp"

#ifndef LOSSYPDC_VERSION
#define LOSSYPDC_VERSION "unknown"
#endif

namespace lossypdc::cli {
namespace {

// Enough digits to round-trip the quantities that matter, few enough to keep
// ISA-level rounding differences out of the files.
std::string num(double v) { return fmt::format("{:.12g}", v); }

std::string header(const ScenarioConfig& cfg, std::string_view kind, std::optional<double> gain) {
  std::string h = fmt::format("# lossypdc {} {}\n", kind, code_version());
  h += "# config: " + cfg.to_json() + "\n";
  if (gain) h += "# gain_per_m: " + num(*gain) + "\n";
  return h;
}

std::string eta_tag(double eta) { return fmt::format("{:.2f}dB", eta); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

nlohmann::json grid_json(const FrequencyGrid& grid) {
  return {{"points", grid.size()},
          {"first_rad_s", grid[0]},
          {"last_rad_s", grid[grid.size() - 1]},
          {"spacing_rad_s", grid.spacing()}};
}

nlohmann::json sidecar_base(const ScenarioConfig& cfg, std::string_view kind,
                            const std::vector<std::filesystem::path>& files) {
  nlohmann::json j;
  j["kind"] = kind;
  j["code_version"] = code_version();
  j["kernel_isa"] = simd::isa_name(simd::active().isa);
  j["config"] = nlohmann::json::parse(cfg.to_json());
  j["grid"] = grid_json(cfg.grid());
  j["steps"] = cfg.steps;
  nlohmann::json names = nlohmann::json::array();
  for (const auto& f : files) names.push_back(f.filename().string());
  j["files"] = names;
  return j;
}

}  // namespace

std::string_view code_version() { return LOSSYPDC_VERSION; }

std::string tmbs_csv(const SweepResult& result) {
  std::string s = header(result.config, "tmbs", result.gain_per_m);
  s += "scenario,eta_bar_db,r_eta,basis,N_A,N_B,alpha,beta,gamma,nu_minus,lambda_minus,E_nats,squeezing_db,purity\n";
  for (const PointResult& p : result.points) {
    for (const tmbs::Report& r : p.reports) {
      s += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", result.config.name, num(p.eta_bar_db),
                       num(result.config.r_eta), decomp::basis_label(r.modes.label), num(r.n_a), num(r.n_b),
                       num(r.cov.alpha), num(r.cov.beta), num(r.cov.gamma), num(r.nu_minus),
                       num(r.lambda_minus), num(r.log_negativity), num(r.squeezing_db), num(r.purity));
    }
  }
  return s;
}

std::string modes_csv(const SweepResult& result, std::size_t point) {
  const PointResult& p = result.points.at(point);
  std::string s = header(result.config, "modes", result.gain_per_m);
  s += fmt::format("# eta_bar_db: {}\n# frame: {}\n", num(p.eta_bar_db),
                   result.config.lab_frame_profiles ? "lab" : "interaction");
  s += "basis,partition,omega_rad_s,abs_u,arg_u\n";
  for (const tmbs::Report& r : p.reports) {
    for (const auto& [part, mode] : {std::pair{"A", &r.modes.signal}, std::pair{"B", &r.modes.idler}}) {
      const CVector& u = mode->amplitudes();
      for (Eigen::Index k = 0; k < u.size(); ++k) {
        s += fmt::format("{},{},{},{},{}\n", decomp::basis_label(r.modes.label), part,
                         num(result.grid[static_cast<std::size_t>(k)]), num(std::abs(u(k))), num(std::arg(u(k))));
      }
    }
  }
  return s;
}

std::string jsi_csv(const JsiResult& jsi, const ScenarioConfig& cfg) {
  std::string s = header(cfg, "jsi", jsi.gain_per_m);
  s += fmt::format("# signal_photons: {}\n", num(jsi.signal_photons));
  s += "# rows: delta omega_s, columns: delta omega_i (rad/s, relative to the grid centre)\n";
  const double center = cfg.waveguide.signal.omega0_rad_s;
  s += "domega_s_rad_s";
  for (std::size_t j = 0; j < jsi.grid.size(); ++j) s += "," + num(jsi.grid[j] - center);
  s += "\n";
  for (Eigen::Index i = 0; i < jsi.intensity.rows(); ++i) {
    s += num(jsi.grid[static_cast<std::size_t>(i)] - center);
    for (Eigen::Index j = 0; j < jsi.intensity.cols(); ++j) s += "," + num(jsi.intensity(i, j));
    s += "\n";
  }
  return s;
}

std::string gain_sweep_csv(const std::vector<GainPoint>& points, const ScenarioConfig& cfg) {
  std::string s = header(cfg, "gain-sweep", std::nullopt);
  s += "target_photons,gain_per_m,N_A,N_B,lambda_minus,E_nats,lambda_pure\n";
  for (const GainPoint& p : points) {
    s += fmt::format("{},{},{},{},{},{},{}\n", num(p.target_photons), num(p.gain_per_m), num(p.n_a), num(p.n_b),
                     num(p.lambda_minus), num(p.log_negativity), num(p.lambda_pure));
  }
  return s;
}

std::vector<std::filesystem::path> write_scenario(const SweepResult& result, const std::filesystem::path& dir,
                                                  const std::string& stem) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  files.push_back(dir / (stem + "_tmbs.csv"));
  write_file(files.back(), tmbs_csv(result));
  if (result.config.write_profiles) {
    for (std::size_t i = 0; i < result.points.size(); ++i) {
      files.push_back(dir / (stem + "_modes_" + eta_tag(result.points[i].eta_bar_db) + ".csv"));
      write_file(files.back(), modes_csv(result, i));
    }
  }

  nlohmann::json j = sidecar_base(result.config, "scenario", files);
  j["gain_per_m"] = result.gain_per_m;
  nlohmann::json points = nlohmann::json::array();
  for (const PointResult& p : result.points) {
    nlohmann::json pj{{"eta_bar_db", p.eta_bar_db}};
    nlohmann::json warnings = nlohmann::json::array();
    for (const tmbs::Report& r : p.reports) {
      const std::string label(decomp::basis_label(r.modes.label));
      if (r.modes.degenerate) warnings.push_back(label + ": degenerate defining eigenvalue, tie-break applied");
      if (!r.modes.squeezed) warnings.push_back(label + ": state carries no squeezing, placeholder modes");
    }
    pj["warnings"] = warnings;
    if (p.grid_check) {
      pj["grid_check"] = {{"photons_rel_delta", p.grid_check->photons_rel_delta},
                          {"lambda_abs_delta", p.grid_check->lambda_abs_delta},
                          {"passed", p.grid_check->passed}};
    }
    if (p.optimality) {
      pj["msq_optimality"] = {{"best_found", p.optimality->best_found},
                              {"msq_value", p.optimality->msq_value},
                              {"evaluations", p.optimality->evaluations}};
    }
    points.push_back(pj);
  }
  j["points"] = points;
  files.push_back(dir / (stem + ".json"));
  write_file(files.back(), j.dump(2) + "\n");
  return files;
}

std::vector<std::filesystem::path> write_jsi(const JsiResult& jsi, const ScenarioConfig& cfg,
                                             const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files{dir / (stem + "_jsi.csv")};
  write_file(files.back(), jsi_csv(jsi, cfg));
  nlohmann::json j = sidecar_base(cfg, "jsi", files);
  j["gain_per_m"] = jsi.gain_per_m;
  j["signal_photons"] = jsi.signal_photons;
  files.push_back(dir / (stem + "_jsi.json"));
  write_file(files.back(), j.dump(2) + "\n");
  return files;
}

std::vector<std::filesystem::path> write_gain_sweep(const std::vector<GainPoint>& points,
                                                    const ScenarioConfig& cfg,
                                                    const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files{dir / (stem + "_gain.csv")};
  write_file(files.back(), gain_sweep_csv(points, cfg));
  nlohmann::json j = sidecar_base(cfg, "gain-sweep", files);
  files.push_back(dir / (stem + "_gain.json"));
  write_file(files.back(), j.dump(2) + "\n");
  return files;
}

}  // namespace lossypdc::cli
