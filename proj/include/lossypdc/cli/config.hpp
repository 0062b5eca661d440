#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lossypdc/decomp/modes.hpp"
#include "lossypdc/pdc/integrator.hpp"
#include "lossypdc/pdc/waveguide.hpp"

namespace lossypdc::cli {

// Schema violation; `field` is the dotted key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct GainMode {
  enum class Kind { kExplicit, kCalibrate };
  Kind kind = Kind::kCalibrate;
  double per_m = 0.0;            // explicit
  double target_photons = 40.0;  // calibrate
  pdc::PhotonTarget target = pdc::PhotonTarget::kFirstMode;
};

struct ScenarioConfig {
  std::string name = "custom";  // WG0 | WG1 | WG2 | custom
  pdc::WaveguideSpec waveguide;  // lossless; losses come from the sweep
  pdc::PumpSpec pump;
  std::vector<double> eta_bar_db;
  double r_eta = 0.0;
  GainMode gain;

  std::size_t grid_points = 101;
  double span_sigma = 6.0;
  std::optional<double> half_span_rad_s;
  std::size_t steps = 2000;
  bool step_check = false;

  std::vector<decomp::Basis> bases{decomp::Basis::kMercerWolf, decomp::Basis::kWilliamsonEuler,
                                   decomp::Basis::kMaxSqueezed};
  bool write_profiles = true;
  bool lab_frame_profiles = false;
  std::size_t optimality_trials = 0;

  bool jsi_low_gain = true;
  std::vector<double> sweep_photons;

  FrequencyGrid grid() const;
  pdc::SolverConfig solver(double gain_per_m) const;
  // Fully resolved, with SI units, for embedding in outputs.
  std::string to_json() const;
};

ScenarioConfig parse_config(const std::string& toml_text, const std::string& source = "<string>");
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace lossypdc::cli
