#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lossypdc/cli/runner.hpp"

namespace lossypdc::cli {

std::string_view code_version();

// Each CSV starts with '#' comment lines carrying the resolved config as JSON.
std::string tmbs_csv(const SweepResult& result);
std::string modes_csv(const SweepResult& result, std::size_t point);
std::string jsi_csv(const JsiResult& jsi, const ScenarioConfig& config);
std::string gain_sweep_csv(const std::vector<GainPoint>& points, const ScenarioConfig& config);

// Writes <stem>_tmbs.csv, <stem>_modes_<eta>dB.csv and <stem>.json into dir.
std::vector<std::filesystem::path> write_scenario(const SweepResult& result, const std::filesystem::path& dir,
                                                  const std::string& stem);
std::vector<std::filesystem::path> write_jsi(const JsiResult& jsi, const ScenarioConfig& config,
                                             const std::filesystem::path& dir, const std::string& stem);
std::vector<std::filesystem::path> write_gain_sweep(const std::vector<GainPoint>& points,
                                                    const ScenarioConfig& config,
                                                    const std::filesystem::path& dir, const std::string& stem);

}  // namespace lossypdc::cli
