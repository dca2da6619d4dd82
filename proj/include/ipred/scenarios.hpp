#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "ipred/network_sim.hpp"

namespace ipred {

inline constexpr double kSpeedOfLight = 3.0e8;
inline constexpr std::size_t kDeskRealizations = 1000;
inline constexpr std::size_t kFullScaleRealizations = 10000;

/// Doppler shift normalized to the slot rate: (2 v / c) f_c T_slot.
double doppler_normalized(double speed_mps, double carrier_hz, double slot_s);

struct TechScenario {
  std::string name;
  double carrier_hz = 0.0;
  double speed_mps = 0.0;
  double slot_s = 0.0;
  double doppler = 0.0;  ///< normalized Doppler from the physical parameters
  double eta = 0.0;      ///< first channel correlation zero, in slots
  double mu = 0.01;
  int ell = 20;

  /// Model parameters; the speed is taken from eta, not from the Doppler.
  SystemParams params() const;
};

/// LTE1, LTE2, LTE3 or WSN.
TechScenario build_tech_scenario(const std::string& name);
std::vector<std::string> tech_scenario_names();

/// Setups 1-3 of the example table.
ScenarioConfig setup_config(int setup);

struct NamedScenario {
  std::string name;
  ScenarioConfig config;
};

struct Preset {
  std::string name;
  std::string description;
  std::vector<NamedScenario> scenarios;
};

std::vector<std::string> preset_names();
/// Every scenario of a preset shares `seed`, so variants see common random numbers.
Preset build_preset(const std::string& name, std::uint64_t seed = 1, bool full_scale = false);

/// Flat key = value text with one [section] per scenario. Keys not given keep
/// the setup-1 defaults; `eta` overrides `nu`.
std::vector<NamedScenario> parse_scenario_config(std::istream& in);
std::vector<NamedScenario> load_scenario_config(const std::filesystem::path& path);

}  // namespace ipred
