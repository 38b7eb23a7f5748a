#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arrayqc/circuits.hpp"
#include "arrayqc/geometry.hpp"

namespace arrayqc {

// Flat "section.key" -> value view of a run config. Every key has a default;
// unknown sections or keys are rejected on load.
class ConfigTable {
 public:
  ConfigTable();  // all defaults

  static ConfigTable from_file(const std::string& path);
  static ConfigTable from_string(const std::string& ini);

  // "section.key=value"
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }
  std::string to_ini() const;

  static const std::vector<std::pair<std::string, std::string>>& schema();

 private:
  std::map<std::string, std::string> values_;
};

struct ModelOptions {
  Tier tier = Tier::Reduced;
  std::optional<double> delta_LI;  // empty means search for the optimum
  FrequencyReference reference = FrequencyReference::Mean;
  std::size_t search_points = 400;
  EvolveOptions evolve;
};

struct CalibrationOverrides {
  std::optional<double> Omega_x;  // default 1e4 gamma_I
  double Omega_f = 1.0;
  double delta_R = 200.0;
  double Omega_pi = 1.0;
  double delta_dec = 1.0;
  double Omega_eit = 1.0;
  bool dressed_exchange = false;  // gate timing from dressed_exchange()

  GateCalibration apply(const ArrayCouplings& couplings, const EffectiveModel& model) const;
};

struct ExperimentOptions {
  std::string gate = "x";  // gate-depth: x | z
  double angle = 0.0;      // 0 picks pi for x, pi/2 for z
  int depth = 700;
  std::vector<double> spacings{0.1, 0.05};
  std::vector<int> distances{1, 4};  // in lattice spacings
  int count = 100;
  std::string circuit = "bell";  // bell | ghz | path to circuit JSON
  int samples = 20;
  double sigma_frac = 0.01;
  double horizon = 0.0;  // validate: 0 picks one sqrt-iSWAP period
  bool full_double = true;
};

struct OutputOptions {
  std::string dir = "out";
  bool trajectory = true;
  bool wall_time = true;
};

struct RunConfig {
  LatticeSpec lattice;
  ImpuritySpec impurities;
  std::optional<DisorderSpec> disorder;
  ModelOptions model;
  CalibrationOverrides calibration;
  ExperimentOptions experiment;
  OutputOptions output;
  std::uint64_t seed = 0;
  int threads = 1;
  ConfigTable table;  // resolved key/value view, embedded in every artifact

  static RunConfig from_table(const ConfigTable& table);
};

}  // namespace arrayqc
