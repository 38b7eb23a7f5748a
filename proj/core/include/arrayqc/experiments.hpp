#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "arrayqc/config.hpp"

namespace arrayqc {

// Geometry, couplings and model at one detuning, plus derived calibrations.
struct ModelContext {
  ArrayCouplings couplings;
  EffectiveModel model;
  std::optional<OptimalDetuning> search;  // set when delta_LI was searched
  GateCalibration calib;
};

ModelContext build_context(const LatticeSpec& lattice, const ImpuritySpec& impurities,
                           const std::optional<DisorderSpec>& disorder, const ModelOptions& options,
                           const CalibrationOverrides& calibration,
                           std::optional<double> delta_LI = std::nullopt);
ModelContext build_context(const RunConfig& config);

// Runs fn(0..n-1) on a pool of `threads` workers. The first exception is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// ---- model ---------------------------------------------------------------

struct ModelResult {
  ModelContext context;
  OptimalDetuning sweep;
};

ModelResult run_model(const RunConfig& config);

// ---- gate depth ----------------------------------------------------------

struct GateDepthResult {
  std::string gate;
  double angle = 0.0;
  std::vector<double> fidelity;  // index = number of gates applied
  double gate_duration = 0.0;    // mean of the gate / inverse pair
  double delta_LI = 0.0;
  double Gamma_eff = 0.0;
  double wall_time = 0.0;
};

// Target qubit 0; every other impurity is detuned first. X starts in |e>,
// Z in (|g> + |e>)/sqrt 2.
GateDepthResult gate_depth(const ModelContext& ctx, Tier tier, const std::string& gate,
                           double angle, int depth, const EvolveOptions& evolve);
GateDepthResult run_gate_depth(const RunConfig& config);

// ---- iSWAP error sweep ---------------------------------------------------

struct SweepPoint {
  double a = 0.0;
  int distance = 1;  // in lattice spacings
  double error = 1.0;
  double fidelity = 0.0;
  double delta_LI = 0.0;
  double Gamma_eff = 0.0;
  cplx g{};
  double iswap_duration = 0.0;
  std::string note;
};

struct SweepResult {
  int count = 0;
  std::vector<SweepPoint> points;  // spacing-major, in config order
  double wall_time = 0.0;
};

// Impurity pair in the middle row, `distance` plaquettes apart.
ImpuritySpec centred_pair(const LatticeSpec& lattice, int distance, const ImpuritySpec& base);
SweepPoint iswap_point(const RunConfig& config, double a, int distance);
SweepResult run_iswap_sweep(const RunConfig& config);

// ---- circuits ------------------------------------------------------------

struct CircuitReport {
  std::string name;
  Circuit circuit;
  RunResult run;
  std::vector<std::string> labels;
  double exchange_sign = 1.0;
  RVec max_excited;               // per impurity, over the sampled trajectory
  std::vector<double> computational;  // final |amplitude|^2 on the 2^n bare states
  std::vector<int> dominant;      // indices of the two largest computational populations
  double leakage = 0.0;           // population outside the two dominant states
  double delta_LI = 0.0;
  double Gamma_eff = 0.0;
};

Circuit load_circuit(const RunConfig& config, double exchange_sign, std::string& name);
CircuitReport run_circuit_experiment(const RunConfig& config);
CircuitReport run_circuit_experiment(const ModelContext& ctx, Tier tier, const Circuit& circuit,
                                     const std::string& name, const EvolveOptions& evolve,
                                     bool trajectory);

// per-impurity e population at each trajectory sample
std::vector<RVec> excited_populations(const Trajectory& traj, const Basis& basis);

// ---- disorder ------------------------------------------------------------

struct Stats {
  double mean = 0.0, std = 0.0, min = 0.0, max = 0.0;
};
Stats summarize(const std::vector<double>& values);

struct DisorderResult {
  double sigma_frac = 0.0;
  int samples = 0;
  int depth = 0;
  double delta_LI = 0.0;  // fixed at the ordered-geometry optimum
  std::vector<std::uint64_t> seeds;
  std::vector<double> x_fidelity, z_fidelity;
  Stats x, z;
  double wall_time = 0.0;
};

DisorderResult run_disorder(const RunConfig& config);

// ---- validate ------------------------------------------------------------

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<Check> checks;
  bool pass() const;
};

Check check_green_limit();
Check check_reciprocity(const ArrayCouplings& c);
Check check_gamma_positivity(const ArrayCouplings& c);
Check check_subradiant(const ModelContext& ctx);
// reduced vs full impurity populations, drives off, impurity 0 excited
Check check_reduced_vs_full(const ModelContext& ctx, double horizon, const EvolveOptions& evolve);
// all impurities excited; returns {suppression, shared-population agreement}
std::pair<Check, Check> check_full_double(const ModelContext& ctx, double horizon,
                                          const EvolveOptions& evolve);
// configured tolerances against an exact exponential reference
Check check_convergence(const ModelContext& ctx, double horizon, const Tolerances& tol);

ValidationReport run_validate(const RunConfig& config);

}  // namespace arrayqc
