#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arrayqc/gates.hpp"
#include "arrayqc/propagator.hpp"

namespace arrayqc {

// Computational-basis amplitudes keyed by bitstrings such as "100" (qubit 0 first).
struct InitialState {
  std::vector<std::pair<std::string, cplx>> terms;

  static InitialState basis(const std::string& bits);
  CVec vector(int n_qubits) const;  // throws unless normalized
};

struct Circuit {
  int n_qubits = 0;
  InitialState initial;
  std::vector<GateOp> gates;

  void validate() const;
};

struct IsolationPolicy {
  bool automatic = true;
  // a gate counts as slow when duration * max spectator coupling exceeds this
  double slow_threshold = 0.01;
  bool compensate_storage_phase = true;
  double compensation_threshold = 1e-3;  // rad
};

struct CompiledCircuit {
  Schedule segments;
  // segments [gate_begin[k], gate_end[k]) belong to gate k; a final
  // recouple stage may follow the last gate
  std::vector<std::size_t> gate_end;
  std::vector<CVec> ideal_after;                 // 2^n ideal state after each gate
  std::vector<std::vector<bool>> stored_after;   // qubits parked in r after each gate
  CVec ideal_final;
  std::vector<std::string> notes;
};

CompiledCircuit compile_circuit(const Circuit& circuit, const GateCalibration& calib,
                                const IsolationPolicy& policy = {},
                                const std::map<int, double>& storage_phase = {});

CVec ideal_reference(const Circuit& circuit, const GateCalibration& calib);

// Computational state embedded on bare impurity levels; stored qubits map
// |1> -> i|r>, matching the HMS pi-pulse.
CVec embed_computational(const CVec& comp, const Basis& basis,
                         const std::vector<bool>& stored = {});

double fidelity(const CVec& target, const CVec& actual);

struct RunOptions {
  EvolveOptions evolve;
  IsolationPolicy isolation;
  bool record_trajectory = false;
};

struct RunResult {
  StateVector final;
  Trajectory trajectory;
  double fidelity = 0.0;
  std::vector<double> per_gate_fidelities;
  std::vector<double> gate_end_times;
  CompiledCircuit compiled;
  std::map<int, double> storage_phase;
  double wall_time = 0.0;
};

// Phase picked up by e relative to g across an HMS park/unpark pair.
double measure_storage_phase(const Dynamics& dynamics, int qubit, const GateCalibration& calib,
                             const EvolveOptions& options);

RunResult run_circuit(const Circuit& circuit, const Dynamics& dynamics,
                      const GateCalibration& calib, const RunOptions& options = {});

// exchange_sign = sign Re g of the pair used by the entangling gates
Circuit bell_circuit(double exchange_sign);
Circuit ghz_circuit(double exchange_sign);
// CNOT(control, target) from two sqrt-iSWAPs and single-qubit rotations
std::vector<GateOp> cnot_decomposition(int control, int target, double exchange_sign);

}  // namespace arrayqc
