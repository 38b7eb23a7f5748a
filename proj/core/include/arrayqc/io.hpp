#pragma once

#include <string>
#include <vector>

#include "arrayqc/circuits.hpp"

namespace arrayqc {

struct RunConfig;
struct ModelResult;
struct GateDepthResult;
struct SweepResult;
struct CircuitReport;
struct DisorderResult;
struct ValidationReport;

inline constexpr int kSchemaVersion = 1;

std::string format_double(double x);  // %.17g

// {n_qubits, initial, gates:[{kind, params:{angle, method}, targets}]}; initial is a
// bitstring or an object mapping bitstrings to a real or [re, im] amplitude
Circuit parse_circuit_json(const std::string& text);
Circuit read_circuit_file(const std::string& path);
std::string circuit_json(const Circuit& circuit);

std::string schedule_json(const Schedule& schedule);

// Header comments carry the schema version and resolved config.
std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& labels,
                           const RunConfig& config);

std::string model_json(const ModelResult& r, const RunConfig& config);
std::string model_csv(const ModelResult& r, const RunConfig& config);
std::string gate_depth_json(const GateDepthResult& r, const RunConfig& config);
std::string gate_depth_csv(const GateDepthResult& r, const RunConfig& config);
std::string sweep_json(const SweepResult& r, const RunConfig& config);
std::string sweep_csv(const SweepResult& r, const RunConfig& config);
std::string circuit_result_json(const CircuitReport& r, const RunConfig& config);
std::string disorder_json(const DisorderResult& r, const RunConfig& config);
std::string disorder_csv(const DisorderResult& r, const RunConfig& config);
std::string validation_json(const ValidationReport& r, const RunConfig& config);

// Writes `content` to dir/name, creating dir; returns the path.
std::string write_artifact(const std::string& dir, const std::string& name,
                           const std::string& content);

}  // namespace arrayqc
