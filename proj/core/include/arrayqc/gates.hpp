#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arrayqc/dynamics.hpp"

namespace arrayqc {

enum class GateKind { RX, RZ, SqrtISwap, ISwap, Decouple, Recouple };
enum class DecoupleMethod { Detune, HmsTransfer, Eit };

std::string to_string(GateKind k);
std::string to_string(DecoupleMethod m);
GateKind parse_gate_kind(std::string_view name);
DecoupleMethod parse_decouple_method(std::string_view name);

struct GateOp {
  GateKind kind = GateKind::RX;
  double angle = 0.0;
  std::vector<int> targets;
  std::optional<DecoupleMethod> method;  // Decouple only; empty picks by state

  static GateOp rx(double theta, int q);
  static GateOp rz(double phi, int q);
  static GateOp sqrt_iswap(int a, int b);
  static GateOp iswap(int a, int b);
  static GateOp decouple(int q, std::optional<DecoupleMethod> m = std::nullopt);
  static GateOp recouple(int q);

  std::string name() const;
  bool operator==(const GateOp&) const = default;
};

// Maps an angle into (0, 2 pi]. RX picks up a global sign under this shift.
double wrap_angle(double theta);

struct PulseSegment {
  DriveSettings drives;
  double duration = 0.0;
  std::string label;
};

using Schedule = std::vector<PulseSegment>;

struct GateCalibration {
  double Omega_x = 1.0;
  cplx Omega_f{1.0, 0.0};
  double delta_R = 200.0;
  double Omega_pi = 1.0;
  double delta_dec = 1.0;
  double Omega_eit = 1.0;
  double gamma_I = 1e-4;
  CMat g_pair;  // exchange couplings Phi + phi, zero diagonal

  int n_qubits() const { return static_cast<int>(g_pair.rows()); }
  double max_coupling(int q) const;
  double max_coupling() const;
  double exchange_sign(int a, int b) const;  // sign of Re g_ab
  std::vector<std::string> validate() const; // throws on hard violations
};

// Omega_x = 1e4 gamma_I, Omega_f = 1, delta_R = 200, Omega_pi = 1, delta_dec = 1.
GateCalibration default_calibration(const EffectiveModel& model);

PulseSegment compile_rx(double theta, int target, const GateCalibration& calib,
                        const DriveSettings& background);
// phi in (-2 pi, 2 pi] without zero; negative angles flip the sign of delta_R
PulseSegment compile_rz(double phi, int target, const GateCalibration& calib,
                        const DriveSettings& background);
double sqrt_iswap_duration(std::pair<int, int> pair, const GateCalibration& calib);
// Detunes each spectator, waits, then restores it. ISwap waits twice as long.
Schedule compile_sqrt_iswap(std::pair<int, int> pair, const GateCalibration& calib,
                            const std::vector<int>& spectators, DriveSettings background,
                            bool full_iswap = false);
// Both update `background` to reflect the new decoupling state. HmsTransfer
// parks e in r with a pi-pulse and then detunes the ground part left behind.
Schedule compile_decouple(int target, DecoupleMethod method, const GateCalibration& calib,
                          DriveSettings& background);
Schedule compile_recouple(int target, DecoupleMethod method, const GateCalibration& calib,
                          DriveSettings& background);

Eigen::Matrix2cd rx_matrix(double theta);
Eigen::Matrix2cd rz_matrix(double phi);  // (g, e) ordering: diag(1, e^{-i phi})
// exp(-i Re g (s1+ s2- + h.c.) tau) at the quarter period; off-diagonal -i sign/sqrt 2
Eigen::Matrix4cd sqrt_iswap_matrix(double exchange_sign);
Eigen::Matrix4cd iswap_matrix(double exchange_sign);

// 2^n x 2^n; qubit 0 is the most significant bit, bit 1 = excited
CMat ideal_gate_matrix(const GateOp& gate, const GateCalibration& calib, int n_qubits);
CMat embed_single(const Eigen::Matrix2cd& u, int q, int n_qubits);
CMat embed_pair(const Eigen::Matrix4cd& u, int a, int b, int n_qubits);

}  // namespace arrayqc
