#include "arrayqc/gates.hpp"

#include <cmath>
#include <sstream>

namespace arrayqc {

std::string to_string(GateKind k) {
  switch (k) {
    case GateKind::RX: return "rx";
    case GateKind::RZ: return "rz";
    case GateKind::SqrtISwap: return "sqrt_iswap";
    case GateKind::ISwap: return "iswap";
    case GateKind::Decouple: return "decouple";
    case GateKind::Recouple: return "recouple";
  }
  return "?";
}

std::string to_string(DecoupleMethod m) {
  switch (m) {
    case DecoupleMethod::Detune: return "detune";
    case DecoupleMethod::HmsTransfer: return "hms";
    case DecoupleMethod::Eit: return "eit";
  }
  return "?";
}

GateKind parse_gate_kind(std::string_view n) {
  if (n == "rx" || n == "x") return GateKind::RX;
  if (n == "rz" || n == "z") return GateKind::RZ;
  if (n == "sqrt_iswap") return GateKind::SqrtISwap;
  if (n == "iswap") return GateKind::ISwap;
  if (n == "decouple") return GateKind::Decouple;
  if (n == "recouple") return GateKind::Recouple;
  throw ConfigError("unknown gate kind '" + std::string(n) + "'");
}

DecoupleMethod parse_decouple_method(std::string_view n) {
  if (n == "detune") return DecoupleMethod::Detune;
  if (n == "hms" || n == "hms_transfer") return DecoupleMethod::HmsTransfer;
  if (n == "eit") return DecoupleMethod::Eit;
  throw ConfigError("unknown decoupling method '" + std::string(n) + "' (detune | hms | eit)");
}

double wrap_angle(double theta) {
  if (!std::isfinite(theta)) throw ConfigError("gate angle must be finite");
  double t = std::fmod(theta, 2.0 * kPi);
  if (t <= 0.0) t += 2.0 * kPi;
  if (std::abs(t - 2.0 * kPi) < 1e-14) t = 2.0 * kPi;
  return t;
}

GateOp GateOp::rx(double theta, int q) { return {GateKind::RX, wrap_angle(theta), {q}, {}}; }
GateOp GateOp::rz(double phi, int q) { return {GateKind::RZ, wrap_angle(phi), {q}, {}}; }
GateOp GateOp::sqrt_iswap(int a, int b) { return {GateKind::SqrtISwap, 0.0, {a, b}, {}}; }
GateOp GateOp::iswap(int a, int b) { return {GateKind::ISwap, 0.0, {a, b}, {}}; }
GateOp GateOp::decouple(int q, std::optional<DecoupleMethod> m) {
  return {GateKind::Decouple, 0.0, {q}, m};
}
GateOp GateOp::recouple(int q) { return {GateKind::Recouple, 0.0, {q}, {}}; }

std::string GateOp::name() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind == GateKind::RX || kind == GateKind::RZ) {
    os.precision(6);
    os << '(' << angle << ')';
  }
  if (kind == GateKind::Decouple && method) os << '[' << to_string(*method) << ']';
  os << '@';
  for (std::size_t i = 0; i < targets.size(); ++i) os << (i ? "," : "") << targets[i];
  return os.str();
}

double GateCalibration::max_coupling(int q) const {
  double m = 0.0;
  for (int b = 0; b < n_qubits(); ++b)
    if (b != q) m = std::max(m, std::abs(g_pair(q, b)));
  return m;
}

double GateCalibration::max_coupling() const {
  double m = 0.0;
  for (int q = 0; q < n_qubits(); ++q) m = std::max(m, max_coupling(q));
  return m;
}

double GateCalibration::exchange_sign(int a, int b) const {
  return g_pair(a, b).real() >= 0.0 ? 1.0 : -1.0;
}

std::vector<std::string> GateCalibration::validate() const {
  if (!(Omega_x > 0.0)) throw ConfigError("Omega_x must be positive");
  if (!(delta_R > 0.0)) throw ConfigError("delta_R must be positive");
  if (!(Omega_pi > 0.0) || !(delta_dec > 0.0) || !(Omega_eit > 0.0))
    throw ConfigError("Omega_pi, delta_dec and Omega_eit must be positive");
  if (delta_R < 10.0 * std::abs(Omega_f))
    throw ConfigError("delta_R must be at least 10 |Omega_f| for the Stark-shift gate");
  std::vector<std::string> w;
  const double g = max_coupling();
  if (g > 0.0 && Omega_x < 100.0 * g) w.emplace_back("Omega_x below 100 |g|: weak-drive regime");
  return w;
}

GateCalibration default_calibration(const EffectiveModel& model) {
  GateCalibration c;
  c.gamma_I = model.gamma_I;
  c.Omega_x = 1e4 * model.gamma_I;
  c.g_pair = model.exchange();
  return c;
}

namespace {

void check_target(int q, const GateCalibration& calib, const DriveSettings& bg) {
  if (q < 0 || q >= calib.n_qubits()) throw ConfigError("gate target out of range");
  if (static_cast<int>(bg.size()) != calib.n_qubits())
    throw std::invalid_argument("background drives must list every impurity");
}

std::string label(const std::string& what, int q) { return what + "@" + std::to_string(q); }

}  // namespace

PulseSegment compile_rx(double theta, int target, const GateCalibration& calib,
                        const DriveSettings& background) {
  check_target(target, calib, background);
  if (!(theta > 0.0 && theta <= 2.0 * kPi)) throw ConfigError("RX angle must lie in (0, 2 pi]");
  PulseSegment s{background, theta / (2.0 * calib.Omega_x), label("rx", target)};
  s.drives[target].Omega = calib.Omega_x;
  return s;
}

PulseSegment compile_rz(double phi, int target, const GateCalibration& calib,
                        const DriveSettings& background) {
  check_target(target, calib, background);
  if (!(phi > -2.0 * kPi && phi <= 2.0 * kPi) || phi == 0.0)
    throw ConfigError("RZ angle must lie in (-2 pi, 2 pi] and be nonzero");
  if (calib.delta_R < 10.0 * std::abs(calib.Omega_f))
    throw ConfigError("adiabaticity violated: delta_R < 10 |Omega_f|");
  const double stark = std::norm(calib.Omega_f) / calib.delta_R;
  PulseSegment s{background, std::abs(phi) / stark, label("rz", target)};
  s.drives[target].Omega_f = calib.Omega_f;
  s.drives[target].delta_R = phi > 0.0 ? calib.delta_R : -calib.delta_R;
  return s;
}

double sqrt_iswap_duration(std::pair<int, int> pair, const GateCalibration& calib) {
  const auto [a, b] = pair;
  if (a == b || a < 0 || b < 0 || a >= calib.n_qubits() || b >= calib.n_qubits())
    throw ConfigError("sqrt-iSWAP needs two distinct impurities in range");
  const double re = std::abs(calib.g_pair(a, b).real());
  if (re < 1e-3 * calib.gamma_I)
    throw ConfigError("impurities effectively uncoupled at this distance");
  return kPi / (4.0 * re);
}

Schedule compile_sqrt_iswap(std::pair<int, int> pair, const GateCalibration& calib,
                            const std::vector<int>& spectators, DriveSettings background,
                            bool full_iswap) {
  const double tau = sqrt_iswap_duration(pair, calib) * (full_iswap ? 2.0 : 1.0);
  Schedule out;
  for (int q : spectators) {
    auto seg = compile_decouple(q, DecoupleMethod::Detune, calib, background);
    out.insert(out.end(), seg.begin(), seg.end());
  }
  const std::string name = std::string(full_iswap ? "iswap" : "sqrt_iswap") + "@" +
                           std::to_string(pair.first) + "," + std::to_string(pair.second);
  out.push_back({background, tau, name});
  for (int q : spectators) {
    auto seg = compile_recouple(q, DecoupleMethod::Detune, calib, background);
    out.insert(out.end(), seg.begin(), seg.end());
  }
  return out;
}

Schedule compile_decouple(int target, DecoupleMethod method, const GateCalibration& calib,
                          DriveSettings& background) {
  check_target(target, calib, background);
  const double g = calib.max_coupling(target);
  const std::string what = "decouple(" + to_string(method) + ")";
  switch (method) {
    case DecoupleMethod::Detune:
      if (calib.delta_dec < 100.0 * g) throw ConfigError("decoupling detuning below 100 |g|");
      background[target].delta_dec = calib.delta_dec;
      return {{background, 0.0, label(what, target)}};
    case DecoupleMethod::HmsTransfer: {
      if (calib.Omega_pi < 100.0 * g) throw ConfigError("HMS pi-pulse strength below 100 |g|");
      if (calib.delta_dec < 100.0 * g) throw ConfigError("decoupling detuning below 100 |g|");
      PulseSegment s{background, kPi / (2.0 * calib.Omega_pi), label(what, target)};
      s.drives[target].Omega_f = calib.Omega_pi;
      s.drives[target].delta_R = 0.0;
      // the ground part stays behind; detune it so it cannot absorb an excitation
      background[target].delta_dec = calib.delta_dec;
      return {s};
    }
    case DecoupleMethod::Eit:
      if (calib.Omega_eit < 100.0 * g) throw ConfigError("EIT dressing strength below 100 |g|");
      background[target].Omega_f = calib.Omega_eit;
      background[target].delta_R = 0.0;
      return {{background, 0.0, label(what, target)}};
  }
  return {};
}

Schedule compile_recouple(int target, DecoupleMethod method, const GateCalibration& calib,
                          DriveSettings& background) {
  check_target(target, calib, background);
  const std::string what = "recouple(" + to_string(method) + ")";
  switch (method) {
    case DecoupleMethod::Detune:
      background[target].delta_dec = 0.0;
      return {{background, 0.0, label(what, target)}};
    case DecoupleMethod::HmsTransfer: {
      // reversed phase undoes the factor i picked up on the way in
      background[target].delta_dec = 0.0;
      PulseSegment s{background, kPi / (2.0 * calib.Omega_pi), label(what, target)};
      s.drives[target].Omega_f = -calib.Omega_pi;
      s.drives[target].delta_R = 0.0;
      return {s};
    }
    case DecoupleMethod::Eit:
      background[target].Omega_f = 0.0;
      background[target].delta_R = 0.0;
      return {{background, 0.0, label(what, target)}};
  }
  return {};
}

Eigen::Matrix2cd rx_matrix(double theta) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  Eigen::Matrix2cd m;
  m << c, kI * s, kI * s, c;
  return m;
}

Eigen::Matrix2cd rz_matrix(double phi) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = std::exp(-kI * phi);
  return m;
}

Eigen::Matrix4cd sqrt_iswap_matrix(double exchange_sign) {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = m(3, 3) = 1.0;
  m(1, 1) = m(2, 2) = r;
  m(1, 2) = m(2, 1) = -kI * exchange_sign * r;
  return m;
}

Eigen::Matrix4cd iswap_matrix(double exchange_sign) {
  const Eigen::Matrix4cd s = sqrt_iswap_matrix(exchange_sign);
  return s * s;
}

CMat embed_single(const Eigen::Matrix2cd& u, int q, int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  const int shift = n - 1 - q;
  CMat m = CMat::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int bit = static_cast<int>((col >> shift) & 1);
    for (int out = 0; out < 2; ++out) {
      const Eigen::Index row = (col & ~(Eigen::Index{1} << shift)) | (Eigen::Index{out} << shift);
      m(row, col) += u(out, bit);
    }
  }
  return m;
}

CMat embed_pair(const Eigen::Matrix4cd& u, int a, int b, int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  const int sa = n - 1 - a, sb = n - 1 - b;
  const Eigen::Index mask = ~((Eigen::Index{1} << sa) | (Eigen::Index{1} << sb));
  CMat m = CMat::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int in = static_cast<int>(((col >> sa) & 1) * 2 + ((col >> sb) & 1));
    for (int out = 0; out < 4; ++out) {
      const Eigen::Index row =
          (col & mask) | (Eigen::Index{out >> 1} << sa) | (Eigen::Index{out & 1} << sb);
      m(row, col) += u(out, in);
    }
  }
  return m;
}

CMat ideal_gate_matrix(const GateOp& gate, const GateCalibration& calib, int n) {
  for (int q : gate.targets)
    if (q < 0 || q >= n) throw ConfigError("gate target out of range");
  switch (gate.kind) {
    case GateKind::RX: return embed_single(rx_matrix(gate.angle), gate.targets.at(0), n);
    case GateKind::RZ: return embed_single(rz_matrix(gate.angle), gate.targets.at(0), n);
    case GateKind::SqrtISwap:
    case GateKind::ISwap: {
      const int a = gate.targets.at(0), b = gate.targets.at(1);
      const double s = calib.exchange_sign(a, b);
      return embed_pair(gate.kind == GateKind::ISwap ? iswap_matrix(s) : sqrt_iswap_matrix(s), a,
                        b, n);
    }
    case GateKind::Decouple:
    case GateKind::Recouple: return CMat::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n);
  }
  return {};
}

}  // namespace arrayqc
