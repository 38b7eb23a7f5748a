#include "arrayqc/circuits.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <set>

namespace arrayqc {

InitialState InitialState::basis(const std::string& bits) { return {{{bits, 1.0}}}; }

CVec InitialState::vector(int n) const {
  const Eigen::Index dim = Eigen::Index{1} << n;
  CVec v = CVec::Zero(dim);
  for (const auto& [bits, amp] : terms) {
    if (static_cast<int>(bits.size()) != n) throw ConfigError("initial bitstring '" + bits + "' has wrong length");
    Eigen::Index idx = 0;
    for (char ch : bits) {
      if (ch != '0' && ch != '1') throw ConfigError("initial bitstring must contain only 0 and 1");
      idx = idx * 2 + (ch == '1');
    }
    v(idx) += amp;
  }
  if (std::abs(v.squaredNorm() - 1.0) > 1e-9) throw ConfigError("initial state is not normalized");
  return v;
}

void Circuit::validate() const {
  if (n_qubits < 1 || n_qubits > 16) throw ConfigError("circuit needs 1..16 qubits");
  initial.vector(n_qubits);
  for (std::size_t k = 0; k < gates.size(); ++k) {
    const auto& g = gates[k];
    const std::size_t want =
        (g.kind == GateKind::SqrtISwap || g.kind == GateKind::ISwap) ? 2 : 1;
    if (g.targets.size() != want)
      throw ConfigError("gate " + std::to_string(k) + " has the wrong number of targets");
    for (int q : g.targets)
      if (q < 0 || q >= n_qubits)
        throw ConfigError("gate " + std::to_string(k) + " target out of range");
    if (want == 2 && g.targets[0] == g.targets[1])
      throw ConfigError("gate " + std::to_string(k) + " pair must be distinct");
  }
}

CVec ideal_reference(const Circuit& circuit, const GateCalibration& calib) {
  circuit.validate();
  CVec psi = circuit.initial.vector(circuit.n_qubits);
  for (const auto& g : circuit.gates) psi = ideal_gate_matrix(g, calib, circuit.n_qubits) * psi;
  return psi;
}

CVec embed_computational(const CVec& comp, const Basis& basis, const std::vector<bool>& stored) {
  const int n = basis.n_impurities();
  CVec out = CVec::Zero(static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index idx = 0; idx < comp.size(); ++idx) {
    if (comp(idx) == 0.0) continue;
    BasisState s{std::vector<Level>(n, Level::G), {}};
    cplx factor = 1.0;
    for (int q = 0; q < n; ++q) {
      if (!((idx >> (n - 1 - q)) & 1)) continue;
      const bool parked = q < static_cast<int>(stored.size()) && stored[q];
      s.impurity[q] = parked ? Level::R : Level::E;
      if (parked) factor *= kI;
    }
    const auto i = basis.find(s);
    if (!i) throw ConfigError("computational state outside the tier basis");
    out(static_cast<Eigen::Index>(*i)) += factor * comp(idx);
  }
  return out;
}

double fidelity(const CVec& target, const CVec& actual) {
  const double n = target.norm();
  if (n == 0.0) throw std::invalid_argument("target state has zero norm");
  return std::norm(target.dot(actual)) / (n * n);
}

namespace {

double excited_population(const CVec& comp, int q, int n) {
  double p = 0.0;
  for (Eigen::Index i = 0; i < comp.size(); ++i)
    if ((i >> (n - 1 - q)) & 1) p += std::norm(comp(i));
  return p;
}

double gate_duration(const GateOp& g, const GateCalibration& c) {
  switch (g.kind) {
    case GateKind::RX: return g.angle / (2.0 * c.Omega_x);
    case GateKind::RZ: return std::abs(g.angle) * c.delta_R / std::norm(c.Omega_f);
    case GateKind::SqrtISwap: return sqrt_iswap_duration({g.targets[0], g.targets[1]}, c);
    case GateKind::ISwap: return 2.0 * sqrt_iswap_duration({g.targets[0], g.targets[1]}, c);
    default: return 0.0;
  }
}

}  // namespace

CompiledCircuit compile_circuit(const Circuit& circuit, const GateCalibration& calib,
                                const IsolationPolicy& policy,
                                const std::map<int, double>& storage_phase) {
  circuit.validate();
  const int n = circuit.n_qubits;
  if (calib.n_qubits() != n) throw ConfigError("calibration and circuit disagree on qubit count");

  CompiledCircuit out;
  CVec psi = circuit.initial.vector(n);
  DriveSettings bg = no_drives(n);
  std::vector<std::optional<DecoupleMethod>> parked(n);

  auto append = [&](Schedule s) {
    for (auto& seg : s) out.segments.push_back(std::move(seg));
  };
  auto decouple = [&](int q, std::optional<DecoupleMethod> m) {
    if (parked[q]) return;
    const DecoupleMethod method =
        m.value_or(excited_population(psi, q, n) < 1e-12 ? DecoupleMethod::Detune
                                                       : DecoupleMethod::HmsTransfer);
    append(compile_decouple(q, method, calib, bg));
    parked[q] = method;
  };
  auto recouple = [&](int q) {
    if (!parked[q]) return;
    const DecoupleMethod m = *parked[q];
    append(compile_recouple(q, m, calib, bg));
    parked[q].reset();
    if (m == DecoupleMethod::HmsTransfer && policy.compensate_storage_phase) {
      auto it = storage_phase.find(q);
      if (it != storage_phase.end() && std::abs(it->second) > policy.compensation_threshold) {
        // undo the measured park/unpark phase with a short signed Stark shift
        double phi = std::remainder(it->second, 2.0 * kPi);
        auto seg = compile_rz(phi, q, calib, bg);
        seg.label = "storage_compensation@" + std::to_string(q);
        out.segments.push_back(std::move(seg));
        out.notes.push_back("compensated storage phase on qubit " + std::to_string(q));
      }
    }
  };

  for (const auto& g : circuit.gates) {
    const int q0 = g.targets[0];
    switch (g.kind) {
      case GateKind::Decouple:
        decouple(q0, g.method);
        break;
      case GateKind::Recouple:
        recouple(q0);
        break;
      default: {
        for (int q : g.targets) recouple(q);
        if (policy.automatic) {
          double coupling = 0.0;
          for (int q : g.targets)
            for (int p = 0; p < n; ++p)
              if (std::find(g.targets.begin(), g.targets.end(), p) == g.targets.end())
                coupling = std::max(coupling, std::abs(calib.g_pair(q, p)));
          if (gate_duration(g, calib) * coupling > policy.slow_threshold)
            for (int p = 0; p < n; ++p)
              if (std::find(g.targets.begin(), g.targets.end(), p) == g.targets.end())
                decouple(p, std::nullopt);
        }
        if (g.kind == GateKind::RX) out.segments.push_back(compile_rx(g.angle, q0, calib, bg));
        if (g.kind == GateKind::RZ) out.segments.push_back(compile_rz(g.angle, q0, calib, bg));
        if (g.kind == GateKind::SqrtISwap || g.kind == GateKind::ISwap)
          append(compile_sqrt_iswap({g.targets[0], g.targets[1]}, calib, {}, bg,
                                    g.kind == GateKind::ISwap));
        break;
      }
    }
    psi = ideal_gate_matrix(g, calib, n) * psi;
    out.gate_end.push_back(out.segments.size());
    out.ideal_after.push_back(psi);
    std::vector<bool> stored(n);
    for (int q = 0; q < n; ++q) stored[q] = parked[q] == DecoupleMethod::HmsTransfer;
    out.stored_after.push_back(std::move(stored));
  }
  for (int q = 0; q < n; ++q) recouple(q);
  out.ideal_final = psi;
  return out;
}

double measure_storage_phase(const Dynamics& dynamics, int qubit, const GateCalibration& calib,
                             const EvolveOptions& options) {
  const int n = dynamics.n_impurities();
  EvolveOptions o = options;
  o.sample_dt = 0.0;
  o.on_step = {};
  Evolver ev(dynamics, o);
  std::vector<Level> e(n, Level::G);
  e[qubit] = Level::E;
  StateVector s = dynamics.basis_state(0);
  const auto ie = static_cast<Eigen::Index>(dynamics.index_of(e));
  s.amplitudes(0) = 1.0 / std::sqrt(2.0);
  s.amplitudes(ie) = 1.0 / std::sqrt(2.0);
  DriveSettings bg = no_drives(n);
  for (const auto& seg : compile_decouple(qubit, DecoupleMethod::HmsTransfer, calib, bg))
    ev.evolve(s, seg.drives, seg.duration);
  for (const auto& seg : compile_recouple(qubit, DecoupleMethod::HmsTransfer, calib, bg))
    ev.evolve(s, seg.drives, seg.duration);
  return std::arg(s.amplitudes(ie) / s.amplitudes(0));
}

RunResult run_circuit(const Circuit& circuit, const Dynamics& dynamics,
                      const GateCalibration& calib, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  circuit.validate();
  if (circuit.n_qubits != dynamics.n_impurities())
    throw ConfigError("circuit qubit count differs from the impurity count");
  const TierLimits lim = tier_limits(dynamics.tier());
  if (lim.max_excitations < circuit.n_qubits && circuit.n_qubits <= 3) {
    // a full-excitation target needs as many excitations as qubits
    const CVec ideal = ideal_reference(circuit, calib);
    const CVec init = circuit.initial.vector(circuit.n_qubits);
    auto weight = [](Eigen::Index idx) { return static_cast<int>(std::popcount(static_cast<unsigned>(idx))); };
    for (Eigen::Index i = 0; i < ideal.size(); ++i)
      if ((std::abs(ideal(i)) > 1e-12 || std::abs(init(i)) > 1e-12) && weight(i) > lim.max_excitations)
        throw ConfigError("tier " + to_string(dynamics.tier()) +
                          " cannot hold the circuit's excitation number; use three_excitation");
  }

  RunResult r;
  // storage phase is measured, not assumed
  std::set<int> hms_qubits;
  {
    const CompiledCircuit probe = compile_circuit(circuit, calib, options.isolation);
    for (const auto& seg : probe.segments)
      if (seg.label.rfind("decouple(hms)@", 0) == 0)
        hms_qubits.insert(std::stoi(seg.label.substr(seg.label.find('@') + 1)));
  }
  if (options.isolation.compensate_storage_phase)
    for (int q : hms_qubits)
      r.storage_phase[q] = measure_storage_phase(dynamics, q, calib, options.evolve);

  r.compiled = compile_circuit(circuit, calib, options.isolation, r.storage_phase);
  const CVec init = embed_computational(circuit.initial.vector(circuit.n_qubits), dynamics.basis());
  r.final = StateVector{init, dynamics.tier(), 0.0};

  EvolveOptions eo = options.evolve;
  Evolver ev(dynamics, eo);
  Trajectory* traj = options.record_trajectory ? &r.trajectory : nullptr;
  if (traj) traj->record(0.0, r.final.amplitudes);

  std::size_t seg = 0;
  for (std::size_t k = 0; k < r.compiled.gate_end.size(); ++k) {
    for (; seg < r.compiled.gate_end[k]; ++seg) {
      const auto& s = r.compiled.segments[seg];
      ev.evolve(r.final, s.drives, s.duration, traj);
    }
    r.gate_end_times.push_back(r.final.time);
    const CVec target =
        embed_computational(r.compiled.ideal_after[k], dynamics.basis(), r.compiled.stored_after[k]);
    r.per_gate_fidelities.push_back(fidelity(target, r.final.amplitudes));
  }
  for (; seg < r.compiled.segments.size(); ++seg) {
    const auto& s = r.compiled.segments[seg];
    ev.evolve(r.final, s.drives, s.duration, traj);
  }
  r.fidelity = fidelity(embed_computational(r.compiled.ideal_final, dynamics.basis()),
                        r.final.amplitudes);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<GateOp> cnot_decomposition(int c, int t, double sign) {
  const double h = kPi / 2.0;
  // the two exchange signs differ only in the outer control rotations
  const double first = sign > 0 ? h : 3 * h;
  const double eighth = sign > 0 ? 3 * h : h;
  return {GateOp::rx(first, c),      GateOp::rz(h, c),       GateOp::rx(kPi, c),
          GateOp::sqrt_iswap(c, t),  GateOp::rx(kPi, c),     GateOp::sqrt_iswap(c, t),
          GateOp::rz(3 * h, c),      GateOp::rx(eighth, c),  GateOp::rz(h, c),
          GateOp::rx(h, t)};
}

Circuit bell_circuit(double sign) {
  Circuit c;
  c.n_qubits = 3;
  c.initial = InitialState::basis("100");
  // the exchange gate leaves -i sign on |01>; this RZ turns it into +1
  const double phi = sign > 0 ? 3.0 * kPi / 2.0 : kPi / 2.0;
  c.gates = {GateOp::decouple(2, DecoupleMethod::Detune), GateOp::sqrt_iswap(0, 1),
             GateOp::rz(phi, 1), GateOp::rx(kPi, 1)};
  return c;
}

Circuit ghz_circuit(double sign) {
  Circuit c;
  c.n_qubits = 3;
  const double r = 1.0 / std::sqrt(2.0);
  c.initial.terms = {{"000", r}, {"110", r}};
  c.gates = cnot_decomposition(1, 2, sign);
  return c;
}

}  // namespace arrayqc
