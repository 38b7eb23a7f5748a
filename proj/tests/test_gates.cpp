#include <doctest.h>

#include "arrayqc/circuits.hpp"

using namespace arrayqc;

namespace {

struct Setup {
  ArrayCouplings c;
  EffectiveModel m;
  GateCalibration cal;
};

Setup make(std::vector<std::pair<int, int>> plaq, double gI = 1e-4) {
  LatticeSpec lat;
  ImpuritySpec imp;
  imp.plaquettes = std::move(plaq);
  imp.gamma_I = gI;
  Setup s{build_couplings(make_geometry(lat, imp)), {}, {}};
  s.m = build_effective_model(s.c, optimal_detuning(s.c).delta_LI);
  s.cal = default_calibration(s.m);
  return s;
}

const Setup& pair() {
  static const Setup s = make({{4, 4}, {4, 5}});
  return s;
}

}  // namespace

TEST_CASE("ideal matrices") {
  const auto rz = rz_matrix(kPi);
  CHECK(std::abs(rz(1, 1) - std::exp(-kI * kPi)) < 1e-15);
  CHECK(rz(0, 0) == cplx(1.0));
  const auto rx = rx_matrix(kPi);
  CHECK(std::abs(rx(0, 1) - kI) < 1e-15);
  for (double s : {1.0, -1.0}) {
    const Eigen::Matrix4cd S = sqrt_iswap_matrix(s);
    CHECK((S.adjoint() * S - Eigen::Matrix4cd::Identity()).norm() < 1e-12);
    CHECK((S * S - iswap_matrix(s)).norm() < 1e-12);
    // exp(-i Re g (s+ s- + h.c.) tau) at Re g tau = pi / 4
    CHECK(std::abs(S(1, 2) - cplx(0, -s) / std::sqrt(2.0)) < 1e-15);
  }
  const CMat big = embed_pair(sqrt_iswap_matrix(1.0), 0, 2, 3);
  CHECK((big.adjoint() * big - CMat::Identity(8, 8)).norm() < 1e-12);
  // |100> -> (|100> - i|001>) / sqrt 2
  CHECK(std::abs(big(1, 4) - cplx(0, -1) / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(embed_single(rx_matrix(kPi), 1, 2)(0, 1) - kI) < 1e-15);
}

TEST_CASE("segment durations and drives") {
  const auto& s = pair();
  const DriveSettings bg = no_drives(2);
  const auto rx = compile_rx(kPi, 0, s.cal, bg);
  CHECK(rx.duration == doctest::Approx(kPi / (2 * s.cal.Omega_x)));
  CHECK(rx.drives[0].Omega == cplx(s.cal.Omega_x));
  const auto rz = compile_rz(kPi, 1, s.cal, bg);
  CHECK(rz.duration == doctest::Approx(200 * kPi));
  CHECK(rz.drives[1].delta_R == 200.0);
  CHECK(compile_rz(-kPi / 2, 1, s.cal, bg).drives[1].delta_R == -200.0);
  const double tau = sqrt_iswap_duration({0, 1}, s.cal);
  CHECK(tau == doctest::Approx(kPi / (4 * std::abs(s.m.exchange()(0, 1).real()))));
  const Schedule full = compile_sqrt_iswap({0, 1}, s.cal, {}, bg, true);
  CHECK(full.back().duration == doctest::Approx(2 * tau));
}

TEST_CASE("compilation errors") {
  const auto& s = pair();
  DriveSettings bg = no_drives(2);
  GateCalibration weak = s.cal;
  weak.delta_R = 5.0;
  CHECK_THROWS_WITH(compile_rz(kPi, 0, weak, bg), doctest::Contains("adiabaticity"));
  weak = s.cal;
  weak.delta_dec = 1e-3;
  CHECK_THROWS_WITH(compile_decouple(0, DecoupleMethod::Detune, weak, bg), doctest::Contains("100 |g|"));
  weak = s.cal;
  weak.Omega_pi = 1e-3;
  CHECK_THROWS(compile_decouple(0, DecoupleMethod::HmsTransfer, weak, bg));
  weak = s.cal;
  weak.g_pair(0, 1) = weak.g_pair(1, 0) = cplx(1e-9, 0);
  CHECK_THROWS_WITH(sqrt_iswap_duration({0, 1}, weak), "impurities effectively uncoupled at this distance");
  CHECK_THROWS(compile_rx(0.0, 0, s.cal, bg));
  CHECK_THROWS(compile_rx(kPi, 5, s.cal, bg));
}

TEST_CASE("compilation is deterministic") {
  const auto& s = pair();
  DriveSettings a = no_drives(2), b = no_drives(2);
  const auto x = compile_decouple(1, DecoupleMethod::HmsTransfer, s.cal, a);
  const auto y = compile_decouple(1, DecoupleMethod::HmsTransfer, s.cal, b);
  REQUIRE(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x[i].duration == y[i].duration);
    CHECK(x[i].label == y[i].label);
    CHECK(x[i].drives == y[i].drives);
  }
  CHECK(a == b);
}

TEST_CASE("RX is fast against the exchange time, RZ is not") {
  const auto& s = pair();
  const DriveSettings bg = no_drives(2);
  const double tau = sqrt_iswap_duration({0, 1}, s.cal);
  CHECK(compile_rx(kPi, 0, s.cal, bg).duration < 1e-3 * tau);
  // the Stark-shift gate needs the spectator isolation of the circuit compiler
  CHECK(compile_rz(kPi, 0, s.cal, bg).duration > 0.05 * tau);
}

TEST_CASE("sqrt-iSWAP on |e1 g2> in the full tier") {
  const auto& s = pair();
  const Dynamics d(s.c, s.m, Tier::Full);
  Circuit c;
  c.n_qubits = 2;
  c.initial = InitialState::basis("10");
  c.gates = {GateOp::sqrt_iswap(0, 1)};
  const RunResult r = run_circuit(c, d, s.cal);
  const cplx a = r.final.amplitudes(d.index_of({Level::E, Level::G}));
  const cplx b = r.final.amplitudes(d.index_of({Level::G, Level::E}));
  CHECK(std::norm(a) == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(std::norm(b) == doctest::Approx(0.5).epsilon(1e-2));
  // relative phase -i sign(Re g)
  const double sign = s.cal.exchange_sign(0, 1);
  CHECK(std::abs(b / a - cplx(0, -sign)) < 2e-2);
  CHECK(r.fidelity > 0.999);

  c.gates = {GateOp::sqrt_iswap(0, 1), GateOp::sqrt_iswap(0, 1)};
  const RunResult two = run_circuit(c, d, s.cal);
  CHECK(std::norm(two.final.amplitudes(d.index_of({Level::G, Level::E}))) > 0.99);

  c.initial = InitialState::basis("00");
  CHECK(run_circuit(c, d, s.cal).fidelity == doctest::Approx(1.0));
}

TEST_CASE("per-column gate fidelities at reference parameters") {
  const auto& s = pair();
  const Dynamics d(s.c, s.m, Tier::Full);
  const std::vector<GateOp> gates = {GateOp::rx(kPi, 0), GateOp::rx(kPi / 2, 1), GateOp::rz(kPi, 0),
                                     GateOp::rz(kPi / 2, 1), GateOp::sqrt_iswap(0, 1)};
  for (const auto& g : gates)
    for (const char* bits : {"00", "01", "10", "11"}) {
      Circuit c;
      c.n_qubits = 2;
      c.initial = InitialState::basis(bits);
      c.gates = {g};
      RunOptions ro;
      ro.isolation.automatic = false;
      const RunResult r = run_circuit(c, d, s.cal, ro);
      CAPTURE(g.name());
      CAPTURE(bits);
      CHECK(r.fidelity > 0.99);
    }
}

TEST_CASE("RX composition on a single impurity") {
  LatticeSpec lat;
  ImpuritySpec imp;
  imp.plaquettes = {{4, 4}};
  const auto cpl = build_couplings(make_geometry(lat, imp));
  const auto m = build_effective_model(cpl, optimal_detuning(cpl).delta_LI);
  const auto cal = default_calibration(m);
  const Dynamics d(cpl, m, Tier::Reduced);
  const StateVector e = d.basis_state(d.index_of({Level::E}));
  auto apply = [&](std::vector<double> angles) {
    Evolver ev(d, EvolveOptions{{}, Propagation::Exponential});
    StateVector s = e;
    for (double th : angles) {
      const auto seg = compile_rx(th, 0, cal, no_drives(1));
      ev.evolve(s, seg.drives, seg.duration);
    }
    return s.amplitudes;
  };
  // full turn: back to |e> up to the spinor sign
  CHECK(fidelity(e.amplitudes, apply({2 * kPi})) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::real(e.amplitudes.dot(apply({2 * kPi}))) < 0.0);
  const CVec half = apply({kPi / 2, kPi / 2}), whole = apply({kPi});
  CHECK(std::abs(fidelity(whole, half) - 1.0) < 1e-8);
  CHECK(std::norm(whole(d.index_of({Level::G}))) > 0.99);
}

TEST_CASE("RZ keeps populations and bounds the HMS population") {
  const auto& s = pair();
  const Dynamics d(s.c, s.m, Tier::Reduced);
  Circuit c;
  c.n_qubits = 2;
  c.initial.terms = {{"00", 1 / std::sqrt(2.0)}, {"10", 1 / std::sqrt(2.0)}};
  c.gates = {GateOp::decouple(1, DecoupleMethod::Detune), GateOp::rz(kPi, 0)};
  RunOptions ro;
  ro.record_trajectory = true;
  ro.evolve.sample_dt = 0.5;
  const RunResult r = run_circuit(c, d, s.cal, ro);
  const auto ie = d.index_of({Level::E, Level::G}), ir = d.index_of({Level::R, Level::G});
  const double bound = 2 * std::pow(std::abs(s.cal.Omega_f) / s.cal.delta_R, 2);
  double worst_r = 0.0;
  for (const RVec& p : r.trajectory.populations) worst_r = std::max(worst_r, p(ir));
  CHECK(worst_r < bound);
  CHECK(std::abs(std::norm(r.final.amplitudes(ie)) - 0.5) < 1e-4);
  CHECK(r.fidelity > 0.999);
}

TEST_CASE("detuned ground-state spectator stays dark during a neighbour iSWAP") {
  const Setup s = make({{4, 4}, {4, 5}, {4, 6}});
  const Dynamics d(s.c, s.m, Tier::Full);
  Circuit c;
  c.n_qubits = 3;
  c.initial = InitialState::basis("100");
  c.gates = {GateOp::decouple(2, DecoupleMethod::Detune), GateOp::iswap(0, 1)};
  RunOptions ro;
  ro.record_trajectory = true;
  ro.evolve.sample_dt = 50.0;
  const RunResult r = run_circuit(c, d, s.cal, ro);
  double worst = 0.0;
  for (const RVec& p : r.trajectory.populations) {
    double e = 0.0;
    for (std::size_t i = 0; i < d.dimension(); ++i)
      if (d.basis()[i].impurity[2] == Level::E) e += p(static_cast<Eigen::Index>(i));
    worst = std::max(worst, e);
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("HMS round trip returns the excitation") {
  const Setup s = make({{4, 4}, {4, 5}, {4, 6}});
  const Dynamics d(s.c, s.m, Tier::Full);
  Circuit c;
  c.n_qubits = 3;
  c.initial = InitialState::basis("101");
  c.gates = {GateOp::decouple(2, DecoupleMethod::HmsTransfer), GateOp::iswap(0, 1),
             GateOp::recouple(2)};
  RunOptions ro;
  ro.isolation.automatic = false;
  const RunResult r = run_circuit(c, d, s.cal, ro);
  CHECK(std::norm(r.final.amplitudes(d.index_of({Level::G, Level::E, Level::E}))) > 0.99);
  CHECK(r.fidelity > 0.99);
  // while parked the excitation sits in r with the factor i
  CHECK(r.per_gate_fidelities[1] > 0.99);
}

TEST_CASE("EIT dressing blocks transfer into the dressed impurity") {
  const auto& s = pair();
  const Dynamics d(s.c, s.m, Tier::Reduced);
  GateCalibration cal = s.cal;
  cal.Omega_eit = 100 * cal.max_coupling();
  DriveSettings bg = no_drives(2);
  // built by hand: the circuit compiler would recouple a gate target first
  const Schedule dec = compile_decouple(0, DecoupleMethod::Eit, cal, bg);
  EvolveOptions eo;
  eo.sample_dt = 20.0;
  Evolver ev(d, eo);
  StateVector st = d.basis_state(d.index_of({Level::G, Level::E}));
  Trajectory traj;
  for (const auto& seg : dec) ev.evolve(st, seg.drives, seg.duration, &traj);
  ev.evolve(st, bg, 2 * sqrt_iswap_duration({0, 1}, cal), &traj);
  const auto ie = d.index_of({Level::E, Level::G});
  double worst = 0.0;
  for (const RVec& p : traj.populations) worst = std::max(worst, p(ie));
  CHECK(worst < 1e-2);
  // without dressing the excitation moves over completely
  StateVector free = d.basis_state(d.index_of({Level::G, Level::E}));
  Evolver(d).evolve(free, no_drives(2), 2 * sqrt_iswap_duration({0, 1}, cal));
  CHECK(std::norm(free.amplitudes(ie)) > 0.9);
}

TEST_CASE("gate names") {
  CHECK(parse_gate_kind("x") == GateKind::RX);
  CHECK(parse_decouple_method("hms") == DecoupleMethod::HmsTransfer);
  CHECK_THROWS(parse_gate_kind("cz"));
  CHECK(wrap_angle(-kPi / 2) == doctest::Approx(3 * kPi / 2));
  CHECK(wrap_angle(2 * kPi) == doctest::Approx(2 * kPi));
}
