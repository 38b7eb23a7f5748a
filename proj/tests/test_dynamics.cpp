#include <doctest.h>

#include "arrayqc/propagator.hpp"
#include "oracles.hpp"

using namespace arrayqc;

namespace {

struct Fixture {
  ArrayCouplings c;
  EffectiveModel m;
};

Fixture make(std::vector<std::pair<int, int>> plaq, double gI = 1e-4) {
  LatticeSpec lat;
  ImpuritySpec imp;
  imp.plaquettes = std::move(plaq);
  imp.gamma_I = gI;
  Fixture f{build_couplings(make_geometry(lat, imp)), {}};
  f.m = build_effective_model(f.c, optimal_detuning(f.c).delta_LI);
  return f;
}

const Fixture& pair() {
  static const Fixture f = make({{4, 4}, {4, 5}});
  return f;
}

}  // namespace

TEST_CASE("reduced single-impurity decay at Gamma_eff") {
  const Fixture f = make({{4, 4}});
  const Dynamics d(f.c, f.m, Tier::Reduced);
  Evolver ev(d, EvolveOptions{{}, Propagation::Exponential});
  StateVector s = d.basis_state(d.index_of({Level::E}));
  const double T = 2e5;
  ev.evolve(s, no_drives(1), T);
  CHECK(s.norm2() == doctest::Approx(std::exp(-f.m.Gamma_eff * T)).epsilon(1e-10));
}

TEST_CASE("reduced exchange follows the closed-form two-mode solution") {
  const auto& f = pair();
  const Dynamics d(f.c, f.m, Tier::Reduced);
  const cplx g = f.m.exchange()(0, 1);
  // e energies Sigma - shift - i gamma_I / 2; the pair is not mirror symmetric in the array
  auto energy = [&](int a) {
    return f.m.Sigma(a) - f.m.frequency_shift(a) - 0.5 * kI * f.m.gamma_I;
  };
  const cplx eps = 0.5 * (energy(0) + energy(1)), del = 0.5 * (energy(0) - energy(1));
  const cplx W = std::sqrt(del * del + g * g);
  for (Propagation p : {Propagation::Exponential, Propagation::Taylor, Propagation::RungeKutta}) {
    Evolver ev(d, EvolveOptions{{1e-11, 1e-13}, p});
    StateVector s = d.basis_state(d.index_of({Level::E, Level::G}));
    const double t = 0.7 * kPi / (2 * g.real());
    ev.evolve(s, no_drives(2), t);
    const cplx ph = std::exp(-kI * eps * t);
    const cplx c1 = ph * (std::cos(W * t) - kI * del / W * std::sin(W * t));
    const cplx c2 = -kI * ph * g / W * std::sin(W * t);
    CHECK(std::abs(s.amplitudes(d.index_of({Level::E, Level::G})) - c1) < 1e-8);
    CHECK(std::abs(s.amplitudes(d.index_of({Level::G, Level::E})) - c2) < 1e-8);
  }
}

TEST_CASE("Stark shift from the exact two-level dressing") {
  const Fixture f = make({{4, 4}});
  const Dynamics d(f.c, f.m, Tier::Reduced);
  ImpurityDrive drive;
  drive.Omega_f = 1.0;
  drive.delta_R = 200.0;
  const DriveSettings dr{drive};
  const CMat H = CMat(d.hamiltonian(dr));
  // e <-> r block: [[E_e, -Omega_f], [-conj(Omega_f), -delta_R]]
  const auto ie = d.index_of({Level::E}), ir = d.index_of({Level::R});
  CHECK(H(ir, ir) == cplx(-200.0, 0.0));
  CHECK(H(ie, ir) == cplx(-1.0, 0.0));
  CHECK(H(ir, ie) == cplx(-1.0, 0.0));
  Evolver ev(d, EvolveOptions{{}, Propagation::Exponential});
  StateVector s = d.basis_state(0);
  s.amplitudes.setZero();
  s.amplitudes(0) = s.amplitudes(ie) = 1.0 / std::sqrt(2.0);
  const double t = 314.159;
  ev.evolve(s, dr, t);
  const CMat U = oracle::expm_eig(-kI * t * H);
  CVec ref = CVec::Zero(H.rows());
  ref(0) = ref(ie) = 1.0 / std::sqrt(2.0);
  ref = U * ref;
  CHECK((s.amplitudes - ref).norm() < 1e-9);
  const double phase = std::arg(s.amplitudes(ie) / s.amplitudes(0));
  CHECK(phase == doctest::Approx(std::remainder(-t / 200.0, 2 * kPi)).epsilon(1e-3));
}

TEST_CASE("Rabi drive on a single impurity") {
  const Fixture f = make({{4, 4}});
  const Dynamics d(f.c, f.m, Tier::Reduced);
  ImpurityDrive drive;
  drive.Omega = 1.0;
  Evolver ev(d, EvolveOptions{{}, Propagation::Exponential});
  StateVector s = d.basis_state(d.index_of({Level::E}));
  ev.evolve(s, {drive}, kPi / 4);
  // cos^2(Omega t) with negligible decay over the pulse
  CHECK(std::norm(s.amplitudes(d.index_of({Level::E}))) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("full-tier hamiltonian has the lattice block and impurity couplings") {
  const auto& f = pair();
  const Dynamics d(f.c, f.m, Tier::Full);
  const CMat H = CMat(d.static_hamiltonian());
  const Basis& b = d.basis();
  const auto lat = [&](int i) { return b.index_of(BasisState{{Level::G, Level::G}, {i}}); };
  const auto e0 = d.index_of({Level::E, Level::G});
  const double mean = f.m.frequency_shift.mean();
  CHECK(std::abs(H(lat(3), lat(3)) - cplx(-f.m.delta_LI - mean, -0.5)) < 1e-12);
  CHECK(std::abs(H(lat(3), lat(17)) - f.c.lattice.m(3, 17)) < 1e-14);
  CHECK(std::abs(H(lat(7), e0) - f.c.K(7, 0)) < 1e-14);
  CHECK(std::abs(H(e0, lat(7)) - f.c.K(7, 0)) < 1e-14);
  CHECK(std::abs(H(d.index_of({Level::G, Level::E}), e0) - f.m.Phi(1, 0)) < 1e-14);
}

TEST_CASE("reduced and full tiers agree with drives off") {
  const auto& f = pair();
  const Dynamics red(f.c, f.m, Tier::Reduced), full(f.c, f.m, Tier::Full);
  const double T = kPi / (4 * f.m.exchange()(0, 1).real());
  StateVector a = red.basis_state(red.index_of({Level::E, Level::G}));
  StateVector b = full.basis_state(full.index_of({Level::E, Level::G}));
  Evolver ea(red, EvolveOptions{{}, Propagation::Exponential});
  Evolver eb(full, EvolveOptions{{}, Propagation::Exponential});
  for (int k = 0; k < 8; ++k) {
    ea.evolve(a, no_drives(2), T / 8);
    eb.evolve(b, no_drives(2), T / 8);
    for (auto lv : {std::vector<Level>{Level::E, Level::G}, std::vector<Level>{Level::G, Level::E}})
      CHECK(std::abs(std::norm(a.amplitudes(red.index_of(lv))) -
                     std::norm(b.amplitudes(full.index_of(lv)))) < 1e-2);
  }
}

TEST_CASE("RHS is linear") {
  const auto& f = pair();
  const Dynamics d(f.c, f.m, Tier::Full);
  DriveSettings dr = no_drives(2);
  dr[0].Omega = cplx(0.3, 0.1);
  dr[1].Omega_f = 0.5;
  dr[1].delta_R = 20;
  const CVec x = CVec::Random(static_cast<Eigen::Index>(d.dimension()));
  const CVec y = CVec::Random(static_cast<Eigen::Index>(d.dimension()));
  const cplx a(0.7, -1.3), b(-0.2, 0.4);
  const CVec lhs = d.rhs(a * x + b * y, dr);
  const CVec rhs = a * d.rhs(x, dr) + b * d.rhs(y, dr);
  CHECK((lhs - rhs).norm() / rhs.norm() < 1e-12);
}

TEST_CASE("propagation methods agree on a driven full-tier segment") {
  const auto& f = pair();
  const Dynamics d(f.c, f.m, Tier::Full);
  DriveSettings dr = no_drives(2);
  dr[0].Omega = 0.5;
  dr[1].delta_dec = 1.0;
  StateVector ref = d.basis_state(d.index_of({Level::E, Level::G}));
  StateVector t = ref, r = ref;
  Evolver(d, EvolveOptions{{}, Propagation::Exponential}).evolve(ref, dr, 3.0);
  Evolver(d, EvolveOptions{{}, Propagation::Taylor}).evolve(t, dr, 3.0);
  Evolver(d, EvolveOptions{{1e-10, 1e-13}, Propagation::RungeKutta}).evolve(r, dr, 3.0);
  CHECK((t.amplitudes - ref.amplitudes).norm() < 1e-10);
  CHECK((r.amplitudes - ref.amplitudes).norm() < 1e-7);
}

TEST_CASE("expmv against an eigendecomposition") {
  const auto& f = pair();
  const Dynamics d(f.c, f.m, Tier::Full);
  const SparseMat H = d.static_hamiltonian();
  const CVec v = CVec::Random(static_cast<Eigen::Index>(d.dimension())).normalized();
  const CVec got = expmv(H, 2.5, v);
  const CVec want = oracle::expm_eig(-kI * 2.5 * CMat(H)) * v;
  CHECK((got - want).norm() < 1e-10);
}

TEST_CASE("connected blocks split by excitation number with drives off") {
  const auto& f = pair();
  const Dynamics d(f.c, f.m, Tier::Full);
  const auto blocks = connected_blocks(d.static_hamiltonian());
  std::size_t total = 0;
  for (const auto& b : blocks) {
    total += b.size();
    const int n = d.basis()[static_cast<std::size_t>(b.front())].excitations();
    for (auto i : b) CHECK(d.basis()[static_cast<std::size_t>(i)].excitations() == n);
  }
  CHECK(total == d.dimension());
}

TEST_CASE("observables") {
  const auto& f = pair();
  const Dynamics d(f.c, f.m, Tier::Reduced);
  StateVector s = d.basis_state(0);
  s.amplitudes(0) = 1.0 / std::sqrt(2.0);
  s.amplitudes(d.index_of({Level::E, Level::G})) = kI / std::sqrt(2.0);
  const Observables o = observables(s, d.basis());
  CHECK(o.norm2 == doctest::Approx(1.0));
  CHECK(o.phases[0] == doctest::Approx(kPi / 2));
}
