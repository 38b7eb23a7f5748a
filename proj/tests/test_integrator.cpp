#include <doctest.h>

#include "arrayqc/propagator.hpp"

using namespace arrayqc;

TEST_CASE("complex exponential decay") {
  const cplx lam(-0.3, 2.0);
  CVec y = CVec::Constant(1, 1.0);
  RkOptions o;
  o.tol = {1e-10, 1e-14};
  const RkStats st = dopri5([&](const CVec& x, CVec& dx) { dx = lam * x; }, y, 0.0, 5.0, o);
  CHECK(std::abs(y(0) - std::exp(lam * 5.0)) < 1e-8);
  CHECK(st.accepted > 0);
}

TEST_CASE("dense output hits the requested sample times") {
  const cplx lam(0.0, -1.0);
  CVec y = CVec::Constant(1, 1.0);
  std::vector<double> ts{0.5, 1.0, 2.5, 3.0};
  std::vector<double> got_t;
  double worst = 0.0;
  RkOptions o;
  o.tol = {1e-10, 1e-13};
  dopri5([&](const CVec& x, CVec& dx) { dx = lam * x; }, y, 0.0, 3.0, o, ts,
         [&](double t, const CVec& x) {
           got_t.push_back(t);
           worst = std::max(worst, std::abs(x(0) - std::exp(lam * t)));
         });
  CHECK(got_t == ts);
  CHECK(worst < 1e-8);
}

TEST_CASE("error scales with tolerance") {
  const cplx lam(0.0, 3.0);
  auto err = [&](double rtol) {
    CVec y = CVec::Constant(1, 1.0);
    RkOptions o;
    o.tol = {rtol, rtol * 1e-3};
    dopri5([&](const CVec& x, CVec& dx) { dx = lam * x; }, y, 0.0, 10.0, o);
    return std::abs(y(0) - std::exp(lam * 10.0));
  };
  CHECK(err(1e-10) < err(1e-6));
  CHECK(err(1e-6) < err(1e-3));
}

TEST_CASE("non-finite right-hand side is reported") {
  CVec y = CVec::Constant(1, 1.0);
  CHECK_THROWS(dopri5([](const CVec&, CVec& dx) { dx = CVec::Constant(1, cplx(NAN, 0)); }, y,
                      0.0, 1.0, RkOptions{}));
}

namespace {

struct Pair {
  ArrayCouplings c;
  EffectiveModel m;
};

const Pair& pair() {
  static const Pair p = [] {
    LatticeSpec lat;
    ImpuritySpec imp;
    imp.plaquettes = {{4, 4}, {4, 5}};
    Pair q{build_couplings(make_geometry(lat, imp)), {}};
    q.m = build_effective_model(q.c, optimal_detuning(q.c).delta_LI);
    return q;
  }();
  return p;
}

}  // namespace

TEST_CASE("norm never grows with drives off") {
  const Dynamics d(pair().c, pair().m, Tier::Full);
  EvolveOptions o;
  o.method = Propagation::RungeKutta;
  double last = 1.0;
  bool monotone = true;
  std::size_t steps = 0;
  o.on_step = [&](double, const CVec& y, const CVec&) {
    const double n = y.squaredNorm();
    if (n > last * (1 + 1e-12)) monotone = false;
    last = n;
    ++steps;
  };
  StateVector s = d.basis_state(d.index_of({Level::E, Level::E}));
  Evolver(d, o).evolve(s, no_drives(2), 200.0);
  CHECK(steps > 10);
  CHECK(monotone);
}

TEST_CASE("evolution is a semigroup to within the tolerance") {
  const Dynamics d(pair().c, pair().m, Tier::Full);
  DriveSettings dr = no_drives(2);
  dr[0].Omega = 0.2;
  EvolveOptions o;
  o.method = Propagation::RungeKutta;
  StateVector a = d.basis_state(d.index_of({Level::E, Level::G})), b = a;
  Evolver(d, o).evolve(a, dr, 7.0);
  Evolver e2(d, o);
  e2.evolve(b, dr, 3.0);
  e2.evolve(b, dr, 4.0);
  CHECK((a.amplitudes - b.amplitudes).norm() / a.amplitudes.norm() < 10 * o.tol.rtol);
  CHECK(a.time == doctest::Approx(7.0));
}

TEST_CASE("trajectory samples land on the grid and the segment end") {
  const Dynamics d(pair().c, pair().m, Tier::Reduced);
  for (Propagation p : {Propagation::RungeKutta, Propagation::Exponential}) {
    EvolveOptions o;
    o.method = p;
    o.sample_dt = 0.25;
    Evolver ev(d, o);
    StateVector s = d.basis_state(0);
    Trajectory tr;
    ev.evolve(s, no_drives(2), 1.1, &tr);
    REQUIRE(tr.size() == 5);
    CHECK(tr.time[0] == doctest::Approx(0.25));
    CHECK(tr.time[3] == doctest::Approx(1.0));
    CHECK(tr.time[4] == doctest::Approx(1.1));
  }
}

TEST_CASE("propagation names") {
  CHECK(parse_propagation("expm") == Propagation::Exponential);
  CHECK(to_string(Propagation::Taylor) == "taylor");
  CHECK_THROWS(parse_propagation("euler"));
}
