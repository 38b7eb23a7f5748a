// One line per acceptance criterion. Exit status is the number of failures.
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "arrayqc/experiments.hpp"
#include "arrayqc/io.hpp"

using namespace arrayqc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

RunConfig load(const std::string& name) {
  ConfigTable t = ConfigTable::from_file(std::string(ARRAYQC_CONFIGS) + "/" + name);
  t.set("output.wall_time", "false");
  return RunConfig::from_table(t);
}

std::string g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

int failures = 0;

void criterion(int n, const std::string& title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", n, title.c_str(),
              o.detail.c_str(), s);
  std::fflush(stdout);
}

}  // namespace

int main() {
  const RunConfig ref = load("reference.ini");

  criterion(1, "Green tensor normalization, reciprocity, translation", [&] {
    const ModelContext ctx = build_context(ref.lattice, ref.impurities, std::nullopt, ref.model,
                                           ref.calibration, 13.0);
    const Check lim = check_green_limit();
    const Check rec = check_reciprocity(ctx.couplings);
    return Outcome{lim.value < 1e-6 && rec.value < 1e-12,
                   "limit dev " + g(lim.value) + " < 1e-6, reciprocity/translation " +
                       g(rec.value) + " < 1e-12"};
  });

  criterion(2, "Gamma matrix positivity", [&] {
    const ModelContext ctx = build_context(ref.lattice, ref.impurities, std::nullopt, ref.model,
                                           ref.calibration, 13.0);
    const Check c = check_gamma_positivity(ctx.couplings);
    return Outcome{c.value >= -1e-10, "min eigenvalue " + g(c.value) + " >= -1e-10"};
  });

  const ModelContext ctx = build_context(ref);

  criterion(3, "subradiant window", [&] {
    const Check c = check_subradiant(ctx);
    return Outcome{c.pass, "Gamma_eff/gamma_I " + g(c.value) + " < 0.1, delta_LI " +
                               g(ctx.model.delta_LI) + " outside [" + g(ctx.couplings.band.lower) +
                               ", " + g(ctx.couplings.band.upper) + "]"};
  });

  const RunConfig val = load("validate.ini");
  const ModelContext vctx = build_context(val);
  const double period = kPi / (4.0 * std::abs(vctx.model.exchange()(0, 1).real()));

  criterion(4, "reduced vs full populations", [&] {
    const Check c = check_reduced_vs_full(vctx, period, val.model.evolve);
    return Outcome{c.value < 1e-2, "max deviation " + g(c.value) + " < 1e-2 over t <= " + g(period)};
  });

  criterion(5, "double lattice excitation suppression", [&] {
    const double h = val.experiment.horizon > 0.0 ? val.experiment.horizon : 20.0;
    const auto [sup, agree] = check_full_double(vctx, h, val.model.evolve);
    return Outcome{sup.value < 1e-2 && agree.value < 1e-3,
                   "ratio " + g(sup.value) + " < 1e-2, shared agreement " + g(agree.value) +
                       " < 1e-3 (t <= " + g(h) + ")"};
  });

  criterion(6, "X and Z fidelity after 700 gates", [&] {
    const GateDepthResult x = run_gate_depth(load("gate_depth_x.ini"));
    const GateDepthResult z = run_gate_depth(load("gate_depth_z.ini"));
    const double fx = x.fidelity.back(), fz = z.fidelity.back();
    return Outcome{x.fidelity.size() == 701 && z.fidelity.size() == 701 && fx > 0.99 && fz > 0.99,
                   "F_X " + g(fx) + ", F_Z " + g(fz) + " > 0.99"};
  });

  criterion(7, "iSWAP error after 100 gates", [&] {
    const RunConfig c = load("iswap_sweep.ini");
    const SweepPoint p1 = iswap_point(c, 0.1, 1);
    const SweepPoint p2 = iswap_point(c, 0.05, 1);
    const SweepPoint p3 = iswap_point(c, 0.1, 4);
    const bool ok = p1.error >= 3e-4 && p1.error <= 3e-3 && p2.error >= 3e-5 && p2.error <= 3e-4 &&
                    p3.error > 0.5;
    std::string detail = "dressed rate: eps(0.1,a) " + g(p1.error) + " in [3e-4,3e-3], eps(0.05,a) " +
                         g(p2.error) + " in [3e-5,3e-4], eps(0.1,4a) " + g(p3.error) + " > 0.5";
    ConfigTable t = c.table;
    t.set("calibration.exchange_rate", "effective");
    const RunConfig e = RunConfig::from_table(t);
    detail += "; effective rate for comparison: " + g(iswap_point(e, 0.1, 1).error) + ", " +
              g(iswap_point(e, 0.05, 1).error);
    return Outcome{ok, detail};
  });

  criterion(8, "Bell state", [&] {
    const CircuitReport r = run_circuit_experiment(load("bell.ini"));
    const double spec = r.max_excited(2);
    return Outcome{r.run.fidelity > 0.999 && spec < 1e-3,
                   "F " + g(r.run.fidelity) + " > 0.999, spectator max P_e " + g(spec) + " < 1e-3"};
  });

  criterion(9, "GHZ state", [&] {
    const CircuitReport r = run_circuit_experiment(load("ghz.ini"));
    const double p0 = r.computational[r.dominant[0]], p1 = r.computational[r.dominant[1]];
    const bool ok = std::abs(p0 - 0.5) < 0.01 && std::abs(p1 - 0.5) < 0.01 && r.leakage < 1e-2 &&
                    ((r.dominant[0] == 0 && r.dominant[1] == 7) || (r.dominant[0] == 7 && r.dominant[1] == 0));
    auto bits = [](int i) { return std::string{char('0' + (i >> 2 & 1)), char('0' + (i >> 1 & 1)), char('0' + (i & 1))}; };
    return Outcome{ok, "P(" + bits(r.dominant[0]) + ") " + g(p0) + ", P(" + bits(r.dominant[1]) +
                           ") " + g(p1) + " within 2% of 0.5, leakage " + g(r.leakage) +
                           " < 1e-2, fidelity " + g(r.run.fidelity)};
  });

  criterion(10, "disorder robustness", [&] {
    const DisorderResult r = run_disorder(load("disorder.ini"));
    return Outcome{r.samples == 20 && r.x.mean > 0.99 && r.z.mean > 0.99,
                   std::to_string(r.samples) + " samples at sigma " + g(r.sigma_frac) + " a: mean F_X " +
                       g(r.x.mean) + " (min " + g(r.x.min) + "), mean F_Z " + g(r.z.mean) + " (min " +
                       g(r.z.min) + ") > 0.99"};
  });

  criterion(11, "numerical hygiene", [&] {
    const Dynamics d(ctx.couplings, ctx.model, Tier::Full);
    const auto n = ctx.model.n_impurities();
    std::vector<Level> lv(n, Level::G);
    lv[0] = Level::E;
    const StateVector s0 = d.basis_state(d.index_of(lv));
    const double T = 300.0;

    // norm never grows across accepted steps with drives off
    EvolveOptions rk;
    rk.method = Propagation::RungeKutta;
    double last = 1.0, growth = 0.0;
    std::size_t steps = 0;
    rk.on_step = [&](double, const CVec& y, const CVec&) {
      const double nn = y.squaredNorm();
      growth = std::max(growth, nn - last);
      last = nn;
      ++steps;
    };
    StateVector a = s0;
    Evolver(d, rk).evolve(a, no_drives(n), T);
    const bool mono = growth <= 0.0 && steps > 0;

    // evolve(T) against evolve(T/2) twice
    rk.on_step = {};
    StateVector b = s0, c = s0;
    Evolver(d, rk).evolve(b, no_drives(n), T);
    Evolver e2(d, rk);
    e2.evolve(c, no_drives(n), T / 2);
    e2.evolve(c, no_drives(n), T / 2);
    const double semi = (b.amplitudes - c.amplitudes).cwiseAbs().maxCoeff();
    const bool semi_ok = semi <= 10 * rk.tol.rtol;

    // RHS linearity
    DriveSettings dr = no_drives(n);
    dr[0].Omega = 0.3;
    dr[1].Omega_f = cplx(0.2, 0.1);
    dr[1].delta_R = 5.0;
    const CVec x = CVec::Random(static_cast<Eigen::Index>(d.dimension()));
    const CVec y = CVec::Random(static_cast<Eigen::Index>(d.dimension()));
    const cplx al(0.7, -1.3), be(-0.4, 2.1);
    const CVec lhs = d.rhs(al * x + be * y, dr);
    const CVec rhs = al * d.rhs(x, dr) + be * d.rhs(y, dr);
    const double lin = (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1.0, rhs.cwiseAbs().maxCoeff());

    // ideal gates
    double uni = 0.0;
    for (double sg : {1.0, -1.0}) {
      const Eigen::Matrix4cd S = sqrt_iswap_matrix(sg);
      uni = std::max({uni, (S * S - iswap_matrix(sg)).cwiseAbs().maxCoeff(),
                      (S.adjoint() * S - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff()});
    }
    for (double th : {kPi / 2, kPi, 1.234}) {
      uni = std::max(uni, (rx_matrix(th).adjoint() * rx_matrix(th) - Eigen::Matrix2cd::Identity())
                              .cwiseAbs().maxCoeff());
      uni = std::max(uni, (rz_matrix(th).adjoint() * rz_matrix(th) - Eigen::Matrix2cd::Identity())
                              .cwiseAbs().maxCoeff());
    }
    const bool ok = mono && semi_ok && lin < 1e-12 && uni < 1e-12;
    return Outcome{ok, "norm growth " + g(growth) + " over " + std::to_string(steps) +
                           " steps, semigroup " + g(semi) + " <= " + g(10 * rk.tol.rtol) +
                           ", linearity " + g(lin) + ", unitarity " + g(uni) + " < 1e-12"};
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
