#include "arrayqc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include <Eigen/Eigenvalues>

#include "arrayqc/io.hpp"

namespace arrayqc {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double period(const ModelContext& ctx) {
  if (ctx.model.n_impurities() < 2) return 100.0;
  return sqrt_iswap_duration({0, 1}, ctx.calib);
}

}  // namespace

ModelContext build_context(const LatticeSpec& lattice, const ImpuritySpec& impurities,
                           const std::optional<DisorderSpec>& disorder, const ModelOptions& options,
                           const CalibrationOverrides& calibration,
                           std::optional<double> delta_LI) {
  ModelContext ctx{build_couplings(make_geometry(lattice, impurities, disorder)), {}, {}, {}};
  if (!delta_LI) delta_LI = options.delta_LI;
  if (!delta_LI) {
    DetuningSearch s = default_search(ctx.couplings.band);
    s.grid_points = static_cast<int>(options.search_points);
    ctx.search = optimal_detuning(ctx.couplings, s);
    delta_LI = ctx.search->delta_LI;
  }
  ctx.model = build_effective_model(ctx.couplings, *delta_LI, options.reference);
  ctx.calib = calibration.apply(ctx.couplings, ctx.model);
  return ctx;
}

ModelContext build_context(const RunConfig& c) {
  return build_context(c.lattice, c.impurities, c.disorder, c.model, c.calibration);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex m;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---- model ---------------------------------------------------------------

ModelResult run_model(const RunConfig& c) {
  ModelResult r{build_context(c), {}};
  if (r.context.search) {
    r.sweep = *r.context.search;
  } else {
    DetuningSearch s = default_search(r.context.couplings.band);
    s.grid_points = static_cast<int>(c.model.search_points);
    r.sweep = optimal_detuning(r.context.couplings, s);
  }
  return r;
}

// ---- gate depth ----------------------------------------------------------

GateDepthResult gate_depth(const ModelContext& ctx, Tier tier, const std::string& gate,
                           double angle, int depth, const EvolveOptions& evolve) {
  const auto t0 = std::chrono::steady_clock::now();
  if (gate != "x" && gate != "z") throw ConfigError("gate-depth supports gates x and z");
  if (depth < 0) throw ConfigError("depth must be non-negative");
  const bool is_x = gate == "x";
  if (angle == 0.0) angle = is_x ? kPi : kPi / 2.0;
  angle = wrap_angle(angle);
  const double inverse = wrap_angle(2.0 * kPi - angle);

  const Dynamics dyn(ctx.couplings, ctx.model, tier);
  const int n = dyn.n_impurities();
  Circuit circ;
  circ.n_qubits = n;
  const std::string zeros(static_cast<std::size_t>(n), '0');
  std::string one = zeros;
  one[0] = '1';
  if (is_x) {
    circ.initial = InitialState::basis(one);
  } else {
    const double r = 1.0 / std::sqrt(2.0);
    circ.initial.terms = {{zeros, r}, {one, r}};
  }
  for (int q = 1; q < n; ++q) circ.gates.push_back(GateOp::decouple(q, DecoupleMethod::Detune));
  const std::size_t offset = circ.gates.size();
  for (int k = 0; k < depth; ++k) {
    const double th = k % 2 == 0 ? angle : inverse;
    circ.gates.push_back(is_x ? GateOp::rx(th, 0) : GateOp::rz(th, 0));
  }

  RunOptions ro;
  ro.evolve = evolve;
  const RunResult run = run_circuit(circ, dyn, ctx.calib, ro);

  GateDepthResult r;
  r.gate = gate;
  r.angle = angle;
  // no decouple gates means depth 0 is the untouched initial state
  r.fidelity.push_back(offset ? run.per_gate_fidelities[offset - 1] : 1.0);
  for (std::size_t k = offset; k < run.per_gate_fidelities.size(); ++k)
    r.fidelity.push_back(run.per_gate_fidelities[k]);
  const auto dur = [&](double th) {
    return is_x ? th / (2.0 * ctx.calib.Omega_x)
                : th * ctx.calib.delta_R / std::norm(ctx.calib.Omega_f);
  };
  r.gate_duration = 0.5 * (dur(angle) + dur(inverse));
  r.delta_LI = ctx.model.delta_LI;
  r.Gamma_eff = ctx.model.Gamma_eff;
  r.wall_time = seconds_since(t0);
  return r;
}

GateDepthResult run_gate_depth(const RunConfig& c) {
  const ModelContext ctx = build_context(c);
  return gate_depth(ctx, c.model.tier, c.experiment.gate, c.experiment.angle, c.experiment.depth,
                    c.model.evolve);
}

// ---- iSWAP sweep ---------------------------------------------------------

ImpuritySpec centred_pair(const LatticeSpec& lattice, int distance, const ImpuritySpec& base) {
  const int prow = lattice.rows - 1, pcol = lattice.cols - 1;
  if (distance < 1 || distance >= pcol)
    throw ConfigError("impurity distance does not fit in the lattice");
  ImpuritySpec s = base;
  const int row = (prow - 1) / 2;
  const int c0 = (pcol - 1 - distance) / 2;
  s.plaquettes = {{row, c0}, {row, c0 + distance}};
  return s;
}

SweepPoint iswap_point(const RunConfig& c, double a, int distance) {
  LatticeSpec lat = c.lattice;
  lat.a = a;
  const ImpuritySpec imp = centred_pair(lat, distance, c.impurities);
  const ModelContext ctx = build_context(lat, imp, c.disorder, c.model, c.calibration);
  SweepPoint p;
  p.a = a;
  p.distance = distance;
  p.delta_LI = ctx.model.delta_LI;
  p.Gamma_eff = ctx.model.Gamma_eff;
  p.g = ctx.calib.g_pair(0, 1);
  try {
    p.iswap_duration = 2.0 * sqrt_iswap_duration({0, 1}, ctx.calib);
  } catch (const ConfigError& e) {
    p.note = e.what();
    return p;  // error stays 1
  }
  const Dynamics dyn(ctx.couplings, ctx.model, c.model.tier);
  Circuit circ;
  circ.n_qubits = 2;
  circ.initial = InitialState::basis("10");
  for (int k = 0; k < c.experiment.count; ++k) circ.gates.push_back(GateOp::iswap(0, 1));
  RunOptions ro;
  ro.evolve = c.model.evolve;
  const RunResult run = run_circuit(circ, dyn, ctx.calib, ro);
  p.fidelity = run.fidelity;
  p.error = std::clamp(1.0 - run.fidelity, 0.0, 1.0);
  return p;
}

SweepResult run_iswap_sweep(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  SweepResult r;
  r.count = c.experiment.count;
  std::vector<std::pair<double, int>> axis;
  for (double a : c.experiment.spacings)
    for (int d : c.experiment.distances) axis.emplace_back(a, d);
  r.points.resize(axis.size());
  parallel_for(axis.size(), c.threads,
               [&](std::size_t i) { r.points[i] = iswap_point(c, axis[i].first, axis[i].second); });
  r.wall_time = seconds_since(t0);
  return r;
}

// ---- circuits ------------------------------------------------------------

Circuit load_circuit(const RunConfig& c, double sign, std::string& name) {
  const std::string& which = c.experiment.circuit;
  if (which == "bell") {
    name = "bell";
    return bell_circuit(sign);
  }
  if (which == "ghz") {
    name = "ghz";
    return ghz_circuit(sign);
  }
  name = which;
  return read_circuit_file(which);
}

std::vector<RVec> excited_populations(const Trajectory& traj, const Basis& basis) {
  const int n = basis.n_impurities();
  std::vector<RVec> out;
  out.reserve(traj.size());
  for (const RVec& p : traj.populations) {
    RVec e = RVec::Zero(n);
    for (std::size_t s = 0; s < basis.size(); ++s)
      for (int q = 0; q < n; ++q)
        if (basis[s].impurity[q] == Level::E) e(q) += p(static_cast<Eigen::Index>(s));
    out.push_back(std::move(e));
  }
  return out;
}

CircuitReport run_circuit_experiment(const ModelContext& ctx, Tier tier, const Circuit& circuit,
                                     const std::string& name, const EvolveOptions& evolve,
                                     bool trajectory) {
  const Dynamics dyn(ctx.couplings, ctx.model, tier);
  CircuitReport r;
  r.name = name;
  r.circuit = circuit;
  r.labels = dyn.basis().labels();
  RunOptions ro;
  ro.evolve = evolve;
  ro.record_trajectory = true;  // needed for the spectator bound
  r.run = run_circuit(circuit, dyn, ctx.calib, ro);
  r.delta_LI = ctx.model.delta_LI;
  r.Gamma_eff = ctx.model.Gamma_eff;

  const int n = dyn.n_impurities();
  r.max_excited = RVec::Zero(n);
  for (const RVec& e : excited_populations(r.run.trajectory, dyn.basis()))
    r.max_excited = r.max_excited.cwiseMax(e);
  if (!trajectory) r.run.trajectory = Trajectory{};

  const std::size_t dim = std::size_t{1} << n;
  r.computational.assign(dim, 0.0);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    std::vector<Level> lv(n, Level::G);
    for (int q = 0; q < n; ++q)
      if ((idx >> (n - 1 - q)) & 1) lv[q] = Level::E;
    // states beyond the tier's excitation limit carry no amplitude
    if (const auto i = dyn.basis().find(BasisState{lv, {}}))
      r.computational[idx] = std::norm(r.run.final.amplitudes(static_cast<Eigen::Index>(*i)));
  }
  std::vector<int> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return r.computational[x] > r.computational[y]; });
  r.dominant.assign(order.begin(), order.begin() + std::min<std::size_t>(2, dim));
  double top = 0.0;
  for (int i : r.dominant) top += r.computational[i];
  r.leakage = std::max(0.0, r.run.final.norm2() - top);
  return r;
}

CircuitReport run_circuit_experiment(const RunConfig& c) {
  const ModelContext ctx = build_context(c);
  const int n = ctx.model.n_impurities();
  const std::string& which = c.experiment.circuit;
  double sign = 1.0;
  if ((which == "bell" || which == "ghz") && n != 3)
    throw ConfigError("builtin circuits need exactly three impurities");
  if (which == "bell") sign = ctx.calib.exchange_sign(0, 1);
  if (which == "ghz") sign = ctx.calib.exchange_sign(1, 2);
  std::string name;
  Circuit circ = load_circuit(c, sign, name);
  CircuitReport r = run_circuit_experiment(ctx, c.model.tier, circ, name, c.model.evolve,
                                           c.output.trajectory);
  r.exchange_sign = sign;
  return r;
}

// ---- disorder ------------------------------------------------------------

Stats summarize(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  return s;
}

DisorderResult run_disorder(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  DisorderResult r;
  r.sigma_frac = c.experiment.sigma_frac;
  r.samples = c.experiment.samples;
  r.depth = c.experiment.depth;
  // ordered optimum; disorder then moves each impurity off its own resonance
  r.delta_LI = build_context(c.lattice, c.impurities, std::nullopt, c.model, c.calibration)
                   .model.delta_LI;
  ModelOptions mo = c.model;
  mo.reference = FrequencyReference::PerImpurity;
  const bool imp = c.disorder ? c.disorder->disorder_impurities : true;
  const std::size_t n = static_cast<std::size_t>(r.samples);
  r.seeds.resize(n);
  r.x_fidelity.resize(n);
  r.z_fidelity.resize(n);
  parallel_for(n, c.threads, [&](std::size_t i) {
    const std::uint64_t seed = stream_seed(c.seed, i);
    r.seeds[i] = seed;
    const ModelContext ctx = build_context(c.lattice, c.impurities,
                                           DisorderSpec{r.sigma_frac, seed, imp}, mo,
                                           c.calibration, r.delta_LI);
    r.x_fidelity[i] = gate_depth(ctx, c.model.tier, "x", 0.0, r.depth, c.model.evolve).fidelity.back();
    r.z_fidelity[i] = gate_depth(ctx, c.model.tier, "z", 0.0, r.depth, c.model.evolve).fidelity.back();
  });
  r.x = summarize(r.x_fidelity);
  r.z = summarize(r.z_fidelity);
  r.wall_time = seconds_since(t0);
  return r;
}

// ---- validate ------------------------------------------------------------

bool ValidationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Check check_green_limit() {
  const Polarization d = Polarization::circular();
  const Vec3 r(1e-4, 0.0, 0.0);
  const Eigen::Matrix3cd G = green_tensor(r);
  const double v = (6.0 * kPi / kWavenumber) * (d.d.adjoint() * G.imag().cast<cplx>() * d.d)(0).real();
  const double dev = std::abs(v - 1.0);
  return {"green_limit", dev, 1e-6, dev <= 1e-6, "|(6 pi/k) d^H Im G d - 1| at r = 1e-4"};
}

Check check_reciprocity(const ArrayCouplings& c) {
  const auto& pos = c.lattice.positions;
  const Polarization d = c.geometry.lattice.polarization;
  const Vec3 shift(0.37, -0.21, 0.0);
  double worst = 0.0;
  const std::size_t n = pos.size();
  for (std::size_t i = 0; i < n; i += 7)
    for (std::size_t j = 0; j < n; j += 11) {
      if (i == j) continue;
      const cplx ij = pair_coupling(pos[i], pos[j], d, d).value();
      const cplx ji = pair_coupling(pos[j], pos[i], d, d).value();
      const cplx tr = pair_coupling(pos[i] + shift, pos[j] + shift, d, d).value();
      worst = std::max({worst, std::abs(ij - ji), std::abs(ij - tr)});
    }
  return {"reciprocity_translation", worst, 1e-12, worst <= 1e-12,
          "max |M_ij - M_ji| and |M_ij - M_ij(shifted)| over sampled pairs"};
}

Check check_gamma_positivity(const ArrayCouplings& c) {
  const RMat g = c.lattice.gamma_matrix(1.0);
  const RMat sym = 0.5 * (g + g.transpose());
  const double lo = Eigen::SelfAdjointEigenSolver<RMat>(sym, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return {"gamma_positivity", lo, -1e-10, lo >= -1e-10, "min eigenvalue of the lattice Gamma matrix"};
}

Check check_subradiant(const ModelContext& ctx) {
  const OptimalDetuning opt = ctx.search ? *ctx.search : optimal_detuning(ctx.couplings);
  const double ratio = opt.Gamma_eff / ctx.couplings.gamma_I();
  const bool outside = !opt.band.contains(opt.delta_LI);
  return {"subradiant_window", ratio, 0.1, ratio < 0.1 && outside,
          "worst Gamma_eff / gamma_I at delta_LI = " + format_double(opt.delta_LI) +
              (outside ? " (outside the band)" : " (inside the band)")};
}

namespace {

Trajectory drives_off_run(const Dynamics& dyn, const std::vector<Level>& levels, double horizon,
                          EvolveOptions eo, double dt) {
  eo.sample_dt = dt;
  Evolver ev(dyn, eo);
  StateVector s = dyn.basis_state(dyn.index_of(levels));
  Trajectory traj;
  traj.record(0.0, s.amplitudes);
  ev.evolve(s, no_drives(dyn.n_impurities()), horizon, &traj);
  return traj;
}

}  // namespace

Check check_reduced_vs_full(const ModelContext& ctx, double horizon, const EvolveOptions& evolve) {
  const int n = ctx.model.n_impurities();
  std::vector<Level> lv(n, Level::G);
  lv[0] = Level::E;
  const double dt = horizon / 200.0;
  const Dynamics red(ctx.couplings, ctx.model, Tier::Reduced);
  const Dynamics full(ctx.couplings, ctx.model, Tier::Full);
  const auto pr = excited_populations(drives_off_run(red, lv, horizon, evolve, dt), red.basis());
  const auto pf = excited_populations(drives_off_run(full, lv, horizon, evolve, dt), full.basis());
  double worst = 0.0;
  for (std::size_t k = 0; k < std::min(pr.size(), pf.size()); ++k)
    worst = std::max(worst, (pr[k] - pf[k]).cwiseAbs().maxCoeff());
  return {"reduced_vs_full", worst, 1e-2, worst < 1e-2 && pr.size() == pf.size(),
          "max |P_e reduced - P_e full| over t in [0, " + format_double(horizon) + "]"};
}

std::pair<Check, Check> check_full_double(const ModelContext& ctx, double horizon,
                                          const EvolveOptions& evolve) {
  const int n = ctx.model.n_impurities();
  if (n < 2) throw ConfigError("the double-excitation check needs two impurities");
  std::vector<Level> lv(n, Level::G);
  lv[0] = lv[1] = Level::E;
  const double dt = horizon / 100.0;
  const Dynamics full(ctx.couplings, ctx.model, Tier::Full);
  const Dynamics dbl(ctx.couplings, ctx.model, Tier::FullDouble);
  const Trajectory tf = drives_off_run(full, lv, horizon, evolve, dt);
  const Trajectory td = drives_off_run(dbl, lv, horizon, evolve, dt);

  double max_single = 0.0, max_double = 0.0;
  for (const RVec& p : td.populations) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t s = 0; s < dbl.basis().size(); ++s) {
      const auto nl = dbl.basis()[s].lattice.size();
      if (nl == 1) s1 += p(static_cast<Eigen::Index>(s));
      if (nl == 2) s2 += p(static_cast<Eigen::Index>(s));
    }
    max_single = std::max(max_single, s1);
    max_double = std::max(max_double, s2);
  }
  std::vector<Eigen::Index> map(full.basis().size());
  for (std::size_t s = 0; s < full.basis().size(); ++s)
    map[s] = static_cast<Eigen::Index>(dbl.basis().index_of(full.basis()[s]));
  double worst = 0.0;
  for (std::size_t k = 0; k < std::min(tf.size(), td.size()); ++k)
    for (std::size_t s = 0; s < map.size(); ++s)
      worst = std::max(worst, std::abs(tf.populations[k](static_cast<Eigen::Index>(s)) -
                                       td.populations[k](map[s])));
  const double ratio = max_single > 0.0 ? max_double / max_single : 0.0;
  Check sup{"double_lattice_suppression", ratio, 1e-2, ratio < 1e-2,
            "max_t sum |b_ij|^2 / max_t sum |v_i|^2 = " + format_double(max_double) + " / " +
                format_double(max_single)};
  Check agree{"full_vs_full_double", worst, 1e-3, worst < 1e-3 && tf.size() == td.size(),
              "max shared-population difference over t in [0, " + format_double(horizon) + "]"};
  return {sup, agree};
}

Check check_convergence(const ModelContext& ctx, double horizon, const Tolerances& tol) {
  const int n = ctx.model.n_impurities();
  std::vector<Level> lv(n, Level::G);
  lv[0] = Level::E;
  const Dynamics red(ctx.couplings, ctx.model, Tier::Reduced);
  EvolveOptions exact;
  exact.method = Propagation::Exponential;
  EvolveOptions rk;
  rk.method = Propagation::RungeKutta;
  rk.tol = tol;
  StateVector a = red.basis_state(red.index_of(lv)), b = a;
  Evolver(red, exact).evolve(a, no_drives(n), horizon);
  Evolver(red, rk).evolve(b, no_drives(n), horizon);
  const double dev = (a.amplitudes - b.amplitudes).cwiseAbs().maxCoeff();
  return {"integrator_convergence", dev, 1e-6, dev < 1e-6,
          "max amplitude deviation from the exact propagator at rtol = " + format_double(tol.rtol)};
}

ValidationReport run_validate(const RunConfig& c) {
  const ModelContext ctx = build_context(c);
  ValidationReport r;
  r.checks.push_back(check_green_limit());
  r.checks.push_back(check_reciprocity(ctx.couplings));
  r.checks.push_back(check_gamma_positivity(ctx.couplings));
  r.checks.push_back(check_subradiant(ctx));
  const double h = c.experiment.horizon > 0.0 ? c.experiment.horizon : period(ctx);
  EvolveOptions eo = c.model.evolve;
  if (ctx.model.n_impurities() >= 1) r.checks.push_back(check_reduced_vs_full(ctx, h, eo));
  if (c.experiment.full_double && ctx.model.n_impurities() >= 2) {
    const double hd = c.experiment.horizon > 0.0 ? c.experiment.horizon : 20.0;
    auto [sup, agree] = check_full_double(ctx, hd, eo);
    r.checks.push_back(sup);
    r.checks.push_back(agree);
  }
  r.checks.push_back(check_convergence(ctx, h, c.model.evolve.tol));
  return r;
}

}  // namespace arrayqc
