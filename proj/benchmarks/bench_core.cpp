#include <benchmark/benchmark.h>

#include "arrayqc/circuits.hpp"

using namespace arrayqc;

namespace {

struct Ref {
  ArrayCouplings c;
  EffectiveModel m;
  GateCalibration cal;
};

const Ref& ref(int n_imp) {
  static const auto make = [](int n) {
    LatticeSpec lat;
    ImpuritySpec imp;
    for (int k = 0; k < n; ++k) imp.plaquettes.emplace_back(4, 4 + k);
    imp.gamma_I = 1e-3;
    Ref r{build_couplings(make_geometry(lat, imp)), {}, {}};
    r.m = build_effective_model(r.c, optimal_detuning(r.c).delta_LI);
    r.cal = default_calibration(r.m);
    r.cal.Omega_x = 1.0;
    return r;
  };
  static const Ref two = make(2), three = make(3);
  return n_imp == 2 ? two : three;
}

void BM_GreenTensor(benchmark::State& st) {
  Vec3 r(0.13, 0.07, 0.0);
  for (auto _ : st) {
    benchmark::DoNotOptimize(green_tensor(r));
    r.x() += 1e-9;
  }
}
BENCHMARK(BM_GreenTensor);

void BM_CouplingMatrix(benchmark::State& st) {
  LatticeSpec lat;
  lat.rows = lat.cols = static_cast<int>(st.range(0));
  const auto pos = build_lattice(lat);
  for (auto _ : st) benchmark::DoNotOptimize(coupling_matrix(pos, lat.polarization));
}
BENCHMARK(BM_CouplingMatrix)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_OptimalDetuning(benchmark::State& st) {
  const auto& c = ref(2).c;
  for (auto _ : st) benchmark::DoNotOptimize(optimal_detuning(c));
}
BENCHMARK(BM_OptimalDetuning)->Unit(benchmark::kMillisecond);

void BM_HamiltonianBuild(benchmark::State& st) {
  const auto& r = ref(2);
  const Tier tier = static_cast<Tier>(st.range(0));
  for (auto _ : st) {
    const Dynamics d(r.c, r.m, tier);
    benchmark::DoNotOptimize(d.static_hamiltonian().nonZeros());
  }
}
BENCHMARK(BM_HamiltonianBuild)
    ->Arg(static_cast<int>(Tier::Full))
    ->Arg(static_cast<int>(Tier::FullDouble))
    ->Unit(benchmark::kMillisecond);

void BM_Expmv(benchmark::State& st) {
  const auto& r = ref(2);
  const Dynamics d(r.c, r.m, Tier::FullDouble);
  const SparseMat H = d.hamiltonian(no_drives(2));
  const CVec v = d.basis_state(1).amplitudes;
  for (auto _ : st) benchmark::DoNotOptimize(expmv(H, 1.0, v));
}
BENCHMARK(BM_Expmv)->Unit(benchmark::kMillisecond);

void BM_BlockExpm(benchmark::State& st) {
  const auto& r = ref(2);
  const Dynamics d(r.c, r.m, Tier::Full);
  double tau = 1.0;
  for (auto _ : st) {
    // a fresh duration defeats the propagator cache
    Evolver ev(d, EvolveOptions{{}, Propagation::Exponential});
    StateVector s = d.basis_state(1);
    ev.evolve(s, no_drives(2), tau);
    tau += 1e-3;
    benchmark::DoNotOptimize(s.amplitudes.data());
  }
}
BENCHMARK(BM_BlockExpm)->Unit(benchmark::kMillisecond);

void BM_BellFull(benchmark::State& st) {
  const auto& r = ref(3);
  const Dynamics d(r.c, r.m, Tier::Full);
  const Circuit c = bell_circuit(r.cal.exchange_sign(0, 1));
  for (auto _ : st) benchmark::DoNotOptimize(run_circuit(c, d, r.cal).fidelity);
}
BENCHMARK(BM_BellFull)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
