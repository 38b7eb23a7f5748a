#pragma once

#include <deque>
#include <string>
#include <string_view>
#include <vector>

#include "arrayqc/dynamics.hpp"
#include "arrayqc/integrator.hpp"

namespace arrayqc {

// RungeKutta: adaptive Dormand-Prince. Exponential: dense exp(-iH tau) per
// connected block of H, cached per (drives, tau). Taylor: sparse action of the
// exponential. Auto picks Exponential when every block is small, else Taylor.
enum class Propagation { Auto, RungeKutta, Exponential, Taylor };

std::string to_string(Propagation p);
Propagation parse_propagation(std::string_view name);

struct Trajectory {
  std::vector<double> time;
  std::vector<double> norm2;
  std::vector<RVec> populations;

  void record(double t, const CVec& amplitudes);
  std::size_t size() const { return time.size(); }
};

struct EvolveOptions {
  Tolerances tol;
  Propagation method = Propagation::Auto;
  double sample_dt = 0.0;  // 0 records only segment ends
  std::size_t dense_block_limit = 1400;
  std::size_t cache_bytes = std::size_t{1} << 30;
  StepFn on_step;  // Runge-Kutta only
};

// exp(-i H t) v via scaled, truncated Taylor series
CVec expmv(const SparseMat& H, double t, const CVec& v);

// connected components of the sparsity graph of H
std::vector<std::vector<Eigen::Index>> connected_blocks(const SparseMat& H);

class Evolver {
 public:
  explicit Evolver(const Dynamics& dynamics, EvolveOptions options = {});

  // Advances state by duration under constant drives; appends samples to traj.
  void evolve(StateVector& state, const DriveSettings& drives, double duration,
              Trajectory* traj = nullptr);

  const Dynamics& dynamics() const { return *dyn_; }
  const EvolveOptions& options() const { return opt_; }
  Propagation method_for(const DriveSettings& drives);

  struct Stats {
    std::size_t rk_steps = 0;
    std::size_t rk_rejected = 0;
    std::size_t dense_builds = 0;
    std::size_t taylor_calls = 0;
  };
  const Stats& stats() const { return stats_; }

 private:
  struct Propagator {
    double tau;
    std::vector<CMat> U;
  };
  struct Generator {
    DriveSettings drives;
    SparseMat H;
    std::vector<std::vector<Eigen::Index>> blocks;
    std::size_t largest = 0;
    std::vector<Propagator> cache;
    double h_hint = 0.0;
  };

  Generator& generator(const DriveSettings& drives);
  const Propagator& propagator(Generator& g, double tau);
  static void apply(const Generator& g, const Propagator& p, CVec& psi);

  const Dynamics* dyn_;
  EvolveOptions opt_;
  std::deque<Generator> gens_;
  std::size_t cached_bytes_ = 0;
  Stats stats_;
};

}  // namespace arrayqc
