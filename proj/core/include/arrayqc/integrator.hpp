#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "arrayqc/types.hpp"

namespace arrayqc {

struct Tolerances {
  double rtol = 1e-9;
  double atol = 1e-12;
};

struct RkOptions {
  Tolerances tol;
  double h_initial = 0.0;  // 0: automatic
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;
};

struct RkStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
  double last_h = 0.0;
};

// autonomous right-hand side: dy = f(y)
using RhsFn = std::function<void(const CVec& y, CVec& dy)>;
// called after every accepted step with the new state and its derivative
using StepFn = std::function<void(double t, const CVec& y, const CVec& dy)>;
using SampleFn = std::function<void(double t, const CVec& y)>;

// Dormand-Prince 5(4) with Hairer's dense output. Advances y from t0 to t1 and
// reports interpolated states at `samples` (ascending, inside (t0, t1]).
RkStats dopri5(const RhsFn& f, CVec& y, double t0, double t1, const RkOptions& options,
               const std::vector<double>& samples = {}, const SampleFn& on_sample = {},
               const StepFn& on_step = {});

}  // namespace arrayqc
