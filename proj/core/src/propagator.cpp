#include "arrayqc/propagator.hpp"

#include <cmath>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

namespace arrayqc {

std::string to_string(Propagation p) {
  switch (p) {
    case Propagation::Auto: return "auto";
    case Propagation::RungeKutta: return "rk";
    case Propagation::Exponential: return "expm";
    case Propagation::Taylor: return "taylor";
  }
  return "auto";
}

Propagation parse_propagation(std::string_view name) {
  if (name == "auto") return Propagation::Auto;
  if (name == "rk") return Propagation::RungeKutta;
  if (name == "expm") return Propagation::Exponential;
  if (name == "taylor") return Propagation::Taylor;
  throw ConfigError("unknown propagation method '" + std::string(name) +
                    "' (auto | rk | expm | taylor)");
}

void Trajectory::record(double t, const CVec& amplitudes) {
  time.push_back(t);
  RVec p = amplitudes.cwiseAbs2();
  norm2.push_back(p.sum());
  populations.push_back(std::move(p));
}

CVec expmv(const SparseMat& H, double t, const CVec& v) {
  if (t == 0.0 || v.size() == 0) return v;
  const Eigen::Index n = H.rows();
  const cplx mu = -kI * t * (H.diagonal().sum() / static_cast<double>(n));

  // 1-norm of A - mu I, A = -i t H
  RVec col = RVec::Constant(n, std::abs(mu));
  for (Eigen::Index r = 0; r < H.outerSize(); ++r)
    for (SparseMat::InnerIterator it(H, r); it; ++it) {
      if (it.row() == it.col()) {
        col(it.col()) += std::abs(-kI * t * it.value() - mu) - std::abs(mu);
      } else {
        col(it.col()) += std::abs(t * it.value());
      }
    }
  const double nrm = col.maxCoeff();

  constexpr double u = 1.1102230246251565e-16;
  int best_m = 10;
  long long best_s = 1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int m = 10; m <= 55; m += 5) {
    // forward bound: theta^(m+1)/(m+1)! <= u
    const double theta = 0.9 * std::exp((std::log(u) + std::lgamma(m + 2.0)) / (m + 1.0));
    const long long s = std::max<long long>(1, static_cast<long long>(std::ceil(nrm / theta)));
    const double cost = static_cast<double>(m) * static_cast<double>(s);
    if (cost < best_cost) {
      best_cost = cost;
      best_m = m;
      best_s = s;
    }
  }

  CVec F = v, b = v;
  const cplx eta = std::exp(mu / static_cast<double>(best_s));
  for (long long i = 0; i < best_s; ++i) {
    double c1 = b.lpNorm<Eigen::Infinity>();
    for (int j = 1; j <= best_m; ++j) {
      const double scale = 1.0 / (static_cast<double>(best_s) * j);
      b = (-kI * t * scale) * (H * b) - (mu * scale) * b;
      const double c2 = b.lpNorm<Eigen::Infinity>();
      F += b;
      if (c1 + c2 <= u * F.lpNorm<Eigen::Infinity>()) break;
      c1 = c2;
    }
    F *= eta;
    b = F;
  }
  return F;
}

std::vector<std::vector<Eigen::Index>> connected_blocks(const SparseMat& H) {
  const Eigen::Index n = H.rows();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Eigen::Index r = 0; r < H.outerSize(); ++r)
    for (SparseMat::InnerIterator it(H, r); it; ++it) {
      if (it.value() == 0.0) continue;
      const auto a = find(it.row()), b = find(it.col());
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::vector<Eigen::Index>> blocks;
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Eigen::Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[root]].push_back(i);
  }
  return blocks;
}

Evolver::Evolver(const Dynamics& dynamics, EvolveOptions options)
    : dyn_(&dynamics), opt_(std::move(options)) {
  if (!(opt_.tol.rtol > 0.0) || !(opt_.tol.atol > 0.0))
    throw ConfigError("integrator tolerances must be positive");
  if (opt_.sample_dt < 0.0) throw ConfigError("sample_dt must be non-negative");
}

Evolver::Generator& Evolver::generator(const DriveSettings& drives) {
  DriveSettings key = drives.empty() ? no_drives(dyn_->n_impurities()) : drives;
  for (auto& g : gens_)
    if (g.drives == key) return g;
  if (gens_.size() >= 64) {
    gens_.clear();
    cached_bytes_ = 0;
  }
  Generator g;
  g.drives = key;
  g.H = dyn_->hamiltonian(key);
  g.blocks = connected_blocks(g.H);
  for (const auto& b : g.blocks) g.largest = std::max(g.largest, b.size());
  gens_.push_back(std::move(g));
  return gens_.back();
}

Propagation Evolver::method_for(const DriveSettings& drives) {
  if (opt_.method != Propagation::Auto) return opt_.method;
  return generator(drives).largest <= opt_.dense_block_limit ? Propagation::Exponential
                                                             : Propagation::Taylor;
}

const Evolver::Propagator& Evolver::propagator(Generator& g, double tau) {
  for (const auto& p : g.cache)
    if (p.tau == tau) return p;
  std::size_t bytes = 0;
  for (const auto& b : g.blocks) bytes += b.size() * b.size() * sizeof(cplx);
  if (cached_bytes_ + bytes > opt_.cache_bytes) {
    for (auto& other : gens_) other.cache.clear();
    cached_bytes_ = 0;
  }
  Propagator p{tau, {}};
  p.U.reserve(g.blocks.size());
  std::vector<Eigen::Index> local(static_cast<std::size_t>(g.H.rows()), -1);
  for (const auto& b : g.blocks) {
    const auto m = static_cast<Eigen::Index>(b.size());
    for (Eigen::Index k = 0; k < m; ++k) local[b[k]] = k;
    CMat Hb = CMat::Zero(m, m);
    for (Eigen::Index k = 0; k < m; ++k)
      for (SparseMat::InnerIterator it(g.H, b[k]); it; ++it) Hb(k, local[it.col()]) = it.value();
    if (m == 1) {
      p.U.push_back(CMat::Constant(1, 1, std::exp(-kI * tau * Hb(0, 0))));
    } else {
      CMat A = (-kI * tau) * Hb;
      p.U.push_back(A.exp());
    }
  }
  ++stats_.dense_builds;
  cached_bytes_ += bytes;
  g.cache.push_back(std::move(p));
  return g.cache.back();
}

void Evolver::apply(const Generator& g, const Propagator& p, CVec& psi) {
  for (std::size_t k = 0; k < g.blocks.size(); ++k) {
    const auto& b = g.blocks[k];
    if (b.size() == 1) {
      psi(b[0]) *= p.U[k](0, 0);
      continue;
    }
    CVec x(static_cast<Eigen::Index>(b.size()));
    for (std::size_t i = 0; i < b.size(); ++i) x(static_cast<Eigen::Index>(i)) = psi(b[i]);
    const CVec y = p.U[k] * x;
    for (std::size_t i = 0; i < b.size(); ++i) psi(b[i]) = y(static_cast<Eigen::Index>(i));
  }
}

void Evolver::evolve(StateVector& state, const DriveSettings& drives, double duration,
                     Trajectory* traj) {
  if (!(duration >= 0.0)) throw std::invalid_argument("duration must be non-negative");
  if (state.amplitudes.size() != static_cast<Eigen::Index>(dyn_->dimension()))
    throw std::invalid_argument("state does not match the dynamics basis");
  if (duration == 0.0) return;

  const Propagation method = method_for(drives);
  Generator& g = generator(drives);
  const double t0 = state.time;

  // sample offsets inside the segment: k * dt, then the end
  std::vector<double> offsets;
  if (traj && opt_.sample_dt > 0.0) {
    const double dt = opt_.sample_dt;
    for (std::size_t k = 1; k * dt < duration * (1.0 - 1e-12); ++k) offsets.push_back(k * dt);
  }

  switch (method) {
    case Propagation::RungeKutta: {
      const SparseMat& H = g.H;
      RhsFn f = [&H](const CVec& y, CVec& dy) { dy.noalias() = -kI * (H * y); };
      std::vector<double> samples;
      for (double o : offsets) samples.push_back(t0 + o);
      RkOptions ro;
      ro.tol = opt_.tol;
      ro.h_initial = g.h_hint;
      SampleFn on_sample;
      if (traj) on_sample = [traj](double t, const CVec& y) { traj->record(t, y); };
      const RkStats st =
          dopri5(f, state.amplitudes, t0, t0 + duration, ro, samples, on_sample, opt_.on_step);
      g.h_hint = st.last_h;
      stats_.rk_steps += st.accepted;
      stats_.rk_rejected += st.rejected;
      break;
    }
    case Propagation::Exponential:
    case Propagation::Taylor: {
      // equal sub-steps share one cached propagator
      const double dt = opt_.sample_dt;
      auto advance = [&](double step) {
        if (method == Propagation::Exponential) {
          apply(g, propagator(g, step), state.amplitudes);
        } else {
          state.amplitudes = expmv(g.H, step, state.amplitudes);
          ++stats_.taylor_calls;
        }
      };
      for (std::size_t k = 0; k < offsets.size(); ++k) {
        advance(dt);
        traj->record(t0 + offsets[k], state.amplitudes);
      }
      advance(duration - static_cast<double>(offsets.size()) * dt);
      break;
    }
    case Propagation::Auto: break;
  }
  state.time = t0 + duration;
  if (traj) traj->record(state.time, state.amplitudes);
}

}  // namespace arrayqc
