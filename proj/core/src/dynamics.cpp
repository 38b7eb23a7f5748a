#include "arrayqc/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace arrayqc {

namespace {

using Triplets = std::vector<Eigen::Triplet<cplx>>;

SparseMat from_triplets(std::size_t n, const Triplets& t) {
  SparseMat m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

void add_lattice_site(std::vector<int>& sites, int j) {
  sites.insert(std::upper_bound(sites.begin(), sites.end(), j), j);
}

}  // namespace

Dynamics::Dynamics(const ArrayCouplings& c, const EffectiveModel& model, Tier tier)
    : basis_(c.n_impurities(), tier, c.n_lattice()), model_(model) {
  const int NI = c.n_impurities();
  if (model.n_impurities() != NI) throw std::invalid_argument("model and couplings disagree on N_I");
  const bool reduced = tier == Tier::Reduced;
  const int NL = basis_.n_lattice();
  const double gI = c.gamma_I();
  const double gR = c.gamma_R();
  const CMat g = reduced ? model.exchange() : [&] {
    CMat p = c.Phi;
    p.diagonal().setZero();
    return p;
  }();
  const double mean_shift = NI ? model.frequency_shift.mean() : 0.0;
  const std::size_t n = basis_.size();

  Triplets h;
  h.reserve(n * 8);
  for (std::size_t i = 0; i < n; ++i) {
    const BasisState& s = basis_[i];
    cplx diag = 0.0;
    for (int a = 0; a < NI; ++a) {
      if (s.impurity[a] == Level::E) {
        diag += cplx(-model.frequency_shift(a), -0.5 * gI);
        if (reduced) diag += model.Sigma(a);
      } else if (s.impurity[a] == Level::R) {
        diag += cplx(0.0, -0.5 * gR);
      }
    }
    diag += static_cast<double>(s.lattice.size()) * cplx(-model.delta_LI - mean_shift, -0.5);
    h.emplace_back(i, i, diag);

    for (int b = 0; b < NI; ++b) {
      if (s.impurity[b] != Level::E) continue;
      for (int a = 0; a < NI; ++a) {
        if (a == b || s.impurity[a] != Level::G || g(a, b) == 0.0) continue;
        BasisState t = s;
        t.impurity[b] = Level::G;
        t.impurity[a] = Level::E;
        if (auto j = basis_.find(t)) h.emplace_back(*j, i, g(a, b));
      }
      if (reduced) continue;
      // e_b -> lattice site, both directions
      for (int site = 0; site < NL; ++site) {
        if (std::binary_search(s.lattice.begin(), s.lattice.end(), site)) continue;
        BasisState t = s;
        t.impurity[b] = Level::G;
        add_lattice_site(t.lattice, site);
        if (auto j = basis_.find(t)) {
          h.emplace_back(*j, i, c.K(site, b));
          h.emplace_back(i, *j, c.K(site, b));
        }
      }
    }
    for (std::size_t k = 0; k < s.lattice.size(); ++k) {
      const int from = s.lattice[k];
      for (int to = 0; to < NL; ++to) {
        if (std::binary_search(s.lattice.begin(), s.lattice.end(), to)) continue;
        BasisState t = s;
        t.lattice.erase(t.lattice.begin() + static_cast<std::ptrdiff_t>(k));
        add_lattice_site(t.lattice, to);
        if (auto j = basis_.find(t)) h.emplace_back(*j, i, c.lattice.m(to, from));
      }
    }
  }
  H0_ = from_triplets(n, h);

  for (int a = 0; a < NI; ++a) {
    Triplets ge, er;
    RVec ne = RVec::Zero(static_cast<Eigen::Index>(n)), nr = ne;
    for (std::size_t i = 0; i < n; ++i) {
      const BasisState& s = basis_[i];
      if (s.impurity[a] == Level::E) ne(i) = 1.0;
      if (s.impurity[a] == Level::R) nr(i) = 1.0;
      if (s.impurity[a] == Level::R) continue;
      BasisState t = s;
      t.impurity[a] = s.impurity[a] == Level::G ? Level::E : Level::R;
      if (auto j = basis_.find(t)) (s.impurity[a] == Level::G ? ge : er).emplace_back(*j, i, 1.0);
    }
    raise_ge_.push_back(from_triplets(n, ge));
    lower_ge_.emplace_back(raise_ge_.back().transpose());
    raise_er_.push_back(from_triplets(n, er));
    lower_er_.emplace_back(raise_er_.back().transpose());
    n_e_.push_back(std::move(ne));
    n_r_.push_back(std::move(nr));
  }
}

SparseMat Dynamics::hamiltonian(const DriveSettings& drives) const {
  const int NI = n_impurities();
  if (!drives.empty() && static_cast<int>(drives.size()) != NI)
    throw std::invalid_argument("drive settings must list every impurity");
  SparseMat H = H0_;
  RVec diag = RVec::Zero(static_cast<Eigen::Index>(dimension()));
  bool any_diag = false;
  for (int a = 0; a < static_cast<int>(drives.size()); ++a) {
    const ImpurityDrive& d = drives[a];
    if (d.Omega != 0.0) H += (-std::conj(d.Omega)) * raise_ge_[a] + (-d.Omega) * lower_ge_[a];
    if (d.Omega_f != 0.0)
      H += (-std::conj(d.Omega_f)) * raise_er_[a] + (-d.Omega_f) * lower_er_[a];
    if (d.delta_dec != 0.0 || d.delta_R != 0.0) {
      diag += d.delta_dec * n_e_[a] - d.delta_R * n_r_[a];
      any_diag = true;
    }
  }
  if (any_diag) {
    Triplets t;
    for (Eigen::Index i = 0; i < diag.size(); ++i)
      if (diag(i) != 0.0) t.emplace_back(i, i, diag(i));
    H += from_triplets(dimension(), t);
  }
  H.makeCompressed();
  return H;
}

CVec Dynamics::rhs(const CVec& psi, const DriveSettings& drives) const {
  return -kI * (hamiltonian(drives) * psi);
}

StateVector Dynamics::basis_state(std::size_t index) const {
  StateVector s{CVec::Zero(static_cast<Eigen::Index>(dimension())), tier(), 0.0};
  s.amplitudes(static_cast<Eigen::Index>(index)) = 1.0;
  return s;
}

std::size_t Dynamics::index_of(const std::vector<Level>& levels) const {
  return basis_.index_of({levels, {}});
}

Observables observables(const StateVector& state, const Basis& basis) {
  Observables o;
  o.populations = state.amplitudes.cwiseAbs2();
  o.norm2 = o.populations.sum();
  const cplx a0 = state.amplitudes.size() ? state.amplitudes(0) : cplx{};
  for (int a = 0; a < basis.n_impurities(); ++a) {
    std::vector<Level> lv(basis.n_impurities(), Level::G);
    lv[a] = Level::E;
    const auto i = basis.find({lv, {}});
    const cplx c = i ? state.amplitudes(static_cast<Eigen::Index>(*i)) : cplx{};
    o.phases.push_back(std::abs(a0) > 0.0 && std::abs(c) > 0.0 ? std::arg(c / a0) : 0.0);
  }
  return o;
}

}  // namespace arrayqc
