#include "arrayqc/effective_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace arrayqc {

Band lattice_band(const CouplingMatrix& lattice) {
  if (lattice.size() == 0) return {};
  Eigen::ComplexEigenSolver<CMat> es(lattice.m, false);
  if (es.info() != Eigen::Success) throw NumericalError("lattice eigensolve failed");
  const RVec re = es.eigenvalues().real();
  return {re.minCoeff(), re.maxCoeff()};
}

LatticeResolvent::LatticeResolvent(const CouplingMatrix& lattice, double delta_LI)
    : L_(-lattice.m), delta_(delta_LI) {
  L_.diagonal().array() += cplx(delta_LI, 0.5);
  lu_.compute(L_);
  rcond_ = lu_.rcond();
  if (!(rcond_ > 1e-14)) {
    std::ostringstream os;
    os.precision(17);
    os << "singular lattice resolvent at delta_LI = " << delta_LI
       << " (condition estimate " << 1.0 / rcond_ << ")";
    throw NumericalError(os.str());
  }
}

CVec LatticeResolvent::solve(const CVec& rhs) const { return lu_.solve(rhs); }
CMat LatticeResolvent::solve(const CMat& rhs) const { return lu_.solve(rhs); }

LatticeResolvent build_L(const CouplingMatrix& lattice, double delta_LI) {
  return LatticeResolvent(lattice, delta_LI);
}

CVec build_C(const std::vector<Vec3>& lattice_positions, const Vec3& impurity_position,
             const Polarization& pol_L, const Polarization& pol_I, double gamma_I) {
  return cross_coupling(lattice_positions, pol_L, {impurity_position}, pol_I, std::sqrt(gamma_I))
      .col(0);
}

cplx lattice_mediated_coupling(const CVec& C_alpha, const CVec& C_beta,
                               const LatticeResolvent& resolvent) {
  return C_beta.transpose() * resolvent.solve(C_alpha);
}

double effective_decay(cplx Sigma, double gamma_I) { return gamma_I - 2.0 * Sigma.imag(); }

CMat EffectiveModel::exchange() const {
  CMat g = Phi + phi;
  g.diagonal().setZero();
  return g;
}

CMat dressed_exchange(const ArrayCouplings& c, const EffectiveModel& m) {
  const int NI = c.n_impurities(), NL = c.n_lattice();
  const double gI = c.gamma_I();
  const double mean_shift = NI ? m.frequency_shift.mean() : 0.0;
  CMat g = CMat::Zero(NI, NI);
  for (int a = 0; a < NI; ++a)
    for (int b = a + 1; b < NI; ++b) {
      const int idx[2] = {a, b};
      CMat H = CMat::Zero(NL + 2, NL + 2);
      for (int k = 0; k < 2; ++k) {
        H(k, k) = cplx(-m.frequency_shift(idx[k]), -0.5 * gI);
        H.block(2, k, NL, 1) = c.K.col(idx[k]);
        H.block(k, 2, 1, NL) = c.K.col(idx[k]).transpose();
      }
      H(0, 1) = m.Phi(a, b);
      H(1, 0) = m.Phi(b, a);
      H.block(2, 2, NL, NL) = c.lattice.m;
      H.block(2, 2, NL, NL).diagonal().array() += cplx(-m.delta_LI - mean_shift, -0.5);
      Eigen::ComplexEigenSolver<CMat> es(H);
      if (es.info() != Eigen::Success) throw NumericalError("dressed exchange: eigensolver failed");
      // two eigenvectors with the most weight on the impurity pair
      RVec w = es.eigenvectors().topRows(2).cwiseAbs2().colwise().sum().transpose();
      Eigen::Index i0 = 0, i1 = 0;
      w.maxCoeff(&i0);
      w(i0) = -1.0;
      w.maxCoeff(&i1);
      Eigen::Matrix2cd P;
      P << es.eigenvectors()(0, i0), es.eigenvectors()(0, i1), es.eigenvectors()(1, i0),
          es.eigenvectors()(1, i1);
      const Eigen::Matrix2cd D = Eigen::Vector2cd(es.eigenvalues()(i0), es.eigenvalues()(i1)).asDiagonal();
      const Eigen::Matrix2cd Heff = P * D * P.inverse();
      g(a, b) = g(b, a) = 0.5 * (Heff(0, 1) + Heff(1, 0));
    }
  return g;
}

ArrayCouplings build_couplings(const Geometry& geometry) {
  const auto& pl = geometry.lattice.polarization;
  const auto& pi = geometry.impurities.polarization;
  const double gI = geometry.impurities.gamma_I;
  ArrayCouplings c{geometry,
                   coupling_matrix(geometry.lattice_positions, pl, 1.0),
                   cross_coupling(geometry.lattice_positions, pl, geometry.impurity_positions, pi,
                                  std::sqrt(gI)),
                   coupling_matrix(geometry.impurity_positions, pi, gI).m,
                   {}};
  c.band = lattice_band(c.lattice);
  return c;
}

namespace {

// phi = K^T L^{-1} K for all impurity pairs at once
CMat mediated(const ArrayCouplings& c, const LatticeResolvent& L) {
  if (c.K.cols() == 0 || c.K.rows() == 0) return CMat::Zero(c.K.cols(), c.K.cols());
  return c.K.transpose() * L.solve(c.K);
}

double worst_decay(const ArrayCouplings& c, double delta, CVec* sigma_out) {
  const LatticeResolvent L(c.lattice, delta);
  const CVec sigma = mediated(c, L).diagonal();
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < sigma.size(); ++a)
    worst = std::max(worst, effective_decay(sigma(a), c.gamma_I()));
  if (sigma_out) *sigma_out = sigma;
  return worst;
}

}  // namespace

EffectiveModel build_effective_model(const ArrayCouplings& c, double delta_LI,
                                     FrequencyReference reference) {
  const LatticeResolvent L(c.lattice, delta_LI);
  EffectiveModel m;
  m.Phi = c.Phi;
  m.phi = mediated(c, L);
  m.Sigma = m.phi.diagonal();
  m.gamma_I = c.gamma_I();
  m.delta_LI = delta_LI;
  m.reference = reference;
  m.condition = L.condition_estimate();
  const auto n = m.Sigma.size();
  m.Gamma_eff_each.resize(n);
  for (Eigen::Index a = 0; a < n; ++a) m.Gamma_eff_each(a) = effective_decay(m.Sigma(a), m.gamma_I);
  m.Gamma_eff = n ? m.Gamma_eff_each(0) : m.gamma_I;
  m.frequency_shift = RVec::Zero(n);
  if (n) {
    if (reference == FrequencyReference::Mean)
      m.frequency_shift.setConstant(m.Sigma.real().mean());
    else
      m.frequency_shift = m.Sigma.real();
  }
  return m;
}

DetuningSearch default_search(const Band& band) {
  const double width = std::max(band.upper - band.lower, 1e-3);
  return {band.upper + 1e-6 * width, band.upper + 2.0 * width, 400, 1e-4};
}

OptimalDetuning optimal_detuning(const ArrayCouplings& c,
                                 const std::optional<DetuningSearch>& search) {
  OptimalDetuning out;
  out.band = c.band;
  out.search = search.value_or(default_search(c.band));
  const auto& s = out.search;
  if (c.n_impurities() == 0) throw ConfigError("detuning search needs at least one impurity");
  if (!(s.upper > s.lower) || s.grid_points < 3)
    throw ConfigError("detuning search needs upper > lower and at least 3 grid points");

  const double step = (s.upper - s.lower) / (s.grid_points - 1);
  std::size_t best = 0;
  for (int i = 0; i < s.grid_points; ++i) {
    GridPoint p;
    p.delta_LI = s.lower + i * step;
    try {
      p.Gamma_eff = worst_decay(c, p.delta_LI, &p.Sigma);
    } catch (const NumericalError&) {
      p.Gamma_eff = std::numeric_limits<double>::infinity();
    }
    out.grid.push_back(p);
    if (p.Gamma_eff < out.grid[best].Gamma_eff) best = out.grid.size() - 1;
  }

  // golden section inside the neighbouring grid cells
  double lo = out.grid[best == 0 ? 0 : best - 1].delta_LI;
  double hi = out.grid[std::min<std::size_t>(best + 1, out.grid.size() - 1)].delta_LI;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double x) {
    try {
      return worst_decay(c, x, nullptr);
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > s.tolerance) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = f(x2);
    }
  }
  const double mid = 0.5 * (lo + hi);
  const double fm = f(mid);
  out.delta_LI = mid;
  out.Gamma_eff = fm;
  // never worse than the grid
  if (out.grid[best].Gamma_eff < fm) {
    out.delta_LI = out.grid[best].delta_LI;
    out.Gamma_eff = out.grid[best].Gamma_eff;
  }
  if (!(out.Gamma_eff < c.gamma_I())) throw NumericalError("no subradiant window");
  return out;
}

}  // namespace arrayqc
