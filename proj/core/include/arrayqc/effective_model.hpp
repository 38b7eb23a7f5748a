#pragma once

#include <optional>

#include <Eigen/LU>

#include "arrayqc/couplings.hpp"
#include "arrayqc/geometry.hpp"

namespace arrayqc {

struct Band {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double x) const { return x >= lower && x <= upper; }
};

// Range of Re eig(M) for the lattice coupling matrix.
Band lattice_band(const CouplingMatrix& lattice);

// L = (delta_LI + i/2) I - M, factorized once.
class LatticeResolvent {
 public:
  LatticeResolvent(const CouplingMatrix& lattice, double delta_LI);

  CVec solve(const CVec& rhs) const;
  CMat solve(const CMat& rhs) const;
  const CMat& matrix() const { return L_; }
  double delta_LI() const { return delta_; }
  double condition_estimate() const { return 1.0 / rcond_; }

 private:
  CMat L_;
  Eigen::PartialPivLU<CMat> lu_;
  double delta_;
  double rcond_;
};

LatticeResolvent build_L(const CouplingMatrix& lattice, double delta_LI);

// C_alpha: sqrt(gamma_I) (J_{alpha i} - i/2 Gamma_{alpha i}) over lattice sites i.
CVec build_C(const std::vector<Vec3>& lattice_positions, const Vec3& impurity_position,
             const Polarization& pol_L, const Polarization& pol_I, double gamma_I);

// phi_ab = C_b^T L^{-1} C_a (plain transpose; the couplings are complex-symmetric)
cplx lattice_mediated_coupling(const CVec& C_alpha, const CVec& C_beta,
                               const LatticeResolvent& resolvent);

double effective_decay(cplx Sigma, double gamma_I);

enum class FrequencyReference { Mean, PerImpurity };

// Geometry-level couplings that do not depend on delta_LI.
struct ArrayCouplings {
  Geometry geometry;
  CouplingMatrix lattice;  // lattice-lattice, units of gamma_L
  CMat K;                  // N_L x N_I lattice-impurity couplings (the C vectors as columns)
  CMat Phi;                // impurity-impurity free-space couplings, scaled by gamma_I
  Band band;

  int n_lattice() const { return static_cast<int>(K.rows()); }
  int n_impurities() const { return static_cast<int>(K.cols()); }
  double gamma_I() const { return geometry.impurities.gamma_I; }
  double gamma_R() const { return geometry.impurities.gamma_R; }
};

ArrayCouplings build_couplings(const Geometry& geometry);

struct EffectiveModel {
  CMat Phi;
  CMat phi;
  CVec Sigma;
  double Gamma_eff = 0.0;  // of impurity 0
  RVec Gamma_eff_each;
  double delta_LI = 0.0;
  double gamma_I = 0.0;
  RVec frequency_shift;  // subtracted from each impurity's e-state energy
  FrequencyReference reference = FrequencyReference::Mean;
  double condition = 1.0;

  int n_impurities() const { return static_cast<int>(Sigma.size()); }
  // Phi + phi with zero diagonal: the exchange couplings g_ab.
  CMat exchange() const;
  double worst_Gamma_eff() const { return Gamma_eff_each.size() ? Gamma_eff_each.maxCoeff() : 0.0; }
};

EffectiveModel build_effective_model(const ArrayCouplings& couplings, double delta_LI,
                                     FrequencyReference reference = FrequencyReference::Mean);

// Exchange couplings seen by the explicit-lattice dynamics: for each pair, the
// single-excitation block (two impurities plus lattice) is diagonalized and the
// two impurity-like eigenstates folded back onto the impurity pair. Differs
// from exchange() by the lattice dressing, a relative 1e-4 at a = 0.1.
CMat dressed_exchange(const ArrayCouplings& couplings, const EffectiveModel& model);

struct DetuningSearch {
  double lower = 0.0;
  double upper = 0.0;
  int grid_points = 400;
  double tolerance = 1e-4;
};

// Blue side of the band: (upper edge, upper edge + 2 x band width].
DetuningSearch default_search(const Band& band);

struct GridPoint {
  double delta_LI;
  double Gamma_eff;  // worst impurity
  CVec Sigma;
};

struct OptimalDetuning {
  double delta_LI = 0.0;
  double Gamma_eff = 0.0;  // worst impurity at delta_LI
  Band band;
  DetuningSearch search;
  std::vector<GridPoint> grid;
};

// Minimizes max_alpha Gamma_eff over the window: grid scan then golden section.
OptimalDetuning optimal_detuning(const ArrayCouplings& couplings,
                                 const std::optional<DetuningSearch>& search = std::nullopt);

}  // namespace arrayqc
