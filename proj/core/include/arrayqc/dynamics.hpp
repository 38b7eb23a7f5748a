#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "arrayqc/basis.hpp"
#include "arrayqc/effective_model.hpp"

namespace arrayqc {

struct ImpurityDrive {
  cplx Omega{};       // g <-> e
  cplx Omega_f{};     // e <-> r
  double delta_R = 0.0;    // two-photon detuning of the e <-> r drive
  double delta_dec = 0.0;  // decoupling shift on e

  bool operator==(const ImpurityDrive&) const = default;
  bool idle() const { return *this == ImpurityDrive{}; }
};

using DriveSettings = std::vector<ImpurityDrive>;

inline DriveSettings no_drives(int n_impurities) {
  return DriveSettings(static_cast<std::size_t>(n_impurities));
}

struct StateVector {
  CVec amplitudes;
  Tier tier = Tier::Reduced;
  double time = 0.0;

  double norm2() const { return amplitudes.squaredNorm(); }
};

using SparseMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

// Non-Hermitian rotating-frame Hamiltonian on a tier basis, d psi/dt = -i H psi.
//   e_alpha:  -i gamma_I/2 - shift_alpha (+ Sigma_alpha in the reduced tier) + delta_dec
//   r_alpha:  -i gamma_R/2 - delta_R
//   E_i:      -delta_LI - i/2 - mean shift
//   hopping:  g_ab between impurities (Phi + phi reduced, Phi otherwise), none for r
//             K_i,alpha between lattice and impurity, M_ij inside the lattice
//   drives:   <e|H|g> = -conj(Omega), <r|H|e> = -conj(Omega_f)
class Dynamics {
 public:
  Dynamics(const ArrayCouplings& couplings, const EffectiveModel& model, Tier tier);

  const Basis& basis() const { return basis_; }
  Tier tier() const { return basis_.tier(); }
  int n_impurities() const { return basis_.n_impurities(); }
  std::size_t dimension() const { return basis_.size(); }
  const EffectiveModel& model() const { return model_; }
  const SparseMat& static_hamiltonian() const { return H0_; }

  SparseMat hamiltonian(const DriveSettings& drives) const;
  CVec rhs(const CVec& psi, const DriveSettings& drives) const;

  StateVector basis_state(std::size_t index) const;
  // bare impurity configuration, no lattice excitation
  std::size_t index_of(const std::vector<Level>& levels) const;

 private:
  Basis basis_;
  EffectiveModel model_;
  SparseMat H0_;
  std::vector<SparseMat> raise_ge_, lower_ge_, raise_er_, lower_er_;
  std::vector<RVec> n_e_, n_r_;
};

struct Observables {
  RVec populations;
  std::vector<double> phases;  // arg(c_alpha / a) for each ImpE(alpha)
  double norm2 = 0.0;
};

Observables observables(const StateVector& state, const Basis& basis);

}  // namespace arrayqc
