#pragma once

#include <vector>

#include "arrayqc/types.hpp"

namespace arrayqc {

struct Polarization {
  CVec3 d;

  // (1, i, 0) / sqrt(2)
  static Polarization circular();
  // Throws unless |v| = 1 within 1e-12.
  static Polarization from_vector(const CVec3& v);
};

// J and Gamma in units of the supplied linewidth. Complex only when the two
// dipoles differ; for identical dipoles the imaginary parts vanish.
struct PairCoupling {
  cplx J;
  cplx Gamma;

  cplx value() const { return J - 0.5 * kI * Gamma; }
};

// Scalar parts of the free-space tensor, G = a I + b rhat rhat^T.
struct GreenScalars {
  cplx a;
  cplx b;
};

GreenScalars green_scalars(double r, double k = kWavenumber);
Eigen::Matrix3cd green_tensor(const Vec3& r, double k = kWavenumber);

PairCoupling pair_coupling(const Vec3& ri, const Vec3& rj, const Polarization& di,
                           const Polarization& dj, double gamma = 1.0);

struct CouplingMatrix {
  CMat m;  // J_ij - (i/2) Gamma_ij off the diagonal, 0 on it
  std::vector<Vec3> positions;

  // Real dissipative matrix: -2 Im m with the diagonal set to gamma.
  RMat gamma_matrix(double gamma = 1.0) const;
  Eigen::Index size() const { return m.rows(); }
};

CouplingMatrix coupling_matrix(const std::vector<Vec3>& positions, const Polarization& dipole,
                               double gamma = 1.0);
CouplingMatrix coupling_matrix(const std::vector<Vec3>& positions,
                               const std::vector<Polarization>& dipoles, double gamma = 1.0);

// rows x cols block of pair couplings between two disjoint emitter sets.
CMat cross_coupling(const std::vector<Vec3>& rows, const Polarization& d_rows,
                    const std::vector<Vec3>& cols, const Polarization& d_cols, double gamma);

}  // namespace arrayqc
