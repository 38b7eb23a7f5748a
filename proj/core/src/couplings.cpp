#include "arrayqc/couplings.hpp"

#include <cmath>
#include <sstream>

namespace arrayqc {

namespace {

constexpr double kCoincident = 1e-12;
constexpr char kCoincidentMsg[] = "coincident points; use linewidth normalization instead";

// d_i^dagger (alpha I + beta rhat rhat^T) d_j
cplx project(const CVec3& di, const CVec3& dj, const Vec3& rhat, cplx alpha, cplx beta) {
  const cplx dd = di.dot(dj);  // Eigen's dot conjugates the first argument
  const cplx dr = di.dot(rhat.cast<cplx>());
  const cplx rd = rhat.cast<cplx>().transpose() * dj;
  return alpha * dd + beta * dr * rd;
}

PairCoupling coupling_from_scalars(const GreenScalars& g, const CVec3& di, const CVec3& dj,
                                   const Vec3& rhat, double gamma) {
  const double pre = 3.0 * kPi * gamma / kWavenumber;
  const cplx re = project(di, dj, rhat, g.a.real(), g.b.real());
  const cplx im = project(di, dj, rhat, g.a.imag(), g.b.imag());
  return {-pre * re, 2.0 * pre * im};
}

}  // namespace

Polarization Polarization::circular() {
  return {CVec3(cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(0.0, 0.0)) / std::sqrt(2.0)};
}

Polarization Polarization::from_vector(const CVec3& v) {
  if (std::abs(v.squaredNorm() - 1.0) > 1e-12)
    throw ConfigError("polarization must have unit norm");
  return {v};
}

GreenScalars green_scalars(double r, double k) {
  if (!(r > kCoincident)) throw std::invalid_argument(kCoincidentMsg);
  const double x = k * r;
  const cplx phase = std::polar(1.0 / (4.0 * kPi * r), x);
  const cplx A = 1.0 + kI / x - 1.0 / (x * x);
  const cplx B = -1.0 - 3.0 * kI / x + 3.0 / (x * x);
  GreenScalars g{phase * A, phase * B};
  if (x < 1e-3) {
    // Im parts lose digits to cancellation here; use the series instead.
    const double x2 = x * x;
    const double s = k / (4.0 * kPi);
    g.a.imag(s * (2.0 / 3.0 - 2.0 * x2 / 15.0 + x2 * x2 / 140.0));
    g.b.imag(s * (x2 / 15.0 - x2 * x2 / 210.0));
  }
  return g;
}

Eigen::Matrix3cd green_tensor(const Vec3& r, double k) {
  const double n = r.norm();
  const GreenScalars g = green_scalars(n, k);
  const Vec3 rhat = r / n;
  return g.a * Eigen::Matrix3cd::Identity() + g.b * (rhat * rhat.transpose()).cast<cplx>();
}

PairCoupling pair_coupling(const Vec3& ri, const Vec3& rj, const Polarization& di,
                           const Polarization& dj, double gamma) {
  const Vec3 r = ri - rj;
  const double n = r.norm();
  if (!(n > kCoincident)) throw std::invalid_argument(kCoincidentMsg);
  return coupling_from_scalars(green_scalars(n), di.d, dj.d, r / n, gamma);
}

RMat CouplingMatrix::gamma_matrix(double gamma) const {
  RMat g = -2.0 * m.imag();
  g.diagonal().setConstant(gamma);
  return g;
}

CouplingMatrix coupling_matrix(const std::vector<Vec3>& positions, const Polarization& dipole,
                               double gamma) {
  return coupling_matrix(positions, std::vector<Polarization>(positions.size(), dipole), gamma);
}

CouplingMatrix coupling_matrix(const std::vector<Vec3>& positions,
                               const std::vector<Polarization>& dipoles, double gamma) {
  if (dipoles.size() != positions.size())
    throw std::invalid_argument("one dipole per position required");
  const auto n = static_cast<Eigen::Index>(positions.size());
  CouplingMatrix out{CMat::Zero(n, n), positions};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Vec3 r = positions[i] - positions[j];
      const double d = r.norm();
      if (!(d > kCoincident)) {
        std::ostringstream os;
        os << "duplicate positions at indices " << i << " and " << j;
        throw std::invalid_argument(os.str());
      }
      const GreenScalars g = green_scalars(d);
      out.m(i, j) = coupling_from_scalars(g, dipoles[i].d, dipoles[j].d, r / d, gamma).value();
      out.m(j, i) = coupling_from_scalars(g, dipoles[j].d, dipoles[i].d, -r / d, gamma).value();
    }
  }
  return out;
}

CMat cross_coupling(const std::vector<Vec3>& rows, const Polarization& d_rows,
                    const std::vector<Vec3>& cols, const Polarization& d_cols, double gamma) {
  CMat out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(i, j) = pair_coupling(rows[i], cols[j], d_rows, d_cols, gamma).value();
  return out;
}

}  // namespace arrayqc
