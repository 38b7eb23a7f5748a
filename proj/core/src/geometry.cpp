#include "arrayqc/geometry.hpp"

#include <random>
#include <set>
#include <sstream>

namespace arrayqc {

std::vector<std::string> LatticeSpec::validate() const {
  if (rows < 1 || cols < 1) throw ConfigError("lattice needs rows, cols >= 1");
  if (!(a > 0.0)) throw ConfigError("lattice spacing must be positive");
  std::vector<std::string> w;
  if (a >= 1.0) w.emplace_back("lattice spacing a >= lambda_L: not subwavelength");
  return w;
}

std::vector<std::string> ImpuritySpec::validate(const LatticeSpec& lattice) const {
  std::set<std::pair<int, int>> seen;
  for (const auto& [r, c] : plaquettes) {
    if (r < 0 || c < 0 || r >= lattice.rows - 1 || c >= lattice.cols - 1) {
      std::ostringstream os;
      os << "plaquette (" << r << "," << c << ") outside the " << lattice.rows - 1 << "x"
         << lattice.cols - 1 << " plaquette grid";
      throw ConfigError(os.str());
    }
    if (!seen.insert({r, c}).second) {
      std::ostringstream os;
      os << "duplicate plaquette (" << r << "," << c << ")";
      throw ConfigError(os.str());
    }
  }
  if (!(gamma_I >= 0.0)) throw ConfigError("gamma_I must be non-negative");
  if (!(gamma_R >= 0.0)) throw ConfigError("gamma_R must be non-negative");
  std::vector<std::string> w;
  if (gamma_I > 0.1) w.emplace_back("gamma_I > 0.1 gamma_L: Markov approximation questionable");
  return w;
}

std::vector<Vec3> build_lattice(const LatticeSpec& spec) {
  spec.validate();
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(spec.rows) * spec.cols);
  for (int i = 0; i < spec.rows; ++i)
    for (int j = 0; j < spec.cols; ++j) out.emplace_back(i * spec.a, j * spec.a, 0.0);
  return out;
}

std::vector<Vec3> place_impurities(const LatticeSpec& spec, const ImpuritySpec& imp) {
  imp.validate(spec);
  std::vector<Vec3> out;
  for (const auto& [r, c] : imp.plaquettes)
    out.emplace_back((r + 0.5) * spec.a, (c + 0.5) * spec.a, 0.0);
  return out;
}

std::vector<Vec3> apply_disorder(const std::vector<Vec3>& positions, double sigma,
                                 std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ConfigError("disorder sigma must be non-negative");
  std::vector<Vec3> out = positions;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sigma);
  for (auto& p : out) {
    p.x() += n(rng);
    p.y() += n(rng);
  }
  return out;
}

double Geometry::impurity_distance(int alpha, int beta) const {
  return (impurity_positions.at(alpha) - impurity_positions.at(beta)).norm();
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over a combined word
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Geometry make_geometry(const LatticeSpec& lattice, const ImpuritySpec& impurities,
                       const std::optional<DisorderSpec>& disorder) {
  Geometry g{lattice, impurities, build_lattice(lattice), place_impurities(lattice, impurities),
             lattice.validate()};
  for (auto& w : impurities.validate(lattice)) g.warnings.push_back(std::move(w));
  if (disorder && disorder->sigma_frac < 0.0) throw ConfigError("sigma_frac must be non-negative");
  if (disorder && disorder->sigma_frac > 0.0) {
    const double sigma = disorder->sigma_frac * lattice.a;
    g.lattice_positions = apply_disorder(g.lattice_positions, sigma, stream_seed(disorder->seed, 0));
    if (disorder->disorder_impurities)
      g.impurity_positions =
          apply_disorder(g.impurity_positions, sigma, stream_seed(disorder->seed, 1));
  }
  return g;
}

}  // namespace arrayqc
