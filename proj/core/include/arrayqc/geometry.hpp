#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arrayqc/couplings.hpp"

namespace arrayqc {

struct LatticeSpec {
  int rows = 10;
  int cols = 10;
  double a = 0.1;  // lambda_L
  Polarization polarization = Polarization::circular();

  // Throws ConfigError on invalid specs; returns soft warnings.
  std::vector<std::string> validate() const;
};

struct ImpuritySpec {
  std::vector<std::pair<int, int>> plaquettes;  // (row, col), row-major order = qubit order
  double gamma_I = 1e-4;
  double gamma_R = 0.0;
  Polarization polarization = Polarization::circular();

  std::vector<std::string> validate(const LatticeSpec& lattice) const;
};

struct DisorderSpec {
  double sigma_frac = 0.0;  // standard deviation as a fraction of a
  std::uint64_t seed = 0;
  bool disorder_impurities = true;
};

std::vector<Vec3> build_lattice(const LatticeSpec& spec);
std::vector<Vec3> place_impurities(const LatticeSpec& spec, const ImpuritySpec& imp);

// In-plane Gaussian kicks with sigma = sigma_frac * a; z is left untouched.
std::vector<Vec3> apply_disorder(const std::vector<Vec3>& positions, double sigma,
                                 std::uint64_t seed);

struct Geometry {
  LatticeSpec lattice;
  ImpuritySpec impurities;
  std::vector<Vec3> lattice_positions;
  std::vector<Vec3> impurity_positions;
  std::vector<std::string> warnings;

  int n_lattice() const { return static_cast<int>(lattice_positions.size()); }
  int n_impurities() const { return static_cast<int>(impurity_positions.size()); }
  double impurity_distance(int alpha, int beta) const;
};

Geometry make_geometry(const LatticeSpec& lattice, const ImpuritySpec& impurities,
                       const std::optional<DisorderSpec>& disorder = std::nullopt);

// Seed for sample `index` of a stream; prefixes of a stream are stable.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace arrayqc
