#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace arrayqc {

enum class Tier { Reduced, Full, FullDouble, ThreeExcitation };

struct TierLimits {
  int max_excitations;  // impurity e/r plus lattice excitations
  int max_lattice;
};

TierLimits tier_limits(Tier tier);
std::string to_string(Tier tier);
Tier parse_tier(std::string_view name);

enum class Level : std::uint8_t { G = 0, E = 1, R = 2 };

struct BasisState {
  std::vector<Level> impurity;
  std::vector<int> lattice;  // excited lattice sites, ascending

  int impurity_excitations() const;
  int excitations() const { return impurity_excitations() + static_cast<int>(lattice.size()); }
  bool operator==(const BasisState&) const = default;
};

// Ordering: all-ground first, then blocks of 1, 2, (3) excitations. Inside a
// block, fewer lattice excitations first; lattice states are ordered
// impurity-configuration major, site minor.
class Basis {
 public:
  Basis(int n_impurities, Tier tier, int n_lattice = 0);

  std::size_t size() const { return states_.size(); }
  Tier tier() const { return tier_; }
  int n_impurities() const { return n_imp_; }
  int n_lattice() const { return n_lat_; }
  const BasisState& operator[](std::size_t i) const { return states_[i]; }

  std::optional<std::size_t> find(const BasisState& s) const;
  std::size_t index_of(const BasisState& s) const;  // throws if absent
  std::string label(std::size_t i) const;
  std::vector<std::string> labels() const;

  // closed-form count of the enumeration, used as a cross-check
  static std::size_t expected_size(int n_impurities, Tier tier, int n_lattice);

 private:
  std::uint64_t key(const BasisState& s) const;

  int n_imp_;
  int n_lat_;
  Tier tier_;
  std::vector<BasisState> states_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

}  // namespace arrayqc
