#include "arrayqc/basis.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "arrayqc/types.hpp"

namespace arrayqc {

TierLimits tier_limits(Tier tier) {
  switch (tier) {
    case Tier::Reduced: return {2, 0};
    case Tier::Full: return {2, 1};
    case Tier::FullDouble: return {2, 2};
    case Tier::ThreeExcitation: return {3, 1};
  }
  throw std::logic_error("unknown tier");
}

std::string to_string(Tier tier) {
  switch (tier) {
    case Tier::Reduced: return "reduced";
    case Tier::Full: return "full";
    case Tier::FullDouble: return "full_double";
    case Tier::ThreeExcitation: return "three_excitation";
  }
  throw std::logic_error("unknown tier");
}

Tier parse_tier(std::string_view name) {
  if (name == "reduced") return Tier::Reduced;
  if (name == "full") return Tier::Full;
  if (name == "full_double") return Tier::FullDouble;
  if (name == "three_excitation") return Tier::ThreeExcitation;
  throw ConfigError("unknown tier '" + std::string(name) +
                    "' (reduced | full | full_double | three_excitation)");
}

int BasisState::impurity_excitations() const {
  return static_cast<int>(std::count_if(impurity.begin(), impurity.end(),
                                        [](Level l) { return l != Level::G; }));
}

namespace {

std::uint64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

std::uint64_t pow_u(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// impurity configurations with exactly k excited atoms, family-ordered
std::vector<std::vector<Level>> configs(int n, int k) {
  std::vector<std::vector<Level>> out;
  const std::uint64_t total = pow_u(3, n);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::vector<Level> c(n);
    std::uint64_t x = code;
    for (int a = n - 1; a >= 0; --a) {
      c[a] = static_cast<Level>(x % 3);
      x /= 3;
    }
    if (std::count_if(c.begin(), c.end(), [](Level l) { return l != Level::G; }) == k)
      out.push_back(std::move(c));
  }
  auto sort_key = [](const std::vector<Level>& c) {
    std::vector<int> e, r;
    for (std::size_t a = 0; a < c.size(); ++a) {
      if (c[a] == Level::E) e.push_back(static_cast<int>(a));
      if (c[a] == Level::R) r.push_back(static_cast<int>(a));
    }
    return std::make_tuple(r.size(), e, r);
  };
  std::stable_sort(out.begin(), out.end(),
                   [&](const auto& x, const auto& y) { return sort_key(x) < sort_key(y); });
  return out;
}

std::string join(const std::vector<int>& v, char sep = ',') {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? std::string(1, sep) : "") << v[i];
  return os.str();
}

}  // namespace

Basis::Basis(int n_impurities, Tier tier, int n_lattice)
    : n_imp_(n_impurities), n_lat_(n_lattice), tier_(tier) {
  if (n_impurities < 0 || n_impurities > 30) throw ConfigError("impurity count out of range");
  if (n_lattice < 0) throw ConfigError("lattice size must be non-negative");
  const TierLimits lim = tier_limits(tier);
  if (lim.max_lattice == 0) n_lat_ = 0;
  if (tier == Tier::ThreeExcitation && n_impurities < 3)
    throw ConfigError("three_excitation tier needs at least three impurities");

  for (int n = 0; n <= lim.max_excitations; ++n) {
    for (int nl = 0; nl <= std::min(n, lim.max_lattice); ++nl) {
      if (nl > 0 && n_lat_ == 0) continue;
      const auto cfgs = configs(n_imp_, n - nl);
      if (nl == 0) {
        for (const auto& c : cfgs) states_.push_back({c, {}});
      } else if (nl == 1) {
        for (const auto& c : cfgs)
          for (int i = 0; i < n_lat_; ++i) states_.push_back({c, {i}});
      } else {
        for (const auto& c : cfgs)
          for (int i = 0; i < n_lat_; ++i)
            for (int j = i + 1; j < n_lat_; ++j) states_.push_back({c, {i, j}});
      }
    }
  }
  for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(key(states_[i]), i);
}

std::uint64_t Basis::key(const BasisState& s) const {
  std::uint64_t code = 0;
  for (Level l : s.impurity) code = code * 3 + static_cast<std::uint64_t>(l);
  const std::uint64_t m = static_cast<std::uint64_t>(n_lat_) + 1;
  std::uint64_t lat = 0;
  for (int site : s.lattice) lat = lat * m + static_cast<std::uint64_t>(site + 1);
  return code * m * m + lat;
}

std::optional<std::size_t> Basis::find(const BasisState& s) const {
  if (static_cast<int>(s.impurity.size()) != n_imp_ || s.lattice.size() > 2) return std::nullopt;
  for (int site : s.lattice)
    if (site < 0 || site >= n_lat_) return std::nullopt;
  if (s.lattice.size() == 2 && s.lattice[0] >= s.lattice[1]) return std::nullopt;
  auto it = index_.find(key(s));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Basis::index_of(const BasisState& s) const {
  auto i = find(s);
  if (!i) throw std::out_of_range("state not in basis for tier " + to_string(tier_));
  return *i;
}

std::string Basis::label(std::size_t i) const {
  const BasisState& s = states_.at(i);
  std::vector<int> e, r;
  for (int a = 0; a < n_imp_; ++a) {
    if (s.impurity[a] == Level::E) e.push_back(a);
    if (s.impurity[a] == Level::R) r.push_back(a);
  }
  if (s.lattice.empty() && e.empty() && r.empty()) return "AllGround";

  // family letters and index groups; mixed families list the minority first,
  // except lattice-dressed pairs which read RE
  std::string family;
  std::vector<int> first, second;
  if (r.empty() || e.empty()) {
    family = std::string(e.size(), 'E') + std::string(r.size(), 'R');
    first = e.empty() ? r : e;
  } else if (!s.lattice.empty() || r.size() <= e.size()) {
    const bool ties_e = s.lattice.empty() && r.size() == e.size();
    first = ties_e ? e : r;
    second = ties_e ? r : e;
    family = ties_e ? "ER" : "R" + std::string(e.size(), 'E');
  } else {
    family = "E" + std::string(r.size(), 'R');
    first = e;
    second = r;
  }

  std::ostringstream os;
  if (!s.lattice.empty()) {
    os << "Lat" << std::string(s.lattice.size(), 'E');
    if (!family.empty()) os << "_Imp" << family;
    os << '(' << join(s.lattice);
    const std::size_t nimp = e.size() + r.size();
    if (nimp == 1) os << ',' << first[0];
    if (nimp > 1) os << ';' << join(first) << (second.empty() ? "" : ",") << join(second);
    os << ')';
    return os.str();
  }
  os << "Imp" << family << '(';
  if (second.empty())
    os << join(first);
  else if (first.size() + second.size() == 2)
    os << first[0] << ',' << second[0];
  else
    os << join(first) << ';' << join(second);
  os << ')';
  return os.str();
}

std::vector<std::string> Basis::labels() const {
  std::vector<std::string> out;
  out.reserve(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) out.push_back(label(i));
  return out;
}

std::size_t Basis::expected_size(int n_imp, Tier tier, int n_lat) {
  const TierLimits lim = tier_limits(tier);
  if (lim.max_lattice == 0) n_lat = 0;
  // impurity configurations with k excitations: C(n,k) 2^k
  auto imp = [&](int k) { return binom(n_imp, k) * pow_u(2, k); };
  std::size_t total = 0;
  for (int n = 0; n <= lim.max_excitations; ++n)
    for (int nl = 0; nl <= std::min(n, lim.max_lattice); ++nl)
      total += imp(n - nl) * binom(n_lat, nl);
  return total;
}

}  // namespace arrayqc
