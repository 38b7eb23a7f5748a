#include "arrayqc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace arrayqc {

const std::vector<std::pair<std::string, std::string>>& ConfigTable::schema() {
  static const std::vector<std::pair<std::string, std::string>> s = {
      {"geometry.rows", "10"},
      {"geometry.cols", "10"},
      {"geometry.spacing", "0.1"},
      {"geometry.polarization", "circular"},
      {"geometry.impurities", "4,4;4,5"},
      {"geometry.disorder_sigma", "0"},
      {"geometry.disorder_impurities", "true"},
      {"model.tier", "reduced"},
      {"model.delta_LI", "auto"},
      {"model.gamma_I", "1e-4"},
      {"model.gamma_R", "0"},
      {"model.frequency_reference", "mean"},
      {"model.search_points", "400"},
      {"model.method", "auto"},
      {"model.rtol", "1e-9"},
      {"model.atol", "1e-12"},
      {"model.dense_block_limit", "1400"},
      {"calibration.Omega_x", "auto"},
      {"calibration.Omega_f", "1"},
      {"calibration.delta_R", "200"},
      {"calibration.Omega_pi", "1"},
      {"calibration.delta_dec", "1"},
      {"calibration.Omega_eit", "1"},
      {"calibration.exchange_rate", "effective"},
      {"experiment.gate", "x"},
      {"experiment.angle", "auto"},
      {"experiment.depth", "700"},
      {"experiment.spacings", "0.1,0.05"},
      {"experiment.distances", "1,4"},
      {"experiment.count", "100"},
      {"experiment.circuit", "bell"},
      {"experiment.samples", "20"},
      {"experiment.sigma_frac", "0.01"},
      {"experiment.horizon", "auto"},
      {"experiment.full_double", "true"},
      {"experiment.seed", "0"},
      {"experiment.threads", "1"},
      {"output.dir", "out"},
      {"output.sample_dt", "0"},
      {"output.trajectory", "true"},
      {"output.wall_time", "true"},
  };
  return s;
}

ConfigTable::ConfigTable() {
  for (const auto& [k, v] : schema()) values_[k] = v;
}

void ConfigTable::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second = value;
}

void ConfigTable::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected section.key=value, got '" + assignment + "'");
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

const std::string& ConfigTable::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

ConfigTable ConfigTable::from_string(const std::string& ini) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(ini);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ConfigTable t;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' outside a section");
    for (const auto& [key, value] : body) t.set(section + "." + key, value.data());
  }
  return t;
}

ConfigTable ConfigTable::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return from_string(ss.str());
}

std::string ConfigTable::to_ini() const {
  std::ostringstream os;
  std::string current;
  for (const auto& [k, v] : values_) {
    const auto dot = k.find('.');
    const std::string section = k.substr(0, dot);
    if (section != current) {
      os << (current.empty() ? "" : "\n") << '[' << section << "]\n";
      current = section;
    }
    os << k.substr(dot + 1) << " = " << v << '\n';
  }
  return os.str();
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(x))
    throw ConfigError(key + ": expected a number, got '" + raw + "'");
  return x;
}

long to_int(const std::string& key, const std::string& raw) {
  const double x = to_double(key, raw);
  if (x != std::floor(x)) throw ConfigError(key + ": expected an integer, got '" + raw + "'");
  return static_cast<long>(x);
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + raw + "'");
}

std::vector<std::string> split(const std::string& s, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (seps.find(ch) != std::string::npos) {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

std::optional<double> auto_or_double(const std::string& key, const std::string& raw) {
  if (trim(raw) == "auto") return std::nullopt;
  return to_double(key, raw);
}

Polarization parse_polarization(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "circular") return Polarization::circular();
  if (v == "x") return Polarization::from_vector(CVec3(1, 0, 0));
  if (v == "y") return Polarization::from_vector(CVec3(0, 1, 0));
  if (v == "z") return Polarization::from_vector(CVec3(0, 0, 1));
  throw ConfigError(key + ": polarization must be circular, x, y or z");
}

FrequencyReference parse_reference(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "mean") return FrequencyReference::Mean;
  if (v == "per_impurity") return FrequencyReference::PerImpurity;
  throw ConfigError(key + ": expected mean or per_impurity");
}

}  // namespace

GateCalibration CalibrationOverrides::apply(const ArrayCouplings& couplings,
                                            const EffectiveModel& model) const {
  GateCalibration c = default_calibration(model);
  if (dressed_exchange) c.g_pair = arrayqc::dressed_exchange(couplings, model);
  if (Omega_x) c.Omega_x = *Omega_x;
  c.Omega_f = Omega_f;
  c.delta_R = delta_R;
  c.Omega_pi = Omega_pi;
  c.delta_dec = delta_dec;
  c.Omega_eit = Omega_eit;
  c.validate();
  return c;
}

RunConfig RunConfig::from_table(const ConfigTable& t) {
  RunConfig c;
  c.table = t;
  auto num = [&](const std::string& k) { return to_double(k, t.get(k)); };
  auto integer = [&](const std::string& k) { return to_int(k, t.get(k)); };
  auto flag = [&](const std::string& k) { return to_bool(k, t.get(k)); };

  c.lattice.rows = static_cast<int>(integer("geometry.rows"));
  c.lattice.cols = static_cast<int>(integer("geometry.cols"));
  c.lattice.a = num("geometry.spacing");
  c.lattice.polarization = parse_polarization("geometry.polarization", t.get("geometry.polarization"));
  c.impurities.polarization = c.lattice.polarization;
  for (const auto& p : split(t.get("geometry.impurities"), "; \t")) {
    const auto rc = split(p, ",");
    if (rc.size() != 2) throw ConfigError("geometry.impurities: expected row,col pairs separated by ';'");
    c.impurities.plaquettes.emplace_back(static_cast<int>(to_int("geometry.impurities", rc[0])),
                                         static_cast<int>(to_int("geometry.impurities", rc[1])));
  }
  c.impurities.gamma_I = num("model.gamma_I");
  c.impurities.gamma_R = num("model.gamma_R");

  c.seed = static_cast<std::uint64_t>(integer("experiment.seed"));
  c.threads = static_cast<int>(integer("experiment.threads"));
  if (c.threads < 1) throw ConfigError("experiment.threads must be at least 1");

  const double sigma = num("geometry.disorder_sigma");
  if (sigma < 0.0) throw ConfigError("geometry.disorder_sigma must be non-negative");
  if (sigma > 0.0)
    c.disorder = DisorderSpec{sigma, c.seed, flag("geometry.disorder_impurities")};

  c.model.tier = parse_tier(trim(t.get("model.tier")));
  c.model.delta_LI = auto_or_double("model.delta_LI", t.get("model.delta_LI"));
  c.model.reference = parse_reference("model.frequency_reference", t.get("model.frequency_reference"));
  const long pts = integer("model.search_points");
  if (pts < 3) throw ConfigError("model.search_points must be at least 3");
  c.model.search_points = static_cast<std::size_t>(pts);
  c.model.evolve.method = parse_propagation(trim(t.get("model.method")));
  c.model.evolve.tol.rtol = num("model.rtol");
  c.model.evolve.tol.atol = num("model.atol");
  if (!(c.model.evolve.tol.rtol > 0.0) || !(c.model.evolve.tol.atol > 0.0))
    throw ConfigError("model.rtol and model.atol must be positive");
  const long limit = integer("model.dense_block_limit");
  if (limit < 1) throw ConfigError("model.dense_block_limit must be positive");
  c.model.evolve.dense_block_limit = static_cast<std::size_t>(limit);
  c.model.evolve.sample_dt = num("output.sample_dt");
  if (c.model.evolve.sample_dt < 0.0) throw ConfigError("output.sample_dt must be non-negative");

  c.calibration.Omega_x = auto_or_double("calibration.Omega_x", t.get("calibration.Omega_x"));
  c.calibration.Omega_f = num("calibration.Omega_f");
  c.calibration.delta_R = num("calibration.delta_R");
  c.calibration.Omega_pi = num("calibration.Omega_pi");
  c.calibration.delta_dec = num("calibration.delta_dec");
  c.calibration.Omega_eit = num("calibration.Omega_eit");
  const std::string rate = trim(t.get("calibration.exchange_rate"));
  if (rate != "effective" && rate != "dressed")
    throw ConfigError("calibration.exchange_rate must be effective or dressed");
  c.calibration.dressed_exchange = rate == "dressed";

  auto& e = c.experiment;
  e.gate = trim(t.get("experiment.gate"));
  if (e.gate != "x" && e.gate != "z") throw ConfigError("experiment.gate must be x or z");
  e.angle = auto_or_double("experiment.angle", t.get("experiment.angle")).value_or(0.0);
  e.depth = static_cast<int>(integer("experiment.depth"));
  if (e.depth < 0) throw ConfigError("experiment.depth must be non-negative");
  e.spacings.clear();
  for (const auto& s : split(t.get("experiment.spacings"), ", "))
    e.spacings.push_back(to_double("experiment.spacings", s));
  e.distances.clear();
  for (const auto& s : split(t.get("experiment.distances"), ", "))
    e.distances.push_back(static_cast<int>(to_int("experiment.distances", s)));
  if (e.spacings.empty() || e.distances.empty())
    throw ConfigError("experiment.spacings and experiment.distances must not be empty");
  for (int d : e.distances)
    if (d < 1) throw ConfigError("experiment.distances must be positive");
  e.count = static_cast<int>(integer("experiment.count"));
  if (e.count < 0) throw ConfigError("experiment.count must be non-negative");
  e.circuit = trim(t.get("experiment.circuit"));
  e.samples = static_cast<int>(integer("experiment.samples"));
  if (e.samples < 1) throw ConfigError("experiment.samples must be at least 1");
  e.sigma_frac = num("experiment.sigma_frac");
  if (e.sigma_frac < 0.0) throw ConfigError("experiment.sigma_frac must be non-negative");
  e.horizon = auto_or_double("experiment.horizon", t.get("experiment.horizon")).value_or(0.0);
  if (e.horizon < 0.0) throw ConfigError("experiment.horizon must be non-negative");
  e.full_double = flag("experiment.full_double");

  c.output.dir = trim(t.get("output.dir"));
  c.output.trajectory = flag("output.trajectory");
  c.output.wall_time = flag("output.wall_time");

  c.lattice.validate();
  c.impurities.validate(c.lattice);
  return c;
}

}  // namespace arrayqc
