#include "arrayqc/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "arrayqc/experiments.hpp"

namespace arrayqc {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

json config_json(const RunConfig& c) {
  json j = json::object();
  for (const auto& [k, v] : c.table.entries()) {
    const auto dot = k.find('.');
    j[k.substr(0, dot)][k.substr(dot + 1)] = v;
  }
  j["experiment"]["seed"] = std::to_string(c.seed);
  j["experiment"]["threads"] = std::to_string(c.threads);
  return j;
}

json envelope(const RunConfig& c, const std::string& kind) {
  return {{"schema_version", kSchemaVersion}, {"kind", kind}, {"config", config_json(c)}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string csv_header(const RunConfig& c) {
  std::ostringstream os;
  os << "# schema_version=" << kSchemaVersion << '\n';
  for (const auto& [k, v] : c.table.entries()) {
    if (k == "experiment.seed") {
      os << "# " << k << '=' << c.seed << '\n';
    } else if (k == "experiment.threads") {
      os << "# " << k << '=' << c.threads << '\n';
    } else {
      os << "# " << k << '=' << v << '\n';
    }
  }
  return os.str();
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx amplitude_from(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError("circuit amplitudes must be numbers or [re, im] pairs");
}

json drives_json(const DriveSettings& d) {
  json arr = json::array();
  for (const auto& x : d)
    arr.push_back({{"Omega", complex_json(x.Omega)},
                   {"Omega_f", complex_json(x.Omega_f)},
                   {"delta_R", x.delta_R},
                   {"delta_dec", x.delta_dec}});
  return arr;
}

json band_json(const Band& b) { return {{"lower", b.lower}, {"upper", b.upper}}; }

}  // namespace

Circuit parse_circuit_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("circuit JSON: ") + e.what());
  }
  try {
    Circuit c;
    c.n_qubits = j.at("n_qubits").get<int>();
    const json& init = j.at("initial");
    if (init.is_string()) {
      c.initial = InitialState::basis(init.get<std::string>());
    } else if (init.is_object()) {
      for (const auto& [bits, amp] : init.items()) c.initial.terms.emplace_back(bits, amplitude_from(amp));
    } else {
      throw ConfigError("circuit JSON: initial must be a bitstring or an amplitude map");
    }
    for (const json& g : j.at("gates")) {
      GateOp op;
      op.kind = parse_gate_kind(g.at("kind").get<std::string>());
      op.targets = g.at("targets").get<std::vector<int>>();
      const json params = g.value("params", json::object());
      if (op.kind == GateKind::RX || op.kind == GateKind::RZ) {
        const double angle = params.at("angle").get<double>();
        // negative RZ angles keep their sign so the Stark detuning can flip
        op.angle = op.kind == GateKind::RZ && angle < 0.0 && angle > -2.0 * kPi ? angle : wrap_angle(angle);
      }
      if (op.kind == GateKind::Decouple && params.contains("method"))
        op.method = parse_decouple_method(params.at("method").get<std::string>());
      c.gates.push_back(std::move(op));
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("circuit JSON: ") + e.what());
  }
}

Circuit read_circuit_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open circuit file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_circuit_json(ss.str());
}

std::string circuit_json(const Circuit& c) {
  json init = json::object();
  for (const auto& [bits, amp] : c.initial.terms) init[bits] = complex_json(amp);
  json gates = json::array();
  for (const auto& g : c.gates) {
    json params = json::object();
    if (g.kind == GateKind::RX || g.kind == GateKind::RZ) params["angle"] = g.angle;
    if (g.method) params["method"] = to_string(*g.method);
    gates.push_back({{"kind", to_string(g.kind)}, {"params", params}, {"targets", g.targets}});
  }
  return dump({{"n_qubits", c.n_qubits}, {"initial", init}, {"gates", gates}});
}

std::string schedule_json(const Schedule& s) {
  json arr = json::array();
  for (const auto& seg : s)
    arr.push_back({{"label", seg.label}, {"duration", seg.duration}, {"drives", drives_json(seg.drives)}});
  return dump(arr);
}

std::string trajectory_csv(const Trajectory& t, const std::vector<std::string>& labels,
                           const RunConfig& c) {
  std::ostringstream os;
  os << csv_header(c) << "time,norm2";
  for (const auto& l : labels) os << ',' << (l.find(',') == std::string::npos ? l : '"' + l + '"');
  os << '\n';
  for (std::size_t k = 0; k < t.size(); ++k) {
    os << format_double(t.time[k]) << ',' << format_double(t.norm2[k]);
    for (Eigen::Index s = 0; s < t.populations[k].size(); ++s)
      os << ',' << format_double(t.populations[k](s));
    os << '\n';
  }
  return os.str();
}

std::string model_json(const ModelResult& r, const RunConfig& c) {
  const auto& m = r.context.model;
  json j = envelope(c, "model");
  json sigma = json::array(), each = json::array();
  for (Eigen::Index i = 0; i < m.Sigma.size(); ++i) {
    sigma.push_back(complex_json(m.Sigma(i)));
    each.push_back(m.Gamma_eff_each(i));
  }
  json g = json::array();
  const CMat ex = m.exchange();
  for (Eigen::Index a = 0; a < ex.rows(); ++a)
    for (Eigen::Index b = a + 1; b < ex.cols(); ++b)
      g.push_back({{"pair", {a, b}}, {"g", complex_json(ex(a, b))}});
  j["result"] = {{"delta_LI", m.delta_LI},
                 {"delta_LI_searched", r.context.search.has_value()},
                 {"Gamma_eff_over_gamma_I", m.worst_Gamma_eff() / m.gamma_I},
                 {"Gamma_eff_each", each},
                 {"Sigma", sigma},
                 {"exchange", g},
                 {"condition_estimate", m.condition},
                 {"band", band_json(r.context.couplings.band)},
                 {"search", {{"lower", r.sweep.search.lower},
                             {"upper", r.sweep.search.upper},
                             {"grid_points", r.sweep.search.grid_points},
                             {"optimum", r.sweep.delta_LI},
                             {"Gamma_eff_over_gamma_I", r.sweep.Gamma_eff / m.gamma_I}}},
                 {"warnings", r.context.couplings.geometry.warnings}};
  return dump(j);
}

std::string model_csv(const ModelResult& r, const RunConfig& c) {
  std::ostringstream os;
  const double gI = r.context.model.gamma_I;
  os << csv_header(c) << "delta_LI,Gamma_eff_over_gamma_I,Re_Sigma,Im_Sigma\n";
  for (const auto& p : r.sweep.grid)
    os << format_double(p.delta_LI) << ',' << format_double(p.Gamma_eff / gI) << ','
       << format_double(p.Sigma(0).real()) << ',' << format_double(p.Sigma(0).imag()) << '\n';
  return os.str();
}

std::string gate_depth_json(const GateDepthResult& r, const RunConfig& c) {
  json j = envelope(c, "gate_depth");
  j["result"] = {{"gate", r.gate},
                 {"angle", r.angle},
                 {"depth", static_cast<int>(r.fidelity.size()) - 1},
                 {"final_fidelity", r.fidelity.back()},
                 {"fidelity", r.fidelity},
                 {"gate_duration", r.gate_duration},
                 {"delta_LI", r.delta_LI},
                 {"Gamma_eff", r.Gamma_eff}};
  if (c.output.wall_time) j["wall_time"] = r.wall_time;
  return dump(j);
}

std::string gate_depth_csv(const GateDepthResult& r, const RunConfig& c) {
  std::ostringstream os;
  os << csv_header(c) << "depth,fidelity,error\n";
  for (std::size_t k = 0; k < r.fidelity.size(); ++k)
    os << k << ',' << format_double(r.fidelity[k]) << ',' << format_double(1.0 - r.fidelity[k]) << '\n';
  return os.str();
}

std::string sweep_json(const SweepResult& r, const RunConfig& c) {
  json j = envelope(c, "iswap_sweep");
  json pts = json::array();
  for (const auto& p : r.points)
    pts.push_back({{"a", p.a},
                   {"distance", p.distance},
                   {"error", p.error},
                   {"fidelity", p.fidelity},
                   {"delta_LI", p.delta_LI},
                   {"Gamma_eff", p.Gamma_eff},
                   {"g", complex_json(p.g)},
                   {"iswap_duration", p.iswap_duration},
                   {"note", p.note}});
  j["result"] = {{"count", r.count}, {"points", pts}};
  if (c.output.wall_time) j["wall_time"] = r.wall_time;
  return dump(j);
}

std::string sweep_csv(const SweepResult& r, const RunConfig& c) {
  std::ostringstream os;
  os << csv_header(c) << "a,distance,error,fidelity,delta_LI,Gamma_eff,Re_g,Im_g,iswap_duration\n";
  for (const auto& p : r.points)
    os << format_double(p.a) << ',' << p.distance << ',' << format_double(p.error) << ','
       << format_double(p.fidelity) << ',' << format_double(p.delta_LI) << ','
       << format_double(p.Gamma_eff) << ',' << format_double(p.g.real()) << ','
       << format_double(p.g.imag()) << ',' << format_double(p.iswap_duration) << '\n';
  return os.str();
}

std::string circuit_result_json(const CircuitReport& r, const RunConfig& c) {
  json j = envelope(c, "circuit");
  json seg = json::array();
  for (const auto& s : r.run.compiled.segments) seg.push_back({{"label", s.label}, {"duration", s.duration}});
  json storage = json::object();
  for (const auto& [q, ph] : r.run.storage_phase) storage[std::to_string(q)] = ph;
  json comp = json::object();
  const int n = r.circuit.n_qubits;
  for (std::size_t i = 0; i < r.computational.size(); ++i) {
    std::string bits(static_cast<std::size_t>(n), '0');
    for (int q = 0; q < n; ++q)
      if ((i >> (n - 1 - q)) & 1) bits[static_cast<std::size_t>(q)] = '1';
    comp[bits] = r.computational[i];
  }
  std::vector<double> max_e(r.max_excited.data(), r.max_excited.data() + r.max_excited.size());
  j["result"] = {{"circuit", r.name},
                 {"fidelity", r.run.fidelity},
                 {"per_gate_fidelities", r.run.per_gate_fidelities},
                 {"gate_end_times", r.run.gate_end_times},
                 {"gates", json::parse(circuit_json(r.circuit))["gates"]},
                 {"segments", seg},
                 {"final_time", r.run.final.time},
                 {"final_norm2", r.run.final.norm2()},
                 {"computational_populations", comp},
                 {"dominant", r.dominant},
                 {"leakage", r.leakage},
                 {"max_excited_population", max_e},
                 {"exchange_sign", r.exchange_sign},
                 {"storage_phase", storage},
                 {"notes", r.run.compiled.notes},
                 {"tier", to_string(c.model.tier)},
                 {"delta_LI", r.delta_LI},
                 {"Gamma_eff", r.Gamma_eff}};
  if (c.output.wall_time) j["wall_time"] = r.run.wall_time;
  return dump(j);
}

std::string disorder_json(const DisorderResult& r, const RunConfig& c) {
  json j = envelope(c, "disorder");
  auto st = [](const Stats& s) {
    return json{{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}};
  };
  j["result"] = {{"sigma_frac", r.sigma_frac},
                 {"samples", r.samples},
                 {"depth", r.depth},
                 {"delta_LI", r.delta_LI},
                 {"seeds", r.seeds},
                 {"x", {{"stats", st(r.x)}, {"fidelity", r.x_fidelity}}},
                 {"z", {{"stats", st(r.z)}, {"fidelity", r.z_fidelity}}}};
  if (c.output.wall_time) j["wall_time"] = r.wall_time;
  return dump(j);
}

std::string disorder_csv(const DisorderResult& r, const RunConfig& c) {
  std::ostringstream os;
  os << csv_header(c) << "sample,seed,x_fidelity,z_fidelity\n";
  for (std::size_t i = 0; i < r.seeds.size(); ++i)
    os << i << ',' << r.seeds[i] << ',' << format_double(r.x_fidelity[i]) << ','
       << format_double(r.z_fidelity[i]) << '\n';
  return os.str();
}

std::string validation_json(const ValidationReport& r, const RunConfig& c) {
  json j = envelope(c, "validate");
  json checks = json::array();
  for (const auto& k : r.checks)
    checks.push_back({{"name", k.name},
                      {"value", k.value},
                      {"threshold", k.threshold},
                      {"pass", k.pass},
                      {"detail", k.detail}});
  j["result"] = {{"pass", r.pass()}, {"checks", checks}};
  return dump(j);
}

std::string write_artifact(const std::string& dir, const std::string& name,
                           const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  const fs::path p = fs::path(dir) / name;
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  f << content;
  if (!f) throw ConfigError("write failed for '" + p.string() + "'");
  return p.string();
}

}  // namespace arrayqc
