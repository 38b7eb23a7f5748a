#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <sstream>
#include <optional>
#include <string>
#include <vector>

#include "arrayqc/experiments.hpp"
#include "arrayqc/io.hpp"

using namespace arrayqc;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2, kValidation = 3 };

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  std::vector<std::string> set;
};

RunConfig resolve(const Globals& g) {
  ConfigTable t = g.config.empty() ? ConfigTable{} : ConfigTable::from_file(g.config);
  for (const auto& s : g.set) t.set(s);
  if (g.seed) t.set("experiment.seed", std::to_string(*g.seed));
  if (g.out_dir) t.set("output.dir", *g.out_dir);
  if (g.threads) t.set("experiment.threads", std::to_string(*g.threads));
  return RunConfig::from_table(t);
}

std::string brief(double x) {
  std::ostringstream os;
  os << std::setprecision(8) << x;
  return os.str();
}

void report(const std::string& path) { std::cerr << "wrote " << path << '\n'; }

int cmd_model(const RunConfig& c) {
  const ModelResult r = run_model(c);
  report(write_artifact(c.output.dir, "model_sweep.csv", model_csv(r, c)));
  report(write_artifact(c.output.dir, "model.json", model_json(r, c)));
  const auto& m = r.context.model;
  std::cout << "delta_LI " << brief(m.delta_LI) << "  Gamma_eff/gamma_I "
            << brief(m.worst_Gamma_eff() / m.gamma_I) << "  band ["
            << brief(r.context.couplings.band.lower) << ", "
            << brief(r.context.couplings.band.upper) << "]\n";
  return kOk;
}

int cmd_gate_depth(const RunConfig& c) {
  const GateDepthResult r = run_gate_depth(c);
  report(write_artifact(c.output.dir, "gate_depth.csv", gate_depth_csv(r, c)));
  report(write_artifact(c.output.dir, "gate_depth.json", gate_depth_json(r, c)));
  std::cout << r.gate << " depth " << r.fidelity.size() - 1 << " fidelity "
            << brief(r.fidelity.back()) << '\n';
  return kOk;
}

int cmd_iswap_sweep(const RunConfig& c) {
  const SweepResult r = run_iswap_sweep(c);
  report(write_artifact(c.output.dir, "iswap_sweep.csv", sweep_csv(r, c)));
  report(write_artifact(c.output.dir, "iswap_sweep.json", sweep_json(r, c)));
  for (const auto& p : r.points)
    std::cout << "a " << p.a << " d " << p.distance << "a  error " << brief(p.error)
              << (p.note.empty() ? "" : "  (" + p.note + ")") << '\n';
  return kOk;
}

int cmd_circuit(const RunConfig& c) {
  const CircuitReport r = run_circuit_experiment(c);
  report(write_artifact(c.output.dir, "circuit.json", circuit_result_json(r, c)));
  report(write_artifact(c.output.dir, "schedule.json", schedule_json(r.run.compiled.segments)));
  if (c.output.trajectory)
    report(write_artifact(c.output.dir, "trajectory.csv", trajectory_csv(r.run.trajectory, r.labels, c)));
  std::cout << r.name << " fidelity " << brief(r.run.fidelity) << "  leakage "
            << brief(r.leakage) << '\n';
  return kOk;
}

int cmd_disorder(const RunConfig& c) {
  const DisorderResult r = run_disorder(c);
  report(write_artifact(c.output.dir, "disorder.csv", disorder_csv(r, c)));
  report(write_artifact(c.output.dir, "disorder.json", disorder_json(r, c)));
  std::cout << "x mean " << brief(r.x.mean) << " std " << brief(r.x.std)
            << "  z mean " << brief(r.z.mean) << " std " << brief(r.z.std) << '\n';
  return kOk;
}

int cmd_validate(const RunConfig& c) {
  const ValidationReport r = run_validate(c);
  report(write_artifact(c.output.dir, "validate.json", validation_json(r, c)));
  for (const auto& k : r.checks)
    std::cout << (k.pass ? "PASS " : "FAIL ") << k.name << "  " << brief(k.value)
              << " (threshold " << brief(k.threshold) << ")  " << k.detail << '\n';
  return r.pass() ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Impurity-qubit simulator for subwavelength atomic arrays"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config,-c", g.config, "INI run config")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Base seed for disorder streams");
  app.add_option("--out-dir,-o", g.out_dir, "Directory for CSV/JSON artifacts");
  app.add_option("--threads,-j", g.threads, "Worker threads for sweeps and Monte Carlo");
  app.add_option("--set", g.set, "Override a config key: section.key=value")->take_all();

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  const std::vector<Sub> subs = {
      {"model", "Gamma_eff sweep over delta_LI and the optimum", cmd_model},
      {"gate-depth", "Fidelity of a gate / inverse train vs depth", cmd_gate_depth},
      {"iswap-sweep", "iSWAP error vs spacing and impurity distance", cmd_iswap_sweep},
      {"circuit", "Run the bell or ghz builder or a circuit JSON file", cmd_circuit},
      {"disorder", "Seeded positional-disorder Monte Carlo", cmd_disorder},
      {"validate", "Oracle and convergence checks", cmd_validate},
  };
  const Sub* chosen = nullptr;
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.help);
    sc->callback([&chosen, &s] { chosen = &s; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }
  try {
    const RunConfig c = resolve(g);
    return chosen->run(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}
