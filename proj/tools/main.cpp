// gdnls: command-line front end for the solitary-wave lab.

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gdnls/experiment.hpp"

using namespace gdnls;

namespace {

enum Exit { kOk = 0, kConfig = 2, kIdentity = 3, kSolver = 4 };

// Flag values as typed; turned into a flat JSON object and applied over the
// config file so flags win.
struct Flags {
  std::string config;
  std::map<std::string, std::string> values;
  std::vector<double> delta1_list;
  unsigned workers = 0;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "flat JSON config file");
  const std::pair<const char*, const char*> keys[] = {
      {"sigma", "nonlinearity power sigma"},
      {"omega", "frequency omega"},
      {"c", "speed c, or \"critical\""},
      {"L", "half box length, or \"auto\""},
      {"N", "grid points (power of two)"},
      {"dx", "largest spacing when L is enlarged, or \"auto\""},
      {"dt", "time step, or \"auto\""},
      {"T", "final time"},
      {"delta1", "size of the perturbation"},
      {"R", "cutoff radius, or \"auto\""},
      {"record_every", "steps between records"},
      {"tube", "tube radius as a fraction of ||phi||_H1"},
      {"seed", "seed for randomized checks"},
      {"output_dir", "directory for output files"},
      {"format", "csv or json"},
  };
  for (const auto& [key, help] : keys) {
    std::string flag = std::string("--") + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    cmd->add_option_function<std::string>(
        flag, [&f, k = std::string(key)](const std::string& v) { f.values[k] = v; }, help);
  }
  cmd->add_option("-o", f.values["output_dir"], "same as --output-dir");
  cmd->add_option("--delta1-list", f.delta1_list, "comma separated delta1 values")->delimiter(',');
}

nlohmann::json flag_value(const std::string& key, const std::string& v) {
  if (key == "output_dir" || key == "format") return v;
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  return v;
}

ExperimentConfig build_config(const Flags& f) {
  ExperimentConfig cfg;
  if (!f.config.empty()) cfg = load_config(f.config, cfg);
  nlohmann::json obj = nlohmann::json::object();
  for (const auto& [k, v] : f.values)
    if (!v.empty()) obj[k] = flag_value(k, v);
  if (!f.delta1_list.empty()) obj["delta1_list"] = f.delta1_list;
  apply_config(obj, cfg);
  return cfg;
}

void print_checks(const std::vector<IdentityCheck>& checks) {
  for (const auto& c : checks)
    std::cout << (c.pass() ? "  pass  " : "  FAIL  ") << c.name << "  error " << c.error
              << " (tol " << c.tol << ")\n";
}

int cmd_soliton(const ExperimentConfig& cfg) {
  const ResolvedConfig rc = resolve(cfg);
  const OrderedJson man = manifest(rc, "soliton");
  const SolitonReport rep = run_soliton(rc);
  write_manifest(rc.output_dir, man);
  write_table(rep.profile, rc.output_dir, "profile", rc.format, man);
  Table cons{{"M", "P", "E", "J", "S"}, {}};
  const ConservedSet& q = rep.conserved;
  cons.add({q.M, q.P, q.E, q.J, q.E + rc.omega * q.M + rc.c * q.P});
  write_table(cons, rc.output_dir, "conserved", rc.format, man);
  write_table(identity_table(rep.identities, "soliton"), rc.output_dir, "identities", rc.format, man);
  std::cout << "soliton sigma=" << rc.sigma << " omega=" << rc.omega << " c=" << rc.c << " N=" << rc.N
            << "\n  M=" << q.M << " P=" << q.P << " E=" << q.E << " J=" << q.J << '\n';
  print_checks(rep.identities);
  const bool ok = all_pass(rep.identities);
  std::cout << (ok ? "all identities pass" : "identity failure") << '\n';
  return ok ? kOk : kIdentity;
}

int cmd_critical(const ExperimentConfig& cfg) {
  if (!(cfg.omega > 0.0)) throw ConfigError("omega must be positive");
  ExperimentConfig shape = cfg;  // validate the shared fields only
  shape.sigma = 1.5;
  shape.c = 0.0;
  ResolvedConfig rc = resolve(shape);
  rc.sigma = cfg.sigma;
  rc.c = 0.0;
  const CriticalReport rep = run_critical(cfg.sigma, cfg.omega, cfg.N);
  if (rep.data) {
    rc.c = rep.data->c_crit;
    rc.c_critical = true;
    rc.z0 = rep.data->z0;
  }
  OrderedJson man = manifest(rc, "critical");
  man["classification"] = rep.classification;
  man["skipped"] = rep.skipped;
  write_manifest(rc.output_dir, man);
  std::cout << "critical sigma=" << cfg.sigma << " omega=" << cfg.omega << "\n  "
            << rep.classification << '\n';
  if (rep.skipped) return kOk;

  const CriticalData& cd = *rep.data;
  Table data{{"name", "value"}, {}};
  const std::pair<const char*, double> entries[] = {
      {"z0", cd.z0},           {"c_crit", cd.c_crit},   {"a0", cd.a0},
      {"mu", cd.mu},           {"nu", cd.nu},           {"mu_over_nu", cd.mu / cd.nu},
      {"M", cd.M},             {"P", cd.P},             {"kappa0_from_M", cd.kappa0_from_M},
      {"kappa0_from_P", cd.kappa0_from_P},              {"kappa0", cd.kappa0},
      {"b1", cd.b1},           {"b2", cd.b2},           {"F_at_z0", rep.F_at_z0},
      {"negative_eigenvalues", rep.negative},           {"near_zero_modes", rep.near_zero},
      {"coercivity", rep.coercivity}};
  for (const auto& [k, v] : entries) data.add({k, v});
  write_table(data, rc.output_dir, "critical", rc.format, man);
  Table eig{{"index", "eigenvalue"}, {}};
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) eig.add({i, rep.eigenvalues[i]});
  write_table(eig, rc.output_dir, "spectrum", rc.format, man);
  write_table(identity_table(rep.checks, "critical"), rc.output_dir, "checks", rc.format, man);
  std::cout << "  z0=" << cd.z0 << " c_crit=" << cd.c_crit << " mu/nu=" << cd.mu / cd.nu
            << " kappa0=" << cd.kappa0 << " b1=" << cd.b1 << " b2=" << cd.b2
            << " negative eigenvalues=" << rep.negative << '\n';
  print_checks(rep.checks);
  return all_pass(rep.checks) ? kOk : kIdentity;
}

int cmd_evolve(const ExperimentConfig& cfg) {
  const ResolvedConfig rc = resolve(cfg);
  std::cout << "evolve sigma=" << rc.sigma << " omega=" << rc.omega << " c=" << rc.c
            << " delta1=" << rc.delta1 << " L=" << rc.L << " N=" << rc.N << " R=" << rc.R
            << " T=" << rc.T << std::endl;
  const EvolveOutcome out = run_evolve(rc, true, "evolve");
  std::cout << "  status " << to_string(out.status);
  if (out.status == EvolveStatus::Escaped) std::cout << " (tube exit at t=" << out.exit_time << ")";
  std::cout << ", " << out.records.size() << " records written to " << rc.output_dir << '\n';
  if (!out.message.empty() && out.status != EvolveStatus::Escaped)
    std::cout << "  " << out.message << '\n';
  return out.status == EvolveStatus::Escaped || out.status == EvolveStatus::Stayed ? kOk : kSolver;
}

int cmd_sweep(const ExperimentConfig& cfg, unsigned workers) {
  if (cfg.delta1_list.empty())
    throw ConfigError("sweep needs delta1 values: --delta1-list 1e-2,1e-3 or \"delta1_list\" in the config");
  const std::vector<SweepRow> rows = run_sweep(cfg, workers);
  OrderedJson man;
  man["format"] = kFormatVersion;
  man["version"] = version_string();
  man["command"] = "sweep";
  man["config"] = config_to_json(cfg);
  man["c"] = "critical";
  write_manifest(cfg.output_dir, man);
  write_table(sweep_table(rows), cfg.output_dir, "sweep", cfg.format, man);
  bool failed = false;
  for (const auto& r : rows) {
    std::cout << "delta1=" << r.delta1 << "  ";
    if (!r.outcome) {
      std::cout << "failed: " << r.error << '\n';
      failed = true;
      continue;
    }
    const EvolveOutcome& o = *r.outcome;
    std::cout << to_string(o.status);
    if (o.status == EvolveStatus::Escaped) std::cout << " at t=" << o.exit_time;
    std::cout << '\n';
    if (o.status != EvolveStatus::Escaped && o.status != EvolveStatus::Stayed) failed = true;
  }
  return failed ? kSolver : kOk;
}

int cmd_check(const ExperimentConfig& cfg) {
  ExperimentConfig shape = cfg;
  shape.c = 0.0;
  const ResolvedConfig rc = resolve(shape);
  const OrderedJson man = manifest(rc, "check");
  const std::vector<IdentityCheck> checks = run_check_suite(cfg.sigma, cfg.omega, cfg.N);
  write_manifest(rc.output_dir, man);
  write_table(identity_table(checks, "check"), rc.output_dir, "check", rc.format, man);
  int failed = 0;
  for (const auto& c : checks)
    if (!c.pass()) {
      ++failed;
      std::cout << "  FAIL  " << c.name << "  error " << c.error << " (tol " << c.tol << ")\n";
    }
  std::cout << checks.size() - failed << " of " << checks.size() << " checks pass\n";
  return failed ? kIdentity : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solitary waves of i u_t + u_xx + i |u|^{2 sigma} u_x = 0"};
  app.require_subcommand(1);
  Flags f;
  auto* soliton = app.add_subcommand("soliton", "soliton profile, conserved quantities, identities");
  auto* critical = app.add_subcommand("critical", "critical speed data, spectrum, coercivity");
  auto* evolve = app.add_subcommand("evolve", "perturbed soliton run with modulation and virial series");
  auto* sweep = app.add_subcommand("sweep", "evolve at the critical speed for each delta1");
  auto* check = app.add_subcommand("check", "full identity and property suite");
  for (auto* cmd : {soliton, critical, evolve, sweep, check}) add_common(cmd, f);
  sweep->add_option("--workers", f.workers, "parallel runs (0: one per core)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    const ExperimentConfig cfg = build_config(f);
    if (soliton->parsed()) return cmd_soliton(cfg);
    if (critical->parsed()) return cmd_critical(cfg);
    if (evolve->parsed()) return cmd_evolve(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg, f.workers);
    return cmd_check(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const DomainViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const TruncationTooSmall& e) {
    std::cerr << "error: " << e.what() << " (raise L or use L = \"auto\")\n";
    return kConfig;
  } catch (const CutoffTooLarge& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const Kappa0Mismatch& e) {
    std::cerr << "identity failure: " << e.what() << '\n';
    return kIdentity;
  } catch (const SymmetryViolation& e) {
    std::cerr << "identity failure: " << e.what() << '\n';
    return kIdentity;
  } catch (const std::exception& e) {
    std::cerr << "solver abort: " << e.what() << '\n';
    return kSolver;
  }
}
