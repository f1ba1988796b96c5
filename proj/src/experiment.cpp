#include "gdnls/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "gdnls/evolve.hpp"
#include "gdnls/linop.hpp"

namespace gdnls {

namespace fs = std::filesystem;
using nlohmann::json;

#ifndef GDNLS_VERSION
#define GDNLS_VERSION "unknown"
#endif

const char* version_string() { return GDNLS_VERSION; }

// ---- configuration ---------------------------------------------------------

namespace {

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("\"" + key + "\" must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("\"" + key + "\" must be finite");
  return x;
}

// number or the given literal; the literal maps to nullopt
std::optional<double> number_or(const json& v, const std::string& key, const char* literal) {
  if (v.is_string()) {
    if (v.get<std::string>() == literal) return std::nullopt;
    throw ConfigError("\"" + key + "\" must be a number or \"" + literal + "\", got \"" +
                      v.get<std::string>() + "\"");
  }
  return number(v, key);
}

long integer(const json& v, const std::string& key) {
  const double x = number(v, key);
  if (x != std::floor(x)) throw ConfigError("\"" + key + "\" must be an integer");
  return static_cast<long>(x);
}

json optional_value(const std::optional<double>& v, const char* literal) {
  return v ? json(*v) : json(literal);
}

bool power_of_two(long n) { return n >= 16 && (n & (n - 1)) == 0; }

long next_power_of_two(double x) {
  long n = 16;
  while (n < x) n *= 2;
  return n;
}

}  // namespace

void apply_config(const json& obj, ExperimentConfig& cfg) {
  if (!obj.is_object()) throw ConfigError("configuration must be a flat JSON object");
  for (const auto& [key, v] : obj.items()) {
    if (key == "sigma") cfg.sigma = number(v, key);
    else if (key == "omega") cfg.omega = number(v, key);
    else if (key == "c") cfg.c = number_or(v, key, "critical");
    else if (key == "L") cfg.L = number_or(v, key, "auto");
    else if (key == "N") cfg.N = integer(v, key);
    else if (key == "dx") cfg.dx = number_or(v, key, "auto");
    else if (key == "dt") cfg.dt = number_or(v, key, "auto");
    else if (key == "T") cfg.T = number(v, key);
    else if (key == "delta1") cfg.delta1 = number(v, key);
    else if (key == "delta1_list") {
      if (!v.is_array()) throw ConfigError("\"delta1_list\" must be an array of numbers");
      cfg.delta1_list.clear();
      for (const auto& d : v) cfg.delta1_list.push_back(number(d, key));
    } else if (key == "R") cfg.R = number_or(v, key, "auto");
    else if (key == "record_every") cfg.record_every = static_cast<int>(integer(v, key));
    else if (key == "tube") cfg.tube = number(v, key);
    else if (key == "seed") {
      const long s = integer(v, key);
      if (s < 0) throw ConfigError("\"seed\" must be non-negative");
      cfg.seed = static_cast<unsigned long>(s);
    } else if (key == "output_dir") {
      if (!v.is_string()) throw ConfigError("\"output_dir\" must be a string");
      cfg.output_dir = v.get<std::string>();
    } else if (key == "format") {
      if (!v.is_string()) throw ConfigError("\"format\" must be \"csv\" or \"json\"");
      cfg.format = v.get<std::string>();
    } else {
      throw ConfigError("unknown key \"" + key + "\"");
    }
  }
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json obj;
  try {
    obj = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  for (const auto& [key, v] : obj.items())
    if (v.is_object()) throw ConfigError("config must be flat; \"" + key + "\" is an object");
  apply_config(obj, base);
  return base;
}

json config_to_json(const ExperimentConfig& cfg) {
  return json{{"sigma", cfg.sigma},
              {"omega", cfg.omega},
              {"c", optional_value(cfg.c, "critical")},
              {"L", optional_value(cfg.L, "auto")},
              {"N", cfg.N},
              {"dx", optional_value(cfg.dx, "auto")},
              {"dt", optional_value(cfg.dt, "auto")},
              {"T", cfg.T},
              {"delta1", cfg.delta1},
              {"delta1_list", cfg.delta1_list},
              {"R", optional_value(cfg.R, "auto")},
              {"record_every", cfg.record_every},
              {"tube", cfg.tube},
              {"seed", cfg.seed},
              {"output_dir", cfg.output_dir},
              {"format", cfg.format}};
}

ResolvedConfig resolve(const ExperimentConfig& cfg) {
  ResolvedConfig rc;
  if (!(cfg.sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (!(cfg.omega > 0.0)) throw ConfigError("omega must be positive");
  if (!power_of_two(cfg.N)) throw ConfigError("N must be a power of two >= 16");
  if (!(cfg.T > 0.0)) throw ConfigError("T must be positive");
  if (cfg.record_every < 1) throw ConfigError("record_every must be >= 1");
  if (!(cfg.tube > 0.0 && cfg.tube < 1.0)) throw ConfigError("tube must lie in (0, 1)");
  if (cfg.format != "csv" && cfg.format != "json")
    throw ConfigError("format must be \"csv\" or \"json\", got \"" + cfg.format + "\"");
  if (cfg.output_dir.empty()) throw ConfigError("output_dir must not be empty");
  if (cfg.dt && !(*cfg.dt > 0.0)) throw ConfigError("dt must be positive");
  if (cfg.dx && !(*cfg.dx > 0.0)) throw ConfigError("dx must be positive");
  if (cfg.L && !(*cfg.L > 0.0)) throw ConfigError("L must be positive");
  if (cfg.R && !(*cfg.R > 0.0)) throw ConfigError("R must be positive");

  rc.sigma = cfg.sigma;
  rc.omega = cfg.omega;
  rc.T = cfg.T;
  rc.delta1 = cfg.delta1;
  rc.delta1_list = cfg.delta1_list;
  rc.record_every = cfg.record_every;
  rc.tube = cfg.tube;
  rc.seed = cfg.seed;
  rc.output_dir = cfg.output_dir;
  rc.format = cfg.format;

  if (cfg.c) {
    rc.c = *cfg.c;
  } else {
    if (!(cfg.sigma > 1.0 && cfg.sigma < 2.0))
      throw ConfigError("c = \"critical\" needs 1 < sigma < 2, got sigma = " +
                        format_number(cfg.sigma));
    rc.c_critical = true;
    rc.z0 = find_z0(cfg.sigma);
    rc.c = 2.0 * rc.z0 * std::sqrt(cfg.omega);
    rc.notes.push_back("c = 2 z0 sqrt(omega) with z0 = " + format_number(rc.z0));
  }
  const SolitonParams p = rc.params();
  p.validate();

  const double L_base = truncation_half_length(p.kappa());
  const double dx_base = 2.0 * L_base / static_cast<double>(cfg.N);
  if (cfg.R) {
    rc.R = *cfg.R;
  } else if (rc.c_critical && cfg.delta1 > 0.0) {
    const double M = closed_form_MP(p).M;
    const double b2 = 4.0 * p.omega * std::sqrt(p.omega) * p.sigma * (2.0 - p.sigma) * M;
    rc.R = 10.0 / (b2 * cfg.delta1);
    rc.notes.push_back("R = 10 / (b2 delta1) with b2 = " + format_number(b2));
  }

  if (cfg.L) {
    rc.L = *cfg.L;
    rc.N = cfg.N;
  } else {
    rc.L = L_base;
    rc.N = cfg.N;
    if (rc.R > 0.0 && 3.0 * rc.R > 0.9 * L_base) {
      rc.L = 3.0 * rc.R / 0.9;
      const double dx_max = cfg.dx ? *cfg.dx : std::max(dx_base, 0.12);
      rc.N = std::max(cfg.N, next_power_of_two(2.0 * rc.L / dx_max));
      rc.notes.push_back("L = 3R / 0.9 to fit the cutoff; N = " + std::to_string(rc.N) +
                         " keeps dx <= " + format_number(dx_max));
    } else {
      rc.notes.push_back("L from the soliton tail rule 72 / kappa");
    }
  }
  if (rc.R == 0.0) {
    rc.R = 0.3 * rc.L;
    rc.notes.push_back("R = 0.3 L");
  }
  if (3.0 * rc.R > 0.9 * rc.L)
    throw ConfigError("cutoff support 3R = " + format_number(3.0 * rc.R) +
                      " exceeds 0.9 L = " + format_number(0.9 * rc.L) +
                      "; raise L or lower R");

  if (cfg.dt) {
    rc.dt = *cfg.dt;
  } else {
    // half the step guard at the soliton peak, at most 4e-3, snapped down to
    // 1, 2 or 4 times a power of ten
    const double peak = (p.sigma + 1.0) * p.kappa() * p.kappa() / (2.0 * std::sqrt(p.omega) - p.c);
    const double dx = 2.0 * rc.L / static_cast<double>(rc.N);
    const double raw = std::min(4e-3, 0.5 * EvolveConfig{}.cfl_guard * dx / std::max(1.0, peak));
    const double decade = std::pow(10.0, std::floor(std::log10(raw)));
    const double m = raw / decade;
    rc.dt = decade * (m >= 4.0 ? 4.0 : m >= 2.0 ? 2.0 : 1.0);
    rc.notes.push_back("dt = " + format_number(rc.dt) +
                       " from half the step guard at the soliton peak, capped at 4e-3");
  }
  return rc;
}

OrderedJson manifest(const ResolvedConfig& rc, const std::string& command) {
  OrderedJson m;
  m["format"] = kFormatVersion;
  m["version"] = version_string();
  m["command"] = command;
  m["sigma"] = rc.sigma;
  m["omega"] = rc.omega;
  m["c"] = rc.c;
  m["c_critical"] = rc.c_critical;
  if (rc.c_critical) m["z0"] = rc.z0;
  m["L"] = rc.L;
  m["N"] = rc.N;
  m["dx"] = 2.0 * rc.L / static_cast<double>(rc.N);
  m["dt"] = rc.dt;
  m["T"] = rc.T;
  m["delta1"] = rc.delta1;
  m["delta1_list"] = rc.delta1_list;
  m["R"] = rc.R;
  m["record_every"] = rc.record_every;
  m["tube"] = rc.tube;
  m["seed"] = rc.seed;
  m["output_dir"] = rc.output_dir;
  m["output_format"] = rc.format;
  m["notes"] = rc.notes;
  return m;
}

// ---- writers ----------------------------------------------------------------

void Table::add(std::vector<OrderedJson> row) {
  if (row.size() != columns.size()) throw InvalidArgument("table row has the wrong width");
  rows.push_back(std::move(row));
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

std::string csv_cell(const OrderedJson& v) {
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "";
  if (v.is_string()) return csv_field(v.get<std::string>());
  return csv_field(v.dump());
}

// JSON has no inf / nan; they are written as strings
OrderedJson json_cell(const OrderedJson& v) {
  if (v.is_number_float() && !std::isfinite(v.get<double>())) return format_number(v.get<double>());
  return v;
}

void write_csv_preamble(std::ostream& out, const std::string& name, const OrderedJson& manifest,
                        const std::vector<std::string>& columns) {
  out << "# " << kFormatVersion << ' ' << name << '\n';
  out << "# manifest: " << manifest.dump() << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << csv_field(columns[i]);
  out << '\n';
}

void write_csv_row(std::ostream& out, const std::vector<OrderedJson>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
  out << '\n';
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

}  // namespace

std::string write_table(const Table& t, const std::string& dir, const std::string& name,
                        const std::string& format, const OrderedJson& man) {
  fs::create_directories(dir);
  const std::string path = (fs::path(dir) / (name + "." + format)).string();
  std::ofstream out = open_output(path);
  if (format == "csv") {
    write_csv_preamble(out, name, man, t.columns);
    for (const auto& row : t.rows) write_csv_row(out, row);
  } else {
    OrderedJson doc;
    doc["format"] = kFormatVersion;
    doc["table"] = name;
    doc["manifest"] = man;
    doc["columns"] = t.columns;
    OrderedJson records = OrderedJson::array();
    for (const auto& row : t.rows) {
      OrderedJson r = OrderedJson::object();
      for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = json_cell(row[i]);
      records.push_back(std::move(r));
    }
    doc["records"] = std::move(records);
    out << doc.dump(1) << '\n';
  }
  return path;
}

void write_manifest(const std::string& dir, const OrderedJson& man) {
  fs::create_directories(dir);
  std::ofstream out = open_output((fs::path(dir) / "manifest.json").string());
  out << man.dump(1) << '\n';
}

// ---- soliton ----------------------------------------------------------------

Table identity_table(const std::vector<IdentityCheck>& checks, const std::string& group) {
  Table t{{"group", "name", "error", "tol", "pass"}, {}};
  for (const auto& c : checks) t.add({group, c.name, c.error, c.tol, c.pass()});
  return t;
}

SolitonReport run_soliton(const ResolvedConfig& rc) {
  const SolitonParams p = rc.params();
  p.validate();
  const GridPtr grid = make_grid(rc.L, rc.N);
  const Field phi = soliton_field(p, grid);
  SolitonReport rep;
  rep.conserved = conserved_set(phi, p.sigma);
  rep.identities = soliton_identities(p, grid);
  rep.profile.columns = {"x", "re", "im", "abs"};
  for (Eigen::Index j = 0; j < grid->size(); ++j)
    rep.profile.add({grid->nodes()[j], phi[j].real(), phi[j].imag(), std::abs(phi[j])});
  return rep;
}

// ---- critical ---------------------------------------------------------------

CriticalReport run_critical(double sigma, double omega, long N) {
  CriticalReport rep;
  if (!(omega > 0.0)) throw ConfigError("omega must be positive");
  if (sigma <= 1.0) {
    rep.skipped = true;
    rep.classification =
        "stable for all |c| < 2 sqrt(omega) per cited results; critical machinery skipped";
    return rep;
  }
  if (sigma >= 2.0) {
    rep.skipped = true;
    rep.classification = "unstable regime sigma >= 2; z0 undefined; critical machinery skipped";
    return rep;
  }
  rep.classification = "1 < sigma < 2: stable for c < 2 z0 sqrt(omega), unstable above";
  const CriticalData cd = critical_constants(sigma, omega);
  rep.data = cd;
  const SolitonParams p = cd.params();
  rep.F_at_z0 = F_sigma(sigma, cd.z0);

  auto flag = [](bool ok) { return ok ? 0.0 : 1.0; };
  const double sw = std::sqrt(omega);
  auto& ch = rep.checks;
  ch.push_back({"F(z0)", std::abs(rep.F_at_z0), 1e-10});
  ch.push_back({"P=a0M", relative_error(cd.P, cd.a0 * cd.M), 1e-7});
  ch.push_back({"mu/nu=sqrt(w)", std::abs(cd.mu / cd.nu - sw), 1e-5});
  ch.push_back({"kappa0 agreement", relative_error(cd.kappa0_from_M, cd.kappa0_from_P), 1e-3});
  ch.push_back({"kappa0>0", flag(cd.kappa0 > 0.0), 0.0});
  ch.push_back({"b1>0", flag(cd.b1 > 0.0), 0.0});
  ch.push_back({"b2>0", flag(cd.b2 > 0.0), 0.0});

  const GridPtr grid = soliton_grid(p, N);
  const Field phi = soliton_field(p, grid);
  const Field dphi = spectral_derivative(phi, 1);
  const Complex I(0.0, 1.0);
  EigenDirection dir;
  dir.mu = cd.mu;
  dir.nu = cd.nu;
  const Field psi = psi_field(p, dir, grid);
  const Field q(grid, cd.mu * phi.values() + I * cd.nu * dphi.values());
  const Field spsi = apply_S_double_prime(psi, phi, p);
  const double npsi = l2_norm(psi), nphi = l2_norm(phi);
  ch.push_back({"<phi,psi>", std::abs(inner(phi, psi)) / (nphi * npsi), 1e-6});
  ch.push_back({"<i phi_x,psi>", std::abs(inner(I * dphi, psi)) / (l2_norm(dphi) * npsi), 1e-6});
  ch.push_back({"S''psi=-Q'", l2_norm(spsi + q), 1e-5});
  ch.push_back({"<S''psi,psi>", std::abs(inner(spsi, psi)) / std::pow(h1_norm(psi), 2), 1e-6});
  ch.push_back({"<J',psi>=4muM+2nuP",
                relative_error(inner(apply_J_prime(phi, sigma), psi), 4 * cd.mu * cd.M + 2 * cd.nu * cd.P),
                1e-5});

  const auto eig = spectrum(phi, p, 6);
  const SpectrumSummary s = classify(eig);
  rep.negative = s.negative;
  rep.near_zero = s.near_zero;
  for (const auto& e : eig) rep.eigenvalues.push_back(e.value);
  std::vector<Field> kernel;
  for (const auto& e : eig)
    if (std::abs(e.value) <= s.zero_tol) kernel.push_back(e.field);
  ch.push_back({"negative eigenvalues=1", std::abs(s.negative - 1.0), 0.0});
  ch.push_back({"near-zero modes>=2", flag(s.near_zero >= 2), 0.0});
  ch.push_back({"kernel ~ i phi", 1.0 - subspace_correlation(I * phi * Complex(1.0 / nphi), kernel), 1e-3});
  ch.push_back({"kernel ~ phi_x",
                1.0 - subspace_correlation(dphi * Complex(1.0 / l2_norm(dphi)), kernel), 1e-3});
  // dense only, so a coarser grid when N is large
  if (grid->size() <= 1024) {
    rep.coercivity = coercivity_constant(phi, p, modulation_constraints(phi, sigma));
  } else {
    const Field phic = soliton_field(p, soliton_grid(p, 1024));
    rep.coercivity = coercivity_constant(phic, p, modulation_constraints(phic, sigma));
  }
  ch.push_back({"coercivity>0", flag(rep.coercivity > 0.0), 0.0});
  return rep;
}

// ---- evolve -----------------------------------------------------------------

std::string to_string(EvolveStatus s) {
  switch (s) {
    case EvolveStatus::Escaped: return "escaped";
    case EvolveStatus::Stayed: return "stayed";
    case EvolveStatus::Blowup: return "blowup";
    case EvolveStatus::Aborted: return "aborted";
  }
  return "unknown";
}

const std::vector<std::string>& series_columns() {
  static const std::vector<std::string> cols = {"t",     "M",      "P",  "E",  "J",
                                                "theta", "y",      "lambda", "eps_h1",
                                                "I1",    "I2",     "I",  "orbit_dist"};
  return cols;
}

namespace {

std::vector<OrderedJson> series_row(const VirialRecord& r) {
  return {r.t,     r.conserved.M, r.conserved.P, r.conserved.E, r.conserved.J,
          r.theta, r.y,           r.lambda,      r.eps_h1,      r.I1,
          r.I2,    r.I,           r.orbit_dist};
}

// Streams rows to <dir>/series.csv as they are produced.
class SeriesStream {
 public:
  SeriesStream(const std::string& dir, const OrderedJson& man) {
    fs::create_directories(dir);
    out_ = open_output((fs::path(dir) / "series.csv").string());
    write_csv_preamble(out_, "series", man, series_columns());
    out_.flush();
  }
  void row(const VirialRecord& r) {
    write_csv_row(out_, series_row(r));
    out_.flush();
  }
  void marker(const std::string& what) {
    std::string line = what;
    std::replace(line.begin(), line.end(), '\n', ' ');
    out_ << "# " << line << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

}  // namespace

EvolveOutcome run_evolve(const ResolvedConfig& rc, bool write_files, const std::string& command) {
  const SolitonParams p = rc.params();
  p.validate();
  const GridPtr grid = make_grid(rc.L, rc.N);
  const Field phi = soliton_field(p, grid);

  EvolveOutcome out;
  ModulationFrame frame{p, std::sqrt(p.omega), 1.0};
  if (rc.c_critical) {
    out.critical = critical_constants(p.sigma, p.omega);
    frame.mu = out.critical->mu;
    frame.nu = out.critical->nu;
  }
  out.phi_conserved = conserved_set(phi, p.sigma);
  out.phi_h1 = h1_norm(phi);
  out.tube_radius = rc.tube * out.phi_h1;
  out.C_tilde = virial_lambda_coefficient(frame, grid);

  const Field u0 = rc.delta1 == 0.0 ? phi : perturbation_direction(p, grid, rc.delta1);
  out.A = A_functional(u0, p, out.phi_conserved);
  out.A_energy = A_functional_energy(u0, p, out.phi_conserved);
  out.A_target = 8.0 * p.omega * std::sqrt(p.omega) * p.sigma * (2.0 - p.sigma) *
                 out.phi_conserved.M * rc.delta1;

  const OrderedJson man = manifest(rc, command);
  std::optional<SeriesStream> stream;
  if (write_files) {
    write_manifest(rc.output_dir, man);
    if (rc.format == "csv") stream.emplace(rc.output_dir, man);
  }

  ModulationOptions mo;
  mo.tube_fraction = rc.tube;
  ModulationTracker tracker(frame, mo);
  const CutoffProfile cut(rc.R);
  bool newton_failed = false;
  std::string newton_message;

  EvolveConfig ec;
  ec.dt = rc.dt;
  ec.T = rc.T;
  ec.record_every = rc.record_every;
  Observer observe = [&](long, double t, const Field& u) {
    try {
      if (!tracker.push(t, u)) return false;
    } catch (const NewtonDiverged& e) {
      newton_failed = true;
      newton_message = e.what();
      return false;
    }
    const ModulationState& st = tracker.last();
    const TrackedState& ts = tracker.states().back();
    const CutoffSamples cs = sample_cutoff(cut, *grid, st.y);
    VirialRecord r;
    r.t = t;
    r.conserved = conserved_set(u, p.sigma);
    r.theta = ts.theta;
    r.y = ts.y;
    r.lambda = ts.lambda;
    r.eps_h1 = ts.eps_h1;
    r.I1 = I1(u, cs);
    r.I2 = I2(u, cs);
    r.I = -std::sqrt(p.omega) * r.I1 + r.I2 + out.C_tilde * st.lambda;
    r.orbit_dist = ts.orbit_dist;
    out.records.push_back(r);
    if (stream) stream->row(r);
    return true;
  };
  const IntegrationResult res = integrate(u0, p.sigma, ec, {observe});
  out.t_end = res.t_final;
  out.max_substeps = res.max_substeps;

  if (newton_failed) {
    out.status = EvolveStatus::Aborted;
    out.message = newton_message;
  } else if (tracker.exited()) {
    out.status = EvolveStatus::Escaped;
    out.exit_time = tracker.exit_time();
    out.exit_distance = tracker.exit_distance();
    out.message = "left the tube at t = " + format_number(out.exit_time);
  } else if (res.status == RunStatus::Completed) {
    out.status = EvolveStatus::Stayed;
  } else if (res.status == RunStatus::Blowup || res.status == RunStatus::NonFinite) {
    out.status = EvolveStatus::Blowup;
    out.message = res.message;
  } else {
    out.status = EvolveStatus::Aborted;
    out.message = res.message;
  }

  if (rc.c_critical && rc.delta1 > 0.0 && out.records.size() >= 3) {
    std::vector<RateSample> rs;
    for (const auto& r : out.records) rs.push_back({r.t, r.I, r.lambda, r.eps_h1});
    out.rates = rate_decomposition_check(rs, out.A_energy, out.critical->b1, out.critical->b2,
                                         rc.delta1, rc.R);
  }
  if (rc.delta1 != 0.0 && !out.records.empty()) {
    for (const auto& r : out.records) {
      if (!(r.lambda > 0.0)) {
        out.b3 = std::numeric_limits<double>::infinity();
        break;
      }
      out.b3 = std::max(out.b3, r.eps_h1 * r.eps_h1 / (r.lambda * rc.delta1));
    }
  }

  if (write_files) {
    if (stream) {
      if (out.status == EvolveStatus::Aborted || out.status == EvolveStatus::Blowup)
        stream->marker("error: " + to_string(out.status) + ": " + out.message);
      else
        stream->marker("end: " + to_string(out.status));
    }
    write_evolve_outputs(rc, out, command);
  }
  return out;
}

OrderedJson evolve_summary(const ResolvedConfig& rc, const EvolveOutcome& out) {
  OrderedJson s;
  s["status"] = to_string(out.status);
  s["message"] = out.message;
  s["records"] = out.records.size();
  s["t_end"] = out.t_end;
  s["exit_time"] = out.status == EvolveStatus::Escaped ? OrderedJson(out.exit_time) : OrderedJson();
  s["exit_distance"] = out.exit_distance;
  s["tube_radius"] = out.tube_radius;
  s["phi_h1"] = out.phi_h1;
  s["phi_M"] = out.phi_conserved.M;
  s["phi_P"] = out.phi_conserved.P;
  s["phi_E"] = out.phi_conserved.E;
  s["A"] = out.A;
  s["A_energy"] = out.A_energy;
  s["A_target"] = out.A_target;
  s["C_tilde"] = out.C_tilde;
  s["max_substeps"] = out.max_substeps;
  if (out.critical) {
    const CriticalData& cd = *out.critical;
    s["critical"] = {{"z0", cd.z0}, {"mu", cd.mu}, {"nu", cd.nu}, {"kappa0", cd.kappa0},
                     {"b1", cd.b1}, {"b2", cd.b2}};
    s["A_ge_b2_delta1"] = out.A >= cd.b2 * rc.delta1;
    s["A_energy_ge_b2_delta1"] = out.A_energy >= cd.b2 * rc.delta1;
  }
  if (out.rates) {
    const RateDecompositionReport& r = *out.rates;
    s["rates"] = {{"compared", r.compared},         {"increasing", r.increasing},
                  {"frac_quarter", r.frac_quarter}, {"frac_lower", r.frac_lower},
                  {"min_rate", r.min_rate},         {"max_residual", r.max_residual},
                  {"c_le", r.c_le},                 {"c_ee", r.c_ee},
                  {"c_R", r.c_R}};
  }
  s["b3"] = std::isfinite(out.b3) ? OrderedJson(out.b3) : OrderedJson("inf");
  return s;
}

void write_evolve_outputs(const ResolvedConfig& rc, const EvolveOutcome& out,
                          const std::string& command) {
  OrderedJson man = manifest(rc, command);
  if (rc.format == "json") {
    Table t{series_columns(), {}};
    for (const auto& r : out.records) t.add(series_row(r));
    write_table(t, rc.output_dir, "series", "json", man);
  }
  man["summary"] = evolve_summary(rc, out);
  write_manifest(rc.output_dir, man);
}

// ---- sweep ------------------------------------------------------------------

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, unsigned workers) {
  if (cfg.delta1_list.empty()) throw ConfigError("sweep needs a non-empty delta1_list");
  std::vector<SweepRow> rows(cfg.delta1_list.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].delta1 = cfg.delta1_list[i];

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& row = rows[i];
      try {
        ExperimentConfig one = cfg;
        one.c = std::nullopt;
        one.delta1 = row.delta1;
        one.delta1_list.clear();
        one.output_dir = (fs::path(cfg.output_dir) /
                          ("run_" + std::to_string(i) + "_delta1_" + format_number(row.delta1)))
                             .string();
        row.config = resolve(one);
        row.outcome = run_evolve(row.config, true, "sweep");
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(rows.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

Table sweep_table(const std::vector<SweepRow>& rows) {
  Table t{{"delta1", "status", "exit_time", "A_over_delta1", "A_energy_over_delta1",
           "target_over_delta1", "A_ge_b2_delta1", "A_energy_ge_b2_delta1", "increasing",
           "frac_quarter", "frac_lower", "min_rate", "b3", "R", "L", "N", "error"},
          {}};
  for (const auto& r : rows) {
    if (!r.outcome) {
      t.add({r.delta1, "failed", nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr,
             nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, r.error});
      continue;
    }
    const EvolveOutcome& o = *r.outcome;
    const double b2 = o.critical ? o.critical->b2 : 0.0;
    OrderedJson inc, fq, fl, mr;
    if (o.rates) {
      inc = o.rates->increasing;
      fq = o.rates->frac_quarter;
      fl = o.rates->frac_lower;
      mr = o.rates->min_rate;
    }
    t.add({r.delta1, to_string(o.status),
           o.status == EvolveStatus::Escaped ? OrderedJson(o.exit_time) : OrderedJson(),
           o.A / r.delta1, o.A_energy / r.delta1, o.A_target / r.delta1, o.A >= b2 * r.delta1,
           o.A_energy >= b2 * r.delta1, inc, fq, fl, mr, o.b3, r.config.R, r.config.L,
           r.config.N, o.message});
  }
  return t;
}

// ---- check ------------------------------------------------------------------

std::vector<IdentityCheck> run_check_suite(double sigma, double omega, long N) {
  std::vector<IdentityCheck> all;
  auto append = [&](const std::vector<IdentityCheck>& part, const std::string& prefix) {
    for (auto c : part) {
      c.name = prefix + c.name;
      all.push_back(std::move(c));
    }
  };
  for (const SolitonParams& p : parameter_sweep()) {
    const std::string tag = "sigma=" + format_number(p.sigma) + " omega=" + format_number(p.omega) +
                            " c=" + format_number(p.c) + ": ";
    const GridPtr grid = soliton_grid(p, N);
    append(soliton_identities(p, grid), tag);
    append(derivative_relations(p), tag);
    append(operator_identities(p, grid), tag);
  }
  const CriticalReport cr = run_critical(sigma, omega, std::min<long>(N, 1024));
  append(cr.checks, "critical sigma=" + format_number(sigma) + ": ");
  return all;
}

}  // namespace gdnls
