#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gdnls/conserved.hpp"
#include "gdnls/critical.hpp"
#include "gdnls/identities.hpp"
#include "gdnls/modulation.hpp"
#include "gdnls/virial.hpp"

namespace gdnls {

using OrderedJson = nlohmann::ordered_json;

/// Version tag written into every output header and manifest.
inline constexpr const char* kFormatVersion = "gdnls-output/1";
const char* version_string();

/// User-facing configuration. Optional fields left empty mean "auto".
struct ExperimentConfig {
  double sigma = 1.5;
  double omega = 1.0;
  std::optional<double> c = 0.5;  // empty: "critical"
  std::optional<double> L;        // empty: "auto"
  long N = 4096;
  std::optional<double> dx;       // largest spacing when L grows; empty: max(base spacing, 0.12)
  std::optional<double> dt;       // empty: "auto"
  double T = 10.0;
  double delta1 = 0.0;
  std::vector<double> delta1_list;
  std::optional<double> R;        // empty: "auto"
  int record_every = 100;
  double tube = 0.05;             // tube radius as a fraction of ||phi||_{H1}
  unsigned long seed = 1;
  std::string output_dir = "out";
  std::string format = "csv";
};

/// Reads a flat JSON object. Unknown keys and wrong types throw ConfigError.
/// Keys already present in `base` are overwritten.
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
void apply_config(const nlohmann::json& obj, ExperimentConfig& cfg);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Every "auto" replaced by a number.
struct ResolvedConfig {
  double sigma = 0.0;
  double omega = 0.0;
  double c = 0.0;
  bool c_critical = false;
  double z0 = 0.0;  // only when c_critical
  double L = 0.0;
  long N = 0;
  double dt = 0.0;
  double T = 0.0;
  double delta1 = 0.0;
  std::vector<double> delta1_list;
  double R = 0.0;
  int record_every = 0;
  double tube = 0.0;
  unsigned long seed = 0;
  std::string output_dir;
  std::string format;
  std::vector<std::string> notes;  // how each auto value was chosen

  SolitonParams params() const { return {sigma, omega, c}; }
};

/// Validates the module preconditions and resolves "auto":
///   c = "critical"  -> 2 z0 sqrt(w)  (needs 1 < sigma < 2)
///   R = "auto"      -> 10 / (b2 delta1) at the critical speed with delta1 > 0,
///                      otherwise 0.3 L
///   L = "auto"      -> max(soliton tail rule, 3R / 0.9)
///   N               -> raised to a power of two keeping dx <= cfg.dx (auto:
///                      max(base spacing, 0.12)) when L grows
///   dt = "auto"     -> half the step guard at the soliton peak, at most
///                      4e-3, rounded down to 1, 2 or 4 times a power of ten
/// Throws ConfigError or DomainViolation.
ResolvedConfig resolve(const ExperimentConfig& cfg);

/// The resolved configuration, version and format tag.
OrderedJson manifest(const ResolvedConfig& rc, const std::string& command);

/// A table with a fixed column order. Cells are numbers, strings or booleans.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<OrderedJson>> rows;
  void add(std::vector<OrderedJson> row);
};

/// CSV: a "# <version> <name>" line, a "# manifest: {...}" line, the header,
/// then rows (RFC 4180 quoting, '.' decimal, LF). JSON: {"format", "manifest",
/// "columns", "records": [...]}. Returns the path written.
std::string write_table(const Table& t, const std::string& dir, const std::string& name,
                        const std::string& format, const OrderedJson& manifest);
void write_manifest(const std::string& dir, const OrderedJson& manifest);

/// Shortest round-trip decimal form of x.
std::string format_number(double x);

// ---- soliton -------------------------------------------------------------

struct SolitonReport {
  ConservedSet conserved;
  std::vector<IdentityCheck> identities;
  Table profile;  // x, re, im, abs
};

SolitonReport run_soliton(const ResolvedConfig& rc);
Table identity_table(const std::vector<IdentityCheck>& checks, const std::string& group = "");

// ---- critical ------------------------------------------------------------

struct CriticalReport {
  std::string classification;  // "critical machinery", or a skip note
  bool skipped = false;
  std::optional<CriticalData> data;
  double F_at_z0 = 0.0;
  std::vector<IdentityCheck> checks;
  std::vector<double> eigenvalues;  // smallest few of S''(phi)
  int negative = 0;
  int near_zero = 0;
  double coercivity = 0.0;
};

/// sigma <= 1 and sigma >= 2 return a classification note with the machinery
/// skipped. Otherwise z0, (mu, nu), kappa0, b1, b2 at (sigma, w), and the
/// spectrum of S''(phi) at the critical speed on N nodes. The coercivity
/// constant uses min(N, 1024) nodes.
CriticalReport run_critical(double sigma, double omega, long N);

// ---- evolve --------------------------------------------------------------

/// One record of an evolve run.
struct VirialRecord {
  double t = 0.0;
  ConservedSet conserved;
  double theta = 0.0, y = 0.0, lambda = 0.0, eps_h1 = 0.0;
  double I1 = 0.0, I2 = 0.0, I = 0.0;
  double orbit_dist = 0.0;
};

enum class EvolveStatus { Escaped, Stayed, Blowup, Aborted };
std::string to_string(EvolveStatus s);

struct EvolveOutcome {
  EvolveStatus status = EvolveStatus::Stayed;
  std::string message;
  std::vector<VirialRecord> records;
  double t_end = 0.0;
  double exit_time = 0.0;      // when status is Escaped
  double exit_distance = 0.0;
  double tube_radius = 0.0;    // tube * ||phi||_{H1}
  double phi_h1 = 0.0;
  ConservedSet phi_conserved;
  double A = 0.0;              // A_functional(u0)
  double A_energy = 0.0;       // A_functional_energy(u0)
  double A_target = 0.0;       // 8 w sqrt(w) sigma (2 - sigma) M(phi) delta1
  double C_tilde = 0.0;
  std::optional<CriticalData> critical;
  std::optional<RateDecompositionReport> rates;  // critical speed, delta1 > 0, >= 3 records
  double b3 = 0.0;             // max ||eps||_{H1}^2 / (lambda delta1); +inf if some lambda <= 0
  int max_substeps = 1;
};

/// Columns of the evolve series, in order.
const std::vector<std::string>& series_columns();

/// Integrates u0 = phi + delta1 (-a0 phi + i phi_x) to T, tracking the
/// modulation parameters and the virial functional every record_every steps.
/// Leaving the tube ends the run with status Escaped. With `write_files` the
/// manifest goes to rc.output_dir first, CSV rows are streamed as they are
/// produced, and the summary is added to the manifest at the end.
EvolveOutcome run_evolve(const ResolvedConfig& rc, bool write_files,
                         const std::string& command = "evolve");

/// Writes series, summary and manifest for one run into rc.output_dir.
void write_evolve_outputs(const ResolvedConfig& rc, const EvolveOutcome& out,
                          const std::string& command);

OrderedJson evolve_summary(const ResolvedConfig& rc, const EvolveOutcome& out);

// ---- sweep ---------------------------------------------------------------

struct SweepRow {
  double delta1 = 0.0;
  ResolvedConfig config;
  std::optional<EvolveOutcome> outcome;
  std::string error;  // set when the run could not be performed
};

/// One evolve run per delta1 at the critical speed, each in its own
/// subdirectory, dispatched to `workers` threads (0: hardware concurrency).
/// Failures are recorded per row and do not stop the sweep.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, unsigned workers = 0);
Table sweep_table(const std::vector<SweepRow>& rows);

// ---- check ---------------------------------------------------------------

/// Identity suite over the parameter sweep on N nodes, the derivative
/// relations and operator identities at each point, and the critical
/// checks at (sigma, w).
std::vector<IdentityCheck> run_check_suite(double sigma, double omega, long N);

}  // namespace gdnls
