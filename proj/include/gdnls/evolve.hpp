#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gdnls/conserved.hpp"
#include "gdnls/numerics.hpp"

namespace gdnls {

struct EvolveConfig {
  double dt = 1e-3;
  double T = 1.0;
  double dealias = 2.0 / 3.0;  // fraction of the Nyquist band kept in nonlinear products
  int record_every = 10;       // macro steps between records
  double cfl_guard = 0.5;      // dt <= cfl_guard dx / max(1, max|u|^{2 sigma})
  bool nonlinear = true;       // test hook: false integrates i u_t + u_xx = 0
  bool adaptive = true;        // subdivide steps instead of failing the guard

  void validate() const;
};

/// Largest dt the guard admits for u.
double guard_dt(const Field& u, double sigma, const EvolveConfig& cfg);

/// One integrating-factor RK4 step of u_t = i u_xx - |u|^{2 sigma} u_x with
/// step cfg.dt. Throws StepTooLarge if the guard is violated and
/// BlowupDetected if the result is non-finite or exceeds 1e6 in modulus.
Field step(const Field& u, double sigma, const EvolveConfig& cfg);

/// Same scheme with an explicit step size and no guard check.
Field step_unchecked(const Field& u, double sigma, const EvolveConfig& cfg, double dt);

/// Time reversal on the grid: conj(u(-x)), node j -> (N - j) mod N.
Field time_reverse(const Field& u);

enum class RunStatus { Completed, Stopped, Blowup, StepTooLarge, NonFinite };

std::string to_string(RunStatus s);

struct DiagnosticRecord {
  long step = 0;  // macro step index
  double t = 0.0;
  ConservedSet conserved;
};

/// Called at t = 0 and every record_every macro steps. Returning false stops
/// the run with status Stopped.
using Observer = std::function<bool(long step, double t, const Field& u)>;

struct IntegrationResult {
  std::vector<DiagnosticRecord> records;
  Field final_state;
  double t_final = 0.0;
  RunStatus status = RunStatus::Completed;
  std::string message;
  int max_substeps = 1;  // largest power-of-two subdivision used
};

/// Runs from t = 0 to cfg.T in macro steps of cfg.dt. When the guard binds
/// and cfg.adaptive is set, a macro step is split into 2^s equal substeps.
/// Solver errors end the run and are reported through status/message with the
/// records gathered so far.
IntegrationResult integrate(const Field& u0, double sigma, const EvolveConfig& cfg,
                            const std::vector<Observer>& observers = {});

}  // namespace gdnls
