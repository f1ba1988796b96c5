#include "gdnls/evolve.hpp"

#include <cmath>
#include <memory>
#include <sstream>

namespace gdnls {

void EvolveConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) throw InvalidArgument("T must be non-negative");
  if (!(dealias > 0.0 && dealias <= 1.0)) throw InvalidArgument("dealias must lie in (0, 1]");
  if (record_every < 1) throw InvalidArgument("record_every must be >= 1");
  if (!(cfl_guard > 0.0)) throw InvalidArgument("cfl_guard must be positive");
}

namespace {

// Exponentials for one step size.
struct Level {
  ComplexVector half;      // e^{-i k^2 h/2}
  ComplexVector full;      // e^{-i k^2 h}
  double h = 0.0;

  Level(const Grid& g, double h_) : h(h_) {
    const RealVector& k = g.wavenumbers();
    half.resize(g.size());
    full.resize(g.size());
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      half[j] = std::polar(1.0, -k[j] * k[j] * 0.5 * h);
      full[j] = std::polar(1.0, -k[j] * k[j] * h);
    }
  }
};

// Buffers shared by every step, so a step allocates nothing.
struct Workspace {
  Eigen::Index n;
  double sigma;
  ComplexVector ik;        // i k, Nyquist zeroed
  RealVector mask;         // dealias mask
  ComplexVector u, ux, tmp, stage, k1, k2, k3, k4;
  Eigen::ArrayXd w;

  Workspace(const Grid& g, double dealias, double sigma_) : n(g.size()), sigma(sigma_) {
    const RealVector& k = g.wavenumbers();
    ik.resize(n);
    mask.resize(n);
    const double kcut = dealias * g.max_wavenumber();
    for (Eigen::Index j = 0; j < n; ++j) {
      ik[j] = j == g.nyquist() ? Complex(0.0) : Complex(0.0, k[j]);
      mask[j] = std::abs(k[j]) <= kcut * (1.0 + 1e-12) && j != g.nyquist() ? 1.0 : 0.0;
    }
    for (ComplexVector* v : {&u, &ux, &tmp, &stage, &k1, &k2, &k3, &k4}) v->resize(n);
    w.resize(n);
  }

  // u = ifft(uh)
  void to_physical(const ComplexVector& uh) {
    fft_backward_into(uh, u);
    u *= 1.0 / static_cast<double>(n);
  }

  // out = Fourier coefficients of the masked -|u|^{2 sigma} u_x. With have_u
  // the buffer u already holds ifft(uh).
  void nonlinear(const ComplexVector& uh, ComplexVector& out, bool have_u) {
    if (!have_u) to_physical(uh);
    tmp = (ik.array() * uh.array()).matrix();
    fft_backward_into(tmp, ux);
    // |u|^{2 sigma} as exp(sigma log|u|^2): vectorized, and 0 maps to 0
    w = (sigma * u.array().abs2().log()).exp();
    const double scale = -1.0 / static_cast<double>(n);
    tmp = ((scale * w).cast<Complex>() * ux.array()).matrix();
    fft_forward_into(tmp, out);
    out.array() *= mask.array().cast<Complex>();
  }

  // One Lawson RK4 step of size lv.h, in place on uh.
  void rk4_lawson(const Level& lv, ComplexVector& uh, bool nonlinear_on, bool have_u) {
    const auto E2 = lv.half.array();
    const auto E = lv.full.array();
    const double h = lv.h;
    if (!nonlinear_on) {
      uh.array() *= E;
      return;
    }
    nonlinear(uh, k1, have_u);
    stage = (E2 * (uh.array() + 0.5 * h * k1.array())).matrix();
    nonlinear(stage, k2, false);
    stage = (E2 * uh.array() + 0.5 * h * k2.array()).matrix();
    nonlinear(stage, k3, false);
    stage = (E * uh.array() + h * E2 * k3.array()).matrix();
    nonlinear(stage, k4, false);
    uh = (E * uh.array() +
          (h / 6.0) * (E * k1.array() + 2.0 * E2 * (k2.array() + k3.array()) + k4.array()))
             .matrix();
  }
};

void check_blowup(const ComplexVector& u) {
  if (!u.allFinite()) throw BlowupDetected("non-finite values in the solution");
  const double amax = u.cwiseAbs().maxCoeff();
  if (amax > 1e6) {
    std::ostringstream msg;
    msg << "max|u| = " << amax << " exceeds 1e6";
    throw BlowupDetected(msg.str());
  }
}

double guard_from_max(double amax, double sigma, double dx, const EvolveConfig& cfg) {
  const double speed = cfg.nonlinear ? std::pow(amax, 2.0 * sigma) : 0.0;
  return cfg.cfl_guard * dx / std::max(1.0, speed);
}

}  // namespace

double guard_dt(const Field& u, double sigma, const EvolveConfig& cfg) {
  return guard_from_max(u.values().cwiseAbs().maxCoeff(), sigma, u.grid().dx(), cfg);
}

Field step_unchecked(const Field& u, double sigma, const EvolveConfig& cfg, double dt) {
  Workspace ws(u.grid(), cfg.dealias, sigma);
  const Level lv(u.grid(), dt);
  ComplexVector uh = fft_forward(u.values());
  ws.rk4_lawson(lv, uh, cfg.nonlinear, false);
  ws.to_physical(uh);
  check_blowup(ws.u);
  return Field(u.grid_ptr(), ws.u);
}

Field step(const Field& u, double sigma, const EvolveConfig& cfg) {
  cfg.validate();
  require_finite(u, "step");
  const double allowed = guard_dt(u, sigma, cfg);
  if (cfg.dt > allowed) {
    std::ostringstream msg;
    msg << "dt = " << cfg.dt << " exceeds the guard " << allowed;
    throw StepTooLarge(msg.str());
  }
  return step_unchecked(u, sigma, cfg, cfg.dt);
}

Field time_reverse(const Field& u) {
  const Eigen::Index n = u.size();
  ComplexVector v(n);
  for (Eigen::Index j = 0; j < n; ++j) v[j] = std::conj(u[(n - j) % n]);
  return Field(u.grid_ptr(), std::move(v));
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Stopped: return "stopped";
    case RunStatus::Blowup: return "blowup";
    case RunStatus::StepTooLarge: return "step_too_large";
    case RunStatus::NonFinite: return "non_finite";
  }
  return "unknown";
}

IntegrationResult integrate(const Field& u0, double sigma, const EvolveConfig& cfg,
                            const std::vector<Observer>& observers) {
  cfg.validate();
  require_finite(u0, "integrate");
  IntegrationResult res{{}, u0, 0.0, RunStatus::Completed, {}, 1};

  const long nsteps = std::lround(cfg.T / cfg.dt);
  const Grid& grid = u0.grid();
  Workspace ws(grid, cfg.dealias, sigma);
  ComplexVector uh = fft_forward(u0.values());
  ComplexVector uh_prev(uh.size());
  ws.u = u0.values();

  // Exponentials for each subdivision level, built on demand.
  std::vector<std::unique_ptr<Level>> levels;
  auto level = [&](int s) -> const Level& {
    while (static_cast<int>(levels.size()) <= s)
      levels.push_back(std::make_unique<Level>(
          grid, cfg.dt / std::ldexp(1.0, static_cast<int>(levels.size()))));
    return *levels[s];
  };

  auto record = [&](long n, double t) {
    const Field u(u0.grid_ptr(), ws.u);
    res.records.push_back({n, t, conserved_set(u, sigma)});
    for (const auto& obs : observers)
      if (!obs(n, t, u)) return false;
    return true;
  };
  auto finish = [&](RunStatus status, std::string message) {
    res.status = status;
    res.message = std::move(message);
    return res;
  };

  if (!record(0, 0.0)) return finish(RunStatus::Stopped, "");

  for (long n = 1; n <= nsteps; ++n) {
    try {
      int s = 0;
      const double allowed = guard_from_max(ws.u.cwiseAbs().maxCoeff(), sigma, grid.dx(), cfg);
      while (cfg.dt / std::ldexp(1.0, s) > allowed) {
        if (!cfg.adaptive) {
          std::ostringstream msg;
          msg << "dt = " << cfg.dt << " exceeds the guard " << allowed << " at t = " << res.t_final;
          throw StepTooLarge(msg.str());
        }
        if (++s > 20) throw StepTooLarge("guard requires more than 2^20 substeps");
      }
      res.max_substeps = std::max(res.max_substeps, 1 << s);
      const Level& lv = level(s);
      uh_prev = uh;
      // ws.u holds ifft(uh) for the first substep
      for (int sub = 0; sub < (1 << s); ++sub) ws.rk4_lawson(lv, uh, cfg.nonlinear, sub == 0);
      ws.to_physical(uh);
      check_blowup(ws.u);
    } catch (const BlowupDetected& e) {
      ws.to_physical(uh_prev);
      res.final_state = Field(u0.grid_ptr(), ws.u);
      return finish(RunStatus::Blowup, e.what());
    } catch (const StepTooLarge& e) {
      res.final_state = Field(u0.grid_ptr(), ws.u);
      return finish(RunStatus::StepTooLarge, e.what());
    }
    res.t_final = static_cast<double>(n) * cfg.dt;
    if (n % cfg.record_every == 0 || n == nsteps) {
      if (!record(n, res.t_final)) {
        res.final_state = Field(u0.grid_ptr(), ws.u);
        return finish(RunStatus::Stopped, "");
      }
    }
  }
  res.final_state = Field(u0.grid_ptr(), ws.u);
  return res;
}

}  // namespace gdnls
