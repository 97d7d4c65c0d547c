#include "edm/flows.hpp"

#include <cmath>
#include <cstdio>

namespace edm::flows {

VectorField autonomous(int dimension, std::function<Vec(const Vec&)> f) {
  return VectorField{dimension, [f = std::move(f)](const Vec& x, double) { return f(x); }};
}

void TrajectoryRecord::write_csv(std::ostream& os) const {
  const int n = states.empty() ? 0 : static_cast<int>(states.front().size());
  os << "t";
  for (int i = 0; i < n; ++i) os << ",x" << i;
  if (!energies.empty()) os << ",energy";
  os << "\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (size_t k = 0; k < times.size(); ++k) {
    put(times[k]);
    for (double x : states[k]) {
      os << ",";
      put(x);
    }
    if (!energies.empty()) {
      os << ",";
      put(energies[k]);
    }
    os << "\n";
  }
}

namespace {

void check_state(const Vec& x, double t) {
  for (double v : x) {
    if (!std::isfinite(v)) throw DivergenceError("integration produced non-finite state", t);
    if (std::fabs(v) > tol::divergence_guard)
      throw DivergenceError("integration diverged past guard", t);
  }
}

Vec rk4_step(const VectorField& f, const Vec& x, double t, double dt, const Vec& k1) {
  Vec x2 = x + (dt / 2.0) * k1;
  Vec k2 = f.eval(x2, t + dt / 2.0);
  Vec x3 = x + (dt / 2.0) * k2;
  Vec k3 = f.eval(x3, t + dt / 2.0);
  Vec x4 = x + dt * k3;
  Vec k4 = f.eval(x4, t + dt);
  Vec out(x.size());
  for (size_t i = 0; i < x.size(); ++i)
    out[i] = x[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace

TrajectoryRecord integrate_ode(const VectorField& field, const Vec& x0,
                               const IntegratorConfig& cfg, const std::optional<EnergyFn>& energy) {
  if (static_cast<int>(x0.size()) != field.dimension)
    throw ShapeError("integrate_ode: initial state dimension mismatch");
  if (cfg.dt <= 0 || cfg.t_max <= 0 || cfg.dt >= cfg.t_max)
    throw DomainError("integrate_ode: need 0 < dt < t_max");
  if (cfg.equilibrium_tol <= 0) throw DomainError("integrate_ode: equilibrium_tol must be positive");
  if (cfg.record_stride < 1) throw DomainError("integrate_ode: record_stride must be >= 1");

  TrajectoryRecord rec;
  Vec x = x0;
  double t = 0.0;
  long step = 0;

  auto record = [&](double time, const Vec& state) {
    rec.times.push_back(time);
    rec.states.push_back(state);
    if (energy) rec.energies.push_back((*energy)(state));
  };

  record(t, x);
  const long max_steps = static_cast<long>(std::ceil(cfg.t_max / cfg.dt));
  while (step < max_steps) {
    Vec k1 = field.eval(x, t);
    double res = norm2(k1);
    if (res < cfg.equilibrium_tol) {
      rec.converged = true;
      rec.final_residual = res;
      if (rec.times.back() != t) record(t, x);
      return rec;
    }
    if (cfg.method == Method::ExplicitEuler) {
      for (size_t i = 0; i < x.size(); ++i) x[i] += cfg.dt * k1[i];
    } else {
      x = rk4_step(field, x, t, cfg.dt, k1);
    }
    ++step;
    t = step * cfg.dt;
    check_state(x, t);
    if (step % cfg.record_stride == 0) record(t, x);
  }
  if (rec.times.back() != t) record(t, x);
  rec.converged = false;
  rec.final_residual = norm2(field.eval(x, t));
  return rec;
}

TrajectoryRecord integrate_sde(const VectorField& drift, double temperature, const Vec& x0,
                               double dt, double t_max, Rng& rng, int record_stride) {
  if (static_cast<int>(x0.size()) != drift.dimension)
    throw ShapeError("integrate_sde: initial state dimension mismatch");
  if (temperature < 0) throw DomainError("integrate_sde: temperature must be nonnegative");
  if (dt <= 0 || t_max <= 0) throw DomainError("integrate_sde: need dt, t_max > 0");

  TrajectoryRecord rec;
  Vec x = x0;
  double t = 0.0;
  rec.times.push_back(t);
  rec.states.push_back(x);
  const double noise_scale = std::sqrt(2.0 * temperature * dt);
  const long max_steps = static_cast<long>(std::ceil(t_max / dt));
  for (long step = 1; step <= max_steps; ++step) {
    Vec f = drift.eval(x, t);
    if (temperature > 0) {
      for (size_t i = 0; i < x.size(); ++i) x[i] += dt * f[i] + noise_scale * rng.normal();
    } else {
      for (size_t i = 0; i < x.size(); ++i) x[i] += dt * f[i];
    }
    t = step * dt;
    check_state(x, t);
    if (step % record_stride == 0 || step == max_steps) {
      rec.times.push_back(t);
      rec.states.push_back(x);
    }
  }
  rec.converged = false;
  rec.final_residual = norm2(drift.eval(x, t));
  return rec;
}

Vec find_equilibrium(const VectorField& field, const Vec& x0, const IntegratorConfig& cfg) {
  TrajectoryRecord rec = integrate_ode(field, x0, cfg);
  if (!rec.converged)
    throw ConvergenceError("find_equilibrium: no equilibrium before t_max", rec.final_residual);
  return rec.final_state();
}

double max_energy_jump(const TrajectoryRecord& traj) {
  if (traj.energies.empty()) throw DomainError("max_energy_jump: no energies recorded");
  double worst = 0.0;
  for (size_t k = 1; k < traj.energies.size(); ++k)
    worst = std::max(worst, traj.energies[k] - traj.energies[k - 1]);
  return worst;
}

}  // namespace edm::flows
