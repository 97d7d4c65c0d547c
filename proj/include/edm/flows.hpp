#pragma once

// Deterministic and stochastic continuous-time integrators plus
// equilibrium detection and energy monitoring. This is the shared
// inference engine: every model in the library relaxes through here.

#include <functional>
#include <optional>
#include <ostream>

#include "edm/mathcore.hpp"

namespace edm::flows {

struct VectorField {
  int dimension = 0;
  std::function<Vec(const Vec&, double)> eval;  // (state, time) -> derivative
};

// Convenience wrapper for autonomous fields.
VectorField autonomous(int dimension, std::function<Vec(const Vec&)> f);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<double> energies;  // empty when no energy was supplied
  bool converged = false;
  double final_residual = 0.0;

  const Vec& final_state() const { return states.back(); }
  // Header `t,x0..x{N-1}[,energy]`, one row per stored sample.
  void write_csv(std::ostream& os) const;
};

enum class Method { ExplicitEuler, RK4 };

struct IntegratorConfig {
  Method method = Method::RK4;
  double dt = 0.01;
  double t_max = 200.0;
  double equilibrium_tol = tol::equilibrium;
  int record_stride = 1;
};

using EnergyFn = std::function<double(const Vec&)>;

// Integrates until the derivative norm drops below equilibrium_tol or
// t_max is reached. Convergence is declared on the derivative norm, not
// state displacement, so limit cycles report as non-convergence instead
// of false equilibria. Throws DivergenceError past the divergence guard.
TrajectoryRecord integrate_ode(const VectorField& field, const Vec& x0,
                               const IntegratorConfig& cfg,
                               const std::optional<EnergyFn>& energy = std::nullopt);

// Euler-Maruyama: x <- x + drift dt + sqrt(2 T dt) * N(0,1) per coordinate,
// coordinates drawn in ascending order. T = 0 skips the noise draw and is
// then bit-identical to explicit Euler on the same drift.
TrajectoryRecord integrate_sde(const VectorField& drift, double temperature, const Vec& x0,
                               double dt, double t_max, Rng& rng, int record_stride = 1);

// Relax and return the equilibrium; throws ConvergenceError (carrying the
// final residual) if t_max passes first.
Vec find_equilibrium(const VectorField& field, const Vec& x0, const IntegratorConfig& cfg);

// Largest E_{k+1} - E_k over consecutive recorded samples; <= 0 when the
// record is perfectly monotone.
double max_energy_jump(const TrajectoryRecord& traj);

}  // namespace edm::flows
