#pragma once

// Continuous-state Boltzmann machine: overdamped Langevin sampling of a
// parameterized energy, checked against the Gibbs density computed by
// quadrature. Quadrature is trapezoidal on uniform grids and meant for
// one or two dimensions.

#include <functional>
#include <iosfwd>

#include "edm/flows.hpp"
#include "edm/mathcore.hpp"

namespace edm::boltzmann {

struct EnergyModel {
  int dimension = 1;
  std::function<double(const Vec&)> energy;
  std::function<Vec(const Vec&)> gradient;
  double temperature = 1.0;
};

// Analytic gradient vs central differences at random probes in [-r, r]^N;
// returns the worst relative error seen.
double gradient_check(const EnergyModel& model, int probes, double radius, Rng& rng);

struct Grid1D {
  double lo = -1, hi = 1;
  int points = 2;
  double step() const { return (hi - lo) / (points - 1); }
  double at(int i) const { return lo + i * step(); }
};

struct GridND {
  std::vector<Grid1D> axes;
};

struct DensityTable {
  GridND grid;
  Vec values;  // row-major over grid nodes, normalized to integrate to 1
  double value_at(const std::vector<int>& idx) const;
  // 1D only: total density mass between a and b by trapezoid on the grid.
  double mass_1d(double a, double b) const;
};

// exp(-E/T)/Z on the grid nodes, Z by trapezoid quadrature with the min
// energy subtracted before exponentiation so Z never overflows.
DensityTable gibbs_density(const EnergyModel& model, const GridND& grid);

// Euler-Maruyama chain on drift -grad E with noise sqrt(2T); returns the
// post-burn-in states, thinned. Defaults elsewhere: burn_in = 10% of
// steps, thin = 10.
std::vector<Vec> langevin_sample(const EnergyModel& model, const Vec& x0, double dt, long n_steps,
                                 long burn_in, int thin, Rng& rng);

// 1/2 sum over bins |empirical mass - quadrature mass|; samples outside
// the bin range are clamped into the end bins. 1D.
double tv_distance(const std::vector<double>& samples, const DensityTable& table,
                   const std::vector<double>& bin_edges);

// min over a probe shell of <grad E(x), x> / ||x||^2, documenting how
// strongly a test energy confines the chain far from the origin.
double dissipativity_coefficient(const EnergyModel& model, double radius, int probes, Rng& rng);

// Inverse-CDF draws from a 1D density table (test oracle for tv_distance).
std::vector<double> sample_from_table(const DensityTable& table, int n, Rng& rng);

// Single-column CSV of scalar samples (header `x`).
void write_samples_csv(const std::vector<Vec>& samples, std::ostream& os);

// `x,density` CSV of a 1D table.
void write_density_csv(const DensityTable& table, std::ostream& os);

}  // namespace edm::boltzmann
