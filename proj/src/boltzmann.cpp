#include "edm/boltzmann.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace edm::boltzmann {

double gradient_check(const EnergyModel& model, int probes, double radius, Rng& rng) {
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    Vec x(model.dimension);
    for (double& xi : x) xi = rng.uniform(-radius, radius);
    Vec ga = model.gradient(x);
    Vec gf = fd_gradient(model.energy, x, 1e-6);
    double scale = std::max(1.0, norm2(gf));
    worst = std::max(worst, norm2(ga - gf) / scale);
  }
  return worst;
}

double DensityTable::value_at(const std::vector<int>& idx) const {
  if (idx.size() != grid.axes.size()) throw ShapeError("DensityTable: index rank mismatch");
  size_t flat = 0;
  for (size_t d = 0; d < idx.size(); ++d) flat = flat * grid.axes[d].points + idx[d];
  return values[flat];
}

double DensityTable::mass_1d(double a, double b) const {
  if (grid.axes.size() != 1) throw ShapeError("mass_1d: table is not one-dimensional");
  const Grid1D& ax = grid.axes[0];
  if (a > b) std::swap(a, b);
  a = std::max(a, ax.lo);
  b = std::min(b, ax.hi);
  if (a >= b) return 0.0;
  auto density_at = [&](double x) {
    double u = (x - ax.lo) / ax.step();
    int i = std::min(static_cast<int>(u), ax.points - 2);
    double frac = u - i;
    return values[i] * (1 - frac) + values[i + 1] * frac;
  };
  // trapezoid over grid segments clipped to [a, b]
  double mass = 0.0;
  int i0 = static_cast<int>((a - ax.lo) / ax.step());
  int i1 = std::min(static_cast<int>((b - ax.lo) / ax.step()) + 1, ax.points - 1);
  double prev_x = a, prev_f = density_at(a);
  for (int i = i0 + 1; i <= i1; ++i) {
    double x = std::min(ax.at(i), b);
    double f = density_at(x);
    mass += 0.5 * (prev_f + f) * (x - prev_x);
    prev_x = x;
    prev_f = f;
    if (x >= b) break;
  }
  return mass;
}

namespace {

// trapezoid weight of node i on a uniform 1D grid
double trapz_w(int i, int points) { return (i == 0 || i == points - 1) ? 0.5 : 1.0; }

}  // namespace

DensityTable gibbs_density(const EnergyModel& model, const GridND& grid) {
  if (grid.axes.empty() || static_cast<int>(grid.axes.size()) != model.dimension)
    throw ShapeError("gibbs_density: grid rank must match model dimension");
  for (const auto& ax : grid.axes) {
    if (ax.points < 2) throw DomainError("gibbs_density: each axis needs >= 2 points");
    if (!(std::isfinite(ax.lo) && std::isfinite(ax.hi)) || ax.lo >= ax.hi)
      throw DomainError("gibbs_density: bad axis bounds");
  }
  size_t total = 1;
  for (const auto& ax : grid.axes) total *= ax.points;

  Vec energies(total);
  std::vector<int> idx(grid.axes.size(), 0);
  Vec x(grid.axes.size());
  double emin = 0;
  bool first = true;
  for (size_t flat = 0; flat < total; ++flat) {
    size_t rem = flat;
    for (int d = static_cast<int>(grid.axes.size()) - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(rem % grid.axes[d].points);
      rem /= grid.axes[d].points;
    }
    for (size_t d = 0; d < x.size(); ++d) x[d] = grid.axes[d].at(idx[d]);
    double e = model.energy(x);
    if (!std::isfinite(e)) throw EvalError("gibbs_density: non-finite energy on grid");
    energies[flat] = e;
    if (first || e < emin) emin = e, first = false;
  }

  DensityTable table;
  table.grid = grid;
  table.values.resize(total);
  double z = 0.0;
  double cell = 1.0;
  for (const auto& ax : grid.axes) cell *= ax.step();
  for (size_t flat = 0; flat < total; ++flat) {
    size_t rem = flat;
    double w = 1.0;
    for (int d = static_cast<int>(grid.axes.size()) - 1; d >= 0; --d) {
      int id = static_cast<int>(rem % grid.axes[d].points);
      rem /= grid.axes[d].points;
      w *= trapz_w(id, grid.axes[d].points);
    }
    table.values[flat] = std::exp(-(energies[flat] - emin) / model.temperature);
    z += w * table.values[flat] * cell;
  }
  for (double& v : table.values) v /= z;
  return table;
}

std::vector<Vec> langevin_sample(const EnergyModel& model, const Vec& x0, double dt, long n_steps,
                                 long burn_in, int thin, Rng& rng) {
  if (dt <= 0) throw DomainError("langevin_sample: dt must be positive");
  if (burn_in >= n_steps) throw DomainError("langevin_sample: burn_in must be < n_steps");
  if (thin < 1) throw DomainError("langevin_sample: thin must be >= 1");
  if (static_cast<int>(x0.size()) != model.dimension)
    throw ShapeError("langevin_sample: x0 dimension mismatch");

  std::vector<Vec> out;
  out.reserve(static_cast<size_t>((n_steps - burn_in) / thin) + 1);
  Vec x = x0;
  const double noise_scale = std::sqrt(2.0 * model.temperature * dt);
  for (long step = 1; step <= n_steps; ++step) {
    Vec g = model.gradient(x);
    for (size_t i = 0; i < x.size(); ++i) x[i] += -dt * g[i] + noise_scale * rng.normal();
    for (double v : x)
      if (!std::isfinite(v) || std::fabs(v) > tol::divergence_guard)
        throw DivergenceError("langevin_sample: chain diverged", step * dt);
    if (step > burn_in && (step - burn_in) % thin == 0) out.push_back(x);
  }
  return out;
}

double tv_distance(const std::vector<double>& samples, const DensityTable& table,
                   const std::vector<double>& bin_edges) {
  if (samples.size() < 1000) throw DomainError("tv_distance: need at least 1000 samples");
  if (bin_edges.size() < 2) throw DomainError("tv_distance: need at least one bin");
  const size_t nbins = bin_edges.size() - 1;
  std::vector<double> emp(nbins, 0.0), quad(nbins, 0.0);
  const double lo = bin_edges.front(), hi = bin_edges.back();
  for (double s : samples) {
    double c = std::min(std::max(s, lo), hi);
    size_t b = nbins - 1;
    for (size_t i = 0; i < nbins; ++i)
      if (c < bin_edges[i + 1]) {
        b = i;
        break;
      }
    emp[b] += 1.0;
  }
  for (double& e : emp) e /= static_cast<double>(samples.size());
  for (size_t i = 0; i < nbins; ++i) quad[i] = table.mass_1d(bin_edges[i], bin_edges[i + 1]);
  double tv = 0.0;
  for (size_t i = 0; i < nbins; ++i) tv += std::fabs(emp[i] - quad[i]);
  return 0.5 * tv;
}

double dissipativity_coefficient(const EnergyModel& model, double radius, int probes, Rng& rng) {
  double worst = 0.0;
  bool first = true;
  for (int p = 0; p < probes; ++p) {
    Vec x(model.dimension);
    double n = 0;
    for (double& xi : x) {
      xi = rng.normal();
      n += xi * xi;
    }
    n = std::sqrt(n);
    for (double& xi : x) xi *= radius / n;
    double a = dot(model.gradient(x), x) / (radius * radius);
    if (first || a < worst) worst = a, first = false;
  }
  return worst;
}

std::vector<double> sample_from_table(const DensityTable& table, int n, Rng& rng) {
  if (table.grid.axes.size() != 1) throw ShapeError("sample_from_table: 1D only");
  const Grid1D& ax = table.grid.axes[0];
  // cumulative trapezoid masses per segment
  std::vector<double> cdf(ax.points, 0.0);
  for (int i = 1; i < ax.points; ++i)
    cdf[i] = cdf[i - 1] + 0.5 * (table.values[i - 1] + table.values[i]) * ax.step();
  double total = cdf.back();
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) {
    double u = rng.uniform() * total;
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    int i = std::max(1, static_cast<int>(it - cdf.begin()));
    double seg = cdf[i] - cdf[i - 1];
    double frac = seg > 0 ? (u - cdf[i - 1]) / seg : 0.5;
    out[k] = ax.at(i - 1) + frac * ax.step();
  }
  return out;
}

void write_samples_csv(const std::vector<Vec>& samples, std::ostream& os) {
  os << "x\n";
  char buf[64];
  for (const Vec& s : samples) {
    if (s.size() != 1) throw ShapeError("write_samples_csv: scalar samples only");
    std::snprintf(buf, sizeof buf, "%.17g", s[0]);
    os << buf << "\n";
  }
}

void write_density_csv(const DensityTable& table, std::ostream& os) {
  if (table.grid.axes.size() != 1) throw ShapeError("write_density_csv: 1D tables only");
  os << "x,density\n";
  char buf[64];
  const Grid1D& ax = table.grid.axes[0];
  for (int i = 0; i < ax.points; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", ax.at(i));
    os << buf << ",";
    std::snprintf(buf, sizeof buf, "%.17g", table.values[i]);
    os << buf << "\n";
  }
}

}  // namespace edm::boltzmann
