#include "edm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "edm/boltzmann.hpp"
#include "edm/denseam.hpp"
#include "edm/flows.hpp"
#include "edm/hopfield.hpp"
#include "edm/oscillator.hpp"
#include "edm/plasticity.hpp"
#include "edm/proximal.hpp"

namespace edm::experiments {

namespace fs = std::filesystem;

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvTable::to_string() const {
  std::string out = header + "\n";
  for (const auto& r : rows) {
    out += r;
    out += "\n";
  }
  return out;
}

const CsvTable* ExperimentReport::find_table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

double regression_slope(const Vec& x, const Vec& y) {
  if (x.size() != y.size() || x.size() < 2) throw ShapeError("regression_slope: bad inputs");
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double num = 0, den = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

double welch_p_less(const Vec& a, const Vec& b) {
  auto stats = [](const Vec& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= v.size();
    double s2 = 0;
    for (double x : v) s2 += (x - m) * (x - m);
    s2 /= (v.size() - 1);
    return std::pair<double, double>{m, s2};
  };
  auto [ma, va] = stats(a);
  auto [mb, vb] = stats(b);
  double t = (mb - ma) / std::sqrt(va / a.size() + vb / b.size());
  return 0.5 * std::erfc(t / std::sqrt(2.0));
}

CrossoverResult bit_error_crossover(int n_dim, const std::vector<int>& ks, int n_power, int trials,
                                    double epsilon, std::uint64_t seed, Exec exec) {
  CrossoverResult out;
  denseam::Separation sep = denseam::Separation::power(n_power);
  for (size_t ki = 0; ki < ks.size(); ++ki) {
    const int k = ks[ki];
    std::vector<long> errors(trials, 0);
    run_trials(trials, exec, [&](int t) {
      std::uint64_t trial_index = ki * static_cast<std::uint64_t>(trials) + t;
      Rng rng(seed ^ trial_index);
      plasticity::PatternSet ps = plasticity::random_patterns(n_dim, k, rng);
      denseam::DenseAMModel model{ps, sep, denseam::Similarity::Dot, denseam::Outer::Identity};
      denseam::SpinState state(ps.pattern(0));
      denseam::SweepResult sw =
          denseam::denseam_update_sweep(model, state, denseam::SweepOrder::RandomPermutation, &rng);
      long bad = 0;
      for (int i = 0; i < n_dim; ++i)
        if (sw.state.sigma[i] != ps.pattern(0)[i]) ++bad;
      errors[t] = bad;
    });
    long total = 0;
    for (long e : errors) total += e;
    out.rates.push_back({k, static_cast<double>(total) / (static_cast<double>(trials) * n_dim)});
  }
  out.k_star = std::numeric_limits<double>::quiet_NaN();
  for (size_t i = 0; i < out.rates.size(); ++i) {
    if (out.rates[i].second >= epsilon) {
      if (i == 0) {
        out.k_star = out.rates[0].first;
      } else {
        auto [ka, ra] = out.rates[i - 1];
        auto [kb, rb] = out.rates[i];
        out.k_star = ka + (kb - ka) * (epsilon - ra) / (rb - ra);
      }
      break;
    }
  }
  return out;
}

namespace {

// ---- parameter schema ----

struct ParamSpec {
  enum class Type { Int, Real, Bool, String, RealList, IntList } type;
  json def;
};

using Schema = std::map<std::string, ParamSpec>;

bool type_ok(const ParamSpec& spec, const json& v) {
  using T = ParamSpec::Type;
  switch (spec.type) {
    case T::Int: return v.is_number_integer();
    case T::Real: return v.is_number();
    case T::Bool: return v.is_boolean();
    case T::String: return v.is_string();
    case T::RealList:
      if (!v.is_array()) return false;
      for (const auto& e : v)
        if (!e.is_number()) return false;
      return true;
    case T::IntList:
      if (!v.is_array()) return false;
      for (const auto& e : v)
        if (!e.is_number_integer()) return false;
      return true;
  }
  return false;
}

struct Experiment {
  std::string description;
  Schema schema;
  void (*run)(const json& p, std::uint64_t seed, ExperimentReport& rep);
};

std::vector<int> int_list(const json& v) {
  std::vector<int> out;
  for (const auto& e : v) out.push_back(e.get<int>());
  return out;
}

Vec real_list(const json& v) {
  Vec out;
  for (const auto& e : v) out.push_back(e.get<double>());
  return out;
}

void add_summary(ExperimentReport& rep, const std::string& key, double v) {
  rep.summary.push_back({key, format_value(v)});
}

void add_summary(ExperimentReport& rep, const std::string& key, const std::string& v) {
  rep.summary.push_back({key, v});
}

// ---- hopfield-capacity ----

void run_hopfield_capacity(const json& p, std::uint64_t seed, ExperimentReport& rep) {
  const int n = p["n"], trials = p["trials"];
  const double eps = p["epsilon"];
  std::vector<int> ks;
  for (int k = p["k_min"]; k <= static_cast<int>(p["k_max"]); k += static_cast<int>(p["k_step"]))
    ks.push_back(k);
  CrossoverResult c = bit_error_crossover(n, ks, 2, trials, eps, seed);
  CsvTable t{"bit_error", "K,bit_error_rate", {}};
  for (auto [k, r] : c.rates) t.rows.push_back(std::to_string(k) + "," + format_value(r));
  rep.tables.push_back(std::move(t));
  add_summary(rep, "k_star", c.k_star);
  add_summary(rep, "epsilon", eps);
  add_summary(rep, "k_star_over_n", c.k_star / n);
}

// ---- errorfree-capacity ----

void run_errorfree_capacity(const json& p, std::uint64_t seed, ExperimentReport& rep) {
  const int n = p["n"], draws = p["draws"], k_cap = p["k_cap"];
  const double success = p["success_fraction"];
  Vec kappas = real_list(p["kappas"]);
  // Stability margins are independent of kappa, so compute the worst
  // per-draw margin once per K and reuse it across the kappa grid.
  std::vector<Vec> worst_margin(k_cap + 1);
  for (int k = 1; k <= k_cap; ++k) {
    worst_margin[k].assign(draws, 0.0);
    run_trials(draws, Exec::Parallel, [&](int d) {
      Rng rng(seed ^ (static_cast<std::uint64_t>(k) * 1000 + d));
      plasticity::PatternSet ps = plasticity::random_patterns(n, k, rng);
      Mat w = plasticity::hebbian_weights(ps);
      double worst = -1e300;
      for (int mu = 0; mu < k; ++mu)
        worst = std::max(worst, oscillator::oam_stability_margin(w, ps.pattern(mu)));
      worst_margin[k][d] = worst;
    });
  }
  CsvTable t{"curve", "kappa,K_errorfree,K_scaling_law", {}};
  bool monotone = true;
  int prev = -1;
  for (double kappa : kappas) {
    int best = 0;
    for (int k = 1; k <= k_cap; ++k) {
      int ok = 0;
      for (double m : worst_margin[k])
        if (m < 2.0 * kappa) ++ok;
      if (static_cast<double>(ok) / draws >= success) best = k;
    }
    double law = 2.0 * n * kappa * kappa / std::log(static_cast<double>(n));
    t.rows.push_back(format_value(kappa) + "," + std::to_string(best) + "," + format_value(law));
    if (best < prev) monotone = false;
    prev = best;
  }
  rep.tables.push_back(std::move(t));
  add_summary(rep, "monotone_in_kappa", monotone ? "true" : "false");
}

// ---- denseam-capacity-curve ----

void run_capacity_curve(const json& p, std::uint64_t, ExperimentReport& rep) {
  std::vector<int> ns = int_list(p["n_values"]);
  std::vector<int> powers = int_list(p["powers"]);
  const double alpha = p["alpha"];
  CsvTable t{"capacity_curve", "N,n,K_max_formula", {}};
  for (int deg : powers)
    for (int n : ns)
      t.rows.push_back(std::to_string(n) + "," + std::to_string(deg) + "," +
                       format_value(denseam::capacity_bound(n, deg, alpha)));
  rep.tables.push_back(std::move(t));
  add_summary(rep, "alpha", alpha);
}

// ---- oam-stability-diagram ----

void run_oam_stability(const json& p, std::uint64_t seed, ExperimentReport& rep) {
  const int n = p["n"], k = p["k"], samples = p["samples"];
  Vec stored(samples), corrupted(samples), randoms(samples);
  run_trials(samples, Exec::Parallel, [&](int s) {
    Rng rng(seed ^ static_cast<std::uint64_t>(s));
    plasticity::PatternSet ps = plasticity::random_patterns(n, k, rng);
    Mat w = plasticity::hebbian_weights(ps);
    stored[s] = oscillator::oam_stability_margin(w, ps.pattern(0));
    Vec flipped = ps.pattern(0);
    int idx = rng.uniform_int(n);
    flipped[idx] = -flipped[idx];
    corrupted[s] = oscillator::oam_stability_margin(w, flipped);
    Vec random_cfg(n);
    for (double& v : random_cfg) v = rng.sign();
    randoms[s] = oscillator::oam_stability_margin(w, random_cfg);
  });
  CsvTable t{"stability_histogram", "class,lambda_max", {}};
  for (double v : stored) t.rows.push_back("stored," + format_value(v));
  for (double v : corrupted) t.rows.push_back("corrupted," + format_value(v));
  for (double v : randoms) t.rows.push_back("random," + format_value(v));
  rep.tables.push_back(std::move(t));
  auto mean = [](const Vec& v) {
    double m = 0;
    for (double x : v) m += x;
    return m / v.size();
  };
  add_summary(rep, "mean_stored", mean(stored));
  add_summary(rep, "mean_corrupted", mean(corrupted));
  add_summary(rep, "mean_random", mean(randoms));
  add_summary(rep, "p_stored_below_random", welch_p_less(stored, randoms));
}

// ---- oim-maxcut ----

oscillator::IsingInstance builtin_instance(const std::string& name) {
  using E = oscillator::IsingInstance::Edge;
  if (name == "triangle")
    return oscillator::IsingInstance(3, {E{0, 1, -1}, E{0, 2, -1}, E{1, 2, -1}});
  if (name == "k4")
    return oscillator::IsingInstance(
        4, {E{0, 1, -1}, E{0, 2, -1}, E{0, 3, -1}, E{1, 2, -1}, E{1, 3, -1}, E{2, 3, -1}});
  std::ifstream in(name);
  if (!in) throw ConfigError("oim-maxcut: cannot open instance file " + name);
  return oscillator::load_instance(in);
}

void run_oim_maxcut(const json& p, std::uint64_t seed, ExperimentReport& rep) {
  oscillator::IsingInstance inst = builtin_instance(p["instance"]);
  const int restarts = p["restarts"];
  auto schedule = oscillator::linear_ramp_schedule(p["t_total"], p["segments"], p["kappa_max"]);
  flows::IntegratorConfig cfg;
  cfg.dt = p["dt"];
  cfg.t_max = 1.0;  // overridden per segment
  cfg.equilibrium_tol = 1e-7;
  Rng rng(seed);
  oscillator::OimResult res = oscillator::oim_solve(inst, schedule, restarts, rng, cfg);
  CsvTable t{"restarts", "restart,H,converged", {}};
  for (size_t r = 0; r < res.restarts.size(); ++r)
    t.rows.push_back(std::to_string(r) + "," + format_value(res.restarts[r].h) + "," +
                     (res.restarts[r].converged ? "1" : "0"));
  rep.tables.push_back(std::move(t));
  add_summary(rep, "best_H", res.h);
  if (inst.paper_weights())
    add_summary(rep, "cut", (static_cast<double>(inst.edges.size()) - res.h) / 2.0);
  std::string sigma;
  for (double s : res.sigma) sigma += s > 0 ? '+' : '-';
  add_summary(rep, "sigma", sigma);
}

// ---- langevin-stationarity ----

void run_langevin(const json& p, std::uint64_t seed, ExperimentReport& rep) {
  boltzmann::EnergyModel dw;
  dw.dimension = 1;
  dw.temperature = p["temperature"];
  dw.energy = [](const Vec& x) { return 0.25 * std::pow(x[0], 4) - 0.5 * x[0] * x[0]; };
  dw.gradient = [](const Vec& x) { return Vec{x[0] * x[0] * x[0] - x[0]}; };

  boltzmann::GridND grid{{boltzmann::Grid1D{p["grid_lo"], p["grid_hi"], p["grid_points"]}}};
  boltzmann::DensityTable table = boltzmann::gibbs_density(dw, grid);
  Rng rng(seed);
  auto samples = boltzmann::langevin_sample(dw, Vec{0.1}, p["dt"], p["steps"], p["burn_in"],
                                            p["thin"], rng);
  std::vector<double> xs(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) xs[i] = samples[i][0];
  const int bins = p["bins"];
  std::vector<double> edges(bins + 1);
  for (int i = 0; i <= bins; ++i)
    edges[i] = grid.axes[0].lo + (grid.axes[0].hi - grid.axes[0].lo) * i / bins;
  double tv = boltzmann::tv_distance(xs, table, edges);

  CsvTable hist{"histogram", "bin_center,empirical_mass,quadrature_mass", {}};
  {
    std::vector<double> emp(bins, 0.0);
    for (double x : xs) {
      int b = std::min(bins - 1, std::max(0, static_cast<int>((x - edges[0]) /
                                                              (edges[1] - edges[0]))));
      emp[b] += 1.0 / xs.size();
    }
    for (int b = 0; b < bins; ++b)
      hist.rows.push_back(format_value(0.5 * (edges[b] + edges[b + 1])) + "," +
                          format_value(emp[b]) + "," +
                          format_value(table.mass_1d(edges[b], edges[b + 1])));
  }
  rep.tables.push_back(std::move(hist));

  // Ornstein-Uhlenbeck variance across temperatures
  Vec temps = real_list(p["ou_temperatures"]);
  const long ou_steps = p["ou_steps"];
  CsvTable ou{"ou", "T,sample_variance", {}};
  Vec variances;
  for (size_t ti = 0; ti < temps.size(); ++ti) {
    boltzmann::EnergyModel model;
    model.dimension = 1;
    model.temperature = temps[ti];
    model.energy = [](const Vec& x) { return 0.5 * x[0] * x[0]; };
    model.gradient = [](const Vec& x) { return Vec{x[0]}; };
    Rng chain_rng(seed ^ (0x100 + ti));
    auto s = boltzmann::langevin_sample(model, Vec{0.0}, p["dt"], ou_steps, ou_steps / 10, 10,
                                        chain_rng);
    double m = 0, v = 0;
    for (const Vec& x : s) m += x[0];
    m /= s.size();
    for (const Vec& x : s) v += (x[0] - m) * (x[0] - m);
    v /= (s.size() - 1);
    variances.push_back(v);
    ou.rows.push_back(format_value(temps[ti]) + "," + format_value(v));
  }
  rep.tables.push_back(std::move(ou));

  // deterministic descent trace for the trajectory plot kind
  flows::VectorField grad_flow{1, [&dw](const Vec& x, double) {
                                 Vec g = dw.gradient(x);
                                 for (double& v : g) v = -v;
                                 return g;
                               }};
  flows::IntegratorConfig tcfg;
  tcfg.dt = 0.01;
  tcfg.t_max = 10.0;
  tcfg.record_stride = 10;
  flows::TrajectoryRecord traj =
      flows::integrate_ode(grad_flow, Vec{0.1}, tcfg, flows::EnergyFn(dw.energy));
  std::ostringstream ts;
  traj.write_csv(ts);
  CsvTable traj_table{"trajectory", "", {}};
  std::istringstream lines(ts.str());
  std::string line;
  std::getline(lines, line);
  traj_table.header = line;
  while (std::getline(lines, line)) traj_table.rows.push_back(line);
  rep.tables.push_back(std::move(traj_table));

  Rng probe_rng(seed ^ 0xabc);
  add_summary(rep, "tv_distance", tv);
  add_summary(rep, "dissipativity_a", boltzmann::dissipativity_coefficient(dw, 3.0, 64, probe_rng));
  for (size_t ti = 0; ti < temps.size(); ++ti)
    add_summary(rep, "ou_variance_T" + format_value(temps[ti]), variances[ti]);
}

// ---- oja-pca ----

void run_oja(const json& p, std::uint64_t seed, ExperimentReport& rep) {
  const int instances = p["instances"], dim = p["dim"];
  const double gap_min = p["gap_min"];
  plasticity::LearnConfig cfg;
  cfg.eta = p["eta"];
  cfg.steps = p["steps"];
  CsvTable t{"pca", "instance,alignment,final_norm,eig_ratio", {}};
  double worst_align = 1.0, worst_norm_dev = 0.0;
  for (int inst = 0; inst < instances; ++inst) {
    Rng rng(seed ^ static_cast<std::uint64_t>(inst));
    // random orthogonal basis from the eigenvectors of a random symmetric matrix
    Mat s(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) s(i, j) = s(j, i) = rng.normal();
    Mat v = sym_eig(s).eigenvectors;
    Vec lambda(dim);
    lambda[0] = 2.0;
    double ratio = gap_min + rng.uniform() * 1.5;
    lambda[1] = lambda[0] / ratio;
    for (int i = 2; i < dim; ++i) lambda[i] = lambda[i - 1] * 0.7;
    plasticity::DataSampler sampler = [&v, &lambda, dim](Rng& r) {
      Vec z(dim);
      for (int i = 0; i < dim; ++i) z[i] = std::sqrt(lambda[i]) * r.normal();
      return v.matvec(z);
    };
    Vec w0(dim);
    for (double& x : w0) x = rng.normal();
    double n0 = norm2(w0);
    for (double& x : w0) x /= n0;
    Vec w = plasticity::oja_train(sampler, w0, cfg, rng);
    Vec v1(dim);
    for (int i = 0; i < dim; ++i) v1[i] = v(i, 0);
    double align = std::fabs(dot(w, v1)) / norm2(w);
    t.rows.push_back(std::to_string(inst) + "," + format_value(align) + "," +
                     format_value(norm2(w)) + "," + format_value(ratio));
    worst_align = std::min(worst_align, align);
    worst_norm_dev = std::max(worst_norm_dev, std::fabs(norm2(w) - 1.0));
  }
  rep.tables.push_back(std::move(t));
  add_summary(rep, "min_alignment", worst_align);
  add_summary(rep, "max_norm_deviation", worst_norm_dev);
}

// ---- eqprop-gradcheck ----

void run_eqprop(const json& p, std::uint64_t seed, ExperimentReport& rep) {
  const int instances = p["instances"], max_dim = p["max_dim"];
  Vec betas = real_list(p["betas"]);
  const double beta_ref = p["beta_ref"];
  CsvTable t{"gradcheck", "instance,beta,rel_error", {}};
  double worst_ref_err = 0.0;
  Vec slopes;
  flows::IntegratorConfig relax;
  relax.dt = 0.2;
  relax.t_max = 400.0;
  relax.equilibrium_tol = 1e-12;
  relax.record_stride = 1000;
  for (int inst = 0; inst < instances; ++inst) {
    Rng rng(seed ^ static_cast<std::uint64_t>(inst));
    int n = 2 + rng.uniform_int(max_dim - 1);
    Mat w(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) w(i, j) = w(j, i) = 0.25 * rng.normal() / std::sqrt(n);
    // keep I - W well conditioned
    EigResult eig = sym_eig(w);
    double top = std::max(std::fabs(eig.eigenvalues.front()), std::fabs(eig.eigenvalues.back()));
    if (top > 0.6) w = w.scaled(0.6 / top);
    Vec u(n), yt(n);
    for (double& x : u) x = rng.normal();
    for (double& x : yt) x = rng.normal();

    plasticity::QuadraticEqProp quad{n};
    plasticity::EqPropModel model = quad.model();
    Vec theta = plasticity::QuadraticEqProp::pack(w);
    auto loss = plasticity::Loss::squared();
    auto out = plasticity::OutputMap::identity();
    Vec x0(n, 0.0);

    auto objective = [&](const Vec& th) {
      flows::VectorField f{n, [&](const Vec& x, double) {
                             Vec g = model.grad_x(x, th, u);
                             for (double& v : g) v = -v;
                             return g;
                           }};
      Vec xs = flows::find_equilibrium(f, x0, relax);
      return loss.value(out.value(xs), yt);
    };
    Vec grad_true = fd_gradient(objective, theta, 1e-5);

    Vec log_beta, log_err;
    for (double beta : betas) {
      plasticity::EqPropConfig cfg;
      cfg.beta = beta;
      cfg.relax = relax;
      plasticity::EqPropResult r =
          plasticity::eqprop_gradient(model, out, loss, theta, u, yt, cfg, x0);
      double err = norm2(r.grad_estimate - grad_true) / std::max(1e-300, norm2(grad_true));
      t.rows.push_back(std::to_string(inst) + "," + format_value(beta) + "," + format_value(err));
      log_beta.push_back(std::log(beta));
      log_err.push_back(std::log(err));
      if (beta == beta_ref) worst_ref_err = std::max(worst_ref_err, err);
    }
    slopes.push_back(regression_slope(log_beta, log_err));
  }
  rep.tables.push_back(std::move(t));
  double mean_slope = 0;
  double min_slope = slopes[0], max_slope = slopes[0];
  for (double s : slopes) {
    mean_slope += s;
    min_slope = std::min(min_slope, s);
    max_slope = std::max(max_slope, s);
  }
  add_summary(rep, "max_rel_error_at_beta_ref", worst_ref_err);
  add_summary(rep, "mean_slope", mean_slope / slopes.size());
  add_summary(rep, "min_slope", min_slope);
  add_summary(rep, "max_slope", max_slope);
}

// ---- lasso-equivalence ----

void run_lasso(const json& p, std::uint64_t seed, ExperimentReport& rep) {
  const int problems = p["problems"], m = p["m"], n = p["n"];
  CsvTable t{"objectives", "problem,obj_network,obj_oracle,gap", {}};
  double worst_gap = 0.0;
  flows::IntegratorConfig cfg;
  cfg.dt = 0.02;
  cfg.t_max = 2000.0;
  cfg.equilibrium_tol = 1e-10;
  cfg.record_stride = 100000;
  for (int prob_idx = 0; prob_idx < problems; ++prob_idx) {
    Rng rng(seed ^ static_cast<std::uint64_t>(prob_idx));
    Mat theta(m, n);
    for (int j = 0; j < n; ++j) {
      double norm = 0;
      for (int i = 0; i < m; ++i) {
        theta(i, j) = rng.normal();
        norm += theta(i, j) * theta(i, j);
      }
      norm = std::sqrt(norm);
      for (int i = 0; i < m; ++i) theta(i, j) /= norm;
    }
    Vec u(m);
    for (double& x : u) x = rng.normal();
    double lambda = 0.1 + 0.4 * rng.uniform();
    proximal::LassoProblem problem(theta, u, lambda);
    flows::VectorField f{n, [&problem](const Vec& x, double) {
                           return proximal::lasso_network_field(problem, x);
                         }};
    Vec x_net = flows::find_equilibrium(f, Vec(n, 0.0), cfg);
    Vec x_oracle = proximal::lasso_oracle(problem);
    double obj_net = proximal::lasso_objective(problem, x_net);
    double obj_oracle = proximal::lasso_objective(problem, x_oracle);
    double gap = std::fabs(obj_net - obj_oracle);
    worst_gap = std::max(worst_gap, gap);
    t.rows.push_back(std::to_string(prob_idx) + "," + format_value(obj_net) + "," +
                     format_value(obj_oracle) + "," + format_value(gap));
  }
  rep.tables.push_back(std::move(t));
  // identity-dictionary closed form: u = (1, 0.1), lambda = 0.3 -> (0.7, 0)
  proximal::LassoProblem id_prob(Mat::identity(2), Vec{1.0, 0.1}, 0.3);
  flows::VectorField f{2, [&id_prob](const Vec& x, double) {
                         return proximal::lasso_network_field(id_prob, x);
                       }};
  Vec x_id = flows::find_equilibrium(f, Vec(2, 0.0), cfg);
  double closed_err = std::max(std::fabs(x_id[0] - 0.7), std::fabs(x_id[1]));
  add_summary(rep, "max_gap", worst_gap);
  add_summary(rep, "closed_form_error", closed_err);
}

// ---- wta-and-contrast ----

void run_wta(const json& p, std::uint64_t seed, ExperimentReport& rep) {
  if (p["motif"] != "ek-i")
    throw ConfigError("wta-and-contrast: only the ek-i motif is registered");
  const int k = p["k"], draws = p["draws"];
  proximal::EINetwork net =
      proximal::EINetwork::ek_i(k, p["w_ee"], p["w_ei"], p["w_ie"], p["w_ii"]);
  proximal::MonoReport mono = proximal::monostability_check(net);
  flows::IntegratorConfig cfg;
  cfg.dt = 0.02;
  cfg.t_max = 400.0;
  cfg.equilibrium_tol = 1e-9;
  cfg.record_stride = 100000;
  const double margin = p["stimulus_margin"];
  CsvTable t{"wta", "draw,predicted,simulated_argmax,match", {}};
  int matches = 0;
  std::vector<int> predicted(draws), simulated(draws);
  run_trials(draws, Exec::Parallel, [&](int d) {
    Rng rng(seed ^ static_cast<std::uint64_t>(d));
    proximal::WtaPrediction pred;
    Vec u(k);
    int winner = rng.uniform_int(k);
    for (int i = 0; i < k; ++i) {
      double delta = 1.0 - net.w_ee + net.w_ei;
      if (i == winner)
        u[i] = delta + 1e-3 + margin * rng.uniform();
      else
        u[i] = -delta - 1e-3 - margin * rng.uniform();
    }
    pred = proximal::wta_predict(net, u);
    Vec eq = proximal::wta_simulate(net, u, cfg);
    int argmax = 0;
    for (int i = 1; i < k; ++i)
      if (eq[i] > eq[argmax]) argmax = i;
    predicted[d] = pred.winner ? *pred.winner : -1;
    simulated[d] = argmax;
  });
  for (int d = 0; d < draws; ++d) {
    bool match = predicted[d] == simulated[d];
    if (match) ++matches;
    t.rows.push_back(std::to_string(d) + "," + std::to_string(predicted[d]) + "," +
                     std::to_string(simulated[d]) + "," + (match ? "1" : "0"));
  }
  rep.tables.push_back(std::move(t));

  // layered contrast enhancement
  const double c_w_ee = p["contrast_w_ee"], c_w_ii = p["contrast_w_ii"];
  const double c_w_ie = 1.0 + c_w_ii;
  // w_ei placing the rectified-loser gain of a column at 1/w_ee - 1
  const double c_w_ei = c_w_ee / (1.0 - c_w_ee) - (1.0 - c_w_ee);
  const double delta = 1.0 - c_w_ee + c_w_ei;
  const double eps = static_cast<double>(p["contrast_eps_fraction"]) * delta;
  proximal::ContrastLayers layers = proximal::contrast_layers_needed(c_w_ee, eps, delta);
  proximal::LadderResult ladder = proximal::contrast_ladder_simulate(
      c_w_ee, c_w_ei, c_w_ie, c_w_ii, eps, layers.recurrence_layers, cfg);
  CsvTable ct{"contrast", "layer,contrast,gain", {}};
  ct.rows.push_back("0," + format_value(ladder.contrasts[0]) + ",");
  for (size_t l = 0; l < ladder.gains.size(); ++l)
    ct.rows.push_back(std::to_string(l + 1) + "," + format_value(ladder.contrasts[l + 1]) + "," +
                      format_value(ladder.gains[l]));
  rep.tables.push_back(std::move(ct));

  double mean_gain = 0;
  int interior = 0;
  for (size_t l = 0; l + 1 < ladder.gains.size(); ++l) {
    mean_gain += ladder.gains[l];
    ++interior;
  }
  if (interior > 0) mean_gain /= interior;
  add_summary(rep, "wta_matches", static_cast<double>(matches));
  add_summary(rep, "wta_draws", static_cast<double>(draws));
  add_summary(rep, "monostable", mono.ok ? "true" : "false");
  add_summary(rep, "delta", delta);
  add_summary(rep, "recurrence_layers", static_cast<double>(layers.recurrence_layers));
  add_summary(rep, "formula_value", layers.formula_value);
  add_summary(rep, "mean_gain", mean_gain);
  add_summary(rep, "target_gain", 1.0 / c_w_ee - 1.0);
  add_summary(rep, "final_contrast", ladder.contrasts.back());
}

const std::map<std::string, Experiment>& table() {
  using T = ParamSpec::Type;
  static const std::map<std::string, Experiment> reg = {
      {"hopfield-capacity",
       {"single-sweep bit-error rate of the n=2 memory vs pattern count",
        {{"n", {T::Int, 200}},
         {"trials", {T::Int, 200}},
         {"k_min", {T::Int, 10}},
         {"k_max", {T::Int, 60}},
         {"k_step", {T::Int, 5}},
         {"epsilon", {T::Real, 0.01}}},
        run_hopfield_capacity}},
      {"errorfree-capacity",
       {"largest all-patterns-stable K of the oscillator memory vs kappa",
        {{"n", {T::Int, 32}},
         {"draws", {T::Int, 10}},
         {"k_cap", {T::Int, 20}},
         {"success_fraction", {T::Real, 0.9}},
         {"kappas", {T::RealList, json::array({0.1, 0.2, 0.3, 0.4, 0.5})}}},
        run_errorfree_capacity}},
      {"denseam-capacity-curve",
       {"formula storage capacity across sizes and separation powers",
        {{"n_values", {T::IntList, json::array({50, 100, 200, 400})}},
         {"powers", {T::IntList, json::array({2, 3})}},
         {"alpha", {T::Real, 2.576}}},
        run_capacity_curve}},
      {"oam-stability-diagram",
       {"stability margins of stored, corrupted, and random configurations",
        {{"n", {T::Int, 50}}, {"k", {T::Int, 3}}, {"samples", {T::Int, 200}}},
        run_oam_stability}},
      {"oim-maxcut",
       {"oscillator Ising machine on a MaxCut instance with a kappa ramp",
        {{"instance", {T::String, "triangle"}},
         {"restarts", {T::Int, 20}},
         {"t_total", {T::Real, 30.0}},
         {"segments", {T::Int, 30}},
         {"kappa_max", {T::Real, 1.0}},
         {"dt", {T::Real, 0.05}}},
        run_oim_maxcut}},
      {"langevin-stationarity",
       {"double-well sampling vs quadrature density plus OU variance sweep",
        {{"temperature", {T::Real, 0.5}},
         {"dt", {T::Real, 1e-3}},
         {"steps", {T::Int, 1000000}},
         {"burn_in", {T::Int, 100000}},
         {"thin", {T::Int, 10}},
         {"grid_lo", {T::Real, -3.5}},
         {"grid_hi", {T::Real, 3.5}},
         {"grid_points", {T::Int, 2001}},
         {"bins", {T::Int, 50}},
         {"ou_steps", {T::Int, 20000000}},
         {"ou_temperatures", {T::RealList, json::array({0.5, 1.0, 2.0})}}},
        run_langevin}},
      {"oja-pca",
       {"principal-component extraction on random covariances",
        {{"instances", {T::Int, 10}},
         {"dim", {T::Int, 6}},
         {"gap_min", {T::Real, 1.5}},
         {"eta", {T::Real, 5e-4}},
         {"steps", {T::Int, 400000}}},
        run_oja}},
      {"eqprop-gradcheck",
       {"two-phase gradient estimates vs finite differences on quadratic nets",
        {{"instances", {T::Int, 20}},
         {"max_dim", {T::Int, 10}},
         {"betas", {T::RealList, json::array({1e-1, 1e-2, 1e-3, 1e-4})}},
         {"beta_ref", {T::Real, 1e-3}}},
        run_eqprop}},
      {"lasso-equivalence",
       {"competitive-network equilibria vs coordinate-descent minimizers",
        {{"problems", {T::Int, 50}}, {"m", {T::Int, 5}}, {"n", {T::Int, 8}}},
        run_lasso}},
      {"wta-and-contrast",
       {"winner-take-all prediction vs simulation and layered contrast gain",
        {{"motif", {T::String, "ek-i"}},
         {"k", {T::Int, 5}},
         {"draws", {T::Int, 100}},
         {"w_ee", {T::Real, 0.15}},
         {"w_ei", {T::Real, 0.5}},
         {"w_ie", {T::Real, 1.25}},
         {"w_ii", {T::Real, 0.25}},
         {"stimulus_margin", {T::Real, 0.5}},
         {"contrast_w_ee", {T::Real, 0.45}},
         {"contrast_w_ii", {T::Real, 0.25}},
         {"contrast_eps_fraction", {T::Real, 0.1}}},
        run_wta}},
  };
  return reg;
}

}  // namespace

std::vector<ExperimentInfo> registry() {
  std::vector<ExperimentInfo> out;
  for (const auto& [name, exp] : table()) out.push_back({name, exp.description});
  return out;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [key, _] : j.items())
    if (key != "experiment" && key != "seed" && key != "params" && key != "out_dir")
      throw ConfigError("config: unknown key '" + key + "'");
  ExperimentConfig cfg;
  if (!j.contains("experiment") || !j["experiment"].is_string())
    throw ConfigError("config: 'experiment' (string) is required");
  cfg.experiment = j["experiment"];
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      throw ConfigError("config: 'seed' must be a nonnegative integer");
    long long s = j["seed"].get<long long>();
    if (s < 0) throw ConfigError("config: 'seed' must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("config: 'params' must be an object");
    cfg.params = j["params"];
  }
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) throw ConfigError("config: 'out_dir' must be a string");
    cfg.out_dir = j["out_dir"];
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  return parse_config(j);
}

void validate(const ExperimentConfig& cfg) {
  auto it = table().find(cfg.experiment);
  if (it == table().end()) throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  const Schema& schema = it->second.schema;
  for (const auto& [key, value] : cfg.params.items()) {
    auto sit = schema.find(key);
    if (sit == schema.end())
      throw ConfigError("experiment " + cfg.experiment + ": unknown param '" + key + "'");
    if (!type_ok(sit->second, value))
      throw ConfigError("experiment " + cfg.experiment + ": param '" + key + "' has wrong type");
  }
}

json effective_params(const ExperimentConfig& cfg) {
  const Schema& schema = table().at(cfg.experiment).schema;
  json p = json::object();
  for (const auto& [key, spec] : schema) p[key] = spec.def;
  for (const auto& [key, value] : cfg.params.items()) p[key] = value;
  return p;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const Experiment& exp = table().at(cfg.experiment);
  json params = effective_params(cfg);

  ExperimentReport rep;
  rep.experiment = cfg.experiment;
  rep.seed = cfg.seed;
  rep.config_echo = {{"experiment", cfg.experiment},
                     {"seed", cfg.seed},
                     {"params", params},
                     {"out_dir", cfg.out_dir}};

  auto t0 = std::chrono::steady_clock::now();
  try {
    exp.run(params, cfg.seed, rep);
  } catch (const std::exception& e) {
    throw EvalError("experiment " + cfg.experiment + " failed: " + e.what());
  }
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    std::vector<std::string> written;
    try {
      for (const CsvTable& t : rep.tables) {
        std::string path = (fs::path(cfg.out_dir) / (cfg.experiment + "_" + t.name + ".csv")).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw EvalError("cannot write " + path);
        out << t.to_string();
        written.push_back(path);
      }
      {
        CsvTable st{"summary", "key,value", {}};
        for (const auto& [k, v] : rep.summary) st.rows.push_back(k + "," + v);
        std::string path =
            (fs::path(cfg.out_dir) / (cfg.experiment + "_summary.csv")).string();
        std::ofstream out(path, std::ios::binary);
        out << st.to_string();
        written.push_back(path);
      }
      {
        std::string path = (fs::path(cfg.out_dir) / "config_echo.json").string();
        std::ofstream out(path, std::ios::binary);
        out << rep.config_echo.dump(2) << "\n";
        written.push_back(path);
      }
    } catch (...) {
      for (const std::string& p : written) fs::remove(p);
      throw;
    }
    rep.written_files = written;
  }
  return rep;
}

std::string emit_plotdata(const ExperimentReport& report, const std::string& kind,
                          const std::string& out_dir) {
  if (kind != "capacity_curve" && kind != "stability_histogram" && kind != "trajectory")
    throw ConfigError("emit_plotdata: unknown kind '" + kind + "'");
  const CsvTable* t = report.find_table(kind);
  if (!t) throw ConfigError("emit_plotdata: report has no '" + kind + "' series");
  fs::create_directories(out_dir);
  std::string path = (fs::path(out_dir) / (report.experiment + "_" + kind + ".csv")).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EvalError("emit_plotdata: cannot write " + path);
  out << t->to_string();
  return path;
}

}  // namespace edm::experiments
