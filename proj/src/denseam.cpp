#include "edm/denseam.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

namespace edm::denseam {

Separation Separation::power(int n) {
  if (n < 2) throw DomainError("Separation: power degree must be >= 2");
  Separation s;
  s.kind = Kind::Power;
  s.n = n;
  return s;
}

Separation Separation::exp() {
  Separation s;
  s.kind = Kind::Exp;
  return s;
}

namespace {

double int_pow(double s, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= s;
  return r;
}

}  // namespace

double Separation::f(double s) const {
  if (kind == Kind::Exp) return std::exp(s);
  return int_pow(s, n) / n;
}

double Separation::phi(double s) const {
  if (kind == Kind::Exp) return std::exp(s);
  return int_pow(s, n - 1);
}

SpinState::SpinState(Vec s) : sigma(std::move(s)) {
  if (sigma.empty()) throw ShapeError("SpinState: empty state");
  for (double v : sigma)
    if (v != 1.0 && v != -1.0) throw DomainError("SpinState: entries must be exactly +-1");
}

namespace {

double similarity_value(const DenseAMModel& model, double overlap) {
  // For +-1 vectors ||xi - sigma||^2 = 2(N - xi.sigma).
  if (model.similarity == Similarity::Dot) return overlap;
  return 2.0 * overlap - 2.0 * model.patterns.n;
}

Vec overlaps(const DenseAMModel& model, const Vec& sigma) {
  Vec o(model.patterns.k, 0.0);
  for (int mu = 0; mu < model.patterns.k; ++mu) o[mu] = dot(model.patterns.pattern(mu), sigma);
  return o;
}

double energy_from_overlaps(const DenseAMModel& model, const Vec& o) {
  double inner = 0.0;
  for (double omu : o) inner += model.separation.f(similarity_value(model, omu));
  if (model.outer == Outer::Identity) return -inner;
  if (inner <= 0.0) throw DomainError("denseam_energy: log outer needs a positive inner sum");
  return -std::log(inner);
}

}  // namespace

double denseam_energy(const DenseAMModel& model, const SpinState& state) {
  if (state.size() != model.patterns.n) throw ShapeError("denseam_energy: dimension mismatch");
  return energy_from_overlaps(model, overlaps(model, state.sigma));
}

SweepResult denseam_update_sweep(const DenseAMModel& model, const SpinState& state,
                                 SweepOrder order, Rng* rng) {
  if (state.size() != model.patterns.n) throw ShapeError("denseam_update_sweep: dimension mismatch");
  const int n = model.patterns.n;
  const int k = model.patterns.k;
  if (order == SweepOrder::RandomPermutation && rng == nullptr)
    throw DomainError("denseam_update_sweep: RandomPermutation needs an rng");

  std::vector<int> visit;
  if (order == SweepOrder::Cyclic) {
    visit.resize(n);
    std::iota(visit.begin(), visit.end(), 0);
  } else {
    visit = rng->permutation(n);
  }

  SweepResult result{state, 0};
  Vec& sigma = result.state.sigma;
  Vec o = overlaps(model, sigma);
  const bool basic = model.similarity == Similarity::Dot && model.outer == Outer::Identity;

  for (int i : visit) {
    if (basic) {
      double h = 0.0;
      if (model.separation.kind == Separation::Kind::Exp) {
        // shift by the max partial overlap; the sign of h is unchanged
        double amax = 0.0;
        for (int mu = 0; mu < k; ++mu) {
          double a = o[mu] - model.patterns.pattern(mu)[i] * sigma[i];
          if (mu == 0 || a > amax) amax = a;
        }
        for (int mu = 0; mu < k; ++mu) {
          double a = o[mu] - model.patterns.pattern(mu)[i] * sigma[i];
          h += model.patterns.pattern(mu)[i] * std::exp(a - amax);
        }
      } else {
        for (int mu = 0; mu < k; ++mu) {
          double a = o[mu] - model.patterns.pattern(mu)[i] * sigma[i];
          h += model.patterns.pattern(mu)[i] * model.separation.phi(a);
        }
      }
      if (h != 0.0) {
        double next = h > 0 ? 1.0 : -1.0;
        if (next != sigma[i]) {
          for (int mu = 0; mu < k; ++mu) o[mu] += 2.0 * next * model.patterns.pattern(mu)[i];
          sigma[i] = next;
          ++result.flips;
        }
      }
    } else {
      // general (Q, S, F): flip iff it strictly lowers the energy
      double e_now = energy_from_overlaps(model, o);
      Vec o_flip = o;
      for (int mu = 0; mu < k; ++mu) o_flip[mu] -= 2.0 * sigma[i] * model.patterns.pattern(mu)[i];
      double e_flip = energy_from_overlaps(model, o_flip);
      if (e_flip < e_now) {
        o = o_flip;
        sigma[i] = -sigma[i];
        ++result.flips;
      }
    }
  }
  return result;
}

RetrieveResult denseam_retrieve(const DenseAMModel& model, const SpinState& start, int max_sweeps,
                                SweepOrder order, Rng* rng) {
  if (max_sweeps < 1) throw DomainError("denseam_retrieve: max_sweeps must be >= 1");
  RetrieveResult r{start, 0, false};
  for (int s = 0; s < max_sweeps; ++s) {
    SweepResult sw = denseam_update_sweep(model, r.state, order, rng);
    r.state = sw.state;
    ++r.sweeps;
    if (sw.flips == 0) {
      r.converged = true;
      break;
    }
  }
  return r;
}

double capacity_bound(int n_dim, int n, double alpha) {
  if (n < 2) throw DomainError("capacity_bound: n must be >= 2");
  if (alpha <= 0) throw DomainError("capacity_bound: alpha must be positive");
  double dfact = static_cast<double>(double_factorial(2LL * n - 3));
  return std::pow(static_cast<double>(n_dim), n - 1) / (alpha * alpha * dfact);
}

double estimate_bit_error(int n_dim, int k, const Separation& sep, int trials, Rng& rng,
                          Exec exec) {
  if (trials < 100) throw DomainError("estimate_bit_error: need at least 100 trials");
  if (k < 1) throw DomainError("estimate_bit_error: k must be >= 1");
  const std::uint64_t base_seed = rng.next_u64();
  std::vector<long> flips(trials, 0);
  run_trials(trials, exec, [&](int t) {
    Rng trial_rng(base_seed ^ static_cast<std::uint64_t>(t));
    PatternSet ps = plasticity::random_patterns(n_dim, k, trial_rng);
    const Vec& target = ps.pattern(0);
    Vec o(k);
    for (int mu = 0; mu < k; ++mu) o[mu] = dot(ps.pattern(mu), target);
    long bad = 0;
    for (int i = 0; i < n_dim; ++i) {
      double h = 0.0;
      if (sep.kind == Separation::Kind::Exp) {
        double amax = 0.0;
        for (int mu = 0; mu < k; ++mu) {
          double a = o[mu] - ps.pattern(mu)[i] * target[i];
          if (mu == 0 || a > amax) amax = a;
        }
        for (int mu = 0; mu < k; ++mu)
          h += ps.pattern(mu)[i] * std::exp(o[mu] - ps.pattern(mu)[i] * target[i] - amax);
      } else {
        for (int mu = 0; mu < k; ++mu)
          h += ps.pattern(mu)[i] * sep.phi(o[mu] - ps.pattern(mu)[i] * target[i]);
      }
      double updated = h == 0.0 ? target[i] : (h > 0 ? 1.0 : -1.0);
      if (updated != target[i]) ++bad;
    }
    flips[t] = bad;
  });
  long total = 0;
  for (long f : flips) total += f;
  return static_cast<double>(total) / (static_cast<double>(trials) * n_dim);
}

void ct_denseam_field(const Mat& xi, const hopfield::Activation& f, const hopfield::Activation& g,
                      double tau_v, double tau_h, const Vec& v, const Vec& h, Vec& dv, Vec& dh) {
  if (tau_v <= 0 || tau_h <= 0) throw DomainError("ct_denseam_field: time constants must be positive");
  const int nh = xi.rows(), nv = xi.cols();
  if (static_cast<int>(v.size()) != nv || static_cast<int>(h.size()) != nh)
    throw ShapeError("ct_denseam_field: state dimensions must match xi");
  dv.assign(nv, 0.0);
  dh.assign(nh, 0.0);
  for (int i = 0; i < nv; ++i) {
    double s = 0.0;
    for (int mu = 0; mu < nh; ++mu) s += xi(mu, i) * f.value(h[mu]);
    dv[i] = (s - v[i]) / tau_v;
  }
  for (int mu = 0; mu < nh; ++mu) {
    double s = 0.0;
    for (int i = 0; i < nv; ++i) s += xi(mu, i) * g.value(v[i]);
    dh[mu] = (s - h[mu]) / tau_h;
  }
}

void save_patterns(const PatternSet& patterns, std::ostream& os) {
  for (const Vec& p : patterns.patterns) {
    for (double v : p) os << (v > 0 ? '+' : '-');
    os << "\n";
  }
}

PatternSet load_patterns(std::istream& is) {
  std::vector<Vec> ps;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Vec p;
    p.reserve(line.size());
    for (char c : line) {
      if (c == '+') p.push_back(1.0);
      else if (c == '-') p.push_back(-1.0);
      else throw ConfigError("pattern file: expected only '+'/'-' characters");
    }
    ps.push_back(std::move(p));
  }
  if (ps.empty()) throw ConfigError("pattern file: no patterns");
  const int n = static_cast<int>(ps.front().size());
  return PatternSet(n, std::move(ps));
}

}  // namespace edm::denseam
