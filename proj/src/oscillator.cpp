#include "edm/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace edm::oscillator {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

OscillatorNet::OscillatorNet(Mat w_, double kappa_, double omega_, Variant variant_)
    : w(std::move(w_)), kappa(kappa_), omega(omega_), variant(variant_) {
  if (!w.is_square()) throw ShapeError("OscillatorNet: W must be square");
  if (kappa < 0) throw DomainError("OscillatorNet: kappa must be nonnegative");
}

Vec oam_field(const OscillatorNet& net, const Vec& phi, bool corotating) {
  if (net.variant != OscillatorNet::Variant::OAM)
    throw DomainError("oam_field: net is not an OAM");
  const int n = net.size();
  if (static_cast<int>(phi.size()) != n) throw ShapeError("oam_field: phi dimension");
  Vec out(n, corotating ? 0.0 : net.omega);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0, acc2 = 0.0;
    for (int j = 0; j < n; ++j) {
      double d = phi[j] - phi[i];
      acc += net.w(i, j) * std::sin(d);
      acc2 += std::sin(2.0 * d);
    }
    out[i] += acc + net.kappa / n * acc2;
  }
  return out;
}

double oam_energy(const OscillatorNet& net, const Vec& phi) {
  const int n = net.size();
  if (static_cast<int>(phi.size()) != n) throw ShapeError("oam_energy: phi dimension");
  if (!net.w.is_symmetric())
    throw ShapeError("oam_energy: symmetric W required for the energy certificate");
  double e1 = 0.0, e2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double d = phi[j] - phi[i];
      e1 += net.w(i, j) * std::cos(d);
      e2 += std::cos(2.0 * d);
    }
  return -0.5 * e1 - net.kappa / (4.0 * n) * e2;
}

Vec oim_field(const OscillatorNet& net, const Vec& phi, bool corotating) {
  if (net.variant != OscillatorNet::Variant::OIM)
    throw DomainError("oim_field: net is not an OIM");
  const int n = net.size();
  if (static_cast<int>(phi.size()) != n) throw ShapeError("oim_field: phi dimension");
  Vec out(n, corotating ? 0.0 : net.omega);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += net.w(i, j) * std::sin(phi[j] - phi[i]);
    out[i] += acc - net.kappa * std::sin(2.0 * phi[i]);
  }
  return out;
}

double oim_energy(const OscillatorNet& net, const Vec& phi) {
  const int n = net.size();
  if (static_cast<int>(phi.size()) != n) throw ShapeError("oim_energy: phi dimension");
  double e1 = 0.0, pen = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) e1 += net.w(i, j) * std::cos(phi[j] - phi[i]);
    double s = std::sin(phi[i]);
    pen += s * s;
  }
  return -0.5 * e1 + net.kappa * pen;
}

namespace {

double wrap_2pi(double x) {
  double y = std::fmod(x, 2.0 * kPi);
  if (y < 0) y += 2.0 * kPi;
  return y;
}

}  // namespace

Vec phase_decode(const Vec& phi, double tol) {
  if (!(tol > 0 && tol < kPi / 4)) throw DomainError("phase_decode: tol must be in (0, pi/4)");
  if (phi.empty()) throw ShapeError("phase_decode: empty phase vector");
  Vec out(phi.size());
  std::vector<int> offenders;
  for (size_t i = 0; i < phi.size(); ++i) {
    double d = wrap_2pi(phi[i] - phi[0]);
    double dist0 = std::min(d, 2.0 * kPi - d);
    double dist_pi = std::fabs(d - kPi);
    if (dist0 <= tol)
      out[i] = 1.0;
    else if (dist_pi <= tol)
      out[i] = -1.0;
    else
      offenders.push_back(static_cast<int>(i) + 1);
  }
  if (!offenders.empty()) {
    std::string msg = "phase_decode: not phase-locked at indices";
    for (int idx : offenders) msg += " " + std::to_string(idx);
    throw NotLockedError(msg, offenders);
  }
  return out;
}

double oam_stability_margin(const Mat& w_hebbian, const Vec& xi) {
  const int n = w_hebbian.rows();
  if (!w_hebbian.is_square() || static_cast<int>(xi.size()) != n)
    throw ShapeError("oam_stability_margin: shape mismatch");
  Mat j(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) j(a, b) = xi[a] * w_hebbian(a, b) * xi[b];
  for (int a = 0; a < n; ++a) {
    double row = 0.0;
    for (int b = 0; b < n; ++b) row += j(a, b);
    j(a, a) -= row;
  }
  // j annihilates the ones vector; push that rotation mode to the bottom
  // so the leading eigenvalue is the transverse one.
  double shift = (j.max_abs() * n + 1.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) j(a, b) -= shift / n;
  return sym_eig(j).eigenvalues.front();
}

Vec phase_lock_state(const Vec& sigma) {
  Vec phi(sigma.size());
  for (size_t i = 0; i < sigma.size(); ++i) phi[i] = sigma[i] > 0 ? 0.0 : kPi;
  return phi;
}

IsingInstance::IsingInstance(int n_, std::vector<Edge> edges_) : n(n_), edges(std::move(edges_)) {
  if (n < 1) throw ShapeError("IsingInstance: need at least one node");
  for (const Edge& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n)
      throw ShapeError("IsingInstance: edge index out of range");
    if (e.i >= e.j) throw ShapeError("IsingInstance: edges must satisfy i < j (no self-loops)");
    if (!std::isfinite(e.w)) throw DomainError("IsingInstance: non-finite weight");
  }
}

Mat IsingInstance::coupling() const {
  Mat w(n, n);
  for (const Edge& e : edges) {
    w(e.i, e.j) += e.w;
    w(e.j, e.i) += e.w;
  }
  return w;
}

bool IsingInstance::paper_weights() const {
  for (const Edge& e : edges)
    if (e.w != -1.0) return false;
  return true;
}

double ising_energy(const IsingInstance& instance, const Vec& sigma) {
  if (static_cast<int>(sigma.size()) != instance.n) throw ShapeError("ising_energy: sigma dimension");
  double h = 0.0;
  for (const auto& e : instance.edges) h -= e.w * sigma[e.i] * sigma[e.j];
  return h;
}

SignedGraph signed_laplacian(const IsingInstance& instance, const Vec& sigma) {
  if (static_cast<int>(sigma.size()) != instance.n)
    throw ShapeError("signed_laplacian: sigma dimension");
  const int n = instance.n;
  SignedGraph g{Mat(n, n), Mat(n, n), sigma};
  Mat w = instance.coupling();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.a(i, j) = w(i, j) * sigma[i] * sigma[j];
  for (int i = 0; i < n; ++i) {
    double deg = 0.0;
    for (int j = 0; j < n; ++j) deg += g.a(i, j);
    for (int j = 0; j < n; ++j) g.l(i, j) = -g.a(i, j);
    g.l(i, i) += deg;
  }
  return g;
}

double expected_hessian_eigen(double h, int n, double kappa) {
  if (n < 1) throw DomainError("expected_hessian_eigen: n must be >= 1");
  return -2.0 * h / n + 2.0 * kappa;
}

std::vector<KappaSegment> linear_ramp_schedule(double t_total, int n_segments, double kappa_max) {
  if (t_total <= 0 || n_segments < 1) throw DomainError("linear_ramp_schedule: bad parameters");
  std::vector<KappaSegment> s(n_segments);
  for (int i = 0; i < n_segments; ++i) {
    s[i].duration = t_total / n_segments;
    s[i].kappa = kappa_max * (i + 1) / n_segments;
  }
  return s;
}

namespace {

bool lex_less(const Vec& a, const Vec& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

OimResult oim_solve(const IsingInstance& instance, const std::vector<KappaSegment>& schedule,
                    int restarts, Rng& rng, const flows::IntegratorConfig& cfg, Exec exec) {
  if (restarts < 1) throw DomainError("oim_solve: restarts must be >= 1");
  if (schedule.empty()) throw DomainError("oim_solve: empty kappa schedule");
  const int n = instance.n;
  const Mat w = instance.coupling();
  const std::uint64_t base_seed = rng.next_u64();

  OimResult result;
  result.restarts.resize(restarts);
  run_trials(restarts, exec, [&](int r) {
    Rng local(base_seed ^ static_cast<std::uint64_t>(r));
    Vec phi(n);
    for (double& p : phi) p = local.uniform(0.0, 2.0 * kPi);
    bool converged = false;
    for (const KappaSegment& seg : schedule) {
      OscillatorNet net(w, seg.kappa, 0.0, OscillatorNet::Variant::OIM);
      flows::VectorField field{n, [&net](const Vec& x, double) { return oim_field(net, x); }};
      flows::IntegratorConfig seg_cfg = cfg;
      seg_cfg.t_max = seg.duration;
      seg_cfg.record_stride = std::max(1, static_cast<int>(seg.duration / cfg.dt));
      flows::TrajectoryRecord rec = flows::integrate_ode(field, phi, seg_cfg);
      phi = rec.final_state();
      converged = rec.converged;
    }
    Vec sigma(n);
    for (int i = 0; i < n; ++i) {
      // snap to the nearest multiple of pi; even multiples decode +1
      long m = std::lround(phi[i] / kPi);
      sigma[i] = ((m % 2 + 2) % 2 == 0) ? 1.0 : -1.0;
    }
    result.restarts[r] = OimRestart{sigma, ising_energy(instance, sigma), converged};
  });

  int best = 0;
  for (int r = 1; r < restarts; ++r) {
    const auto& cand = result.restarts[r];
    const auto& cur = result.restarts[best];
    if (cand.h < cur.h || (cand.h == cur.h && lex_less(cand.sigma, cur.sigma))) best = r;
  }
  result.sigma = result.restarts[best].sigma;
  result.h = result.restarts[best].h;
  return result;
}

double ising_minimum(const IsingInstance& instance, Vec* argmin) {
  if (instance.n > 24) throw DomainError("ising_minimum: instance too large for brute force");
  const int n = instance.n;
  double best = 0.0;
  std::uint32_t best_bits = 0;
  Vec sigma(n);
  const std::uint32_t total = 1u << n;
  for (std::uint32_t bits = 0; bits < total; ++bits) {
    for (int i = 0; i < n; ++i) sigma[i] = (bits >> i) & 1u ? -1.0 : 1.0;
    double h = ising_energy(instance, sigma);
    if (bits == 0 || h < best) {
      best = h;
      best_bits = bits;
    }
  }
  if (argmin) {
    argmin->resize(n);
    for (int i = 0; i < n; ++i) (*argmin)[i] = (best_bits >> i) & 1u ? -1.0 : 1.0;
  }
  return best;
}

IsingInstance erdos_renyi_instance(int n, double p, Rng& rng) {
  if (p < 0 || p > 1) throw DomainError("erdos_renyi_instance: p must be in [0,1]");
  std::vector<IsingInstance::Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < p) edges.push_back({i, j, -1.0});
  return IsingInstance(n, std::move(edges));
}

void save_instance(const IsingInstance& instance, std::ostream& os) {
  os << instance.n << " " << instance.edges.size() << "\n";
  char buf[64];
  for (const auto& e : instance.edges) {
    std::snprintf(buf, sizeof buf, "%.17g", e.w);
    os << (e.i + 1) << " " << (e.j + 1) << " " << buf << "\n";
  }
}

IsingInstance load_instance(std::istream& is) {
  int n = 0;
  long m = 0;
  if (!(is >> n >> m)) throw ConfigError("ising file: bad header line");
  std::vector<IsingInstance::Edge> edges;
  edges.reserve(m);
  for (long k = 0; k < m; ++k) {
    int i, j;
    double w;
    if (!(is >> i >> j >> w)) throw ConfigError("ising file: truncated edge list");
    if (i < 1 || j < 1 || i >= j) throw ConfigError("ising file: edges must be 1-based with i < j");
    edges.push_back({i - 1, j - 1, w});
  }
  return IsingInstance(n, std::move(edges));
}

}  // namespace edm::oscillator
