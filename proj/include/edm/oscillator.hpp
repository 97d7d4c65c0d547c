#pragma once

// Phase-oscillator associative memories and Ising machines.
//
// OAM:  phi_i' = w + sum_j W_ij sin(phi_j - phi_i) + (k/N) sum_j sin(2(phi_j - phi_i))
// OIM:  phi_i' = w + sum_j W_ij sin(phi_j - phi_i) - k sin(2 phi_i)
//
// omega defaults to 0 since the co-rotating change of variables makes it
// immaterial; the co-rotating flag drops it explicitly. The second
// harmonic normalizations differ between the two models on purpose; each
// equation is implemented as printed.

#include <iosfwd>

#include "edm/flows.hpp"
#include "edm/mathcore.hpp"
#include "edm/parallel.hpp"

namespace edm::oscillator {

struct OscillatorNet {
  enum class Variant { OAM, OIM };
  Mat w;
  double kappa = 0.0;
  double omega = 0.0;
  Variant variant = Variant::OAM;

  OscillatorNet(Mat w, double kappa, double omega, Variant variant);
  int size() const { return w.rows(); }
};

Vec oam_field(const OscillatorNet& net, const Vec& phi, bool corotating = true);

// -1/2 sum_ij W_ij cos(phi_j - phi_i) - (k/4N) sum_ij cos(2(phi_j - phi_i)),
// both sums over all ordered pairs including i = j.
double oam_energy(const OscillatorNet& net, const Vec& phi);

Vec oim_field(const OscillatorNet& net, const Vec& phi, bool corotating = true);

// -1/2 sum_ij W_ij cos(phi_j - phi_i) + k sum_i sin(phi_i)^2
double oim_energy(const OscillatorNet& net, const Vec& phi);

// Gauge-fix on phi_1, then map each phase within tol of 0 to +1 and of pi
// to -1. Phases in neither window raise NotLockedError listing the
// offending 1-based indices. tol must lie in (0, pi/4).
Vec phase_decode(const Vec& phi, double tol);

// Stability margin of the locked state phi*(xi): lambda_max of
// A - diag(A 1) with A = D_xi W D_xi, taken transverse to the global
// rotation mode (which that matrix annihilates). The locked state is
// asymptotically stable iff this margin is below 2 kappa; the field
// Jacobian at the lock restricted to 1-perp is exactly margin - 2 kappa.
double oam_stability_margin(const Mat& w_hebbian, const Vec& xi);

// Phase configuration phi*(sigma): 0 where sigma = +1, pi where -1.
Vec phase_lock_state(const Vec& sigma);

struct IsingInstance {
  struct Edge {
    int i = 0, j = 0;  // 0-based, i < j
    double w = -1.0;
  };
  int n = 0;
  std::vector<Edge> edges;

  IsingInstance(int n, std::vector<Edge> edges);
  Mat coupling() const;  // symmetric W with zero diagonal
  // True when every edge weight is exactly -1 (the unweighted MaxCut form).
  bool paper_weights() const;
};

// H = -1/2 sum_ij W_ij sigma_i sigma_j = -sum_edges w_ij sigma_i sigma_j
double ising_energy(const IsingInstance& instance, const Vec& sigma);

struct SignedGraph {
  Mat a;  // A_ij = W_ij sigma_i sigma_j
  Mat l;  // diag(A 1) - A
  Vec sigma;
};

SignedGraph signed_laplacian(const IsingInstance& instance, const Vec& sigma);

// E[lambda | H = h] = -2h/N + 2 kappa for the random signed ensemble.
double expected_hessian_eigen(double h, int n, double kappa);

struct KappaSegment {
  double duration = 1.0;
  double kappa = 1.0;
};

// Piecewise-constant ramp 0 -> kappa_max across n_segments equal slices.
std::vector<KappaSegment> linear_ramp_schedule(double t_total, int n_segments, double kappa_max);

struct OimRestart {
  Vec sigma;
  double h = 0.0;
  bool converged = false;
};

struct OimResult {
  Vec sigma;
  double h = 0.0;
  std::vector<OimRestart> restarts;
};

// Random initial phases per restart, integrate through the kappa schedule,
// snap each phase to the nearest multiple of pi, decode, keep the lowest
// H (ties resolved toward the lexicographically smallest sigma). Restart r
// uses its own stream seeded seed^r, so Serial and Parallel agree exactly.
OimResult oim_solve(const IsingInstance& instance, const std::vector<KappaSegment>& schedule,
                    int restarts, Rng& rng, const flows::IntegratorConfig& cfg,
                    Exec exec = Exec::Parallel);

// Brute force over all 2^N spin configurations (N <= 24).
double ising_minimum(const IsingInstance& instance, Vec* argmin = nullptr);

// Erdos-Renyi MaxCut instance: each pair carries weight -1 with probability p.
IsingInstance erdos_renyi_instance(int n, double p, Rng& rng);

// First line `N M`, then M lines `i j w` with 1-based i < j.
void save_instance(const IsingInstance& instance, std::ostream& os);
IsingInstance load_instance(std::istream& is);

}  // namespace edm::oscillator
