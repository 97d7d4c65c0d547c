#pragma once

// Dense associative memories over +-1 spins: the separation-function
// energy E = -Q[sum_mu F(S(xi, sigma))], asynchronous retrieval sweeps,
// capacity laws, and Monte Carlo bit-error estimation.

#include <iosfwd>

#include "edm/hopfield.hpp"
#include "edm/mathcore.hpp"
#include "edm/parallel.hpp"
#include "edm/plasticity.hpp"

namespace edm::denseam {

using plasticity::PatternSet;

// F and its derivative Phi. Power is s^n/n with integer n >= 2; Exp is
// e^s, evaluated with the max overlap subtracted wherever only the sign
// of a Phi-weighted sum matters, so large N cannot overflow.
struct Separation {
  enum class Kind { Power, Exp };
  Kind kind = Kind::Power;
  int n = 2;

  static Separation power(int n);
  static Separation exp();
  double f(double s) const;
  double phi(double s) const;
};

enum class Similarity { Dot, NegSqEuclidean };
enum class Outer { Identity, Log };

struct DenseAMModel {
  PatternSet patterns;
  Separation separation;
  Similarity similarity = Similarity::Dot;
  Outer outer = Outer::Identity;
};

struct SpinState {
  Vec sigma;
  explicit SpinState(Vec s);
  int size() const { return static_cast<int>(sigma.size()); }
};

// -Q[sum_mu F(S(xi^mu, sigma))]. Log outer requires a positive inner sum.
double denseam_energy(const DenseAMModel& model, const SpinState& state);

enum class SweepOrder { Cyclic, RandomPermutation };

struct SweepResult {
  SpinState state;
  int flips = 0;
};

// One asynchronous pass updating each spin once. The basic form (dot
// similarity, identity outer) applies
//   sigma_i <- sign[sum_mu xi_i Phi(sum_{j != i} xi_j sigma_j)],
// keeping the current spin when the argument is exactly zero so the pass
// never raises the energy. Other (S, Q) combinations update by greedy
// single-flip energy difference. rng is required for RandomPermutation.
SweepResult denseam_update_sweep(const DenseAMModel& model, const SpinState& state,
                                 SweepOrder order, Rng* rng = nullptr);

struct RetrieveResult {
  SpinState state;
  int sweeps = 0;
  bool converged = false;  // a zero-flip sweep was reached
};

RetrieveResult denseam_retrieve(const DenseAMModel& model, const SpinState& start, int max_sweeps,
                                SweepOrder order = SweepOrder::RandomPermutation,
                                Rng* rng = nullptr);

// K^max = N^(n-1) / (alpha^2 (2n-3)!!). Exact formula value; callers floor.
double capacity_bound(int n_dim, int n, double alpha);

// Monte Carlo estimate of the single-update bit-error probability: draw a
// fresh random pattern set per trial, initialize at the first pattern, and
// count one-step updates whose sign leaves the pattern. Trial t runs on
// its own stream seeded seed^t, so serial and parallel execution agree
// bit for bit.
double estimate_bit_error(int n_dim, int k, const Separation& sep, int trials, Rng& rng,
                          Exec exec = Exec::Parallel);

// Visible/hidden two-population relaxation:
//   tau_v v' = xi^T f(h) - v,   tau_h h' = xi g(v) - h,
// with xi of shape N_h x N_v.
void ct_denseam_field(const Mat& xi, const hopfield::Activation& f, const hopfield::Activation& g,
                      double tau_v, double tau_h, const Vec& v, const Vec& h, Vec& dv, Vec& dh);

// Pattern file: one pattern per line, characters '+'/'-', no separators.
void save_patterns(const PatternSet& patterns, std::ostream& os);
PatternSet load_patterns(std::istream& is);

}  // namespace edm::denseam
