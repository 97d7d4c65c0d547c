#pragma once

// Learning mechanisms: Hebbian outer-product storage, Oja's stabilized
// rule, contrastive Hebbian updates, and equilibrium propagation.

#include <functional>
#include <utility>

#include "edm/flows.hpp"
#include "edm/mathcore.hpp"

namespace edm::plasticity {

// K binary patterns in {-1,+1}^N. Entries must be exactly +-1.
struct PatternSet {
  int n = 0;
  int k = 0;
  std::vector<Vec> patterns;

  PatternSet(int n, std::vector<Vec> patterns);
  const Vec& pattern(int mu) const { return patterns[mu]; }
};

// Each entry +-1 with probability 1/2.
PatternSet random_patterns(int n, int k, Rng& rng);

struct LearnConfig {
  double eta = 1e-2;
  long steps = 1;
  double beta = 1e-3;  // nudging strength, equilibrium propagation only
};

// (1/N) sum_mu xi xi^T. Symmetric, diagonal K/N.
Mat hebbian_weights(const PatternSet& patterns);

using DataSampler = std::function<Vec(Rng&)>;

// w <- w + eta (y x - y^2 w), y = w^T x. Throws DivergenceError past
// ||w|| = 1e6 with a hint to reduce eta.
Vec oja_train(const DataSampler& sampler, Vec w0, const LearnConfig& cfg, Rng& rng);

// W + eta (mean outer product of data states - mean outer product of
// model states). Model samples come from the caller (e.g. a Langevin
// chain); this module does not own a sampler.
Mat chl_update(const Mat& w, const std::vector<Vec>& data_states,
               const std::vector<Vec>& model_states, double eta);

// --- equilibrium propagation ---

struct EqPropModel {
  int state_dim = 0;
  int param_dim = 0;
  std::function<double(const Vec& x, const Vec& theta, const Vec& u)> energy;
  std::function<Vec(const Vec& x, const Vec& theta, const Vec& u)> grad_x;
  std::function<Vec(const Vec& x, const Vec& theta, const Vec& u)> grad_theta;
};

struct OutputMap {
  std::function<Vec(const Vec& x)> value;
  std::function<Vec(const Vec& x, const Vec& gy)> vjp;  // J_H(x)^T gy
  static OutputMap identity();
};

struct Loss {
  std::function<double(const Vec& y, const Vec& yt)> value;
  std::function<Vec(const Vec& y, const Vec& yt)> grad_y;
  static Loss squared();  // 1/2 ||y - yt||^2
};

struct EqPropConfig {
  double beta = 1e-3;
  // One-sided nudging by default. The symmetric variant relaxes at +-beta
  // and halves the bias order; off by default.
  bool symmetric = false;
  flows::IntegratorConfig relax;
  bool check_hessian = false;  // verify the free equilibrium is nondegenerate
};

struct EqPropResult {
  Vec grad_estimate;  // finite-beta estimate of grad_theta J
  Vec x_free;
  Vec x_nudged;
  bool hessian_checked = false;
  bool hessian_pd = true;
};

// Free phase relaxes -grad_x E; nudged phase relaxes
// -grad_x E - beta J_H^T grad_y L. The estimate is
// (1/beta)(grad_theta E at nudged - grad_theta E at free).
// Non-convergent phases raise ConvergenceError labeled with the phase.
EqPropResult eqprop_gradient(const EqPropModel& model, const OutputMap& out, const Loss& loss,
                             const Vec& theta, const Vec& u, const Vec& y_target,
                             const EqPropConfig& cfg, const Vec& x0);

// Pairwise quadratic energy with a leak and input so the free phase has a
// nondegenerate equilibrium:
//   E(x; W, u) = 1/2 ||x||^2 - 1/2 x^T W x - u^T x,  theta = vec(W).
// The leak and input carry no W-dependence, so the W-space gradients are
// those of the pairwise term alone.
struct QuadraticEqProp {
  int n = 0;
  static Vec pack(const Mat& w);
  static Mat unpack(int n, const Vec& theta);
  EqPropModel model() const;
};

// Both update routes from the same two relaxed states: the equilibrium
// propagation estimate mapped to a symmetric weight update, and the
// contrastive form (eta/beta)(x^b x^b^T - x^0 x^0^T). Returned for
// comparison; they agree to rounding.
std::pair<Mat, Mat> eqprop_chl_equivalence(const Mat& w, const Vec& u, const Vec& y_target,
                                           double beta, double eta,
                                           const flows::IntegratorConfig& relax);

}  // namespace edm::plasticity
