#pragma once

// Proximal operators with closed forms, proximal gradient flows, the
// positive-lasso competitive network, softmax gradient play, and Dale's
// law excitatory-inhibitory circuits.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "edm/flows.hpp"
#include "edm/mathcore.hpp"

namespace edm::proximal {

struct ProxSpec {
  enum class Kind { L1, NonnegL1, Box, NonnegIndicator, NegEntropySimplex };
  Kind kind = Kind::L1;
  double lambda = 0.0;  // L1 / NonnegL1
  double lo = 0.0, hi = 1.0;  // Box
  double tau = 1.0;  // NegEntropySimplex

  static ProxSpec l1(double lambda);
  static ProxSpec nonneg_l1(double lambda);
  static ProxSpec box(double lo, double hi);
  static ProxSpec nonneg();
  // Realized as the simplex-valued map softmax(x / tau), matching the
  // softmax gradient play flow as printed.
  static ProxSpec negentropy_simplex(double tau);
};

Vec prox(const ProxSpec& spec, const Vec& x);

// x' = -x + prox_g(x - grad f(x, u))
Vec proxgrad_field(const std::function<Vec(const Vec&, const Vec&)>& grad_f, const ProxSpec& spec,
                   const Vec& x, const Vec& u);

Vec softmax(const Vec& x);  // numerically shifted

// Dictionary with unit-norm columns (checked to 1e-8), stimulus, sparsity
// weight.
struct LassoProblem {
  Mat theta;  // M x N
  Vec u;      // M
  double lambda = 0.0;

  LassoProblem(Mat theta, Vec u, double lambda);
  int atoms() const { return theta.cols(); }
};

// x' = -x + ReLU((I - Theta^T Theta) x + Theta^T u - lambda 1)
Vec lasso_network_field(const LassoProblem& prob, const Vec& x);

// 1/2 ||u - Theta x||^2 + lambda ||x||_1 — the objective the competitive
// network descends; its fixed points are exactly the minimizers over x >= 0.
double lasso_objective(const LassoProblem& prob, const Vec& x);

// Independent minimizer by nonnegative coordinate descent, iterated until
// the objective changes by < 1e-12 (cap 1e6 rounds).
Vec lasso_oracle(const LassoProblem& prob);

// w' = -w + softmax(-grad surprise(x, w) / tau); w must sit on the
// probability simplex to 1e-8.
Vec softmax_play_field(const std::function<Vec(const Vec&, const Vec&)>& grad_surprise, double tau,
                       const Vec& w, const Vec& x);

// Excitatory/inhibitory network with homogeneous weights and the Dale
// sign structure: columns of E neurons carry +w_ee/+w_ie, columns of I
// neurons carry -w_ei/-w_ii. Self-loops are allowed but not counted in
// degrees.
struct EINetwork {
  std::vector<bool> is_excitatory;          // size N
  std::vector<std::pair<int, int>> edges;   // directed (from, to), self-loops allowed
  double w_ee = 0, w_ei = 0, w_ie = 0, w_ii = 0;
  Mat b;                                    // N x M input matrix

  EINetwork(std::vector<bool> is_excitatory, std::vector<std::pair<int, int>> edges, double w_ee,
            double w_ei, double w_ie, double w_ii, Mat b);
  int size() const { return static_cast<int>(is_excitatory.size()); }
  Mat weight_matrix() const;

  // k excitatory neurons, one shared inhibitory hub: E self-loops w_ee,
  // all E->I edges, I->E edges, and an I self-loop; stimuli feed the E
  // neurons through B = [I; 0].
  static EINetwork ek_i(int k, double w_ee, double w_ei, double w_ie, double w_ii);
};

// x' = -x + clamp_[0,1](W x + B u)
Vec ei_field(const EINetwork& net, const Vec& x, const Vec& u);

struct MonoReport {
  bool ok = false;
  double half_degree = 0.0;  // max over neurons of (d_in + d_out)/2, self-loops excluded
  double slack_ee = 0.0;     // 1 - half_degree * w_ee
  double slack_ii = 0.0;     // 1 - (half_degree - 2) * w_ii
};

// Both monostability inequalities at the strictest degree reading;
// requires reciprocal E-I edges and validates them.
MonoReport monostability_check(const EINetwork& net);

struct WtaPrediction {
  std::optional<int> winner;  // 0-based index into the excitatory set
  double delta = 0.0;         // 1 - w_ee + w_ei
  std::string reason;         // set when no guarantee applies
};

// Guaranteed winner i when u_i > delta and u_j < -delta for all other
// stimuli, under the functionality condition w_ie >= 1 + w_ii and
// monostability. Outside those hypotheses returns no-guarantee; pair with
// wta_simulate to see the realized equilibrium.
WtaPrediction wta_predict(const EINetwork& net, const Vec& u);

// Relax the E-I dynamics from rest and return the equilibrium.
Vec wta_simulate(const EINetwork& net, const Vec& u, const flows::IntegratorConfig& cfg);

struct ContrastLayers {
  double formula_value = 0.0;   // 1 + ln(eps/delta)/ln(1/w_ee - 1), as printed
  int recurrence_layers = 0;    // smallest l with eps (1/w_ee - 1)^(l-1) >= delta
};

// Requires 0 < w_ee < 1/2 and eps, delta > 0. eps >= delta needs one layer.
ContrastLayers contrast_layers_needed(double w_ee, double eps, double delta);

struct LadderResult {
  std::vector<double> contrasts;  // contrast entering each layer, then the final output
  std::vector<double> gains;      // per-layer output/input contrast ratios
};

// Stacked E2-I columns: layer l receives stimuli (c_l, 0), relaxes to
// equilibrium, and its excitatory outputs feed layer l+1 one-to-one.
LadderResult contrast_ladder_simulate(double w_ee, double w_ei, double w_ie, double w_ii,
                                      double eps, int layers, const flows::IntegratorConfig& cfg);

// File format: header row `M N lambda`, then the M rows of Theta, then u.
void save_lasso(const LassoProblem& prob, std::ostream& os);
LassoProblem load_lasso(std::istream& is);

}  // namespace edm::proximal
