#include "edm/plasticity.hpp"

#include <cmath>

namespace edm::plasticity {

PatternSet::PatternSet(int n_, std::vector<Vec> patterns_) : n(n_), patterns(std::move(patterns_)) {
  k = static_cast<int>(patterns.size());
  if (n < 1) throw ShapeError("PatternSet: dimension must be positive");
  if (k < 1) throw DomainError("PatternSet: at least one pattern required");
  for (const Vec& p : patterns) {
    if (static_cast<int>(p.size()) != n) throw ShapeError("PatternSet: pattern length mismatch");
    for (double v : p)
      if (v != 1.0 && v != -1.0) throw DomainError("PatternSet: entries must be exactly +-1");
  }
}

PatternSet random_patterns(int n, int k, Rng& rng) {
  std::vector<Vec> ps(k, Vec(n));
  for (auto& p : ps)
    for (double& v : p) v = rng.sign();
  return PatternSet(n, std::move(ps));
}

Mat hebbian_weights(const PatternSet& patterns) {
  Mat w(patterns.n, patterns.n);
  for (const Vec& xi : patterns.patterns)
    for (int i = 0; i < patterns.n; ++i)
      for (int j = 0; j < patterns.n; ++j) w(i, j) += xi[i] * xi[j];
  return w.scaled(1.0 / patterns.n);
}

Vec oja_train(const DataSampler& sampler, Vec w0, const LearnConfig& cfg, Rng& rng) {
  if (norm2(w0) == 0.0) throw DomainError("oja_train: w0 must be nonzero");
  if (cfg.eta <= 0) throw DomainError("oja_train: eta must be positive");
  Vec w = std::move(w0);
  for (long step = 0; step < cfg.steps; ++step) {
    Vec x = sampler(rng);
    if (x.size() != w.size()) throw ShapeError("oja_train: sample dimension mismatch");
    double y = dot(w, x);
    for (size_t i = 0; i < w.size(); ++i) w[i] += cfg.eta * (y * x[i] - y * y * w[i]);
    if (norm2(w) > 1e6)
      throw DivergenceError("oja_train: weights diverged, reduce eta", static_cast<double>(step));
  }
  return w;
}

Mat chl_update(const Mat& w, const std::vector<Vec>& data_states,
               const std::vector<Vec>& model_states, double eta) {
  if (data_states.empty() || model_states.empty())
    throw DomainError("chl_update: sample lists must be nonempty");
  const int n = w.rows();
  auto mean_outer = [n](const std::vector<Vec>& states) {
    Mat m(n, n);
    for (const Vec& x : states) {
      if (static_cast<int>(x.size()) != n) throw ShapeError("chl_update: state dimension mismatch");
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) += x[i] * x[j];
    }
    return m.scaled(1.0 / static_cast<double>(states.size()));
  };
  return w + (mean_outer(data_states) - mean_outer(model_states)).scaled(eta);
}

OutputMap OutputMap::identity() {
  OutputMap h;
  h.value = [](const Vec& x) { return x; };
  h.vjp = [](const Vec&, const Vec& gy) { return gy; };
  return h;
}

Loss Loss::squared() {
  Loss l;
  l.value = [](const Vec& y, const Vec& yt) {
    double s = 0;
    for (size_t i = 0; i < y.size(); ++i) s += (y[i] - yt[i]) * (y[i] - yt[i]);
    return 0.5 * s;
  };
  l.grad_y = [](const Vec& y, const Vec& yt) { return y - yt; };
  return l;
}

namespace {

Vec relax_phase(const EqPropModel& model, const OutputMap& out, const Loss& loss, const Vec& theta,
                const Vec& u, const Vec& y_target, double beta,
                const flows::IntegratorConfig& cfg, const Vec& x0, const char* phase) {
  flows::VectorField f{model.state_dim, [&](const Vec& x, double) {
                         Vec g = model.grad_x(x, theta, u);
                         if (beta != 0.0) {
                           Vec gl = out.vjp(x, loss.grad_y(out.value(x), y_target));
                           for (size_t i = 0; i < g.size(); ++i) g[i] += beta * gl[i];
                         }
                         for (double& v : g) v = -v;
                         return g;
                       }};
  try {
    return flows::find_equilibrium(f, x0, cfg);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string("eqprop ") + phase + " phase: " + e.what(), e.residual);
  }
}

}  // namespace

EqPropResult eqprop_gradient(const EqPropModel& model, const OutputMap& out, const Loss& loss,
                             const Vec& theta, const Vec& u, const Vec& y_target,
                             const EqPropConfig& cfg, const Vec& x0) {
  if (cfg.beta <= 0) throw DomainError("eqprop_gradient: beta must be positive");
  EqPropResult r;
  r.x_free = relax_phase(model, out, loss, theta, u, y_target, 0.0, cfg.relax, x0, "free");
  if (cfg.check_hessian) {
    Mat h = fd_jacobian([&](const Vec& x) { return model.grad_x(x, theta, u); }, r.x_free, 1e-5);
    EigResult eig = sym_eig(symmetrized(h).first);
    r.hessian_checked = true;
    r.hessian_pd = eig.eigenvalues.back() > 0.0;
  }
  r.x_nudged =
      relax_phase(model, out, loss, theta, u, y_target, cfg.beta, cfg.relax, r.x_free, "nudged");
  if (cfg.symmetric) {
    Vec x_minus = relax_phase(model, out, loss, theta, u, y_target, -cfg.beta, cfg.relax, r.x_free,
                              "nudged(-beta)");
    Vec gp = model.grad_theta(r.x_nudged, theta, u);
    Vec gm = model.grad_theta(x_minus, theta, u);
    r.grad_estimate = (1.0 / (2.0 * cfg.beta)) * (gp - gm);
  } else {
    Vec gp = model.grad_theta(r.x_nudged, theta, u);
    Vec g0 = model.grad_theta(r.x_free, theta, u);
    r.grad_estimate = (1.0 / cfg.beta) * (gp - g0);
  }
  return r;
}

Vec QuadraticEqProp::pack(const Mat& w) {
  Vec theta;
  theta.reserve(static_cast<size_t>(w.rows()) * w.cols());
  for (int i = 0; i < w.rows(); ++i)
    for (int j = 0; j < w.cols(); ++j) theta.push_back(w(i, j));
  return theta;
}

Mat QuadraticEqProp::unpack(int n, const Vec& theta) { return Mat(n, n, theta); }

EqPropModel QuadraticEqProp::model() const {
  EqPropModel m;
  m.state_dim = n;
  m.param_dim = n * n;
  const int dim = n;
  m.energy = [dim](const Vec& x, const Vec& theta, const Vec& u) {
    Mat w = unpack(dim, theta);
    Mat ws = symmetrized(w).first;
    return 0.5 * dot(x, x) - 0.5 * dot(x, ws.matvec(x)) - dot(u, x);
  };
  m.grad_x = [dim](const Vec& x, const Vec& theta, const Vec& u) {
    Mat ws = symmetrized(unpack(dim, theta)).first;
    Vec g = x - ws.matvec(x) - u;
    return g;
  };
  m.grad_theta = [dim](const Vec& x, const Vec&, const Vec&) {
    // dE/dW_ij for E = -1/2 x^T W x, entries treated independently
    Vec g(static_cast<size_t>(dim) * dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) g[static_cast<size_t>(i) * dim + j] = -0.5 * x[i] * x[j];
    return g;
  };
  return m;
}

std::pair<Mat, Mat> eqprop_chl_equivalence(const Mat& w, const Vec& u, const Vec& y_target,
                                           double beta, double eta,
                                           const flows::IntegratorConfig& relax) {
  if (!w.is_symmetric()) throw ShapeError("eqprop_chl_equivalence: symmetric W required");
  const int n = w.rows();
  QuadraticEqProp quad{n};
  EqPropModel model = quad.model();
  EqPropConfig cfg;
  cfg.beta = beta;
  cfg.relax = relax;
  Vec theta = QuadraticEqProp::pack(w);
  Vec x0(n, 0.0);
  EqPropResult r = eqprop_gradient(model, OutputMap::identity(), Loss::squared(), theta, u,
                                   y_target, cfg, x0);
  // Equilibrium-propagation route: weight update -eta * estimate, with the
  // (i,j) and (j,i) contributions of the symmetric pair summed.
  Mat g = QuadraticEqProp::unpack(n, r.grad_estimate);
  Mat delta_eqprop = (g + g.transposed()).scaled(-eta);
  // Contrastive route, straight from the two relaxed states.
  Mat delta_chl =
      (outer(r.x_nudged, r.x_nudged) - outer(r.x_free, r.x_free)).scaled(eta / beta);
  return {delta_eqprop, delta_chl};
}

}  // namespace edm::plasticity
