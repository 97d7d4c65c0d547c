#include "edm/proximal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <istream>
#include <ostream>
#include <sstream>

namespace edm::proximal {

ProxSpec ProxSpec::l1(double lambda) {
  if (lambda <= 0) throw DomainError("ProxSpec::l1: lambda must be positive");
  ProxSpec s;
  s.kind = Kind::L1;
  s.lambda = lambda;
  return s;
}

ProxSpec ProxSpec::nonneg_l1(double lambda) {
  if (lambda <= 0) throw DomainError("ProxSpec::nonneg_l1: lambda must be positive");
  ProxSpec s;
  s.kind = Kind::NonnegL1;
  s.lambda = lambda;
  return s;
}

ProxSpec ProxSpec::box(double lo, double hi) {
  if (!(lo < hi)) throw DomainError("ProxSpec::box: need lo < hi");
  ProxSpec s;
  s.kind = Kind::Box;
  s.lo = lo;
  s.hi = hi;
  return s;
}

ProxSpec ProxSpec::nonneg() {
  ProxSpec s;
  s.kind = Kind::NonnegIndicator;
  return s;
}

ProxSpec ProxSpec::negentropy_simplex(double tau) {
  if (tau <= 0) throw DomainError("ProxSpec::negentropy_simplex: tau must be positive");
  ProxSpec s;
  s.kind = Kind::NegEntropySimplex;
  s.tau = tau;
  return s;
}

Vec softmax(const Vec& x) {
  double m = x[0];
  for (double v : x) m = std::max(m, v);
  Vec y(x.size());
  double z = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    y[i] = std::exp(x[i] - m);
    z += y[i];
  }
  for (double& v : y) v /= z;
  return y;
}

Vec prox(const ProxSpec& spec, const Vec& x) {
  Vec y(x.size());
  switch (spec.kind) {
    case ProxSpec::Kind::L1:
      for (size_t i = 0; i < x.size(); ++i) {
        double m = std::fabs(x[i]) - spec.lambda;
        y[i] = m > 0 ? (x[i] > 0 ? m : -m) : 0.0;
      }
      return y;
    case ProxSpec::Kind::NonnegL1:
      for (size_t i = 0; i < x.size(); ++i) y[i] = std::max(x[i] - spec.lambda, 0.0);
      return y;
    case ProxSpec::Kind::Box:
      for (size_t i = 0; i < x.size(); ++i) y[i] = std::min(std::max(x[i], spec.lo), spec.hi);
      return y;
    case ProxSpec::Kind::NonnegIndicator:
      for (size_t i = 0; i < x.size(); ++i) y[i] = std::max(x[i], 0.0);
      return y;
    case ProxSpec::Kind::NegEntropySimplex: {
      Vec scaled(x.size());
      for (size_t i = 0; i < x.size(); ++i) scaled[i] = x[i] / spec.tau;
      return softmax(scaled);
    }
  }
  throw DomainError("prox: unknown kind");
}

Vec proxgrad_field(const std::function<Vec(const Vec&, const Vec&)>& grad_f, const ProxSpec& spec,
                   const Vec& x, const Vec& u) {
  Vec g = grad_f(x, u);
  if (g.size() != x.size()) throw ShapeError("proxgrad_field: gradient dimension mismatch");
  Vec p = prox(spec, x - g);
  for (size_t i = 0; i < p.size(); ++i) p[i] -= x[i];
  return p;
}

LassoProblem::LassoProblem(Mat theta_, Vec u_, double lambda_)
    : theta(std::move(theta_)), u(std::move(u_)), lambda(lambda_) {
  if (theta.rows() != static_cast<int>(u.size()))
    throw ShapeError("LassoProblem: u length must match dictionary rows");
  if (lambda <= 0) throw DomainError("LassoProblem: lambda must be positive");
  for (int j = 0; j < theta.cols(); ++j) {
    double n = 0.0;
    for (int i = 0; i < theta.rows(); ++i) n += theta(i, j) * theta(i, j);
    if (std::fabs(std::sqrt(n) - 1.0) > 1e-8)
      throw DomainError("LassoProblem: dictionary columns must be unit norm");
  }
}

Vec lasso_network_field(const LassoProblem& prob, const Vec& x) {
  const int n = prob.atoms();
  if (static_cast<int>(x.size()) != n) throw ShapeError("lasso_network_field: x dimension");
  for (double v : x) {
    if (v < -1e-12) {
      static bool warned = false;
      if (!warned) {
        warned = true;
        std::cerr << "lasso_network_field: state left the nonnegative cone; "
                     "the rectified drive will pull it back\n";
      }
      break;
    }
  }
  // Theta^T (u - Theta x) + x - lambda
  Vec residual = prob.u - prob.theta.matvec(x);
  Vec drive = prob.theta.transposed().matvec(residual);
  Vec out(n);
  for (int i = 0; i < n; ++i) {
    double v = x[i] + drive[i] - prob.lambda;
    out[i] = -x[i] + std::max(v, 0.0);
  }
  return out;
}

double lasso_objective(const LassoProblem& prob, const Vec& x) {
  Vec r = prob.u - prob.theta.matvec(x);
  double l1 = 0.0;
  for (double v : x) l1 += std::fabs(v);
  return 0.5 * dot(r, r) + prob.lambda * l1;
}

Vec lasso_oracle(const LassoProblem& prob) {
  const int n = prob.atoms();
  Vec x(n, 0.0);
  Vec residual = prob.u;  // u - Theta x
  double obj = lasso_objective(prob, x);
  for (long round = 0; round < 1000000; ++round) {
    for (int i = 0; i < n; ++i) {
      double corr = 0.0;
      for (int r = 0; r < prob.theta.rows(); ++r) corr += prob.theta(r, i) * residual[r];
      double xi_new = std::max(x[i] + corr - prob.lambda, 0.0);  // unit-norm columns
      double delta = xi_new - x[i];
      if (delta != 0.0) {
        for (int r = 0; r < prob.theta.rows(); ++r) residual[r] -= prob.theta(r, i) * delta;
        x[i] = xi_new;
      }
    }
    double next = lasso_objective(prob, x);
    if (std::fabs(obj - next) < 1e-12) return x;
    obj = next;
  }
  throw ConvergenceError("lasso_oracle: coordinate descent did not settle", obj);
}

Vec softmax_play_field(const std::function<Vec(const Vec&, const Vec&)>& grad_surprise, double tau,
                       const Vec& w, const Vec& x) {
  if (tau <= 0) throw DomainError("softmax_play_field: tau must be positive");
  double total = 0.0;
  for (double v : w) {
    if (v < -1e-8) throw DomainError("softmax_play_field: w has negative mass");
    total += v;
  }
  if (std::fabs(total - 1.0) > 1e-8)
    throw DomainError("softmax_play_field: w must lie on the probability simplex");
  Vec g = grad_surprise(x, w);
  if (g.size() != w.size()) throw ShapeError("softmax_play_field: gradient dimension mismatch");
  for (double& v : g) v = -v / tau;
  Vec s = softmax(g);
  for (size_t i = 0; i < s.size(); ++i) s[i] -= w[i];
  return s;
}

EINetwork::EINetwork(std::vector<bool> is_excitatory_, std::vector<std::pair<int, int>> edges_,
                     double w_ee_, double w_ei_, double w_ie_, double w_ii_, Mat b_)
    : is_excitatory(std::move(is_excitatory_)),
      edges(std::move(edges_)),
      w_ee(w_ee_),
      w_ei(w_ei_),
      w_ie(w_ie_),
      w_ii(w_ii_),
      b(std::move(b_)) {
  const int n = size();
  if (n == 0) throw ShapeError("EINetwork: empty network");
  if (w_ee < 0 || w_ei < 0 || w_ie < 0 || w_ii < 0)
    throw DomainError("EINetwork: weight magnitudes must be nonnegative");
  if (b.rows() != n) throw ShapeError("EINetwork: B row count must match N");
  for (auto [from, to] : edges)
    if (from < 0 || to < 0 || from >= n || to >= n) throw ShapeError("EINetwork: edge out of range");
}

Mat EINetwork::weight_matrix() const {
  Mat w(size(), size());
  for (auto [from, to] : edges) {
    if (is_excitatory[from])
      w(to, from) += is_excitatory[to] ? w_ee : w_ie;
    else
      w(to, from) -= is_excitatory[to] ? w_ei : w_ii;
  }
  return w;
}

EINetwork EINetwork::ek_i(int k, double w_ee, double w_ei, double w_ie, double w_ii) {
  if (k < 1) throw DomainError("EINetwork::ek_i: need k >= 1");
  const int n = k + 1;  // inhibitory hub last
  std::vector<bool> exc(n, true);
  exc[k] = false;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < k; ++i) {
    edges.push_back({i, i});   // E self-loop
    edges.push_back({i, k});   // E -> I
    edges.push_back({k, i});   // I -> E
  }
  edges.push_back({k, k});     // I self-loop
  Mat b(n, k);
  for (int i = 0; i < k; ++i) b(i, i) = 1.0;
  return EINetwork(std::move(exc), std::move(edges), w_ee, w_ei, w_ie, w_ii, std::move(b));
}

Vec ei_field(const EINetwork& net, const Vec& x, const Vec& u) {
  if (static_cast<int>(x.size()) != net.size()) throw ShapeError("ei_field: x dimension");
  if (static_cast<int>(u.size()) != net.b.cols()) throw ShapeError("ei_field: u dimension");
  Vec drive = net.weight_matrix().matvec(x) + net.b.matvec(u);
  Vec out(x.size());
  for (size_t i = 0; i < x.size(); ++i)
    out[i] = -x[i] + std::min(std::max(drive[i], 0.0), 1.0);
  return out;
}

MonoReport monostability_check(const EINetwork& net) {
  const int n = net.size();
  // reciprocity of every E-I connection
  for (auto [from, to] : net.edges) {
    if (from == to) continue;
    if (net.is_excitatory[from] == net.is_excitatory[to]) continue;
    bool reciprocal = false;
    for (auto [f2, t2] : net.edges)
      if (f2 == to && t2 == from) {
        reciprocal = true;
        break;
      }
    if (!reciprocal)
      throw DomainError("monostability_check: E-I connections must be reciprocal");
  }
  std::vector<int> din(n, 0), dout(n, 0);
  for (auto [from, to] : net.edges) {
    if (from == to) continue;  // self-loops do not count toward degrees
    ++dout[from];
    ++din[to];
  }
  MonoReport rep;
  for (int i = 0; i < n; ++i)
    rep.half_degree = std::max(rep.half_degree, 0.5 * (din[i] + dout[i]));
  rep.slack_ee = 1.0 - rep.half_degree * net.w_ee;
  rep.slack_ii = 1.0 - (rep.half_degree - 2.0) * net.w_ii;
  rep.ok = rep.slack_ee > 0.0 && rep.slack_ii > 0.0;
  return rep;
}

WtaPrediction wta_predict(const EINetwork& net, const Vec& u) {
  WtaPrediction pred;
  pred.delta = 1.0 - net.w_ee + net.w_ei;
  if (net.w_ie < 1.0 + net.w_ii - 1e-12) {
    pred.reason = "functionality condition w_ie >= 1 + w_ii violated";
    return pred;
  }
  MonoReport mono = monostability_check(net);
  if (!mono.ok) {
    pred.reason = "monostability conditions violated";
    return pred;
  }
  if (static_cast<int>(u.size()) != net.b.cols()) throw ShapeError("wta_predict: u dimension");
  int above = -1;
  for (size_t i = 0; i < u.size(); ++i) {
    if (u[i] > pred.delta) {
      if (above >= 0) {
        pred.reason = "more than one stimulus above delta";
        return pred;
      }
      above = static_cast<int>(i);
    }
  }
  if (above < 0) {
    pred.reason = "no stimulus above delta";
    return pred;
  }
  for (size_t j = 0; j < u.size(); ++j) {
    if (static_cast<int>(j) == above) continue;
    if (!(u[j] < -pred.delta)) {
      pred.reason = "losing stimuli not all below -delta";
      return pred;
    }
  }
  pred.winner = above;
  return pred;
}

Vec wta_simulate(const EINetwork& net, const Vec& u, const flows::IntegratorConfig& cfg) {
  flows::VectorField f{net.size(), [&](const Vec& x, double) { return ei_field(net, x, u); }};
  return flows::find_equilibrium(f, Vec(net.size(), 0.0), cfg);
}

ContrastLayers contrast_layers_needed(double w_ee, double eps, double delta) {
  if (!(w_ee > 0 && w_ee < 0.5))
    throw DomainError("contrast_layers_needed: need 0 < w_ee < 1/2");
  if (!(eps > 0 && delta > 0)) throw DomainError("contrast_layers_needed: eps, delta > 0");
  ContrastLayers out;
  const double factor = 1.0 / w_ee - 1.0;
  out.formula_value = 1.0 + std::log(eps / delta) / std::log(factor);
  double c = eps;
  int layers = 1;
  while (c < delta && layers < 10000) {
    c *= factor;
    ++layers;
  }
  out.recurrence_layers = layers;
  return out;
}

LadderResult contrast_ladder_simulate(double w_ee, double w_ei, double w_ie, double w_ii,
                                      double eps, int layers, const flows::IntegratorConfig& cfg) {
  if (layers < 1) throw DomainError("contrast_ladder_simulate: layers must be >= 1");
  EINetwork column = EINetwork::ek_i(2, w_ee, w_ei, w_ie, w_ii);
  LadderResult out;
  double c = eps;
  out.contrasts.push_back(c);
  for (int l = 0; l < layers; ++l) {
    Vec eq = wta_simulate(column, Vec{c, 0.0}, cfg);
    double next = eq[0] - eq[1];
    out.gains.push_back(c > 0 ? next / c : 0.0);
    c = next;
    out.contrasts.push_back(c);
  }
  return out;
}

void save_lasso(const LassoProblem& prob, std::ostream& os) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", prob.lambda);
  os << prob.theta.rows() << "," << prob.theta.cols() << "," << buf << "\n";
  for (int i = 0; i < prob.theta.rows(); ++i) {
    for (int j = 0; j < prob.theta.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", prob.theta(i, j));
      os << (j ? "," : "") << buf;
    }
    os << "\n";
  }
  for (size_t i = 0; i < prob.u.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", prob.u[i]);
    os << (i ? "," : "") << buf;
  }
  os << "\n";
}

LassoProblem load_lasso(std::istream& is) {
  auto next_row = [&is]() {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("lasso file: truncated");
    std::vector<double> vals;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    return vals;
  };
  auto header = next_row();
  if (header.size() != 3) throw ConfigError("lasso file: header must be M,N,lambda");
  int m = static_cast<int>(header[0]);
  int n = static_cast<int>(header[1]);
  Mat theta(m, n);
  for (int i = 0; i < m; ++i) {
    auto row = next_row();
    if (static_cast<int>(row.size()) != n) throw ConfigError("lasso file: bad dictionary row");
    for (int j = 0; j < n; ++j) theta(i, j) = row[j];
  }
  auto u = next_row();
  if (static_cast<int>(u.size()) != m) throw ConfigError("lasso file: bad stimulus row");
  return LassoProblem(std::move(theta), Vec(u.begin(), u.end()), header[2]);
}

}  // namespace edm::proximal
