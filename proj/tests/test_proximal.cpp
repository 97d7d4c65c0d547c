#include <doctest.h>

#include <cmath>
#include <sstream>

#include "edm/hopfield.hpp"
#include "edm/proximal.hpp"

using namespace edm;
using namespace edm::proximal;

TEST_CASE("prox closed forms") {
  CHECK(prox(ProxSpec::box(0, 1), {1.7})[0] == doctest::Approx(1.0));
  CHECK(prox(ProxSpec::box(0, 1), {-0.4})[0] == doctest::Approx(0.0));
  Vec soft = prox(ProxSpec::l1(0.5), {1.2, -0.3});
  CHECK(soft[0] == doctest::Approx(0.7));
  CHECK(soft[1] == doctest::Approx(0.0));
  CHECK(prox(ProxSpec::nonneg_l1(0.5), {1.2})[0] == doctest::Approx(0.7));
  CHECK(prox(ProxSpec::nonneg_l1(0.5), {-1.2})[0] == doctest::Approx(0.0));
  CHECK(prox(ProxSpec::nonneg(), {-3.0})[0] == doctest::Approx(0.0));
  Vec uniform = prox(ProxSpec::negentropy_simplex(0.7), {2.2, 2.2, 2.2});
  for (double v : uniform) CHECK(v == doctest::Approx(1.0 / 3));
}

TEST_CASE("prox maps are nonexpansive over random probes") {
  Rng rng(3);
  std::vector<ProxSpec> specs{ProxSpec::l1(0.3), ProxSpec::nonneg_l1(0.7), ProxSpec::box(-1, 2),
                              ProxSpec::nonneg(), ProxSpec::negentropy_simplex(1.0),
                              ProxSpec::negentropy_simplex(2.5)};
  for (const auto& spec : specs) {
    for (int rep = 0; rep < 2000; ++rep) {
      Vec x(4), y(4);
      for (double& v : x) v = rng.uniform(-5, 5);
      for (double& v : y) v = rng.uniform(-5, 5);
      CHECK(norm2(prox(spec, x) - prox(spec, y)) <= norm2(x - y) + 1e-12);
    }
  }
}

TEST_CASE("proxgrad field forms") {
  auto grad = [](const Vec& x, const Vec& u) {
    Vec g(x.size());
    for (size_t i = 0; i < x.size(); ++i) g[i] = x[i] - u[i];
    return g;
  };
  Vec f = proxgrad_field(grad, ProxSpec::box(0, 1), {0.5}, {2.0});
  CHECK(f[0] == doctest::Approx(0.5));

  // equilibrium iff fixed point of the prox map
  Vec u{0.8};
  Vec xs = prox(ProxSpec::box(0, 1), u);  // x* = clamp(u): grad f(x*) = x* - u
  Vec fz = proxgrad_field(grad, ProxSpec::box(0, 1), xs, u);
  CHECK(std::fabs(fz[0]) < 1e-12);

  // prox of the zero function is the identity: field reduces to -grad f
  Rng rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    Vec x{rng.uniform(-2, 2)}, uu{rng.uniform(-2, 2)};
    Vec fv = proxgrad_field(grad, ProxSpec::nonneg(), x, uu);
    if (x[0] - (x[0] - uu[0]) > 0) {  // interior of the cone
      CHECK(fv[0] == doctest::Approx(-(x[0] - uu[0])).epsilon(1e-12));
    }
  }
}

TEST_CASE("firing-rate dynamics equal proximal gradient descent on the network energy") {
  // f(x, u) = 1/2 x^T (I - W) x - x^T B u, Phi = prox of the regularizer
  Rng rng(7);
  const int n = 5;
  Mat w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) w(i, j) = w(j, i) = 0.3 * rng.normal();
  Mat b = Mat::identity(n);
  auto grad_f = [&](const Vec& x, const Vec& u) {
    Vec g = x - w.matvec(x) - b.matvec(u);
    return g;
  };
  hopfield::HopfieldNet frn(1.0, Vec(n, 1.0), w, b, hopfield::Activation::sat01());
  for (int rep = 0; rep < 50; ++rep) {
    Vec x(n), u(n);
    for (double& v : x) v = rng.uniform(-2, 2);
    for (double& v : u) v = rng.uniform(-1, 1);
    Vec lhs = hopfield::frn_field(frn, x, u);
    Vec rhs = proxgrad_field(grad_f, ProxSpec::box(0, 1), x, u);
    CHECK(norm2(lhs - rhs) < 1e-12);
  }
  // same identity with the nonnegative cone and relu
  hopfield::HopfieldNet frn2(1.0, Vec(n, 1.0), w, b, hopfield::Activation::relu());
  for (int rep = 0; rep < 50; ++rep) {
    Vec x(n), u(n);
    for (double& v : x) v = rng.uniform(-2, 2);
    for (double& v : u) v = rng.uniform(-1, 1);
    CHECK(norm2(hopfield::frn_field(frn2, x, u) -
                proxgrad_field(grad_f, ProxSpec::nonneg(), x, u)) < 1e-12);
  }
}

TEST_CASE("lasso network closed form at the identity dictionary") {
  LassoProblem prob(Mat::identity(2), {1.0, 0.1}, 0.3);
  flows::VectorField f{2, [&](const Vec& x, double) { return lasso_network_field(prob, x); }};
  flows::IntegratorConfig cfg;
  cfg.equilibrium_tol = 1e-12;
  cfg.t_max = 400.0;
  Vec xs = flows::find_equilibrium(f, {0.0, 0.0}, cfg);
  CHECK(xs[0] == doctest::Approx(0.7).epsilon(1e-8));
  CHECK(std::fabs(xs[1]) < 1e-8);
  CHECK(lasso_oracle(prob)[0] == doctest::Approx(0.7).epsilon(1e-8));

  // origin equilibrium with zero stimulus
  LassoProblem origin(Mat::identity(2), {0.0, 0.0}, 0.2);
  Vec f0 = lasso_network_field(origin, {0.0, 0.0});
  CHECK(norm2(f0) == 0.0);
}

TEST_CASE("oracle goes to zero once lambda dominates the correlations") {
  Rng rng(11);
  Mat theta(3, 4);
  for (int j = 0; j < 4; ++j) {
    double norm = 0;
    for (int i = 0; i < 3; ++i) {
      theta(i, j) = rng.normal();
      norm += theta(i, j) * theta(i, j);
    }
    for (int i = 0; i < 3; ++i) theta(i, j) /= std::sqrt(norm);
  }
  Vec u{0.3, -0.2, 0.5};
  Vec corr = theta.transposed().matvec(u);
  double lam = 1e-9 + *std::max_element(corr.begin(), corr.end());
  LassoProblem prob(theta, u, std::max(lam, 1e-6));
  Vec xs = lasso_oracle(prob);
  CHECK(norm2(xs) < 1e-9);
}

TEST_CASE("duplicated atoms compete for one mass budget") {
  Mat theta(2, 2);
  theta(0, 0) = 1.0;
  theta(0, 1) = 1.0;  // two copies of e1
  LassoProblem prob(theta, {1.0, 0.0}, 0.3);
  flows::VectorField f{2, [&](const Vec& x, double) { return lasso_network_field(prob, x); }};
  flows::IntegratorConfig cfg;
  cfg.equilibrium_tol = 1e-11;
  cfg.t_max = 2000.0;
  Vec xs = flows::find_equilibrium(f, {0.2, 0.1}, cfg);
  CHECK(xs[0] + xs[1] == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(lasso_objective(prob, xs) ==
        doctest::Approx(lasso_objective(prob, lasso_oracle(prob))).epsilon(1e-6));
}

TEST_CASE("lasso objective descends along the network flow") {
  Rng rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    Mat theta(4, 6);
    for (int j = 0; j < 6; ++j) {
      double norm = 0;
      for (int i = 0; i < 4; ++i) {
        theta(i, j) = rng.normal();
        norm += theta(i, j) * theta(i, j);
      }
      for (int i = 0; i < 4; ++i) theta(i, j) /= std::sqrt(norm);
    }
    Vec u(4);
    for (double& v : u) v = rng.normal();
    LassoProblem prob(theta, u, 0.25);
    flows::VectorField f{6, [&](const Vec& x, double) { return lasso_network_field(prob, x); }};
    flows::IntegratorConfig cfg;
    cfg.dt = 0.005;
    cfg.t_max = 30.0;
    Vec x0(6);
    for (double& v : x0) v = rng.uniform(0, 1);
    auto rec = flows::integrate_ode(f, x0, cfg, flows::EnergyFn([&](const Vec& x) {
                                      return lasso_objective(prob, x);
                                    }));
    CHECK(flows::max_energy_jump(rec) < 1e-9);
  }
}

TEST_CASE("contracting flows pull trajectories together") {
  Rng rng(17);
  Mat theta(6, 4);  // tall dictionary: Theta^T Theta nonsingular
  for (int j = 0; j < 4; ++j) {
    double norm = 0;
    for (int i = 0; i < 6; ++i) {
      theta(i, j) = rng.normal();
      norm += theta(i, j) * theta(i, j);
    }
    for (int i = 0; i < 6; ++i) theta(i, j) /= std::sqrt(norm);
  }
  Mat gram = theta.transposed() * theta;
  Mat w = Mat::identity(4) - gram;
  REQUIRE(sym_eig(w).eigenvalues.front() < 1.0);  // W < I surrogate
  Vec u(6);
  for (double& v : u) v = rng.normal();
  LassoProblem prob(theta, u, 0.2);
  flows::VectorField f{4, [&](const Vec& x, double) { return lasso_network_field(prob, x); }};
  flows::IntegratorConfig cfg;
  cfg.dt = 0.01;
  cfg.t_max = 1.0;
  cfg.equilibrium_tol = 1e-300;
  Vec a(4), bv(4);
  for (double& v : a) v = rng.uniform(0, 2);
  for (double& v : bv) v = rng.uniform(0, 2);
  double dist = norm2(a - bv);
  for (int step = 0; step < 5; ++step) {
    a = flows::integrate_ode(f, a, cfg).final_state();
    bv = flows::integrate_ode(f, bv, cfg).final_state();
    double next = norm2(a - bv);
    CHECK(next < dist);
    dist = next;
  }
}

TEST_CASE("softmax play field") {
  auto zero_grad = [](const Vec&, const Vec& w) { return Vec(w.size(), 0.0); };
  Vec w{1.0 / 3, 1.0 / 3, 1.0 / 3};
  Vec f = softmax_play_field(zero_grad, 0.5, w, {});
  CHECK(norm2(f) < 1e-12);

  auto grad = [](const Vec&, const Vec& w) { return Vec{3.0, 1.0, 2.0}; };
  // shift invariance
  auto grad_shift = [](const Vec&, const Vec& w) { return Vec{13.0, 11.0, 12.0}; };
  Vec f1 = softmax_play_field(grad, 0.7, w, {});
  Vec f2 = softmax_play_field(grad_shift, 0.7, w, {});
  CHECK(norm2(f1 - f2) < 1e-12);

  // small tau: equilibrium pushes all mass onto the least-surprise entry
  Vec fsmall = softmax_play_field(grad, 1e-3, w, {});
  Vec equil = fsmall + w;  // softmax output
  CHECK(equil[1] == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(softmax_play_field(grad, 0.5, {0.9, 0.3, 0.1}, {}), DomainError);
}

TEST_CASE("ei field and the ek-i motif") {
  EINetwork net = EINetwork::ek_i(2, 0.4, 0.5, 1.3, 0.3);
  Vec zero = ei_field(net, Vec(3, 0.0), Vec(2, 0.0));
  CHECK(norm2(zero) == 0.0);

  // all-zero weights: pure clamped feedforward drive
  EINetwork bare = EINetwork::ek_i(2, 0.0, 0.0, 0.0, 0.0);
  Vec f = ei_field(bare, Vec(3, 0.0), {0.7, -0.3});
  CHECK(f[0] == doctest::Approx(0.7));
  CHECK(f[1] == doctest::Approx(0.0));
}

TEST_CASE("monostability slacks at the hub degree reading") {
  EINetwork net = EINetwork::ek_i(2, 0.4, 0.5, 1.3, 0.3);
  MonoReport rep = monostability_check(net);
  CHECK(rep.half_degree == doctest::Approx(2.0));
  CHECK(rep.ok);
  CHECK(rep.slack_ee == doctest::Approx(0.2));
  CHECK(rep.slack_ii == doctest::Approx(1.0));

  EINetwork hot = EINetwork::ek_i(2, 0.6, 0.5, 1.3, 0.3);
  CHECK(!monostability_check(hot).ok);

  EINetwork free_net = EINetwork::ek_i(3, 0.0, 0.5, 1.3, 0.0);
  CHECK(monostability_check(free_net).ok);

  // non-reciprocal E-I edge is rejected
  std::vector<bool> exc{true, false};
  std::vector<std::pair<int, int>> edges{{0, 1}};
  EINetwork broken(exc, edges, 0.1, 0.1, 1.2, 0.1, Mat(2, 1));
  CHECK_THROWS_AS(monostability_check(broken), DomainError);
}

TEST_CASE("winner-take-all prediction and simulation") {
  EINetwork net = EINetwork::ek_i(2, 0.4, 0.5, 1.3, 0.3);
  flows::IntegratorConfig cfg;
  cfg.t_max = 400.0;
  cfg.equilibrium_tol = 1e-9;

  WtaPrediction pred = wta_predict(net, {1.2, -1.2});
  REQUIRE(pred.winner.has_value());
  CHECK(*pred.winner == 0);
  CHECK(pred.delta == doctest::Approx(1.1));
  Vec eq = wta_simulate(net, {1.2, -1.2}, cfg);
  CHECK(eq[0] >= 0.9);
  CHECK(eq[1] <= 0.05);

  WtaPrediction mirror = wta_predict(net, {-1.2, 1.2});
  REQUIRE(mirror.winner.has_value());
  CHECK(*mirror.winner == 1);

  WtaPrediction inside = wta_predict(net, {0.5, -0.5});
  CHECK(!inside.winner.has_value());
  CHECK(!inside.reason.empty());

  // functionality violation reported, not ignored
  EINetwork weak = EINetwork::ek_i(2, 0.4, 0.5, 0.9, 0.3);
  WtaPrediction no = wta_predict(weak, {1.2, -1.2});
  CHECK(!no.winner.has_value());
  CHECK(no.reason.find("functionality") != std::string::npos);
}

TEST_CASE("contrast layer counts") {
  // factor 3, eps = 0.1 delta: 0.1 -> 0.3 -> 0.9 -> 2.7 crosses at layer 4
  ContrastLayers c = contrast_layers_needed(0.25, 0.1, 1.0);
  CHECK(c.recurrence_layers == 4);
  CHECK(c.formula_value < 0.0);  // printed formula goes negative here

  ContrastLayers one = contrast_layers_needed(0.25, 2.0, 1.0);
  CHECK(one.recurrence_layers == 1);

  CHECK_THROWS_AS(contrast_layers_needed(0.7, 0.1, 1.0), DomainError);
  CHECK_THROWS_AS(contrast_layers_needed(0.25, -0.1, 1.0), DomainError);
}

TEST_CASE("ladder amplification realizes 1/w_ee - 1 per layer") {
  const double w_ee = 0.45, w_ii = 0.25;
  const double w_ie = 1.0 + w_ii;
  const double w_ei = w_ee / (1.0 - w_ee) - (1.0 - w_ee);
  const double delta = 1.0 - w_ee + w_ei;
  const double eps = 0.1 * delta;
  ContrastLayers c = contrast_layers_needed(w_ee, eps, delta);
  flows::IntegratorConfig cfg;
  cfg.t_max = 400.0;
  cfg.equilibrium_tol = 1e-10;
  LadderResult ladder =
      contrast_ladder_simulate(w_ee, w_ei, w_ie, w_ii, eps, c.recurrence_layers, cfg);
  const double target = 1.0 / w_ee - 1.0;
  for (size_t l = 0; l + 1 < ladder.gains.size(); ++l)
    CHECK(ladder.gains[l] == doctest::Approx(target).epsilon(0.10));
  CHECK(ladder.contrasts.back() >= delta);
}

TEST_CASE("lasso file round trip") {
  Rng rng(23);
  Mat theta(3, 5);
  for (int j = 0; j < 5; ++j) {
    double norm = 0;
    for (int i = 0; i < 3; ++i) {
      theta(i, j) = rng.normal();
      norm += theta(i, j) * theta(i, j);
    }
    for (int i = 0; i < 3; ++i) theta(i, j) /= std::sqrt(norm);
  }
  LassoProblem prob(theta, {0.1, -0.4, 0.9}, 0.37);
  std::stringstream ss;
  save_lasso(prob, ss);
  LassoProblem back = load_lasso(ss);
  CHECK(back.lambda == prob.lambda);
  CHECK((back.theta - prob.theta).max_abs() == 0.0);
  CHECK(back.u == prob.u);
}

TEST_CASE("nash stationarity at the e-i equilibrium") {
  EINetwork net = EINetwork::ek_i(3, 0.2, 0.4, 1.4, 0.35);
  flows::IntegratorConfig cfg;
  cfg.t_max = 400.0;
  cfg.equilibrium_tol = 1e-10;
  Vec u{0.9, -0.7, 0.2};
  Vec eq = wta_simulate(net, u, cfg);
  Mat w = net.weight_matrix();
  Vec drive = w.matvec(eq) + net.b.matvec(u);
  for (int i = 0; i < net.size(); ++i) {
    double best = std::min(std::max(drive[i], 0.0), 1.0);
    CHECK(std::fabs(eq[i] - best) < 1e-8);
  }
}
