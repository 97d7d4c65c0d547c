#include "edm/hopfield.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace edm::hopfield {

Activation Activation::from_name(const std::string& name) {
  if (name == "tanh") return tanh_();
  if (name == "sigmoid") return sigmoid();
  if (name == "relu") return relu();
  if (name == "sat01") return sat01();
  if (name == "identity") return identity();
  throw DomainError("unknown activation: " + name);
}

const char* Activation::name() const {
  switch (kind_) {
    case Kind::Tanh: return "tanh";
    case Kind::Sigmoid: return "sigmoid";
    case Kind::ReLU: return "relu";
    case Kind::Sat01: return "sat01";
    case Kind::Identity: return "identity";
  }
  return "?";
}

double Activation::value(double x) const {
  switch (kind_) {
    case Kind::Tanh: return std::tanh(x);
    case Kind::Sigmoid: return std::tanh(0.5 * x);  // 2/(1+e^-x) - 1
    case Kind::ReLU: return x > 0 ? x : 0.0;
    case Kind::Sat01: return x < 0 ? 0.0 : (x > 1 ? 1.0 : x);
    case Kind::Identity: return x;
  }
  return 0;
}

double Activation::deriv(double x) const {
  switch (kind_) {
    case Kind::Tanh: {
      double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Kind::Sigmoid: {
      double t = std::tanh(0.5 * x);
      return 0.5 * (1.0 - t * t);
    }
    case Kind::ReLU: return x >= 0 ? 1.0 : 0.0;
    case Kind::Sat01: return (x >= 0 && x < 1) ? 1.0 : 0.0;
    case Kind::Identity: return 1.0;
  }
  return 0;
}

double Activation::integral(double x) const {
  switch (kind_) {
    case Kind::Tanh: return std::log(std::cosh(x));
    case Kind::Sigmoid: return 2.0 * std::log(std::cosh(0.5 * x));
    case Kind::ReLU: return x > 0 ? 0.5 * x * x : 0.0;
    case Kind::Sat01:
      if (x <= 0) return 0.0;
      if (x <= 1) return 0.5 * x * x;
      return x - 0.5;
    case Kind::Identity: return 0.5 * x * x;
  }
  throw DomainError("activation without closed-form integral");
}

Vec Activation::value(const Vec& x) const {
  Vec y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = value(x[i]);
  return y;
}

HopfieldNet::HopfieldNet(double tau_, Vec d_, Mat w_, Mat b_, Activation phi_)
    : tau(tau_), d(std::move(d_)), w(std::move(w_)), b(std::move(b_)), phi(phi_) {
  if (tau <= 0) throw DomainError("HopfieldNet: tau must be positive");
  const int n = static_cast<int>(d.size());
  if (n == 0) throw ShapeError("HopfieldNet: empty dissipation vector");
  for (double di : d)
    if (!(di > 0)) throw DomainError("HopfieldNet: dissipation rates must be positive");
  if (w.rows() != n || w.cols() != n) throw ShapeError("HopfieldNet: W must be N x N");
  if (b.rows() != n) throw ShapeError("HopfieldNet: B row count must be N");
}

Vec hopfield_field(const HopfieldNet& net, const Vec& x, const Vec& u) {
  if (static_cast<int>(x.size()) != net.size()) throw ShapeError("hopfield_field: x dimension");
  if (static_cast<int>(u.size()) != net.b.cols()) throw ShapeError("hopfield_field: u dimension");
  Vec wphi = net.w.matvec(net.phi.value(x));
  Vec bu = net.b.matvec(u);
  Vec out(x.size());
  for (size_t i = 0; i < x.size(); ++i)
    out[i] = (-net.d[i] * x[i] + wphi[i] + bu[i]) / net.tau;
  return out;
}

bool energy_certified(const HopfieldNet& net) { return net.w.is_symmetric(); }

double hopfield_energy(const HopfieldNet& net, const Vec& x, const Vec& u) {
  if (static_cast<int>(x.size()) != net.size()) throw ShapeError("hopfield_energy: x dimension");
  if (static_cast<int>(u.size()) != net.b.cols()) throw ShapeError("hopfield_energy: u dimension");
  if (!energy_certified(net)) {
    static bool warned = false;
    if (!warned) {
      warned = true;
      std::cerr << "hopfield_energy: W is asymmetric, value is not a descent certificate\n";
    }
  }
  Vec phi = net.phi.value(x);
  Vec bu = net.b.matvec(u);
  double e = -0.5 * dot(phi, net.w.matvec(phi));
  double ints = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    e += (net.d[i] * x[i] - bu[i]) * phi[i];
    ints += net.d[i] * net.phi.integral(x[i]);
  }
  return e - ints;
}

double check_lyapunov_decrease(const flows::TrajectoryRecord& traj) {
  return flows::max_energy_jump(traj);
}

bool check_global_stability(const Mat& w, const Vec& d) {
  if (!w.is_square() || w.rows() != static_cast<int>(d.size()))
    throw ShapeError("check_global_stability: shape mismatch");
  Mat m = w;
  for (int i = 0; i < m.rows(); ++i) m(i, i) -= d[i];
  EigResult eig = sym_eig(symmetrized(m).first);
  return eig.eigenvalues.front() < 0.0;
}

Vec frn_field(const HopfieldNet& net, const Vec& z, const Vec& u) {
  if (static_cast<int>(z.size()) != net.size()) throw ShapeError("frn_field: z dimension");
  if (static_cast<int>(u.size()) != net.b.cols()) throw ShapeError("frn_field: u dimension");
  Vec drive = net.w.matvec(z) + net.b.matvec(u);
  Vec out(z.size());
  for (size_t i = 0; i < z.size(); ++i) out[i] = -net.d[i] * z[i] + net.phi.value(drive[i]);
  return out;
}

double sign01(double x) { return x >= 0 ? 1.0 : -1.0; }

Vec retrieve_sign(const HopfieldNet& net, const Vec& x0, const Vec& u,
                  const flows::IntegratorConfig& cfg) {
  flows::VectorField f{net.size(),
                       [&net, &u](const Vec& x, double) { return hopfield_field(net, x, u); }};
  Vec xs = flows::find_equilibrium(f, x0, cfg);
  Vec s(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) s[i] = sign01(xs[i]);
  return s;
}

namespace {

void write_mat(std::ostream& os, const char* tag, const Mat& m) {
  os << tag << "," << m.rows() << "," << m.cols() << "\n";
  char buf[64];
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      os << (j ? "," : "") << buf;
    }
    os << "\n";
  }
}

Mat read_mat(std::istream& is, const char* tag) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("network file: missing block");
  std::istringstream hdr(line);
  std::string name;
  std::getline(hdr, name, ',');
  if (name != tag) throw ConfigError("network file: expected block " + std::string(tag));
  int rows, cols;
  char comma;
  hdr >> rows >> comma >> cols;
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!std::getline(is, line)) throw ConfigError("network file: truncated matrix block");
    std::istringstream row(line);
    std::string cell;
    for (int j = 0; j < cols; ++j) {
      if (!std::getline(row, cell, ',')) throw ConfigError("network file: short row");
      m(i, j) = std::stod(cell);
    }
  }
  return m;
}

}  // namespace

void save_network(const HopfieldNet& net, std::ostream& os) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", net.tau);
  os << "hopfield,activation=" << net.phi.name() << ",tau=" << buf << "\n";
  write_mat(os, "W", net.w);
  write_mat(os, "B", net.b);
  Mat dm(1, net.size());
  for (int i = 0; i < net.size(); ++i) dm(0, i) = net.d[i];
  write_mat(os, "D", dm);
}

HopfieldNet load_network(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("network file: empty");
  std::istringstream hdr(line);
  std::string kind, act, taus;
  std::getline(hdr, kind, ',');
  std::getline(hdr, act, ',');
  std::getline(hdr, taus, ',');
  if (kind != "hopfield" || act.rfind("activation=", 0) != 0 || taus.rfind("tau=", 0) != 0)
    throw ConfigError("network file: bad header");
  Activation phi = Activation::from_name(act.substr(11));
  double tau = std::stod(taus.substr(4));
  Mat w = read_mat(is, "W");
  Mat b = read_mat(is, "B");
  Mat dm = read_mat(is, "D");
  Vec d(dm.cols());
  for (int i = 0; i < dm.cols(); ++i) d[i] = dm(0, i);
  return HopfieldNet(tau, d, w, b, phi);
}

}  // namespace edm::hopfield
