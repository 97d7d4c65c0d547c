#pragma once

// Continuous-time Hopfield and firing-rate networks with their energy
// function and stability checks.
//
//   tau x' = -D x + W Phi(x) + B u          (membrane potentials)
//      z'  = -D z + Phi(W z + B u)          (firing rates)
//
// The energy is a Lyapunov certificate only for symmetric W; asymmetric
// weights still evaluate (with a one-time warning) so the certificate can
// be shown to fail on rotational fields.

#include <iosfwd>
#include <string>

#include "edm/flows.hpp"
#include "edm/mathcore.hpp"

namespace edm::hopfield {

// Elementwise activation with value, derivative, and integral-from-zero
// maps. Derivatives at kinks (ReLU, Sat01) use the right-derivative.
// Sigmoid is centered, 2/(1+e^-x) - 1, so Phi(0) = 0 stays sign-preserving.
class Activation {
 public:
  enum class Kind { Tanh, Sigmoid, ReLU, Sat01, Identity };

  Activation() = default;
  explicit Activation(Kind k) : kind_(k) {}
  static Activation tanh_() { return Activation(Kind::Tanh); }
  static Activation sigmoid() { return Activation(Kind::Sigmoid); }
  static Activation relu() { return Activation(Kind::ReLU); }
  static Activation sat01() { return Activation(Kind::Sat01); }
  static Activation identity() { return Activation(Kind::Identity); }
  static Activation from_name(const std::string& name);

  Kind kind() const { return kind_; }
  const char* name() const;
  double value(double x) const;
  double deriv(double x) const;
  double integral(double x) const;  // int_0^x value(w) dw
  Vec value(const Vec& x) const;

 private:
  Kind kind_ = Kind::Tanh;
};

struct HopfieldNet {
  double tau = 1.0;
  Vec d;            // positive dissipation rates, diag of D
  Mat w;            // N x N
  Mat b;            // N x M
  Activation phi;

  HopfieldNet(double tau, Vec d, Mat w, Mat b, Activation phi);
  int size() const { return static_cast<int>(d.size()); }
};

// (-D x + W Phi(x) + B u) / tau
Vec hopfield_field(const HopfieldNet& net, const Vec& x, const Vec& u);

// -1/2 Phi(x)^T W Phi(x) + (D x - B u)^T Phi(x) - sum_i d_i int_0^{x_i} Phi
double hopfield_energy(const HopfieldNet& net, const Vec& x, const Vec& u);

// True when the energy is a descent certificate (symmetric W).
bool energy_certified(const HopfieldNet& net);

// Max positive jump in recorded energies; at most tol::energy_step on any
// trajectory of a certified net.
double check_lyapunov_decrease(const flows::TrajectoryRecord& traj);

// Sufficient surrogate for Hurwitz diagonal stability of W - D: largest
// eigenvalue of the symmetric part of (W - D) is negative. Conservative
// (identity certificate) but cheap.
bool check_global_stability(const Mat& w, const Vec& d);

// -D z + Phi(W z + B u)
Vec frn_field(const HopfieldNet& net, const Vec& z, const Vec& u);

// Relax from x0 and decode the equilibrium elementwise by sign; sign(0)
// decodes as +1 everywhere in this library.
Vec retrieve_sign(const HopfieldNet& net, const Vec& x0, const Vec& u,
                  const flows::IntegratorConfig& cfg);

double sign01(double x);  // +1 for x >= 0, -1 otherwise

// CSV blocks for W, B, D under a one-line header naming activation and tau.
void save_network(const HopfieldNet& net, std::ostream& os);
HopfieldNet load_network(std::istream& is);

}  // namespace edm::hopfield
