#pragma once

// Minimal dense linear algebra, randomness, and verification primitives
// shared by every model in this library. Desk-scale only: dense row-major
// storage, a cyclic Jacobi eigensolver, central finite differences.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace edm {

using Vec = std::vector<double>;

// Named tolerances used throughout. Tests refer to these by name so the
// numbers live in exactly one place.
namespace tol {
inline constexpr double symmetry = 1e-10;       // accepted asymmetry in "symmetric" inputs
inline constexpr double eig_residual = 1e-8;    // per-column ||Mv - lambda v||
inline constexpr double equilibrium = 1e-8;     // default derivative-norm convergence
inline constexpr double energy_step = 1e-9;     // allowed per-step energy increase
inline constexpr double divergence_guard = 1e12;  // abort when ||x||_inf exceeds this
}  // namespace tol

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
  double time;
  DivergenceError(const std::string& what, double t) : std::runtime_error(what), time(t) {}
};

struct ConvergenceError : std::runtime_error {
  double residual;
  ConvergenceError(const std::string& what, double r) : std::runtime_error(what), residual(r) {}
};

struct NotLockedError : std::runtime_error {
  std::vector<int> indices;  // 1-based offenders
  NotLockedError(const std::string& what, std::vector<int> idx)
      : std::runtime_error(what), indices(std::move(idx)) {}
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool all_finite(const Vec& v);
void require_finite(const Vec& v, const char* what);

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);
double norminf(const Vec& v);
Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& v);

// Dense row-major matrix. Construction rejects non-finite entries and
// size mismatches.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols);  // zero-filled
  Mat(int rows, int cols, Vec entries);
  static Mat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const Vec& data() const { return a_; }

  Vec matvec(const Vec& x) const;
  Mat transposed() const;
  Mat operator*(const Mat& other) const;
  Mat operator+(const Mat& other) const;
  Mat operator-(const Mat& other) const;
  Mat scaled(double s) const;
  double max_abs() const;
  bool is_square() const { return rows_ == cols_; }
  bool is_symmetric(double tolerance = tol::symmetry) const;

 private:
  int rows_ = 0, cols_ = 0;
  Vec a_;
};

Mat outer(const Vec& a, const Vec& b);

// Splits a square matrix into its symmetric part and reports the largest
// asymmetry |a_ij - a_ji| seen, so spectral tests on numerical Jacobians
// can state how much was discarded.
std::pair<Mat, double> symmetrized(const Mat& m);

// Deterministic xorshift-family generator: xoshiro256++ with SplitMix64
// seeding. The algorithm is fixed and versioned with the repository so
// that every seeded experiment reproduces bit-exactly on any platform.
// normal() uses the polar Box-Muller transform with one cached spare.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next_u64();
  double uniform();            // [0, 1)
  double uniform(double lo, double hi);
  double normal();             // standard normal
  int uniform_int(int n);      // uniform on {0, ..., n-1}
  double sign();               // +1 or -1 with equal probability
  std::vector<int> permutation(int n);  // Fisher-Yates

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct EigResult {
  Vec eigenvalues;   // sorted descending
  Mat eigenvectors;  // columns, orthonormal, matching order
};

// Cyclic Jacobi rotations for symmetric matrices. Plenty at N up to a few
// hundred, which covers every experiment here.
EigResult sym_eig(const Mat& m);

// Central difference (f(x+h e_i) - f(x-h e_i)) / (2h).
Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h);

// Symmetrized second central differences; used for Hessian identity checks.
Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& x, double h);

// Finite-difference Jacobian of a vector field, column j = df/dx_j.
Mat fd_jacobian(const std::function<Vec(const Vec&)>& field, const Vec& x, double h);

// Product m (m-2) ... 1 for odd m >= 1; the m = -1 edge evaluates to 1.
std::uint64_t double_factorial(long long m);

}  // namespace edm
