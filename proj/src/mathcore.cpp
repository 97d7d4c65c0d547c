#include "edm/mathcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edm {

bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

void require_finite(const Vec& v, const char* what) {
  if (!all_finite(v)) throw EvalError(std::string(what) + ": non-finite entries");
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw ShapeError("dot: size mismatch");
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

double norminf(const Vec& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

Vec operator+(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw ShapeError("vec+: size mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec operator-(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw ShapeError("vec-: size mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec operator*(double s, const Vec& v) {
  Vec r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = s * v[i];
  return r;
}

Mat::Mat(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) throw ShapeError("Mat: non-positive dimensions");
  a_.assign(static_cast<size_t>(rows) * cols, 0.0);
}

Mat::Mat(int rows, int cols, Vec entries) : rows_(rows), cols_(cols), a_(std::move(entries)) {
  if (rows <= 0 || cols <= 0) throw ShapeError("Mat: non-positive dimensions");
  if (a_.size() != static_cast<size_t>(rows) * cols)
    throw ShapeError("Mat: rows*cols does not match entry count");
  require_finite(a_, "Mat");
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec Mat::matvec(const Vec& x) const {
  if (static_cast<int>(x.size()) != cols_) throw ShapeError("matvec: size mismatch");
  Vec y(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double s = 0;
    const double* row = &a_[static_cast<size_t>(i) * cols_];
    for (int j = 0; j < cols_; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

Mat Mat::transposed() const {
  Mat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Mat Mat::operator*(const Mat& other) const {
  if (cols_ != other.rows_) throw ShapeError("matmul: inner dimension mismatch");
  Mat r(rows_, other.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < other.cols_; ++j) r(i, j) += aik * other(k, j);
    }
  return r;
}

Mat Mat::operator+(const Mat& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw ShapeError("mat+: shape mismatch");
  Mat r = *this;
  for (size_t i = 0; i < r.a_.size(); ++i) r.a_[i] += other.a_[i];
  return r;
}

Mat Mat::operator-(const Mat& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw ShapeError("mat-: shape mismatch");
  Mat r = *this;
  for (size_t i = 0; i < r.a_.size(); ++i) r.a_[i] -= other.a_[i];
  return r;
}

Mat Mat::scaled(double s) const {
  Mat r = *this;
  for (double& x : r.a_) x *= s;
  return r;
}

double Mat::max_abs() const {
  double m = 0;
  for (double x : a_) m = std::max(m, std::fabs(x));
  return m;
}

bool Mat::is_symmetric(double tolerance) const {
  if (!is_square()) return false;
  for (int i = 0; i < rows_; ++i)
    for (int j = i + 1; j < cols_; ++j)
      if (std::fabs((*this)(i, j) - (*this)(j, i)) > tolerance) return false;
  return true;
}

Mat outer(const Vec& a, const Vec& b) {
  Mat m(static_cast<int>(a.size()), static_cast<int>(b.size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) m(static_cast<int>(i), static_cast<int>(j)) = a[i] * b[j];
  return m;
}

std::pair<Mat, double> symmetrized(const Mat& m) {
  if (!m.is_square()) throw ShapeError("symmetrized: square matrix required");
  Mat s(m.rows(), m.cols());
  double asym = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      s(i, j) = 0.5 * (m(i, j) + m(j, i));
      asym = std::max(asym, std::fabs(m(i, j) - m(j, i)));
    }
  return {s, asym};
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& s : s_) s = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  std::uint64_t result = rotl64(s_[0] + s_[3], 23) + s_[0];
  std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl64(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

int Rng::uniform_int(int n) {
  if (n <= 0) throw DomainError("uniform_int: n must be positive");
  std::uint64_t un = static_cast<std::uint64_t>(n);
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return static_cast<int>(x % un);
}

double Rng::sign() { return (next_u64() & 1ULL) ? 1.0 : -1.0; }

std::vector<int> Rng::permutation(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(p[i], p[uniform_int(i + 1)]);
  return p;
}

EigResult sym_eig(const Mat& m) {
  if (!m.is_square()) throw ShapeError("sym_eig: square matrix required");
  const int n = m.rows();
  double scale = std::max(1.0, m.max_abs());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(m(i, j) - m(j, i)) > tol::symmetry * scale)
        throw ShapeError("sym_eig: matrix not symmetric within tolerance");

  Mat a = symmetrized(m).first;
  Mat v = Mat::identity(n);

  auto off_norm = [&]() {
    double s = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };

  const double stop = 1e-14 * std::max(1.0, a.max_abs()) * n;
  for (int sweep = 0; sweep < 100 && off_norm() > stop; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (std::fabs(apq) <= 1e-300) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) > a(j, j); });

  EigResult r;
  r.eigenvalues.resize(n);
  r.eigenvectors = Mat(n, n);
  for (int k = 0; k < n; ++k) {
    r.eigenvalues[k] = a(order[k], order[k]);
    for (int i = 0; i < n; ++i) r.eigenvectors(i, k) = v(i, order[k]);
  }
  return r;
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  if (h <= 0) throw DomainError("fd_gradient: h must be positive");
  Vec g(x.size());
  Vec xp = x;
  for (size_t i = 0; i < x.size(); ++i) {
    double xi = x[i];
    xp[i] = xi + h;
    double fp = f(xp);
    xp[i] = xi - h;
    double fm = f(xp);
    xp[i] = xi;
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw EvalError("fd_gradient: function returned non-finite value");
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  if (h <= 0) throw DomainError("fd_hessian: h must be positive");
  const int n = static_cast<int>(x.size());
  Mat hess(n, n);
  Vec xp = x;
  double f0 = f(x);
  for (int i = 0; i < n; ++i) {
    xp[i] = x[i] + h;
    double fpp = f(xp);
    xp[i] = x[i] - h;
    double fmm = f(xp);
    xp[i] = x[i];
    hess(i, i) = (fpp - 2.0 * f0 + fmm) / (h * h);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      xp[i] = x[i] + h;
      xp[j] = x[j] + h;
      double fa = f(xp);
      xp[j] = x[j] - h;
      double fb = f(xp);
      xp[i] = x[i] - h;
      double fd = f(xp);
      xp[j] = x[j] + h;
      double fc = f(xp);
      xp[i] = x[i];
      xp[j] = x[j];
      double v = (fa - fb - fc + fd) / (4.0 * h * h);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& field, const Vec& x, double h) {
  if (h <= 0) throw DomainError("fd_jacobian: h must be positive");
  const int n = static_cast<int>(x.size());
  Vec xp = x;
  Mat jac(n, n);
  for (int j = 0; j < n; ++j) {
    xp[j] = x[j] + h;
    Vec fp = field(xp);
    xp[j] = x[j] - h;
    Vec fm = field(xp);
    xp[j] = x[j];
    if (static_cast<int>(fp.size()) != n) throw ShapeError("fd_jacobian: field dimension mismatch");
    for (int i = 0; i < n; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * h);
  }
  return jac;
}

std::uint64_t double_factorial(long long m) {
  if (m % 2 == 0) throw DomainError("double_factorial: even argument");
  if (m < -1) throw DomainError("double_factorial: argument below -1");
  std::uint64_t r = 1;
  for (long long k = m; k >= 1; k -= 2) r *= static_cast<std::uint64_t>(k);
  return r;
}

}  // namespace edm
