#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace manifolds {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so per-trial streams produce the same values
// whether trials run serially or are partitioned across threads.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ 0x9e3779b97f4a7c15ull, mix(stream, 0x2545f4914f6cdd1dull))) {}

  std::uint64_t next_u64() { return mix(key_, counter_++); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive bounds.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 == 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  Eigen::VectorXd gaussian_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Eigen::MatrixXd gaussian(int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
  }

  Eigen::MatrixXcd gaussian_complex(int rows, int cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = std::complex<double>(normal(), normal());
    return m;
  }

 private:
  static std::uint64_t mix(std::uint64_t key, std::uint64_t ctr) {
    std::uint64_t z = key + 0x9e3779b97f4a7c15ull * (ctr + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

// Haar-ish orthogonal sample: QR of a Gaussian matrix with the sign of the
// R diagonal absorbed, so the distribution does not depend on the QR pivoting.
inline Eigen::MatrixXd random_orthogonal(CounterRng& rng, int n) {
  const Eigen::MatrixXd g = rng.gaussian(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

inline Eigen::MatrixXcd random_unitary(CounterRng& rng, int n) {
  const Eigen::MatrixXcd g = rng.gaussian_complex(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const std::complex<double> d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

inline Eigen::VectorXd random_unit_vector(CounterRng& rng, int n) {
  Eigen::VectorXd v = rng.gaussian_vector(n);
  while (v.norm() < 1e-8) v = rng.gaussian_vector(n);
  return v / v.norm();
}

}  // namespace manifolds
