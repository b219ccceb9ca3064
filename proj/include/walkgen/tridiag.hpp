#pragma once

#include <Eigen/Core>
#include <stdexcept>

namespace walkgen {

// Thomas algorithm for a tridiagonal system.
//   lower: sub-diagonal, entries 1..n-1 (lower[0] is ignored)
//   diag:  main diagonal, entries 0..n-1
//   upper: super-diagonal, entries 0..n-2 (upper[n-1] is ignored)
// Stable for diagonally dominant systems; callers assert dominance where
// the model guarantees it.
inline Eigen::VectorXd solve_tridiagonal(const Eigen::VectorXd& lower,
                                         const Eigen::VectorXd& diag,
                                         const Eigen::VectorXd& upper,
                                         const Eigen::VectorXd& rhs) {
  const Eigen::Index n = diag.size();
  if (n < 1 || lower.size() != n || upper.size() != n || rhs.size() != n) {
    throw std::invalid_argument("solve_tridiagonal: inconsistent sizes");
  }
  Eigen::VectorXd c_prime(n), d_prime(n);
  double denom = diag[0];
  if (denom == 0.0) throw std::runtime_error("solve_tridiagonal: zero pivot at row 0");
  c_prime[0] = (n > 1) ? upper[0] / denom : 0.0;
  d_prime[0] = rhs[0] / denom;
  for (Eigen::Index i = 1; i < n; ++i) {
    denom = diag[i] - lower[i] * c_prime[i - 1];
    if (denom == 0.0) {
      throw std::runtime_error("solve_tridiagonal: zero pivot at row " + std::to_string(i));
    }
    c_prime[i] = (i < n - 1) ? upper[i] / denom : 0.0;
    d_prime[i] = (rhs[i] - lower[i] * d_prime[i - 1]) / denom;
  }
  Eigen::VectorXd x(n);
  x[n - 1] = d_prime[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    x[i] = d_prime[i] - c_prime[i] * x[i + 1];
  }
  return x;
}

}  // namespace walkgen
