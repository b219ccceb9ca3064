#include "walkgen/spline.hpp"

#include <stdexcept>

#include "walkgen/tridiag.hpp"

namespace walkgen {

CubicSpline::CubicSpline(const Eigen::VectorXd& t, const Eigen::VectorXd& y) : t_(t), y_(y) {
  const Eigen::Index n = t.size();
  if (n < 2 || y.size() != n) {
    throw std::invalid_argument("CubicSpline: need at least 2 knots with matching values");
  }
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (!(t[i + 1] > t[i])) {
      throw std::invalid_argument("CubicSpline: knot times must be strictly increasing");
    }
  }

  // Solve for second derivatives with clamped ends (s'(t0) = s'(tn) = 0).
  Eigen::VectorXd lower = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd upper = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

  const double h0 = t[1] - t[0];
  diag[0] = 2.0 * h0;
  upper[0] = h0;
  rhs[0] = 6.0 * ((y[1] - y[0]) / h0 - 0.0);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double hm = t[i] - t[i - 1];
    const double hp = t[i + 1] - t[i];
    lower[i] = hm;
    diag[i] = 2.0 * (hm + hp);
    upper[i] = hp;
    rhs[i] = 6.0 * ((y[i + 1] - y[i]) / hp - (y[i] - y[i - 1]) / hm);
  }
  const double hn = t[n - 1] - t[n - 2];
  lower[n - 1] = hn;
  diag[n - 1] = 2.0 * hn;
  rhs[n - 1] = 6.0 * (0.0 - (y[n - 1] - y[n - 2]) / hn);

  m_ = solve_tridiagonal(lower, diag, upper, rhs);
}

Eigen::Index CubicSpline::segment_index(double t) const {
  const Eigen::Index n = t_.size();
  if (t <= t_[0]) return 0;
  if (t >= t_[n - 1]) return n - 2;
  // binary search for the segment containing t
  Eigen::Index lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    if (t_[mid] <= t) lo = mid; else hi = mid;
  }
  return lo;
}

double CubicSpline::eval(double t) const {
  const Eigen::Index i = segment_index(t);
  const double h = t_[i + 1] - t_[i];
  const double a = (t_[i + 1] - t) / h;
  const double b = (t - t_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::eval_derivative(double t) const {
  const Eigen::Index i = segment_index(t);
  const double h = t_[i + 1] - t_[i];
  const double a = (t_[i + 1] - t) / h;
  const double b = (t - t_[i]) / h;
  return (y_[i + 1] - y_[i]) / h +
         ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) * h / 6.0;
}

}  // namespace walkgen
