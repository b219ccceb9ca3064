#pragma once

#include <Eigen/Core>
#include <vector>

namespace walkgen {

// Cubic interpolating spline with clamped (zero-velocity) endpoints.
class CubicSpline {
 public:
  CubicSpline() = default;
  // Knot times must be strictly increasing; at least 2 knots.
  CubicSpline(const Eigen::VectorXd& t, const Eigen::VectorXd& y);

  double eval(double t) const;
  double eval_derivative(double t) const;

  const Eigen::VectorXd& knot_times() const { return t_; }
  const Eigen::VectorXd& knot_values() const { return y_; }

 private:
  Eigen::Index segment_index(double t) const;

  Eigen::VectorXd t_;
  Eigen::VectorXd y_;
  Eigen::VectorXd m_;  // second derivatives at knots
};

// Cubic easing from 0 to 1 with zero slope at both ends.
inline double smoothstep_cubic(double s) { return s * s * (3.0 - 2.0 * s); }

}  // namespace walkgen
