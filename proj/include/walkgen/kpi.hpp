#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "walkgen/pattern_gen.hpp"

namespace walkgen {

struct ExecutionLog {
  Eigen::VectorXd times;       // s, uniform
  Eigen::MatrixXd current;     // A, N x M
  Eigen::MatrixXd voltage;     // V, N x M
  Eigen::MatrixXd q_meas;      // rad, N x n
  Eigen::MatrixXd q_des;       // rad, N x n
  Eigen::MatrixX3d com_meas;   // m
  Eigen::MatrixX3d com_des;    // m
  Eigen::MatrixX2d zmp_meas;   // m
  Eigen::MatrixX2d zmp_des;    // m
  double robot_mass = 0.0;     // kg
  double leg_length = 0.0;     // m
  double foot_length = kFootLength;
  double foot_width = kFootWidth;
  std::vector<std::string> joint_names;

  void validate() const;
  double ts() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

struct TrackingRmse {
  double com_rmse = 0.0;    // m
  double zmp_rmse = 0.0;    // m
  double joint_rmse = 0.0;  // deg
};

struct KpiReport {
  double cost_of_transport = 0.0;  // J/(kg*m)
  double v_max = 0.0;              // m/s
  std::optional<double> froude;    // level ground only
  double com_rmse = 0.0;           // m
  double zmp_rmse = 0.0;           // m
  double joint_rmse = 0.0;         // deg
  double travelled_distance = 0.0; // m
};

double cost_of_transport(const ExecutionLog& log);
double froude(double v_max, double leg_length, double g = kGravity);
double max_velocity(const ExecutionLog& log, double window);
TrackingRmse tracking_rmse(const ExecutionLog& log);

// Horizontal displacement of the measured CoM between the first and last
// sample (the mid-feet point is not logged, so the CoM fallback applies).
double travelled_distance(const ExecutionLog& log);

// p = x - z*x_ddot/(z_ddot + g) with central differences; endpoints copy
// neighbors. Samples with z_ddot + g <= 0 are flagged, not fatal.
Eigen::MatrixX2d reconstruct_zmp(const Eigen::MatrixX3d& com, double g, double ts,
                                 std::vector<Eigen::Index>* flagged = nullptr);

struct StabilityReport {
  std::vector<double> margins;  // signed, per sample (positive inside)
  double violation_fraction = 0.0;
  double worst_margin = 0.0;
  Eigen::Index worst_sample = -1;
};

StabilityReport stability_check(const Eigen::MatrixX2d& zmp, const Eigen::VectorXd& times,
                                const FootstepPlan& plan, double foot_length = kFootLength,
                                double foot_width = kFootWidth, double required_margin = 0.0,
                                bool parallel = true);

KpiReport analyze(const ExecutionLog& log, double velocity_window, bool level_ground);

// CSV log + `name = value` metadata sidecar.
ExecutionLog load_execution_log(const std::string& csv_path, const std::string& meta_path);
void save_execution_log(const ExecutionLog& log, const std::string& csv_path,
                        const std::string& meta_path);
std::string format_report(const KpiReport& report);

}  // namespace walkgen
