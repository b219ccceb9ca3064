#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "walkgen/pattern_gen.hpp"
#include "walkgen/robot_model.hpp"

namespace walkgen {

enum class TaskMode { position_only, orientation_only, full };

struct TaskTarget {
  std::string frame;  // frame name, or kCom for the whole-body CoM
  std::optional<Eigen::Vector3d> desired_position;
  std::optional<Eigen::Matrix3d> desired_orientation;
  TaskMode mode = TaskMode::full;

  static constexpr const char* kCom = "COM";
  bool is_com() const { return frame == kCom; }

  static TaskTarget position(std::string frame, const Eigen::Vector3d& p) {
    return {std::move(frame), p, std::nullopt, TaskMode::position_only};
  }
  static TaskTarget orientation(std::string frame, const Eigen::Matrix3d& r) {
    return {std::move(frame), std::nullopt, r, TaskMode::orientation_only};
  }
  static TaskTarget full_pose(std::string frame, const Eigen::Vector3d& p,
                              const Eigen::Matrix3d& r) {
    return {std::move(frame), p, r, TaskMode::full};
  }
  static TaskTarget com(const Eigen::Vector3d& p) {
    return {kCom, p, std::nullopt, TaskMode::position_only};
  }
};

struct SolverOptions {
  int max_iterations = 200;
  double residual_tolerance = 1e-8;  // on ||e||^2
  double step_tolerance = 1e-10;     // on ||dq||_inf
  double initial_damping = 1e-6;
  double damping_up = 10.0;
  double damping_down = 10.0;
  double damping_overflow = 1e12;

  void validate() const;
};

struct IkResult {
  Eigen::VectorXd q;
  double residual_norm = 0.0;  // ||e||
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> active_bounds;
  bool clamped_on_entry = false;
};

// Optional re-rooting: the named frame is pinned at the given world pose and
// residuals/Jacobians of all other tasks are expressed in that anchored world.
struct Anchor {
  std::string frame;
  FramePose world_pose;
};

// Rotation-vector orientation error, mapped into the current frame.
Eigen::Vector3d rotation_error(const Eigen::Matrix3d& current, const Eigen::Matrix3d& desired);

Eigen::VectorXd residuals(const RobotModel& model, const Eigen::VectorXd& q,
                          const std::vector<TaskTarget>& targets, const Anchor* anchor = nullptr);

// d(residuals)/dq; exact, suitable for gradient checks against ||e||^2/2.
Eigen::MatrixXd residual_jacobian(const RobotModel& model, const Eigen::VectorXd& q,
                                  const std::vector<TaskTarget>& targets,
                                  const Anchor* anchor = nullptr);

IkResult solve_frame(const RobotModel& model, const std::vector<TaskTarget>& targets,
                     const Eigen::VectorXd& q_init, const SolverOptions& options = {},
                     const Anchor* anchor = nullptr);

struct TrajectoryResult {
  Eigen::MatrixXd q;  // N x n, rad
  std::vector<IkResult> diagnostics;
  bool feasible = true;
  Eigen::Index first_failed_sample = -1;
};

// Per sample: stance sole anchored at its reference pose, the other sole a
// full-pose target and the whole-body CoM a position target; warm started
// from the previous sample. Inherently sequential.
TrajectoryResult solve_trajectory(const RobotModel& model, const ReferenceTrajectories& refs,
                                  const FootstepPlan& plan, const Eigen::VectorXd& q0,
                                  const SolverOptions& options = {},
                                  double task_error_tolerance = 1e-4);

Eigen::Matrix3d pitch_rotation(double pitch);

}  // namespace walkgen
