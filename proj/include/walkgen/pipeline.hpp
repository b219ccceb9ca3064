#pragma once

#include <optional>
#include <string>

#include "walkgen/ik_solver.hpp"
#include "walkgen/kpi.hpp"
#include "walkgen/pattern_gen.hpp"
#include "walkgen/robot_model.hpp"

namespace walkgen {

struct PipelineConfig {
  std::string params_path;
  std::string model_path;
  std::string output_directory = ".";
  std::string scenario;  // label; defaults to the params `type`
  bool emit_svg = false;
  SolverOptions solver_options;
  double task_error_tolerance = 1e-4;
  std::string log_path;   // analyze/check input
  std::string meta_path;  // analyze metadata sidecar
};

// Reference trajectory CSV, header:
//   t, zmp_x, zmp_y, com_x, com_y, com_z, lf_x, lf_y, lf_z, lf_pitch, rf_x, rf_y, rf_z, rf_pitch
void write_reference_csv(const std::string& path, const ReferenceTrajectories& refs);
ReferenceTrajectories read_reference_csv(const std::string& path);

void write_footstep_listing(const std::string& path, const FootstepPlan& plan);

// Joint trajectory CSV, header `t, <joint_1>, ...`; one file in degrees
// (robot-facing convention) and one exact variant in radians.
void write_joint_csv(const std::string& path, const ReferenceTrajectories& refs,
                     const RobotModel& model, const Eigen::MatrixXd& q, bool degrees);

// A bent-knee starting configuration consistent with the first reference
// sample, solved from a crouch guess.
Eigen::VectorXd initial_configuration(const RobotModel& model, const ReferenceTrajectories& refs,
                                      const FootstepPlan& plan);

int cmd_gen(const PipelineConfig& config);
int cmd_ik(const PipelineConfig& config);
int cmd_check(const PipelineConfig& config);
int cmd_analyze(const PipelineConfig& config);

}  // namespace walkgen
