#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "walkgen/spline.hpp"

namespace walkgen {

constexpr double kGravity = 9.81;
constexpr double kFootLength = 0.2;
constexpr double kFootWidth = 0.1;
constexpr double kZmpMargin = 0.005;

enum class GaitType { level, slope_up, slope_down, stairs_up };

std::string to_string(GaitType type);
GaitType gait_type_from_string(const std::string& s);

struct GaitParameters {
  double ts = 0.01;          // s
  double z_c = 0.53;         // m
  double z_c_offset = 0.0;   // m
  int n_strides = 1;
  double T_stride = 4.0;     // s
  double T_switch = 1.0;     // s
  double step_width = 0.15;  // m
  double step_length = 0.1;  // m
  double theta = 0.0;        // deg, slope inclination
  double stair_length = 0.21;  // m
  double stair_height = 0.0;   // m
  bool right_step_first = false;
  GaitType type = GaitType::level;
  double step_height = 0.02;  // m, swing clearance

  void validate() const;  // throws on invariant violation

  double swing_time() const { return (T_stride - T_switch) / 2.0; }
  double total_time() const { return n_strides * T_stride; }
};

// Parameter file: one `name = value` per line, unknown keys rejected.
GaitParameters load_parameters(const std::string& path);
void save_parameters(const GaitParameters& params, const std::string& path);

enum class Side { left, right };
inline Side other_side(Side s) { return s == Side::left ? Side::right : Side::left; }

struct Foothold {
  Side side;
  Eigen::Vector3d position;  // m, sole center
  double pitch = 0.0;        // rad
  double touchdown_time = 0.0;
  double liftoff_time = 0.0;  // total_time when the hold persists to the end
};

enum class SupportPhase { double_support, single_left, single_right };

struct SupportInterval {
  double t0, t1;  // [t0, t1)
  SupportPhase phase;
};

struct FootstepPlan {
  std::vector<Foothold> footholds;  // placement order; the first two are the initial stance
  std::vector<SupportInterval> support_timeline;
  double total_time = 0.0;
};

struct FootPoseSample {
  Eigen::Vector3d position;
  double pitch = 0.0;
};

struct ReferenceTrajectories {
  Eigen::VectorXd times;
  Eigen::MatrixX2d zmp_d;
  Eigen::MatrixX3d com_d;
  std::vector<FootPoseSample> left_foot;
  std::vector<FootPoseSample> right_foot;
  double ts = 0.0;
};

struct ComHeightProfile {
  Eigen::VectorXd z;
  Eigen::VectorXd z_ddot;
  CubicSpline spline;
};

FootstepPlan generate_footsteps(const GaitParameters& params);

Eigen::MatrixX2d generate_zmp_reference(const FootstepPlan& plan, const GaitParameters& params);

ComHeightProfile generate_com_height(const GaitParameters& params, const FootstepPlan& plan);

// Tridiagonal system of the discretized ZMP equation. a is the sub-diagonal
// (a[0] unused as such; merged into diag[0]), c the super-diagonal.
struct ZmpSystem {
  Eigen::VectorXd lower, diag, upper;
};
ZmpSystem assemble_zmp_system(const Eigen::VectorXd& z, const Eigen::VectorXd& z_ddot, double g,
                              double ts);

Eigen::MatrixX2d solve_com_xy(const Eigen::MatrixX2d& zmp_d, const Eigen::VectorXd& z,
                              const Eigen::VectorXd& z_ddot, double g, double ts);

// Pose of one foot at time t (pure; drivers below map it over a grid).
FootPoseSample foot_pose_at(const FootstepPlan& plan, const GaitParameters& params, Side side,
                            double t);

struct FootTrajectories {
  std::vector<FootPoseSample> left;
  std::vector<FootPoseSample> right;
};
FootTrajectories generate_foot_trajectories(const FootstepPlan& plan, const GaitParameters& params,
                                            const Eigen::VectorXd& times, bool parallel = true);

ReferenceTrajectories generate_references(const GaitParameters& params);

// Uniform time grid 0..total with N = round(total/ts)+1 samples.
Eigen::VectorXd sample_times(double total_time, double ts);

// Footholds whose support covers time t (swing foot excluded during its swing).
std::vector<const Foothold*> active_footholds(const FootstepPlan& plan, double t);

// Signed distance of point p to the boundary of the convex hull of the active
// sole rectangles (positive inside). Rectangles are ground projections,
// pitch-foreshortened along x.
double support_polygon_margin(const FootstepPlan& plan, double t, const Eigen::Vector2d& p,
                              double foot_length = kFootLength, double foot_width = kFootWidth);

}  // namespace walkgen
