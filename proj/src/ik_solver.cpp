#include "walkgen/ik_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace walkgen {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

Eigen::Vector3d vex(const Eigen::Matrix3d& m) {
  return {m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)};
}

void check_orthonormal(const Eigen::Matrix3d& r, const char* what) {
  const Eigen::Matrix3d err = r.transpose() * r - Eigen::Matrix3d::Identity();
  if (err.cwiseAbs().maxCoeff() > 1e-6) {
    throw std::invalid_argument(std::string("rotation_error: ") + what + " is not orthonormal");
  }
}

// Rotation vector of an orthonormal matrix.
Eigen::Vector3d log_rotation(const Eigen::Matrix3d& e) {
  const double cos_theta = std::clamp((e.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double theta = std::acos(cos_theta);
  if (theta < 1e-7) {
    return 0.5 * vex(e);  // first-order skew extraction
  }
  if (std::abs(theta - std::numbers::pi) < 1e-5) {
    // near-antipodal: axis from the diagonal of (E + I)/2 ~ a a^T
    const Eigen::Matrix3d b = 0.5 * (e + Eigen::Matrix3d::Identity());
    int k = 0;
    b.diagonal().maxCoeff(&k);
    Eigen::Vector3d axis = b.col(k) / std::sqrt(b(k, k));
    axis.normalize();
    return theta * axis;
  }
  return theta / (2.0 * std::sin(theta)) * vex(e);
}

// Inverse left Jacobian of SO(3) at rotation vector phi.
Eigen::Matrix3d inverse_left_jacobian(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  const Eigen::Matrix3d s = skew(phi);
  double c;
  if (theta < 1e-4) {
    c = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    c = 1.0 / (theta * theta) - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  }
  return Eigen::Matrix3d::Identity() - 0.5 * s + c * s * s;
}

// Task kinematics for one target in the (possibly anchored) world frame.
struct TaskKinematics {
  Eigen::Vector3d position;
  Eigen::Matrix3d orientation;  // meaningless for CoM tasks
  Eigen::MatrixXd linear;       // 3 x n
  Eigen::MatrixXd angular;      // 3 x n
};

struct AnchorContext {
  bool active = false;
  FramePose world_pose;        // desired world pose of the anchor frame
  FramePose pose_in_root;      // FK of the anchor at the current q
  Eigen::MatrixXd jac_in_root; // 6 x n
};

AnchorContext make_anchor_context(const RobotModel& model, const Eigen::VectorXd& q,
                                  const Anchor* anchor, bool need_jacobian) {
  AnchorContext ctx;
  if (!anchor) return ctx;
  ctx.active = true;
  ctx.world_pose = anchor->world_pose;
  ctx.pose_in_root = model.forward_kinematics(q, anchor->frame);
  if (need_jacobian) ctx.jac_in_root = model.frame_jacobian(q, anchor->frame);
  return ctx;
}

TaskKinematics task_kinematics(const RobotModel& model, const Eigen::VectorXd& q,
                               const TaskTarget& target, const AnchorContext& anchor,
                               bool need_jacobian) {
  TaskKinematics out;
  Eigen::Vector3d p_root;
  Eigen::Matrix3d r_root = Eigen::Matrix3d::Identity();
  Eigen::MatrixXd lin_root, ang_root;
  if (target.is_com()) {
    p_root = model.whole_body_com(q);
    if (need_jacobian) {
      lin_root = model.com_jacobian(q);
      ang_root = Eigen::MatrixXd::Zero(3, model.joint_count());
    }
  } else {
    const FramePose pose = model.forward_kinematics(q, target.frame);
    p_root = pose.position;
    r_root = pose.orientation;
    if (need_jacobian) {
      const Eigen::MatrixXd jac = model.frame_jacobian(q, target.frame);
      lin_root = jac.topRows<3>();
      ang_root = jac.bottomRows<3>();
    }
  }

  if (!anchor.active) {
    out.position = p_root;
    out.orientation = r_root;
    out.linear = std::move(lin_root);
    out.angular = std::move(ang_root);
    return out;
  }

  const Eigen::Matrix3d& r_a = anchor.pose_in_root.orientation;
  const Eigen::Vector3d& p_a = anchor.pose_in_root.position;
  const Eigen::Matrix3d& r_wa = anchor.world_pose.orientation;
  const Eigen::Vector3d d = p_root - p_a;

  out.position = anchor.world_pose.position + r_wa * (r_a.transpose() * d);
  out.orientation = r_wa * (r_a.transpose() * r_root);
  if (need_jacobian) {
    const auto lin_a = anchor.jac_in_root.topRows<3>();
    const auto ang_a = anchor.jac_in_root.bottomRows<3>();
    out.linear = r_wa * r_a.transpose() * (lin_root - lin_a + skew(d) * ang_a);
    out.angular = r_wa * r_a.transpose() * (ang_root - ang_a);
  }
  return out;
}

int residual_rows(const std::vector<TaskTarget>& targets) {
  int rows = 0;
  for (const auto& t : targets) {
    if (t.mode == TaskMode::full) rows += 6;
    else rows += 3;
  }
  return rows;
}

void validate_target(const TaskTarget& t) {
  const bool want_pos = t.mode != TaskMode::orientation_only;
  const bool want_ori = t.mode != TaskMode::position_only;
  if (want_pos && !t.desired_position) {
    throw std::invalid_argument("target '" + t.frame + "': desired_position missing");
  }
  if (want_ori && !t.desired_orientation) {
    throw std::invalid_argument("target '" + t.frame + "': desired_orientation missing");
  }
  if (t.is_com() && t.mode != TaskMode::position_only) {
    throw std::invalid_argument("CoM target admits position_only mode");
  }
}

}  // namespace

void SolverOptions::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("options: max_iterations must be >= 1");
  if (!(residual_tolerance > 0) || !(step_tolerance > 0) || !(initial_damping > 0) ||
      !(damping_up > 1) || !(damping_down > 1)) {
    throw std::invalid_argument("options: tolerances and damping factors must be positive");
  }
}

Eigen::Matrix3d pitch_rotation(double pitch) {
  return Eigen::AngleAxisd(pitch, Eigen::Vector3d(0.0, -1.0, 0.0)).toRotationMatrix();
}

Eigen::Vector3d rotation_error(const Eigen::Matrix3d& current, const Eigen::Matrix3d& desired) {
  check_orthonormal(current, "current");
  check_orthonormal(desired, "desired");
  const Eigen::Matrix3d e = desired * current.transpose();
  return current.transpose() * log_rotation(e);
}

Eigen::VectorXd residuals(const RobotModel& model, const Eigen::VectorXd& q,
                          const std::vector<TaskTarget>& targets, const Anchor* anchor) {
  const AnchorContext ctx = make_anchor_context(model, q, anchor, false);
  Eigen::VectorXd e(residual_rows(targets));
  int row = 0;
  for (const auto& t : targets) {
    validate_target(t);
    const TaskKinematics kin = task_kinematics(model, q, t, ctx, false);
    if (t.mode != TaskMode::orientation_only) {
      e.segment<3>(row) = *t.desired_position - kin.position;
      row += 3;
    }
    if (t.mode != TaskMode::position_only) {
      e.segment<3>(row) = rotation_error(kin.orientation, *t.desired_orientation);
      row += 3;
    }
  }
  return e;
}

Eigen::MatrixXd residual_jacobian(const RobotModel& model, const Eigen::VectorXd& q,
                                  const std::vector<TaskTarget>& targets, const Anchor* anchor) {
  const AnchorContext ctx = make_anchor_context(model, q, anchor, true);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(residual_rows(targets), model.joint_count());
  int row = 0;
  for (const auto& t : targets) {
    validate_target(t);
    const TaskKinematics kin = task_kinematics(model, q, t, ctx, true);
    if (t.mode != TaskMode::orientation_only) {
      jac.middleRows<3>(row) = -kin.linear;
      row += 3;
    }
    if (t.mode != TaskMode::position_only) {
      // e = R^T a(dR R^T); exact rate uses the inverse left Jacobian of the
      // error rotation
      const Eigen::Matrix3d e_rot = *t.desired_orientation * kin.orientation.transpose();
      const Eigen::Vector3d phi = log_rotation(e_rot);
      jac.middleRows<3>(row) = kin.orientation.transpose() *
                               (skew(phi) - inverse_left_jacobian(phi) * e_rot) * kin.angular;
      row += 3;
    }
  }
  return jac;
}

IkResult solve_frame(const RobotModel& model, const std::vector<TaskTarget>& targets,
                     const Eigen::VectorXd& q_init, const SolverOptions& options,
                     const Anchor* anchor) {
  options.validate();
  const int n = model.joint_count();
  if (q_init.size() != n) throw std::invalid_argument("solve_frame: q_init length mismatch");

  IkResult result;
  Eigen::VectorXd q = q_init.cwiseMax(model.q_min()).cwiseMin(model.q_max());
  result.clamped_on_entry = (q - q_init).cwiseAbs().maxCoeff() > 0.0;

  Eigen::VectorXd e = residuals(model, q, targets, anchor);
  double f = e.squaredNorm();
  double lambda = options.initial_damping;
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);

  result.converged = f <= options.residual_tolerance;
  while (!result.converged && result.iterations < options.max_iterations) {
    Eigen::MatrixXd jac = residual_jacobian(model, q, targets, anchor);
    // active-set reduction: a coordinate pinned at a limit with the gradient
    // pushing outward is frozen for this iteration, otherwise the clamped
    // step degenerates and the solver crawls along the bound
    {
      const Eigen::VectorXd g_full = jac.transpose() * e;
      for (int i = 0; i < n; ++i) {
        const bool at_lower = q[i] <= model.q_min()[i] && g_full[i] > 0.0;
        const bool at_upper = q[i] >= model.q_max()[i] && g_full[i] < 0.0;
        if (at_lower || at_upper) jac.col(i).setZero();
      }
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * e;

    bool accepted = false;
    while (!accepted) {
      const Eigen::VectorXd dq = (jtj + lambda * identity).ldlt().solve(-g);
      if (!dq.allFinite()) {
        lambda *= options.damping_up;
        if (lambda > options.damping_overflow) break;
        continue;
      }
      const Eigen::VectorXd q_cand =
          (q + dq).cwiseMax(model.q_min()).cwiseMin(model.q_max());
      const Eigen::VectorXd e_cand = residuals(model, q_cand, targets, anchor);
      const double f_cand = e_cand.squaredNorm();
      if (f_cand < f) {
        const double step = (q_cand - q).cwiseAbs().maxCoeff();
        q = q_cand;
        e = e_cand;
        f = f_cand;
        lambda = std::max(lambda / options.damping_down, 1e-12);
        accepted = true;
        if (f <= options.residual_tolerance) result.converged = true;
        if (step <= options.step_tolerance) {
          result.converged = result.converged || f <= options.residual_tolerance;
          ++result.iterations;
          goto done;
        }
      } else {
        lambda *= options.damping_up;
        if (lambda > options.damping_overflow) break;
      }
    }
    ++result.iterations;
    if (!accepted) break;  // damping overflow without an acceptable step
  }
done:
  result.q = q;
  result.residual_norm = std::sqrt(f);
  for (int i = 0; i < n; ++i) {
    if (q[i] == model.q_min()[i] || q[i] == model.q_max()[i]) {
      result.active_bounds.push_back(model.joints()[i].name);
    }
  }
  return result;
}

TrajectoryResult solve_trajectory(const RobotModel& model, const ReferenceTrajectories& refs,
                                  const FootstepPlan& plan, const Eigen::VectorXd& q0,
                                  const SolverOptions& options, double task_error_tolerance) {
  const Eigen::Index n_samples = refs.times.size();
  const int n = model.joint_count();
  TrajectoryResult out;
  out.q = Eigen::MatrixXd::Zero(n_samples, n);
  out.diagnostics.reserve(n_samples);

  // Anchor the support sole; during double support keep the previous anchor.
  Side anchor_side = Side::left;
  for (const auto& iv : plan.support_timeline) {
    if (iv.phase == SupportPhase::single_left) { anchor_side = Side::left; break; }
    if (iv.phase == SupportPhase::single_right) { anchor_side = Side::right; break; }
  }

  Eigen::VectorXd q_prev = q0.cwiseMax(model.q_min()).cwiseMin(model.q_max());
  for (Eigen::Index k = 0; k < n_samples; ++k) {
    const double t = std::min(refs.times[k], plan.total_time);
    for (const auto& iv : plan.support_timeline) {
      if (t >= iv.t0 && t < iv.t1) {
        if (iv.phase == SupportPhase::single_left) anchor_side = Side::left;
        if (iv.phase == SupportPhase::single_right) anchor_side = Side::right;
        break;
      }
    }
    const FootPoseSample& left = refs.left_foot[k];
    const FootPoseSample& right = refs.right_foot[k];
    const FootPoseSample& anchor_pose = anchor_side == Side::left ? left : right;
    const FootPoseSample& other_pose = anchor_side == Side::left ? right : left;
    const std::string anchor_frame = anchor_side == Side::left ? "l_sole" : "r_sole";
    const std::string other_frame = anchor_side == Side::left ? "r_sole" : "l_sole";

    Anchor anchor{anchor_frame, {anchor_pose.position, pitch_rotation(anchor_pose.pitch)}};
    std::vector<TaskTarget> targets = {
        TaskTarget::full_pose(other_frame, other_pose.position, pitch_rotation(other_pose.pitch)),
        TaskTarget::com(refs.com_d.row(k).transpose()),
    };

    IkResult res = solve_frame(model, targets, q_prev, options, &anchor);
    const Eigen::VectorXd e = residuals(model, res.q, targets, &anchor);
    const double task_error = e.cwiseAbs().maxCoeff();
    out.q.row(k) = res.q.transpose();
    q_prev = res.q;
    out.diagnostics.push_back(std::move(res));
    if (task_error > task_error_tolerance) {
      out.feasible = false;
      out.first_failed_sample = k;
      out.q.conservativeResize(k + 1, n);
      break;
    }
  }
  return out;
}

}  // namespace walkgen
