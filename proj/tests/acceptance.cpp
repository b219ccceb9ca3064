// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "walkgen/ik_solver.hpp"
#include "walkgen/kpi.hpp"
#include "walkgen/pattern_gen.hpp"
#include "walkgen/pipeline.hpp"
#include "walkgen/robot_model.hpp"
#include "walkgen/tridiag.hpp"

using namespace walkgen;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

void report(int criterion, const char* title, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, title,
              detail.c_str());
  if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

GaitParameters random_params(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GaitParameters p;
  p.ts = 0.01;
  p.z_c = 0.45 + 0.15 * u(rng);
  p.z_c_offset = 0.03 * u(rng);
  p.n_strides = 1 + static_cast<int>(rng() % 3);
  p.T_switch = 0.6 + 0.8 * u(rng);
  p.T_stride = p.T_switch + 2.0 + 4.0 * u(rng);
  p.step_width = 0.12 + 0.08 * u(rng);
  p.step_length = 0.12 * u(rng);
  const int kind = static_cast<int>(rng() % 4);
  if (kind == 1) {
    p.type = GaitType::slope_up;
    p.theta = 1.0 + 6.0 * u(rng);
  } else if (kind == 2) {
    p.type = GaitType::slope_down;
    p.theta = 1.0 + 6.0 * u(rng);
  } else if (kind == 3) {
    p.type = GaitType::stairs_up;
    p.stair_height = 0.005 + 0.02 * u(rng);
    p.stair_length = 0.18 + 0.06 * u(rng);
    p.T_stride = std::max(p.T_stride, p.T_switch + 5.0);
  }
  return p;
}

Eigen::VectorXd random_q(const RobotModel& model, std::mt19937& rng, double span) {
  std::uniform_real_distribution<double> dist(-span, span);
  Eigen::VectorXd q(model.joint_count());
  for (int i = 0; i < q.size(); ++i) {
    q[i] = std::clamp(dist(rng), model.q_min()[i], model.q_max()[i]);
  }
  return q;
}

// forward-model check: apply the discrete ZMP equation to the solved CoM and
// compare against the reference ZMP on the interior samples
double zmp_roundtrip_error(const ReferenceTrajectories& refs, double ts) {
  const Eigen::Index n = refs.times.size();
  const double ts2 = ts * ts;
  double worst = 0.0;
  for (Eigen::Index k = 1; k + 1 < n; ++k) {
    const double zdd = (refs.com_d(k - 1, 2) - 2 * refs.com_d(k, 2) + refs.com_d(k + 1, 2)) / ts2;
    for (int c = 0; c < 2; ++c) {
      const double xdd = (refs.com_d(k - 1, c) - 2 * refs.com_d(k, c) + refs.com_d(k + 1, c)) / ts2;
      const double p = refs.com_d(k, c) - refs.com_d(k, 2) * xdd / (zdd + kGravity);
      worst = std::max(worst, std::abs(p - refs.zmp_d(k, c)));
    }
  }
  return worst;
}

void criterion_1() {
  const auto t0 = Clock::now();
  std::mt19937 rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const GaitParameters p = random_params(rng);
    const ReferenceTrajectories refs = generate_references(p);
    worst = std::max(worst, zmp_roundtrip_error(refs, p.ts));
  }
  const double elapsed = seconds_since(t0);
  report(1, "zmp/com round trip over 50 random parameter sets", worst <= 1e-9 && elapsed <= 10.0,
         "worst error " + num(worst) + ", " + num(elapsed) + " s");
}

void criterion_2() {
  GaitParameters p;
  p.z_c_offset = 0.02;
  p.n_strides = 2;
  const FootstepPlan plan = generate_footsteps(p);
  const ComHeightProfile prof = generate_com_height(p, plan);
  const ZmpSystem sys = assemble_zmp_system(prof.z, prof.z_ddot, kGravity, p.ts);

  double worst_row = 0.0;
  const Eigen::Index n = sys.diag.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = sys.diag[i];
    if (i > 0) sum += sys.lower[i];
    if (i + 1 < n) sum += sys.upper[i];
    worst_row = std::max(worst_row, std::abs(sum - 1.0));
  }

  Eigen::MatrixX2d zmp(n, 2);
  zmp.col(0).setConstant(0.03);
  zmp.col(1).setConstant(-0.05);
  const Eigen::MatrixX2d com = solve_com_xy(zmp, prof.z, prof.z_ddot, kGravity, p.ts);
  double worst_const = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    worst_const = std::max({worst_const, std::abs(com(k, 0) - 0.03), std::abs(com(k, 1) + 0.05)});
  }

  report(2, "rows sum to one and a constant zmp maps to a constant com",
         worst_row <= 1e-12 && worst_const <= 1e-12,
         "row-sum error " + num(worst_row) + ", constant-com error " +
             num(worst_const));
}

void criterion_3() {
  std::mt19937 rng(1003);
  std::uniform_real_distribution<double> dz(0.4, 0.65);
  std::uniform_real_distribution<double> dacc(-3.0, 3.0);
  std::uniform_real_distribution<double> dp(-0.25, 0.25);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 20 + static_cast<int>(rng() % 181);  // <= 200
    Eigen::VectorXd z(n), zdd(n), rhs(n);
    for (int i = 0; i < n; ++i) {
      z[i] = dz(rng);
      zdd[i] = dacc(rng);
      rhs[i] = dp(rng);
    }
    const ZmpSystem sys = assemble_zmp_system(z, zdd, kGravity, 0.01);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      A(i, i) = sys.diag[i];
      if (i > 0) A(i, i - 1) = sys.lower[i];
      if (i + 1 < n) A(i, i + 1) = sys.upper[i];
    }
    const Eigen::VectorXd x = solve_tridiagonal(sys.lower, sys.diag, sys.upper, rhs);
    const Eigen::VectorXd x_dense = A.fullPivLu().solve(rhs);
    worst = std::max(worst, (x - x_dense).norm() / x_dense.norm());
  }
  report(3, "tridiagonal solve matches a dense factorization on 20 height profiles",
         worst <= 1e-10, "worst relative error " + num(worst));
}

void criterion_4() {
  const double z_c = 0.53;
  const double ts = 0.01;
  const int n = 150;
  const ZmpSystem sys = assemble_zmp_system(Eigen::VectorXd::Constant(n, z_c),
                                            Eigen::VectorXd::Zero(n), kGravity, ts);
  const double a = -z_c / (kGravity * ts * ts);
  double worst = 0.0;
  for (int i = 1; i + 1 < n; ++i) {
    worst = std::max({worst, std::abs(sys.lower[i] - a), std::abs(sys.diag[i] - (1.0 - 2.0 * a)),
                      std::abs(sys.upper[i] - a)});
  }
  report(4, "constant height reduces to the fixed-height zmp coefficients", worst <= 1e-12,
         "worst coefficient error " + num(worst));
}

void criterion_5(const RobotModel& model) {
  std::mt19937 rng(1005);
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd q = random_q(model, rng, 0.4);
    const Eigen::VectorXd q_goal = random_q(model, rng, 0.4);
    const FramePose sole = model.forward_kinematics(q_goal, "l_sole");
    const std::vector<TaskTarget> targets = {
        TaskTarget::full_pose("l_sole", sole.position, sole.orientation),
        TaskTarget::com(model.whole_body_com(q_goal))};

    const Eigen::MatrixXd J = residual_jacobian(model, q, targets);
    const Eigen::VectorXd e = residuals(model, q, targets);
    Eigen::MatrixXd J_fd(J.rows(), J.cols());
    Eigen::VectorXd g_fd(model.joint_count());
    for (int i = 0; i < model.joint_count(); ++i) {
      Eigen::VectorXd qp = q, qm = q;
      qp[i] += h;
      qm[i] -= h;
      const Eigen::VectorXd ep = residuals(model, qp, targets);
      const Eigen::VectorXd em = residuals(model, qm, targets);
      J_fd.col(i) = (ep - em) / (2 * h);
      g_fd[i] = (0.5 * ep.squaredNorm() - 0.5 * em.squaredNorm()) / (2 * h);
    }
    const double jac_err = (J - J_fd).norm() / std::max(1.0, J_fd.norm());
    const Eigen::VectorXd g = J.transpose() * e;
    const double grad_err = (g - g_fd).norm() / std::max(1.0, g_fd.norm());
    worst = std::max({worst, jac_err, grad_err});
  }
  report(5, "task jacobian and gradient match finite differences on 100 configurations",
         worst <= 1e-5, "worst relative error " + num(worst));
}

void criterion_6(const RobotModel& model) {
  std::mt19937 rng(1006);
  std::uniform_real_distribution<double> perturb(-0.15, 0.15);
  SolverOptions opts;
  opts.max_iterations = 300;
  opts.residual_tolerance = 1e-16;

  double worst_err = 0.0;
  bool bounds_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd q_true = random_q(model, rng, 0.35);
    const FramePose l = model.forward_kinematics(q_true, "l_sole");
    const FramePose r = model.forward_kinematics(q_true, "r_sole");
    const std::vector<TaskTarget> targets = {
        TaskTarget::full_pose("l_sole", l.position, l.orientation),
        TaskTarget::full_pose("r_sole", r.position, r.orientation),
        TaskTarget::com(model.whole_body_com(q_true))};
    Eigen::VectorXd q0 = q_true;
    for (int i = 0; i < q0.size(); ++i) {
      q0[i] = std::clamp(q0[i] + perturb(rng), model.q_min()[i], model.q_max()[i]);
    }
    const IkResult res = solve_frame(model, targets, q0, opts);
    worst_err = std::max(worst_err, res.residual_norm);
    for (int i = 0; i < res.q.size(); ++i) {
      bounds_ok = bounds_ok && res.q[i] >= model.q_min()[i] && res.q[i] <= model.q_max()[i];
    }
  }

  // unreachable targets must fail gracefully inside the bounds
  bool unreachable_ok = true;
  for (const Eigen::Vector3d goal :
       {Eigen::Vector3d(10, 0, 0), Eigen::Vector3d(0, 0, -5), Eigen::Vector3d(0, 3, 1)}) {
    const std::vector<TaskTarget> targets = {TaskTarget::position("l_sole", goal)};
    SolverOptions short_opts;
    short_opts.max_iterations = 60;
    const IkResult res = solve_frame(model, targets, Eigen::VectorXd::Zero(15), short_opts);
    unreachable_ok = unreachable_ok && !res.converged;
    for (int i = 0; i < res.q.size(); ++i) {
      unreachable_ok =
          unreachable_ok && res.q[i] >= model.q_min()[i] && res.q[i] <= model.q_max()[i];
    }
  }

  report(6, "ik round trip over 100 trials with bounds kept; unreachable targets fail cleanly",
         worst_err <= 1e-6 && bounds_ok && unreachable_ok,
         "worst task error " + num(worst_err) + (bounds_ok ? "" : ", bounds violated") +
             (unreachable_ok ? "" : ", unreachable handling broken"));
}

void criterion_7(const RobotModel& model) {
  const auto t0 = Clock::now();
  GaitParameters p;
  p.ts = 0.01;
  p.z_c = 0.53;
  p.z_c_offset = 0.015;
  p.n_strides = 3;
  p.T_stride = 4.0;
  p.T_switch = 1.0;
  p.step_width = 0.15;
  p.step_length = 0.1;

  const FootstepPlan plan = generate_footsteps(p);
  bool swing_ok = true;
  for (const auto& iv : plan.support_timeline) {
    if (iv.phase != SupportPhase::double_support) {
      swing_ok = swing_ok && std::abs((iv.t1 - iv.t0) - 1.5) <= 1e-12;
    }
  }

  const ReferenceTrajectories refs = generate_references(p);
  const StabilityReport stability =
      stability_check(refs.zmp_d, refs.times, plan, kFootLength, kFootWidth, 0.005);

  const Eigen::VectorXd q0 = initial_configuration(model, refs, plan);
  const TrajectoryResult traj = solve_trajectory(model, refs, plan, q0);
  const double elapsed = seconds_since(t0);

  report(7, "level walking pipeline solves with a 5 mm zmp margin and 1.5 s swings",
         swing_ok && traj.feasible && stability.violation_fraction == 0.0 && elapsed <= 60.0,
         "swing 1.5 s: " + std::string(swing_ok ? "yes" : "no") + ", feasible: " +
             (traj.feasible ? "yes" : "no") + ", worst margin " +
             num(stability.worst_margin) + " m, " + num(elapsed) + " s");
}

void criterion_8(const RobotModel& model) {
  GaitParameters p;
  p.ts = 0.01;
  p.z_c = 0.53;
  p.z_c_offset = 0.025;
  p.n_strides = 3;
  p.T_stride = 8.0;
  p.T_switch = 1.0;
  p.step_width = 0.15;
  p.type = GaitType::stairs_up;
  p.stair_height = 0.02;
  p.stair_length = 0.21;
  p.step_height = 0.04;

  const FootstepPlan plan = generate_footsteps(p);
  bool rise_ok = true;
  // interior same-side rise of two riser heights per stride
  for (size_t i = 2; i + 3 < plan.footholds.size(); ++i) {
    rise_ok = rise_ok && std::abs((plan.footholds[i + 2].position.z() -
                                   plan.footholds[i].position.z()) -
                                  0.04) <= 1e-12;
  }

  const ReferenceTrajectories refs = generate_references(p);
  const Eigen::VectorXd q0 = initial_configuration(model, refs, plan);
  const TrajectoryResult traj = solve_trajectory(model, refs, plan, q0);

  report(8, "stair climbing rises 0.04 m per stride and the ik converges",
         rise_ok && traj.feasible,
         "rise: " + std::string(rise_ok ? "0.04 m" : "wrong") + ", feasible: " +
             (traj.feasible ? "yes" : "no"));
}

void criterion_9() {
  const double fr = froude(0.037, 0.51, 9.81);
  report(9, "froude number of the reference gait", std::abs(fr - 0.0165) <= 5e-4,
         "froude(0.037, 0.51) = " + num(fr));
}

void criterion_10() {
  // trapezoid cost of transport against a closed form: i(t) = t on one motor,
  // v = 1, over 10 s the energy is exactly 50 J
  const Eigen::Index n = 1001;
  ExecutionLog log;
  log.times.resize(n);
  log.current.resize(n, 1);
  log.voltage = Eigen::MatrixXd::Ones(n, 1);
  log.q_meas = Eigen::MatrixXd::Zero(n, 15);
  log.q_des = Eigen::MatrixXd::Zero(n, 15);
  log.com_meas = Eigen::MatrixX3d::Zero(n, 3);
  log.com_des = Eigen::MatrixX3d::Zero(n, 3);
  log.zmp_meas = Eigen::MatrixX2d::Zero(n, 2);
  log.zmp_des = Eigen::MatrixX2d::Zero(n, 2);
  for (Eigen::Index k = 0; k < n; ++k) {
    log.times[k] = 0.01 * static_cast<double>(k);
    log.current(k, 0) = log.times[k];
    log.com_meas(k, 0) = 0.05 * log.times[k];
    log.com_des(k, 0) = log.com_meas(k, 0);
  }
  log.robot_mass = 26.4;
  log.leg_length = 0.51;
  const double cot = cost_of_transport(log);
  const double cot_analytic = 50.0 / (26.4 * 0.5);
  const double cot_err = std::abs(cot - cot_analytic);

  // rmse fixture: constant offsets are recovered exactly
  ExecutionLog off = log;
  off.q_meas.array() += 2.11 * kPi / 180.0;
  off.com_meas.col(1).array() += 0.038;
  off.zmp_meas.col(0).array() += 0.09;
  const TrackingRmse rmse = tracking_rmse(off);
  const double rmse_err = std::max({std::abs(rmse.joint_rmse - 2.11),
                                    std::abs(rmse.com_rmse - 0.038),
                                    std::abs(rmse.zmp_rmse - 0.09)});

  report(10, "trapezoid cost of transport and rmse fixtures are exact",
         cot_err <= 1e-6 && rmse_err <= 1e-12,
         "cot error " + num(cot_err) + ", rmse error " + num(rmse_err));
}

void criterion_11(const RobotModel& model) {
  bool ok = true;
  std::string detail;
  int ankle_l = -1, ankle_r = -1;
  for (int i = 0; i < model.joint_count(); ++i) {
    if (model.joint_names()[i] == "l_ankle_pitch") ankle_l = i;
    if (model.joint_names()[i] == "r_ankle_pitch") ankle_r = i;
  }

  for (GaitType type : {GaitType::slope_up, GaitType::slope_down}) {
    GaitParameters p;
    p.ts = 0.01;
    p.z_c = 0.53;
    p.z_c_offset = 0.02;
    p.n_strides = 3;
    p.T_stride = type == GaitType::slope_up ? 5.0 : 6.0;
    p.T_switch = 1.0;
    p.step_width = 0.15;
    p.step_length = 0.1;
    p.type = type;
    p.theta = 7.0;
    p.step_height = 0.03;

    const double expected_pitch = (type == GaitType::slope_up ? 1.0 : -1.0) * 7.0 * kPi / 180.0;
    const FootstepPlan plan = generate_footsteps(p);
    bool pitch_ok = true;
    for (const auto& h : plan.footholds) {
      pitch_ok = pitch_ok && std::abs(h.pitch - expected_pitch) <= 1e-12;
    }

    const ReferenceTrajectories refs = generate_references(p);
    const Eigen::VectorXd q0 = initial_configuration(model, refs, plan);
    const TrajectoryResult traj = solve_trajectory(model, refs, plan, q0);

    double ankle_min = 1e30, ankle_max = -1e30;
    for (Eigen::Index k = 0; k < traj.q.rows(); ++k) {
      for (int j : {ankle_l, ankle_r}) {
        ankle_min = std::min(ankle_min, traj.q(k, j));
        ankle_max = std::max(ankle_max, traj.q(k, j));
      }
    }
    const double lo = -36.0 * kPi / 180.0;
    const double hi = 27.0 * kPi / 180.0;
    const bool range_ok = ankle_min >= lo - 1e-12 && ankle_max <= hi + 1e-12;
    ok = ok && pitch_ok && traj.feasible && range_ok;
    detail += std::string(type == GaitType::slope_up ? "up" : "down") + ": pitch " +
              (pitch_ok ? "ok" : "wrong") + ", feasible " + (traj.feasible ? "yes" : "no") +
              ", ankle [" + num(ankle_min * 180.0 / kPi) + ", " +
              num(ankle_max * 180.0 / kPi) + "] deg; ";
  }
  report(11, "7-degree slopes keep foot pitch on every hold and the ankle inside its range", ok,
         detail);
}

}  // namespace

int main() {
  const RobotModel model = load_model(WALKGEN_DATA_DIR "/heicub_like.model");

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5(model);
  criterion_6(model);
  criterion_7(model);
  criterion_8(model);
  criterion_9();
  criterion_10();
  criterion_11(model);

  if (g_failures == 0) {
    std::printf("acceptance: all 11 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
