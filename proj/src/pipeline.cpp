#include "walkgen/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "walkgen/svg.hpp"

namespace walkgen {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto b = tok.find_first_not_of(" \t\r");
    const auto e = tok.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : tok.substr(b, e - b + 1));
  }
  return out;
}

std::filesystem::path out_file(const PipelineConfig& config, const std::string& name) {
  return std::filesystem::path(config.output_directory) / name;
}

}  // namespace

void write_reference_csv(const std::string& path, const ReferenceTrajectories& refs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "t, zmp_x, zmp_y, com_x, com_y, com_z, lf_x, lf_y, lf_z, lf_pitch, "
         "rf_x, rf_y, rf_z, rf_pitch\n";
  for (Eigen::Index k = 0; k < refs.times.size(); ++k) {
    out << fmt(refs.times[k]) << ", " << fmt(refs.zmp_d(k, 0)) << ", " << fmt(refs.zmp_d(k, 1))
        << ", " << fmt(refs.com_d(k, 0)) << ", " << fmt(refs.com_d(k, 1)) << ", "
        << fmt(refs.com_d(k, 2));
    const auto& lf = refs.left_foot[k];
    const auto& rf = refs.right_foot[k];
    out << ", " << fmt(lf.position.x()) << ", " << fmt(lf.position.y()) << ", "
        << fmt(lf.position.z()) << ", " << fmt(lf.pitch);
    out << ", " << fmt(rf.position.x()) << ", " << fmt(rf.position.y()) << ", "
        << fmt(rf.position.z()) << ", " << fmt(rf.pitch) << "\n";
  }
}

ReferenceTrajectories read_reference_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path + "': empty file");
  const auto header = split_csv_line(line);
  const std::vector<std::string> expected = {"t",    "zmp_x", "zmp_y", "com_x",    "com_y",
                                             "com_z", "lf_x",  "lf_y",  "lf_z",     "lf_pitch",
                                             "rf_x",  "rf_y",  "rf_z",  "rf_pitch"};
  if (header != expected) throw std::runtime_error("'" + path + "': unexpected CSV header");

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto toks = split_csv_line(line);
    if (toks.size() != expected.size()) {
      throw std::runtime_error("'" + path + "' line " + std::to_string(lineno) +
                               ": wrong column count");
    }
    std::vector<double> row(toks.size());
    for (size_t i = 0; i < toks.size(); ++i) row[i] = std::stod(toks[i]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("'" + path + "': no samples");

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  ReferenceTrajectories refs;
  refs.times.resize(n);
  refs.zmp_d.resize(n, 2);
  refs.com_d.resize(n, 3);
  refs.left_foot.resize(n);
  refs.right_foot.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& r = rows[k];
    refs.times[k] = r[0];
    refs.zmp_d(k, 0) = r[1];
    refs.zmp_d(k, 1) = r[2];
    refs.com_d(k, 0) = r[3];
    refs.com_d(k, 1) = r[4];
    refs.com_d(k, 2) = r[5];
    refs.left_foot[k] = {{r[6], r[7], r[8]}, r[9]};
    refs.right_foot[k] = {{r[10], r[11], r[12]}, r[13]};
  }
  refs.ts = n > 1 ? refs.times[1] - refs.times[0] : 0.0;
  return refs;
}

void write_footstep_listing(const std::string& path, const FootstepPlan& plan) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "# side x y z pitch touchdown_time liftoff_time\n";
  for (const auto& h : plan.footholds) {
    out << (h.side == Side::left ? "left" : "right") << " " << fmt(h.position.x()) << " "
        << fmt(h.position.y()) << " " << fmt(h.position.z()) << " " << fmt(h.pitch) << " "
        << fmt(h.touchdown_time) << " " << fmt(h.liftoff_time) << "\n";
  }
  out << "# support_timeline: t0 t1 phase\n";
  for (const auto& iv : plan.support_timeline) {
    const char* phase = iv.phase == SupportPhase::double_support ? "double"
                        : iv.phase == SupportPhase::single_left ? "single_left"
                                                                : "single_right";
    out << "# " << fmt(iv.t0) << " " << fmt(iv.t1) << " " << phase << "\n";
  }
}

void write_joint_csv(const std::string& path, const ReferenceTrajectories& refs,
                     const RobotModel& model, const Eigen::MatrixXd& q, bool degrees) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "t";
  for (const auto& name : model.joint_names()) out << ", " << name;
  out << "\n";
  const double scale = degrees ? kRadToDeg : 1.0;
  for (Eigen::Index k = 0; k < q.rows(); ++k) {
    out << fmt(refs.times[k]);
    for (Eigen::Index j = 0; j < q.cols(); ++j) out << ", " << fmt(q(k, j) * scale);
    out << "\n";
  }
}

Eigen::VectorXd initial_configuration(const RobotModel& model, const ReferenceTrajectories& refs,
                                      const FootstepPlan& plan) {
  // crouch guess: bend knees, lean hips/ankles to keep soles flat
  Eigen::VectorXd q = Eigen::VectorXd::Zero(model.joint_count());
  const auto& names = model.joint_names();
  for (int i = 0; i < model.joint_count(); ++i) {
    const std::string& name = names[i];
    if (name == "l_knee" || name == "r_knee") q[i] = -0.6;
    else if (name == "l_hip_pitch" || name == "r_hip_pitch") q[i] = 0.3;
    else if (name == "l_ankle_pitch" || name == "r_ankle_pitch") q[i] = -0.3;
  }
  q = q.cwiseMax(model.q_min()).cwiseMin(model.q_max());

  // settle onto the first reference sample
  Side anchor_side = Side::left;
  for (const auto& iv : plan.support_timeline) {
    if (iv.phase == SupportPhase::single_left) { anchor_side = Side::left; break; }
    if (iv.phase == SupportPhase::single_right) { anchor_side = Side::right; break; }
  }
  const FootPoseSample& ap = anchor_side == Side::left ? refs.left_foot[0] : refs.right_foot[0];
  const FootPoseSample& op = anchor_side == Side::left ? refs.right_foot[0] : refs.left_foot[0];
  Anchor anchor{anchor_side == Side::left ? "l_sole" : "r_sole",
                {ap.position, pitch_rotation(ap.pitch)}};
  std::vector<TaskTarget> targets = {
      TaskTarget::full_pose(anchor_side == Side::left ? "r_sole" : "l_sole", op.position,
                            pitch_rotation(op.pitch)),
      TaskTarget::com(refs.com_d.row(0).transpose()),
  };
  SolverOptions options;
  options.max_iterations = 500;
  options.residual_tolerance = 1e-20;
  return solve_frame(model, targets, q, options, &anchor).q;
}

int cmd_gen(const PipelineConfig& config) {
  try {
    const GaitParameters params = load_parameters(config.params_path);
    const FootstepPlan plan = generate_footsteps(params);
    const ReferenceTrajectories refs = generate_references(params);
    std::filesystem::create_directories(config.output_directory);
    write_reference_csv(out_file(config, "references.csv").string(), refs);
    write_footstep_listing(out_file(config, "footsteps.txt").string(), plan);
    if (config.emit_svg) {
      write_pattern_svg(out_file(config, "pattern.svg").string(), plan, refs);
      write_timeseries_svg(out_file(config, "timeseries.svg").string(), refs);
    }
    std::cout << "gen: " << refs.times.size() << " samples over " << plan.total_time
              << " s, " << plan.footholds.size() << " footholds\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "gen: " << e.what() << "\n";
    return 2;
  }
}

int cmd_ik(const PipelineConfig& config) {
  try {
    const GaitParameters params = load_parameters(config.params_path);
    const RobotModel model = load_model(config.model_path);
    const FootstepPlan plan = generate_footsteps(params);
    const ReferenceTrajectories refs = generate_references(params);
    std::filesystem::create_directories(config.output_directory);

    const Eigen::VectorXd q0 = initial_configuration(model, refs, plan);
    const TrajectoryResult traj = solve_trajectory(model, refs, plan, q0, config.solver_options,
                                                   config.task_error_tolerance);

    write_joint_csv(out_file(config, "joints_deg.csv").string(), refs, model, traj.q, true);
    write_joint_csv(out_file(config, "joints_rad.csv").string(), refs, model, traj.q, false);

    std::ofstream report(out_file(config, "ik_report.txt"));
    report << "# sample t iterations residual_norm converged\n";
    for (size_t k = 0; k < traj.diagnostics.size(); ++k) {
      const IkResult& r = traj.diagnostics[k];
      report << k << " " << fmt(refs.times[static_cast<Eigen::Index>(k)]) << " " << r.iterations
             << " " << fmt(r.residual_norm) << " " << (r.converged ? 1 : 0) << "\n";
    }
    if (!traj.feasible) {
      std::cerr << "ik: trajectory infeasible, first failing sample " << traj.first_failed_sample
                << " (t = " << refs.times[traj.first_failed_sample] << " s)\n";
      return 1;
    }
    std::cout << "ik: " << traj.q.rows() << " samples solved\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "ik: " << e.what() << "\n";
    return 2;
  }
}

int cmd_check(const PipelineConfig& config) {
  try {
    const GaitParameters params = load_parameters(config.params_path);
    const FootstepPlan plan = generate_footsteps(params);
    const std::string csv = config.log_path.empty()
                                ? out_file(config, "references.csv").string()
                                : config.log_path;
    const ReferenceTrajectories refs = read_reference_csv(csv);
    const StabilityReport report = stability_check(refs.zmp_d, refs.times, plan);
    std::cout << "check: violation fraction " << report.violation_fraction << ", worst margin "
              << report.worst_margin << " m";
    if (report.worst_sample >= 0) {
      std::cout << " at t = " << refs.times[report.worst_sample] << " s";
    }
    std::cout << "\n";
    return report.violation_fraction > 0.0 ? 1 : 0;
  } catch (const std::exception& e) {
    std::cerr << "check: " << e.what() << "\n";
    return 2;
  }
}

int cmd_analyze(const PipelineConfig& config) {
  try {
    const GaitParameters params = load_parameters(config.params_path);
    const ExecutionLog log = load_execution_log(config.log_path, config.meta_path);
    const bool level = config.scenario.empty() ? params.type == GaitType::level
                                               : config.scenario == "level";
    const KpiReport report = analyze(log, params.T_stride, level);
    const std::string text = format_report(report);
    std::filesystem::create_directories(config.output_directory);
    std::ofstream out(out_file(config, "kpi_report.txt"));
    out << text;
    std::cout << text;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "analyze: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace walkgen
