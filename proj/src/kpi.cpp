#include "walkgen/kpi.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace walkgen {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void ExecutionLog::validate() const {
  const Eigen::Index n = times.size();
  if (n < 2) throw std::runtime_error("log: need at least 2 samples");
  if (current.rows() != n || voltage.rows() != n || q_meas.rows() != n || q_des.rows() != n ||
      com_meas.rows() != n || com_des.rows() != n || zmp_meas.rows() != n || zmp_des.rows() != n) {
    throw std::runtime_error("log: arrays do not share the sample count");
  }
  if (current.cols() < 1 || current.cols() != voltage.cols()) {
    throw std::runtime_error("log: need M >= 1 motor channels with matching current/voltage");
  }
  if (q_meas.cols() != q_des.cols()) throw std::runtime_error("log: q_meas/q_des width mismatch");
  const double dt = times[1] - times[0];
  for (Eigen::Index k = 1; k < n; ++k) {
    if (std::abs((times[k] - times[k - 1]) - dt) > 1e-9) {
      throw std::runtime_error("log: time grid is not uniform at sample " + std::to_string(k));
    }
  }
}

double travelled_distance(const ExecutionLog& log) {
  const Eigen::Index n = log.times.size();
  return (log.com_meas.row(n - 1).head<2>() - log.com_meas.row(0).head<2>()).norm();
}

double cost_of_transport(const ExecutionLog& log) {
  log.validate();
  const double d = travelled_distance(log);
  if (d <= 1e-6) throw std::runtime_error("cost_of_transport: travelled distance is zero");
  if (!(log.robot_mass > 0.0)) throw std::runtime_error("cost_of_transport: robot_mass must be positive");
  // trapezoid rule over the summed motor power
  const Eigen::VectorXd power = (log.current.array() * log.voltage.array()).rowwise().sum();
  double energy = 0.0;
  for (Eigen::Index k = 0; k + 1 < power.size(); ++k) {
    energy += 0.5 * (power[k] + power[k + 1]) * (log.times[k + 1] - log.times[k]);
  }
  return energy / (log.robot_mass * d);
}

double froude(double v_max, double leg_length, double g) {
  if (!(leg_length > 0.0)) throw std::invalid_argument("froude: leg_length must be positive");
  return v_max / std::sqrt(g * leg_length);
}

double max_velocity(const ExecutionLog& log, double window) {
  log.validate();
  const double ts = log.ts();
  if (window < ts) throw std::invalid_argument("max_velocity: window shorter than sample period");
  const Eigen::Index n = log.times.size();
  const Eigen::Index w = static_cast<Eigen::Index>(std::llround(window / ts));
  if (w > n - 1) throw std::invalid_argument("max_velocity: window longer than the log");
  double best = 0.0;
  for (Eigen::Index k = 0; k + w < n; ++k) {
    const double dist = (log.com_meas.row(k + w).head<2>() - log.com_meas.row(k).head<2>()).norm();
    best = std::max(best, dist / (w * ts));
  }
  return best;
}

TrackingRmse tracking_rmse(const ExecutionLog& log) {
  log.validate();
  const Eigen::Index n = log.times.size();
  TrackingRmse out;
  out.com_rmse = std::sqrt((log.com_meas - log.com_des).rowwise().squaredNorm().mean());
  out.zmp_rmse = std::sqrt((log.zmp_meas - log.zmp_des).rowwise().squaredNorm().mean());
  // mean over joints of the per-joint angle RMSE, in degrees
  const Eigen::MatrixXd err = log.q_meas - log.q_des;
  double acc = 0.0;
  for (Eigen::Index j = 0; j < err.cols(); ++j) {
    acc += std::sqrt(err.col(j).squaredNorm() / n);
  }
  out.joint_rmse = acc / err.cols() * kRadToDeg;
  return out;
}

Eigen::MatrixX2d reconstruct_zmp(const Eigen::MatrixX3d& com, double g, double ts,
                                 std::vector<Eigen::Index>* flagged) {
  const Eigen::Index n = com.rows();
  if (n < 3) throw std::invalid_argument("reconstruct_zmp: need at least 3 samples");
  Eigen::MatrixX2d zmp(n, 2);
  const double ts2 = ts * ts;
  if (flagged) flagged->clear();
#ifdef WALKGEN_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (Eigen::Index k = 1; k < n - 1; ++k) {
    const double z = com(k, 2);
    const double z_ddot = (com(k - 1, 2) - 2.0 * com(k, 2) + com(k + 1, 2)) / ts2;
    const double denom = z_ddot + g;
    for (int c = 0; c < 2; ++c) {
      const double x_ddot = (com(k - 1, c) - 2.0 * com(k, c) + com(k + 1, c)) / ts2;
      zmp(k, c) = com(k, c) - z * x_ddot / denom;
    }
  }
  // flagging is kept out of the parallel loop; the pass is cheap
  if (flagged) {
    for (Eigen::Index k = 1; k < n - 1; ++k) {
      const double z_ddot = (com(k - 1, 2) - 2.0 * com(k, 2) + com(k + 1, 2)) / ts2;
      if (z_ddot + g <= 0.0) flagged->push_back(k);
    }
  }
  zmp.row(0) = zmp.row(1);
  zmp.row(n - 1) = zmp.row(n - 2);
  return zmp;
}

StabilityReport stability_check(const Eigen::MatrixX2d& zmp, const Eigen::VectorXd& times,
                                const FootstepPlan& plan, double foot_length, double foot_width,
                                double required_margin, bool parallel) {
  if (zmp.rows() != times.size()) {
    throw std::invalid_argument("stability_check: zmp and times length mismatch");
  }
  const Eigen::Index n = times.size();
  StabilityReport report;
  report.margins.resize(n);
#ifdef WALKGEN_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = std::clamp(times[k], 0.0, plan.total_time);
    report.margins[k] =
        support_polygon_margin(plan, t, zmp.row(k).transpose(), foot_length, foot_width);
  }
  Eigen::Index violations = 0;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (report.margins[k] < required_margin) ++violations;
    if (report.margins[k] < report.worst_margin) {
      report.worst_margin = report.margins[k];
      report.worst_sample = k;
    }
  }
  report.violation_fraction = static_cast<double>(violations) / static_cast<double>(n);
  return report;
}

KpiReport analyze(const ExecutionLog& log, double velocity_window, bool level_ground) {
  KpiReport report;
  report.cost_of_transport = cost_of_transport(log);
  report.v_max = max_velocity(log, velocity_window);
  if (level_ground) report.froude = froude(report.v_max, log.leg_length);
  const TrackingRmse rmse = tracking_rmse(log);
  report.com_rmse = rmse.com_rmse;
  report.zmp_rmse = rmse.zmp_rmse;
  report.joint_rmse = rmse.joint_rmse;
  report.travelled_distance = travelled_distance(log);
  return report;
}

std::string format_report(const KpiReport& r) {
  std::ostringstream out;
  out << "cost_of_transport = " << fmt(r.cost_of_transport) << " J/(kg*m)\n";
  out << "v_max = " << fmt(r.v_max) << " m/s\n";
  if (r.froude) {
    out << "froude = " << fmt(*r.froude) << "\n";
  } else {
    out << "# froude omitted: level ground only\n";
  }
  out << "com_rmse = " << fmt(r.com_rmse) << " m\n";
  out << "zmp_rmse = " << fmt(r.zmp_rmse) << " m\n";
  out << "joint_rmse = " << fmt(r.joint_rmse) << " deg\n";
  out << "travelled_distance = " << fmt(r.travelled_distance) << " m\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Log I/O

namespace {

std::vector<std::string> split_csv(const std::string& line) {
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

size_t count_prefixed(const std::vector<std::string>& header, const std::string& prefix) {
  size_t n = 0;
  for (const auto& h : header) {
    if (h.rfind(prefix, 0) == 0) ++n;
  }
  return n;
}

}  // namespace

ExecutionLog load_execution_log(const std::string& csv_path, const std::string& meta_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open log file '" + csv_path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("log file '" + csv_path + "': empty");
  const auto header = split_csv(line);
  if (header.empty() || header[0] != "t") {
    throw std::runtime_error("log file '" + csv_path + "': header must start with 't'");
  }
  const size_t m = count_prefixed(header, "i_");
  const size_t nq = count_prefixed(header, "q_meas_");
  if (m < 1) throw std::runtime_error("log file: no motor current columns (i_*)");
  const size_t expected = 1 + 2 * m + 2 * nq + 6 + 4;
  if (header.size() != expected) {
    throw std::runtime_error("log file: header has " + std::to_string(header.size()) +
                             " columns, expected " + std::to_string(expected));
  }

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto toks = split_csv(line);
    if (toks.size() != header.size()) {
      throw std::runtime_error("log file line " + std::to_string(lineno) + ": has " +
                               std::to_string(toks.size()) + " columns, expected " +
                               std::to_string(header.size()));
    }
    std::vector<double> row(toks.size());
    for (size_t i = 0; i < toks.size(); ++i) row[i] = std::stod(toks[i]);
    rows.push_back(std::move(row));
  }
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());

  ExecutionLog log;
  log.times.resize(n);
  log.current.resize(n, m);
  log.voltage.resize(n, m);
  log.q_meas.resize(n, nq);
  log.q_des.resize(n, nq);
  log.com_meas.resize(n, 3);
  log.com_des.resize(n, 3);
  log.zmp_meas.resize(n, 2);
  log.zmp_des.resize(n, 2);
  for (Eigen::Index k = 0; k < n; ++k) {
    size_t c = 0;
    const auto& row = rows[k];
    log.times[k] = row[c++];
    for (size_t j = 0; j < m; ++j) log.current(k, j) = row[c++];
    for (size_t j = 0; j < m; ++j) log.voltage(k, j) = row[c++];
    for (size_t j = 0; j < nq; ++j) log.q_meas(k, j) = row[c++];
    for (size_t j = 0; j < nq; ++j) log.q_des(k, j) = row[c++];
    for (int j = 0; j < 3; ++j) log.com_meas(k, j) = row[c++];
    for (int j = 0; j < 3; ++j) log.com_des(k, j) = row[c++];
    for (int j = 0; j < 2; ++j) log.zmp_meas(k, j) = row[c++];
    for (int j = 0; j < 2; ++j) log.zmp_des(k, j) = row[c++];
  }

  std::ifstream meta(meta_path);
  if (!meta) throw std::runtime_error("cannot open log metadata '" + meta_path + "'");
  int mline = 0;
  while (std::getline(meta, line)) {
    ++mline;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::stringstream ss(line);
    std::string name, eq, value;
    ss >> name >> eq;
    std::getline(ss, value);
    const auto b = value.find_first_not_of(" \t");
    value = b == std::string::npos ? "" : value.substr(b);
    if (eq != "=") {
      throw std::runtime_error("log metadata line " + std::to_string(mline) +
                               ": expected 'name = value'");
    }
    if (name == "robot_mass") log.robot_mass = std::stod(value);
    else if (name == "leg_length") log.leg_length = std::stod(value);
    else if (name == "foot_length") log.foot_length = std::stod(value);
    else if (name == "foot_width") log.foot_width = std::stod(value);
    else if (name == "joint_names") {
      log.joint_names = split_csv(value);
    } else {
      throw std::runtime_error("log metadata line " + std::to_string(mline) + ": unknown key '" +
                               name + "'");
    }
  }
  log.validate();
  return log;
}

void save_execution_log(const ExecutionLog& log, const std::string& csv_path,
                        const std::string& meta_path) {
  log.validate();
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot write log file '" + csv_path + "'");
  const Eigen::Index m = log.current.cols();
  const Eigen::Index nq = log.q_meas.cols();
  out << "t";
  for (Eigen::Index j = 0; j < m; ++j) out << ", i_" << (j + 1);
  for (Eigen::Index j = 0; j < m; ++j) out << ", v_" << (j + 1);
  for (Eigen::Index j = 0; j < nq; ++j) out << ", q_meas_" << (j + 1);
  for (Eigen::Index j = 0; j < nq; ++j) out << ", q_des_" << (j + 1);
  out << ", com_meas_x, com_meas_y, com_meas_z, com_des_x, com_des_y, com_des_z";
  out << ", zmp_meas_x, zmp_meas_y, zmp_des_x, zmp_des_y\n";
  for (Eigen::Index k = 0; k < log.times.size(); ++k) {
    out << fmt(log.times[k]);
    for (Eigen::Index j = 0; j < m; ++j) out << ", " << fmt(log.current(k, j));
    for (Eigen::Index j = 0; j < m; ++j) out << ", " << fmt(log.voltage(k, j));
    for (Eigen::Index j = 0; j < nq; ++j) out << ", " << fmt(log.q_meas(k, j));
    for (Eigen::Index j = 0; j < nq; ++j) out << ", " << fmt(log.q_des(k, j));
    for (int j = 0; j < 3; ++j) out << ", " << fmt(log.com_meas(k, j));
    for (int j = 0; j < 3; ++j) out << ", " << fmt(log.com_des(k, j));
    for (int j = 0; j < 2; ++j) out << ", " << fmt(log.zmp_meas(k, j));
    for (int j = 0; j < 2; ++j) out << ", " << fmt(log.zmp_des(k, j));
    out << "\n";
  }

  std::ofstream meta(meta_path);
  if (!meta) throw std::runtime_error("cannot write log metadata '" + meta_path + "'");
  meta << "robot_mass = " << fmt(log.robot_mass) << "\n";
  meta << "leg_length = " << fmt(log.leg_length) << "\n";
  meta << "foot_length = " << fmt(log.foot_length) << "\n";
  meta << "foot_width = " << fmt(log.foot_width) << "\n";
  if (!log.joint_names.empty()) {
    meta << "joint_names = ";
    for (size_t i = 0; i < log.joint_names.size(); ++i) {
      if (i) meta << ",";
      meta << log.joint_names[i];
    }
    meta << "\n";
  }
}

}  // namespace walkgen
