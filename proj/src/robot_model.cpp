#include "walkgen/robot_model.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace walkgen {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

Eigen::Matrix3d axis_angle(const Eigen::Vector3d& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

}  // namespace

RobotModel::RobotModel(std::vector<Link> links, std::vector<Joint> joints, std::string root_link,
                       std::vector<NamedFrame> named_frames)
    : links_(std::move(links)),
      joints_(std::move(joints)),
      root_link_(std::move(root_link)),
      named_frames_(std::move(named_frames)) {
  for (auto& j : joints_) {
    j.limit_min = j.limit_min_deg * kDegToRad;
    j.limit_max = j.limit_max_deg * kDegToRad;
  }
  validate();
  build_topology();
}

void RobotModel::validate() const {
  if (links_.empty()) throw std::runtime_error("model: no links");
  std::map<std::string, int> link_idx;
  for (int i = 0; i < static_cast<int>(links_.size()); ++i) {
    if (link_idx.count(links_[i].name)) {
      throw std::runtime_error("model: duplicate link '" + links_[i].name + "'");
    }
    link_idx[links_[i].name] = i;
    if (links_[i].mass < 0.0) {
      throw std::runtime_error("model: negative mass on link '" + links_[i].name + "'");
    }
  }
  if (!link_idx.count(root_link_)) {
    throw std::runtime_error("model: root_link '" + root_link_ + "' is not a link");
  }
  double total = 0.0;
  for (const auto& l : links_) total += l.mass;
  if (!(total > 0.0)) throw std::runtime_error("model: total mass must be positive");

  std::map<std::string, int> parent_count;
  for (const auto& j : joints_) {
    if (j.type != "revolute") {
      throw std::runtime_error("model: joint '" + j.name + "' has unsupported type '" + j.type + "'");
    }
    if (!link_idx.count(j.parent_link)) {
      throw std::runtime_error("model: joint '" + j.name + "' parent_link '" + j.parent_link + "' unknown");
    }
    if (!link_idx.count(j.child_link)) {
      throw std::runtime_error("model: joint '" + j.name + "' child_link '" + j.child_link + "' unknown");
    }
    if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
      throw std::runtime_error("model: joint '" + j.name + "' axis is not unit norm");
    }
    if (!(j.limit_min < j.limit_max)) {
      throw std::runtime_error("model: joint '" + j.name + "' has inverted limits");
    }
    if (j.child_link == root_link_) {
      throw std::runtime_error("model: cycle — joint '" + j.name + "' makes root_link a child");
    }
    if (++parent_count[j.child_link] > 1) {
      throw std::runtime_error("model: link '" + j.child_link + "' has more than one parent joint");
    }
  }
  // Tree check: walking parents from every link must terminate at the root.
  std::map<std::string, std::string> parent_of;
  for (const auto& j : joints_) parent_of[j.child_link] = j.parent_link;
  for (const auto& l : links_) {
    std::string cur = l.name;
    size_t steps = 0;
    while (cur != root_link_) {
      auto it = parent_of.find(cur);
      if (it == parent_of.end()) {
        throw std::runtime_error("model: link '" + l.name + "' is not connected to the root");
      }
      cur = it->second;
      if (++steps > links_.size()) {
        throw std::runtime_error("model: cycle detected in joint graph at link '" + l.name + "'");
      }
    }
  }
  for (const auto& f : named_frames_) {
    if (!link_idx.count(f.parent_link)) {
      throw std::runtime_error("model: frame '" + f.name + "' parent_link '" + f.parent_link + "' unknown");
    }
  }
}

void RobotModel::build_topology() {
  const int nl = static_cast<int>(links_.size());
  const int nj = static_cast<int>(joints_.size());
  for (int i = 0; i < nl; ++i) link_index_[links_[i].name] = i;
  for (int i = 0; i < static_cast<int>(named_frames_.size()); ++i) {
    frame_index_[named_frames_[i].name] = i;
  }
  total_mass_ = 0.0;
  for (const auto& l : links_) total_mass_ += l.mass;

  q_min_.resize(nj);
  q_max_.resize(nj);
  joint_names_.clear();
  for (int i = 0; i < nj; ++i) {
    q_min_[i] = joints_[i].limit_min;
    q_max_[i] = joints_[i].limit_max;
    joint_names_.push_back(joints_[i].name);
  }

  parent_joint_of_link_.assign(nl, -1);
  for (int i = 0; i < nj; ++i) {
    parent_joint_of_link_[link_index_.at(joints_[i].child_link)] = i;
  }

  // Topological order: repeatedly emit joints whose parent link is resolved.
  topo_order_.clear();
  std::vector<bool> link_done(nl, false);
  link_done[link_index_.at(root_link_)] = true;
  while (static_cast<int>(topo_order_.size()) < nj) {
    bool progressed = false;
    for (int i = 0; i < nj; ++i) {
      const int child = link_index_.at(joints_[i].child_link);
      if (link_done[child]) continue;
      if (link_done[link_index_.at(joints_[i].parent_link)]) {
        topo_order_.push_back(i);
        link_done[child] = true;
        progressed = true;
      }
    }
    if (!progressed) throw std::runtime_error("model: joint graph is not a tree");
  }

  joints_on_path_.assign(nl, std::vector<bool>(nj, false));
  for (int l = 0; l < nl; ++l) {
    int cur = l;
    while (parent_joint_of_link_[cur] >= 0) {
      const int j = parent_joint_of_link_[cur];
      joints_on_path_[l][j] = true;
      cur = link_index_.at(joints_[j].parent_link);
    }
  }
}

void RobotModel::check_q(const Eigen::VectorXd& q) const {
  if (q.size() != joint_count()) {
    throw std::invalid_argument("q has length " + std::to_string(q.size()) + ", model has " +
                                std::to_string(joint_count()) + " joints");
  }
}

bool RobotModel::has_frame(const std::string& name) const {
  return frame_index_.count(name) > 0 || link_index_.count(name) > 0;
}

RobotModel::FrameRef RobotModel::resolve_frame(const std::string& name) const {
  if (auto it = frame_index_.find(name); it != frame_index_.end()) {
    const NamedFrame& f = named_frames_[it->second];
    return {link_index_.at(f.parent_link), true, f.offset_translation, f.offset_rotation};
  }
  if (auto it = link_index_.find(name); it != link_index_.end()) {
    return {it->second, false, Eigen::Vector3d::Zero(), Eigen::Matrix3d::Identity()};
  }
  throw std::runtime_error("unknown frame '" + name + "'");
}

void RobotModel::compute_link_poses(const Eigen::VectorXd& q, std::vector<FramePose>& link_poses,
                                    std::vector<Eigen::Vector3d>& joint_anchor,
                                    std::vector<Eigen::Vector3d>& joint_axis_world) const {
  link_poses.assign(links_.size(), FramePose{});
  joint_anchor.assign(joints_.size(), Eigen::Vector3d::Zero());
  joint_axis_world.assign(joints_.size(), Eigen::Vector3d::Zero());
  for (int j : topo_order_) {
    const Joint& joint = joints_[j];
    const FramePose& parent = link_poses[link_index_.at(joint.parent_link)];
    const Eigen::Vector3d anchor = parent.position + parent.orientation * joint.origin_translation;
    const Eigen::Matrix3d pre = parent.orientation * joint.origin_rotation;
    joint_anchor[j] = anchor;
    joint_axis_world[j] = pre * joint.axis;
    FramePose& child = link_poses[link_index_.at(joint.child_link)];
    child.position = anchor;
    child.orientation = pre * axis_angle(joint.axis, q[j]);
  }
}

FramePose RobotModel::forward_kinematics(const Eigen::VectorXd& q, const std::string& frame) const {
  check_q(q);
  const FrameRef ref = resolve_frame(frame);
  std::vector<FramePose> poses;
  std::vector<Eigen::Vector3d> anchors, axes;
  compute_link_poses(q, poses, anchors, axes);
  FramePose pose = poses[ref.link_index];
  if (ref.has_offset) {
    pose = pose.compose({ref.offset_translation, ref.offset_rotation});
  }
  return pose;
}

FramePose RobotModel::forward_kinematics(const Eigen::VectorXd& q, const std::string& frame,
                                         const FramePose& base) const {
  return base.compose(forward_kinematics(q, frame));
}

Eigen::MatrixXd RobotModel::frame_jacobian(const Eigen::VectorXd& q, const std::string& frame) const {
  check_q(q);
  const FrameRef ref = resolve_frame(frame);
  std::vector<FramePose> poses;
  std::vector<Eigen::Vector3d> anchors, axes;
  compute_link_poses(q, poses, anchors, axes);
  FramePose pose = poses[ref.link_index];
  if (ref.has_offset) pose = pose.compose({ref.offset_translation, ref.offset_rotation});

  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(6, joint_count());
  const auto& on_path = joints_on_path_[ref.link_index];
  for (int j = 0; j < joint_count(); ++j) {
    if (!on_path[j]) continue;
    const Eigen::Vector3d& w = axes[j];
    jac.block<3, 1>(0, j) = w.cross(pose.position - anchors[j]);
    jac.block<3, 1>(3, j) = w;
  }
  return jac;
}

Eigen::Vector3d RobotModel::whole_body_com(const Eigen::VectorXd& q) const {
  check_q(q);
  std::vector<FramePose> poses;
  std::vector<Eigen::Vector3d> anchors, axes;
  compute_link_poses(q, poses, anchors, axes);
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < links_.size(); ++i) {
    if (links_[i].mass == 0.0) continue;
    acc += links_[i].mass * (poses[i].position + poses[i].orientation * links_[i].com_offset);
  }
  return acc / total_mass_;
}

Eigen::Vector3d RobotModel::whole_body_com(const Eigen::VectorXd& q, const FramePose& base) const {
  const Eigen::Vector3d local = whole_body_com(q);
  return base.position + base.orientation * local;
}

Eigen::MatrixXd RobotModel::com_jacobian(const Eigen::VectorXd& q) const {
  check_q(q);
  std::vector<FramePose> poses;
  std::vector<Eigen::Vector3d> anchors, axes;
  compute_link_poses(q, poses, anchors, axes);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(3, joint_count());
  for (size_t i = 0; i < links_.size(); ++i) {
    if (links_[i].mass == 0.0) continue;
    const Eigen::Vector3d p = poses[i].position + poses[i].orientation * links_[i].com_offset;
    const auto& on_path = joints_on_path_[i];
    for (int j = 0; j < joint_count(); ++j) {
      if (!on_path[j]) continue;
      jac.col(j).head<3>() += links_[i].mass * axes[j].cross(p - anchors[j]);
    }
  }
  return jac / total_mass_;
}

bool RobotModel::operator==(const RobotModel& other) const {
  if (root_link_ != other.root_link_ || links_.size() != other.links_.size() ||
      joints_.size() != other.joints_.size() || named_frames_.size() != other.named_frames_.size()) {
    return false;
  }
  for (size_t i = 0; i < links_.size(); ++i) {
    const Link &a = links_[i], &b = other.links_[i];
    if (a.name != b.name || a.mass != b.mass || a.com_offset != b.com_offset) return false;
  }
  for (size_t i = 0; i < joints_.size(); ++i) {
    const Joint &a = joints_[i], &b = other.joints_[i];
    if (a.name != b.name || a.type != b.type || a.axis != b.axis ||
        a.parent_link != b.parent_link || a.child_link != b.child_link ||
        a.origin_translation != b.origin_translation || a.origin_rotation != b.origin_rotation ||
        a.limit_min != b.limit_min || a.limit_max != b.limit_max) {
      return false;
    }
  }
  for (size_t i = 0; i < named_frames_.size(); ++i) {
    const NamedFrame &a = named_frames_[i], &b = other.named_frames_[i];
    if (a.name != b.name || a.parent_link != b.parent_link ||
        a.offset_translation != b.offset_translation || a.offset_rotation != b.offset_rotation) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Model file I/O.
//
// One record per line:
//   root_link = <name>
//   link name=<s> mass=<kg> com_offset=<x,y,z>
//   joint name=<s> type=revolute axis=<x,y,z> parent_link=<s> child_link=<s>
//         origin_translation=<x,y,z> origin_rotation=<9 values row-major>
//         limit_min=<deg> limit_max=<deg>
//   frame name=<s> parent_link=<s> offset_translation=<x,y,z> offset_rotation=<9 values>
// Numeric lists are comma separated. Angles in degrees, lengths in meters.

namespace {

struct Record {
  std::string kind;
  std::map<std::string, std::string> fields;
};

std::vector<double> parse_numbers(const std::string& s, size_t expected, const std::string& ctx) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    out.push_back(v);
  }
  if (out.size() != expected) {
    throw std::runtime_error("model file: " + ctx + " expects " + std::to_string(expected) +
                             " numbers, got " + std::to_string(out.size()));
  }
  return out;
}

Eigen::Vector3d parse_vec3(const Record& r, const std::string& key) {
  auto it = r.fields.find(key);
  if (it == r.fields.end()) throw std::runtime_error("model file: missing field '" + key + "'");
  auto v = parse_numbers(it->second, 3, key);
  return {v[0], v[1], v[2]};
}

Eigen::Matrix3d parse_mat3(const Record& r, const std::string& key) {
  auto it = r.fields.find(key);
  if (it == r.fields.end()) throw std::runtime_error("model file: missing field '" + key + "'");
  auto v = parse_numbers(it->second, 9, key);
  Eigen::Matrix3d m;
  m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
  return m;
}

std::string require_str(const Record& r, const std::string& key) {
  auto it = r.fields.find(key);
  if (it == r.fields.end()) {
    throw std::runtime_error("model file: " + r.kind + " record missing field '" + key + "'");
  }
  return it->second;
}

double require_num(const Record& r, const std::string& key) {
  return parse_numbers(require_str(r, key), 1, key)[0];
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_vec3(const Eigen::Vector3d& v) {
  return fmt(v[0]) + "," + fmt(v[1]) + "," + fmt(v[2]);
}

std::string fmt_mat3(const Eigen::Matrix3d& m) {
  std::string s;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (!s.empty()) s += ",";
      s += fmt(m(r, c));
    }
  }
  return s;
}

}  // namespace

RobotModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file '" + path + "'");

  std::vector<Link> links;
  std::vector<Joint> joints;
  std::vector<NamedFrame> frames;
  std::string root_link;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::stringstream ss(line);
    Record rec;
    ss >> rec.kind;
    if (rec.kind == "root_link") {
      std::string eq;
      ss >> eq >> root_link;
      if (eq != "=" || root_link.empty()) {
        throw std::runtime_error("model file line " + std::to_string(lineno) +
                                 ": expected 'root_link = <name>'");
      }
      continue;
    }
    std::string tok;
    while (ss >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) {
        throw std::runtime_error("model file line " + std::to_string(lineno) +
                                 ": malformed field '" + tok + "'");
      }
      rec.fields[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    try {
      if (rec.kind == "link") {
        Link l;
        l.name = require_str(rec, "name");
        l.mass = require_num(rec, "mass");
        l.com_offset = parse_vec3(rec, "com_offset");
        links.push_back(l);
      } else if (rec.kind == "joint") {
        Joint j;
        j.name = require_str(rec, "name");
        j.type = require_str(rec, "type");
        j.axis = parse_vec3(rec, "axis");
        j.parent_link = require_str(rec, "parent_link");
        j.child_link = require_str(rec, "child_link");
        j.origin_translation = parse_vec3(rec, "origin_translation");
        j.origin_rotation = parse_mat3(rec, "origin_rotation");
        j.limit_min_deg = require_num(rec, "limit_min");
        j.limit_max_deg = require_num(rec, "limit_max");
        joints.push_back(j);
      } else if (rec.kind == "frame") {
        NamedFrame f;
        f.name = require_str(rec, "name");
        f.parent_link = require_str(rec, "parent_link");
        f.offset_translation = parse_vec3(rec, "offset_translation");
        f.offset_rotation = parse_mat3(rec, "offset_rotation");
        frames.push_back(f);
      } else {
        throw std::runtime_error("unknown record kind '" + rec.kind + "'");
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("model file line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (root_link.empty()) throw std::runtime_error("model file: missing root_link record");
  return RobotModel(std::move(links), std::move(joints), std::move(root_link), std::move(frames));
}

void save_model(const RobotModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
  out << "root_link = " << model.root_link() << "\n";
  for (const auto& l : model.links()) {
    out << "link name=" << l.name << " mass=" << fmt(l.mass)
        << " com_offset=" << fmt_vec3(l.com_offset) << "\n";
  }
  for (const auto& j : model.joints()) {
    out << "joint name=" << j.name << " type=" << j.type << " axis=" << fmt_vec3(j.axis)
        << " parent_link=" << j.parent_link << " child_link=" << j.child_link
        << " origin_translation=" << fmt_vec3(j.origin_translation)
        << " origin_rotation=" << fmt_mat3(j.origin_rotation)
        << " limit_min=" << fmt(j.limit_min_deg) << " limit_max=" << fmt(j.limit_max_deg) << "\n";
  }
  for (const auto& f : model.named_frames()) {
    out << "frame name=" << f.name << " parent_link=" << f.parent_link
        << " offset_translation=" << fmt_vec3(f.offset_translation)
        << " offset_rotation=" << fmt_mat3(f.offset_rotation) << "\n";
  }
}

}  // namespace walkgen
