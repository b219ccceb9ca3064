#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

namespace walkgen {

struct FramePose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Matrix3d orientation = Eigen::Matrix3d::Identity();

  FramePose compose(const FramePose& rhs) const {
    return {position + orientation * rhs.position, orientation * rhs.orientation};
  }
  FramePose inverse() const {
    return {-(orientation.transpose() * position), orientation.transpose()};
  }
};

struct Link {
  std::string name;
  double mass = 0.0;              // kg
  Eigen::Vector3d com_offset = Eigen::Vector3d::Zero();  // m, in link frame
};

struct Joint {
  std::string name;
  std::string type = "revolute";
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  std::string parent_link;
  std::string child_link;
  Eigen::Vector3d origin_translation = Eigen::Vector3d::Zero();
  Eigen::Matrix3d origin_rotation = Eigen::Matrix3d::Identity();
  double limit_min_deg = 0.0;  // file convention is degrees
  double limit_max_deg = 0.0;
  double limit_min = 0.0;      // rad, derived from limit_min_deg on load
  double limit_max = 0.0;
};

struct NamedFrame {
  std::string name;
  std::string parent_link;
  Eigen::Vector3d offset_translation = Eigen::Vector3d::Zero();
  Eigen::Matrix3d offset_rotation = Eigen::Matrix3d::Identity();
};

class RobotModel {
 public:
  RobotModel(std::vector<Link> links, std::vector<Joint> joints, std::string root_link,
             std::vector<NamedFrame> named_frames);

  int joint_count() const { return static_cast<int>(joints_.size()); }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Joint>& joints() const { return joints_; }
  const std::vector<NamedFrame>& named_frames() const { return named_frames_; }
  const std::string& root_link() const { return root_link_; }
  double total_mass() const { return total_mass_; }
  const Eigen::VectorXd& q_min() const { return q_min_; }
  const Eigen::VectorXd& q_max() const { return q_max_; }
  const std::vector<std::string>& joint_names() const { return joint_names_; }
  bool has_frame(const std::string& name) const;

  // World pose of a named frame or link frame. The optional base pose places
  // the root link in the world; identity when omitted.
  FramePose forward_kinematics(const Eigen::VectorXd& q, const std::string& frame) const;
  FramePose forward_kinematics(const Eigen::VectorXd& q, const std::string& frame,
                               const FramePose& base) const;

  // 6 x n: rows 0-2 linear, rows 3-5 angular velocity map, world frame.
  Eigen::MatrixXd frame_jacobian(const Eigen::VectorXd& q, const std::string& frame) const;

  Eigen::Vector3d whole_body_com(const Eigen::VectorXd& q) const;
  Eigen::Vector3d whole_body_com(const Eigen::VectorXd& q, const FramePose& base) const;

  // 3 x n mass-weighted CoM point Jacobian.
  Eigen::MatrixXd com_jacobian(const Eigen::VectorXd& q) const;

  bool operator==(const RobotModel& other) const;

 private:
  struct FrameRef {
    int link_index;   // link the frame is attached to
    bool has_offset;
    Eigen::Vector3d offset_translation;
    Eigen::Matrix3d offset_rotation;
  };

  void validate() const;
  void build_topology();
  // Poses of every link in the root frame, plus joint anchors/axes in root frame.
  void compute_link_poses(const Eigen::VectorXd& q, std::vector<FramePose>& link_poses,
                          std::vector<Eigen::Vector3d>& joint_anchor,
                          std::vector<Eigen::Vector3d>& joint_axis_world) const;
  FrameRef resolve_frame(const std::string& name) const;
  void check_q(const Eigen::VectorXd& q) const;

  std::vector<Link> links_;
  std::vector<Joint> joints_;
  std::string root_link_;
  std::vector<NamedFrame> named_frames_;

  double total_mass_ = 0.0;
  Eigen::VectorXd q_min_, q_max_;
  std::vector<std::string> joint_names_;
  std::map<std::string, int> link_index_;
  std::map<std::string, int> frame_index_;         // named frames
  std::vector<int> parent_joint_of_link_;          // -1 for root
  std::vector<int> topo_order_;                    // joint indices, parents first
  std::vector<std::vector<bool>> joints_on_path_;  // [link][joint]
};

RobotModel load_model(const std::string& path);
void save_model(const RobotModel& model, const std::string& path);

}  // namespace walkgen
