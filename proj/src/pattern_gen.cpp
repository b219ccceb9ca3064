#include "walkgen/pattern_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "walkgen/tridiag.hpp"

namespace walkgen {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Signed slope inclination: the `type` carries the direction, `theta` the magnitude.
double signed_theta_deg(const GaitParameters& p) {
  switch (p.type) {
    case GaitType::slope_up: return std::abs(p.theta);
    case GaitType::slope_down: return -std::abs(p.theta);
    default: return 0.0;
  }
}

}  // namespace

std::string to_string(GaitType type) {
  switch (type) {
    case GaitType::level: return "level";
    case GaitType::slope_up: return "slope_up";
    case GaitType::slope_down: return "slope_down";
    case GaitType::stairs_up: return "stairs_up";
  }
  return "?";
}

GaitType gait_type_from_string(const std::string& s) {
  if (s == "level") return GaitType::level;
  if (s == "slope_up") return GaitType::slope_up;
  if (s == "slope_down") return GaitType::slope_down;
  if (s == "stairs_up") return GaitType::stairs_up;
  throw std::runtime_error("unknown type '" + s + "'");
}

void GaitParameters::validate() const {
  if (!(ts > 0.0)) throw std::runtime_error("params: ts must be positive");
  if (!(T_switch > 0.0)) throw std::runtime_error("params: T_switch must be positive");
  if (!(T_stride > T_switch)) throw std::runtime_error("params: T_stride must exceed T_switch");
  if (n_strides < 1) throw std::runtime_error("params: n_strides must be at least 1");
  if (!(swing_time() > 0.0)) throw std::runtime_error("params: single-support duration must be positive");
  if (!(z_c > 0.0)) throw std::runtime_error("params: z_c must be positive");
  if (!(z_c + z_c_offset > 0.0)) throw std::runtime_error("params: z_c + z_c_offset must be positive");
  if (step_height < 0.0) throw std::runtime_error("params: step_height must be non-negative");
  if (!(step_width > 0.0)) throw std::runtime_error("params: step_width must be positive");
}

GaitParameters load_parameters(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open parameter file '" + path + "'");
  GaitParameters p;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::stringstream ss(line);
    std::string name, eq, value;
    ss >> name >> eq >> value;
    if (eq != "=" || value.empty()) {
      throw std::runtime_error("parameter file line " + std::to_string(lineno) +
                               ": expected 'name = value'");
    }
    auto num = [&]() {
      size_t pos = 0;
      double v = std::stod(value, &pos);
      if (pos != value.size()) {
        throw std::runtime_error("parameter file line " + std::to_string(lineno) +
                                 ": bad number '" + value + "'");
      }
      return v;
    };
    if (name == "ts") p.ts = num();
    else if (name == "z_c") p.z_c = num();
    else if (name == "z_c_offset") p.z_c_offset = num();
    else if (name == "n_strides") p.n_strides = static_cast<int>(num());
    else if (name == "T_stride") p.T_stride = num();
    else if (name == "T_switch") p.T_switch = num();
    else if (name == "step_width") p.step_width = num();
    else if (name == "step_length") p.step_length = num();
    else if (name == "theta") p.theta = num();
    else if (name == "stair_length") p.stair_length = num();
    else if (name == "stair_height") p.stair_height = num();
    else if (name == "right_step_first") p.right_step_first = (value == "true" || value == "1");
    else if (name == "type") p.type = gait_type_from_string(value);
    else if (name == "step_height") p.step_height = num();
    else {
      throw std::runtime_error("parameter file line " + std::to_string(lineno) +
                               ": unknown key '" + name + "'");
    }
  }
  p.validate();
  return p;
}

void save_parameters(const GaitParameters& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write parameter file '" + path + "'");
  char buf[64];
  auto w = [&](const char* name, double v) {
    std::snprintf(buf, sizeof(buf), "%s = %.17g\n", name, v);
    out << buf;
  };
  w("ts", p.ts);
  w("z_c", p.z_c);
  w("z_c_offset", p.z_c_offset);
  out << "n_strides = " << p.n_strides << "\n";
  w("T_stride", p.T_stride);
  w("T_switch", p.T_switch);
  w("step_width", p.step_width);
  w("step_length", p.step_length);
  w("theta", p.theta);
  w("stair_length", p.stair_length);
  w("stair_height", p.stair_height);
  out << "right_step_first = " << (p.right_step_first ? "true" : "false") << "\n";
  out << "type = " << to_string(p.type) << "\n";
  w("step_height", p.step_height);
}

// ---------------------------------------------------------------------------
// Footstep plan
//
// Phase layout over one trial of n strides (2n swings in total):
//   lead-in DS (T_switch/4) | SS | DS (T_switch/2) | SS | ... | SS | lead-out DS (T_switch/4)
// which partitions [0, n*T_stride] with every swing lasting (T_stride-T_switch)/2.
// The final swing realigns the feet.

FootstepPlan generate_footsteps(const GaitParameters& params) {
  params.validate();
  const int n_swings = 2 * params.n_strides;
  const double t_swing = params.swing_time();
  const double ds_mid = params.T_switch / 2.0;
  const double ds_edge = params.T_switch / 4.0;
  const double total = params.total_time();
  const double theta_rad = signed_theta_deg(params) * kDegToRad;
  const bool stairs = params.type == GaitType::stairs_up;
  const bool slope = params.type == GaitType::slope_up || params.type == GaitType::slope_down;
  // Stairs advance stair_length per swing relative to the foot's previous
  // hold, which is one half stair_length ahead of the stance foot.
  const double advance = stairs ? params.stair_length / 2.0 : params.step_length;
  const double pitch = slope ? theta_rad : 0.0;

  auto terrain_z = [&](double x) { return slope ? x * std::tan(theta_rad) : 0.0; };

  FootstepPlan plan;
  plan.total_time = total;

  const double half_w = params.step_width / 2.0;
  Foothold left{Side::left, {0.0, half_w, terrain_z(0.0)}, pitch, 0.0, total};
  Foothold right{Side::right, {0.0, -half_w, terrain_z(0.0)}, pitch, 0.0, total};
  plan.footholds = {left, right};
  // Index of each foot's current hold inside plan.footholds.
  int current[2] = {0, 1};

  Side swing_side = params.right_step_first ? Side::right : Side::left;
  double t = ds_edge;
  plan.support_timeline.push_back({0.0, t, SupportPhase::double_support});

  for (int j = 0; j < n_swings; ++j) {
    const double t0 = t;
    const double t1 = t0 + t_swing;
    const Side stance_side = other_side(swing_side);
    const int swing_i = swing_side == Side::left ? 0 : 1;
    const int stance_i = stance_side == Side::left ? 0 : 1;
    Foothold& prev = plan.footholds[current[swing_i]];
    const Foothold& stance = plan.footholds[current[stance_i]];
    prev.liftoff_time = t0;

    const bool last = (j == n_swings - 1);
    Foothold next;
    next.side = swing_side;
    next.position.x() = stance.position.x() + (last ? 0.0 : advance);
    next.position.y() = prev.position.y();
    if (stairs) {
      next.position.z() = stance.position.z() + (last ? 0.0 : params.stair_height);
    } else {
      next.position.z() = terrain_z(next.position.x());
    }
    next.pitch = pitch;
    next.touchdown_time = t1;
    next.liftoff_time = total;
    plan.footholds.push_back(next);
    current[swing_i] = static_cast<int>(plan.footholds.size()) - 1;

    plan.support_timeline.push_back(
        {t0, t1, stance_side == Side::left ? SupportPhase::single_left : SupportPhase::single_right});
    t = t1;
    if (!last) {
      plan.support_timeline.push_back({t, t + ds_mid, SupportPhase::double_support});
      t += ds_mid;
    }
    swing_side = other_side(swing_side);
  }
  plan.support_timeline.push_back({t, total, SupportPhase::double_support});
  return plan;
}

namespace {

struct FootholdTrack {
  std::vector<const Foothold*> holds;  // in touchdown order
};

FootholdTrack track_for(const FootstepPlan& plan, Side side) {
  FootholdTrack tr;
  for (const auto& h : plan.footholds) {
    if (h.side == side) tr.holds.push_back(&h);
  }
  return tr;
}

// Current hold of a foot at time t; sets *swinging and *next when mid-swing.
const Foothold* hold_at(const FootholdTrack& tr, double t, bool* swinging,
                        const Foothold** next_hold) {
  *swinging = false;
  *next_hold = nullptr;
  for (size_t k = 0; k < tr.holds.size(); ++k) {
    const Foothold* h = tr.holds[k];
    if (t <= h->liftoff_time || k + 1 == tr.holds.size()) {
      if (t <= h->liftoff_time) return h;
      return h;
    }
    const Foothold* nxt = tr.holds[k + 1];
    if (t < nxt->touchdown_time) {
      *swinging = true;
      *next_hold = nxt;
      return h;
    }
  }
  return tr.holds.back();
}

}  // namespace

std::vector<const Foothold*> active_footholds(const FootstepPlan& plan, double t) {
  std::vector<const Foothold*> out;
  for (Side side : {Side::left, Side::right}) {
    const FootholdTrack tr = track_for(plan, side);
    bool swinging = false;
    const Foothold* nxt = nullptr;
    const Foothold* h = hold_at(tr, t, &swinging, &nxt);
    if (!swinging) out.push_back(h);
  }
  return out;
}

// ---------------------------------------------------------------------------
// ZMP reference

namespace {

struct ZmpSegment {
  double t0, t1;
  Eigen::Vector2d p0, p1;  // cubic blend p0 -> p1; constant when equal
};

std::vector<ZmpSegment> build_zmp_segments(const FootstepPlan& plan) {
  std::vector<ZmpSegment> segs;
  const auto& tl = plan.support_timeline;
  auto stance_center = [&](const SupportInterval& iv) -> Eigen::Vector2d {
    const Side stance = iv.phase == SupportPhase::single_left ? Side::left : Side::right;
    // the stance foot is the one not swinging; find its hold covering the interval
    for (const auto& h : plan.footholds) {
      if (h.side != stance) continue;
      if (h.touchdown_time <= iv.t0 + 1e-12 && h.liftoff_time >= iv.t1 - 1e-12) {
        return h.position.head<2>();
      }
    }
    throw std::logic_error("zmp reference: no stance hold covers a single-support interval");
  };
  auto midfeet = [&](double t) -> Eigen::Vector2d {
    const auto active = active_footholds(plan, t);
    Eigen::Vector2d acc = Eigen::Vector2d::Zero();
    for (const auto* h : active) acc += h->position.head<2>();
    return acc / static_cast<double>(active.size());
  };

  for (size_t i = 0; i < tl.size(); ++i) {
    const SupportInterval& iv = tl[i];
    ZmpSegment s{iv.t0, iv.t1, {}, {}};
    if (iv.phase != SupportPhase::double_support) {
      s.p0 = s.p1 = stance_center(iv);
    } else if (i == 0) {
      // lead-in: from the initial mid-feet point to the first stance center
      s.p0 = midfeet(iv.t0);
      s.p1 = stance_center(tl[i + 1]);
    } else if (i + 1 == tl.size()) {
      // lead-out: from the last stance center to the final mid-feet point
      s.p0 = stance_center(tl[i - 1]);
      s.p1 = midfeet(iv.t1);
    } else {
      s.p0 = stance_center(tl[i - 1]);
      s.p1 = stance_center(tl[i + 1]);
    }
    segs.push_back(s);
  }
  return segs;
}

Eigen::Vector2d zmp_at(const std::vector<ZmpSegment>& segs, double t) {
  const ZmpSegment* seg = &segs.back();
  for (const auto& s : segs) {
    if (t < s.t1) { seg = &s; break; }
  }
  if (seg->p0 == seg->p1) return seg->p0;
  const double s = std::clamp((t - seg->t0) / (seg->t1 - seg->t0), 0.0, 1.0);
  return seg->p0 + (seg->p1 - seg->p0) * smoothstep_cubic(s);
}

}  // namespace

Eigen::VectorXd sample_times(double total_time, double ts) {
  const Eigen::Index n = static_cast<Eigen::Index>(std::llround(total_time / ts)) + 1;
  Eigen::VectorXd t(n);
  for (Eigen::Index k = 0; k < n; ++k) t[k] = k * ts;
  return t;
}

Eigen::MatrixX2d generate_zmp_reference(const FootstepPlan& plan, const GaitParameters& params) {
  const auto segs = build_zmp_segments(plan);
  const Eigen::VectorXd times = sample_times(plan.total_time, params.ts);
  Eigen::MatrixX2d zmp(times.size(), 2);
#ifdef WALKGEN_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    zmp.row(k) = zmp_at(segs, std::min(times[k], plan.total_time)).transpose();
  }
  return zmp;
}

// ---------------------------------------------------------------------------
// CoM height profile

ComHeightProfile generate_com_height(const GaitParameters& params, const FootstepPlan& plan) {
  const auto& tl = plan.support_timeline;

  // terrain height under the mid-feet point (ground projection of the holds;
  // a swinging foot counts at the midpoint of its liftoff/touchdown holds)
  auto terrain_mid = [&](double t) {
    double acc = 0.0;
    for (Side side : {Side::left, Side::right}) {
      const FootholdTrack tr = track_for(plan, side);
      bool swinging = false;
      const Foothold* nxt = nullptr;
      const Foothold* h = hold_at(tr, t, &swinging, &nxt);
      acc += swinging ? 0.5 * (h->position.z() + nxt->position.z()) : h->position.z();
    }
    return acc / 2.0;
  };

  std::vector<double> kt, kz;
  kt.push_back(0.0);
  kz.push_back(params.z_c + terrain_mid(0.0));
  for (const auto& iv : tl) {
    const double mid = 0.5 * (iv.t0 + iv.t1);
    const double offset = iv.phase == SupportPhase::double_support ? 0.0 : params.z_c_offset;
    kt.push_back(mid);
    kz.push_back(params.z_c + terrain_mid(mid) + offset);
  }
  kt.push_back(plan.total_time);
  kz.push_back(params.z_c + terrain_mid(plan.total_time));

  const Eigen::Map<const Eigen::VectorXd> t_map(kt.data(), static_cast<Eigen::Index>(kt.size()));
  const Eigen::Map<const Eigen::VectorXd> z_map(kz.data(), static_cast<Eigen::Index>(kz.size()));
  ComHeightProfile profile;
  profile.spline = CubicSpline(t_map, z_map);

  const Eigen::VectorXd times = sample_times(plan.total_time, params.ts);
  const Eigen::Index n = times.size();
  profile.z.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    profile.z[k] = profile.spline.eval(std::min(times[k], plan.total_time));
  }
  profile.z_ddot.resize(n);
  const double ts2 = params.ts * params.ts;
  for (Eigen::Index k = 1; k + 1 < n; ++k) {
    profile.z_ddot[k] = (profile.z[k - 1] - 2.0 * profile.z[k] + profile.z[k + 1]) / ts2;
  }
  if (n >= 3) {
    profile.z_ddot[0] = profile.z_ddot[1];
    profile.z_ddot[n - 1] = profile.z_ddot[n - 2];
  } else {
    profile.z_ddot.setZero();
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (profile.z_ddot[k] + kGravity <= 0.0) {
      throw std::runtime_error("free-fall profile: z_ddot + g <= 0 at sample " + std::to_string(k));
    }
  }
  return profile;
}

// ---------------------------------------------------------------------------
// CoM horizontal solve

ZmpSystem assemble_zmp_system(const Eigen::VectorXd& z, const Eigen::VectorXd& z_ddot, double g,
                              double ts) {
  const Eigen::Index n = z.size();
  if (n < 3) throw std::invalid_argument("zmp system: need at least 3 samples");
  if (z_ddot.size() != n) throw std::invalid_argument("zmp system: z and z_ddot length mismatch");
  const double ts2 = ts * ts;
  ZmpSystem sys;
  sys.lower.resize(n);
  sys.diag.resize(n);
  sys.upper.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double denom = z_ddot[i] + g;
    if (denom <= 0.0) {
      throw std::runtime_error("zmp system: z_ddot + g <= 0 at sample " + std::to_string(i));
    }
    const double a = -z[i] / (denom * ts2);
    const double b = 1.0 - 2.0 * a;
    sys.lower[i] = a;
    sys.diag[i] = b;
    sys.upper[i] = a;
    // strict diagonal dominance, guaranteed since a < 0 when z > 0
    if (std::abs(b) < std::abs(a) * 2.0 + 1.0 - 1e-12) {
      throw std::logic_error("zmp system: diagonal dominance violated at row " + std::to_string(i));
    }
  }
  // zero-boundary-velocity convention: merge the out-of-range neighbors
  sys.diag[0] += sys.lower[0];
  sys.diag[n - 1] += sys.upper[n - 1];
  return sys;
}

Eigen::MatrixX2d solve_com_xy(const Eigen::MatrixX2d& zmp_d, const Eigen::VectorXd& z,
                              const Eigen::VectorXd& z_ddot, double g, double ts) {
  if (zmp_d.rows() != z.size()) {
    throw std::invalid_argument("solve_com_xy: zmp_d and z length mismatch");
  }
  const ZmpSystem sys = assemble_zmp_system(z, z_ddot, g, ts);
  Eigen::MatrixX2d com(zmp_d.rows(), 2);
#ifdef WALKGEN_HAVE_OPENMP
#pragma omp parallel for num_threads(2)
#endif
  for (int c = 0; c < 2; ++c) {
    com.col(c) = solve_tridiagonal(sys.lower, sys.diag, sys.upper, zmp_d.col(c));
  }
  return com;
}

// ---------------------------------------------------------------------------
// Foot trajectories

FootPoseSample foot_pose_at(const FootstepPlan& plan, const GaitParameters& params, Side side,
                            double t) {
  const FootholdTrack tr = track_for(plan, side);
  bool swinging = false;
  const Foothold* nxt = nullptr;
  const Foothold* h = hold_at(tr, std::clamp(t, 0.0, plan.total_time), &swinging, &nxt);
  if (!swinging) {
    return {h->position, h->pitch};
  }
  const double t0 = h->liftoff_time;
  const double t1 = nxt->touchdown_time;
  const double s = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
  const double blend = smoothstep_cubic(s);
  FootPoseSample out;
  out.position.x() = h->position.x() + (nxt->position.x() - h->position.x()) * blend;
  out.position.y() = h->position.y() + (nxt->position.y() - h->position.y()) * blend;
  // clearance bump: cubic up to the apex at mid-swing, cubic down
  const double z0 = h->position.z();
  const double z1 = nxt->position.z();
  const double z_apex = std::max(z0, z1) + params.step_height;
  if (s <= 0.5) {
    out.position.z() = z0 + (z_apex - z0) * smoothstep_cubic(2.0 * s);
  } else {
    out.position.z() = z1 + (z_apex - z1) * smoothstep_cubic(2.0 * (1.0 - s));
  }
  out.pitch = h->pitch + (nxt->pitch - h->pitch) * s;
  return out;
}

FootTrajectories generate_foot_trajectories(const FootstepPlan& plan, const GaitParameters& params,
                                            const Eigen::VectorXd& times, bool parallel) {
  FootTrajectories out;
  const Eigen::Index n = times.size();
  out.left.resize(n);
  out.right.resize(n);
#ifdef WALKGEN_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (Eigen::Index k = 0; k < n; ++k) {
    out.left[k] = foot_pose_at(plan, params, Side::left, times[k]);
    out.right[k] = foot_pose_at(plan, params, Side::right, times[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Support polygon

namespace {

std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) { return a == b; }),
            pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  const size_t lower = k + 1;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);  // CCW, last point == first point removed
  return hull;
}

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

}  // namespace

double hull_signed_margin(const std::vector<Eigen::Vector2d>& hull, const Eigen::Vector2d& p) {
  if (hull.empty()) return -std::numeric_limits<double>::infinity();
  if (hull.size() < 3) {
    double d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < hull.size(); ++i) {
      d = std::min(d, point_segment_distance(p, hull[i], hull[i + 1]));
    }
    if (hull.size() == 1) d = (p - hull[0]).norm();
    return -d;
  }
  double min_edge = std::numeric_limits<double>::infinity();
  bool inside = true;
  for (size_t i = 0; i < hull.size(); ++i) {
    const Eigen::Vector2d& a = hull[i];
    const Eigen::Vector2d& b = hull[(i + 1) % hull.size()];
    const Eigen::Vector2d e = b - a;
    const double cross = e.x() * (p.y() - a.y()) - e.y() * (p.x() - a.x());
    const double d = cross / e.norm();  // signed, positive inside for CCW hull
    if (d < 0.0) inside = false;
    min_edge = std::min(min_edge, d);
  }
  if (inside) return min_edge;
  double dist = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < hull.size(); ++i) {
    dist = std::min(dist, point_segment_distance(p, hull[i], hull[(i + 1) % hull.size()]));
  }
  return -dist;
}

std::vector<Eigen::Vector2d> foothold_corners(const Foothold& h, double foot_length,
                                              double foot_width) {
  // ground projection; pitched feet foreshorten along x
  const double hx = 0.5 * foot_length * std::cos(h.pitch);
  const double hy = 0.5 * foot_width;
  const double x = h.position.x();
  const double y = h.position.y();
  return {{x - hx, y - hy}, {x - hx, y + hy}, {x + hx, y - hy}, {x + hx, y + hy}};
}

double support_polygon_margin(const FootstepPlan& plan, double t, const Eigen::Vector2d& p,
                              double foot_length, double foot_width) {
  std::vector<Eigen::Vector2d> corners;
  for (const auto* h : active_footholds(plan, t)) {
    const auto c = foothold_corners(*h, foot_length, foot_width);
    corners.insert(corners.end(), c.begin(), c.end());
  }
  return hull_signed_margin(convex_hull(std::move(corners)), p);
}

// ---------------------------------------------------------------------------

ReferenceTrajectories generate_references(const GaitParameters& params) {
  params.validate();
  const FootstepPlan plan = generate_footsteps(params);
  const Eigen::VectorXd times = sample_times(plan.total_time, params.ts);
  const Eigen::MatrixX2d zmp = generate_zmp_reference(plan, params);
  const ComHeightProfile height = generate_com_height(params, plan);
  const Eigen::MatrixX2d com_xy = solve_com_xy(zmp, height.z, height.z_ddot, kGravity, params.ts);
  const FootTrajectories feet = generate_foot_trajectories(plan, params, times);

  ReferenceTrajectories refs;
  refs.times = times;
  refs.ts = params.ts;
  refs.zmp_d = zmp;
  refs.com_d.resize(times.size(), 3);
  refs.com_d.leftCols<2>() = com_xy;
  refs.com_d.col(2) = height.z;
  refs.left_foot = feet.left;
  refs.right_foot = feet.right;

  for (Eigen::Index k = 0; k < times.size(); ++k) {
    const double t = std::min(times[k], plan.total_time);
    const double margin = support_polygon_margin(plan, t, zmp.row(k).transpose());
    if (margin < kZmpMargin) {
      throw std::runtime_error("zmp reference leaves the support polygon margin at t = " +
                               std::to_string(times[k]));
    }
  }
  return refs;
}

}  // namespace walkgen
