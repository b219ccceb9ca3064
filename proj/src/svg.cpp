#include "walkgen/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace walkgen {

namespace {

struct Mapper {
  double x0, x1, y0, y1;      // data range
  double w, h, pad;           // canvas
  double px(double x) const { return pad + (x - x0) / (x1 - x0) * (w - 2 * pad); }
  double py(double y) const { return h - pad - (y - y0) / (y1 - y0) * (h - 2 * pad); }
};

void polyline(std::ofstream& out, const Mapper& m, const Eigen::VectorXd& x,
              const Eigen::VectorXd& y, const char* color) {
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    out << m.px(x[k]) << "," << m.py(y[k]) << " ";
  }
  out << "\"/>\n";
}

}  // namespace

void write_pattern_svg(const std::string& path, const FootstepPlan& plan,
                       const ReferenceTrajectories& refs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write svg '" + path + "'");

  double x0 = 1e30, x1 = -1e30, y0 = 1e30, y1 = -1e30;
  for (const auto& h : plan.footholds) {
    x0 = std::min(x0, h.position.x() - 0.15);
    x1 = std::max(x1, h.position.x() + 0.15);
    y0 = std::min(y0, h.position.y() - 0.12);
    y1 = std::max(y1, h.position.y() + 0.12);
  }
  Mapper m{x0, x1, y0, y1, 800, 400, 20};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << m.w << "\" height=\"" << m.h
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& h : plan.footholds) {
    const double hx = 0.5 * kFootLength * std::cos(h.pitch);
    const double hy = 0.5 * kFootWidth;
    out << "<rect x=\"" << m.px(h.position.x() - hx) << "\" y=\"" << m.py(h.position.y() + hy)
        << "\" width=\"" << (m.px(h.position.x() + hx) - m.px(h.position.x() - hx))
        << "\" height=\"" << (m.py(h.position.y() - hy) - m.py(h.position.y() + hy))
        << "\" fill=\"none\" stroke=\"" << (h.side == Side::left ? "#2060c0" : "#c04020")
        << "\"/>\n";
  }
  polyline(out, m, refs.zmp_d.col(0), refs.zmp_d.col(1), "#109010");
  polyline(out, m, refs.com_d.col(0), refs.com_d.col(1), "#909");
  out << "</svg>\n";
}

void write_timeseries_svg(const std::string& path, const ReferenceTrajectories& refs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write svg '" + path + "'");

  const double t0 = refs.times[0];
  const double t1 = refs.times[refs.times.size() - 1];
  double y0 = 1e30, y1 = -1e30;
  auto widen = [&](const Eigen::VectorXd& v) {
    y0 = std::min(y0, v.minCoeff());
    y1 = std::max(y1, v.maxCoeff());
  };
  widen(refs.zmp_d.col(0));
  widen(refs.zmp_d.col(1));
  widen(refs.com_d.col(0));
  widen(refs.com_d.col(1));
  widen(refs.com_d.col(2));
  if (y1 - y0 < 1e-9) y1 = y0 + 1.0;
  Mapper m{t0, t1, y0, y1, 800, 400, 20};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << m.w << "\" height=\"" << m.h
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  polyline(out, m, refs.times, refs.zmp_d.col(0), "#109010");
  polyline(out, m, refs.times, refs.zmp_d.col(1), "#70c070");
  polyline(out, m, refs.times, refs.com_d.col(0), "#909");
  polyline(out, m, refs.times, refs.com_d.col(1), "#c8c");
  polyline(out, m, refs.times, refs.com_d.col(2), "#555");
  out << "</svg>\n";
}

}  // namespace walkgen
