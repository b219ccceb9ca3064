// Benchmark of the OpenMP sampling kernels against their serial reference
// paths. Prints per-kernel timings and verifies that both paths agree.

#include <chrono>
#include <cmath>
#include <cstdio>

#include "walkgen/kpi.hpp"
#include "walkgen/pattern_gen.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int main() {
  walkgen::GaitParameters params;
  params.ts = 0.001;  // fine grid so the kernels have real work to do
  params.n_strides = 12;
  params.z_c_offset = 0.015;
  params.validate();

  const walkgen::FootstepPlan plan = walkgen::generate_footsteps(params);
  const Eigen::VectorXd times = walkgen::sample_times(plan.total_time, params.ts);
  std::printf("grid: %ld samples, %.1f s of walking\n", static_cast<long>(times.size()),
              plan.total_time);

  constexpr int kRepeats = 5;

  {
    auto t0 = Clock::now();
    walkgen::FootTrajectories serial;
    for (int r = 0; r < kRepeats; ++r) {
      serial = walkgen::generate_foot_trajectories(plan, params, times, /*parallel=*/false);
    }
    const double t_serial = seconds_since(t0) / kRepeats;

    t0 = Clock::now();
    walkgen::FootTrajectories parallel;
    for (int r = 0; r < kRepeats; ++r) {
      parallel = walkgen::generate_foot_trajectories(plan, params, times, /*parallel=*/true);
    }
    const double t_parallel = seconds_since(t0) / kRepeats;

    double max_diff = 0.0;
    for (size_t i = 0; i < serial.left.size(); ++i) {
      max_diff = std::max(max_diff,
                          (serial.left[i].position - parallel.left[i].position).norm());
      max_diff = std::max(max_diff,
                          (serial.right[i].position - parallel.right[i].position).norm());
    }
    std::printf("foot trajectories: serial %8.3f ms, parallel %8.3f ms, speedup %.2fx, "
                "max diff %g\n",
                1e3 * t_serial, 1e3 * t_parallel, t_serial / t_parallel, max_diff);
    if (max_diff != 0.0) return 1;
  }

  {
    const Eigen::MatrixX2d zmp = walkgen::generate_zmp_reference(plan, params);

    auto t0 = Clock::now();
    walkgen::StabilityReport serial;
    for (int r = 0; r < kRepeats; ++r) {
      serial = walkgen::stability_check(zmp, times, plan, walkgen::kFootLength,
                                        walkgen::kFootWidth, 0.0, /*parallel=*/false);
    }
    const double t_serial = seconds_since(t0) / kRepeats;

    t0 = Clock::now();
    walkgen::StabilityReport parallel;
    for (int r = 0; r < kRepeats; ++r) {
      parallel = walkgen::stability_check(zmp, times, plan, walkgen::kFootLength,
                                          walkgen::kFootWidth, 0.0, /*parallel=*/true);
    }
    const double t_parallel = seconds_since(t0) / kRepeats;

    double max_diff = 0.0;
    for (size_t i = 0; i < serial.margins.size(); ++i) {
      max_diff = std::max(max_diff, std::abs(serial.margins[i] - parallel.margins[i]));
    }
    std::printf("stability check:   serial %8.3f ms, parallel %8.3f ms, speedup %.2fx, "
                "max diff %g\n",
                1e3 * t_serial, 1e3 * t_parallel, t_serial / t_parallel, max_diff);
    if (max_diff != 0.0) return 1;
  }

  return 0;
}
