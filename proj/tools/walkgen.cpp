#include <CLI11.hpp>

#include "walkgen/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ZMP walking pattern generation, inverse kinematics and analysis"};
  app.require_subcommand(1);

  walkgen::PipelineConfig config;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--params", config.params_path, "gait parameter file");
    cmd->add_option("--model", config.model_path, "robot model file");
    cmd->add_option("--out", config.output_directory, "output directory");
    cmd->add_flag("--svg", config.emit_svg, "emit SVG plots");
  };

  CLI::App* gen = app.add_subcommand("gen", "generate reference trajectories");
  add_common(gen);

  CLI::App* ik = app.add_subcommand("ik", "solve joint trajectories");
  add_common(ik);
  ik->add_option("--max-iterations", config.solver_options.max_iterations);
  ik->add_option("--residual-tolerance", config.solver_options.residual_tolerance);
  ik->add_option("--task-error-tolerance", config.task_error_tolerance);

  CLI::App* check = app.add_subcommand("check", "check ZMP against the support polygon");
  add_common(check);
  check->add_option("--ref", config.log_path, "reference or log CSV (default <out>/references.csv)");

  CLI::App* analyze = app.add_subcommand("analyze", "compute KPIs from an execution log");
  add_common(analyze);
  analyze->add_option("--log", config.log_path, "execution log CSV")->required();
  analyze->add_option("--meta", config.meta_path, "log metadata sidecar")->required();
  analyze->add_option("--scenario", config.scenario, "scenario label (level enables Froude)");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) return walkgen::cmd_gen(config);
  if (ik->parsed()) return walkgen::cmd_ik(config);
  if (check->parsed()) return walkgen::cmd_check(config);
  if (analyze->parsed()) return walkgen::cmd_analyze(config);
  return 2;
}
