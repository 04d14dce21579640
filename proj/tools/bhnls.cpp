#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bhnls/scenarios.hpp"
#include "bhnls/sweep.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInternal = 3;

void print_summary(const bhnls::RunSummary& s, const std::string& out) {
  std::printf("scenario %s: %d steps, %.2f s%s\n", s.scenario.c_str(), s.steps, s.wall_clock_s, s.demo ? " (demo)" : "");
  if (s.guard_tripped) std::printf("  guard tripped: %s at t = %.6g\n", s.guard_reason.c_str(), s.guard_time);
  for (const auto& c : s.checks)
    std::printf("  [%s] C%d %-32s %.6g %s %.6g\n", c.passed ? "PASS" : "FAIL", c.criterion, c.id.c_str(), c.measured,
                c.relation.c_str(), c.threshold);
  std::printf("  output: %s\n", out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial fourth-order energy-critical NLS lab"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one scenario");
  std::string scenario, config_file, out_dir;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  run->add_option("--scenario", scenario, "Scenario name (else from --set or the config file)");
  run->add_option("--config", config_file, "key=value configuration file");
  run->add_option("--set", sets, "Override, key=value (repeatable)");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Random seed");

  auto* sw = app.add_subcommand("sweep", "Run a plan of configurations");
  std::string plan_file, sweep_out;
  unsigned jobs = 0;
  sw->add_option("--plan", plan_file, "Plan file")->required();
  sw->add_option("--out", sweep_out, "Output directory")->required();
  sw->add_option("--jobs", jobs, "Parallel runs (0 = hardware concurrency)");

  auto* list = app.add_subcommand("list", "List scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (list->parsed()) {
    for (auto s : bhnls::all_scenarios())
      std::printf("%s%s\n", bhnls::to_string(s).c_str(), bhnls::is_demo(s) ? " (demo)" : "");
    return 0;
  }

  if (run->parsed()) {
    bhnls::ExperimentConfig cfg;
    try {
      std::vector<std::string> overrides = sets;
      overrides.push_back("out=" + out_dir);
      if (seed) overrides.push_back("seed=" + std::to_string(*seed));
      const std::string text = config_file.empty() ? std::string() : bhnls::read_text_file(config_file);
      std::optional<bhnls::Scenario> chosen;
      if (!scenario.empty()) chosen = bhnls::scenario_from_string(scenario);
      cfg = bhnls::build_config(chosen, text, overrides);
    } catch (const bhnls::Error& e) {
      std::fprintf(stderr, "configuration error: %s\n", e.what());
      return kExitConfig;
    }
    try {
      const bhnls::RunSummary s = bhnls::run(cfg);
      print_summary(s, cfg.out_dir);
      return s.exit_code();
    } catch (const std::exception& e) {
      std::fprintf(stderr, "internal error: %s\n", e.what());
      return kExitInternal;
    }
  }

  bhnls::SweepPlan plan;
  try {
    plan = bhnls::parse_plan(bhnls::read_text_file(plan_file), sweep_out);
  } catch (const bhnls::Error& e) {
    std::fprintf(stderr, "plan error: %s\n", e.what());
    return kExitConfig;
  }
  try {
    const bhnls::SweepReport rep = bhnls::sweep(plan.configs, plan.labels, jobs);
    bhnls::write_sweep_report(rep, sweep_out);
    std::printf("%zu runs, %d internal errors, %d with failed checks\n", rep.entries.size(), rep.internal_errors,
                rep.failed_checks);
    for (const auto& e : rep.entries)
      if (!e.ok) std::printf("  %s: %s\n", e.label.c_str(), e.error.c_str());
    for (const auto& f : rep.fits)
      std::printf("  %s-order of %s: %.3f over %zu runs\n", f.parameter.c_str(), f.quantity.c_str(), f.order,
                  f.steps.size());
    return rep.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
}
