#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bhnls/scenarios.hpp"

namespace bhnls {

/// Plan text: key=value lines shared by all runs, "vary key = a, b, c" lines
/// (cartesian product over all of them) and optional "[run]" blocks whose
/// settings override the shared ones. Run directories are out_root/run_###.
struct SweepPlan {
  std::vector<ExperimentConfig> configs;
  std::vector<std::string> labels;
};

SweepPlan parse_plan(std::string_view text, const std::string& out_root);

struct SweepEntry {
  std::string label;
  ExperimentConfig config;
  bool ok = false;         // ran without an internal error
  std::string error;
  RunSummary summary;
  std::optional<RadialField> final_field;
};

/// Order fitted from a group of runs that differ in one parameter only.
struct OrderFit {
  std::string parameter;   // "dt" or "h"
  std::string quantity;    // what was fitted
  std::vector<std::string> labels;
  std::vector<double> steps;
  std::vector<double> values;
  double order = 0.0;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  std::vector<OrderFit> fits;
  int internal_errors = 0;
  int failed_checks = 0;
  int exit_code() const { return internal_errors || failed_checks ? 1 : 0; }
};

/// Runs every configuration (at most max_parallel at a time; 0 means the
/// hardware concurrency) and fits convergence orders.
SweepReport sweep(const std::vector<ExperimentConfig>& configs, const std::vector<std::string>& labels,
                  unsigned max_parallel = 0, bool write_files = true);

/// Temporal self-convergence: order from consecutive H^2 differences of the
/// final fields, log(e_0/e_1)/log(dt_0/dt_1) on the first three dt.
/// Spatial: least-squares slope of log(value) against log(h).
std::vector<OrderFit> fit_orders(const std::vector<SweepEntry>& entries);

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

void write_sweep_report(const SweepReport& report, const std::string& dir);

}  // namespace bhnls
