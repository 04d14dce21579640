#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "bhnls/diagnostics.hpp"

namespace bhnls {

inline constexpr const char* kSummarySchema = "bhnls.run_summary/1";

struct CheckResult {
  std::string id;         // e.g. "energy_drift"
  int criterion = 0;      // acceptance criterion number
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation;   // "<=", ">=", "in"
  std::string note;
};

struct RunSummary {
  std::string scenario;
  bool demo = false;
  nlohmann::ordered_json config;
  std::vector<CheckResult> checks;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  std::vector<std::string> files;
  double wall_clock_s = 0.0;
  int steps = 0;
  bool guard_tripped = false;
  std::string guard_reason;
  double guard_time = 0.0;

  bool all_passed() const;
  /// 0, or 1 for an acceptance scenario with a red check or a tripped guard.
  int exit_code() const;
};

nlohmann::ordered_json to_json(const RunSummary& s);

/// %.17g, with nan/inf spelled out.
std::string format_number(double x);

struct Column {
  std::string name;
  std::vector<double> values;
};

/// t, mass, kinetic, potential, energy, S_accum, M_R@R..., z_R@R..., N_t,
/// tail@R..., then the extra columns (which must have one value per record).
void write_timeseries_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records,
                          const std::vector<double>& radii, const std::vector<Column>& extras = {});
void write_table_csv(const std::string& path, const std::vector<Column>& columns);
void write_json(const std::string& path, const nlohmann::ordered_json& j);

struct Series {
  std::string name;
  std::vector<double> y;
};

/// Plain SVG line chart. Non-finite points (and non-positive ones on a log
/// axis) are skipped.
void write_svg_plot(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::vector<double>& x, const std::vector<Series>& series, bool log_y = false);

}  // namespace bhnls
