#include "bhnls/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <map>
#include <thread>

namespace bhnls {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

using Settings = std::vector<std::pair<std::string, std::string>>;

std::vector<std::string> split_values(std::string_view v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = v.find(',', start);
    const auto piece = trim(v.substr(start, comma == std::string_view::npos ? v.npos : comma - start));
    if (!piece.empty()) out.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

SweepPlan parse_plan(std::string_view text, const std::string& out_root) {
  Settings common;
  std::vector<std::pair<std::string, std::vector<std::string>>> vary;
  std::vector<Settings> blocks;
  bool in_block = false;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line == "[run]") {
      blocks.emplace_back();
      in_block = true;
      continue;
    }
    if (line.substr(0, 5) == "vary ") {
      if (in_block) throw Error(ErrorKind::ConfigParse, "'vary' lines must precede the [run] blocks");
      auto [k, v] = split_assignment(line.substr(5));
      auto values = split_values(v);
      if (values.empty()) throw Error(ErrorKind::ConfigParse, "'vary " + k + "' has no values");
      vary.emplace_back(k, std::move(values));
      continue;
    }
    (in_block ? blocks.back() : common).push_back(split_assignment(line));
  }
  if (common.empty() && vary.empty() && blocks.empty()) return {};
  if (blocks.empty()) blocks.emplace_back();

  std::vector<Settings> combos{{}};
  for (const auto& [k, values] : vary) {
    std::vector<Settings> next;
    for (const auto& c : combos)
      for (const auto& v : values) {
        Settings s = c;
        s.emplace_back(k, v);
        next.push_back(std::move(s));
      }
    combos = std::move(next);
  }

  SweepPlan plan;
  for (const auto& block : blocks)
    for (const auto& combo : combos) {
      std::vector<std::string> overrides;
      for (const Settings* part : std::initializer_list<const Settings*>{&common, &block, &combo})
        for (const auto& [k, v] : *part) overrides.push_back(k + "=" + v);
      char label[32];
      std::snprintf(label, sizeof label, "run_%03zu", plan.configs.size());
      overrides.push_back("out=" + (fs::path(out_root) / label).string());
      plan.configs.push_back(build_config(std::nullopt, "", overrides));
      plan.labels.emplace_back(label);
    }
  return plan;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
  const double den = n * sxx - sx * sx;
  return den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
}

namespace {

std::string group_key(const ExperimentConfig& c, const char* drop) {
  nlohmann::ordered_json j = echo(c);
  j.erase("out");
  j.erase(drop);
  return j.dump();
}

}  // namespace

std::vector<OrderFit> fit_orders(const std::vector<SweepEntry>& entries) {
  std::vector<OrderFit> fits;

  std::map<std::string, std::vector<const SweepEntry*>> by_dt, by_n;
  for (const auto& e : entries) {
    if (!e.ok) continue;
    by_dt[group_key(e.config, "dt")].push_back(&e);
    by_n[group_key(e.config, "n")].push_back(&e);
  }

  for (auto& [key, group] : by_dt) {
    if (group.size() < 3) continue;
    std::sort(group.begin(), group.end(), [](auto* a, auto* b) { return a->config.dt > b->config.dt; });
    if (!std::all_of(group.begin(), group.end(), [](auto* e) { return e->final_field.has_value(); })) continue;
    OrderFit f;
    f.parameter = "dt";
    f.quantity = "H2 self-difference of final fields";
    const RadialOperators ops(group.front()->final_field->grid());
    for (std::size_t i = 0; i + 1 < group.size(); ++i) {
      f.labels.push_back(group[i]->label);
      f.steps.push_back(group[i]->config.dt);
      f.values.push_back(h2_distance(*group[i]->final_field, *group[i + 1]->final_field, ops));
    }
    f.order = std::log(f.values[0] / f.values[1]) / std::log(f.steps[0] / f.steps[1]);
    fits.push_back(std::move(f));
  }

  for (auto& [key, group] : by_n) {
    if (group.size() < 3) continue;
    std::sort(group.begin(), group.end(), [](auto* a, auto* b) { return a->config.n < b->config.n; });
    for (const char* quantity : {"elliptic_residual", "h2_deviation_sup"}) {
      if (!std::all_of(group.begin(), group.end(), [&](auto* e) { return e->summary.metrics.contains(quantity); }))
        continue;
      OrderFit f;
      f.parameter = "h";
      f.quantity = quantity;
      std::vector<double> lx, ly;
      for (auto* e : group) {
        const double h = e->config.r_max / (e->config.n + 1);
        const double v = e->summary.metrics[quantity].get<double>();
        f.labels.push_back(e->label);
        f.steps.push_back(h);
        f.values.push_back(v);
        lx.push_back(std::log(h));
        ly.push_back(std::log(v));
      }
      f.order = least_squares_slope(lx, ly);
      fits.push_back(std::move(f));
    }
  }
  return fits;
}

SweepReport sweep(const std::vector<ExperimentConfig>& configs, const std::vector<std::string>& labels,
                  unsigned max_parallel, bool write_files) {
  if (labels.size() != configs.size()) throw Error(ErrorKind::InvalidParameter, "one label per configuration");
  SweepReport report;
  report.entries.resize(configs.size());
  if (max_parallel == 0) max_parallel = std::max(1u, std::thread::hardware_concurrency());

  auto one = [&](std::size_t i) {
    SweepEntry e;
    e.label = labels[i];
    e.config = configs[i];
    try {
      RunOutput out = run_scenario(configs[i], write_files);
      e.summary = std::move(out.summary);
      if (!out.fields.empty()) e.final_field = out.fields.back();
      e.ok = true;
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
    return e;
  };

  for (std::size_t start = 0; start < configs.size(); start += max_parallel) {
    std::vector<std::future<SweepEntry>> batch;
    const std::size_t stop = std::min(configs.size(), start + max_parallel);
    for (std::size_t i = start; i < stop; ++i) batch.push_back(std::async(std::launch::async, one, i));
    for (std::size_t i = start; i < stop; ++i) report.entries[i] = batch[i - start].get();
  }
  for (const auto& e : report.entries) {
    if (!e.ok) ++report.internal_errors;
    else if (e.summary.exit_code() != 0) ++report.failed_checks;
  }
  report.fits = fit_orders(report.entries);
  return report;
}

void write_sweep_report(const SweepReport& report, const std::string& dir) {
  fs::create_directories(dir);
  nlohmann::ordered_json j;
  j["schema"] = "bhnls.sweep_report/1";
  j["runs"] = report.entries.size();
  j["internal_errors"] = report.internal_errors;
  j["failed_checks"] = report.failed_checks;
  auto& runs = j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : report.entries) {
    nlohmann::ordered_json r;
    r["label"] = e.label;
    r["scenario"] = to_string(e.config.scenario);
    r["ok"] = e.ok;
    if (!e.ok) r["error"] = e.error;
    else {
      r["passed"] = e.summary.all_passed();
      r["guard"] = e.summary.guard_reason;
      r["metrics"] = e.summary.metrics;
    }
    runs.push_back(std::move(r));
  }
  auto& fits = j["fits"] = nlohmann::ordered_json::array();
  for (const auto& f : report.fits)
    fits.push_back({{"parameter", f.parameter}, {"quantity", f.quantity}, {"labels", f.labels}, {"steps", f.steps},
                    {"values", f.values}, {"order", f.order}});
  write_json((fs::path(dir) / "sweep.json").string(), j);

  std::FILE* csv = std::fopen((fs::path(dir) / "sweep.csv").string().c_str(), "w");
  if (!csv) throw Error(ErrorKind::InvalidParameter, "cannot write sweep.csv in '" + dir + "'");
  std::fprintf(csv, "label,scenario,d,r_max,n,dt,T,ok,passed,energy_drift,mass_drift\n");
  for (const auto& e : report.entries) {
    auto metric = [&](const char* k) {
      return e.ok && e.summary.metrics.contains(k) ? format_number(e.summary.metrics[k].get<double>()) : std::string();
    };
    std::fprintf(csv, "%s,%s,%d,%s,%d,%s,%s,%d,%d,%s,%s\n", e.label.c_str(), to_string(e.config.scenario).c_str(),
                 e.config.d, format_number(e.config.r_max).c_str(), e.config.n, format_number(e.config.dt).c_str(),
                 format_number(e.config.T).c_str(), e.ok ? 1 : 0, e.ok && e.summary.all_passed() ? 1 : 0,
                 metric("energy_drift").c_str(), metric("mass_drift").c_str());
  }
  std::fclose(csv);
}

}  // namespace bhnls
