#include "bhnls/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace bhnls {

bool RunSummary::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

int RunSummary::exit_code() const {
  if (demo) return 0;
  return all_passed() && !guard_tripped ? 0 : 1;
}

namespace {

nlohmann::ordered_json number_json(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidParameter, "cannot write '" + path + "'");
  return out;
}

std::string radius_label(double R) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", R);
  return buf;
}

}  // namespace

nlohmann::ordered_json to_json(const RunSummary& s) {
  nlohmann::ordered_json j;
  j["schema"] = kSummarySchema;
  j["scenario"] = s.scenario;
  j["demo"] = s.demo;
  j["passed"] = s.all_passed();
  j["exit_code"] = s.exit_code();
  j["config"] = s.config;
  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : s.checks) {
    nlohmann::ordered_json e;
    e["id"] = c.id;
    e["criterion"] = c.criterion;
    e["passed"] = c.passed;
    e["measured"] = number_json(c.measured);
    e["relation"] = c.relation;
    e["threshold"] = number_json(c.threshold);
    if (!c.note.empty()) e["note"] = c.note;
    checks.push_back(std::move(e));
  }
  j["metrics"] = s.metrics;
  j["guard"] = {{"tripped", s.guard_tripped}, {"reason", s.guard_reason}, {"time", s.guard_time}};
  j["steps"] = s.steps;
  j["files"] = s.files;
  j["wall_clock_s"] = s.wall_clock_s;
  return j;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_timeseries_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records,
                          const std::vector<double>& radii, const std::vector<Column>& extras) {
  for (const auto& c : extras)
    if (c.values.size() != records.size())
      throw Error(ErrorKind::GridMismatch, "extra column '" + c.name + "' has the wrong length");
  std::ofstream out = open_out(path);
  out << "t,mass,kinetic,potential,energy,S_accum";
  for (double R : radii) out << ",M_R@" << radius_label(R);
  for (double R : radii) out << ",z_R@" << radius_label(R);
  out << ",N_t";
  for (double R : radii) out << ",tail@" << radius_label(R);
  for (const auto& c : extras) out << ',' << c.name;
  out << '\n';
  for (std::size_t i = 0; i < records.size(); ++i) {
    const DiagnosticsRecord& r = records[i];
    out << format_number(r.t) << ',' << format_number(r.mass) << ',' << format_number(r.kinetic) << ','
        << format_number(r.potential) << ',' << format_number(r.energy) << ',' << format_number(r.S_accum);
    for (double v : r.M_R) out << ',' << format_number(v);
    for (double v : r.z_R) out << ',' << format_number(v);
    out << ',' << format_number(r.N_t);
    for (double v : r.tail_kinetic_fraction) out << ',' << format_number(v);
    for (const auto& c : extras) out << ',' << format_number(c.values[i]);
    out << '\n';
  }
}

void write_table_csv(const std::string& path, const std::vector<Column>& columns) {
  std::size_t rows = 0;
  for (const auto& c : columns) rows = std::max(rows, c.values.size());
  std::ofstream out = open_out(path);
  for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << columns[k].name;
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (k) out << ',';
      if (i < columns[k].values.size()) out << format_number(columns[k].values[i]);
    }
    out << '\n';
  }
}

void write_json(const std::string& path, const nlohmann::ordered_json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_svg_plot(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::vector<double>& x, const std::vector<Series>& series, bool log_y) {
  constexpr double W = 720, H = 440, L = 80, R = 20, Tm = 40, B = 60;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

  auto ok = [&](double v) { return std::isfinite(v) && (!log_y || v > 0.0); };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (double v : x)
    if (std::isfinite(v)) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.y.size() && i < x.size(); ++i)
      if (ok(s.y[i])) ymin = std::min(ymin, ty(s.y[i])), ymax = std::max(ymax, ty(s.y[i]));
  if (!(xmax > xmin)) xmin -= 0.5, xmax += 0.5;
  if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
  if (!(ymax > ymin)) {
    const double pad = std::max(1e-12, std::abs(ymin) * 1e-6);
    ymin -= pad;
    ymax += pad;
  }
  auto px = [&](double v) { return L + (v - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - ymin) / (ymax - ymin) * (H - Tm - B); };

  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  out << "<rect x=\"" << L << "\" y=\"" << Tm << "\" width=\"" << W - L - R << "\" height=\"" << H - Tm - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  auto label = [&](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  out << "<text x=\"" << L << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << label(xmin) << "</text>\n";
  out << "<text x=\"" << W - R << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << label(xmax) << "</text>\n";
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 20 << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  const std::string lo = log_y ? "1e" + label(ymin) : label(ymin);
  const std::string hi = log_y ? "1e" + label(ymax) : label(ymax);
  out << "<text x=\"" << L - 6 << "\" y=\"" << H - B << "\" text-anchor=\"end\">" << lo << "</text>\n";
  out << "<text x=\"" << L - 6 << "\" y=\"" << Tm + 10 << "\" text-anchor=\"end\">" << hi << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = colors[k % (sizeof colors / sizeof *colors)];
    std::ostringstream pts;
    for (std::size_t i = 0; i < series[k].y.size() && i < x.size(); ++i)
      if (ok(series[k].y[i]) && std::isfinite(x[i])) pts << px(x[i]) << ',' << py(series[k].y[i]) << ' ';
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    out << "<text x=\"" << L + 10 << "\" y=\"" << Tm + 16 + 15 * k << "\" fill=\"" << color << "\">" << series[k].name
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace bhnls
