#ifndef TRAPFK_REPORT_HPP
#define TRAPFK_REPORT_HPP

// Report rows, CSV tables and the JSON run report shared by the CLI and the
// acceptance suite.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "trapfk/stats_kit.hpp"

namespace trapfk {

/// CSV text with full-precision numbers. Output depends only on the values
/// added, never on timing or thread count.
class Csv {
 public:
  explicit Csv(std::vector<std::string> columns) : ncol_(columns.size()) {
    for (std::size_t i = 0; i < columns.size(); ++i) text_ += (i ? "," : "") + columns[i];
    text_ += "\n";
  }

  template <typename... Ts>
  Csv& row(const Ts&... values) {
    static_assert(sizeof...(Ts) > 0);
    if (sizeof...(Ts) != ncol_) throw InputError("CSV row has the wrong number of cells");
    std::string line;
    // cell() never returns an empty string, so an empty line means "first cell".
    ((line += (line.empty() ? "" : ",") + cell(values)), ...);
    text_ += line + "\n";
    return *this;
  }

  const std::string& str() const noexcept { return text_; }

  static std::string cell(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
  static std::string cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s.empty() ? "\"\"" : s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  static std::string cell(const char* s) { return cell(std::string(s)); }
  static std::string cell(bool b) { return b ? "true" : "false"; }
  template <typename T>
    requires std::is_integral_v<T>
  static std::string cell(T v) {
    return std::to_string(v);
  }

 private:
  std::size_t ncol_;
  std::string text_;
};

enum class Comparison {
  info,          ///< reported, not judged
  abs_within,    ///< |estimate - target| <= tolerance
  se_within,     ///< |estimate - target| <= tolerance * std_error
  in_range,      ///< lower <= estimate <= upper
  at_most,       ///< estimate <= upper
  less_than,     ///< estimate < upper
};

inline std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::info:
      return "info";
    case Comparison::abs_within:
      return "|est-target|<=tol";
    case Comparison::se_within:
      return "|est-target|<=tol*SE";
    case Comparison::in_range:
      return "lower<=est<=upper";
    case Comparison::at_most:
      return "est<=upper";
    case Comparison::less_than:
      return "est<upper";
  }
  return "?";
}

/// One statistic of a run and its verdict.
struct ReportRow {
  std::string statistic;
  StatsSummary summary;
  Comparison comparison = Comparison::info;
  double target = std::nan("");
  double tolerance = std::nan("");
  double lower = std::nan("");
  double upper = std::nan("");
  bool pass = true;
  std::string stream;  ///< which seed stream produced the samples
  std::string note;

  bool gating() const noexcept { return comparison != Comparison::info; }

  std::string verdict_line() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s = %.6g", statistic.c_str(), summary.estimate);
    std::string s = buf;
    switch (comparison) {
      case Comparison::info:
        return s + " (info)";
      case Comparison::abs_within:
        std::snprintf(buf, sizeof buf, " target %.6g tol %.3g", target, tolerance);
        break;
      case Comparison::se_within:
        std::snprintf(buf, sizeof buf, " target %.6g within %.3g SE (SE %.3g)", target, tolerance, summary.std_error);
        break;
      case Comparison::in_range:
        std::snprintf(buf, sizeof buf, " in [%.6g, %.6g]", lower, upper);
        break;
      case Comparison::at_most:
        std::snprintf(buf, sizeof buf, " <= %.6g", upper);
        break;
      case Comparison::less_than:
        std::snprintf(buf, sizeof buf, " < %.6g", upper);
        break;
    }
    return s + buf + (pass ? " PASS" : " FAIL");
  }
};

/// A summary for a value known without sampling error (quadrature, solve).
inline StatsSummary exact_value(double v, std::string method) {
  StatsSummary s;
  s.estimate = v;
  s.ci_low = v;
  s.ci_high = v;
  s.level = 1.0;
  s.n_samples = 1;
  s.method = std::move(method);
  return s;
}

inline ReportRow info_row(std::string statistic, StatsSummary s, std::string note = {}) {
  ReportRow r;
  r.statistic = std::move(statistic);
  r.summary = std::move(s);
  r.note = std::move(note);
  return r;
}

inline ReportRow abs_row(std::string statistic, StatsSummary s, double target, double tol) {
  ReportRow r = info_row(std::move(statistic), std::move(s));
  r.comparison = Comparison::abs_within;
  r.target = target;
  r.tolerance = tol;
  r.pass = std::abs(r.summary.estimate - target) <= tol;
  return r;
}

inline ReportRow se_row(std::string statistic, StatsSummary s, double target, double k) {
  ReportRow r = info_row(std::move(statistic), std::move(s));
  r.comparison = Comparison::se_within;
  r.target = target;
  r.tolerance = k;
  r.pass = std::abs(r.summary.estimate - target) <= k * r.summary.std_error;
  return r;
}

inline ReportRow range_row(std::string statistic, StatsSummary s, double lo, double hi) {
  ReportRow r = info_row(std::move(statistic), std::move(s));
  r.comparison = Comparison::in_range;
  r.lower = lo;
  r.upper = hi;
  r.pass = lo <= r.summary.estimate && r.summary.estimate <= hi;
  return r;
}

inline ReportRow at_most_row(std::string statistic, StatsSummary s, double hi) {
  ReportRow r = info_row(std::move(statistic), std::move(s));
  r.comparison = Comparison::at_most;
  r.upper = hi;
  r.pass = r.summary.estimate <= hi;
  return r;
}

inline ReportRow less_than_row(std::string statistic, StatsSummary s, double hi) {
  ReportRow r = info_row(std::move(statistic), std::move(s));
  r.comparison = Comparison::less_than;
  r.upper = hi;
  r.pass = r.summary.estimate < hi;
  return r;
}

inline nlohmann::json to_json(const StatsSummary& s) {
  return {{"estimate", s.estimate}, {"std_error", s.std_error}, {"ci_low", s.ci_low},     {"ci_high", s.ci_high},
          {"level", s.level},       {"n_samples", s.n_samples}, {"method", s.method}};
}

inline nlohmann::json to_json(const ReportRow& r) {
  nlohmann::json j{{"statistic", r.statistic},
                   {"summary", to_json(r.summary)},
                   {"comparison", to_string(r.comparison)},
                   {"gating", r.gating()},
                   {"pass", r.pass}};
  if (!std::isnan(r.target)) j["target"] = r.target;
  if (!std::isnan(r.tolerance)) j["tolerance"] = r.tolerance;
  if (!std::isnan(r.lower)) j["lower"] = r.lower;
  if (!std::isnan(r.upper)) j["upper"] = r.upper;
  if (!r.stream.empty()) j["stream"] = r.stream;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

/// Everything an experiment produces, before anything touches the disk.
struct ExperimentOutput {
  std::vector<ReportRow> rows;
  std::map<std::string, std::string> csv;  ///< file name -> contents
  std::map<std::string, std::string> svg;
  nlohmann::json constants = nlohmann::json::object();
  nlohmann::json streams = nlohmann::json::object();  ///< purpose -> how replica ids are assigned

  bool passed() const {
    for (const auto& r : rows) {
      if (r.gating() && !r.pass) return false;
    }
    return true;
  }
};

}  // namespace trapfk

#endif  // TRAPFK_REPORT_HPP
