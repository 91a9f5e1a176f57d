#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace cadlag {

inline constexpr const char* kVersion = "0.1.0";

enum class Status { info, pass, fail, inconclusive };
std::string to_string(Status s);

struct ReportRow {
  std::string experiment;
  std::string model;
  double alpha = 0.0;
  std::size_t n = 0;
  std::string statistic;
  double value = 0.0;
  std::optional<double> stderr_value;
  /// Acceptance criterion id such as "AC4a"; empty for informational rows.
  std::string criterion;
  Status status = Status::info;
};

/// Named table written to plotdata/<name>.csv.
struct PlotData {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report {
  std::string experiment;
  std::vector<ReportRow> rows;
  std::vector<PlotData> plots;
  /// Seed, version, configuration and wall time. Not part of report.csv.
  nlohmann::json metadata = nlohmann::json::object();

  void add(ReportRow row);
  /// Throws std::logic_error if the criterion already has a row.
  void add_criterion(ReportRow row);
  const ReportRow* find_criterion(const std::string& id) const;

  /// fail if any criterion failed, else inconclusive if any was
  /// inconclusive, else pass.
  Status overall() const;
};

/// 0 when every criterion passes, 2 when the worst outcome is inconclusive,
/// 1 otherwise.
int exit_code(Status overall);

/// Header plus one line per row; numbers as %.10g, undefined errors as NA.
void write_report_csv(std::ostream& out, const Report& r);
std::string report_csv(const Report& r);
void write_plot_csv(std::ostream& out, const PlotData& p);
nlohmann::json to_json(const Report& r);

/// Writes report.csv, report.json and plotdata/*.csv under `dir`.
void write_report(const Report& r, const std::string& dir);

}  // namespace cadlag
