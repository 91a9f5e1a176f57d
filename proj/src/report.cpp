#include "cadlag/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cadlag {

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Quotes fields containing separators; model names such as "lagged(1)" pass.
std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::info:
      return "info";
    case Status::pass:
      return "pass";
    case Status::fail:
      return "fail";
    case Status::inconclusive:
      return "inconclusive";
  }
  return "info";
}

void Report::add(ReportRow row) { rows.push_back(std::move(row)); }

void Report::add_criterion(ReportRow row) {
  if (row.criterion.empty()) throw std::logic_error("criterion row without an id");
  if (find_criterion(row.criterion)) {
    throw std::logic_error("criterion " + row.criterion + " reported twice");
  }
  rows.push_back(std::move(row));
}

const ReportRow* Report::find_criterion(const std::string& id) const {
  for (const auto& r : rows) {
    if (r.criterion == id) return &r;
  }
  return nullptr;
}

Status Report::overall() const {
  bool inconclusive = false;
  for (const auto& r : rows) {
    if (r.status == Status::fail) return Status::fail;
    if (r.status == Status::inconclusive) inconclusive = true;
  }
  return inconclusive ? Status::inconclusive : Status::pass;
}

int exit_code(Status overall) {
  switch (overall) {
    case Status::pass:
    case Status::info:
      return 0;
    case Status::inconclusive:
      return 2;
    case Status::fail:
      return 1;
  }
  return 1;
}

void write_report_csv(std::ostream& out, const Report& r) {
  out << "experiment,model,alpha,n,statistic,value,stderr,criterion,status\n";
  for (const auto& row : r.rows) {
    out << field(row.experiment) << ',' << field(row.model) << ',' << number(row.alpha) << ','
        << row.n << ',' << field(row.statistic) << ',' << number(row.value) << ','
        << (row.stderr_value ? number(*row.stderr_value) : "NA") << ',' << field(row.criterion)
        << ',' << to_string(row.status) << '\n';
  }
}

std::string report_csv(const Report& r) {
  std::ostringstream s;
  write_report_csv(s, r);
  return s.str();
}

void write_plot_csv(std::ostream& out, const PlotData& p) {
  for (std::size_t i = 0; i < p.columns.size(); ++i) out << (i ? "," : "") << field(p.columns[i]);
  out << '\n';
  for (const auto& row : p.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << number(row[i]);
    out << '\n';
  }
}

nlohmann::json to_json(const Report& r) {
  using nlohmann::json;
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"experiment", row.experiment},
                    {"model", row.model},
                    {"alpha", row.alpha},
                    {"n", row.n},
                    {"statistic", row.statistic},
                    {"value", std::isnan(row.value) ? json(nullptr) : json(row.value)},
                    {"stderr", row.stderr_value ? json(*row.stderr_value) : json(nullptr)},
                    {"criterion", row.criterion.empty() ? json(nullptr) : json(row.criterion)},
                    {"status", to_string(row.status)}});
  }
  return {{"experiment", r.experiment},
          {"overall", to_string(r.overall())},
          {"metadata", r.metadata},
          {"rows", std::move(rows)}};
}

void write_report(const Report& r, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root / "plotdata");
  auto open = [](const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
  };
  {
    auto out = open(root / "report.csv");
    write_report_csv(out, r);
  }
  {
    auto out = open(root / "report.json");
    out << to_json(r).dump(2) << '\n';
  }
  for (const auto& p : r.plots) {
    auto out = open(root / "plotdata" / (p.name + ".csv"));
    write_plot_csv(out, p);
  }
}

}  // namespace cadlag
