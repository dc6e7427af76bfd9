#include "nvscramble/output.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nvs {

namespace {

std::vector<double> row_of(const SeriesRecord& r) {
  return {r.t,   r.x1,   r.v1,   r.x2,   r.v2,   r.s1x,
          r.s1y, r.s1z,  r.s2x,  r.s2y,  r.s2z,  r.otoc,
          r.two_point.real(), r.two_point.imag(), r.h0, r.h_nv, r.v_int};
}

std::vector<double> row_of(const ChannelRecord& r) {
  return {r.t,
          r.n,
          r.otoc,
          r.otoc_published,
          r.thermal_otoc,
          r.thermal_otoc_trace,
          r.thermal_concurrence,
          r.concurrence,
          r.gme};
}

bool is_channel(const RunResult& r) { return r.config.model == Model::Channel; }

template <typename Records>
void append_rows(std::ostringstream& os, const std::vector<std::string>& header,
                 const Records& records) {
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& rec : records) {
    const auto row = row_of(rec);
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << "\n";
  }
}

}  // namespace

const std::vector<std::string>& hybrid_csv_header() {
  static const std::vector<std::string> h = {
      "t",   "x1",  "v1",  "x2",   "v2",           "s1x",          "s1y", "s1z", "s2x",
      "s2y", "s2z", "otoc", "two_point_re", "two_point_im", "h0",  "h_nv", "v_int"};
  return h;
}

const std::vector<std::string>& channel_csv_header() {
  static const std::vector<std::string> h = {
      "t", "n", "otoc", "otoc_published", "thermal_otoc", "thermal_otoc_trace",
      "thermal_concurrence", "concurrence", "gme"};
  return h;
}

std::string to_csv(const RunResult& result) {
  std::ostringstream os;
  if (is_channel(result)) {
    append_rows(os, channel_csv_header(), result.channel);
  } else {
    append_rows(os, hybrid_csv_header(), result.series.records);
  }
  return os.str();
}

std::string to_json(const RunResult& result, int indent) {
  using nlohmann::ordered_json;
  ordered_json j;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : config_entries(result.config)) cfg[k] = v;
  j["config"] = cfg;
  j["config_text"] = to_config_text(result.config);

  const auto& header = is_channel(result) ? channel_csv_header() : hybrid_csv_header();
  ordered_json records = ordered_json::array();
  auto push = [&](const std::vector<double>& row) {
    ordered_json rec = ordered_json::object();
    for (std::size_t i = 0; i < header.size(); ++i) rec[header[i]] = row[i];
    records.push_back(std::move(rec));
  };
  if (is_channel(result)) {
    for (const auto& r : result.channel) push(row_of(r));
  } else {
    for (const auto& r : result.series.records) push(row_of(r));
    const IntegrationDiagnostics& d = result.diagnostics;
    j["diagnostics"] = {{"accepted_steps", d.accepted_steps},
                        {"rejected_steps", d.rejected_steps},
                        {"rhs_evaluations", d.rhs_evaluations},
                        {"renormalizations", d.renormalizations},
                        {"max_norm_drift", d.max_norm_drift},
                        {"cumulative_norm_drift", d.cumulative_norm_drift},
                        {"max_unitarity_defect", d.max_unitarity_defect},
                        {"max_factorization_defect", d.max_factorization_defect}};
  }
  // Wall time is left out so that identical configs give identical files.
  j["records"] = std::move(records);
  return j.dump(indent);
}

void write_output(const RunResult& result, OutputFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open '" + path + "' for writing");
  out << (format == OutputFormat::Csv ? to_csv(result) : to_json(result) + "\n");
  out.close();
  if (!out) throw OutputError("failed writing '" + path + "'");
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (!std::getline(in, line)) return table;
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& c : split(line)) row.push_back(std::strtod(c.c_str(), nullptr));
    if (row.size() != table.header.size()) throw OutputError("csv row width mismatch");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace nvs
