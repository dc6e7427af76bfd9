#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nvscramble/scenario.hpp"

namespace nvs {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column order of hybrid CSV output.
const std::vector<std::string>& hybrid_csv_header();
/// Column order of quantum-channel CSV output.
const std::vector<std::string>& channel_csv_header();

std::string to_csv(const RunResult& result);
std::string to_json(const RunResult& result, int indent = 2);

/// Writes the result to `path`. Throws OutputError on I/O failure.
void write_output(const RunResult& result, OutputFormat format, const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable parse_csv(const std::string& text);

}  // namespace nvs
