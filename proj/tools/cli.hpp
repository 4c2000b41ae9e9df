#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "wyckoff/neural_core.hpp"

namespace wyckoff::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumeric = 3,
};

/// Runs one `wyckoff` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct OhlcSeries {
  std::vector<std::string> timestamps;
  std::vector<double> close;
};

/// CSV with columns timestamp,open,high,low,close (any order, extra columns
/// allowed). Throws DataError naming missing columns, ParseError per bad row.
OhlcSeries read_ohlc(const std::filesystem::path& path);

struct ScanRow {
  std::string timestamp;
  std::size_t end_index = 0;
  double probability = 0.0;
  std::vector<double> window_values;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::size_t windows = 0;
  std::size_t skipped_constant = 0;
};

/// Swings of the close series, windows of the model's pattern width, each
/// min-max rescaled to [0,100] and scored. Constant windows are skipped.
ScanResult scan(const OhlcSeries& series, const nn::LstmModel& model, std::size_t k);

std::string format_scan(const ScanResult& result, std::size_t width);

}  // namespace wyckoff::cli
