#pragma once

// JSON and CSV formats used by the command-line tool.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bentcert/criteria.hpp"
#include "bentcert/hyptest.hpp"
#include "bentcert/simulate.hpp"

namespace bentcert::io {

using nlohmann::json;

/// {"dA": int, "dB": int, "entries": [[[re, im], ...], ...]} (rows).
json to_json(const qmat::BipartiteOperator& op);
qmat::BipartiteOperator operator_from_json(const json& j);

json to_json(const criteria::RadiusReport& r);

/// Everything needed to evaluate data later: constants, tables, dropped
/// outcomes, and the target and prepared states.
json to_json(const hyptest::TestPlan& plan);
hyptest::TestPlan plan_from_json(const json& j);

/// {"settings": [{"label": str, "counts": [int, ...]}, ...]}, reordered to
/// the plan's setting order. Throws InvalidInput on unknown or missing labels.
simulate::Counts counts_from_json(const json& j, const hyptest::TestPlan& plan);
json counts_to_json(const simulate::Counts& counts, const hyptest::TestPlan& plan);

json to_json(const simulate::EmpiricalFailure& e);

/// Reads and parses a JSON file; InvalidInput on I/O or syntax errors.
json read_json_file(const std::string& path);

/// %.12g with the C locale.
std::string format_double(double v);

/// Comma-separated rows with a header; numbers via format_double.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  const std::string& str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

std::string sha256_hex(std::string_view data);

struct RunManifest {
  std::string subcommand;
  json parameters;
  std::string version;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::string output_sha256;
};

json to_json(const RunManifest& m);

/// Library version string.
const char* version();

}  // namespace bentcert::io
