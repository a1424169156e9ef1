#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace aqnpe {

/// How an iteration's step was accepted. Baselines report `none`.
enum class StepCase : std::uint8_t { none, accepted, backtracked };

/// "I", "II" or "-".
const char* to_string(StepCase c) noexcept;
/// Inverse of to_string; throws UsageError on anything else.
StepCase parse_step_case(const std::string& text);

struct TraceRow {
  std::uint64_t iter = 0;  ///< completed iterations, starting at 1
  double f = 0.0;          ///< objective at the iterate after this iteration
  double eta_hat = 0.0;    ///< accepted step size
  StepCase step_case = StepCase::none;
  int backtracks = 0;
  std::uint64_t grad_queries = 0;  ///< cumulative
  std::uint64_t matvecs = 0;       ///< cumulative

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// Per-iteration trace of one run plus `key=value` metadata.
struct RunRecord {
  std::map<std::string, std::string> metadata;
  std::vector<TraceRow> rows;
  /// Set when the run stopped on an error; rows hold the partial trace.
  std::optional<std::string> error;
  /// Not serialized into traces so that they stay byte-reproducible.
  double wall_seconds = 0.0;

  bool ok() const noexcept { return !error.has_value(); }
};

/// Writes `# key=value` lines (metadata, then `error` if set), the header
/// `iter,f,eta_hat,case,backtracks,grad_queries,matvecs` and one row per
/// iteration with reals at 17 significant digits.
void write_trace_csv(std::ostream& out, const RunRecord& record);
/// Parses write_trace_csv output. Throws UsageError on malformed input.
RunRecord read_trace_csv(std::istream& in);

}  // namespace aqnpe
