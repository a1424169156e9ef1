#include "aqnpe/run_record.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "aqnpe/errors.hpp"

namespace aqnpe {

namespace {

constexpr const char* kTraceHeader = "iter,f,eta_hat,case,backtracks,grad_queries,matvecs";

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw UsageError("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw UsageError("trace csv: bad real '" + field + "'");
  }
}

template <typename Int>
Int parse_int(const std::string& field) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw UsageError("trace csv: bad integer '" + field + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

// Metadata values live on one comment line.
std::string single_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

}  // namespace

const char* to_string(StepCase c) noexcept {
  switch (c) {
    case StepCase::accepted:
      return "I";
    case StepCase::backtracked:
      return "II";
    case StepCase::none:
      break;
  }
  return "-";
}

StepCase parse_step_case(const std::string& text) {
  if (text == "I") return StepCase::accepted;
  if (text == "II") return StepCase::backtracked;
  if (text == "-") return StepCase::none;
  throw UsageError("unknown step case '" + text + "'");
}

void write_trace_csv(std::ostream& out, const RunRecord& record) {
  for (const auto& [key, value] : record.metadata) {
    out << "# " << key << '=' << single_line(value) << '\n';
  }
  if (record.error) out << "# error=" << single_line(*record.error) << '\n';
  out << kTraceHeader << '\n';
  for (const TraceRow& row : record.rows) {
    out << row.iter << ',' << format_real(row.f) << ',' << format_real(row.eta_hat) << ','
        << to_string(row.step_case) << ',' << row.backtracks << ',' << row.grad_queries << ','
        << row.matvecs << '\n';
  }
}

RunRecord read_trace_csv(std::istream& in) {
  RunRecord record;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line.rfind("# ", 0) == 0) {
        const std::string body = line.substr(2);
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw UsageError("trace csv: metadata without '='");
        const std::string key = body.substr(0, eq);
        const std::string value = body.substr(eq + 1);
        if (key == "error") {
          record.error = value;
        } else {
          record.metadata[key] = value;
        }
        continue;
      }
      if (line != kTraceHeader) throw UsageError("trace csv: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() != 7) throw UsageError("trace csv: expected 7 fields in '" + line + "'");
    TraceRow row;
    row.iter = parse_int<std::uint64_t>(fields[0]);
    row.f = parse_real(fields[1]);
    row.eta_hat = parse_real(fields[2]);
    row.step_case = parse_step_case(fields[3]);
    row.backtracks = parse_int<int>(fields[4]);
    row.grad_queries = parse_int<std::uint64_t>(fields[5]);
    row.matvecs = parse_int<std::uint64_t>(fields[6]);
    record.rows.push_back(row);
  }
  if (!header_seen) throw UsageError("trace csv: missing header");
  return record;
}

}  // namespace aqnpe
