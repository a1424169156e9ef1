#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aqnpe/aqnpe_solver.hpp"
#include "aqnpe/baselines.hpp"
#include "aqnpe/logistic.hpp"
#include "aqnpe/run_record.hpp"

namespace aqnpe {

/// Header `y,a_0,...,a_{d-1}`, one sample per line, reals at 17 digits.
void write_dataset_csv(std::ostream& out, const Dataset& data);
/// Throws UsageError on a malformed file or labels other than +-1.
Dataset read_dataset_csv(std::istream& in);
void save_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& path);

enum class Method { aqnpe, nag, bfgs };

const char* method_name(Method m) noexcept;
/// Accepts "aqnpe", "nag" and "bfgs"; throws UsageError otherwise.
Method parse_method(const std::string& text);
/// Comma-separated list; an empty string yields an empty list.
std::vector<Method> parse_method_list(const std::string& text);

struct BenchmarkConfig {
  int max_iters = 500;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  bool svg = false;
  /// Iteration cap of the BFGS run used to sharpen the f* reference.
  int polish_iters = 2000;
  /// Method-specific settings; max_iters, tolerance and seed above override
  /// the copies inside these.
  SolverConfig aqnpe;
  BaselineConfig baseline;
};

struct MethodRun {
  Method method = Method::aqnpe;
  RunRecord record;
  /// Smallest f over the trace, if any row exists.
  std::optional<double> best_f;
};

struct BenchmarkResult {
  std::vector<MethodRun> runs;
  std::optional<double> f_star;
  /// Gradient queries spent per A-QNPE iteration -> number of iterations.
  std::map<std::uint64_t, std::uint64_t> aqnpe_histogram;
  std::vector<std::filesystem::path> files;

  bool all_ok() const;
};

/// Per-iteration gradient-query counts (differences of the cumulative column).
std::vector<std::uint64_t> gradient_queries_per_iteration(const RunRecord& record);
std::map<std::uint64_t, std::uint64_t> gradient_query_histogram(const RunRecord& record);
/// Mean of the histogram; 0 for an empty one.
double histogram_mean(const std::map<std::uint64_t, std::uint64_t>& histogram);

/// Runs each method from x0 = 0 on the logistic objective and writes to
/// `out_dir`: `<method>.csv` traces, `summary.csv`, `aqnpe_histogram.csv`
/// when A-QNPE ran, and `convergence.svg` when requested. A failing method is
/// recorded in its trace and the summary; the others still run. Throws
/// std::runtime_error on I/O failure.
BenchmarkResult run_benchmark(const Dataset& data, const std::vector<Method>& methods,
                              const BenchmarkConfig& config,
                              const std::filesystem::path& out_dir);

/// Two side-by-side log-scale panels of f - f_ref against iteration and
/// against cumulative gradient queries, one polyline per run.
void write_convergence_svg(std::ostream& out, const std::vector<MethodRun>& runs, double f_ref);

}  // namespace aqnpe
