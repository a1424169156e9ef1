// bench: dataset generation, benchmark runs and the acceptance self-test.
//
//   bench gen --n 500 --d 50 --sigma 0.8 --seed 0 --out data.csv
//   bench run --data data.csv --methods aqnpe,nag,bfgs --max-iters 500 --out-dir out [--svg]
//   bench selftest
//
// Exit codes: 0 success, 1 a method (or self-test criterion) failed, 2 usage error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aqnpe/benchmark_runner.hpp"
#include "aqnpe/errors.hpp"
#include "aqnpe/logistic.hpp"

#ifdef AQNPE_HAVE_SELFTEST
#include "criteria.hpp"
#endif

namespace {

constexpr int kOk = 0;
constexpr int kMethodFailure = 1;
constexpr int kUsage = 2;

struct GenOptions {
  long long n = 500;
  long long d = 50;
  double sigma = 0.8;
  std::uint64_t seed = 0;
  bool paper_scale = false;
  std::string out;
};

struct RunOptions {
  std::string data;
  std::string methods = "aqnpe,nag,bfgs";
  int max_iters = 500;
  double tol = 0.0;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool svg = false;
  int polish_iters = 2000;
};

int cmd_gen(const GenOptions& o) {
  aqnpe::SyntheticLogisticSpec spec;
  spec.n = o.paper_scale ? 2000 : o.n;
  spec.d = o.paper_scale ? 150 : o.d;
  spec.sigma = o.sigma;
  spec.seed = o.seed;
  const aqnpe::SyntheticLogistic s = aqnpe::generate_logistic(spec);
  aqnpe::save_dataset(o.out, s.data);
  std::cout << "wrote " << o.out << " (n=" << spec.n << ", d=" << spec.d << ")\n";
  return kOk;
}

int cmd_run(const RunOptions& o) {
  const aqnpe::Dataset data = aqnpe::load_dataset(o.data);
  const std::vector<aqnpe::Method> methods = aqnpe::parse_method_list(o.methods);
  aqnpe::BenchmarkConfig config;
  config.max_iters = o.max_iters;
  config.tolerance = o.tol;
  config.seed = o.seed;
  config.svg = o.svg;
  config.polish_iters = o.polish_iters;
  const aqnpe::BenchmarkResult res = aqnpe::run_benchmark(data, methods, config, o.out_dir);

  std::printf("%-6s %-7s %8s %12s %12s %24s\n", "method", "status", "iters", "grad_queries",
              "matvecs", "final_f");
  for (const aqnpe::MethodRun& run : res.runs) {
    const aqnpe::RunRecord& r = run.record;
    const std::uint64_t grads = r.rows.empty() ? 0 : r.rows.back().grad_queries;
    const std::uint64_t mv = r.rows.empty() ? 0 : r.rows.back().matvecs;
    std::printf("%-6s %-7s %8zu %12llu %12llu %24.17g\n", aqnpe::method_name(run.method),
                r.ok() ? "ok" : "failed", r.rows.size(),
                static_cast<unsigned long long>(grads), static_cast<unsigned long long>(mv),
                r.rows.empty() ? 0.0 : r.rows.back().f);
    if (r.error) std::fprintf(stderr, "%s: %s\n", aqnpe::method_name(run.method), r.error->c_str());
  }
  if (!res.aqnpe_histogram.empty()) {
    std::printf("aqnpe mean gradient queries per iteration: %.4f\n",
                aqnpe::histogram_mean(res.aqnpe_histogram));
  }
  if (res.f_star) std::printf("f* reference: %.17g\n", *res.f_star);
  for (const auto& path : res.files) std::printf("wrote %s\n", path.string().c_str());
  return res.all_ok() ? kOk : kMethodFailure;
}

int cmd_selftest() {
#ifdef AQNPE_HAVE_SELFTEST
  const auto results = aqnpe::acceptance::run_all(&std::cout);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.pass ? 1 : 0;
  std::cout << passed << "/" << results.size() << " acceptance criteria passed\n";
  return passed == results.size() ? kOk : kMethodFailure;
#else
  std::cerr << "bench selftest: built without the acceptance suite (AQNPE_BUILD_TESTS=OFF)\n";
  return kUsage;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"A-QNPE benchmark tool"};
  app.require_subcommand(1);

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a synthetic logistic-regression dataset");
  gen_cmd->add_option("--n", gen.n, "Number of samples")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--d", gen.d, "Features including the appended constant")
      ->check(CLI::Range(2LL, 1LL << 20));
  gen_cmd->add_option("--sigma", gen.sigma, "Feature noise standard deviation")
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_flag("--paper-scale", gen.paper_scale, "Use n = 2000, d = 150");
  gen_cmd->add_option("--out", gen.out, "Output CSV path")->required();

  RunOptions run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run solvers on a dataset and write traces");
  run_cmd->add_option("--data", run.data, "Dataset CSV")->required();
  run_cmd->add_option("--methods", run.methods, "Comma-separated subset of aqnpe,nag,bfgs");
  run_cmd->add_option("--max-iters", run.max_iters, "Iteration cap per method")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--tol", run.tol, "Gradient-norm stopping tolerance")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--seed", run.seed, "Seed for randomized components");
  run_cmd->add_option("--out-dir", run.out_dir, "Output directory")->required();
  run_cmd->add_flag("--svg", run.svg, "Also write convergence.svg");
  run_cmd->add_option("--polish-iters", run.polish_iters,
                      "BFGS iterations used to sharpen the f* reference")
      ->check(CLI::NonNegativeNumber);

  CLI::App* selftest_cmd = app.add_subcommand("selftest", "Run the acceptance criteria");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen);
    if (run_cmd->parsed()) return cmd_run(run);
    if (selftest_cmd->parsed()) return cmd_selftest();
  } catch (const aqnpe::UsageError& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return kMethodFailure;
  }
  return kUsage;
}
