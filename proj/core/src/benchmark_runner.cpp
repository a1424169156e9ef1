#include "aqnpe/benchmark_runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "aqnpe/errors.hpp"

namespace aqnpe {

namespace {

constexpr double kGapMargin = 1e-15;

std::string real_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_field(const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used == field.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("dataset csv: bad number '" + field + "'");
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::optional<double> best_value(const RunRecord& record) {
  std::optional<double> best;
  for (const TraceRow& row : record.rows) {
    if (std::isfinite(row.f) && (!best || row.f < *best)) best = row.f;
  }
  return best;
}

std::string csv_text(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return text;
}

}  // namespace

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  const Index d = data.dimension();
  out << 'y';
  for (Index j = 0; j < d; ++j) out << ",a_" << j;
  out << '\n';
  for (Index i = 0; i < data.samples(); ++i) {
    out << (data.labels(i) > 0.0 ? "1" : "-1");
    for (Index j = 0; j < d; ++j) out << ',' << real_text(data.features(i, j));
    out << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw UsageError("dataset csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_commas(line);
  if (header.size() < 2 || header[0] != "y") throw UsageError("dataset csv: bad header");
  const Index d = static_cast<Index>(header.size()) - 1;
  for (Index j = 0; j < d; ++j) {
    if (header[static_cast<std::size_t>(j) + 1] != "a_" + std::to_string(j)) {
      throw UsageError("dataset csv: bad header column '" + header[j + 1] + "'");
    }
  }
  std::vector<double> labels;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_commas(line);
    if (static_cast<Index>(fields.size()) != d + 1) {
      throw UsageError("dataset csv: expected " + std::to_string(d + 1) + " fields");
    }
    const double label = parse_field(fields[0]);
    if (label != 1.0 && label != -1.0) throw UsageError("dataset csv: label must be +1 or -1");
    labels.push_back(label);
    for (Index j = 0; j < d; ++j) values.push_back(parse_field(fields[j + 1]));
  }
  const Index n = static_cast<Index>(labels.size());
  if (n == 0) throw UsageError("dataset csv: no samples");
  Dataset data;
  data.labels = Eigen::Map<const Vector>(labels.data(), n);
  data.features =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          values.data(), n, d);
  return data;
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out = open_output(path);
  write_dataset_csv(out, data);
  finish_output(out, path);
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open dataset " + path.string());
  return read_dataset_csv(in);
}

const char* method_name(Method m) noexcept {
  switch (m) {
    case Method::nag:
      return "nag";
    case Method::bfgs:
      return "bfgs";
    case Method::aqnpe:
      break;
  }
  return "aqnpe";
}

Method parse_method(const std::string& text) {
  if (text == "aqnpe") return Method::aqnpe;
  if (text == "nag") return Method::nag;
  if (text == "bfgs") return Method::bfgs;
  throw UsageError("unknown method '" + text + "' (expected aqnpe, nag or bfgs)");
}

std::vector<Method> parse_method_list(const std::string& text) {
  std::vector<Method> out;
  if (text.empty()) return out;
  for (const std::string& part : split_commas(text)) out.push_back(parse_method(part));
  return out;
}

bool BenchmarkResult::all_ok() const {
  return std::all_of(runs.begin(), runs.end(), [](const MethodRun& r) { return r.record.ok(); });
}

std::vector<std::uint64_t> gradient_queries_per_iteration(const RunRecord& record) {
  std::vector<std::uint64_t> out;
  out.reserve(record.rows.size());
  std::uint64_t previous = 0;
  for (const TraceRow& row : record.rows) {
    out.push_back(row.grad_queries - previous);
    previous = row.grad_queries;
  }
  return out;
}

std::map<std::uint64_t, std::uint64_t> gradient_query_histogram(const RunRecord& record) {
  std::map<std::uint64_t, std::uint64_t> hist;
  for (std::uint64_t q : gradient_queries_per_iteration(record)) ++hist[q];
  return hist;
}

double histogram_mean(const std::map<std::uint64_t, std::uint64_t>& histogram) {
  double total = 0.0;
  double count = 0.0;
  for (const auto& [queries, iterations] : histogram) {
    total += double(queries) * double(iterations);
    count += double(iterations);
  }
  return count > 0.0 ? total / count : 0.0;
}

BenchmarkResult run_benchmark(const Dataset& data, const std::vector<Method>& methods,
                              const BenchmarkConfig& config,
                              const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  BenchmarkResult result;
  const LogisticObjective objective(data);
  const Vector x0 = Vector::Zero(objective.dimension());

  for (Method m : methods) {
    MethodRun run;
    run.method = m;
    try {
      if (m == Method::aqnpe) {
        SolverConfig sc = config.aqnpe;
        sc.max_iters = config.max_iters;
        sc.tolerance = config.tolerance;
        sc.seed = config.seed;
        run.record = solve(objective, x0, x0, sc);
      } else {
        BaselineConfig bc = config.baseline;
        bc.method = m == Method::nag ? BaselineMethod::nag : BaselineMethod::bfgs;
        bc.max_iters = config.max_iters;
        bc.tolerance = config.tolerance;
        run.record = m == Method::nag ? nag_solve(objective, x0, bc) : bfgs_solve(objective, x0, bc);
      }
    } catch (const std::exception& e) {
      run.record.metadata["method"] = method_name(m);
      run.record.error = e.what();
    }
    run.record.metadata["seed"] = std::to_string(config.seed);
    run.best_f = best_value(run.record);
    result.runs.push_back(std::move(run));
  }

  if (!result.runs.empty()) {
    std::optional<double> f_star;
    for (const MethodRun& run : result.runs) {
      if (run.best_f && (!f_star || *run.best_f < *f_star)) f_star = run.best_f;
    }
    BaselineConfig polish;
    polish.method = BaselineMethod::bfgs;
    polish.max_iters = config.polish_iters;
    polish.tolerance = 1e-13;
    const RunRecord polished = bfgs_solve(objective, x0, polish);
    if (auto best = best_value(polished); best && (!f_star || *best < *f_star)) f_star = best;
    result.f_star = f_star;
  }

  for (const MethodRun& run : result.runs) {
    const std::filesystem::path path = out_dir / (std::string(method_name(run.method)) + ".csv");
    std::ofstream out = open_output(path);
    write_trace_csv(out, run.record);
    finish_output(out, path);
    result.files.push_back(path);
    if (run.method == Method::aqnpe) {
      for (const auto& [q, count] : gradient_query_histogram(run.record)) {
        result.aqnpe_histogram[q] += count;
      }
    }
  }

  const bool ran_aqnpe = std::any_of(result.runs.begin(), result.runs.end(),
                                     [](const MethodRun& r) { return r.method == Method::aqnpe; });
  if (ran_aqnpe) {
    const std::filesystem::path path = out_dir / "aqnpe_histogram.csv";
    std::ofstream out = open_output(path);
    out << "# mean=" << real_text(histogram_mean(result.aqnpe_histogram)) << '\n';
    out << "grad_queries_per_iter,iterations\n";
    for (const auto& [q, count] : result.aqnpe_histogram) out << q << ',' << count << '\n';
    finish_output(out, path);
    result.files.push_back(path);
  }

  {
    const std::filesystem::path path = out_dir / "summary.csv";
    std::ofstream out = open_output(path);
    out << "# runs=" << result.runs.size() << '\n';
    if (result.f_star) out << "# f_star=" << real_text(*result.f_star) << '\n';
    out << "method,status,iterations,grad_queries,matvecs,final_f,best_f,final_gap,"
           "wall_seconds,error\n";
    for (const MethodRun& run : result.runs) {
      const RunRecord& r = run.record;
      out << method_name(run.method) << ',' << (r.ok() ? "ok" : "failed") << ',' << r.rows.size()
          << ',';
      if (r.rows.empty()) {
        out << "0,0,,,";
      } else {
        const TraceRow& last = r.rows.back();
        out << last.grad_queries << ',' << last.matvecs << ',' << real_text(last.f) << ','
            << real_text(*run.best_f) << ',';
        if (result.f_star) out << real_text(last.f - *result.f_star);
      }
      out << ',' << real_text(r.wall_seconds) << ',' << (r.error ? csv_text(*r.error) : "")
          << '\n';
    }
    finish_output(out, path);
    result.files.push_back(path);
  }

  if (config.svg && result.f_star) {
    const std::filesystem::path path = out_dir / "convergence.svg";
    std::ofstream out = open_output(path);
    write_convergence_svg(out, result.runs, *result.f_star - kGapMargin);
    finish_output(out, path);
    result.files.push_back(path);
  }
  return result;
}

void write_convergence_svg(std::ostream& out, const std::vector<MethodRun>& runs, double f_ref) {
  constexpr double kPanelW = 420.0;
  constexpr double kPanelH = 300.0;
  constexpr double kMargin = 50.0;
  const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double max_iter = 1.0;
  double max_grad = 1.0;
  for (const MethodRun& run : runs) {
    for (const TraceRow& row : run.record.rows) {
      const double gap = row.f - f_ref;
      if (!(gap > 0.0) || !std::isfinite(gap)) continue;
      lo = std::min(lo, std::log10(gap));
      hi = std::max(hi, std::log10(gap));
      max_iter = std::max(max_iter, double(row.iter));
      max_grad = std::max(max_grad, double(row.grad_queries));
    }
  }
  if (!std::isfinite(lo)) {
    lo = -16.0;
    hi = 0.0;
  }
  lo = std::floor(lo);
  hi = std::ceil(hi);
  if (hi <= lo) hi = lo + 1.0;

  const double width = 2.0 * (kPanelW + 2.0 * kMargin);
  const double height = kPanelH + 2.0 * kMargin + 20.0 * double(runs.size());
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "font-family=\"sans-serif\" font-size=\"11\">\n",
                width, height);
  out << buf;
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const char* titles[] = {"f - f* vs iteration", "f - f* vs gradient queries"};
  for (int panel = 0; panel < 2; ++panel) {
    const double ox = kMargin + panel * (kPanelW + 2.0 * kMargin);
    const double oy = kMargin;
    const double x_max = panel == 0 ? max_iter : max_grad;
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                  "stroke=\"black\"/>\n",
                  ox, oy, kPanelW, kPanelH);
    out << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s</text>\n",
                  ox + kPanelW / 2.0, oy - 12.0, titles[panel]);
    out << buf;
    for (double e = lo; e <= hi; e += 1.0) {
      const double py = oy + kPanelH * (hi - e) / (hi - lo);
      std::snprintf(buf, sizeof buf,
                    "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">1e%.0f</text>\n", ox - 4.0,
                    py + 4.0, e);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.0f</text>\n",
                  ox + kPanelW, oy + kPanelH + 16.0, x_max);
    out << buf;

    for (std::size_t r = 0; r < runs.size(); ++r) {
      out << "<polyline fill=\"none\" stroke=\"" << colors[r % 5] << "\" points=\"";
      for (const TraceRow& row : runs[r].record.rows) {
        const double gap = row.f - f_ref;
        if (!(gap > 0.0) || !std::isfinite(gap)) continue;
        const double xv = panel == 0 ? double(row.iter) : double(row.grad_queries);
        const double px = ox + kPanelW * xv / x_max;
        const double py = oy + kPanelH * (hi - std::log10(gap)) / (hi - lo);
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px, py);
        out << buf;
      }
      out << "\"/>\n";
    }
  }
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const double ly = kMargin + kPanelH + 36.0 + 20.0 * double(r);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
                  "stroke-width=\"2\"/><text x=\"%.1f\" y=\"%.1f\">%s</text>\n",
                  kMargin, ly, kMargin + 24.0, ly, colors[r % 5], kMargin + 30.0, ly + 4.0,
                  method_name(runs[r].method));
    out << buf;
  }
  out << "</svg>\n";
}

}  // namespace aqnpe
