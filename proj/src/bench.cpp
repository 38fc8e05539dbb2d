#include "opsplit/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "opsplit/baselines.hpp"
#include "opsplit/drt.hpp"
#include "opsplit/errors.hpp"
#include "opsplit/qp.hpp"

namespace opsplit {

const char* to_string(Algo a) {
  switch (a) {
    case Algo::kDrt:
      return "drt";
    case Algo::kRfdrs:
      return "rfdrs";
    case Algo::kTos:
      return "tos";
  }
  return "?";
}

const char* to_string(BenchStop s) { return s == BenchStop::kDelta ? "delta" : "residual"; }

std::optional<Algo> parse_algo(const std::string& s) {
  if (s == "drt") return Algo::kDrt;
  if (s == "rfdrs") return Algo::kRfdrs;
  if (s == "tos") return Algo::kTos;
  return std::nullopt;
}

std::optional<BenchStop> parse_stop(const std::string& s) {
  if (s == "delta") return BenchStop::kDelta;
  if (s == "residual") return BenchStop::kResidual;
  return std::nullopt;
}

void BenchSpec::validate() const {
  if (n < 1) throw InputError("BenchSpec: n must be >= 1");
  if (instances < 1) throw InputError("BenchSpec: instances must be >= 1");
  if (!(tol > 0.0)) throw InputError("BenchSpec: tol must be positive");
  if (!(sigma > 0.0 && sigma < 1.0)) throw InputError("BenchSpec: sigma must be in (0, 1)");
  if (!(theta > 0.0 && theta < 1.0)) throw InputError("BenchSpec: theta must be in (0, 1)");
  if (jobs < 1) throw InputError("BenchSpec: jobs must be >= 1");
  if (max_iter < 1) throw InputError("BenchSpec: max_iter must be >= 1");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

RunRecord run_instance(const BenchSpec& spec, std::uint64_t instance_seed) {
  RunRecord rec;
  rec.instance = instance_seed;
  rec.algo = spec.algo;
  rec.n = spec.n;
  try {
    const auto t_setup = Clock::now();
    const QpInstance inst = generate_instance(spec.n, spec.definite, instance_seed);
    const Point z0 = initial_point(inst);
    Point z_final;

    if (spec.algo == Algo::kDrt) {
      const QpOperators ops = make_operators(inst);
      const double tau0 = initial_tau(inst, z0, spec.tau_with_linear_term);
      DrtProblem problem = make_drt_problem(ops, spec.sigma, spec.theta, tau0);
      problem.cfg.max_iter = spec.max_iter;
      rec.setup_time_s = seconds_since(t_setup);

      const StopRule stop =
          spec.stop == BenchStop::kDelta ? StopRule::delta(spec.tol) : StopRule::residual(spec.tol);
      DrtObserver observer;
      if (spec.trace) {
        observer = [](const DrsState& s, StepType t) {
          if (t != StepType::kExtragradient) return;
          const double moved = (s.z - s.z_prev).norm();
          const double gap = (s.last.x - s.last.y).norm();
          if (std::abs(moved - gap) > 1e-12 * (1.0 + s.z.norm())) {
            throw InvariantError("|z_k - z_{k-1}| != |x_k - y_k| at an extragradient step");
          }
        };
      }
      DrtRun run = drt_solve(problem, stop, z0, {}, observer);
      rec.iters = run.iterations;
      rec.extragrad = run.extragradient;
      rec.null_steps = run.null_steps;
      rec.inner = run.inner_total;
      rec.f2_evals = run.f2_evals;
      rec.time_s = run.wall_time_s;
      rec.residual = run.final_residual;
      if (spec.trace) rec.trace = std::move(run.trace);
      z_final = std::move(run.z);
    } else {
      const BaselineConfig cfg = spec.algo == Algo::kTos ? tos_config(inst) : rfdrs_config(inst);
      rec.setup_time_s = seconds_since(t_setup);
      const Baseline which = spec.algo == Algo::kTos ? Baseline::kTos : Baseline::kRfdrs;
      BaselineRun run = run_baseline(which, inst, cfg, z0, spec.tol, spec.max_iter);
      rec.iters = run.iterations;
      rec.f2_evals = run.iterations;
      rec.time_s = run.wall_time_s;
      rec.residual = run.final_residual;
      z_final = std::move(run.z);
    }

    if (spec.compute_error) {
      const Point z_star = reference_solution(inst);
      rec.abs_err = (z_final - z_star).norm();
    } else {
      rec.abs_err = std::numeric_limits<double>::quiet_NaN();
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

std::vector<RunRecord> run_batch(const BenchSpec& spec) {
  spec.validate();
  std::vector<RunRecord> records(static_cast<std::size_t>(spec.instances));
  std::atomic<long> next{0};
  auto worker = [&]() {
    for (long i = next++; i < spec.instances; i = next++) {
      records[static_cast<std::size_t>(i)] = run_instance(spec, spec.seed + static_cast<std::uint64_t>(i));
    }
  };
  const int jobs = std::min<long>(spec.jobs, spec.instances);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

// ---------------------------------------------------------------------------

const ColumnStats& Summary::column(const std::string& name) const {
  for (std::size_t i = 0; i < kSummaryColumns.size(); ++i) {
    if (name == kSummaryColumns[i]) return columns[i];
  }
  throw InputError("Summary: unknown column " + name);
}

Summary summarize(const std::vector<RunRecord>& records) {
  Summary s;
  std::array<std::vector<double>, kSummaryColumns.size()> values;
  for (const auto& r : records) {
    if (!r.ok()) {
      ++s.failed;
      continue;
    }
    if (s.count == 0) {
      s.algo = to_string(r.algo);
      s.n = r.n;
    }
    ++s.count;
    const std::array<double, kSummaryColumns.size()> row = {
        static_cast<double>(r.iters), static_cast<double>(r.extragrad), static_cast<double>(r.null_steps),
        static_cast<double>(r.inner), static_cast<double>(r.f2_evals),  r.time_s,
        r.residual,                   r.abs_err};
    for (std::size_t c = 0; c < row.size(); ++c) values[c].push_back(row[c]);
  }
  if (s.count == 0) throw InputError("summarize: no successful records");
  for (std::size_t c = 0; c < values.size(); ++c) {
    const auto& v = values[c];
    double sum = 0.0;
    for (double x : v) sum += x;
    s.columns[c] = {*std::min_element(v.begin(), v.end()), *std::max_element(v.begin(), v.end()),
                    sum / static_cast<double>(v.size())};
  }
  return s;
}

std::string format_summary(const Summary& s) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "algo=%s n=%ld instances=%ld failed=%ld\n", s.algo.c_str(), s.n, s.count,
                s.failed);
  out << line;
  std::snprintf(line, sizeof line, "%-10s %14s %14s %14s\n", "column", "min", "max", "mean");
  out << line;
  for (std::size_t c = 0; c < kSummaryColumns.size(); ++c) {
    const auto& st = s.columns[c];
    std::snprintf(line, sizeof line, "%-10s %14.6g %14.6g %14.6g\n", kSummaryColumns[c], st.min, st.max,
                  st.mean);
    out << line;
  }
  return out.str();
}

std::string summary_csv(const Summary& s) {
  std::ostringstream out;
  out << "column,min,max,mean\n";
  char line[160];
  for (std::size_t c = 0; c < kSummaryColumns.size(); ++c) {
    const auto& st = s.columns[c];
    std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%.17g\n", kSummaryColumns[c], st.min, st.max, st.mean);
    out << line;
  }
  return out.str();
}

// ---------------------------------------------------------------------------

void write_csv(const std::vector<RunRecord>& records, std::ostream& out) {
  out << kCsvHeader << '\n';
  char buf[512];
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : records) {
    if (r.ok()) {
      std::snprintf(buf, sizeof buf, "%llu,%s,%ld,%ld,%ld,%ld,%ld,%ld,%.17g,%.17g,%.17g\n",
                    static_cast<unsigned long long>(r.instance), to_string(r.algo), r.n, r.iters, r.extragrad,
                    r.null_steps, r.inner, r.f2_evals, r.time_s, r.residual, r.abs_err);
    } else {
      std::snprintf(buf, sizeof buf, "%llu,%s,%ld,-1,-1,-1,-1,-1,%g,%g,%g\n",
                    static_cast<unsigned long long>(r.instance), to_string(r.algo), r.n, nan, nan, nan);
    }
    out << buf;
  }
}

void write_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("write_csv: cannot open " + path.string());
  write_csv(records, out);
}

std::vector<RunRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("read_csv: cannot open " + path.string());
  std::string line;
  int lineno = 1;
  if (!std::getline(in, line) || line != kCsvHeader) throw ParseError("unexpected CSV header", lineno);
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string tok; std::getline(ss, tok, ',');) f.push_back(tok);
    if (f.size() != 11) throw ParseError("expected 11 fields", lineno);
    RunRecord r;
    try {
      r.instance = std::stoull(f[0]);
      const auto algo = parse_algo(f[1]);
      if (!algo) throw ParseError("unknown algo '" + f[1] + "'", lineno);
      r.algo = *algo;
      r.n = std::stol(f[2]);
      r.iters = std::stol(f[3]);
      r.extragrad = std::stol(f[4]);
      r.null_steps = std::stol(f[5]);
      r.inner = std::stol(f[6]);
      r.f2_evals = std::stol(f[7]);
      r.time_s = std::strtod(f[8].c_str(), nullptr);
      r.residual = std::strtod(f[9].c_str(), nullptr);
      r.abs_err = std::strtod(f[10].c_str(), nullptr);
    } catch (const std::logic_error&) {
      throw ParseError("malformed number", lineno);
    }
    if (r.iters < 0) r.error = "failed";
    out.push_back(std::move(r));
  }
  return out;
}

void write_trace(const std::vector<RunRecord>& records, std::ostream& out) {
  char buf[256];
  for (const auto& r : records) {
    out << "# instance " << r.instance << '\n';
    for (const auto& t : r.trace) {
      std::snprintf(buf, sizeof buf, "%ld,%s,%.17g,%.17g,%.17g\n", t.k, to_string(t.type), t.tau, t.residual,
                    t.eps_b);
      out << buf;
    }
  }
}

}  // namespace opsplit
