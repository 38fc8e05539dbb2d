#ifndef OPSPLIT_BENCH_HPP
#define OPSPLIT_BENCH_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "opsplit/inexact_drs.hpp"

namespace opsplit {

enum class Algo { kDrt, kRfdrs, kTos };
enum class BenchStop { kDelta, kResidual };

const char* to_string(Algo a);
const char* to_string(BenchStop s);
std::optional<Algo> parse_algo(const std::string& s);
std::optional<BenchStop> parse_stop(const std::string& s);

struct BenchSpec {
  long n = 100;
  long instances = 100;
  bool definite = true;
  Algo algo = Algo::kDrt;
  BenchStop stop = BenchStop::kDelta;
  double tol = 1e-6;
  double sigma = 0.99;
  double theta = 0.01;
  std::uint64_t seed = 1;
  int jobs = 1;
  /// Outer-iteration cap for drt, iteration cap for the baselines.
  long max_iter = 100000;
  /// Keep per-iteration traces (drt) and assert |z_k - z_{k-1}| = |x_k - y_k|
  /// on every extragradient step.
  bool trace = false;
  /// Compute |z_k - z*| against the reference solution.
  bool compute_error = true;
  /// Use |z0 - P_X z0 + Q z0 + e| instead of |z0 - P_X z0 + Q z0| in tau0.
  bool tau_with_linear_term = false;

  void validate() const;
};

struct RunRecord {
  std::uint64_t instance = 0;  // instance seed
  Algo algo = Algo::kDrt;
  long n = 0;
  long iters = 0;
  long extragrad = 0;
  long null_steps = 0;
  long inner = 0;
  long f2_evals = 0;
  double time_s = 0.0;
  double residual = 0.0;
  double abs_err = 0.0;
  double setup_time_s = 0.0;  // instance generation and constant estimation
  std::string error;          // non-empty when the solve failed
  std::vector<DrsTraceRecord> trace;

  bool ok() const { return error.empty(); }
};

/// Solves instance i with seed = spec.seed + i for i in [0, instances).
/// Failed solves produce a record with `error` set; the batch continues.
std::vector<RunRecord> run_batch(const BenchSpec& spec);

/// One record of the batch, run in isolation.
RunRecord run_instance(const BenchSpec& spec, std::uint64_t instance_seed);

struct ColumnStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

inline constexpr std::array<const char*, 8> kSummaryColumns = {
    "iters", "extragrad", "null", "inner", "f2_evals", "time_s", "residual", "abs_err"};

struct Summary {
  std::string algo;
  long n = 0;
  long count = 0;
  long failed = 0;
  std::array<ColumnStats, kSummaryColumns.size()> columns{};

  const ColumnStats& column(const std::string& name) const;
};

/// Min/max/mean of each numeric column over the successful records.
/// Throws InputError when there are none.
Summary summarize(const std::vector<RunRecord>& records);

std::string format_summary(const Summary& s);
std::string summary_csv(const Summary& s);

inline constexpr const char* kCsvHeader =
    "instance,algo,n,iters,extragrad,null,inner,f2_evals,time_s,residual,abs_err";

void write_csv(const std::vector<RunRecord>& records, std::ostream& out);
void write_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);
/// Parses a file written by write_csv. Throws ParseError.
std::vector<RunRecord> read_csv(const std::filesystem::path& path);

/// One "k,type,tau,residual,eps_b" line per outer iteration, each instance
/// preceded by a "# instance <seed>" line.
void write_trace(const std::vector<RunRecord>& records, std::ostream& out);

}  // namespace opsplit

#endif  // OPSPLIT_BENCH_HPP
