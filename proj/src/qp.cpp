#include "opsplit/qp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "opsplit/errors.hpp"

namespace opsplit {

void QpInstance::validate() const {
  const auto n = k.size();
  if (n < 1) throw InputError("QpInstance: empty instance");
  if (Q.rows() != n || Q.cols() != n) throw InputError("QpInstance: Q has the wrong shape");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (k[i] != 1.0 && k[i] != -1.0) throw InputError("QpInstance: sign row entries must be +-1");
  }
  const double scale = 1.0 + Q.cwiseAbs().maxCoeff();
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InputError("QpInstance: Q is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Q, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) throw InputError("QpInstance: Q is not PSD");
}

QpInstance generate_instance(long n, bool definite, std::uint64_t seed) {
  if (n < 1) throw InputError("generate_instance: n must be >= 1");
  Rng rng(seed);
  std::normal_distribution<double> normal;
  const long rows = definite ? n : (n + 1) / 2;
  Matrix m(rows, n);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < n; ++j) m(i, j) = normal(rng);
  QpInstance inst;
  inst.Q = m.transpose() * m / static_cast<double>(n);
  inst.Q = (0.5 * (inst.Q + inst.Q.transpose())).eval();
  if (definite) inst.Q += Matrix::Identity(n, n);
  inst.k.resize(n);
  for (long i = 0; i < n; ++i) inst.k[i] = (rng() & 1U) ? 1.0 : -1.0;
  inst.definite = definite;
  inst.seed = seed;
  return inst;
}

Point initial_point(const QpInstance& inst) {
  Rng rng(inst.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Point lo = inst.lo();
  const Point hi = inst.hi();
  Point z(inst.n());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = lo[i] + unit(rng) * (hi[i] - lo[i]);
  return z;
}

double initial_tau(const QpInstance& inst, const Point& z0, bool include_linear_term) {
  require_same_dim(z0, inst.k, "initial_tau");
  Point w = z0 - z0.cwiseMax(inst.lo()).cwiseMin(inst.hi()) + inst.Q * z0;
  if (include_linear_term) w += inst.e();
  return std::pow(w.norm(), 3) + 1.0;
}

// ---------------------------------------------------------------------------

double spectral_norm_psd(const std::function<Point(const Point&)>& apply, Eigen::Index n,
                         const PowerMethodOptions& opts) {
  Rng rng(20180601);
  std::normal_distribution<double> normal;
  Point x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = normal(rng);
  Point y = apply(x);
  // Start from the range of the map so a projector inside it does not stall us.
  if (y.norm() == 0.0) return 0.0;
  x = y / y.norm();
  double rq = 0.0;
  for (long it = 0; it < opts.max_iter; ++it) {
    y = apply(x);
    const double next = x.dot(y);
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;
    x = y / ny;
    if (it > 0 && std::abs(next - rq) <= opts.rel_tol * std::abs(next)) return next;
    rq = next;
  }
  return rq;
}

double estimate_eta(const Matrix& Q, const PowerMethodOptions& opts) {
  const double norm = spectral_norm_psd([&Q](const Point& z) -> Point { return Q * z; }, Q.rows(), opts);
  return norm > 0.0 ? 1.0 / norm : std::numeric_limits<double>::infinity();
}

double estimate_beta_V(const Matrix& Q, const Point& k, const PowerMethodOptions& opts) {
  auto apply = [&Q, &k](const Point& z) -> Point {
    return project_nullspace(k, Q * project_nullspace(k, z));
  };
  const double norm = spectral_norm_psd(apply, Q.rows(), opts);
  return norm > 0.0 ? 1.0 / norm : std::numeric_limits<double>::infinity();
}

QpOperators make_operators(const QpInstance& inst) { return make_operators(inst, estimate_eta(inst.Q)); }

QpOperators make_operators(const QpInstance& inst, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InputError("make_operators: eta must be positive and finite");
  QpOperators ops;
  ops.A = std::make_unique<NullspaceNormalCone>(inst.k);
  ops.C = std::make_unique<BoxNormalCone>(inst.lo(), inst.hi());
  ops.F1 = zero_lipschitz_map();
  ops.F2 = affine_cocoercive(inst.Q, inst.e(), eta);
  ops.F2_graph = std::make_unique<AffineOperator>(inst.Q, inst.e());
  ops.eta = eta;
  return ops;
}

DrtProblem make_drt_problem(const QpOperators& ops, double sigma, double theta, double tau0) {
  DrtProblem p;
  p.A = ops.A.get();
  p.C = ops.C.get();
  p.F1 = ops.F1;
  p.F2 = ops.F2;
  p.cfg.sigma = sigma;
  p.cfg.theta = theta;
  p.cfg.gamma = 2.0 * ops.eta * sigma * sigma;
  p.cfg.tau0 = tau0;
  p.cfg.max_iter = 100000;
  return p;
}

// ---------------------------------------------------------------------------

Point kkt_enumeration_solution(const QpInstance& inst) {
  inst.validate();
  const long n = inst.n();
  if (n > 8) throw InputError("kkt_enumeration_solution: n too large for enumeration");
  const Point lo = inst.lo();
  const Point hi = inst.hi();
  const Point e = inst.e();
  constexpr double kTol = 1e-9;

  long patterns = 1;
  for (long i = 0; i < n; ++i) patterns *= 3;

  bool found = false;
  Point best;
  double best_obj = 0.0;
  std::vector<int> status(n);
  for (long code = 0; code < patterns; ++code) {
    long c = code;
    std::vector<long> free_idx;
    Point z = Point::Zero(n);
    for (long i = 0; i < n; ++i) {
      status[i] = static_cast<int>(c % 3);
      c /= 3;
      if (status[i] == 0) z[i] = lo[i];
      else if (status[i] == 1) z[i] = hi[i];
      else free_idx.push_back(i);
    }
    const long f = static_cast<long>(free_idx.size());
    // Unknowns: z_F and the equality multiplier.
    Matrix kkt = Matrix::Zero(f + 1, f + 1);
    Point rhs = Point::Zero(f + 1);
    double k_fixed = 0.0;
    for (long i = 0; i < n; ++i) if (status[i] != 2) k_fixed += inst.k[i] * z[i];
    for (long r = 0; r < f; ++r) {
      const long i = free_idx[r];
      for (long s = 0; s < f; ++s) kkt(r, s) = inst.Q(i, free_idx[s]);
      kkt(r, f) = inst.k[i];
      kkt(f, r) = inst.k[i];
      double fixed = 0.0;
      for (long j = 0; j < n; ++j) if (status[j] != 2) fixed += inst.Q(i, j) * z[j];
      rhs[r] = -e[i] - fixed;
    }
    rhs[f] = -k_fixed;
    const Point sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    if ((kkt * sol - rhs).norm() > kTol * (1.0 + rhs.norm())) continue;
    for (long r = 0; r < f; ++r) z[free_idx[r]] = sol[r];
    const double lambda = sol[f];

    if (std::abs(inst.k.dot(z)) > kTol * (1.0 + z.norm())) continue;
    bool ok = true;
    const Point g = inst.Q * z + e + lambda * inst.k;
    for (long i = 0; i < n && ok; ++i) {
      if (status[i] == 2) ok = z[i] >= lo[i] - kTol && z[i] <= hi[i] + kTol;
      else if (status[i] == 0) ok = g[i] >= -kTol;
      else ok = g[i] <= kTol;
    }
    if (!ok) continue;
    z = z.cwiseMax(lo).cwiseMin(hi);
    const double obj = inst.objective(z);
    const double tie = 1e-12 * (1.0 + std::abs(obj));
    if (!found || obj < best_obj - tie || (std::abs(obj - best_obj) <= tie && z.norm() < best.norm())) {
      found = true;
      best = z;
      best_obj = obj;
    }
  }
  if (!found) throw OracleError("kkt_enumeration_solution: no KKT point found");
  return best;
}

Point reference_solution(const QpInstance& inst, const ReferenceOptions& opts) {
  if (inst.n() <= 6) return kkt_enumeration_solution(inst);
  inst.validate();
  // Three-operator fixed-point iteration: x_B = P_X(z),
  // x_A = P_M(2 x_B - z - gamma (Q x_B + e)), z += x_A - x_B.
  const double eta = estimate_eta(inst.Q);
  const double gamma = std::isfinite(eta) ? eta : 1.0;
  const Point lo = inst.lo();
  const Point hi = inst.hi();
  const Point e = inst.e();
  Point z = Point::Zero(inst.n());
  for (long it = 0; it < opts.max_iter; ++it) {
    const Point xb = z.cwiseMax(lo).cwiseMin(hi);
    const Point xa = project_nullspace(inst.k, 2.0 * xb - z - gamma * (inst.Q * xb + e));
    const Point step = xa - xb;
    z += step;
    if (step.norm() <= opts.tol) return z.cwiseMax(lo).cwiseMin(hi);
  }
  throw OracleError("reference_solution: iteration cap reached");
}

Point box_qp_solution(const QpInstance& inst, const ReferenceOptions& opts) {
  const double eta = estimate_eta(inst.Q);
  const double step = std::isfinite(eta) ? eta : 1.0;
  const Point lo = inst.lo();
  const Point hi = inst.hi();
  const Point e = inst.e();
  Point x = Point::Zero(inst.n());
  for (long it = 0; it < opts.max_iter; ++it) {
    const Point next = (x - step * (inst.Q * x + e)).cwiseMax(lo).cwiseMin(hi);
    const double moved = (next - x).norm();
    x = next;
    if (moved <= opts.tol) return x;
  }
  throw OracleError("box_qp_solution: iteration cap reached");
}

double kkt_residual(const QpInstance& inst, const Point& z) {
  require_same_dim(z, inst.k, "kkt_residual");
  const long n = inst.n();
  const Point lo = inst.lo();
  const Point hi = inst.hi();
  const Point g = inst.Q * z + inst.e();
  const double box_violation = (z - z.cwiseMax(lo).cwiseMin(hi)).norm();
  const double eq_violation = std::abs(inst.k.dot(z)) / std::sqrt(static_cast<double>(n));

  // phi(lambda) = |z - P_X(z - g - lambda k)|^2 is piecewise quadratic with
  // breakpoints where a component of z - g - lambda k crosses a bound.
  auto phi = [&](double lambda) {
    const Point w = z - g - lambda * inst.k;
    return (z - w.cwiseMax(lo).cwiseMin(hi)).squaredNorm();
  };
  std::vector<double> breaks;
  for (long i = 0; i < n; ++i) {
    breaks.push_back((z[i] - g[i] - lo[i]) * inst.k[i]);
    breaks.push_back((z[i] - g[i] - hi[i]) * inst.k[i]);
  }
  std::sort(breaks.begin(), breaks.end());
  double best = std::numeric_limits<double>::infinity();
  auto piece_min = [&](double a, double b) {
    // Three samples determine the quadratic on [a, b].
    const double m = 0.5 * (a + b);
    const double fa = phi(a), fm = phi(m), fb = phi(b);
    best = std::min({best, fa, fm, fb});
    const double h = 0.5 * (b - a);
    const double curv = (fa - 2.0 * fm + fb) / (h * h);
    if (curv > 0.0) {
      const double slope = (fb - fa) / (2.0 * h);
      const double t = m - slope / curv;
      if (t > a && t < b) best = std::min(best, phi(t));
    }
  };
  const double pad = 1.0 + std::abs(breaks.front()) + std::abs(breaks.back());
  piece_min(breaks.front() - pad, breaks.front());
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) piece_min(breaks[i], breaks[i + 1]);
  }
  piece_min(breaks.back(), breaks.back() + pad);
  return std::max({box_violation, eq_violation, std::sqrt(std::max(best, 0.0))});
}

DrsFixedPoint nearest_drs_fixed_point(const QpInstance& inst, const Point& x_star, double gamma,
                                      const Point& z0, double active_tol) {
  require_same_dim(x_star, inst.k, "nearest_drs_fixed_point");
  require_same_dim(z0, inst.k, "nearest_drs_fixed_point");
  if (!(gamma > 0.0)) throw InputError("nearest_drs_fixed_point: gamma must be positive");
  const long n = inst.n();
  const Point lo = inst.lo();
  const Point hi = inst.hi();
  const Point g = inst.Q * x_star + inst.e();
  // b = s k must satisfy s k - g in N_X(x_star), componentwise:
  // interior s k_i = g_i, lower face s k_i <= g_i, upper face s k_i >= g_i.
  double s_lo = -std::numeric_limits<double>::infinity();
  double s_hi = std::numeric_limits<double>::infinity();
  double interior_sum = 0.0;
  long interior = 0;
  for (long i = 0; i < n; ++i) {
    const double target = g[i] * inst.k[i];  // = g_i / k_i
    const bool at_lo = x_star[i] <= lo[i] + active_tol;
    const bool at_hi = x_star[i] >= hi[i] - active_tol;
    if (at_lo && at_hi) continue;
    if (!at_lo && !at_hi) {
      interior_sum += target;
      ++interior;
      continue;
    }
    // s k_i <= g_i  <=>  s <= target when k_i = +1, s >= target when k_i = -1.
    const bool upper_limit = (at_lo && inst.k[i] > 0.0) || (at_hi && inst.k[i] < 0.0);
    if (upper_limit) s_hi = std::min(s_hi, target);
    else s_lo = std::max(s_lo, target);
  }
  const double s_free = (z0 - x_star).dot(inst.k) / (gamma * static_cast<double>(n));
  double s;
  if (interior > 0) {
    s = interior_sum / static_cast<double>(interior);
  } else {
    if (s_lo > s_hi + 1e-9 * (1.0 + std::abs(s_lo))) {
      throw OracleError("nearest_drs_fixed_point: empty multiplier interval");
    }
    s = std::clamp(s_free, s_lo, std::max(s_lo, s_hi));
  }
  Point z = x_star + gamma * s * inst.k;
  const double d = (z0 - z).norm();
  return {std::move(z), d};
}

// ---------------------------------------------------------------------------

namespace {

std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

double parse_real(const std::string& tok, int line) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) throw ParseError("bad real '" + tok + "'", line);
  return v;
}

}  // namespace

void save_instance(const QpInstance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("save_instance: cannot open " + path.string());
  const long n = inst.n();
  out << n << ' ' << (inst.definite ? "definite" : "semidefinite") << ' ' << inst.seed << '\n';
  for (long i = 0; i < n; ++i) out << (i ? " " : "") << (inst.k[i] > 0 ? "1" : "-1");
  out << '\n';
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) out << (j ? " " : "") << hexfloat(inst.Q(i, j));
    out << '\n';
  }
  if (!out) throw InputError("save_instance: write failed for " + path.string());
}

QpInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("load_instance: cannot open " + path.string());
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> std::vector<std::string> {
    ++lineno;
    if (!std::getline(in, line)) throw ParseError("unexpected end of file", lineno);
    return split(line);
  };

  auto header = next_line();
  if (header.size() != 3) throw ParseError("header must be 'n definiteness seed'", lineno);
  QpInstance inst;
  long n = 0;
  try {
    std::size_t used = 0;
    n = std::stol(header[0], &used);
    if (used != header[0].size() || n < 1) throw ParseError("bad dimension", lineno);
    inst.seed = std::stoull(header[2], &used);
    if (used != header[2].size()) throw ParseError("bad seed", lineno);
  } catch (const std::logic_error&) {
    throw ParseError("bad header", lineno);
  }
  if (header[1] == "definite") inst.definite = true;
  else if (header[1] == "semidefinite") inst.definite = false;
  else throw ParseError("definiteness must be 'definite' or 'semidefinite'", lineno);

  auto signs = next_line();
  if (static_cast<long>(signs.size()) != n) throw ParseError("sign row needs n entries", lineno);
  inst.k.resize(n);
  for (long i = 0; i < n; ++i) {
    if (signs[i] == "1" || signs[i] == "+1") inst.k[i] = 1.0;
    else if (signs[i] == "-1") inst.k[i] = -1.0;
    else throw ParseError("sign entries must be 1 or -1", lineno);
  }
  inst.Q.resize(n, n);
  for (long i = 0; i < n; ++i) {
    auto row = next_line();
    if (static_cast<long>(row.size()) != n) throw ParseError("matrix row needs n entries", lineno);
    for (long j = 0; j < n; ++j) inst.Q(i, j) = parse_real(row[j], lineno);
  }
  try {
    inst.validate();
  } catch (const InputError& e) {
    throw ParseError(e.what(), lineno);
  }
  return inst;
}

}  // namespace opsplit
