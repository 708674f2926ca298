#include "netinfer/sdsm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netinfer/errors.hpp"

namespace netinfer {

Matrix NullModelProbabilities::cell_probs() const {
  Matrix m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) m.at(i, k) = cell(i, k);
  return m;
}

NullModelProbabilities fit_null_model(const std::vector<int>& row_sums,
                                      const std::vector<int>& col_sums,
                                      const SdsmConfig& config) {
  const int n = static_cast<int>(row_sums.size());
  const int g = static_cast<int>(col_sums.size());
  if (n < 1 || g < 1) throw ValidationError("null model requires at least one row and column");
  if (config.solver_tolerance <= 0.0) throw ValidationError("solver tolerance must be positive");
  if (config.solver_max_iterations < 1)
    throw ValidationError("solver max iterations must be positive");

  std::int64_t row_total = 0, col_total = 0;
  for (int r : row_sums) {
    if (r < 0 || r > g) throw ValidationError("row sum outside [0, G]");
    row_total += r;
  }
  for (int c : col_sums) {
    if (c < 0 || c > n) throw ValidationError("column sum outside [0, N]");
    col_total += c;
  }
  if (row_total != col_total)
    throw ValidationError("margin totals disagree: rows " + std::to_string(row_total) +
                          " vs columns " + std::to_string(col_total));

  NullModelProbabilities out;
  out.rows_ = n;
  out.cols_ = g;
  out.row_fix_time_.assign(n, -1);
  out.col_fix_time_.assign(g, -1);
  out.row_fix_value_.assign(n, 0);
  out.col_fix_value_.assign(g, 0);
  out.x_.assign(n, 0.0);
  out.y_.assign(g, 0.0);

  // Peel degenerate margins. An empty/full row pins its remaining cells to
  // 0/1 and, for full rows, occupies one slot in every active column. The
  // fixing order matters for cells whose row and column are both peeled:
  // the earlier event decides, which the cell() accessor replays.
  std::vector<std::int64_t> r(row_sums.begin(), row_sums.end());
  std::vector<std::int64_t> c(col_sums.begin(), col_sums.end());
  int active_rows = n, active_cols = g;
  int event = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      if (out.row_fix_time_[i] >= 0) continue;
      if (r[i] < 0 || r[i] > active_cols) throw ValidationError("infeasible margins");
      if (r[i] == 0) {
        out.row_fix_time_[i] = event++;
        out.row_fix_value_[i] = 0;
        --active_rows;
        changed = true;
      } else if (r[i] == active_cols) {
        out.row_fix_time_[i] = event++;
        out.row_fix_value_[i] = 1;
        --active_rows;
        for (int k = 0; k < g; ++k)
          if (out.col_fix_time_[k] < 0) --c[k];
        changed = true;
      }
    }
    for (int k = 0; k < g; ++k) {
      if (out.col_fix_time_[k] >= 0) continue;
      if (c[k] < 0 || c[k] > active_rows) throw ValidationError("infeasible margins");
      if (c[k] == 0) {
        out.col_fix_time_[k] = event++;
        out.col_fix_value_[k] = 0;
        --active_cols;
        changed = true;
      } else if (c[k] == active_rows) {
        out.col_fix_time_[k] = event++;
        out.col_fix_value_[k] = 1;
        --active_cols;
        for (int i = 0; i < n; ++i)
          if (out.row_fix_time_[i] < 0) --r[i];
        changed = true;
      }
    }
  }

  if (active_rows == 0 || active_cols == 0) {
    out.converged_ = true;
    out.max_residual_ = 0.0;
    return out;
  }

  // Compress the reduced system by unique margin value; multipliers depend
  // on a row/column only through its residual margin.
  std::vector<std::int64_t> row_vals, col_vals;
  for (int i = 0; i < n; ++i)
    if (out.row_fix_time_[i] < 0) row_vals.push_back(r[i]);
  for (int k = 0; k < g; ++k)
    if (out.col_fix_time_[k] < 0) col_vals.push_back(c[k]);
  std::sort(row_vals.begin(), row_vals.end());
  row_vals.erase(std::unique(row_vals.begin(), row_vals.end()), row_vals.end());
  std::sort(col_vals.begin(), col_vals.end());
  col_vals.erase(std::unique(col_vals.begin(), col_vals.end()), col_vals.end());

  const int nr = static_cast<int>(row_vals.size());
  const int nc = static_cast<int>(col_vals.size());
  std::vector<double> rm(nr, 0.0), cm(nc, 0.0);  // class multiplicities
  auto row_class = [&](std::int64_t v) {
    return static_cast<int>(std::lower_bound(row_vals.begin(), row_vals.end(), v) -
                            row_vals.begin());
  };
  auto col_class = [&](std::int64_t v) {
    return static_cast<int>(std::lower_bound(col_vals.begin(), col_vals.end(), v) -
                            col_vals.begin());
  };
  for (int i = 0; i < n; ++i)
    if (out.row_fix_time_[i] < 0) rm[row_class(r[i])] += 1.0;
  for (int k = 0; k < g; ++k)
    if (out.col_fix_time_[k] < 0) cm[col_class(c[k])] += 1.0;

  double total = 0.0;
  for (int i = 0; i < n; ++i)
    if (out.row_fix_time_[i] < 0) total += static_cast<double>(r[i]);

  std::vector<double> x(nr), y(nc);
  for (int a = 0; a < nr; ++a) x[a] = static_cast<double>(row_vals[a]) / std::sqrt(total);
  for (int d = 0; d < nc; ++d) y[d] = static_cast<double>(col_vals[d]) / std::sqrt(total);

  auto residual_of = [&](const std::vector<double>& xs, const std::vector<double>& ys) {
    double worst = 0.0;
    for (int a = 0; a < nr; ++a) {
      double s = 0.0;
      for (int d = 0; d < nc; ++d) {
        const double xy = xs[a] * ys[d];
        s += cm[d] * xy / (1.0 + xy);
      }
      worst = std::max(worst, std::abs(s - static_cast<double>(row_vals[a])));
    }
    for (int d = 0; d < nc; ++d) {
      double s = 0.0;
      for (int a = 0; a < nr; ++a) {
        const double xy = xs[a] * ys[d];
        s += rm[a] * xy / (1.0 + xy);
      }
      worst = std::max(worst, std::abs(s - static_cast<double>(col_vals[d])));
    }
    return worst;
  };

  double prev_residual = residual_of(x, y);
  bool converged = prev_residual < config.solver_tolerance;
  int iter = 0;
  while (!converged && iter < config.solver_max_iterations) {
    const std::vector<double> x_old = x, y_old = y;
    for (int a = 0; a < nr; ++a) {
      double denom = 0.0;
      for (int d = 0; d < nc; ++d) denom += cm[d] * y[d] / (1.0 + x[a] * y[d]);
      x[a] = static_cast<double>(row_vals[a]) / denom;
    }
    for (int d = 0; d < nc; ++d) {
      double denom = 0.0;
      for (int a = 0; a < nr; ++a) denom += rm[a] * x[a] / (1.0 + x[a] * y[d]);
      y[d] = static_cast<double>(col_vals[d]) / denom;
    }
    double residual = residual_of(x, y);
    if (residual > prev_residual) {
      // Oscillating; take the half step instead.
      for (int a = 0; a < nr; ++a) x[a] = 0.5 * (x[a] + x_old[a]);
      for (int d = 0; d < nc; ++d) y[d] = 0.5 * (y[d] + y_old[d]);
      residual = residual_of(x, y);
    }
    prev_residual = residual;
    converged = residual < config.solver_tolerance;
    ++iter;
  }

  out.max_residual_ = prev_residual;
  out.converged_ = converged;
  if (!converged)
    throw ComputeError("null model fixed point did not converge after " +
                       std::to_string(config.solver_max_iterations) +
                       " iterations; max margin residual " + std::to_string(prev_residual));

  for (int i = 0; i < n; ++i)
    if (out.row_fix_time_[i] < 0) out.x_[i] = x[row_class(r[i])];
  for (int k = 0; k < g; ++k)
    if (out.col_fix_time_[k] < 0) out.y_[k] = y[col_class(c[k])];
  return out;
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double exact_upper_tail(std::span<const double> probs, std::int64_t k) {
  // Truncated convolution: carry the mass of {X = 0..k-1} and accumulate
  // anything that crosses into {X >= k}.
  std::vector<double> pmf(static_cast<std::size_t>(k), 0.0);
  pmf[0] = 1.0;
  double tail = 0.0;
  for (double p : probs) {
    if (p == 0.0) continue;
    tail += pmf[k - 1] * p;
    for (std::int64_t j = k - 1; j >= 1; --j) pmf[j] = pmf[j] * (1.0 - p) + pmf[j - 1] * p;
    pmf[0] *= 1.0 - p;
  }
  return std::clamp(tail, 0.0, 1.0);
}

double refined_normal_upper_tail(std::span<const double> probs, std::int64_t k) {
  double mu = 0.0, var = 0.0, m3 = 0.0;
  for (double p : probs) {
    const double q = p * (1.0 - p);
    mu += p;
    var += q;
    m3 += q * (1.0 - 2.0 * p);
  }
  if (var < 1e-300) {
    // All probabilities 0 or 1: the count is deterministic.
    return (static_cast<double>(k) <= mu + 0.5) ? 1.0 : 0.0;
  }
  const double sigma = std::sqrt(var);
  const double gamma = m3 / (sigma * sigma * sigma);
  const double z = (static_cast<double>(k) - 0.5 - mu) / sigma;
  double cdf = normal_cdf(z) + gamma * (1.0 - z * z) * normal_pdf(z) / 6.0;
  cdf = std::clamp(cdf, 0.0, 1.0);
  return 1.0 - cdf;
}

}  // namespace

double poisson_binomial_upper_tail(std::span<const double> probs, std::int64_t k,
                                   PValueMethod method) {
  if (k < 0) throw ValidationError("poisson_binomial_upper_tail: k must be >= 0");
  for (double p : probs)
    if (!(p >= 0.0 && p <= 1.0))
      throw ValidationError("poisson_binomial_upper_tail: probabilities must lie in [0,1]");
  if (k == 0) return 1.0;
  if (k > static_cast<std::int64_t>(probs.size())) return 0.0;
  if (method == PValueMethod::auto_pick) {
    method = probs.size() <= static_cast<std::size_t>(kExactAutoMaxLength)
                 ? PValueMethod::exact
                 : PValueMethod::refined_normal;
  }
  return method == PValueMethod::exact ? exact_upper_tail(probs, k)
                                       : refined_normal_upper_tail(probs, k);
}

SdsmAnalysis analyze_sdsm(const BipartiteMembership& b, const SdsmConfig& config) {
  SdsmAnalysis a;
  a.agent_count = b.agent_count();
  const int n = b.agent_count();
  const int g = b.group_count();
  a.projection = project(b);
  a.null_model = fit_null_model(b.membership_counts(), b.group_sizes(), config);
  a.engine = config.pvalue_method;
  if (a.engine == PValueMethod::auto_pick)
    a.engine = g <= kExactAutoMaxLength ? PValueMethod::exact : PValueMethod::refined_normal;

  Matrix probs = a.null_model.cell_probs();
  a.upper_pvalues.assign(static_cast<std::size_t>(n) * (n - 1) / 2, 1.0);
  std::vector<double> q(static_cast<std::size_t>(g));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const std::int32_t w = a.projection.weight(i, j);
      if (w == 0) continue;  // Pr(X >= 0) = 1, never significant
      for (int k = 0; k < g; ++k) q[static_cast<std::size_t>(k)] = probs.at(i, k) * probs.at(j, k);
      a.upper_pvalues[dyad_index(i, j, n)] = poisson_binomial_upper_tail(q, w, a.engine);
    }
  }
  return a;
}

UndirectedGraph backbone_from_analysis(const SdsmAnalysis& analysis, const SdsmConfig& config) {
  if (config.alpha <= 0.0 || config.alpha >= 1.0)
    throw ValidationError("alpha must lie in (0,1)");
  const int n = analysis.agent_count;
  const double threshold =
      config.tail == TailRule::two_sided_split ? config.alpha / 2.0 : config.alpha;
  const std::size_t n_dyads = analysis.upper_pvalues.size();

  std::vector<char> significant(n_dyads, 0);
  switch (config.correction) {
    case Correction::none:
      for (std::size_t d = 0; d < n_dyads; ++d)
        significant[d] = analysis.upper_pvalues[d] < threshold;
      break;
    case Correction::bonferroni:
      for (std::size_t d = 0; d < n_dyads; ++d)
        significant[d] = analysis.upper_pvalues[d] * static_cast<double>(n_dyads) < threshold;
      break;
    case Correction::holm: {
      std::vector<std::size_t> order(n_dyads);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return analysis.upper_pvalues[a] < analysis.upper_pvalues[b];
      });
      for (std::size_t rank = 0; rank < n_dyads; ++rank) {
        const std::size_t d = order[rank];
        if (analysis.upper_pvalues[d] * static_cast<double>(n_dyads - rank) < threshold)
          significant[d] = 1;
        else
          break;  // step-down stops at the first failure
      }
      break;
    }
  }

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (significant[dyad_index(i, j, n)]) edges.emplace_back(i, j);
  return UndirectedGraph(n, edges);
}

UndirectedGraph sdsm_backbone(const BipartiteMembership& b, const SdsmConfig& config) {
  return backbone_from_analysis(analyze_sdsm(b, config), config);
}

}  // namespace netinfer
