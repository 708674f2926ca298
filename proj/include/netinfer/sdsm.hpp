#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "netinfer/graph.hpp"
#include "netinfer/groups.hpp"
#include "netinfer/matrix.hpp"
#include "netinfer/projection.hpp"

namespace netinfer {

enum class TailRule {
  upper_one_sided,   // retain when Pr(X >= w) < alpha
  two_sided_split,   // retain when Pr(X >= w) < alpha / 2
};

enum class PValueMethod {
  exact,           // truncated convolution of the Poisson-binomial mass
  refined_normal,  // skewness-corrected normal tail with continuity correction
  auto_pick,       // exact up to kExactAutoMaxLength probabilities, else refined
};

enum class Correction { none, bonferroni, holm };

// Above this many Bernoulli terms, auto_pick switches from the exact
// convolution to the refined normal approximation.
inline constexpr int kExactAutoMaxLength = 1024;

struct SdsmConfig {
  double alpha = 0.05;
  TailRule tail = TailRule::upper_one_sided;
  PValueMethod pvalue_method = PValueMethod::auto_pick;
  Correction correction = Correction::none;
  double solver_tolerance = 1e-8;
  int solver_max_iterations = 10000;
};

// Maximum-entropy bipartite null: independent Bernoulli cells with
// p_ik = x_i * y_k / (1 + x_i * y_k), multipliers solved so that expected
// margins reproduce the observed ones. Degenerate margins (empty/full rows
// or columns) are peeled off before solving and their cells pinned to 0/1.
class NullModelProbabilities {
 public:
  NullModelProbabilities() = default;

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool converged() const { return converged_; }
  double max_constraint_residual() const { return max_residual_; }

  double cell(int i, int k) const {
    const int rt = row_fix_time_[i], ct = col_fix_time_[k];
    if (rt >= 0 && (ct < 0 || rt < ct)) return static_cast<double>(row_fix_value_[i]);
    if (ct >= 0) return static_cast<double>(col_fix_value_[k]);
    const double xy = x_[i] * y_[k];
    return xy / (1.0 + xy);
  }

  Matrix cell_probs() const;

 private:
  friend NullModelProbabilities fit_null_model(const std::vector<int>&, const std::vector<int>&,
                                               const SdsmConfig&);
  int rows_ = 0, cols_ = 0;
  bool converged_ = false;
  double max_residual_ = 0.0;
  std::vector<double> x_, y_;
  std::vector<int> row_fix_time_, col_fix_time_;    // -1 while free
  std::vector<std::int8_t> row_fix_value_, col_fix_value_;
};

// row_sums: per-agent membership counts (length N); col_sums: group sizes
// (length G). Totals must agree. Throws ComputeError (carrying the residual)
// when the fixed point does not reach solver_tolerance.
NullModelProbabilities fit_null_model(const std::vector<int>& row_sums,
                                      const std::vector<int>& col_sums,
                                      const SdsmConfig& config = {});

// Pr(X >= k) for X a sum of independent Bernoulli(probs) variables.
double poisson_binomial_upper_tail(std::span<const double> probs, std::int64_t k,
                                   PValueMethod method = PValueMethod::exact);

inline std::size_t dyad_index(int i, int j, int n) {
  // i < j; row-major upper triangle.
  return static_cast<std::size_t>(i) * n - static_cast<std::size_t>(i) * (i + 1) / 2 + (j - i - 1);
}

struct SdsmAnalysis {
  int agent_count = 0;
  WeightedProjection projection;
  NullModelProbabilities null_model;
  std::vector<double> upper_pvalues;  // per dyad i<j, Pr(X >= observed weight)
  PValueMethod engine = PValueMethod::exact;  // engine actually used
};

SdsmAnalysis analyze_sdsm(const BipartiteMembership& b, const SdsmConfig& config = {});
UndirectedGraph backbone_from_analysis(const SdsmAnalysis& analysis, const SdsmConfig& config);

// Unweighted backbone of statistically significant co-membership counts.
UndirectedGraph sdsm_backbone(const BipartiteMembership& b, const SdsmConfig& config = {});

}  // namespace netinfer
