#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netinfer/generators.hpp"
#include "netinfer/sdsm.hpp"

namespace netinfer {

enum class InferenceMethod { projection, sdsm };

const char* method_token(InferenceMethod m);
InferenceMethod parse_method(std::string_view token);

// Deterministic, collision-resistant seed derivation: a splitmix64
// finalizer chain over the master seed and the index tuple. Documented in
// the README together with the frozen test vector for (0, [0]).
std::uint64_t derive_seed(std::uint64_t master, std::span<const std::uint64_t> indices);
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> indices);

// Cell seeds depend on the cell's identity (network name, multiplier,
// fidelity, method), not on its position in a design, so removing cells
// from a design leaves the remaining cells' results unchanged.
std::uint64_t cell_seed(std::uint64_t master, std::string_view network, double multiplier,
                        double p_clique, InferenceMethod method);

struct ExperimentDesign {
  std::vector<NetworkSpec> networks;
  std::vector<double> multipliers = {1, 2, 5, 10, 20, 50};
  std::vector<double> p_values = {0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<InferenceMethod> methods = {InferenceMethod::projection, InferenceMethod::sdsm};
  int replications = 1000;
  std::uint64_t master_seed = 1;
  SdsmConfig sdsm;
  int min_clique_size = 2;
  bool replacement_from_all = false;

  std::size_t cell_count() const {
    return networks.size() * multipliers.size() * p_values.size() * methods.size();
  }

  // The ten-network full factorial with default factor levels.
  static ExperimentDesign full_factorial();
};

struct CellResult {
  std::string network;
  double multiplier = 1.0;
  double p_clique = 1.0;
  InferenceMethod method = InferenceMethod::projection;

  int replications_run = 0;
  int aborted = 0;
  int undefined_r = 0, undefined_kappa = 0, undefined_jaccard = 0;
  std::optional<double> mean_r, sd_r;
  std::optional<double> mean_kappa, sd_kappa;
  std::optional<double> mean_jaccard, sd_jaccard;

  // Covariates, averaged over completed replications.
  double size = 0.0;
  double density = 0.0;
  double transitivity = 0.0;
  double n_maximal_cliques = 0.0;
  double mean_group_size = 0.0;
  double mean_memberships = 0.0;
  std::int64_t groups_observed = 0;
};

struct CellRunContext {
  SdsmConfig sdsm;
  int min_clique_size = 2;
  bool replacement_from_all = false;
  int threads = 1;
  std::optional<std::filesystem::path> data_dir;
};

// Runs one experimental condition: per replication, draw (or reuse) the
// truth network, synthesize round(multiplier*N) groups at fidelity p_clique,
// infer with the chosen method and score against the truth. Synthetic
// truths are redrawn each replication; empirical truths are fixed.
// Replications failing with an error are counted as aborted; more than 1%
// aborted fails the cell with a ComputeError.
CellResult run_cell(const NetworkSpec& truth_spec, double multiplier, double p_clique,
                    InferenceMethod method, int replications, std::uint64_t seed,
                    const CellRunContext& ctx);

struct RunOptions {
  int threads = 0;  // 0 = hardware concurrency
  std::ostream* progress = nullptr;
  int progress_stride = 1;  // print every Nth cell
  std::optional<std::filesystem::path> data_dir;
};

// Every cell exactly once, in canonical order (network, multiplier,
// p_clique, method); results are independent of thread count.
std::vector<CellResult> run_design(const ExperimentDesign& design, const RunOptions& opts = {});

// CSV-backed variant used by the CLI: appends each finished cell to
// out_csv, then rewrites the file in canonical order. With resume=true,
// cells already present in out_csv are kept and skipped. A sidecar
// "<out_csv>.manifest" records the full effective configuration.
void run_design_to_csv(const ExperimentDesign& design, const std::filesystem::path& out_csv,
                       const RunOptions& opts = {}, bool resume = false);

// --- results CSV -----------------------------------------------------------

std::string results_csv_header();
std::string cell_to_csv(const CellResult& cell);
CellResult cell_from_csv(std::string_view line);
void write_results_csv(const std::filesystem::path& path, const std::vector<CellResult>& cells);
std::vector<CellResult> read_results_csv(const std::filesystem::path& path);

// --- design config ---------------------------------------------------------

// Plain-text "key = value" format; see README for the key list.
ExperimentDesign parse_design_config(std::string_view text);
std::string design_to_config(const ExperimentDesign& design);

// --- regression ------------------------------------------------------------

struct RegressionSummary {
  std::vector<std::string> predictors;
  std::vector<double> coef_b;     // unstandardized
  std::vector<double> coef_beta;  // standardized: beta_j = B_j * sd(x_j) / sd(y)
  double intercept = 0.0;
  double r_squared = 0.0;
  int n_rows = 0;
};

// OLS with intercept via normal equations on internally standardized
// predictors. Throws ValidationError when a predictor has fewer than two
// distinct values or the design matrix is rank deficient (naming the
// offending predictor).
RegressionSummary ols_regression(const std::vector<std::string>& names,
                                 const std::vector<std::vector<double>>& columns,
                                 const std::vector<double>& y);

// How replications with an undefined correlation (e.g. empty backbones)
// enter the regression outcome: dropped from the cell mean, or counted as
// zero correlation. The per-cell CSV always stores drop-based means plus
// the undefined count, so either outcome is recomputable.
enum class UndefinedPolicy { zero_fill, drop };

// Predicts cell-mean correlation from truth topology and group
// characteristics over the cells of one method (or all cells when no
// filter is given). The groups-observed predictor is measured in groups
// per node (the design multiplier). Cells with no defined replication at
// all are skipped.
RegressionSummary fit_regression(const std::vector<CellResult>& cells,
                                 std::optional<InferenceMethod> filter,
                                 UndefinedPolicy policy = UndefinedPolicy::zero_fill);

// --- numeric helpers -------------------------------------------------------

// Welford accumulator; sample (n-1) standard deviation.
struct RunningStat {
  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
  }
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  std::optional<double> mean_opt() const {
    return n > 0 ? std::optional<double>(mean) : std::nullopt;
  }
  std::optional<double> sd_opt() const;
};

// Shortest round-trip decimal rendering (std::to_chars), so CSV output is
// byte-stable.
std::string format_double(double v);

}  // namespace netinfer
