#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "netinfer/errors.hpp"
#include "netinfer/generators.hpp"
#include "netinfer/groups.hpp"
#include "netinfer/rng.hpp"
#include "netinfer/sdsm.hpp"
#include "testutil.hpp"

using namespace netinfer;

namespace {

// A random feasible margin pair: the margins of an actual binary matrix.
std::pair<std::vector<int>, std::vector<int>> random_margins(Rng& rng, int n, int g) {
  const double d = 0.05 + 0.9 * rng.uniform01();
  std::vector<int> rows(n, 0), cols(g, 0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < g; ++k)
      if (rng.bernoulli(d)) {
        ++rows[i];
        ++cols[k];
      }
  return {rows, cols};
}

BipartiteMembership random_membership(Rng& rng, int n_agents, int n_groups) {
  const UndirectedGraph g = gen_random(n_agents, 0.25, rng);
  GroupGenSpec spec;
  spec.num_groups = n_groups;
  spec.p_clique = 0.4 + 0.6 * rng.uniform01();
  return generate_groups(g, spec, rng);
}

}  // namespace

TEST_CASE("poisson binomial boundary identities") {
  const std::vector<double> probs{0.2, 0.7, 0.4};
  for (PValueMethod m : {PValueMethod::exact, PValueMethod::refined_normal, PValueMethod::auto_pick}) {
    CHECK(poisson_binomial_upper_tail(probs, 0, m) == 1.0);
    CHECK(poisson_binomial_upper_tail(probs, 4, m) == 0.0);
  }
  CHECK_THROWS_AS(poisson_binomial_upper_tail(probs, -1), ValidationError);
  CHECK_THROWS_AS(poisson_binomial_upper_tail(std::vector<double>{1.5}, 1), ValidationError);
}

TEST_CASE("exact tail matches the binomial closed form on equal probabilities") {
  Rng rng(51);
  for (int L : {5, 17, 64}) {
    for (double q : {0.1, 0.5, 0.9}) {
      const std::vector<double> probs(static_cast<std::size_t>(L), q);
      for (int k = 0; k <= L + 1; ++k) {
        const double got = poisson_binomial_upper_tail(probs, k, PValueMethod::exact);
        const double want = testutil::binomial_upper_tail(L, q, k);
        CHECK(std::abs(got - want) < 1e-12);
      }
    }
  }
}

TEST_CASE("worked example: probs {0.1, 0.5, 0.9}, k = 2") {
  const std::vector<double> probs{0.1, 0.5, 0.9};
  // enumeration over the 8 outcomes gives 0.5
  CHECK(testutil::enum_upper_tail(probs, 2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(poisson_binomial_upper_tail(probs, 2, PValueMethod::exact) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("exact tail matches exhaustive enumeration up to length 16") {
  Rng rng(52);
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const int L = 1 + static_cast<int>(rng.below(16));
    std::vector<double> probs(static_cast<std::size_t>(L));
    for (double& p : probs) p = rng.uniform01();
    for (int k = 0; k <= L + 1; ++k) {
      const double got = poisson_binomial_upper_tail(probs, k, PValueMethod::exact);
      const double want = testutil::enum_upper_tail(probs, k);
      worst = std::max(worst, std::abs(got - want));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("refined normal stays close to exact on moderate lengths") {
  Rng rng(53);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int L = 16 + static_cast<int>(rng.below(49));  // 16..64
    std::vector<double> probs(static_cast<std::size_t>(L));
    for (double& p : probs) p = rng.uniform01();
    for (int k = 0; k <= L; ++k) {
      const double e = poisson_binomial_upper_tail(probs, k, PValueMethod::exact);
      const double r = poisson_binomial_upper_tail(probs, k, PValueMethod::refined_normal);
      worst = std::max(worst, std::abs(e - r));
    }
  }
  CHECK(worst < 5e-3);
}

TEST_CASE("refined normal handles degenerate probability vectors") {
  const std::vector<double> probs{1.0, 1.0, 0.0, 1.0};
  CHECK(poisson_binomial_upper_tail(probs, 3, PValueMethod::refined_normal) == 1.0);
  CHECK(poisson_binomial_upper_tail(probs, 4, PValueMethod::refined_normal) == 0.0);
}

TEST_CASE("null model: saturated incidence") {
  const NullModelProbabilities null = fit_null_model({2, 2}, {2, 2});
  CHECK(null.converged());
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) CHECK(null.cell(i, k) == 1.0);
}

TEST_CASE("null model: uniform margins give the flat solution") {
  // rows all delta*G, cols all delta*N with delta = 0.5
  const NullModelProbabilities null = fit_null_model({4, 4, 4, 4, 4, 4}, std::vector<int>(8, 3));
  CHECK(null.converged());
  CHECK(null.max_constraint_residual() < 1e-8);
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 8; ++k) CHECK(null.cell(i, k) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("null model reproduces margins on random feasible inputs") {
  Rng rng(54);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(10));
    const int g = 2 + static_cast<int>(rng.below(12));
    const auto [rows, cols] = random_margins(rng, n, g);
    const NullModelProbabilities null = fit_null_model(rows, cols);
    CHECK(null.converged());
    const Matrix probs = null.cell_probs();
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      for (int k = 0; k < g; ++k) {
        sum += probs.at(i, k);
        CHECK(probs.at(i, k) >= 0.0);
        CHECK(probs.at(i, k) <= 1.0);
      }
      CHECK(std::abs(sum - rows[static_cast<std::size_t>(i)]) < 1e-8);
    }
    for (int k = 0; k < g; ++k) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += probs.at(i, k);
      CHECK(std::abs(sum - cols[static_cast<std::size_t>(k)]) < 1e-8);
    }
  }
}

TEST_CASE("null model validates margins") {
  CHECK_THROWS_AS(fit_null_model({1, 1}, {3}), ValidationError);      // totals differ
  CHECK_THROWS_AS(fit_null_model({7}, {1, 1, 1}), ValidationError);   // row sum > G
  CHECK_THROWS_AS(fit_null_model({1, 1, 1}, {4, -1}), ValidationError);
}

TEST_CASE("null model peeling decides cells by the earlier fixing event") {
  // One full column over two rows: both cells must be 1 even though the
  // rows' residuals hit zero afterwards.
  const NullModelProbabilities null = fit_null_model({1, 1}, {2});
  CHECK(null.cell(0, 0) == 1.0);
  CHECK(null.cell(1, 0) == 1.0);

  // Zero row and zero column stay empty.
  const NullModelProbabilities z = fit_null_model({0, 2, 1}, {1, 1, 0, 1});
  for (int k = 0; k < 4; ++k) CHECK(z.cell(0, k) == 0.0);
  CHECK(z.cell(1, 2) == 0.0);
  const Matrix probs = z.cell_probs();
  double row1 = 0.0;
  for (int k = 0; k < 4; ++k) row1 += probs.at(1, k);
  CHECK(row1 == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("null model throws ComputeError when starved of iterations") {
  Rng rng(55);
  const auto [rows, cols] = random_margins(rng, 8, 9);
  SdsmConfig cfg;
  cfg.solver_max_iterations = 1;
  cfg.solver_tolerance = 1e-14;
  CHECK_THROWS_WITH_AS(fit_null_model(rows, cols, cfg), doctest::Contains("residual"),
                       ComputeError);
}

TEST_CASE("null model is equivariant under agent permutation") {
  Rng rng(56);
  const auto [rows, cols] = random_margins(rng, 7, 9);
  const NullModelProbabilities a = fit_null_model(rows, cols);
  std::vector<int> perm(rows.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  std::reverse(perm.begin(), perm.end());
  std::vector<int> rows2(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows2[static_cast<std::size_t>(perm[i])] = rows[i];
  const NullModelProbabilities b = fit_null_model(rows2, cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < cols.size(); ++k)
      CHECK(a.cell(static_cast<int>(i), static_cast<int>(k)) ==
            doctest::Approx(b.cell(perm[i], static_cast<int>(k))).epsilon(1e-12));
}

TEST_CASE("backbone: zero-weight dyads are never retained") {
  // agents 0,3 never share a group
  const BipartiteMembership b(4, {{0, 1}, {1, 2}, {2, 3}, {0, 1}, {2, 3}, {1, 2}});
  SdsmConfig cfg;
  cfg.alpha = 0.999;
  const UndirectedGraph bb = sdsm_backbone(b, cfg);
  CHECK(!bb.has_edge(0, 3));
  CHECK(!bb.has_edge(0, 2));
  CHECK(!bb.has_edge(1, 3));
}

TEST_CASE("backbone matches the desk-scale enumeration oracle on a 4x6 incidence") {
  const BipartiteMembership b(4, {{0, 1}, {0, 1}, {0, 2}, {1, 2}, {2, 3}, {3}});
  const SdsmAnalysis analysis = analyze_sdsm(b);

  // independently verify the fitted margins
  const Matrix probs = analysis.null_model.cell_probs();
  const auto rows = b.membership_counts();
  const auto cols = b.group_sizes();
  for (int i = 0; i < 4; ++i) {
    double sum = 0.0;
    for (int k = 0; k < 6; ++k) sum += probs.at(i, k);
    CHECK(sum == doctest::Approx(rows[static_cast<std::size_t>(i)]).epsilon(1e-7));
  }
  for (int k = 0; k < 6; ++k) {
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) sum += probs.at(i, k);
    CHECK(sum == doctest::Approx(cols[static_cast<std::size_t>(k)]).epsilon(1e-7));
  }

  // oracle p-values by exhaustive enumeration over the 2^6 group outcomes
  const WeightedProjection w = project(b);
  for (double alpha : {0.01, 0.05, 0.2, 0.5, 0.9}) {
    SdsmConfig cfg;
    cfg.alpha = alpha;
    const UndirectedGraph bb = backbone_from_analysis(analysis, cfg);
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        std::vector<double> q(6);
        for (int k = 0; k < 6; ++k) q[static_cast<std::size_t>(k)] = probs.at(i, k) * probs.at(j, k);
        const double pv = testutil::enum_upper_tail(q, w.weight(i, j));
        CHECK(bb.has_edge(i, j) == (pv < alpha));
      }
    }
  }
}

TEST_CASE("backbone is a subgraph of the unweighted projection") {
  Rng rng(57);
  for (int trial = 0; trial < 10; ++trial) {
    const BipartiteMembership b = random_membership(rng, 15, 60);
    const UndirectedGraph up = unweighted_projection(b);
    const UndirectedGraph bb = sdsm_backbone(b);
    for (auto [u, v] : bb.edges()) CHECK(up.has_edge(u, v));
  }
}

TEST_CASE("backbone grows monotonically with alpha") {
  Rng rng(58);
  const BipartiteMembership b = random_membership(rng, 15, 80);
  const SdsmAnalysis analysis = analyze_sdsm(b);
  UndirectedGraph prev;
  bool first = true;
  for (double alpha : {0.01, 0.05, 0.1, 0.3, 0.6}) {
    SdsmConfig cfg;
    cfg.alpha = alpha;
    const UndirectedGraph bb = backbone_from_analysis(analysis, cfg);
    if (!first)
      for (auto [u, v] : prev.edges()) CHECK(bb.has_edge(u, v));
    prev = bb;
    first = false;
  }
}

TEST_CASE("corrections nest: bonferroni within holm within none") {
  Rng rng(59);
  const BipartiteMembership b = random_membership(rng, 14, 120);
  const SdsmAnalysis analysis = analyze_sdsm(b);
  SdsmConfig none, bonf, holm;
  bonf.correction = Correction::bonferroni;
  holm.correction = Correction::holm;
  const UndirectedGraph g_none = backbone_from_analysis(analysis, none);
  const UndirectedGraph g_bonf = backbone_from_analysis(analysis, bonf);
  const UndirectedGraph g_holm = backbone_from_analysis(analysis, holm);
  for (auto [u, v] : g_bonf.edges()) CHECK(g_holm.has_edge(u, v));
  for (auto [u, v] : g_holm.edges()) CHECK(g_none.has_edge(u, v));
}

TEST_CASE("two-sided split equals upper tail at half alpha") {
  Rng rng(60);
  const BipartiteMembership b = random_membership(rng, 12, 70);
  const SdsmAnalysis analysis = analyze_sdsm(b);
  SdsmConfig two;
  two.alpha = 0.1;
  two.tail = TailRule::two_sided_split;
  SdsmConfig upper;
  upper.alpha = 0.05;
  CHECK(backbone_from_analysis(analysis, two) == backbone_from_analysis(analysis, upper));
}

TEST_CASE("auto engine switches on the group count") {
  Rng rng(61);
  const BipartiteMembership small = random_membership(rng, 8, 100);
  CHECK(analyze_sdsm(small).engine == PValueMethod::exact);
  const BipartiteMembership big = random_membership(rng, 8, kExactAutoMaxLength + 1);
  CHECK(analyze_sdsm(big).engine == PValueMethod::refined_normal);
}
