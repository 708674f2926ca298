#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "netinfer/errors.hpp"
#include "netinfer/generators.hpp"
#include "netinfer/groups.hpp"
#include "netinfer/rng.hpp"

using namespace netinfer;

namespace {

GroupGenSpec spec_of(std::int64_t g, double p, int min_size = 2) {
  GroupGenSpec s;
  s.num_groups = g;
  s.p_clique = p;
  s.min_clique_size = min_size;
  return s;
}

}  // namespace

TEST_CASE("p = 1 reproduces source cliques exactly") {
  Rng rng(21);
  const UndirectedGraph g = gen_random(30, 0.15, rng);
  const auto pool = maximal_cliques(g);
  GroupGenDiagnostics diag;
  const BipartiteMembership b = generate_groups(g.node_count(), pool, spec_of(200, 1.0), rng, &diag);
  REQUIRE(b.group_count() == 200);
  REQUIRE(diag.source_clique.size() == 200);
  for (int j = 0; j < 200; ++j) CHECK(b.group(j) == pool[diag.source_clique[j]]);
}

TEST_CASE("group sizes always equal the source clique sizes") {
  Rng rng(22);
  const UndirectedGraph g = gen_random(30, 0.15, rng);
  const auto pool = maximal_cliques(g);
  for (double p : {0.0, 0.3, 0.7, 1.0}) {
    GroupGenDiagnostics diag;
    const BipartiteMembership b =
        generate_groups(g.node_count(), pool, spec_of(300, p), rng, &diag);
    for (int j = 0; j < b.group_count(); ++j) {
      CHECK(b.group(j).size() == pool[diag.source_clique[j]].size());
      // members are distinct by BipartiteMembership invariant; also in range
      for (int v : b.group(j)) CHECK(v < 30);
    }
  }
}

TEST_CASE("p = 0 on caveman: no group member comes from the source clique") {
  Rng rng(23);
  const UndirectedGraph g = gen_caveman(10, 5);
  const auto pool = maximal_cliques(g);
  GroupGenDiagnostics diag;
  const BipartiteMembership b = generate_groups(50, pool, spec_of(500, 0.0), rng, &diag);
  for (int j = 0; j < b.group_count(); ++j) {
    const auto& clique = pool[diag.source_clique[j]];
    CHECK(b.group(j).size() == 5);
    for (int v : b.group(j))
      CHECK(std::find(clique.begin(), clique.end(), v) == clique.end());
  }
}

TEST_CASE("replacement pool exhaustion keeps the member and counts a warning") {
  Rng rng(24);
  const UndirectedGraph k5 = UndirectedGraph::complete(5);
  GroupGenDiagnostics diag;
  const BipartiteMembership b = generate_groups(k5, spec_of(10, 0.0), rng, &diag);
  // the only maximal clique spans all nodes, so every slot falls back
  CHECK(diag.replacement_pool_exhausted == 50);
  for (int j = 0; j < 10; ++j) CHECK(b.group(j) == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("min_clique_size filters the pool") {
  Rng rng(25);
  // one triangle, one isolated node: singleton cliques exist
  const UndirectedGraph g(4, {{0, 1}, {1, 2}, {0, 2}});
  const BipartiteMembership b2 = generate_groups(g, spec_of(50, 1.0, 2), rng);
  for (int j = 0; j < b2.group_count(); ++j) CHECK(b2.group(j).size() == 3);

  const BipartiteMembership b1 = generate_groups(g, spec_of(500, 1.0, 1), rng);
  bool saw_singleton = false;
  for (int j = 0; j < b1.group_count(); ++j)
    if (b1.group(j) == std::vector<int>{3}) saw_singleton = true;
  CHECK(saw_singleton);

  CHECK_THROWS_AS(generate_groups(UndirectedGraph(5, {}), spec_of(3, 1.0, 2), rng),
                  ValidationError);
}

TEST_CASE("replacement pool switch allows clique members back in") {
  Rng rng(26);
  const UndirectedGraph g = gen_caveman(10, 5);
  const auto pool = maximal_cliques(g);
  GroupGenSpec spec = spec_of(500, 0.0);
  spec.replace_from_all = true;
  GroupGenDiagnostics diag;
  const BipartiteMembership b = generate_groups(50, pool, spec, rng, &diag);
  bool clique_member_reinserted = false;
  for (int j = 0; j < b.group_count(); ++j) {
    const auto& clique = pool[diag.source_clique[j]];
    CHECK(b.group(j).size() == clique.size());
    for (int v : b.group(j))
      if (std::find(clique.begin(), clique.end(), v) != clique.end())
        clique_member_reinserted = true;
  }
  CHECK(clique_member_reinserted);
}

TEST_CASE("coupon collector: at p=1 with G = 50x cliques, every clique appears") {
  const UndirectedGraph g = gen_caveman(10, 5);
  const auto pool = maximal_cliques(g);
  for (int seed = 0; seed < 3; ++seed) {
    Rng rng(27 + seed);
    GroupGenDiagnostics diag;
    generate_groups(50, pool, spec_of(50 * 10, 1.0), rng, &diag);
    std::set<int> seen(diag.source_clique.begin(), diag.source_clique.end());
    CHECK(seen.size() == pool.size());
  }
}

TEST_CASE("membership_stats") {
  const BipartiteMembership b(3, {{0, 1}, {1, 2}});
  const auto [mean_size, mean_members] = membership_stats(b);
  CHECK(mean_size == doctest::Approx(2.0));
  CHECK(mean_members == doctest::Approx(4.0 / 3.0));

  // double counting identity: N * mean_memberships == G * mean_group_size
  Rng rng(28);
  const UndirectedGraph g = gen_random(30, 0.2, rng);
  const BipartiteMembership m = generate_groups(g, spec_of(77, 0.6), rng);
  const auto [gs, mm] = membership_stats(m);
  CHECK(30.0 * mm == doctest::Approx(77.0 * gs).epsilon(1e-12));
}

TEST_CASE("same seed, same incidence") {
  const UndirectedGraph g = gen_caveman(10, 5);
  Rng a(29), b(29);
  const BipartiteMembership m1 = generate_groups(g, spec_of(100, 0.7), a);
  const BipartiteMembership m2 = generate_groups(g, spec_of(100, 0.7), b);
  CHECK(m1.groups() == m2.groups());
}

TEST_CASE("membership CSV round trip") {
  Rng rng(30);
  const UndirectedGraph g = gen_random(20, 0.25, rng);
  const BipartiteMembership b = generate_groups(g, spec_of(40, 0.8), rng);
  const MembershipTable back = parse_membership_csv(membership_to_csv(b));
  // agents with no memberships are not representable; relabel through the table
  REQUIRE(back.membership.group_count() == b.group_count());
  for (int j = 0; j < b.group_count(); ++j) {
    std::vector<int> orig;
    for (int a : back.membership.group(j)) orig.push_back(std::stoi(back.agent_labels[a]));
    std::sort(orig.begin(), orig.end());
    CHECK(orig == b.group(j));
  }

  CHECK_THROWS_AS(parse_membership_csv("bogus header\n1,2\n"), ParseError);
  CHECK_THROWS_WITH_AS(parse_membership_csv("agent,group\na,g1\na,g1\n"),
                       doctest::Contains("line 3"), ParseError);
  CHECK_THROWS_AS(parse_membership_csv("agent,group\na,b,c\n"), ParseError);
}
