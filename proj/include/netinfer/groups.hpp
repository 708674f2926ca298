#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netinfer/graph.hpp"
#include "netinfer/rng.hpp"

namespace netinfer {

// Observed agent-by-group incidence. Groups are stored as sorted lists of
// distinct agent indices; agents with no memberships simply appear in no
// group.
class BipartiteMembership {
 public:
  BipartiteMembership() = default;
  BipartiteMembership(int agent_count, std::vector<std::vector<int>> groups);

  int agent_count() const { return agent_count_; }
  int group_count() const { return static_cast<int>(groups_.size()); }
  const std::vector<std::vector<int>>& groups() const { return groups_; }
  const std::vector<int>& group(int j) const { return groups_[j]; }

  std::vector<int> membership_counts() const;  // row sums, length N
  std::vector<int> group_sizes() const;        // column sums, length G
  std::int64_t total_memberships() const;

 private:
  int agent_count_ = 0;
  std::vector<std::vector<int>> groups_;
};

struct GroupGenSpec {
  std::int64_t num_groups = 1;
  double p_clique = 1.0;
  int min_clique_size = 2;
  // When true, replacement members are drawn from all agents not already in
  // the group (so a "replacement" may re-insert a clique member); default
  // draws from non-clique agents only.
  bool replace_from_all = false;
};

struct GroupGenDiagnostics {
  std::int64_t replacement_pool_exhausted = 0;
  std::vector<int> source_clique;  // index into the clique pool, per group
};

// Team-formation generative model: each group copies a uniformly drawn
// clique of the pool, then each slot independently keeps the clique member
// with probability p_clique or is filled by an outsider. Group sizes equal
// their source cliques' sizes and members are distinct.
BipartiteMembership generate_groups(const UndirectedGraph& g, const GroupGenSpec& spec, Rng& rng,
                                    GroupGenDiagnostics* diag = nullptr);

// Same, with a precomputed maximal-clique pool (not yet filtered by size).
BipartiteMembership generate_groups(int agent_count,
                                    const std::vector<std::vector<int>>& maximal_clique_pool,
                                    const GroupGenSpec& spec, Rng& rng,
                                    GroupGenDiagnostics* diag = nullptr);

// (mean group size, mean memberships per agent).
std::pair<double, double> membership_stats(const BipartiteMembership& b);

struct MembershipTable {
  BipartiteMembership membership;
  std::vector<std::string> agent_labels;
  std::vector<std::string> group_labels;
};

// CSV with header "agent,group", one membership per line. Labels are
// arbitrary comma-free tokens mapped to indices in first-appearance order.
MembershipTable parse_membership_csv(std::string_view text);
std::string membership_to_csv(const BipartiteMembership& b);

}  // namespace netinfer
