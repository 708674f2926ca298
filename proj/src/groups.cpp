#include "netinfer/groups.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "netinfer/errors.hpp"

namespace netinfer {

BipartiteMembership::BipartiteMembership(int agent_count, std::vector<std::vector<int>> groups)
    : agent_count_(agent_count), groups_(std::move(groups)) {
  if (agent_count < 0) throw ValidationError("agent count must be nonnegative");
  for (auto& members : groups_) {
    std::sort(members.begin(), members.end());
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (members[i] < 0 || members[i] >= agent_count_)
        throw ValidationError("group member index out of range");
      if (i > 0 && members[i] == members[i - 1])
        throw ValidationError("an agent appears twice in the same group");
    }
  }
}

std::vector<int> BipartiteMembership::membership_counts() const {
  std::vector<int> counts(agent_count_, 0);
  for (const auto& members : groups_)
    for (int a : members) ++counts[a];
  return counts;
}

std::vector<int> BipartiteMembership::group_sizes() const {
  std::vector<int> sizes;
  sizes.reserve(groups_.size());
  for (const auto& members : groups_) sizes.push_back(static_cast<int>(members.size()));
  return sizes;
}

std::int64_t BipartiteMembership::total_memberships() const {
  std::int64_t t = 0;
  for (const auto& members : groups_) t += static_cast<std::int64_t>(members.size());
  return t;
}

BipartiteMembership generate_groups(const UndirectedGraph& g, const GroupGenSpec& spec, Rng& rng,
                                    GroupGenDiagnostics* diag) {
  return generate_groups(g.node_count(), maximal_cliques(g), spec, rng, diag);
}

BipartiteMembership generate_groups(int agent_count,
                                    const std::vector<std::vector<int>>& maximal_clique_pool,
                                    const GroupGenSpec& spec, Rng& rng,
                                    GroupGenDiagnostics* diag) {
  if (spec.num_groups < 1) throw ValidationError("num_groups must be >= 1");
  if (spec.p_clique < 0.0 || spec.p_clique > 1.0)
    throw ValidationError("p_clique must lie in [0,1]");
  if (spec.min_clique_size < 1) throw ValidationError("min_clique_size must be >= 1");

  std::vector<const std::vector<int>*> pool;
  for (const auto& c : maximal_clique_pool)
    if (static_cast<int>(c.size()) >= spec.min_clique_size) pool.push_back(&c);
  if (pool.empty())
    throw ValidationError("no maximal clique of size >= " +
                          std::to_string(spec.min_clique_size) + " to sample groups from");

  std::vector<char> in_clique(agent_count, 0);
  std::vector<char> taken(agent_count, 0);
  std::vector<std::vector<int>> groups;
  groups.reserve(static_cast<std::size_t>(spec.num_groups));
  if (diag) diag->source_clique.reserve(static_cast<std::size_t>(spec.num_groups));

  for (std::int64_t gi = 0; gi < spec.num_groups; ++gi) {
    const int ci = static_cast<int>(rng.below(pool.size()));
    const std::vector<int>& clique = *pool[ci];
    if (diag) diag->source_clique.push_back(ci);
    const int k = static_cast<int>(clique.size());
    for (int v : clique) in_clique[v] = 1;

    std::vector<int> members;
    members.reserve(k);
    int replacements = 0;
    for (int v : clique) {
      const bool keep = rng.bernoulli(spec.p_clique);
      // Under replace_from_all an earlier replacement may already have
      // drawn v; the slot then has to be filled by someone else anyway.
      const bool v_present =
          spec.replace_from_all &&
          std::find(members.begin(), members.end(), v) != members.end();
      if (keep && !v_present) {
        members.push_back(v);
        continue;
      }
      std::int64_t eligible;
      if (spec.replace_from_all) {
        eligible = agent_count - static_cast<std::int64_t>(members.size()) - (v_present ? 0 : 1);
      } else {
        eligible = agent_count - static_cast<std::int64_t>(k) - replacements;
      }
      if (eligible <= 0) {
        if (diag) ++diag->replacement_pool_exhausted;
        members.push_back(v);
        continue;
      }
      int w;
      if (spec.replace_from_all) {
        do {
          w = rng.int_below(agent_count);
        } while (w == v || std::find(members.begin(), members.end(), w) != members.end());
      } else {
        do {
          w = rng.int_below(agent_count);
        } while (in_clique[w] || taken[w]);
      }
      members.push_back(w);
      taken[w] = 1;
      ++replacements;
    }
    for (int v : clique) in_clique[v] = 0;
    for (int v : members) taken[v] = 0;
    std::sort(members.begin(), members.end());
    groups.push_back(std::move(members));
  }
  return BipartiteMembership(agent_count, std::move(groups));
}

std::pair<double, double> membership_stats(const BipartiteMembership& b) {
  const double total = static_cast<double>(b.total_memberships());
  const double mean_size = b.group_count() > 0 ? total / b.group_count() : 0.0;
  const double mean_members = b.agent_count() > 0 ? total / b.agent_count() : 0.0;
  return {mean_size, mean_members};
}

MembershipTable parse_membership_csv(std::string_view text) {
  std::unordered_map<std::string, int> agent_ids, group_ids;
  MembershipTable table;
  std::vector<std::vector<int>> groups;

  std::size_t pos = 0;
  int line_no = 0;
  bool saw_header = false;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "agent,group")
        throw ParseError("line 1: expected header 'agent,group'");
      saw_header = true;
      continue;
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos || comma == 0 || comma + 1 >= line.size() ||
        line.find(',', comma + 1) != std::string_view::npos)
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected exactly two comma-separated labels");
    const std::string agent(line.substr(0, comma));
    const std::string group(line.substr(comma + 1));

    int ai;
    if (auto it = agent_ids.find(agent); it != agent_ids.end()) {
      ai = it->second;
    } else {
      ai = static_cast<int>(table.agent_labels.size());
      agent_ids.emplace(agent, ai);
      table.agent_labels.push_back(agent);
    }
    int gi;
    if (auto it = group_ids.find(group); it != group_ids.end()) {
      gi = it->second;
    } else {
      gi = static_cast<int>(table.group_labels.size());
      group_ids.emplace(group, gi);
      table.group_labels.push_back(group);
      groups.emplace_back();
    }
    if (std::find(groups[gi].begin(), groups[gi].end(), ai) != groups[gi].end())
      throw ParseError("line " + std::to_string(line_no) + ": agent '" + agent +
                       "' already belongs to group '" + group + "'");
    groups[gi].push_back(ai);
  }
  if (!saw_header) throw ParseError("line 1: expected header 'agent,group'");
  table.membership =
      BipartiteMembership(static_cast<int>(table.agent_labels.size()), std::move(groups));
  return table;
}

std::string membership_to_csv(const BipartiteMembership& b) {
  std::ostringstream out;
  out << "agent,group\n";
  for (int j = 0; j < b.group_count(); ++j)
    for (int a : b.group(j)) out << a << "," << j << "\n";
  return out.str();
}

}  // namespace netinfer
