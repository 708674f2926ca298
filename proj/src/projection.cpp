#include "netinfer/projection.hpp"

namespace netinfer {

WeightedProjection project(const BipartiteMembership& b) {
  WeightedProjection proj(b.agent_count());
  for (const auto& members : b.groups()) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      ++proj.weight_ref(members[i], members[i]);
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        ++proj.weight_ref(members[i], members[j]);
        ++proj.weight_ref(members[j], members[i]);
      }
    }
  }
  return proj;
}

UndirectedGraph unweighted_projection(const BipartiteMembership& b) {
  const WeightedProjection proj = project(b);
  std::vector<std::pair<int, int>> edges;
  const int n = b.agent_count();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (proj.weight(i, j) > 0) edges.emplace_back(i, j);
  return UndirectedGraph(n, edges);
}

}  // namespace netinfer
