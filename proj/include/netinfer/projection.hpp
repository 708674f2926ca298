#pragma once

#include <cstdint>
#include <vector>

#include "netinfer/graph.hpp"
#include "netinfer/groups.hpp"

namespace netinfer {

// Symmetric co-membership count matrix. Entry (i,j) is the number of groups
// containing both i and j; the diagonal holds each agent's membership count.
class WeightedProjection {
 public:
  WeightedProjection() = default;
  explicit WeightedProjection(int agent_count)
      : n_(agent_count), w_(static_cast<std::size_t>(agent_count) * agent_count, 0) {}

  int agent_count() const { return n_; }
  std::int32_t weight(int i, int j) const { return w_[static_cast<std::size_t>(i) * n_ + j]; }
  std::int32_t& weight_ref(int i, int j) { return w_[static_cast<std::size_t>(i) * n_ + j]; }

 private:
  int n_ = 0;
  std::vector<std::int32_t> w_;
};

WeightedProjection project(const BipartiteMembership& b);

// Edge (i,j) iff the dyad shares at least one group.
UndirectedGraph unweighted_projection(const BipartiteMembership& b);

}  // namespace netinfer
