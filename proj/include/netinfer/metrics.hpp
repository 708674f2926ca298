#pragma once

#include <cstdint>
#include <optional>

#include "netinfer/graph.hpp"

namespace netinfer {

// Dyad-wise classification counts: true = edge in the unobserved network,
// positive = edge in the inferred network. tp+fp+fn+tn = C(N,2).
struct ConfusionCounts {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::int64_t total() const { return tp + fp + fn + tn; }
};

// Undefined scores (zero-variance indicator vectors and the like) stay empty
// rather than being coerced to a number.
struct SimilarityScores {
  std::optional<double> correlation;  // Matthews / Pearson on edge indicators
  std::optional<double> kappa;
  std::optional<double> jaccard;
};

ConfusionCounts confusion(const UndirectedGraph& truth, const UndirectedGraph& inferred);

SimilarityScores scores(const ConfusionCounts& c);

}  // namespace netinfer
