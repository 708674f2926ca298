#include "netinfer/metrics.hpp"

#include <cmath>

#include "netinfer/errors.hpp"

namespace netinfer {

ConfusionCounts confusion(const UndirectedGraph& truth, const UndirectedGraph& inferred) {
  if (truth.node_count() != inferred.node_count())
    throw ValidationError("confusion: node counts differ (" +
                          std::to_string(truth.node_count()) + " vs " +
                          std::to_string(inferred.node_count()) + ")");
  ConfusionCounts c;
  const int n = truth.node_count();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool t = truth.has_edge(i, j);
      const bool p = inferred.has_edge(i, j);
      if (t && p)
        ++c.tp;
      else if (!t && p)
        ++c.fp;
      else if (t && !p)
        ++c.fn;
      else
        ++c.tn;
    }
  }
  return c;
}

SimilarityScores scores(const ConfusionCounts& c) {
  SimilarityScores s;
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);
  const double total = tp + fp + fn + tn;

  const double f1 = tp + fp, f2 = tp + fn, f3 = tn + fp, f4 = tn + fn;
  if (f1 > 0 && f2 > 0 && f3 > 0 && f4 > 0)
    s.correlation = (tp * tn - fp * fn) / std::sqrt(f1 * f2 * f3 * f4);

  if (total > 0) {
    const double po = (tp + tn) / total;
    const double pe = (f1 * f2 + f4 * f3) / (total * total);
    if (pe != 1.0) s.kappa = (po - pe) / (1.0 - pe);
  }

  if (tp + fp + fn > 0) s.jaccard = tp / (tp + fp + fn);
  return s;
}

}  // namespace netinfer
