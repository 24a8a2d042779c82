#pragma once

#include <cstddef>
#include <vector>

#include "boolrank/corpusio.hpp"
#include "boolrank/error.hpp"

namespace boolrank {

enum class Normalization { None, MinMax };

struct FusionPolicy {
  Normalization normalization = Normalization::None;
};

// CombSUM: the fused score of a document is the sum of its (optionally
// min-max normalized) scores across the input lists; absent documents
// contribute 0. Per-document contributions are summed in value order, so any
// permutation of the inputs produces a bit-identical output. With policy
// None a single input list is returned unchanged. Output is sorted by score
// descending, doc_id ascending, ranks rewritten 1..n.
RankedList combsum(const std::vector<RankedList>& lists,
                   const FusionPolicy& policy = {});

// Fusion of one topic's generated-query runs: combsum with no normalization,
// matching summation of raw scores from a single scorer family.
RankedList fuse_multi(const std::vector<RankedList>& gen_runs);

struct OracleSelection {
  std::size_t run_index = 0;  // 0-based position in the input vector
  double ap_value = 0.0;
};

// Picks the run with the highest average precision under the given
// judgments; ties resolve to the lowest index. Throws FuseError(EmptyInput),
// FuseError(TopicMismatch), or MetricError(NoJudgedRelevant).
OracleSelection oracle_select(const std::vector<RankedList>& runs,
                              const Judgments& judgments);

}  // namespace boolrank
