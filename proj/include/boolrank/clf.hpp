#pragma once

#include "boolrank/boolquery.hpp"
#include "boolrank/lexrank.hpp"

namespace boolrank {

enum class ClauseScorer {
  Bm25,    // each clause ranked by BM25 over its extracted terms
  Binary,  // each clause scores 1 when any of its terms occurs, else 0
};

// Coordination-style ranking over a Boolean query: every top-level clause
// produces its own ranking of the full candidate set, and the clause
// rankings are merged with unnormalized CombSUM. With the Binary scorer the
// fused score of a document is exactly its count of matching clauses.
RankedList rank_clf(const Index& index, const QueryNode::Ptr& query,
                    const ScorerParams& params = {},
                    ClauseScorer scorer = ClauseScorer::Bm25);

}  // namespace boolrank
