#include "boolrank/clf.hpp"

#include <algorithm>
#include <numeric>

#include "boolrank/fuse.hpp"

namespace boolrank {

namespace {

RankedList score_binary(const Index& index,
                        const std::vector<std::string>& terms) {
  std::vector<char> hit(index.doc_count(), 0);
  for (const auto& t : terms)
    for (const Posting& p : index.postings(t)) hit[p.doc_ordinal] = 1;

  std::vector<std::size_t> order(index.doc_count());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (hit[a] != hit[b]) return hit[a] > hit[b];
    return index.doc_ids()[a] < index.doc_ids()[b];
  });
  RankedList out;
  out.entries.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    out.entries.push_back(RunEntry{index.doc_ids()[order[i]],
                                   static_cast<int>(i + 1),
                                   hit[order[i]] ? 1.0 : 0.0});
  return out;
}

}  // namespace

RankedList rank_clf(const Index& index, const QueryNode::Ptr& query,
                    const ScorerParams& params, ClauseScorer scorer) {
  std::vector<RankedList> clause_rankings;
  for (const auto& clause : top_level_clauses(query)) {
    const auto terms = extract_terms(*clause, false);
    RankedList ranking = scorer == ClauseScorer::Bm25
                             ? score_bm25(index, terms, params)
                             : score_binary(index, terms);
    ranking.topic_id = "clause";
    clause_rankings.push_back(std::move(ranking));
  }
  RankedList fused = combsum(clause_rankings);
  fused.topic_id.clear();
  fused.tag.clear();
  return fused;
}

}  // namespace boolrank
