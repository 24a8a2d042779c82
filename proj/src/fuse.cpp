#include "boolrank/fuse.hpp"

#include <algorithm>
#include <map>

#include "boolrank/evalmetrics.hpp"

namespace boolrank {

namespace {

void require_same_topic(const std::vector<RankedList>& lists) {
  if (lists.empty())
    throw FuseError(FuseError::Kind::EmptyInput, "no ranked lists to fuse");
  for (const auto& l : lists)
    if (l.topic_id != lists.front().topic_id)
      throw FuseError(FuseError::Kind::TopicMismatch,
                      "cannot fuse topic " + l.topic_id + " with topic " +
                          lists.front().topic_id);
}

std::vector<double> normalized_scores(const RankedList& list,
                                      Normalization normalization) {
  std::vector<double> out;
  out.reserve(list.entries.size());
  for (const auto& e : list.entries) out.push_back(e.score);
  if (normalization == Normalization::None || out.empty()) return out;
  const auto [lo, hi] = std::minmax_element(out.begin(), out.end());
  if (*lo == *hi) {
    std::fill(out.begin(), out.end(), 0.5);  // constant list carries no order
  } else {
    const double min = *lo, range = *hi - *lo;
    for (auto& s : out) s = (s - min) / range;
  }
  return out;
}

}  // namespace

RankedList combsum(const std::vector<RankedList>& lists,
                   const FusionPolicy& policy) {
  require_same_topic(lists);
  if (lists.size() == 1 && policy.normalization == Normalization::None)
    return lists.front();

  // doc_id -> every contribution it received, one per list it appears in.
  std::map<std::string, std::vector<double>> contributions;
  for (const auto& list : lists) {
    const auto scores = normalized_scores(list, policy.normalization);
    for (std::size_t i = 0; i < list.entries.size(); ++i)
      contributions[list.entries[i].doc_id].push_back(scores[i]);
  }

  std::vector<std::pair<std::string, double>> fused;
  fused.reserve(contributions.size());
  for (auto& [doc_id, values] : contributions) {
    // Value-ordered summation keeps the result identical under any
    // permutation of the input lists.
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    fused.emplace_back(doc_id, sum);
  }
  std::sort(fused.begin(), fused.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  RankedList out;
  out.topic_id = lists.front().topic_id;
  out.tag = lists.front().tag;
  out.entries.reserve(fused.size());
  for (std::size_t i = 0; i < fused.size(); ++i)
    out.entries.push_back(
        RunEntry{fused[i].first, static_cast<int>(i + 1), fused[i].second});
  return out;
}

RankedList fuse_multi(const std::vector<RankedList>& gen_runs) {
  return combsum(gen_runs, FusionPolicy{Normalization::None});
}

OracleSelection oracle_select(const std::vector<RankedList>& runs,
                              const Judgments& judgments) {
  require_same_topic(runs);
  OracleSelection best;
  best.ap_value = average_precision(runs.front(), judgments);
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const double ap = average_precision(runs[i], judgments);
    if (ap > best.ap_value) {
      best.run_index = i;
      best.ap_value = ap;
    }
  }
  return best;
}

}  // namespace boolrank
