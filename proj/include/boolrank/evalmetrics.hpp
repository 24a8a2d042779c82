#pragma once

#include <map>
#include <string>
#include <vector>

#include "boolrank/corpusio.hpp"
#include "boolrank/error.hpp"

namespace boolrank {

struct TopicMetrics {
  double ap = 0.0;
  double last_rel = 0.0;                // integer-valued per topic
  std::map<int, double> recall_at;      // percent cutoff -> recall
  std::map<int, double> wss_at;         // recall target in percent -> wss
};

struct MetricReport {
  std::vector<int> percents;
  std::vector<int> wss_targets;                  // percent form, e.g. 95, 100
  std::map<std::string, TopicMetrics> per_topic; // topics with >= 1 relevant
  std::vector<std::string> zero_relevant_topics; // excluded from the means
  TopicMetrics means;
};

// AP = (1/R) * sum over ranks k holding a relevant doc of (rel in top k)/k,
// where R counts all judged-relevant docs, retrieved or not. Throws
// MetricError(NoJudgedRelevant) when R == 0.
double average_precision(const RankedList& run, const Judgments& judgments);

// 1-based rank of the deepest relevant document; a relevant doc absent from
// the run pushes the answer to N (pessimistic bound).
int last_relevant_rank(const RankedList& run, const Judgments& judgments);

// Recall in the top ceil(percent/100 * N) documents; percent in (0, 100].
double recall_at_percent(const RankedList& run, const Judgments& judgments,
                         int percent);

// Work saved over sampling at a recall target given in percent (95 or 100):
// rank_r = smallest k whose top-k holds ceil(target/100 * R) relevant docs,
// or N when unreachable; WSS = (N - rank_r)/N - (1 - target/100).
double wss(const RankedList& run, const Judgments& judgments,
           int target_percent);

// One run per topic. Topics with no judged-relevant docs are excluded from
// the means and listed; a topic absent from the judgments altogether is
// MetricError(MissingJudgments).
MetricReport evaluate_runs(const std::vector<RankedList>& runs,
                           const Judgments& judgments,
                           const std::vector<int>& percents = {1, 5, 10, 20},
                           const std::vector<int>& wss_targets = {95, 100});

// CSV table: header, one row per topic in id order (NA cells for topics with
// no relevant docs), MEAN row last. All numeric cells use 4 decimals.
std::string metrics_csv(const MetricReport& report);

// Machine-readable variant of the same report, one JSON object.
std::string metrics_json(const MetricReport& report);

}  // namespace boolrank
