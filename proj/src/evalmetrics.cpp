#include "boolrank/evalmetrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace boolrank {

namespace {

// Number of judged-relevant documents for the topic, retrieved or not.
std::size_t relevant_total(const std::string& topic_id, const Judgments& j) {
  auto it = j.by_topic.find(topic_id);
  if (it == j.by_topic.end()) return 0;
  std::size_t r = 0;
  for (const auto& [doc, grade] : it->second)
    if (grade > 0) ++r;
  return r;
}

std::size_t require_relevant(const RankedList& run, const Judgments& j) {
  const std::size_t r = relevant_total(run.topic_id, j);
  if (r == 0)
    throw MetricError(MetricError::Kind::NoJudgedRelevant,
                      "topic " + run.topic_id + " has no judged-relevant docs");
  return r;
}

std::string cell(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

double average_precision(const RankedList& run, const Judgments& judgments) {
  const std::size_t R = require_relevant(run, judgments);
  double sum = 0.0;
  std::size_t rel_so_far = 0;
  for (std::size_t k = 0; k < run.entries.size(); ++k) {
    if (judgments.is_relevant(run.topic_id, run.entries[k].doc_id)) {
      ++rel_so_far;
      sum += static_cast<double>(rel_so_far) / static_cast<double>(k + 1);
    }
  }
  return sum / static_cast<double>(R);
}

int last_relevant_rank(const RankedList& run, const Judgments& judgments) {
  const std::size_t R = require_relevant(run, judgments);
  int deepest = 0;
  std::size_t retrieved_rel = 0;
  for (const auto& e : run.entries) {
    if (judgments.is_relevant(run.topic_id, e.doc_id)) {
      ++retrieved_rel;
      deepest = e.rank;
    }
  }
  if (retrieved_rel < R) return static_cast<int>(run.entries.size());
  return deepest;
}

double recall_at_percent(const RankedList& run, const Judgments& judgments,
                         int percent) {
  if (percent <= 0 || percent > 100)
    throw std::invalid_argument("percent must lie in (0, 100]");
  const std::size_t R = require_relevant(run, judgments);
  const std::size_t n = run.entries.size();
  const std::size_t k =
      (static_cast<std::size_t>(percent) * n + 99) / 100;  // ceil(p/100 * n)
  std::size_t rel = 0;
  for (std::size_t i = 0; i < k && i < n; ++i)
    if (judgments.is_relevant(run.topic_id, run.entries[i].doc_id)) ++rel;
  return static_cast<double>(rel) / static_cast<double>(R);
}

double wss(const RankedList& run, const Judgments& judgments,
           int target_percent) {
  if (target_percent <= 0 || target_percent > 100)
    throw std::invalid_argument("target_percent must lie in (0, 100]");
  const std::size_t R = require_relevant(run, judgments);
  const std::size_t n = run.entries.size();
  const std::size_t needed =
      (static_cast<std::size_t>(target_percent) * R + 99) / 100;

  std::size_t rank_r = n;
  std::size_t rel = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (judgments.is_relevant(run.topic_id, run.entries[i].doc_id)) {
      ++rel;
      if (rel >= needed) {
        rank_r = i + 1;
        break;
      }
    }
  }
  const double N = static_cast<double>(n);
  return (N - static_cast<double>(rank_r)) / N -
         (1.0 - static_cast<double>(target_percent) / 100.0);
}

MetricReport evaluate_runs(const std::vector<RankedList>& runs,
                           const Judgments& judgments,
                           const std::vector<int>& percents,
                           const std::vector<int>& wss_targets) {
  MetricReport report;
  report.percents = percents;
  report.wss_targets = wss_targets;

  std::set<std::string> seen;
  for (const auto& run : runs) {
    if (!seen.insert(run.topic_id).second)
      throw std::invalid_argument("topic " + run.topic_id +
                                  " appears in more than one ranked list");
    if (judgments.by_topic.find(run.topic_id) == judgments.by_topic.end())
      throw MetricError(MetricError::Kind::MissingJudgments,
                        "no judgments for topic " + run.topic_id);
    if (relevant_total(run.topic_id, judgments) == 0) {
      report.zero_relevant_topics.push_back(run.topic_id);
      continue;
    }
    TopicMetrics m;
    m.ap = average_precision(run, judgments);
    m.last_rel = static_cast<double>(last_relevant_rank(run, judgments));
    for (int p : percents) m.recall_at[p] = recall_at_percent(run, judgments, p);
    for (int t : wss_targets) m.wss_at[t] = wss(run, judgments, t);
    report.per_topic.emplace(run.topic_id, std::move(m));
  }
  std::sort(report.zero_relevant_topics.begin(),
            report.zero_relevant_topics.end());

  const double count = static_cast<double>(report.per_topic.size());
  for (int p : percents) report.means.recall_at[p] = 0.0;
  for (int t : wss_targets) report.means.wss_at[t] = 0.0;
  if (count > 0) {
    for (const auto& [topic, m] : report.per_topic) {
      report.means.ap += m.ap;
      report.means.last_rel += m.last_rel;
      for (int p : percents) report.means.recall_at[p] += m.recall_at.at(p);
      for (int t : wss_targets) report.means.wss_at[t] += m.wss_at.at(t);
    }
    report.means.ap /= count;
    report.means.last_rel /= count;
    for (int p : percents) report.means.recall_at[p] /= count;
    for (int t : wss_targets) report.means.wss_at[t] /= count;
  }
  return report;
}

std::string metrics_csv(const MetricReport& report) {
  std::string out = "topic,ap,last_rel";
  for (int p : report.percents) out += ",recall@" + std::to_string(p);
  for (int t : report.wss_targets) out += ",wss" + std::to_string(t);
  out += "\n";

  std::set<std::string> topics(report.zero_relevant_topics.begin(),
                               report.zero_relevant_topics.end());
  for (const auto& [topic, _] : report.per_topic) topics.insert(topic);

  const std::size_t cells = 2 + report.percents.size() + report.wss_targets.size();
  for (const auto& topic : topics) {
    auto it = report.per_topic.find(topic);
    out += topic;
    if (it == report.per_topic.end()) {
      for (std::size_t i = 0; i < cells; ++i) out += ",NA";
    } else {
      const TopicMetrics& m = it->second;
      out += "," + cell(m.ap) + "," + cell(m.last_rel);
      for (int p : report.percents) out += "," + cell(m.recall_at.at(p));
      for (int t : report.wss_targets) out += "," + cell(m.wss_at.at(t));
    }
    out += "\n";
  }

  out += "MEAN";
  if (report.per_topic.empty()) {
    for (std::size_t i = 0; i < cells; ++i) out += ",NA";
  } else {
    out += "," + cell(report.means.ap) + "," + cell(report.means.last_rel);
    for (int p : report.percents) out += "," + cell(report.means.recall_at.at(p));
    for (int t : report.wss_targets) out += "," + cell(report.means.wss_at.at(t));
  }
  out += "\n";
  return out;
}

std::string metrics_json(const MetricReport& report) {
  using nlohmann::json;
  auto topic_obj = [&](const TopicMetrics& m) {
    json o{{"ap", m.ap}, {"last_rel", m.last_rel}};
    for (int p : report.percents)
      o["recall@" + std::to_string(p)] = m.recall_at.at(p);
    for (int t : report.wss_targets)
      o["wss" + std::to_string(t)] = m.wss_at.at(t);
    return o;
  };
  json topics = json::object();
  for (const auto& [topic, m] : report.per_topic) topics[topic] = topic_obj(m);
  json j{{"percents", report.percents},
         {"wss_targets", report.wss_targets},
         {"topics", topics},
         {"zero_relevant_topics", report.zero_relevant_topics}};
  j["mean"] = report.per_topic.empty() ? json(nullptr) : topic_obj(report.means);
  return j.dump();
}

}  // namespace boolrank
