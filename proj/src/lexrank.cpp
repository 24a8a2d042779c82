#include "boolrank/lexrank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "boolrank/text.hpp"

namespace boolrank {

Index Index::build(const std::vector<Document>& docs) {
  if (docs.empty())
    throw ScoreError(ScoreError::Kind::EmptyCorpus,
                     "cannot index an empty document collection");
  Index idx;
  idx.doc_ids_.reserve(docs.size());
  idx.doc_lengths_.reserve(docs.size());
  for (std::size_t ord = 0; ord < docs.size(); ++ord) {
    const Document& d = docs[ord];
    idx.doc_ids_.push_back(d.doc_id);
    auto tokens = tokenize(d.title + " " + d.abstract_text);
    idx.doc_lengths_.push_back(tokens.size());
    idx.total_tokens_ += tokens.size();

    std::unordered_map<std::string, int> tf;
    for (auto& t : tokens) ++tf[t];
    for (auto& [token, count] : tf) {
      idx.postings_[token].push_back(Posting{ord, count});
      idx.collection_counts_[token] += static_cast<std::size_t>(count);
    }
  }
  idx.avg_doc_len_ =
      static_cast<double>(idx.total_tokens_) / static_cast<double>(docs.size());
  return idx;
}

const std::vector<Posting>& Index::postings(const std::string& token) const {
  static const std::vector<Posting> empty;
  auto it = postings_.find(token);
  return it == postings_.end() ? empty : it->second;
}

std::size_t Index::document_frequency(const std::string& token) const {
  auto it = postings_.find(token);
  return it == postings_.end() ? 0 : it->second.size();
}

std::size_t Index::collection_frequency(const std::string& token) const {
  auto it = collection_counts_.find(token);
  return it == collection_counts_.end() ? 0 : it->second;
}

void ScorerParams::validate() const {
  if (!(bm25_k1 > 0.0))
    throw std::invalid_argument("bm25_k1 must be positive");
  if (!(bm25_b >= 0.0 && bm25_b <= 1.0))
    throw std::invalid_argument("bm25_b must lie in [0, 1]");
  if (!(qlm_lambda > 0.0 && qlm_lambda < 1.0))
    throw std::invalid_argument("qlm_lambda must lie in (0, 1)");
}

namespace {

RankedList to_ranked_list(const Index& index, std::vector<double> scores) {
  const std::size_t n = index.doc_count();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return index.doc_ids()[a] < index.doc_ids()[b];
  });
  RankedList out;
  out.entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.entries.push_back(RunEntry{index.doc_ids()[order[i]],
                                   static_cast<int>(i + 1),
                                   scores[order[i]]});
  return out;
}

}  // namespace

RankedList score_bm25(const Index& index,
                      const std::vector<std::string>& query_tokens,
                      const ScorerParams& params) {
  params.validate();
  const std::size_t n = index.doc_count();
  const double N = static_cast<double>(n);
  std::vector<double> scores(n, 0.0);
  for (const auto& t : query_tokens) {
    const auto& plist = index.postings(t);
    if (plist.empty()) continue;
    const double df = static_cast<double>(plist.size());
    const double idf = std::log((N - df + 0.5) / (df + 0.5) + 1.0);
    for (const Posting& p : plist) {
      const double tf = static_cast<double>(p.term_frequency);
      const double norm =
          1.0 - params.bm25_b +
          params.bm25_b * static_cast<double>(index.doc_lengths()[p.doc_ordinal]) /
              index.avg_doc_len();
      scores[p.doc_ordinal] +=
          idf * tf * (params.bm25_k1 + 1.0) / (tf + params.bm25_k1 * norm);
    }
  }
  return to_ranked_list(index, std::move(scores));
}

RankedList score_qlm_jm(const Index& index,
                        const std::vector<std::string>& query_tokens,
                        const ScorerParams& params) {
  params.validate();
  const std::size_t n = index.doc_count();
  if (query_tokens.empty())
    return to_ranked_list(index, std::vector<double>(n, 0.0));
  if (index.total_tokens() == 0)
    throw ScoreError(ScoreError::Kind::EmptyCollection,
                     "query likelihood needs a non-empty collection");

  const double lambda = params.qlm_lambda;
  const double total = static_cast<double>(index.total_tokens());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> scores(n, 0.0);
  for (const auto& t : query_tokens) {
    const double cf = static_cast<double>(index.collection_frequency(t));
    const double background = (1.0 - lambda) * cf / total;
    if (background == 0.0) {
      // The term never occurs anywhere; ln(0) for every document.
      for (auto& s : scores) s = -inf;
      continue;
    }
    const double base = std::log(background);
    for (auto& s : scores) s += base;
    for (const Posting& p : index.postings(t)) {
      const double len = static_cast<double>(index.doc_lengths()[p.doc_ordinal]);
      const double mixed =
          lambda * static_cast<double>(p.term_frequency) / len + background;
      scores[p.doc_ordinal] += std::log(mixed) - base;
    }
  }

  double min_finite = inf;
  for (double s : scores)
    if (std::isfinite(s)) min_finite = std::min(min_finite, s);
  if (min_finite == inf) {
    std::fill(scores.begin(), scores.end(), 0.0);
  } else {
    for (auto& s : scores)
      if (!std::isfinite(s)) s = min_finite - 1.0;
  }
  return to_ranked_list(index, std::move(scores));
}

}  // namespace boolrank
