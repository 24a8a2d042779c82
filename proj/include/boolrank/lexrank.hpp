#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "boolrank/corpusio.hpp"
#include "boolrank/error.hpp"

namespace boolrank {

struct Posting {
  std::size_t doc_ordinal;
  int term_frequency;
};

// Immutable in-memory inverted index over one topic's candidate documents.
// Document text is title + " " + abstract, run through tokenize().
class Index {
 public:
  static Index build(const std::vector<Document>& docs);

  std::size_t doc_count() const { return doc_ids_.size(); }
  double avg_doc_len() const { return avg_doc_len_; }
  std::size_t total_tokens() const { return total_tokens_; }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  const std::vector<std::size_t>& doc_lengths() const { return doc_lengths_; }

  // Empty when the token is out of vocabulary.
  const std::vector<Posting>& postings(const std::string& token) const;
  std::size_t document_frequency(const std::string& token) const;
  std::size_t collection_frequency(const std::string& token) const;

 private:
  std::vector<std::string> doc_ids_;
  std::vector<std::size_t> doc_lengths_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::unordered_map<std::string, std::size_t> collection_counts_;
  std::size_t total_tokens_ = 0;
  double avg_doc_len_ = 0.0;
};

struct ScorerParams {
  double bm25_k1 = 1.5;
  double bm25_b = 0.75;
  double qlm_lambda = 0.5;

  // Throws std::invalid_argument when a value is out of range.
  void validate() const;
};

// Okapi BM25 with idf(t) = ln((N - df + 0.5)/(df + 0.5) + 1). Every indexed
// document is returned, sorted by score descending with ascending doc_id as
// the tiebreak; out-of-vocabulary and empty queries yield all-zero scores.
RankedList score_bm25(const Index& index,
                      const std::vector<std::string>& query_tokens,
                      const ScorerParams& params = {});

// Query likelihood with Jelinek-Mercer smoothing:
// score(d) = sum_t ln(lambda*tf/len + (1-lambda)*cf/total). Documents whose
// sum is -inf (a query term absent from the whole collection) are assigned
// the minimum finite score minus 1; if no finite score exists, all scores
// are 0. Throws ScoreError(EmptyCollection) for a non-empty query over an
// index with no tokens at all.
RankedList score_qlm_jm(const Index& index,
                        const std::vector<std::string>& query_tokens,
                        const ScorerParams& params = {});

}  // namespace boolrank
