#pragma once

#include <map>
#include <string>
#include <vector>

#include "boolrank/error.hpp"

namespace boolrank {

struct Document {
  std::string doc_id;
  std::string title;
  std::string abstract_text;  // may be empty, real records often lack one
};

struct Topic {
  std::string topic_id;
  std::string boolean_query_raw;
  std::string final_title;    // empty = not provided
  std::string working_title;  // empty = not provided
};

enum class JudgmentLevel { Abstract, FullText };

struct Judgments {
  JudgmentLevel level = JudgmentLevel::Abstract;
  std::map<std::string, std::map<std::string, int>> by_topic;

  int grade(const std::string& topic_id, const std::string& doc_id) const;
  bool is_relevant(const std::string& topic_id, const std::string& doc_id) const {
    return grade(topic_id, doc_id) > 0;
  }
};

struct RunEntry {
  std::string doc_id;
  int rank = 0;  // 1-based
  double score = 0.0;
};

struct RankedList {
  std::string topic_id;
  std::string tag;
  std::vector<RunEntry> entries;
};

enum class GenerationMode { Single, Multi };

const char* to_string(GenerationMode mode);
GenerationMode generation_mode_from_string(const std::string& s);

struct GeneratedQuerySet {
  std::string topic_id;
  std::string model_tag;
  GenerationMode mode = GenerationMode::Single;
  std::vector<std::string> queries;
};

// Line-delimited JSON records {"doc_id","title","abstract"?}.
std::vector<Document> load_corpus(const std::string& path);

// Line-delimited JSON records {"topic_id","boolean","final_title"?,"working_title"?}.
// The boolean query must parse; a rejected query is a malformed record.
std::vector<Topic> load_topics(const std::string& path);

// TREC qrels: whitespace-separated `topic_id 0 doc_id grade` lines.
Judgments load_qrels(const std::string& path, JudgmentLevel level);

// TREC runs: `topic_id Q0 doc_id rank score tag` lines; ranks within a topic
// must run 1..n in file order with non-increasing scores and unique doc_ids.
std::vector<RankedList> read_run(const std::string& path);

// Writes with fixed 6-decimal scores. A non-empty tag overrides each list's
// own tag. Lists are validated against the run invariants before writing.
void write_run(const std::vector<RankedList>& lists, const std::string& path,
               const std::string& tag = "");

// Line-delimited JSON records {"topic_id","model_tag","mode","variant","query"},
// variant 1-based and contiguous per (topic_id, model_tag, mode) group.
std::vector<GeneratedQuerySet> read_generated_queries(const std::string& path);
void append_generated_queries(const std::string& path,
                              const GeneratedQuerySet& set);

// Per-topic candidate pools: whitespace-separated `topic_id doc_id` lines.
std::map<std::string, std::vector<std::string>> load_candidates(
    const std::string& path);

// Writes content to path via a temporary file and rename, so readers never
// observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace boolrank
