#include "boolrank/corpusio.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "boolrank/boolquery.hpp"

namespace boolrank {

namespace {

using nlohmann::json;

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good())
    throw DataError(DataError::Kind::IoFailure, 0, "cannot open " + path);
  return in;
}

json parse_record(const std::string& line, std::size_t line_no,
                  const std::string& path) {
  json rec = json::parse(line, nullptr, false);
  if (rec.is_discarded() || !rec.is_object())
    throw DataError(DataError::Kind::MalformedRecord, line_no,
                    path + ":" + std::to_string(line_no) + ": not a JSON object");
  return rec;
}

std::string require_string(const json& rec, const char* key, std::size_t line_no,
                           const std::string& path) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string() || it->get<std::string>().empty())
    throw DataError(DataError::Kind::MalformedRecord, line_no,
                    path + ":" + std::to_string(line_no) +
                        ": missing or empty field '" + key + "'");
  return it->get<std::string>();
}

std::string optional_string(const json& rec, const char* key) {
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return "";
  return it->is_string() ? it->get<std::string>() : "";
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

bool blank(const std::string& line) {
  for (unsigned char c : line)
    if (!std::isspace(c)) return false;
  return true;
}

}  // namespace

int Judgments::grade(const std::string& topic_id, const std::string& doc_id) const {
  auto t = by_topic.find(topic_id);
  if (t == by_topic.end()) return 0;
  auto d = t->second.find(doc_id);
  return d == t->second.end() ? 0 : d->second;
}

const char* to_string(GenerationMode mode) {
  return mode == GenerationMode::Single ? "single" : "multi";
}

GenerationMode generation_mode_from_string(const std::string& s) {
  if (s == "single") return GenerationMode::Single;
  if (s == "multi") return GenerationMode::Multi;
  throw DataError(DataError::Kind::MalformedRecord, 0,
                  "unknown generation mode '" + s + "'");
}

std::vector<Document> load_corpus(const std::string& path) {
  auto in = open_for_read(path);
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json rec = parse_record(line, line_no, path);
    Document d;
    d.doc_id = require_string(rec, "doc_id", line_no, path);
    d.title = require_string(rec, "title", line_no, path);
    d.abstract_text = optional_string(rec, "abstract");
    if (!seen.insert(d.doc_id).second)
      throw DataError(DataError::Kind::DuplicateDocId, line_no,
                      path + ":" + std::to_string(line_no) +
                          ": duplicate doc_id '" + d.doc_id + "'");
    docs.push_back(std::move(d));
  }
  if (in.bad())
    throw DataError(DataError::Kind::IoFailure, line_no, "read error on " + path);
  return docs;
}

std::vector<Topic> load_topics(const std::string& path) {
  auto in = open_for_read(path);
  std::vector<Topic> topics;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json rec = parse_record(line, line_no, path);
    Topic t;
    t.topic_id = require_string(rec, "topic_id", line_no, path);
    t.boolean_query_raw = require_string(rec, "boolean", line_no, path);
    t.final_title = optional_string(rec, "final_title");
    t.working_title = optional_string(rec, "working_title");
    if (!seen.insert(t.topic_id).second)
      throw DataError(DataError::Kind::DuplicateDocId, line_no,
                      path + ":" + std::to_string(line_no) +
                          ": duplicate topic_id '" + t.topic_id + "'");
    try {
      parse_boolean(t.boolean_query_raw);
    } catch (const ParseError& e) {
      throw DataError(DataError::Kind::MalformedRecord, line_no,
                      path + ":" + std::to_string(line_no) +
                          ": boolean query rejected: " + e.what());
    }
    topics.push_back(std::move(t));
  }
  if (in.bad())
    throw DataError(DataError::Kind::IoFailure, line_no, "read error on " + path);
  return topics;
}

Judgments load_qrels(const std::string& path, JudgmentLevel level) {
  auto in = open_for_read(path);
  Judgments j;
  j.level = level;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto cols = split_ws(line);
    if (cols.size() != 4)
      throw DataError(DataError::Kind::MalformedLine, line_no,
                      path + ":" + std::to_string(line_no) +
                          ": expected 4 columns, got " +
                          std::to_string(cols.size()));
    int grade = 0;
    try {
      std::size_t used = 0;
      grade = std::stoi(cols[3], &used);
      if (used != cols[3].size()) throw std::invalid_argument(cols[3]);
    } catch (const std::exception&) {
      throw DataError(DataError::Kind::MalformedLine, line_no,
                      path + ":" + std::to_string(line_no) +
                          ": grade is not an integer: '" + cols[3] + "'");
    }
    if (grade < 0)
      throw DataError(DataError::Kind::MalformedLine, line_no,
                      path + ":" + std::to_string(line_no) + ": negative grade");
    auto [it, inserted] = j.by_topic[cols[0]].emplace(cols[2], grade);
    if (!inserted)
      throw DataError(DataError::Kind::DuplicatePair, line_no,
                      path + ":" + std::to_string(line_no) + ": pair (" +
                          cols[0] + ", " + cols[2] + ") appears twice");
  }
  if (in.bad())
    throw DataError(DataError::Kind::IoFailure, line_no, "read error on " + path);
  return j;
}

std::vector<RankedList> read_run(const std::string& path) {
  auto in = open_for_read(path);
  std::vector<RankedList> lists;
  std::map<std::string, std::size_t> index_of;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto cols = split_ws(line);
    if (cols.size() != 6 || cols[1] != "Q0")
      throw DataError(DataError::Kind::MalformedLine, line_no,
                      path + ":" + std::to_string(line_no) +
                          ": expected `topic Q0 doc rank score tag`");
    int rank = 0;
    double score = 0.0;
    try {
      std::size_t used = 0;
      rank = std::stoi(cols[3], &used);
      if (used != cols[3].size()) throw std::invalid_argument(cols[3]);
      score = std::stod(cols[4], &used);
      if (used != cols[4].size()) throw std::invalid_argument(cols[4]);
    } catch (const std::exception&) {
      throw DataError(DataError::Kind::MalformedLine, line_no,
                      path + ":" + std::to_string(line_no) +
                          ": bad rank or score");
    }
    auto [it, fresh] = index_of.emplace(cols[0], lists.size());
    if (fresh) lists.push_back(RankedList{cols[0], cols[5], {}});
    RankedList& rl = lists[it->second];
    if (rank != static_cast<int>(rl.entries.size()) + 1)
      throw DataError(DataError::Kind::NonContiguousRanks, line_no,
                      path + ":" + std::to_string(line_no) + ": topic " +
                          rl.topic_id + " expected rank " +
                          std::to_string(rl.entries.size() + 1) + ", got " +
                          std::to_string(rank));
    if (!rl.entries.empty() && score > rl.entries.back().score)
      throw DataError(DataError::Kind::ScoreOrderViolation, line_no,
                      path + ":" + std::to_string(line_no) + ": topic " +
                          rl.topic_id + " score increases at rank " +
                          std::to_string(rank));
    for (const auto& e : rl.entries)
      if (e.doc_id == cols[2])
        throw DataError(DataError::Kind::DuplicateRunDoc, line_no,
                        path + ":" + std::to_string(line_no) + ": topic " +
                            rl.topic_id + " repeats doc '" + cols[2] + "'");
    rl.entries.push_back(RunEntry{cols[2], rank, score});
  }
  if (in.bad())
    throw DataError(DataError::Kind::IoFailure, line_no, "read error on " + path);
  return lists;
}

void write_run(const std::vector<RankedList>& lists, const std::string& path,
               const std::string& tag) {
  std::string out;
  char buf[64];
  for (const auto& rl : lists) {
    std::unordered_set<std::string> seen;
    int expect = 1;
    double prev = 0.0;
    for (const auto& e : rl.entries) {
      if (e.rank != expect)
        throw DataError(DataError::Kind::NonContiguousRanks, 0,
                        "topic " + rl.topic_id + ": expected rank " +
                            std::to_string(expect) + ", got " +
                            std::to_string(e.rank));
      if (e.rank > 1 && e.score > prev)
        throw DataError(DataError::Kind::ScoreOrderViolation, 0,
                        "topic " + rl.topic_id + ": score increases at rank " +
                            std::to_string(e.rank));
      if (!seen.insert(e.doc_id).second)
        throw DataError(DataError::Kind::DuplicateRunDoc, 0,
                        "topic " + rl.topic_id + ": repeats doc '" + e.doc_id +
                            "'");
      prev = e.score;
      ++expect;
      std::snprintf(buf, sizeof(buf), "%.6f", e.score);
      const std::string& line_tag = tag.empty() ? rl.tag : tag;
      out += rl.topic_id + " Q0 " + e.doc_id + " " + std::to_string(e.rank) +
             " " + buf + " " + (line_tag.empty() ? "run" : line_tag) + "\n";
    }
  }
  atomic_write_file(path, out);
}

std::vector<GeneratedQuerySet> read_generated_queries(const std::string& path) {
  auto in = open_for_read(path);
  std::vector<GeneratedQuerySet> sets;
  std::map<std::string, std::size_t> index_of;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json rec = parse_record(line, line_no, path);
    const std::string topic_id = require_string(rec, "topic_id", line_no, path);
    const std::string model_tag = require_string(rec, "model_tag", line_no, path);
    const std::string mode_str = require_string(rec, "mode", line_no, path);
    const std::string query = require_string(rec, "query", line_no, path);
    GenerationMode mode;
    try {
      mode = generation_mode_from_string(mode_str);
    } catch (const DataError&) {
      throw DataError(DataError::Kind::MalformedRecord, line_no,
                      path + ":" + std::to_string(line_no) +
                          ": unknown mode '" + mode_str + "'");
    }
    auto it = rec.find("variant");
    if (it == rec.end() || !it->is_number_integer())
      throw DataError(DataError::Kind::MalformedRecord, line_no,
                      path + ":" + std::to_string(line_no) +
                          ": missing integer field 'variant'");
    const int variant = it->get<int>();

    const std::string key = topic_id + "\x1f" + model_tag + "\x1f" + mode_str;
    auto [slot, fresh] = index_of.emplace(key, sets.size());
    if (fresh) sets.push_back(GeneratedQuerySet{topic_id, model_tag, mode, {}});
    GeneratedQuerySet& s = sets[slot->second];
    if (variant != static_cast<int>(s.queries.size()) + 1)
      throw DataError(DataError::Kind::MalformedRecord, line_no,
                      path + ":" + std::to_string(line_no) +
                          ": expected variant " +
                          std::to_string(s.queries.size() + 1) + ", got " +
                          std::to_string(variant));
    s.queries.push_back(query);
  }
  if (in.bad())
    throw DataError(DataError::Kind::IoFailure, line_no, "read error on " + path);
  for (const auto& s : sets) {
    if (s.mode == GenerationMode::Single && s.queries.size() != 1)
      throw DataError(DataError::Kind::MalformedRecord, 0,
                      path + ": single-mode set for topic " + s.topic_id +
                          " has " + std::to_string(s.queries.size()) +
                          " queries");
  }
  return sets;
}

void append_generated_queries(const std::string& path,
                              const GeneratedQuerySet& set) {
  if (set.queries.empty())
    throw DataError(DataError::Kind::MalformedRecord, 0,
                    "refusing to write a query set with no queries");
  if (set.mode == GenerationMode::Single && set.queries.size() != 1)
    throw DataError(DataError::Kind::MalformedRecord, 0,
                    "single-mode set must hold exactly one query");
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out.good())
    throw DataError(DataError::Kind::IoFailure, 0, "cannot open " + path);
  for (std::size_t i = 0; i < set.queries.size(); ++i) {
    json rec{{"topic_id", set.topic_id},
             {"model_tag", set.model_tag},
             {"mode", to_string(set.mode)},
             {"variant", static_cast<int>(i + 1)},
             {"query", set.queries[i]}};
    out << rec.dump() << "\n";
  }
  out.flush();
  if (!out.good())
    throw DataError(DataError::Kind::IoFailure, 0, "write error on " + path);
}

std::map<std::string, std::vector<std::string>> load_candidates(
    const std::string& path) {
  auto in = open_for_read(path);
  std::map<std::string, std::vector<std::string>> out;
  std::map<std::string, std::set<std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto cols = split_ws(line);
    if (cols.size() != 2)
      throw DataError(DataError::Kind::MalformedLine, line_no,
                      path + ":" + std::to_string(line_no) +
                          ": expected `topic_id doc_id`");
    if (!seen[cols[0]].insert(cols[1]).second)
      throw DataError(DataError::Kind::DuplicatePair, line_no,
                      path + ":" + std::to_string(line_no) + ": pair (" +
                          cols[0] + ", " + cols[1] + ") appears twice");
    out[cols[0]].push_back(cols[1]);
  }
  if (in.bad())
    throw DataError(DataError::Kind::IoFailure, line_no, "read error on " + path);
  return out;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp." +
                       std::to_string(static_cast<unsigned>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out.good())
      throw DataError(DataError::Kind::IoFailure, 0,
                      "cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out.good())
      throw DataError(DataError::Kind::IoFailure, 0,
                      "write error on " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError(DataError::Kind::IoFailure, 0,
                    "cannot move temporary file onto " + path);
  }
}

}  // namespace boolrank
