// boolrank: screening-prioritisation pipeline over Boolean review queries.
// Subcommands cover query generation, candidate ranking, run fusion, oracle
// run selection, and metric reports; `pipeline` chains them end to end.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "boolrank/boolquery.hpp"
#include "boolrank/clf.hpp"
#include "boolrank/corpusio.hpp"
#include "boolrank/error.hpp"
#include "boolrank/evalmetrics.hpp"
#include "boolrank/fuse.hpp"
#include "boolrank/genquery.hpp"
#include "boolrank/lexrank.hpp"
#include "boolrank/text.hpp"

namespace {

using namespace boolrank;

int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

// Runs fn(0..count-1) on a bounded pool. A failure is rethrown by lowest
// index so error reports do not depend on scheduling.
void for_each_index(std::size_t count, int workers,
                    const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t pool =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(workers, 1)));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(count);
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(pool);
  for (std::size_t w = 0; w < pool; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  for (auto& failure : failures)
    if (failure) std::rethrow_exception(failure);
}

JudgmentLevel level_from_string(const std::string& name) {
  return name == "fulltext" ? JudgmentLevel::FullText : JudgmentLevel::Abstract;
}

std::string fixed4(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

// "-" (or empty) goes to stdout, anything else is written atomically.
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  atomic_write_file(path, content);
  std::cout << "wrote " << path << "\n";
}

// --------------------------------------------------------------- generate

struct GenerateOptions {
  std::string topics;
  std::string store;
  std::string endpoint;
  std::string model;
  std::string model_tag;
  std::string prompt = "chatgpt-query";
  std::string mode = "single";
  std::string api_key_env = "BOOLRANK_API_KEY";
  double temperature = -1.0;  // < 0 keeps the mode preset
  int num_generations = 0;    // 0 keeps the mode preset
  int max_retries = 3;
  int timeout = 30;
  int backoff_ms = 250;
  int workers = default_workers();
};

GenerationConfig make_generation_config(const GenerateOptions& opt) {
  auto config = GenerationConfig::for_mode(generation_mode_from_string(opt.mode));
  config.endpoint_url = opt.endpoint;
  config.model_name = opt.model;
  config.model_tag = opt.model_tag;
  config.prompt = prompt_kind_from_string(opt.prompt);
  if (opt.temperature >= 0.0) config.temperature = opt.temperature;
  if (opt.num_generations > 0) config.num_generations = opt.num_generations;
  config.max_retries = opt.max_retries;
  config.timeout_seconds = opt.timeout;
  config.backoff_initial_ms = opt.backoff_ms;
  config.api_key_env = opt.api_key_env;
  return config;
}

// Fills the store for every topic; the pool bounds in-flight requests.
void generate_all(const GenerateOptions& opt, const std::vector<Topic>& topics,
                  GeneratedQueryStore& store) {
  const auto config = make_generation_config(opt);
  config.validate();
  struct Outcome {
    std::size_t count = 0;
    bool cached = false;
  };
  std::vector<Outcome> outcomes(topics.size());
  for_each_index(topics.size(), opt.workers, [&](std::size_t i) {
    const Topic& topic = topics[i];
    outcomes[i].cached =
        store.find(topic.topic_id, config.cache_tag(), config.mode).has_value();
    outcomes[i].count = load_or_generate(config, store, topic).queries.size();
  });
  for (std::size_t i = 0; i < topics.size(); ++i)
    std::cout << topics[i].topic_id << ": " << outcomes[i].count << " queries ("
              << (outcomes[i].cached ? "cached" : "generated") << ")\n";
}

int cmd_generate(const GenerateOptions& opt) {
  const auto topics = load_topics(opt.topics);
  GeneratedQueryStore store(opt.store);
  generate_all(opt, topics, store);
  return 0;
}

// ------------------------------------------------------------------- rank

struct RankOptions {
  std::string corpus;
  std::string topics;
  std::string candidates;
  std::string out_dir = "runs";
  std::string scorer = "bm25";
  std::string source = "boolean-terms";
  std::string store;
  std::string model_tag;
  std::string mode = "single";
  bool include_negated = false;
  double k1 = 1.5;
  double b = 0.75;
  double lambda = 0.5;
  int workers = default_workers();
};

struct RankArtifacts {
  std::vector<std::string> tags;                // one per query variant
  std::vector<std::vector<RankedList>> runs;    // [variant][topic]
};

RankArtifacts rank_runs(const RankOptions& opt) {
  if (opt.scorer == "clf" && opt.source != "boolean-terms")
    throw std::invalid_argument(
        "the clf scorer ranks the boolean query itself; use --source boolean-terms");
  if (opt.source == "generated") {
    if (opt.store.empty())
      throw std::invalid_argument("--store is required with --source generated");
    if (opt.model_tag.empty())
      throw std::invalid_argument("--model-tag is required with --source generated");
  }
  ScorerParams params;
  params.bm25_k1 = opt.k1;
  params.bm25_b = opt.b;
  params.qlm_lambda = opt.lambda;
  params.validate();

  const auto corpus = load_corpus(opt.corpus);
  const auto topics = load_topics(opt.topics);
  if (topics.empty())
    throw DataError(DataError::Kind::MalformedRecord, 0,
                    opt.topics + " holds no topics");
  std::unordered_map<std::string, const Document*> doc_by_id;
  doc_by_id.reserve(corpus.size());
  for (const auto& doc : corpus) doc_by_id.emplace(doc.doc_id, &doc);

  const bool per_topic_pools = !opt.candidates.empty();
  std::map<std::string, std::vector<std::string>> candidates;
  if (per_topic_pools) candidates = load_candidates(opt.candidates);

  struct Job {
    const Topic* topic;
    QueryNode::Ptr tree;                               // clf input
    std::vector<std::vector<std::string>> variants;    // token lists
  };
  std::vector<Job> jobs;
  jobs.reserve(topics.size());
  const GenerationMode mode = generation_mode_from_string(opt.mode);
  std::optional<GeneratedQueryStore> store;
  if (opt.source == "generated") store.emplace(opt.store);

  for (const auto& topic : topics) {
    Job job{&topic, nullptr, {}};
    if (opt.source == "boolean-terms") {
      job.tree = parse_boolean(topic.boolean_query_raw);
      job.variants.push_back(extract_terms(*job.tree, opt.include_negated));
    } else if (opt.source == "final-title" || opt.source == "working-title") {
      const std::string& title = opt.source == "final-title"
                                     ? topic.final_title
                                     : topic.working_title;
      if (title.empty())
        throw DataError(DataError::Kind::MalformedRecord, 0,
                        "topic '" + topic.topic_id + "' has no " +
                            (opt.source == "final-title" ? "final" : "working") +
                            " title");
      job.variants.push_back(tokenize(title));
    } else {
      auto hit = store->find(topic.topic_id, opt.model_tag, mode);
      if (!hit)
        throw DataError(DataError::Kind::MalformedRecord, 0,
                        "no generated queries for topic '" + topic.topic_id +
                            "' under model tag '" + opt.model_tag + "' (" +
                            to_string(mode) + " mode)");
      for (const auto& query : hit->queries)
        job.variants.push_back(tokenize(query));
    }
    jobs.push_back(std::move(job));
  }

  const std::size_t variant_count = jobs.front().variants.size();
  for (const auto& job : jobs)
    if (job.variants.size() != variant_count)
      throw DataError(DataError::Kind::MalformedRecord, 0,
                      "topic '" + job.topic->topic_id + "' has " +
                          std::to_string(job.variants.size()) +
                          " query variants, expected " +
                          std::to_string(variant_count) + " like topic '" +
                          jobs.front().topic->topic_id + "'");

  RankArtifacts art;
  for (std::size_t v = 0; v < variant_count; ++v) {
    std::string tag = opt.scorer + "-" + opt.source;
    if (variant_count > 1) tag += "-v" + std::to_string(v + 1);
    art.tags.push_back(std::move(tag));
  }
  art.runs.assign(variant_count, std::vector<RankedList>(jobs.size()));

  // Without per-topic pools every topic ranks the same corpus, so one shared
  // index serves all workers (scoring only reads it).
  std::optional<Index> shared;
  if (!per_topic_pools) shared = Index::build(corpus);

  for_each_index(jobs.size(), opt.workers, [&](std::size_t i) {
    const Job& job = jobs[i];
    const std::string& topic_id = job.topic->topic_id;
    std::optional<Index> local;
    const Index* index = shared ? &*shared : nullptr;
    if (per_topic_pools) {
      auto pool = candidates.find(topic_id);
      if (pool == candidates.end())
        throw DataError(DataError::Kind::MalformedRecord, 0,
                        opt.candidates + " lists no candidates for topic '" +
                            topic_id + "'");
      std::vector<Document> docs;
      docs.reserve(pool->second.size());
      for (const auto& doc_id : pool->second) {
        auto found = doc_by_id.find(doc_id);
        if (found == doc_by_id.end())
          throw DataError(DataError::Kind::MalformedRecord, 0,
                          "candidate doc '" + doc_id + "' for topic '" +
                              topic_id + "' is not in the corpus");
        docs.push_back(*found->second);
      }
      try {
        local = Index::build(docs);
      } catch (const ScoreError& e) {
        throw ScoreError(e.kind(), "topic '" + topic_id + "': " + e.what());
      }
      index = &*local;
    }
    for (std::size_t v = 0; v < art.runs.size(); ++v) {
      RankedList list;
      if (opt.scorer == "clf")
        list = rank_clf(*index, job.tree, params);
      else if (opt.scorer == "qlm")
        list = score_qlm_jm(*index, job.variants[v], params);
      else
        list = score_bm25(*index, job.variants[v], params);
      list.topic_id = topic_id;
      list.tag = art.tags[v];
      art.runs[v][i] = std::move(list);
    }
  });
  return art;
}

void write_rank_artifacts(const RankArtifacts& art, const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  for (std::size_t v = 0; v < art.runs.size(); ++v) {
    const std::string path = (dir / (art.tags[v] + ".run")).string();
    write_run(art.runs[v], path, art.tags[v]);
    std::cout << "wrote " << path << " (" << art.runs[v].size() << " topics)\n";
  }
}

int cmd_rank(const RankOptions& opt) {
  write_rank_artifacts(rank_runs(opt), opt.out_dir);
  return 0;
}

// ------------------------------------------------------------ fuse/oracle

// Runs from several files realigned per topic, in the first file's topic
// order. Every file must cover exactly the same topics.
struct RunGroups {
  std::vector<std::string> topic_order;
  std::vector<std::vector<RankedList>> by_topic;  // [topic][file]
};

RunGroups group_runs(const std::vector<std::string>& paths) {
  RunGroups groups;
  std::map<std::string, std::size_t> position;
  for (std::size_t p = 0; p < paths.size(); ++p) {
    auto lists = read_run(paths[p]);
    if (p == 0) {
      for (auto& list : lists) {
        position.emplace(list.topic_id, groups.topic_order.size());
        groups.topic_order.push_back(list.topic_id);
        groups.by_topic.emplace_back();
        groups.by_topic.back().push_back(std::move(list));
      }
      continue;
    }
    if (lists.size() != groups.topic_order.size())
      throw FuseError(FuseError::Kind::TopicMismatch,
                      paths[p] + " covers a different topic set than " +
                          paths.front());
    for (auto& list : lists) {
      auto found = position.find(list.topic_id);
      if (found == position.end())
        throw FuseError(FuseError::Kind::TopicMismatch,
                        paths[p] + " has topic '" + list.topic_id +
                            "' missing from " + paths.front());
      groups.by_topic[found->second].push_back(std::move(list));
    }
  }
  return groups;
}

struct FuseOptions {
  std::vector<std::string> paths;
  std::string out;
  std::string tag = "fused";
  std::string normalize = "none";
};

int cmd_fuse(const FuseOptions& opt) {
  const auto groups = group_runs(opt.paths);
  FusionPolicy policy;
  policy.normalization = opt.normalize == "minmax" ? Normalization::MinMax
                                                   : Normalization::None;
  std::vector<RankedList> fused;
  fused.reserve(groups.by_topic.size());
  for (const auto& lists : groups.by_topic) {
    auto list = combsum(lists, policy);
    list.tag = opt.tag;
    fused.push_back(std::move(list));
  }
  write_run(fused, opt.out, opt.tag);
  std::cout << "wrote " << opt.out << " (" << fused.size() << " topics, "
            << opt.paths.size() << " input runs)\n";
  return 0;
}

struct OracleOptions {
  std::vector<std::string> paths;
  std::string qrels;
  std::string level = "abstract";
  std::string out;
  std::string report = "-";
  std::string tag = "oracle";
};

int cmd_oracle(const OracleOptions& opt) {
  const auto groups = group_runs(opt.paths);
  const auto judgments = load_qrels(opt.qrels, level_from_string(opt.level));
  std::vector<RankedList> chosen;
  std::string report = "topic,run,ap\n";
  for (std::size_t i = 0; i < groups.by_topic.size(); ++i) {
    const std::string& topic_id = groups.topic_order[i];
    try {
      const auto selection = oracle_select(groups.by_topic[i], judgments);
      auto list = groups.by_topic[i][selection.run_index];
      list.tag = opt.tag;
      chosen.push_back(std::move(list));
      report += topic_id + "," + opt.paths[selection.run_index] + "," +
                fixed4(selection.ap_value) + "\n";
    } catch (const MetricError& e) {
      // AP is undefined without a judged-relevant doc; such topics are
      // reported as NA and left out of the chosen run.
      if (e.kind() != MetricError::Kind::NoJudgedRelevant) throw;
      report += topic_id + ",NA,NA\n";
    }
  }
  write_run(chosen, opt.out, opt.tag);
  std::cout << "wrote " << opt.out << " (" << chosen.size() << " of "
            << groups.topic_order.size() << " topics)\n";
  emit(opt.report, report);
  return 0;
}

// ------------------------------------------------------------------- eval

struct EvalOptions {
  std::vector<std::string> paths;
  std::string qrels;
  std::string level = "abstract";
  std::string out = "-";
  std::string json_out;
  std::vector<int> percents = {1, 5, 10, 20};
  std::vector<int> wss_targets = {95, 100};
};

int cmd_eval(const EvalOptions& opt) {
  const auto judgments = load_qrels(opt.qrels, level_from_string(opt.level));
  std::vector<MetricReport> reports;
  reports.reserve(opt.paths.size());
  for (const auto& path : opt.paths)
    reports.push_back(
        evaluate_runs(read_run(path), judgments, opt.percents, opt.wss_targets));

  if (opt.paths.size() == 1) {
    emit(opt.out, metrics_csv(reports.front()));
    if (!opt.json_out.empty()) emit(opt.json_out, metrics_json(reports.front()));
    return 0;
  }

  // Several runs share one table; a leading column names the run file.
  std::string combined;
  for (std::size_t r = 0; r < reports.size(); ++r) {
    const std::string csv = metrics_csv(reports[r]);
    std::size_t begin = 0;
    bool header = true;
    while (begin < csv.size()) {
      std::size_t end = csv.find('\n', begin);
      if (end == std::string::npos) end = csv.size();
      const std::string line = csv.substr(begin, end - begin);
      if (header) {
        if (r == 0) combined += "run," + line + "\n";
        header = false;
      } else if (!line.empty()) {
        combined += opt.paths[r] + "," + line + "\n";
      }
      begin = end + 1;
    }
  }
  emit(opt.out, combined);

  if (!opt.json_out.empty()) {
    nlohmann::json all = nlohmann::json::array();
    for (std::size_t r = 0; r < reports.size(); ++r)
      all.push_back({{"run", opt.paths[r]},
                     {"metrics", nlohmann::json::parse(metrics_json(reports[r]))}});
    emit(opt.json_out, all.dump(2) + "\n");
  }
  return 0;
}

// --------------------------------------------------------------- pipeline

struct PipelineOptions {
  RankOptions rank;
  GenerateOptions gen;  // endpoint empty = rely on the cache alone
  std::string qrels;
  std::string level = "abstract";
  std::string metrics_out = "-";
  std::string json_out;
};

int cmd_pipeline(const PipelineOptions& opt) {
  RankOptions rank = opt.rank;
  if (rank.model_tag.empty()) rank.model_tag = opt.gen.model;
  if (rank.source == "generated" && !opt.gen.endpoint.empty()) {
    if (rank.store.empty())
      throw std::invalid_argument("--store is required with --source generated");
    GeneratedQueryStore store(rank.store);
    GenerateOptions gen = opt.gen;
    gen.topics = rank.topics;
    gen.model_tag = rank.model_tag;
    gen.mode = rank.mode;
    generate_all(gen, load_topics(rank.topics), store);
  }

  const auto art = rank_runs(rank);
  write_rank_artifacts(art, rank.out_dir);

  std::vector<RankedList> final_run;
  if (art.runs.size() == 1) {
    final_run = art.runs.front();
  } else {
    const std::string tag = rank.scorer + "-" + rank.source + "-fused";
    final_run.reserve(art.runs.front().size());
    for (std::size_t i = 0; i < art.runs.front().size(); ++i) {
      std::vector<RankedList> variants;
      variants.reserve(art.runs.size());
      for (const auto& run : art.runs) variants.push_back(run[i]);
      auto fused = fuse_multi(variants);
      fused.tag = tag;
      final_run.push_back(std::move(fused));
    }
    const std::string path =
        (std::filesystem::path(rank.out_dir) / (tag + ".run")).string();
    write_run(final_run, path, tag);
    std::cout << "wrote " << path << " (" << final_run.size() << " topics)\n";
  }

  const auto judgments = load_qrels(opt.qrels, level_from_string(opt.level));
  const auto report = evaluate_runs(final_run, judgments);
  emit(opt.metrics_out, metrics_csv(report));
  if (!opt.json_out.empty()) emit(opt.json_out, metrics_json(report));
  return 0;
}

// ---------------------------------------------------------------- wiring

void add_generation_flags(CLI::App* cmd, GenerateOptions& opt, bool endpoint_required) {
  auto* endpoint = cmd->add_option("--endpoint", opt.endpoint,
                                   "Chat-completions URL of the generation endpoint");
  auto* model = cmd->add_option("--model", opt.model, "Model name sent to the endpoint");
  if (endpoint_required) {
    endpoint->required();
    model->required();
  }
  cmd->add_option("--prompt", opt.prompt, "Prompt template")
      ->check(CLI::IsMember({"chatgpt-query", "alpaca-query", "title-gen"}))
      ->capture_default_str();
  cmd->add_option("--temperature", opt.temperature,
                  "Sampling temperature (default: the mode preset)");
  cmd->add_option("--num-generations", opt.num_generations,
                  "Completions per topic (default: the mode preset)");
  cmd->add_option("--max-retries", opt.max_retries, "Extra attempts after a failure")
      ->capture_default_str();
  cmd->add_option("--timeout", opt.timeout, "Per-request timeout in seconds")
      ->capture_default_str();
  cmd->add_option("--backoff-ms", opt.backoff_ms, "First retry delay in milliseconds")
      ->capture_default_str();
  cmd->add_option("--api-key-env", opt.api_key_env,
                  "Environment variable holding the API key; empty disables auth")
      ->capture_default_str();
}

void add_rank_flags(CLI::App* cmd, RankOptions& opt) {
  cmd->add_option("--corpus", opt.corpus, "Corpus JSONL file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--topics", opt.topics, "Topics JSONL file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--candidates", opt.candidates,
                  "Per-topic candidate pool file (default: whole corpus)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out-dir", opt.out_dir, "Directory for run files")
      ->capture_default_str();
  cmd->add_option("--scorer", opt.scorer, "Ranking function")
      ->check(CLI::IsMember({"bm25", "qlm", "clf"}))
      ->capture_default_str();
  cmd->add_option("--source", opt.source, "Where query text comes from")
      ->check(CLI::IsMember({"boolean-terms", "generated", "final-title", "working-title"}))
      ->capture_default_str();
  cmd->add_option("--store", opt.store,
                  "Generated-queries file (required with --source generated)");
  cmd->add_option("--model-tag", opt.model_tag,
                  "Cache tag of the generated queries to rank with");
  cmd->add_option("--mode", opt.mode, "Generation mode of the cached queries")
      ->check(CLI::IsMember({"single", "multi"}))
      ->capture_default_str();
  cmd->add_flag("--include-negated", opt.include_negated,
                "Keep terms under NOT when extracting boolean terms");
  cmd->add_option("--k1", opt.k1, "BM25 k1")->capture_default_str();
  cmd->add_option("--b", opt.b, "BM25 b")->capture_default_str();
  cmd->add_option("--lambda", opt.lambda, "QLM Jelinek-Mercer lambda")
      ->capture_default_str();
  cmd->add_option("--workers", opt.workers, "Topics ranked concurrently")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Screening prioritisation for systematic reviews: rank the"
               " documents a Boolean query retrieved, with queries taken from"
               " the Boolean query itself, generated natural language"
               " variants, or review titles."};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "INI config file; sections name subcommands, flags override");

  GenerateOptions gen_opt;
  auto* gen_cmd = app.add_subcommand(
      "generate", "Generate natural language queries for every topic");
  gen_cmd->add_option("--topics", gen_opt.topics, "Topics JSONL file")
      ->required()
      ->check(CLI::ExistingFile);
  gen_cmd->add_option("--store", gen_opt.store, "Generated-queries cache file")
      ->required();
  gen_cmd->add_option("--model-tag", gen_opt.model_tag,
                      "Cache tag (default: the model name)");
  gen_cmd->add_option("--mode", gen_opt.mode, "single or multi")
      ->check(CLI::IsMember({"single", "multi"}))
      ->capture_default_str();
  gen_cmd->add_option("--workers", gen_opt.workers, "In-flight requests")
      ->capture_default_str();
  add_generation_flags(gen_cmd, gen_opt, true);

  RankOptions rank_opt;
  auto* rank_cmd = app.add_subcommand(
      "rank", "Rank each topic's candidates, one run file per query variant");
  add_rank_flags(rank_cmd, rank_opt);

  FuseOptions fuse_opt;
  auto* fuse_cmd =
      app.add_subcommand("fuse", "CombSUM-fuse two or more run files");
  fuse_cmd->add_option("runs", fuse_opt.paths, "Run files to fuse")
      ->required()
      ->check(CLI::ExistingFile);
  fuse_cmd->add_option("--out", fuse_opt.out, "Fused run file")->required();
  fuse_cmd->add_option("--tag", fuse_opt.tag, "Tag for the fused run")
      ->capture_default_str();
  fuse_cmd->add_option("--normalize", fuse_opt.normalize,
                       "Score normalization before summing")
      ->check(CLI::IsMember({"none", "minmax"}))
      ->capture_default_str();

  OracleOptions oracle_opt;
  auto* oracle_cmd = app.add_subcommand(
      "oracle", "Per topic, keep the input run with the highest AP");
  oracle_cmd->add_option("runs", oracle_opt.paths, "Candidate run files")
      ->required()
      ->check(CLI::ExistingFile);
  oracle_cmd->add_option("--qrels", oracle_opt.qrels, "Relevance judgments")
      ->required()
      ->check(CLI::ExistingFile);
  oracle_cmd->add_option("--level", oracle_opt.level, "Judgment level")
      ->check(CLI::IsMember({"abstract", "fulltext"}))
      ->capture_default_str();
  oracle_cmd->add_option("--out", oracle_opt.out, "Chosen-run output file")
      ->required();
  oracle_cmd->add_option("--report", oracle_opt.report,
                         "Per-topic choice report CSV ('-' for stdout)")
      ->capture_default_str();
  oracle_cmd->add_option("--tag", oracle_opt.tag, "Tag for the output run")
      ->capture_default_str();

  EvalOptions eval_opt;
  auto* eval_cmd =
      app.add_subcommand("eval", "Metric report (CSV) for one or more runs");
  eval_cmd->add_option("runs", eval_opt.paths, "Run files to evaluate")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--qrels", eval_opt.qrels, "Relevance judgments")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--level", eval_opt.level, "Judgment level")
      ->check(CLI::IsMember({"abstract", "fulltext"}))
      ->capture_default_str();
  eval_cmd->add_option("--out", eval_opt.out, "CSV output ('-' for stdout)")
      ->capture_default_str();
  eval_cmd->add_option("--json", eval_opt.json_out, "Also write a JSON summary");
  eval_cmd->add_option("--percents", eval_opt.percents,
                       "Recall cutoffs as percents")
      ->delimiter(',')
      ->capture_default_str();
  eval_cmd->add_option("--wss", eval_opt.wss_targets,
                       "WSS recall targets as percents")
      ->delimiter(',')
      ->capture_default_str();

  PipelineOptions pipe_opt;
  auto* pipe_cmd = app.add_subcommand(
      "pipeline", "generate (when configured) + rank + fuse variants + eval");
  add_rank_flags(pipe_cmd, pipe_opt.rank);
  pipe_cmd->add_option("--qrels", pipe_opt.qrels, "Relevance judgments")
      ->required()
      ->check(CLI::ExistingFile);
  pipe_cmd->add_option("--level", pipe_opt.level, "Judgment level")
      ->check(CLI::IsMember({"abstract", "fulltext"}))
      ->capture_default_str();
  pipe_cmd->add_option("--metrics-out", pipe_opt.metrics_out,
                       "Metrics CSV ('-' for stdout)")
      ->capture_default_str();
  pipe_cmd->add_option("--json", pipe_opt.json_out, "Also write a JSON summary");
  add_generation_flags(pipe_cmd, pipe_opt.gen, false);

  try {
    app.parse(argc, argv);
    if (*gen_cmd) return cmd_generate(gen_opt);
    if (*rank_cmd) return cmd_rank(rank_opt);
    if (*fuse_cmd) return cmd_fuse(fuse_opt);
    if (*oracle_cmd) return cmd_oracle(oracle_opt);
    if (*eval_cmd) return cmd_eval(eval_opt);
    if (*pipe_cmd) return cmd_pipeline(pipe_opt);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const GenError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == GenError::Kind::MissingPlaceholder ? 1 : 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
