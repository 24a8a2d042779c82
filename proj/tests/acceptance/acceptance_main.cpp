// End-to-end acceptance checks for the toolkit. Each criterion runs as an
// isolated function and prints one [PASS]/[FAIL] line; the process exits 0
// only when every criterion holds. Tolerances and time budgets are pinned
// here, next to the checks they guard.

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "boolrank/boolquery.hpp"
#include "boolrank/corpusio.hpp"
#include "boolrank/error.hpp"
#include "boolrank/evalmetrics.hpp"
#include "boolrank/fuse.hpp"
#include "boolrank/genquery.hpp"
#include "boolrank/lexrank.hpp"
#include "boolrank/text.hpp"

using namespace boolrank;
using nlohmann::json;

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw CheckFailure(what);
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_close(double got, double want, double tol, const std::string& what) {
  if (!(std::fabs(got - want) <= tol))
    throw CheckFailure(what + ": got " + num(got) + ", want " + num(want) +
                       " (tol " + num(tol) + ")");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  check(in.good(), "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("boolrank_accept_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

// ---------------------------------------------------------------------------
// Shared random-instance machinery for the metric criteria.

std::string padded_id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%03zu", prefix, i);
  return buf;
}

RankedList make_run(std::string topic_id, std::string tag,
                    std::vector<std::pair<std::string, double>> scored) {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  RankedList run;
  run.topic_id = std::move(topic_id);
  run.tag = std::move(tag);
  run.entries.reserve(scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i)
    run.entries.push_back(
        RunEntry{scored[i].first, static_cast<int>(i + 1), scored[i].second});
  return run;
}

struct MetricInstance {
  RankedList run;
  Judgments judgments;
  std::set<std::string> relevant;  // every judged-relevant doc, retrieved or not
};

// A run of 1..50 docs with real-valued scores, plus judgments that exercise
// unjudged docs, grade-0 docs, graded relevance and judged-relevant docs the
// run never retrieved. At least one relevant doc always exists.
MetricInstance random_metric_instance(std::mt19937& rng) {
  std::uniform_int_distribution<std::size_t> size_dist(1, 50);
  std::uniform_real_distribution<double> score_dist(0.0, 10.0);
  std::uniform_int_distribution<int> ten(0, 9);

  MetricInstance inst;
  const std::size_t n = size_dist(rng);
  std::vector<std::pair<std::string, double>> scored;
  for (std::size_t i = 0; i < n; ++i)
    scored.emplace_back(padded_id("d", i), score_dist(rng));
  inst.run = make_run("t", "g", std::move(scored));

  auto& topic_judgments = inst.judgments.by_topic["t"];
  for (std::size_t i = 0; i < n; ++i) {
    const int draw = ten(rng);
    if (draw <= 3) continue;  // unjudged
    const int grade = draw <= 6 ? 0 : (draw <= 8 ? 1 : 2);
    topic_judgments[padded_id("d", i)] = grade;
  }
  // Sometimes judge documents the run never retrieved.
  if (ten(rng) < 3) {
    const std::size_t extra = 1 + static_cast<std::size_t>(ten(rng)) % 3;
    for (std::size_t i = 0; i < extra; ++i)
      topic_judgments[padded_id("u", i)] = ten(rng) < 5 ? 1 : 0;
  }
  bool any_relevant = false;
  for (const auto& [doc, grade] : topic_judgments)
    if (grade > 0) any_relevant = true;
  if (!any_relevant) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    topic_judgments[padded_id("d", pick(rng))] = 1;
  }
  for (const auto& [doc, grade] : topic_judgments)
    if (grade > 0) inst.relevant.insert(doc);
  return inst;
}

// ---------------------------------------------------------------------------
// Brute-force prefix-scan reference for the ranking metrics. Deliberately
// the most naive possible phrasing of each definition.

std::vector<std::string> ranked_ids(const RankedList& run) {
  std::vector<std::string> ids;
  ids.reserve(run.entries.size());
  for (const auto& e : run.entries) ids.push_back(e.doc_id);
  return ids;
}

double reference_ap(const std::vector<std::string>& ranked,
                    const std::set<std::string>& relevant) {
  double sum = 0.0;
  std::size_t seen = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (relevant.count(ranked[k])) {
      ++seen;
      sum += static_cast<double>(seen) / static_cast<double>(k + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

std::size_t reference_last_rel(const std::vector<std::string>& ranked,
                               const std::set<std::string>& relevant) {
  std::set<std::string> retrieved(ranked.begin(), ranked.end());
  for (const auto& doc : relevant)
    if (!retrieved.count(doc)) return ranked.size();
  std::size_t deepest = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k)
    if (relevant.count(ranked[k])) deepest = k + 1;
  return deepest;
}

double reference_recall(const std::vector<std::string>& ranked,
                        const std::set<std::string>& relevant, int percent) {
  const std::size_t n = ranked.size();
  const std::size_t k = (static_cast<std::size_t>(percent) * n + 99) / 100;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < k && i < n; ++i)
    if (relevant.count(ranked[i])) ++hit;
  return static_cast<double>(hit) / static_cast<double>(relevant.size());
}

double reference_wss(const std::vector<std::string>& ranked,
                     const std::set<std::string>& relevant, int target) {
  const std::size_t n = ranked.size();
  const std::size_t needed =
      (static_cast<std::size_t>(target) * relevant.size() + 99) / 100;
  std::size_t rank_r = n;
  std::size_t seen = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (relevant.count(ranked[i])) {
      ++seen;
      if (seen >= needed) {
        rank_r = i + 1;
        break;
      }
    }
  }
  const double nd = static_cast<double>(n);
  return (nd - static_cast<double>(rank_r)) / nd -
         (1.0 - static_cast<double>(target) / 100.0);
}

// ---------------------------------------------------------------------------
// Criterion 1: the bundled verbatim Boolean query fixture.

void check_boolean_fixture() {
  const std::string raw =
      read_file(std::string(BOOLRANK_TEST_DATA_DIR) + "/varices.bool");
  const QueryNode::Ptr q = parse_boolean(raw);

  check(q->kind() == QueryNode::Kind::Or, "root node is not an OR");
  check(q->children().size() == 25,
        "expected 25 children, got " + std::to_string(q->children().size()));

  int mesh_noexp = 0, all_fields = 0, truncated = 0;
  std::vector<std::string> untruncated;
  for (const auto& child : q->children()) {
    check(child->is_atom(), "every child of the OR should be an atom");
    const AtomTerm& a = child->atom();
    if (a.field.kind == FieldTag::Kind::Mesh) {
      check(a.field.mesh_no_explosion, "the MeSH atom must carry noexp");
      check(!a.truncated, "the MeSH phrase carries no wildcard");
      ++mesh_noexp;
    } else {
      check(a.field.kind == FieldTag::Kind::AllFields,
            "non-MeSH atoms must be AllFields, got tag '" + a.field.raw + "'");
      ++all_fields;
      if (a.truncated) ++truncated;
      else untruncated.push_back(a.text);
    }
  }
  check(mesh_noexp == 1, "expected exactly 1 mesh:noexp atom");
  check(all_fields == 24, "expected 24 AllFields atoms");
  // The two fully spelled variants carry no wildcard; every other free-text
  // atom contains at least one truncated word.
  check(truncated == 22,
        "expected 22 wildcarded atoms, got " + std::to_string(truncated));
  check(untruncated.size() == 2 && untruncated[0] == "esophago gastric varix" &&
            untruncated[1] == "oesophago gastric varix",
        "unexpected set of non-wildcarded atoms");

  const QueryNode::Ptr again = parse_boolean(render(*q));
  check(*again == *q, "render -> parse round-trip changed the tree");
}

// ---------------------------------------------------------------------------
// Criterion 2: metrics vs. the brute-force reference on random instances.

void check_metric_reference_suite() {
  std::mt19937 rng(9120547u);
  std::uniform_int_distribution<int> percent_dist(1, 100);
  const double tol = 1e-12;

  for (int i = 0; i < 600; ++i) {
    const MetricInstance inst = random_metric_instance(rng);
    const std::vector<std::string> ids = ranked_ids(inst.run);
    const std::string where = " (instance " + std::to_string(i) + ")";

    check_close(average_precision(inst.run, inst.judgments),
                reference_ap(ids, inst.relevant), tol, "ap" + where);
    check(last_relevant_rank(inst.run, inst.judgments) ==
              static_cast<int>(reference_last_rel(ids, inst.relevant)),
          "last_rel" + where);
    for (int p : {1, 5, 10, 20, percent_dist(rng)})
      check_close(recall_at_percent(inst.run, inst.judgments, p),
                  reference_recall(ids, inst.relevant, p), tol,
                  "recall@" + std::to_string(p) + where);
    for (int t : {95, 100, percent_dist(rng)})
      check_close(wss(inst.run, inst.judgments, t),
                  reference_wss(ids, inst.relevant, t), tol,
                  "wss@" + std::to_string(t) + where);
  }
}

// ---------------------------------------------------------------------------
// Criterion 3: at a 100% recall target, wss collapses to (N - last_rel)/N.

void check_wss_full_recall_identity() {
  std::mt19937 rng(44260081u);
  for (int i = 0; i < 600; ++i) {
    const MetricInstance inst = random_metric_instance(rng);
    const double n = static_cast<double>(inst.run.entries.size());
    const double lhs = wss(inst.run, inst.judgments, 100);
    const double rhs =
        (n - static_cast<double>(last_relevant_rank(inst.run, inst.judgments))) / n;
    check(lhs == rhs, "wss@100 != (N - last_rel)/N on instance " +
                          std::to_string(i) + ": " + num(lhs) + " vs " + num(rhs));
  }
}

// ---------------------------------------------------------------------------
// Criterion 4: oracle selection always attains the bundle's best AP.

void check_oracle_selection_dominance() {
  std::mt19937 rng(77103329u);
  std::uniform_int_distribution<std::size_t> bundle_dist(1, 10);
  std::uniform_int_distribution<std::size_t> size_dist(5, 30);
  std::uniform_real_distribution<double> score_dist(0.0, 10.0);
  std::uniform_int_distribution<int> ten(0, 9);

  for (int i = 0; i < 200; ++i) {
    const std::size_t n = size_dist(rng);
    Judgments judgments;
    auto& topic_judgments = judgments.by_topic["t"];
    bool any_relevant = false;
    for (std::size_t d = 0; d < n; ++d) {
      const int draw = ten(rng);
      if (draw <= 4) continue;
      topic_judgments[padded_id("d", d)] = draw <= 7 ? 0 : 1;
      any_relevant = any_relevant || draw > 7;
    }
    if (!any_relevant) topic_judgments[padded_id("d", 0)] = 1;

    std::vector<RankedList> runs;
    const std::size_t bundle = bundle_dist(rng);
    for (std::size_t r = 0; r < bundle; ++r) {
      std::vector<std::pair<std::string, double>> scored;
      for (std::size_t d = 0; d < n; ++d)
        scored.emplace_back(padded_id("d", d), score_dist(rng));
      runs.push_back(make_run("t", "r" + std::to_string(r), std::move(scored)));
    }

    const OracleSelection chosen = oracle_select(runs, judgments);
    double best = average_precision(runs[0], judgments);
    for (const auto& run : runs)
      best = std::max(best, average_precision(run, judgments));

    check(chosen.run_index < runs.size(), "selected index out of range");
    check(chosen.ap_value == best,
          "selection did not attain the best AP on bundle " + std::to_string(i));
    check(average_precision(runs[chosen.run_index], judgments) == best,
          "selected run's AP is not the best AP on bundle " + std::to_string(i));
    for (const auto& run : runs)
      check(chosen.ap_value >= average_precision(run, judgments),
            "selection fell below an individual AP on bundle " +
                std::to_string(i));
  }
}

// ---------------------------------------------------------------------------
// Criterion 5: CombSUM fusion properties.

bool bit_identical(const RankedList& a, const RankedList& b) {
  if (a.topic_id != b.topic_id || a.tag != b.tag ||
      a.entries.size() != b.entries.size())
    return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const RunEntry& x = a.entries[i];
    const RunEntry& y = b.entries[i];
    if (x.doc_id != y.doc_id || x.rank != y.rank) return false;
    if (std::bit_cast<std::uint64_t>(x.score) !=
        std::bit_cast<std::uint64_t>(y.score))
      return false;
  }
  return true;
}

void check_combsum_properties() {
  std::mt19937 rng(58917023u);
  std::uniform_int_distribution<std::size_t> universe_dist(4, 20);
  std::uniform_int_distribution<std::size_t> list_dist(2, 6);
  std::uniform_real_distribution<double> score_dist(0.0, 10.0);
  const double scales[] = {0.001, 0.37, 2.5, 1000.0};

  for (int i = 0; i < 100; ++i) {
    const std::size_t universe = universe_dist(rng);
    std::vector<std::string> docs;
    for (std::size_t d = 0; d < universe; ++d) docs.push_back(padded_id("d", d));

    const std::size_t count = list_dist(rng);
    std::vector<RankedList> lists;
    for (std::size_t l = 0; l < count; ++l) {
      std::shuffle(docs.begin(), docs.end(), rng);
      std::uniform_int_distribution<std::size_t> take_dist(1, universe);
      const std::size_t take = take_dist(rng);
      std::vector<std::pair<std::string, double>> scored;
      for (std::size_t d = 0; d < take; ++d)
        scored.emplace_back(docs[d], score_dist(rng));
      lists.push_back(make_run("t", "g", std::move(scored)));
    }
    const std::string where = " (instance " + std::to_string(i) + ")";

    // Any permutation of the inputs fuses to a bit-identical output.
    std::vector<RankedList> shuffled = lists;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (Normalization norm : {Normalization::None, Normalization::MinMax}) {
      const FusionPolicy policy{norm};
      check(bit_identical(combsum(lists, policy), combsum(shuffled, policy)),
            "permuting the inputs changed the fusion" + where);
    }

    // A single list under no normalization passes through verbatim.
    check(bit_identical(combsum({lists[0]}, FusionPolicy{}), lists[0]),
          "single-list fusion is not the identity" + where);

    // Raw CombSUM equals the naive per-document sum of scores.
    const RankedList fused = combsum(lists, FusionPolicy{});
    std::map<std::string, double> naive;
    for (const auto& list : lists)
      for (const auto& e : list.entries) naive[e.doc_id] += e.score;
    check(fused.entries.size() == naive.size(),
          "fused output covers the wrong document set" + where);
    for (const auto& e : fused.entries)
      check_close(e.score, naive.at(e.doc_id), 1e-12,
                  "fused score for " + e.doc_id + where);

    // Scaling one input by a positive constant cannot reorder a min-max
    // normalized fusion.
    const RankedList base = combsum(lists, FusionPolicy{Normalization::MinMax});
    std::vector<RankedList> scaled = lists;
    std::uniform_int_distribution<std::size_t> which_dist(0, count - 1);
    const double c = scales[rng() % 4];
    for (auto& e : scaled[which_dist(rng)].entries) e.score *= c;
    const RankedList rescaled =
        combsum(scaled, FusionPolicy{Normalization::MinMax});
    check(rescaled.entries.size() == base.entries.size(),
          "rescaled fusion changed size" + where);
    for (std::size_t k = 0; k < base.entries.size(); ++k)
      check(base.entries[k].doc_id == rescaled.entries[k].doc_id,
            "scaling one input by " + num(c) + " reordered the fusion" + where);
  }
}

// ---------------------------------------------------------------------------
// Criterion 6: lexical scorers against hand-derived values.

void check_lexical_scorer_oracles() {
  // BM25, k1=1.5, b=0.75: three 2-token docs, query "b" hits d1 and d2 with
  // tf=1 and the length normalizer exactly 1, so both score
  // idf = ln((3 - 2 + 0.5)/(2 + 0.5) + 1) = ln(1.6); d3 scores 0.
  {
    const std::vector<Document> docs = {
        {"d1", "a b", ""}, {"d2", "b c", ""}, {"d3", "c d", ""}};
    const Index index = Index::build(docs);
    const RankedList run = score_bm25(index, {"b"});
    check(run.entries.size() == 3, "bm25 must rank all three docs");
    check(run.entries[0].doc_id == "d1" && run.entries[1].doc_id == "d2" &&
              run.entries[2].doc_id == "d3",
          "bm25 toy ordering is wrong");
    const double want = std::log(1.6);
    check_close(run.entries[0].score, want, 1e-9, "bm25 score of d1");
    check_close(run.entries[1].score, want, 1e-9, "bm25 score of d2");
    check_close(run.entries[2].score, 0.0, 1e-9, "bm25 score of d3");
  }

  // QLM-JM, lambda=0.5: cf(a)=3 of 4 tokens, so d1 scores
  // ln(0.5*2/2 + 0.5*3/4) = ln(0.875) and d2 ln(0.5*1/2 + 0.5*3/4) = ln(0.625).
  {
    const std::vector<Document> docs = {{"d1", "a a", ""}, {"d2", "a b", ""}};
    const Index index = Index::build(docs);
    const RankedList run = score_qlm_jm(index, {"a"});
    check(run.entries.size() == 2, "qlm must rank both docs");
    check(run.entries[0].doc_id == "d1" && run.entries[1].doc_id == "d2",
          "qlm toy ordering is wrong");
    check_close(run.entries[0].score, std::log(0.875), 1e-9, "qlm score of d1");
    check_close(run.entries[1].score, std::log(0.625), 1e-9, "qlm score of d2");
  }

  // With lambda close to 1 the smoothing term vanishes, so the single-term
  // ordering must match sorting by tf/len. Corpora are drawn so that distinct
  // documents never share a positive tf/len ratio (compared exactly as
  // cross-products), keeping the expected order free of float ties.
  std::mt19937 rng(31415927u);
  std::uniform_int_distribution<std::size_t> doc_dist(2, 6);
  std::uniform_int_distribution<std::size_t> len_dist(1, 5);
  std::uniform_int_distribution<int> letter(0, 4);

  for (int corpus = 0; corpus < 100; ++corpus) {
    std::vector<Document> docs;
    std::vector<std::size_t> tf, len;
    const std::size_t n = doc_dist(rng);
    while (docs.size() < n) {
      const std::size_t length = len_dist(rng);
      std::string text;
      std::size_t hits = 0;
      for (std::size_t t = 0; t < length; ++t) {
        const int draw = letter(rng);
        const char token = draw <= 1 ? 'a' : (draw <= 3 ? 'b' : 'c');
        if (token == 'a') ++hits;
        if (!text.empty()) text += ' ';
        text += token;
      }
      bool clashes = false;
      for (std::size_t other = 0; other < docs.size(); ++other)
        if (hits > 0 && tf[other] > 0 &&
            hits * len[other] == tf[other] * length)
          clashes = true;
      if (clashes) continue;
      docs.push_back({padded_id("m", docs.size()), text, ""});
      tf.push_back(hits);
      len.push_back(length);
    }
    if (std::count(tf.begin(), tf.end(), 0) == static_cast<long>(n)) continue;

    ScorerParams params;
    params.qlm_lambda = 0.999999;
    const RankedList run = score_qlm_jm(Index::build(docs), {"a"}, params);

    std::vector<std::size_t> order(n);
    for (std::size_t d = 0; d < n; ++d) order[d] = d;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const std::size_t lhs = tf[a] * len[b], rhs = tf[b] * len[a];
      if (lhs != rhs) return lhs > rhs;
      return a < b;  // ids are index-ordered
    });
    for (std::size_t k = 0; k < n; ++k)
      check(run.entries[k].doc_id == docs[order[k]].doc_id,
            "qlm ordering diverged from tf/len on corpus " +
                std::to_string(corpus) + " at rank " + std::to_string(k + 1));
  }
}

// ---------------------------------------------------------------------------
// Criterion 7: random rankings save no meaningful work at a 95% target.

void check_random_ranking_wss() {
  const std::size_t n = 200;
  Judgments judgments;
  for (std::size_t i = 0; i < 10; ++i)
    judgments.by_topic["t"][padded_id("r", i)] = 1;

  std::vector<std::string> docs;
  for (std::size_t i = 0; i < n; ++i) docs.push_back(padded_id("r", i));

  std::mt19937 rng(86420135u);
  double total = 0.0;
  for (int iter = 0; iter < 1000; ++iter) {
    std::shuffle(docs.begin(), docs.end(), rng);
    RankedList run;
    run.topic_id = "t";
    run.tag = "shuffle";
    for (std::size_t i = 0; i < n; ++i)
      run.entries.push_back(RunEntry{docs[i], static_cast<int>(i + 1),
                                     static_cast<double>(n - i)});
    total += wss(run, judgments, 95);
  }
  const double mean = total / 1000.0;
  check(mean >= -0.05 && mean <= 0.05,
        "mean wss@95 of random rankings is " + num(mean) +
            ", outside [-0.05, 0.05]");
}

// ---------------------------------------------------------------------------
// Criterion 8: generation client against a local stub endpoint.

struct StubServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> calls{0};
  mutable std::mutex mutex;
  std::vector<json> bodies;

  StubServer() {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                               httplib::Response& res) {
      const int index = calls.fetch_add(1);
      json body = json::parse(req.body, nullptr, false);
      {
        std::lock_guard<std::mutex> lock(mutex);
        bodies.push_back(body);
      }
      const int n = body.is_object() ? body.value("n", 1) : 1;
      json choices = json::array();
      for (int i = 0; i < n; ++i)
        choices.push_back(
            {{"message",
              {{"content", "generated query " + std::to_string(index) + "-" +
                               std::to_string(i)}}}});
      res.set_content(json{{"choices", choices}}.dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    check(port > 0, "stub endpoint failed to bind");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~StubServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }

  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  }
  json body(std::size_t i) const {
    std::lock_guard<std::mutex> lock(mutex);
    return bodies.at(i);
  }
};

void check_generation_client_contract() {
  StubServer stub;

  auto configure = [&](GenerationMode mode) {
    GenerationConfig config = GenerationConfig::for_mode(mode);
    config.endpoint_url = stub.url();
    config.model_name = "stub-model";
    config.api_key_env.clear();  // local endpoint, no auth
    config.backoff_initial_ms = 0;
    return config;
  };

  // Single mode: exactly one request, near-zero temperature, one completion.
  const GeneratedQuerySet single =
      generate(configure(GenerationMode::Single), "t1", "Rewrite this query.");
  check(single.queries.size() == 1, "single mode must yield one query");
  check(stub.calls.load() == 1, "single mode must issue exactly one request");
  const json first = stub.body(0);
  check_close(first.at("temperature").get<double>(), 0.0001, 1e-12,
              "single-mode temperature");
  check(first.at("n").get<int>() == 1, "single mode must request n=1");
  check(first.at("messages").at(0).at("content").get<std::string>() ==
            "Rewrite this query.",
        "prompt was not forwarded verbatim");

  // Multi mode through the cache: ten stored variants.
  TempDir tmp;
  Topic topic;
  topic.topic_id = "t2";
  topic.boolean_query_raw = "(varices OR banding OR ligation)";
  const GenerationConfig multi = configure(GenerationMode::Multi);
  std::vector<std::string> generated;
  {
    GeneratedQueryStore store(tmp.file("generated.jsonl"));
    const GeneratedQuerySet got = load_or_generate(multi, store, topic);
    check(got.queries.size() == 10, "multi mode must yield ten variants");
    generated = got.queries;
  }

  // Rerun against the persisted store: a pure cache hit, zero network calls.
  const int before = stub.calls.load();
  {
    GeneratedQueryStore store(tmp.file("generated.jsonl"));
    const GeneratedQuerySet again = load_or_generate(multi, store, topic);
    check(again.queries.size() == 10, "cache hit must return ten variants");
    check(again.queries == generated, "cache hit returned different variants");
  }
  check(stub.calls.load() == before, "cache hit must not touch the network");
}

// ---------------------------------------------------------------------------
// Criterion 9: the bundled mini corpus through the command-line pipeline.

void check_mini_pipeline() {
  const std::string data = std::string(BOOLRANK_TEST_DATA_DIR) + "/mini";
  const std::string cli = BOOLRANK_CLI_PATH;
  TempDir tmp;

  auto run_command = [&](const std::string& args) {
    const std::string command = "\"" + cli + "\" " + args + " > /dev/null";
    check(std::system(command.c_str()) == 0, "command failed: " + command);
  };

  const std::string inputs =
      "--corpus \"" + data + "/corpus.jsonl\" --topics \"" + data +
      "/topics.jsonl\"";
  run_command("rank " + inputs +
              " --scorer bm25 --source boolean-terms --out-dir \"" +
              tmp.file("runs") + "\"");
  run_command("rank " + inputs +
              " --scorer qlm --source final-title --out-dir \"" +
              tmp.file("runs") + "\"");
  run_command("fuse \"" + tmp.file("runs/bm25-boolean-terms.run") + "\" \"" +
              tmp.file("runs/qlm-final-title.run") +
              "\" --normalize minmax --out \"" + tmp.file("fused.run") + "\"");
  run_command("eval \"" + tmp.file("fused.run") + "\" --qrels \"" + data +
              "/qrels.txt\" --out \"" + tmp.file("metrics.csv") + "\"");

  const std::string produced = read_file(tmp.file("metrics.csv"));
  const std::string expected = read_file(data + "/expected_metrics.csv");
  check(produced == expected,
        "metrics.csv differs from the checked-in expectation\n--- produced\n" +
            produced + "--- expected\n" + expected);
}

// ---------------------------------------------------------------------------

struct Criterion {
  int number;
  const char* label;
  std::function<void()> fn;
  int budget_ms;  // 0 = no budget
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "bundled boolean query: node counts and round-trip",
       check_boolean_fixture, 1000},
      {2, "ranking metrics match a brute-force prefix scan",
       check_metric_reference_suite, 10000},
      {3, "wss at full recall equals (N - last_rel)/N",
       check_wss_full_recall_identity, 0},
      {4, "oracle run selection attains the maximum AP",
       check_oracle_selection_dominance, 0},
      {5, "combsum permutation, identity, sums and rescaling",
       check_combsum_properties, 0},
      {6, "lexical scorers reproduce hand-derived toy values",
       check_lexical_scorer_oracles, 0},
      {7, "random rankings average near-zero wss@95",
       check_random_ranking_wss, 0},
      {8, "generation client request counts and cache hits",
       check_generation_client_contract, 5000},
      {9, "mini corpus rank -> fuse -> eval matches the expected csv",
       check_mini_pipeline, 0},
  };

  int passed = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string failure;
    try {
      criterion.fn();
    } catch (const std::exception& e) {
      failure = e.what();
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    if (failure.empty() && criterion.budget_ms > 0 &&
        elapsed >= criterion.budget_ms)
      failure = "took " + std::to_string(elapsed) + " ms, budget " +
                std::to_string(criterion.budget_ms) + " ms";

    if (failure.empty()) {
      ++passed;
      std::printf("[PASS] %d. %s (%lld ms)\n", criterion.number,
                  criterion.label, static_cast<long long>(elapsed));
    } else {
      std::printf("[FAIL] %d. %s (%lld ms): %s\n", criterion.number,
                  criterion.label, static_cast<long long>(elapsed),
                  failure.c_str());
    }
  }
  std::printf("%d/%zu criteria passed\n", passed, criteria.size());
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
