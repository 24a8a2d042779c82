// Python bindings for the toolkit's core operations. The Boolean query AST
// is wrapped in a small value type so Python holds plain objects instead of
// shared pointers into the node graph; everything else maps one-to-one onto
// the public headers.

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "boolrank/boolquery.hpp"
#include "boolrank/clf.hpp"
#include "boolrank/corpusio.hpp"
#include "boolrank/error.hpp"
#include "boolrank/evalmetrics.hpp"
#include "boolrank/fuse.hpp"
#include "boolrank/genquery.hpp"
#include "boolrank/lexrank.hpp"
#include "boolrank/text.hpp"

namespace py = pybind11;
using namespace boolrank;

namespace {

// Copyable handle around an immutable query node.
struct BoundQuery {
  QueryNode::Ptr node;
};

std::vector<BoundQuery> wrap_nodes(const std::vector<QueryNode::Ptr>& nodes) {
  std::vector<BoundQuery> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back(BoundQuery{n});
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Screening prioritisation toolkit: PubMed-style Boolean query parsing, "
      "lexical ranking, rank fusion and screening metrics.";

  // Exception hierarchy. The base translator is registered first so the
  // specific ones, registered later, take precedence.
  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<DataError>(m, "DataError", error.ptr());
  py::register_exception<ScoreError>(m, "ScoreError", error.ptr());
  py::register_exception<FuseError>(m, "FuseError", error.ptr());
  py::register_exception<MetricError>(m, "MetricError", error.ptr());
  py::register_exception<GenError>(m, "GenError", error.ptr());

  // --- Boolean queries -----------------------------------------------------

  py::enum_<FieldTag::Kind>(m, "FieldKind")
      .value("Mesh", FieldTag::Kind::Mesh)
      .value("AllFields", FieldTag::Kind::AllFields)
      .value("TitleAbstract", FieldTag::Kind::TitleAbstract)
      .value("Other", FieldTag::Kind::Other);

  py::class_<FieldTag>(m, "FieldTag")
      .def_static("all_fields", &FieldTag::all_fields)
      .def_static("mesh", &FieldTag::mesh, py::arg("no_explosion"))
      .def_static("title_abstract", &FieldTag::title_abstract)
      .def_static("other", &FieldTag::other, py::arg("raw_tag"))
      .def_readonly("kind", &FieldTag::kind)
      .def_readonly("mesh_no_explosion", &FieldTag::mesh_no_explosion)
      .def_readonly("raw", &FieldTag::raw)
      .def(py::self == py::self)
      .def(py::self != py::self);

  py::class_<AtomTerm>(m, "AtomTerm")
      .def(py::init([](std::string text, bool is_phrase, bool truncated,
                       FieldTag field) {
             AtomTerm t;
             t.text = std::move(text);
             t.is_phrase = is_phrase;
             t.truncated = truncated;
             t.field = std::move(field);
             return t;
           }),
           py::arg("text"), py::arg("is_phrase") = false,
           py::arg("truncated") = false, py::arg("field") = FieldTag{})
      .def_readwrite("text", &AtomTerm::text)
      .def_readwrite("is_phrase", &AtomTerm::is_phrase)
      .def_readwrite("truncated", &AtomTerm::truncated)
      .def_readwrite("field", &AtomTerm::field)
      .def(py::self == py::self)
      .def(py::self != py::self);

  py::enum_<QueryNode::Kind>(m, "NodeKind")
      .value("And", QueryNode::Kind::And)
      .value("Or", QueryNode::Kind::Or)
      .value("Not", QueryNode::Kind::Not)
      .value("Atom", QueryNode::Kind::Atom);

  py::class_<BoundQuery>(m, "BooleanQuery")
      .def_property_readonly(
          "kind", [](const BoundQuery& q) { return q.node->kind(); })
      .def_property_readonly(
          "is_atom", [](const BoundQuery& q) { return q.node->is_atom(); })
      .def("children",
           [](const BoundQuery& q) { return wrap_nodes(q.node->children()); },
           "Operands of an And/Or node, or [positive, negative] for Not.")
      .def("positive",
           [](const BoundQuery& q) {
             if (q.node->kind() != QueryNode::Kind::Not)
               throw std::invalid_argument("node is not a NOT");
             return BoundQuery{q.node->positive()};
           })
      .def("negative",
           [](const BoundQuery& q) {
             if (q.node->kind() != QueryNode::Kind::Not)
               throw std::invalid_argument("node is not a NOT");
             return BoundQuery{q.node->negative()};
           })
      .def("atom",
           [](const BoundQuery& q) {
             if (!q.node->is_atom())
               throw std::invalid_argument("node is not an atom");
             return q.node->atom();
           })
      .def("render", [](const BoundQuery& q) { return render(*q.node); })
      .def("__eq__",
           [](const BoundQuery& a, const BoundQuery& b) {
             return *a.node == *b.node;
           },
           py::is_operator())
      .def("__repr__", [](const BoundQuery& q) {
        return "BooleanQuery(" + render(*q.node) + ")";
      });

  m.def(
      "parse_boolean",
      [](const std::string& raw) { return BoundQuery{parse_boolean(raw)}; },
      py::arg("raw"), "Parse a PubMed-style Boolean query into an AST.");
  m.def(
      "render", [](const BoundQuery& q) { return render(*q.node); },
      py::arg("query"), "Canonical string form; reparses to an equal AST.");
  m.def(
      "extract_terms",
      [](const BoundQuery& q, bool include_negated) {
        return extract_terms(*q.node, include_negated);
      },
      py::arg("query"), py::arg("include_negated") = false,
      "Lowercased term tokens in source order, tags and wildcards dropped.");
  m.def(
      "top_level_clauses",
      [](const BoundQuery& q) { return wrap_nodes(top_level_clauses(q.node)); },
      py::arg("query"));
  m.def("tokenize", [](const std::string& text) { return tokenize(text); },
        py::arg("text"),
        "Toolkit tokenization: lowercase, split on non-alphanumeric bytes.");

  // --- Corpus, topics, runs and judgments ----------------------------------

  py::class_<Document>(m, "Document")
      .def(py::init([](std::string doc_id, std::string title,
                       std::string abstract_text) {
             return Document{std::move(doc_id), std::move(title),
                             std::move(abstract_text)};
           }),
           py::arg("doc_id"), py::arg("title") = "",
           py::arg("abstract_text") = "")
      .def_readwrite("doc_id", &Document::doc_id)
      .def_readwrite("title", &Document::title)
      .def_readwrite("abstract_text", &Document::abstract_text);

  py::class_<Topic>(m, "Topic")
      .def(py::init([](std::string topic_id, std::string boolean_query_raw,
                       std::string final_title, std::string working_title) {
             return Topic{std::move(topic_id), std::move(boolean_query_raw),
                          std::move(final_title), std::move(working_title)};
           }),
           py::arg("topic_id"), py::arg("boolean_query_raw"),
           py::arg("final_title") = "", py::arg("working_title") = "")
      .def_readwrite("topic_id", &Topic::topic_id)
      .def_readwrite("boolean_query_raw", &Topic::boolean_query_raw)
      .def_readwrite("final_title", &Topic::final_title)
      .def_readwrite("working_title", &Topic::working_title);

  py::enum_<JudgmentLevel>(m, "JudgmentLevel")
      .value("Abstract", JudgmentLevel::Abstract)
      .value("FullText", JudgmentLevel::FullText);

  py::class_<Judgments>(m, "Judgments")
      .def(py::init([](std::map<std::string, std::map<std::string, int>> by_topic,
                       JudgmentLevel level) {
             Judgments j;
             j.level = level;
             j.by_topic = std::move(by_topic);
             return j;
           }),
           py::arg("by_topic") =
               std::map<std::string, std::map<std::string, int>>{},
           py::arg("level") = JudgmentLevel::Abstract)
      .def_readwrite("level", &Judgments::level)
      .def_readwrite("by_topic", &Judgments::by_topic)
      .def("grade", &Judgments::grade, py::arg("topic_id"), py::arg("doc_id"))
      .def("is_relevant", &Judgments::is_relevant, py::arg("topic_id"),
           py::arg("doc_id"));

  py::class_<RunEntry>(m, "RunEntry")
      .def(py::init([](std::string doc_id, int rank, double score) {
             return RunEntry{std::move(doc_id), rank, score};
           }),
           py::arg("doc_id"), py::arg("rank"), py::arg("score"))
      .def_readwrite("doc_id", &RunEntry::doc_id)
      .def_readwrite("rank", &RunEntry::rank)
      .def_readwrite("score", &RunEntry::score)
      .def("__repr__", [](const RunEntry& e) {
        return "RunEntry(" + e.doc_id + ", rank=" + std::to_string(e.rank) +
               ", score=" + std::to_string(e.score) + ")";
      });

  py::class_<RankedList>(m, "RankedList")
      .def(py::init([](std::string topic_id, std::string tag,
                       std::vector<RunEntry> entries) {
             RankedList list;
             list.topic_id = std::move(topic_id);
             list.tag = std::move(tag);
             list.entries = std::move(entries);
             return list;
           }),
           py::arg("topic_id"), py::arg("tag") = "",
           py::arg("entries") = std::vector<RunEntry>{})
      .def_readwrite("topic_id", &RankedList::topic_id)
      .def_readwrite("tag", &RankedList::tag)
      .def_readwrite("entries", &RankedList::entries)
      .def("__len__",
           [](const RankedList& list) { return list.entries.size(); });

  py::enum_<GenerationMode>(m, "GenerationMode")
      .value("Single", GenerationMode::Single)
      .value("Multi", GenerationMode::Multi);

  py::class_<GeneratedQuerySet>(m, "GeneratedQuerySet")
      .def(py::init([](std::string topic_id, std::string model_tag,
                       GenerationMode mode, std::vector<std::string> queries) {
             return GeneratedQuerySet{std::move(topic_id), std::move(model_tag),
                                      mode, std::move(queries)};
           }),
           py::arg("topic_id"), py::arg("model_tag"),
           py::arg("mode") = GenerationMode::Single,
           py::arg("queries") = std::vector<std::string>{})
      .def_readwrite("topic_id", &GeneratedQuerySet::topic_id)
      .def_readwrite("model_tag", &GeneratedQuerySet::model_tag)
      .def_readwrite("mode", &GeneratedQuerySet::mode)
      .def_readwrite("queries", &GeneratedQuerySet::queries);

  m.def("load_corpus", &load_corpus, py::arg("path"));
  m.def("load_topics", &load_topics, py::arg("path"));
  m.def("load_qrels", &load_qrels, py::arg("path"),
        py::arg("level") = JudgmentLevel::Abstract);
  m.def("read_run", &read_run, py::arg("path"));
  m.def("write_run", &write_run, py::arg("lists"), py::arg("path"),
        py::arg("tag") = "");
  m.def("read_generated_queries", &read_generated_queries, py::arg("path"));
  m.def("append_generated_queries", &append_generated_queries, py::arg("path"),
        py::arg("set"));
  m.def("load_candidates", &load_candidates, py::arg("path"));

  // --- Lexical ranking ------------------------------------------------------

  py::class_<ScorerParams>(m, "ScorerParams")
      .def(py::init([](double k1, double b, double lam) {
             ScorerParams p;
             p.bm25_k1 = k1;
             p.bm25_b = b;
             p.qlm_lambda = lam;
             return p;
           }),
           py::arg("bm25_k1") = 1.5, py::arg("bm25_b") = 0.75,
           py::arg("qlm_lambda") = 0.5)
      .def_readwrite("bm25_k1", &ScorerParams::bm25_k1)
      .def_readwrite("bm25_b", &ScorerParams::bm25_b)
      .def_readwrite("qlm_lambda", &ScorerParams::qlm_lambda)
      .def("validate", &ScorerParams::validate);

  py::class_<Index>(m, "Index")
      .def_static("build", &Index::build, py::arg("docs"),
                  "Build an inverted index over title + abstract text.")
      .def_property_readonly("doc_count", &Index::doc_count)
      .def_property_readonly("avg_doc_len", &Index::avg_doc_len)
      .def_property_readonly("total_tokens", &Index::total_tokens)
      .def_property_readonly("doc_ids", &Index::doc_ids)
      .def("document_frequency", &Index::document_frequency, py::arg("token"))
      .def("collection_frequency", &Index::collection_frequency,
           py::arg("token"));

  m.def("score_bm25", &score_bm25, py::arg("index"), py::arg("query_tokens"),
        py::arg("params") = ScorerParams{});
  m.def("score_qlm_jm", &score_qlm_jm, py::arg("index"),
        py::arg("query_tokens"), py::arg("params") = ScorerParams{});

  py::enum_<ClauseScorer>(m, "ClauseScorer")
      .value("Bm25", ClauseScorer::Bm25)
      .value("Binary", ClauseScorer::Binary);

  m.def(
      "rank_clf",
      [](const Index& index, const BoundQuery& query, const ScorerParams& params,
         ClauseScorer scorer) { return rank_clf(index, query.node, params, scorer); },
      py::arg("index"), py::arg("query"), py::arg("params") = ScorerParams{},
      py::arg("scorer") = ClauseScorer::Bm25,
      "Fuse per-clause rankings of the Boolean query with raw CombSUM.");

  // --- Fusion ----------------------------------------------------------------

  py::enum_<Normalization>(m, "Normalization")
      .value("NoNormalization", Normalization::None)
      .value("MinMax", Normalization::MinMax);

  py::class_<FusionPolicy>(m, "FusionPolicy")
      .def(py::init([](Normalization normalization) {
             return FusionPolicy{normalization};
           }),
           py::arg("normalization") = Normalization::None)
      .def_readwrite("normalization", &FusionPolicy::normalization);

  py::class_<OracleSelection>(m, "OracleSelection")
      .def_readonly("run_index", &OracleSelection::run_index)
      .def_readonly("ap_value", &OracleSelection::ap_value);

  m.def("combsum", &combsum, py::arg("lists"),
        py::arg("policy") = FusionPolicy{});
  m.def("fuse_multi", &fuse_multi, py::arg("gen_runs"));
  m.def("oracle_select", &oracle_select, py::arg("runs"), py::arg("judgments"));

  // --- Metrics ----------------------------------------------------------------

  py::class_<TopicMetrics>(m, "TopicMetrics")
      .def_readonly("ap", &TopicMetrics::ap)
      .def_readonly("last_rel", &TopicMetrics::last_rel)
      .def_readonly("recall_at", &TopicMetrics::recall_at)
      .def_readonly("wss_at", &TopicMetrics::wss_at);

  py::class_<MetricReport>(m, "MetricReport")
      .def_readonly("percents", &MetricReport::percents)
      .def_readonly("wss_targets", &MetricReport::wss_targets)
      .def_readonly("per_topic", &MetricReport::per_topic)
      .def_readonly("zero_relevant_topics", &MetricReport::zero_relevant_topics)
      .def_readonly("means", &MetricReport::means);

  m.def("average_precision", &average_precision, py::arg("run"),
        py::arg("judgments"));
  m.def("last_relevant_rank", &last_relevant_rank, py::arg("run"),
        py::arg("judgments"));
  m.def("recall_at_percent", &recall_at_percent, py::arg("run"),
        py::arg("judgments"), py::arg("percent"));
  m.def("wss", &wss, py::arg("run"), py::arg("judgments"),
        py::arg("target_percent"));
  m.def("evaluate_runs", &evaluate_runs, py::arg("runs"), py::arg("judgments"),
        py::arg("percents") = std::vector<int>{1, 5, 10, 20},
        py::arg("wss_targets") = std::vector<int>{95, 100});
  m.def("metrics_csv", &metrics_csv, py::arg("report"));
  m.def("metrics_json", &metrics_json, py::arg("report"));

  // --- Query generation --------------------------------------------------------

  py::enum_<PromptKind>(m, "PromptKind")
      .value("ChatGptQuery", PromptKind::ChatGptQuery)
      .value("AlpacaQuery", PromptKind::AlpacaQuery)
      .value("TitleGen", PromptKind::TitleGen);

  py::class_<PromptTemplate>(m, "PromptTemplate")
      .def(py::init([](PromptKind kind, std::string text) {
             return PromptTemplate{kind, std::move(text)};
           }),
           py::arg("kind"), py::arg("text"))
      .def_static("builtin", &PromptTemplate::builtin, py::arg("kind"),
                  py::return_value_policy::copy)
      .def_readwrite("kind", &PromptTemplate::kind)
      .def_readwrite("text", &PromptTemplate::text);

  m.def(
      "build_prompt",
      [](const PromptTemplate& tmpl, const BoundQuery& query) {
        return build_prompt(tmpl, query.node);
      },
      py::arg("template"), py::arg("query"),
      "Substitute the rendered query for the {boolean} placeholder.");

  py::class_<GenerationConfig>(m, "GenerationConfig")
      .def(py::init<>())
      .def_static("for_mode", &GenerationConfig::for_mode, py::arg("mode"))
      .def_readwrite("endpoint_url", &GenerationConfig::endpoint_url)
      .def_readwrite("model_name", &GenerationConfig::model_name)
      .def_readwrite("model_tag", &GenerationConfig::model_tag)
      .def_readwrite("prompt", &GenerationConfig::prompt)
      .def_readwrite("mode", &GenerationConfig::mode)
      .def_readwrite("temperature", &GenerationConfig::temperature)
      .def_readwrite("num_generations", &GenerationConfig::num_generations)
      .def_readwrite("max_retries", &GenerationConfig::max_retries)
      .def_readwrite("timeout_seconds", &GenerationConfig::timeout_seconds)
      .def_readwrite("backoff_initial_ms", &GenerationConfig::backoff_initial_ms)
      .def_readwrite("api_key_env", &GenerationConfig::api_key_env)
      .def("cache_tag", &GenerationConfig::cache_tag)
      .def("validate", &GenerationConfig::validate);

  py::class_<GeneratedQueryStore>(m, "GeneratedQueryStore")
      .def(py::init<std::string>(), py::arg("path"))
      .def_property_readonly("path", &GeneratedQueryStore::path)
      .def("find", &GeneratedQueryStore::find, py::arg("topic_id"),
           py::arg("model_tag"), py::arg("mode"))
      .def("put", &GeneratedQueryStore::put, py::arg("set"));

  m.def(
      "generate",
      [](const GenerationConfig& config, const std::string& topic_id,
         const std::string& prompt, GeneratedQueryStore* store) {
        return generate(config, topic_id, prompt, store);
      },
      py::arg("config"), py::arg("topic_id"), py::arg("prompt"),
      py::arg("store") = nullptr, py::call_guard<py::gil_scoped_release>(),
      "Request completions from the configured endpoint, with retries.");
  m.def("load_or_generate", &load_or_generate, py::arg("config"),
        py::arg("store"), py::arg("topic"),
        py::call_guard<py::gil_scoped_release>(),
        "Return the cached query set or generate and persist a new one.");
}
