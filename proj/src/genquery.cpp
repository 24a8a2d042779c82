#include "boolrank/genquery.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace boolrank {

namespace {

using nlohmann::json;

constexpr const char* kPlaceholder = "{boolean}";

std::string strip(const std::string& text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

struct Endpoint {
  std::string base;  // scheme://host[:port], what httplib::Client wants
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  std::string full = url;
  if (full.find("://") == std::string::npos) full = "http://" + full;
  const std::size_t authority = full.find("://") + 3;
  const std::size_t slash = full.find('/', authority);
  if (slash == std::string::npos) return {full, "/v1/chat/completions"};
  return {full.substr(0, slash), full.substr(slash)};
}

// Retry-After per RFC 9110 is either delay-seconds or an HTTP date; only the
// numeric form is honored, anything else falls back to the backoff schedule.
double parse_retry_after(const httplib::Response& res, double fallback_seconds) {
  if (!res.has_header("Retry-After")) return fallback_seconds;
  const std::string value = res.get_header_value("Retry-After");
  try {
    std::size_t used = 0;
    const double seconds = std::stod(value, &used);
    if (used == value.size() && seconds >= 0.0) return seconds;
  } catch (const std::exception&) {
  }
  return fallback_seconds;
}

std::string choice_text(const json& choice) {
  if (!choice.is_object()) return "";
  auto message = choice.find("message");
  if (message != choice.end() && message->is_object()) {
    auto content = message->find("content");
    if (content != message->end() && content->is_string())
      return content->get<std::string>();
  }
  // Plain completions endpoints put the text at the top of the choice.
  auto text = choice.find("text");
  if (text != choice.end() && text->is_string()) return text->get<std::string>();
  return "";
}

std::string store_key(const std::string& topic_id, const std::string& model_tag,
                      GenerationMode mode) {
  return topic_id + '\x1f' + model_tag + '\x1f' + to_string(mode);
}

}  // namespace

std::string to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::ChatGptQuery: return "chatgpt-query";
    case PromptKind::AlpacaQuery: return "alpaca-query";
    case PromptKind::TitleGen: return "title-gen";
  }
  return "chatgpt-query";
}

PromptKind prompt_kind_from_string(const std::string& text) {
  if (text == "chatgpt-query") return PromptKind::ChatGptQuery;
  if (text == "alpaca-query") return PromptKind::AlpacaQuery;
  if (text == "title-gen") return PromptKind::TitleGen;
  throw std::invalid_argument("unknown prompt template '" + text + "'");
}

const PromptTemplate& PromptTemplate::builtin(PromptKind kind) {
  static const PromptTemplate chatgpt_query{
      PromptKind::ChatGptQuery,
      "Construct a high-quality natural language query for the boolean query of a "
      "systematic review: {boolean}.\n\nThe effectiveness of the query will be "
      "determined by its capability to retrieve relevant documents when searching "
      "on a semantic-based search engine."};
  static const PromptTemplate alpaca_query{
      PromptKind::AlpacaQuery,
      "Below is an instruction that describes a task, paired with an input that "
      "provides further context. Write a response that appropriately completes "
      "the request.\n\n### Instruction:\n\nConstruct a natural language query "
      "using the systematic review boolean query provided.\n\n### Input:\n\n"
      "{boolean}\n\n### Response:\n"};
  static const PromptTemplate title_gen{
      PromptKind::TitleGen,
      "Construct a concise title for the systematic review whose boolean query "
      "is: {boolean}.\n\nThe title should state the condition and intervention "
      "the review investigates."};
  switch (kind) {
    case PromptKind::ChatGptQuery: return chatgpt_query;
    case PromptKind::AlpacaQuery: return alpaca_query;
    case PromptKind::TitleGen: return title_gen;
  }
  return chatgpt_query;
}

std::string build_prompt(const PromptTemplate& tmpl, const QueryNode::Ptr& query) {
  const std::string placeholder = kPlaceholder;
  const std::size_t first = tmpl.text.find(placeholder);
  if (first == std::string::npos)
    throw GenError(GenError::Kind::MissingPlaceholder,
                   "prompt template lacks the " + placeholder + " placeholder");
  if (tmpl.text.find(placeholder, first + placeholder.size()) != std::string::npos)
    throw GenError(GenError::Kind::MissingPlaceholder,
                   "prompt template must contain " + placeholder + " exactly once");
  std::string prompt = tmpl.text;
  prompt.replace(first, placeholder.size(), render(*query));
  return prompt;
}

GenerationConfig GenerationConfig::for_mode(GenerationMode mode) {
  GenerationConfig config;
  config.mode = mode;
  if (mode == GenerationMode::Single) {
    config.temperature = 0.0001;
    config.num_generations = 1;
  } else {
    config.temperature = 1.0;
    config.num_generations = 10;
  }
  return config;
}

void GenerationConfig::validate() const {
  if (endpoint_url.empty()) throw std::invalid_argument("endpoint_url must be set");
  if (model_name.empty()) throw std::invalid_argument("model_name must be set");
  if (!(temperature >= 0.0 && temperature <= 1.0))
    throw std::invalid_argument("temperature must be in [0, 1]");
  if (num_generations < 1)
    throw std::invalid_argument("num_generations must be at least 1");
  if (max_retries < 0) throw std::invalid_argument("max_retries must be non-negative");
  if (timeout_seconds < 1) throw std::invalid_argument("timeout_seconds must be positive");
  if (backoff_initial_ms < 0)
    throw std::invalid_argument("backoff_initial_ms must be non-negative");
  if (mode == GenerationMode::Single &&
      (temperature != 0.0001 || num_generations != 1))
    throw std::invalid_argument(
        "single mode requires temperature 0.0001 and exactly one generation");
  if (mode == GenerationMode::Multi && temperature != 1.0)
    throw std::invalid_argument("multi mode requires temperature 1.0");
}

GeneratedQueryStore::GeneratedQueryStore(std::string path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) return;
  sets_ = read_generated_queries(path_);
  for (std::size_t i = 0; i < sets_.size(); ++i)
    by_key_.emplace(store_key(sets_[i].topic_id, sets_[i].model_tag, sets_[i].mode), i);
}

std::optional<GeneratedQuerySet> GeneratedQueryStore::find(
    const std::string& topic_id, const std::string& model_tag,
    GenerationMode mode) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = by_key_.find(store_key(topic_id, model_tag, mode));
  if (it == by_key_.end()) return std::nullopt;
  return sets_[it->second];
}

void GeneratedQueryStore::put(const GeneratedQuerySet& set) {
  std::lock_guard<std::mutex> lock(mutex_);
  const std::string key = store_key(set.topic_id, set.model_tag, set.mode);
  if (by_key_.find(key) != by_key_.end()) return;
  append_generated_queries(path_, set);
  by_key_.emplace(key, sets_.size());
  sets_.push_back(set);
}

GeneratedQuerySet generate(const GenerationConfig& config,
                           const std::string& topic_id,
                           const std::string& prompt,
                           GeneratedQueryStore* store) {
  config.validate();

  httplib::Headers headers;
  if (!config.api_key_env.empty()) {
    const char* key = std::getenv(config.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
      throw GenError(GenError::Kind::AuthMissing,
                     "environment variable " + config.api_key_env +
                         " holds no API key");
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const Endpoint endpoint = split_endpoint(config.endpoint_url);
  httplib::Client client(endpoint.base);
  client.set_connection_timeout(config.timeout_seconds, 0);
  client.set_read_timeout(config.timeout_seconds, 0);
  client.set_write_timeout(config.timeout_seconds, 0);

  const std::size_t wanted = static_cast<std::size_t>(config.num_generations);
  std::vector<std::string> collected;
  GenError::Kind failure = GenError::Kind::EndpointUnreachable;
  std::string failure_what;
  double retry_after = 0.0;

  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    // Doubles per attempt, capped so long retry chains stay bounded.
    const double backoff_seconds =
        config.backoff_initial_ms * static_cast<double>(1 << std::min(attempt, 4)) /
        1000.0;
    double delay = backoff_seconds;

    const json body = {
        {"model", config.model_name},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
        {"temperature", config.temperature},
        {"n", static_cast<int>(wanted - collected.size())},
    };
    auto res = client.Post(endpoint.path, headers, body.dump(), "application/json");

    if (!res) {
      failure = GenError::Kind::EndpointUnreachable;
      failure_what = "cannot reach " + config.endpoint_url + ": " +
                     httplib::to_string(res.error());
    } else if (res->status == 401 || res->status == 403) {
      throw GenError(GenError::Kind::AuthMissing,
                     config.endpoint_url + " rejected the API key (HTTP " +
                         std::to_string(res->status) + ")");
    } else if (res->status == 429) {
      failure = GenError::Kind::RateLimited;
      retry_after = parse_retry_after(*res, backoff_seconds);
      delay = retry_after;
      failure_what = config.endpoint_url + " rate limited the request";
    } else if (res->status != 200) {
      failure = GenError::Kind::EndpointUnreachable;
      failure_what = config.endpoint_url + " answered HTTP " +
                     std::to_string(res->status);
    } else {
      const json parsed = json::parse(res->body, nullptr, false);
      if (parsed.is_discarded() || !parsed.is_object() ||
          !parsed.contains("choices") || !parsed["choices"].is_array()) {
        failure = GenError::Kind::EndpointUnreachable;
        failure_what = config.endpoint_url + " answered a malformed body";
      } else {
        for (const auto& choice : parsed["choices"]) {
          if (collected.size() == wanted) break;
          const std::string text = strip(choice_text(choice));
          if (!text.empty()) collected.push_back(text);
        }
        if (collected.size() == wanted) {
          GeneratedQuerySet set{topic_id, config.cache_tag(), config.mode,
                                std::move(collected)};
          if (store != nullptr) store->put(set);
          return set;
        }
        failure = GenError::Kind::EmptyCompletion;
        failure_what = "got " + std::to_string(collected.size()) + " of " +
                       std::to_string(wanted) + " non-empty completions from " +
                       config.endpoint_url;
      }
    }

    if (attempt == config.max_retries) break;
    if (delay > 0.0)
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
  }

  if (failure == GenError::Kind::RateLimited)
    throw GenError(failure, failure_what, retry_after);
  throw GenError(failure, failure_what);
}

GeneratedQuerySet load_or_generate(const GenerationConfig& config,
                                   GeneratedQueryStore& store,
                                   const Topic& topic) {
  if (auto hit = store.find(topic.topic_id, config.cache_tag(), config.mode))
    return *hit;
  const QueryNode::Ptr query = parse_boolean(topic.boolean_query_raw);
  const std::string prompt = build_prompt(PromptTemplate::builtin(config.prompt), query);
  return generate(config, topic.topic_id, prompt, &store);
}

}  // namespace boolrank
