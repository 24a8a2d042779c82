#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "boolrank/boolquery.hpp"
#include "boolrank/corpusio.hpp"
#include "boolrank/error.hpp"

namespace boolrank {

// Built-in instruction templates for turning a Boolean query into a natural
// language query (or, for TitleGen, a review-title-shaped string).
enum class PromptKind {
  ChatGptQuery,
  AlpacaQuery,
  TitleGen,
};

std::string to_string(PromptKind kind);
PromptKind prompt_kind_from_string(const std::string& text);

struct PromptTemplate {
  PromptKind kind = PromptKind::ChatGptQuery;
  // Must contain the placeholder {boolean} exactly once.
  std::string text;

  static const PromptTemplate& builtin(PromptKind kind);
};

// Replaces {boolean} with render(query). Throws GenError(MissingPlaceholder)
// when the placeholder is absent or appears more than once.
std::string build_prompt(const PromptTemplate& tmpl, const QueryNode::Ptr& query);

// Client settings for an HTTP chat-completions endpoint. The two generation
// modes pin their own decoding parameters: Single uses temperature 0.0001
// (near-greedy; exact zero is rejected by common serving stacks) and exactly
// one completion, Multi uses temperature 1.0 and num_generations completions
// (10 unless overridden).
struct GenerationConfig {
  // Full URL of the chat-completions route, e.g. http://localhost:8080/v1/chat/completions.
  // When the URL carries no path, /v1/chat/completions is assumed.
  std::string endpoint_url;
  std::string model_name;
  // Identity used for the on-disk cache; defaults to model_name when empty.
  std::string model_tag;
  PromptKind prompt = PromptKind::ChatGptQuery;
  GenerationMode mode = GenerationMode::Single;
  double temperature = 0.0001;
  int num_generations = 1;
  // Additional attempts after the first failed one.
  int max_retries = 3;
  int timeout_seconds = 30;
  // First retry delay; doubles per attempt. A 429 with Retry-After overrides it.
  int backoff_initial_ms = 250;
  // Name of the environment variable holding the API key, sent as a bearer
  // token. Empty disables authentication (for local endpoints).
  std::string api_key_env = "BOOLRANK_API_KEY";

  static GenerationConfig for_mode(GenerationMode mode);
  const std::string& cache_tag() const { return model_tag.empty() ? model_name : model_tag; }

  // Throws std::invalid_argument on out-of-range values or a temperature /
  // num_generations combination that contradicts the mode.
  void validate() const;
};

// In-memory view of one generated-queries file plus a guarded appender, so
// concurrent topic workers share a single writer. Loading a corrupted file
// throws DataError(MalformedRecord).
class GeneratedQueryStore {
 public:
  explicit GeneratedQueryStore(std::string path);

  const std::string& path() const { return path_; }

  std::optional<GeneratedQuerySet> find(const std::string& topic_id,
                                        const std::string& model_tag,
                                        GenerationMode mode) const;

  // Appends the set to the file and caches it. A key that is already present
  // is left untouched (first write wins) so a racing duplicate generation
  // cannot corrupt the file with a second variant sequence.
  void put(const GeneratedQuerySet& set);

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::vector<GeneratedQuerySet> sets_;
  std::unordered_map<std::string, std::size_t> by_key_;
};

// Requests num_generations completions for the prompt, retrying with
// exponential backoff. Completions are whitespace-stripped and empty ones
// discarded; attempts continue until enough non-empty ones have accumulated.
// When store is given the result is persisted before returning. Throws
// GenError: AuthMissing (required key absent from the environment, or the
// endpoint rejects it), RateLimited with the server-provided delay once
// retries are exhausted on 429s, EmptyCompletion when attempts ran out with
// too few non-empty completions, and EndpointUnreachable otherwise.
GeneratedQuerySet generate(const GenerationConfig& config,
                           const std::string& topic_id,
                           const std::string& prompt,
                           GeneratedQueryStore* store = nullptr);

// Cache-first wrapper: a hit on (topic_id, cache_tag, mode) is returned
// without any network traffic; a miss builds the prompt from the topic's
// Boolean query, calls generate, and stores the result.
GeneratedQuerySet load_or_generate(const GenerationConfig& config,
                                   GeneratedQueryStore& store,
                                   const Topic& topic);

}  // namespace boolrank
