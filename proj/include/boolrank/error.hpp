#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace boolrank {

/// Base class for every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Boolean query syntax errors, carrying the byte offset of the offending
/// token in the input string.
class ParseError : public Error {
 public:
  enum class Kind {
    UnbalancedParenthesis,
    UnterminatedQuote,
    DanglingOperator,
    EmptyQuery,
  };

  ParseError(Kind kind, std::size_t position, const std::string& what)
      : Error(what), kind_(kind), position_(position) {}

  Kind kind() const { return kind_; }
  std::size_t position() const { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

/// File and record level errors from corpus/qrels/run/query-store loading.
class DataError : public Error {
 public:
  enum class Kind {
    MalformedRecord,
    MalformedLine,
    DuplicateDocId,
    DuplicatePair,
    DuplicateRunDoc,
    NonContiguousRanks,
    ScoreOrderViolation,
    IoFailure,
  };

  DataError(Kind kind, std::size_t line, const std::string& what)
      : Error(what), kind_(kind), line_(line) {}

  Kind kind() const { return kind_; }
  /// 1-based line number when the error is tied to a specific line, else 0.
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

/// Errors from index construction and lexical scoring.
class ScoreError : public Error {
 public:
  enum class Kind { EmptyCorpus, EmptyCollection };

  ScoreError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Errors from rank fusion.
class FuseError : public Error {
 public:
  enum class Kind { TopicMismatch, EmptyInput };

  FuseError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Errors from metric computation.
class MetricError : public Error {
 public:
  enum class Kind { NoJudgedRelevant, MissingJudgments };

  MetricError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Errors from the query generation client.
class GenError : public Error {
 public:
  enum class Kind {
    MissingPlaceholder,
    EndpointUnreachable,
    AuthMissing,
    RateLimited,
    EmptyCompletion,
  };

  GenError(Kind kind, const std::string& what, double retry_after_seconds = 0.0)
      : Error(what), kind_(kind), retry_after_(retry_after_seconds) {}

  Kind kind() const { return kind_; }
  /// Server-requested delay for RateLimited, in seconds; 0 otherwise.
  double retry_after_seconds() const { return retry_after_; }

 private:
  Kind kind_;
  double retry_after_;
};

}  // namespace boolrank
