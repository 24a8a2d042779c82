#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "boolrank/error.hpp"

namespace boolrank {

/// Search field qualifier attached to a query term, e.g. `[mesh:noexp]`,
/// `[All Fields]`, `[tiab]`. Terms without a bracketed tag default to
/// AllFields. Tags the parser does not recognise are preserved as Other.
struct FieldTag {
  enum class Kind { Mesh, AllFields, TitleAbstract, Other };

  Kind kind = Kind::AllFields;
  bool mesh_no_explosion = false;  // meaningful only for Kind::Mesh
  std::string raw;                 // surface form as parsed; empty if implicit

  static FieldTag all_fields() { return {}; }
  static FieldTag mesh(bool no_explosion) {
    FieldTag t;
    t.kind = Kind::Mesh;
    t.mesh_no_explosion = no_explosion;
    t.raw = no_explosion ? "mesh:noexp" : "mesh";
    return t;
  }
  static FieldTag title_abstract() {
    FieldTag t;
    t.kind = Kind::TitleAbstract;
    t.raw = "tiab";
    return t;
  }
  static FieldTag other(std::string raw_tag) {
    FieldTag t;
    t.kind = Kind::Other;
    t.raw = std::move(raw_tag);
    return t;
  }

  /// Classifies a bracketed tag's inner text (case-insensitive for the
  /// known kinds, raw preserved verbatim).
  static FieldTag from_raw(std::string_view raw_tag);

  bool operator==(const FieldTag& o) const;
  bool operator!=(const FieldTag& o) const { return !(*this == o); }
};

/// A leaf query term: one or more adjacent bare words or a quoted phrase,
/// with optional trailing-`*` truncation and a field tag.
struct AtomTerm {
  std::string text;        // whitespace-normalized; never ends in '*' when truncated
  bool is_phrase = false;  // was double-quoted
  bool truncated = false;  // carried a trailing '*' wildcard
  FieldTag field;

  bool operator==(const AtomTerm& o) const {
    return text == o.text && is_phrase == o.is_phrase &&
           truncated == o.truncated && field == o.field;
  }
  bool operator!=(const AtomTerm& o) const { return !(*this == o); }
};

/// Immutable node of a Boolean query AST. And/Or are n-ary (>= 2 children),
/// Not is binary (positive NOT negative). Nodes are shared freely once
/// constructed; the factories enforce the arity invariants.
class QueryNode {
 public:
  enum class Kind { And, Or, Not, Atom };
  using Ptr = std::shared_ptr<const QueryNode>;

  static Ptr make_and(std::vector<Ptr> children);
  static Ptr make_or(std::vector<Ptr> children);
  static Ptr make_not(Ptr positive, Ptr negative);
  static Ptr make_atom(AtomTerm term);

  Kind kind() const { return kind_; }
  bool is_atom() const { return kind_ == Kind::Atom; }

  /// Children of an And/Or node.
  const std::vector<Ptr>& children() const { return children_; }
  /// Operands of a Not node.
  const Ptr& positive() const { return children_[0]; }
  const Ptr& negative() const { return children_[1]; }
  /// Term of an Atom node.
  const AtomTerm& atom() const { return atom_; }

  bool operator==(const QueryNode& o) const;  // deep structural equality
  bool operator!=(const QueryNode& o) const { return !(*this == o); }

 private:
  friend class Parser;
  QueryNode() = default;

  Kind kind_ = Kind::Atom;
  AtomTerm atom_;
  std::vector<Ptr> children_;  // And/Or: n children; Not: [positive, negative]
};

/// Parses a PubMed-syntax Boolean query into an AST.
///
/// AND/OR/NOT are case-insensitive keywords with precedence NOT > AND > OR;
/// runs of the same operator flatten into a single n-ary node and NOT chains
/// associate to the left. Consecutive bare words collapse into one multi-word
/// atom, double quotes delimit phrases, a trailing `*` marks truncation and a
/// bracketed tag after an atom names its search field. See docs/grammar.md.
///
/// Throws ParseError (UnbalancedParenthesis, UnterminatedQuote,
/// DanglingOperator or EmptyQuery) with the byte offset of the problem.
QueryNode::Ptr parse_boolean(std::string_view raw);

/// Flattens the query to its term tokens in left-to-right source order:
/// field tags dropped, wildcard stars stripped, phrases and multi-word atoms
/// split into lowercased tokens (the toolkit tokenization rule). Atoms under
/// the negative branch of a NOT are omitted unless include_negated is set.
std::vector<std::string> extract_terms(const QueryNode& q, bool include_negated);

/// Children of the root when it is And/Or, otherwise the root itself.
std::vector<QueryNode::Ptr> top_level_clauses(const QueryNode::Ptr& q);

/// Canonical string form; parse(render(a)) is structurally equal to a for
/// every parser-produced AST. Operator nodes are always parenthesized,
/// phrases re-quoted, truncation re-starred and field tags re-bracketed
/// (AllFields stays implicit).
std::string render(const QueryNode& q);

}  // namespace boolrank
