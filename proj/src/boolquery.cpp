#include "boolrank/boolquery.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <utility>

#include "boolrank/text.hpp"

namespace boolrank {

namespace {

std::string lower_copy(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

}  // namespace

FieldTag FieldTag::from_raw(std::string_view raw_tag) {
  FieldTag t;
  t.raw = normalize_whitespace(raw_tag);
  const std::string key = lower_copy(t.raw);
  if (key == "mesh" || key == "mh") {
    t.kind = Kind::Mesh;
    t.mesh_no_explosion = false;
  } else if (key == "mesh:noexp" || key == "mh:noexp") {
    t.kind = Kind::Mesh;
    t.mesh_no_explosion = true;
  } else if (key == "all fields" || key == "all") {
    t.kind = Kind::AllFields;
  } else if (key == "tiab" || key == "title/abstract") {
    t.kind = Kind::TitleAbstract;
  } else {
    t.kind = Kind::Other;
  }
  return t;
}

bool FieldTag::operator==(const FieldTag& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Mesh:
      return mesh_no_explosion == o.mesh_no_explosion;
    case Kind::Other:
      return raw == o.raw;
    default:
      return true;  // AllFields / TitleAbstract compare by kind alone
  }
}

QueryNode::Ptr QueryNode::make_and(std::vector<Ptr> children) {
  if (children.size() < 2)
    throw std::invalid_argument("And node requires at least two children");
  for (const auto& c : children)
    if (!c) throw std::invalid_argument("And child must not be null");
  auto node = std::shared_ptr<QueryNode>(new QueryNode());
  node->kind_ = Kind::And;
  node->children_ = std::move(children);
  return node;
}

QueryNode::Ptr QueryNode::make_or(std::vector<Ptr> children) {
  if (children.size() < 2)
    throw std::invalid_argument("Or node requires at least two children");
  for (const auto& c : children)
    if (!c) throw std::invalid_argument("Or child must not be null");
  auto node = std::shared_ptr<QueryNode>(new QueryNode());
  node->kind_ = Kind::Or;
  node->children_ = std::move(children);
  return node;
}

QueryNode::Ptr QueryNode::make_not(Ptr positive, Ptr negative) {
  if (!positive || !negative)
    throw std::invalid_argument("Not node requires both operands");
  auto node = std::shared_ptr<QueryNode>(new QueryNode());
  node->kind_ = Kind::Not;
  node->children_ = {std::move(positive), std::move(negative)};
  return node;
}

QueryNode::Ptr QueryNode::make_atom(AtomTerm term) {
  term.text = normalize_whitespace(term.text);
  if (term.text.empty())
    throw std::invalid_argument("Atom text must be non-empty");
  if (term.truncated && term.text.back() == '*')
    throw std::invalid_argument("truncated atom text must not end in '*'");
  auto node = std::shared_ptr<QueryNode>(new QueryNode());
  node->kind_ = Kind::Atom;
  node->atom_ = std::move(term);
  return node;
}

bool QueryNode::operator==(const QueryNode& o) const {
  if (kind_ != o.kind_) return false;
  if (kind_ == Kind::Atom) return atom_ == o.atom_;
  if (children_.size() != o.children_.size()) return false;
  for (std::size_t i = 0; i < children_.size(); ++i)
    if (*children_[i] != *o.children_[i]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class TokKind { LParen, RParen, Word, Phrase, Tag, OpAnd, OpOr, OpNot, End };

struct Token {
  TokKind kind;
  std::size_t pos = 0;    // byte offset in the input
  std::string text;       // word text, phrase inner text, or tag inner text
  bool truncated = false; // phrase followed by '*' outside the quotes
};

bool is_word_break(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v' || c == '(' || c == ')' || c == '[' || c == ']' || c == '"';
}

class Lexer {
 public:
  explicit Lexer(std::string_view input) : in_(input) { scan(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    scan();
    return t;
  }

 private:
  void scan() {
    while (pos_ < in_.size() && std::isspace(static_cast<unsigned char>(in_[pos_])))
      ++pos_;
    tok_ = Token{TokKind::End, pos_, "", false};
    if (pos_ >= in_.size()) return;

    const std::size_t start = pos_;
    const char c = in_[pos_];
    if (c == '(') {
      ++pos_;
      tok_ = {TokKind::LParen, start, "", false};
    } else if (c == ')') {
      ++pos_;
      tok_ = {TokKind::RParen, start, "", false};
    } else if (c == '"') {
      const auto close = in_.find('"', pos_ + 1);
      if (close == std::string_view::npos)
        throw ParseError(ParseError::Kind::UnterminatedQuote, start,
                         "unterminated quote at offset " + std::to_string(start));
      std::string inner(in_.substr(pos_ + 1, close - pos_ - 1));
      pos_ = close + 1;
      bool truncated = false;
      while (pos_ < in_.size() && in_[pos_] == '*') {  // "phrase"* wildcard
        truncated = true;
        ++pos_;
      }
      tok_ = {TokKind::Phrase, start, std::move(inner), truncated};
    } else if (c == '[') {
      const auto close = in_.find(']', pos_ + 1);
      if (close == std::string_view::npos)
        throw ParseError(ParseError::Kind::UnbalancedParenthesis, start,
                         "unclosed '[' at offset " + std::to_string(start));
      std::string inner(in_.substr(pos_ + 1, close - pos_ - 1));
      pos_ = close + 1;
      tok_ = {TokKind::Tag, start, std::move(inner), false};
    } else if (c == ']') {
      throw ParseError(ParseError::Kind::UnbalancedParenthesis, start,
                       "unmatched ']' at offset " + std::to_string(start));
    } else {
      while (pos_ < in_.size() && !is_word_break(in_[pos_])) ++pos_;
      std::string word(in_.substr(start, pos_ - start));
      const std::string key = lower_copy(word);
      if (key == "and")
        tok_ = {TokKind::OpAnd, start, std::move(word), false};
      else if (key == "or")
        tok_ = {TokKind::OpOr, start, std::move(word), false};
      else if (key == "not")
        tok_ = {TokKind::OpNot, start, std::move(word), false};
      else
        tok_ = {TokKind::Word, start, std::move(word), false};
    }
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  Token tok_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view input) : lex_(input) {}

  QueryNode::Ptr parse() {
    if (lex_.peek().kind == TokKind::End)
      throw ParseError(ParseError::Kind::EmptyQuery, 0, "empty query");
    QueryNode::Ptr node = parse_or();
    const Token& t = lex_.peek();
    if (t.kind == TokKind::RParen)
      throw ParseError(ParseError::Kind::UnbalancedParenthesis, t.pos,
                       "unmatched ')' at offset " + std::to_string(t.pos));
    if (t.kind != TokKind::End)
      throw ParseError(ParseError::Kind::DanglingOperator, t.pos,
                       "operand without an operator at offset " +
                           std::to_string(t.pos));
    return node;
  }

 private:
  QueryNode::Ptr parse_or() {
    std::vector<QueryNode::Ptr> children;
    children.push_back(parse_and());
    while (lex_.peek().kind == TokKind::OpOr) {
      last_op_pos_ = lex_.take().pos;
      children.push_back(parse_and());
    }
    if (children.size() == 1) return children.front();
    return make_node(QueryNode::Kind::Or, std::move(children));
  }

  QueryNode::Ptr parse_and() {
    std::vector<QueryNode::Ptr> children;
    children.push_back(parse_not());
    while (lex_.peek().kind == TokKind::OpAnd) {
      last_op_pos_ = lex_.take().pos;
      children.push_back(parse_not());
    }
    if (children.size() == 1) return children.front();
    return make_node(QueryNode::Kind::And, std::move(children));
  }

  QueryNode::Ptr parse_not() {
    QueryNode::Ptr node = parse_primary();
    while (lex_.peek().kind == TokKind::OpNot) {
      last_op_pos_ = lex_.take().pos;
      QueryNode::Ptr negative = parse_primary();
      node = make_node(QueryNode::Kind::Not, {std::move(node), std::move(negative)});
    }
    return node;
  }

  QueryNode::Ptr parse_primary() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case TokKind::LParen:
        return parse_group();
      case TokKind::Word:
        return parse_word_atom();
      case TokKind::Phrase:
        return parse_phrase_atom();
      case TokKind::OpAnd:
      case TokKind::OpOr:
      case TokKind::OpNot:
        throw ParseError(ParseError::Kind::DanglingOperator, t.pos,
                         "operator '" + t.text + "' is missing an operand at offset " +
                             std::to_string(t.pos));
      case TokKind::Tag:
        throw ParseError(ParseError::Kind::DanglingOperator, t.pos,
                         "field tag with no preceding term at offset " +
                             std::to_string(t.pos));
      case TokKind::RParen:
        if (last_op_pos_)
          throw ParseError(ParseError::Kind::DanglingOperator, *last_op_pos_,
                           "operator is missing its right operand at offset " +
                               std::to_string(*last_op_pos_));
        throw ParseError(ParseError::Kind::EmptyQuery, t.pos,
                         "empty group at offset " + std::to_string(t.pos));
      case TokKind::End:
        if (last_op_pos_)
          throw ParseError(ParseError::Kind::DanglingOperator, *last_op_pos_,
                           "operator is missing its right operand at offset " +
                               std::to_string(*last_op_pos_));
        throw ParseError(ParseError::Kind::EmptyQuery, 0, "empty query");
    }
    throw ParseError(ParseError::Kind::EmptyQuery, t.pos, "unreachable");
  }

  QueryNode::Ptr parse_group() {
    const Token open = lex_.take();
    QueryNode::Ptr inner = parse_or();
    if (lex_.peek().kind != TokKind::RParen) {
      const Token& t = lex_.peek();
      if (t.kind == TokKind::End)
        throw ParseError(ParseError::Kind::UnbalancedParenthesis, open.pos,
                         "unclosed '(' at offset " + std::to_string(open.pos));
      throw ParseError(ParseError::Kind::DanglingOperator, t.pos,
                       "operand without an operator at offset " +
                           std::to_string(t.pos));
    }
    lex_.take();
    // A tag right after ')' binds to the nearest preceding atom.
    if (lex_.peek().kind == TokKind::Tag) {
      const Token tag = lex_.take();
      if (last_atom_ == nullptr || last_atom_explicitly_tagged_)
        throw ParseError(ParseError::Kind::DanglingOperator, tag.pos,
                         "field tag has no untagged term to bind to at offset " +
                             std::to_string(tag.pos));
      last_atom_->atom_.field = FieldTag::from_raw(tag.text);
      last_atom_explicitly_tagged_ = true;
    }
    return inner;
  }

  QueryNode::Ptr parse_word_atom() {
    const Token first = lex_.take();
    std::string text = first.text;
    while (lex_.peek().kind == TokKind::Word) text += " " + lex_.take().text;

    // A wildcard anywhere in the run marks the atom truncated; only trailing
    // stars are folded into the flag, word-internal ones stay in the text.
    const bool truncated = text.find('*') != std::string::npos;
    while (!text.empty() && text.back() == '*') text.pop_back();
    text = normalize_whitespace(text);
    if (text.empty())
      throw ParseError(ParseError::Kind::EmptyQuery, first.pos,
                       "term is empty after normalization at offset " +
                           std::to_string(first.pos));

    AtomTerm term;
    term.text = std::move(text);
    term.truncated = truncated;
    return finish_atom(std::move(term));
  }

  QueryNode::Ptr parse_phrase_atom() {
    const Token tok = lex_.take();
    AtomTerm term;
    term.text = normalize_whitespace(tok.text);
    term.is_phrase = true;
    term.truncated = tok.truncated;
    if (term.truncated)
      while (!term.text.empty() && term.text.back() == '*') term.text.pop_back();
    term.text = normalize_whitespace(term.text);
    if (term.text.empty())
      throw ParseError(ParseError::Kind::EmptyQuery, tok.pos,
                       "phrase is empty after normalization at offset " +
                           std::to_string(tok.pos));
    return finish_atom(std::move(term));
  }

  QueryNode::Ptr finish_atom(AtomTerm term) {
    bool explicit_tag = false;
    if (lex_.peek().kind == TokKind::Tag) {
      term.field = FieldTag::from_raw(lex_.take().text);
      explicit_tag = true;
    }
    auto node = std::shared_ptr<QueryNode>(new QueryNode());
    node->kind_ = QueryNode::Kind::Atom;
    node->atom_ = std::move(term);
    last_atom_ = node.get();  // kept mutable for tag-after-group binding
    last_atom_explicitly_tagged_ = explicit_tag;
    return node;
  }

  static QueryNode::Ptr make_node(QueryNode::Kind kind,
                                  std::vector<QueryNode::Ptr> children) {
    auto node = std::shared_ptr<QueryNode>(new QueryNode());
    node->kind_ = kind;
    node->children_ = std::move(children);
    return node;
  }

  Lexer lex_;
  QueryNode* last_atom_ = nullptr;
  bool last_atom_explicitly_tagged_ = false;
  std::optional<std::size_t> last_op_pos_;
};

QueryNode::Ptr parse_boolean(std::string_view raw) { return Parser(raw).parse(); }

// ---------------------------------------------------------------------------
// Operations

namespace {

void collect_terms(const QueryNode& q, bool include_negated,
                   std::vector<std::string>& out) {
  switch (q.kind()) {
    case QueryNode::Kind::Atom: {
      for (auto& tok : tokenize(q.atom().text)) out.push_back(std::move(tok));
      return;
    }
    case QueryNode::Kind::Not:
      collect_terms(*q.positive(), include_negated, out);
      if (include_negated) collect_terms(*q.negative(), include_negated, out);
      return;
    case QueryNode::Kind::And:
    case QueryNode::Kind::Or:
      for (const auto& c : q.children()) collect_terms(*c, include_negated, out);
      return;
  }
}

void render_to(const QueryNode& q, std::string& out) {
  switch (q.kind()) {
    case QueryNode::Kind::Atom: {
      const AtomTerm& a = q.atom();
      if (a.is_phrase) {
        out += '"';
        out += a.text;
        out += '"';
      } else {
        out += a.text;
      }
      if (a.truncated) out += '*';
      switch (a.field.kind) {
        case FieldTag::Kind::AllFields:
          break;  // implicit
        case FieldTag::Kind::Mesh:
          out += a.field.mesh_no_explosion ? "[mesh:noexp]" : "[mesh]";
          break;
        case FieldTag::Kind::TitleAbstract:
          out += "[tiab]";
          break;
        case FieldTag::Kind::Other:
          out += '[';
          out += a.field.raw;
          out += ']';
          break;
      }
      return;
    }
    case QueryNode::Kind::Not:
      out += '(';
      render_to(*q.positive(), out);
      out += " NOT ";
      render_to(*q.negative(), out);
      out += ')';
      return;
    case QueryNode::Kind::And:
    case QueryNode::Kind::Or: {
      const char* op = q.kind() == QueryNode::Kind::And ? " AND " : " OR ";
      out += '(';
      bool first = true;
      for (const auto& c : q.children()) {
        if (!first) out += op;
        first = false;
        render_to(*c, out);
      }
      out += ')';
      return;
    }
  }
}

}  // namespace

std::vector<std::string> extract_terms(const QueryNode& q, bool include_negated) {
  std::vector<std::string> out;
  collect_terms(q, include_negated, out);
  return out;
}

std::vector<QueryNode::Ptr> top_level_clauses(const QueryNode::Ptr& q) {
  if (!q) throw std::invalid_argument("null query");
  if (q->kind() == QueryNode::Kind::And || q->kind() == QueryNode::Kind::Or)
    return q->children();
  return {q};
}

std::string render(const QueryNode& q) {
  std::string out;
  render_to(q, out);
  return out;
}

}  // namespace boolrank
