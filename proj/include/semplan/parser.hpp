#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "semplan/error.hpp"
#include "semplan/formula.hpp"

namespace semplan {

namespace detail {

// Recursive-descent parser. Precedence, loosest first: `|`, `&`, `U`
// (right-associative), then the prefix operators `!`, `F`, `<>`.
class FormulaParser {
 public:
  FormulaParser(std::string_view text, const Alphabet& alphabet) : text_(text), alphabet_(alphabet) {}

  Formula parse() {
    skip_space();
    if (pos_ == text_.size()) fail(ParseErrorKind::syntax, "empty formula");
    Formula f = parse_or();
    skip_space();
    if (pos_ != text_.size()) fail(ParseErrorKind::syntax, "unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  struct Operand {
    Formula formula;
    bool is_observation;
  };

  [[noreturn]] void fail(ParseErrorKind kind, const std::string& msg) const { throw ParseError(kind, pos_, msg); }
  [[noreturn]] void fail_at(std::size_t at, ParseErrorKind kind, const std::string& msg) const {
    throw ParseError(kind, at, msg);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  bool accept(std::string_view tok) {
    skip_space();
    if (text_.substr(pos_, tok.size()) != tok) return false;
    pos_ += tok.size();
    return true;
  }

  // Keyword match that refuses to split an identifier (so `Until` is a name).
  bool accept_word(std::string_view word) {
    skip_space();
    if (text_.substr(pos_, word.size()) != word) return false;
    const std::size_t end = pos_ + word.size();
    if (end < text_.size() && ident_char(text_[end])) return false;
    pos_ = end;
    return true;
  }

  Formula parse_or() {
    std::vector<Formula> parts{parse_and()};
    while (accept("||") || accept("|")) parts.push_back(parse_and());
    return parts.size() == 1 ? parts.front() : Formula::disj(std::move(parts));
  }

  Formula parse_and() {
    std::vector<Formula> parts{parse_until()};
    while (accept("&&") || accept("&")) parts.push_back(parse_until());
    return parts.size() == 1 ? parts.front() : Formula::conj(std::move(parts));
  }

  Formula parse_until() {
    Formula lhs = parse_unary().formula;
    if (accept_word("U")) return Formula::until(std::move(lhs), parse_until());
    return lhs;
  }

  Operand parse_unary() {
    skip_space();
    const std::size_t at = pos_;
    if (accept("!") || accept("~")) {
      Operand inner = parse_unary();
      if (!inner.is_observation) {
        fail_at(at, ParseErrorKind::negated_non_observation, "negation may only be applied to an observation");
      }
      return {Formula::neg_obs(inner.formula.observation()), false};
    }
    if (accept("<>") || accept_word("F")) return {Formula::eventually(parse_unary().formula), false};
    if (accept_word("X")) fail_at(at, ParseErrorKind::next_operator, "the Next operator is not supported");
    if (accept("[]") || accept_word("G")) {
      fail_at(at, ParseErrorKind::unsupported_operator, "the Globally operator is not co-safe");
    }
    return parse_primary();
  }

  Operand parse_primary() {
    skip_space();
    const std::size_t at = pos_;
    if (pos_ == text_.size()) fail(ParseErrorKind::syntax, "unexpected end of formula");
    if (accept("(")) {
      // Parenthesized single observations stay negatable: `!(A)`.
      const std::size_t inner_at = pos_;
      Formula f = parse_or();
      if (!accept(")")) fail(ParseErrorKind::syntax, "expected ')'");
      const bool bare = f.kind() == FormulaKind::Obs && is_bare_identifier(inner_at);
      return {f, bare};
    }
    if (accept_word("true")) return {Formula::top(), false};
    if (accept_word("false")) {
      fail_at(at, ParseErrorKind::unsupported_operator, "'false' is not part of the surface syntax");
    }
    if (!ident_char(text_[pos_]) || std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      fail(ParseErrorKind::syntax, "unexpected '" + std::string(1, text_[pos_]) + "'");
    }
    std::size_t end = pos_;
    while (end < text_.size() && ident_char(text_[end])) ++end;
    const std::string name(text_.substr(pos_, end - pos_));
    auto o = alphabet_.find(name);
    if (!o) fail(ParseErrorKind::unknown_observation, "unknown observation '" + name + "'");
    pos_ = end;
    return {Formula::obs(*o), true};
  }

  // True when the text starting at `from` is `ident` optionally wrapped in
  // further parentheses, i.e. the operand was syntactically an observation.
  bool is_bare_identifier(std::size_t from) const {
    std::size_t i = from;
    auto skip = [&] {
      while (i < text_.size() && (std::isspace(static_cast<unsigned char>(text_[i])) || text_[i] == '(')) ++i;
    };
    skip();
    while (i < text_.size() && ident_char(text_[i])) ++i;
    while (i < text_.size() && (std::isspace(static_cast<unsigned char>(text_[i])) || text_[i] == ')')) ++i;
    return i >= pos_;
  }

  std::string_view text_;
  const Alphabet& alphabet_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a co-safe LTL formula over `alphabet` into canonical form.
/// Throws ParseError carrying the character offset of the problem.
inline Formula parse(std::string_view text, const Alphabet& alphabet) {
  return detail::FormulaParser(text, alphabet).parse();
}

}  // namespace semplan
