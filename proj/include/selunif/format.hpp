#pragma once

// Problem file parsing and output formatting.
//
// A problem file is a sequence of directives, each ended by a period;
// `%` starts a comment running to the end of the line:
//
//   atom p(X1,X2).        % exactly one: the atom to instantiate
//   pos p(f(Y),a).        % one or more: must-unify atoms
//   neg p(g(W),c).        % zero or more: must-not-unify atoms
//   ground X1.            % variables of the atom to be made ground
//   sig d/0, h/2.         % extra signature symbols for the enumeration
//   depth 3.              % optional depth-bound override
//
// Variable names start with an uppercase letter or underscore, functor and
// predicate names with a lowercase letter.  Variable scope is one atom: the
// same name in two directives denotes two different variables, which keeps
// all atoms pairwise variable-disjoint by construction.

#include <cctype>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "selunif/oracle.hpp"
#include "selunif/selective.hpp"
#include "selunif/subst.hpp"
#include "selunif/terms.hpp"

namespace selunif {

class ParseError : public Error {
 public:
  enum class Kind { Syntax, MissingAtom, GroundVarNotInAtom, ArityClash };

  ParseError(Kind kind, std::size_t line, std::size_t column, const std::string& message)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) +
              ": " + message),
        kind(kind),
        line(line),
        column(column) {}

  Kind kind;
  std::size_t line;
  std::size_t column;
};

namespace detail {

struct Token {
  enum class Type { Ident, Var, Int, LParen, RParen, Comma, Period, Slash, End };
  Type type = Type::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip_blank();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= text_.size()) {
      t.type = Token::Type::End;
      return t;
    }
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.text = take_while([](char k) {
        return std::isalnum(static_cast<unsigned char>(k)) || k == '_';
      });
      t.type = (std::isupper(static_cast<unsigned char>(c)) || c == '_')
                   ? Token::Type::Var
                   : Token::Type::Ident;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      t.text = take_while([](char k) { return std::isdigit(static_cast<unsigned char>(k)); });
      t.type = Token::Type::Int;
      return t;
    }
    bump();
    t.text = std::string(1, c);
    switch (c) {
      case '(': t.type = Token::Type::LParen; return t;
      case ')': t.type = Token::Type::RParen; return t;
      case ',': t.type = Token::Type::Comma; return t;
      case '.': t.type = Token::Type::Period; return t;
      case '/': t.type = Token::Type::Slash; return t;
      default:
        throw ParseError(ParseError::Kind::Syntax, t.line, t.column,
                         "unexpected character '" + t.text + "'");
    }
  }

 private:
  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  template <class Pred>
  std::string take_while(Pred keep) {
    std::string out;
    while (pos_ < text_.size() && keep(text_[pos_])) {
      out += text_[pos_];
      bump();
    }
    return out;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class ProblemParser {
 public:
  explicit ProblemParser(const std::string& text) : lexer_(text) { shift(); }

  Problem parse() {
    while (tok_.type != Token::Type::End) {
      if (tok_.type != Token::Type::Ident)
        fail("expected a directive (atom, pos, neg, ground, sig, depth)");
      std::string directive = tok_.text;
      Token at = tok_;
      shift();
      if (directive == "atom") {
        if (atom_) throw ParseError(ParseError::Kind::Syntax, at.line, at.column,
                                    "duplicate atom directive");
        atom_scope_.clear();
        atom_ = parse_atom(&atom_scope_);
      } else if (directive == "pos") {
        Scope scope;
        pos_.push_back(parse_atom(&scope));
      } else if (directive == "neg") {
        Scope scope;
        neg_.push_back(parse_atom(&scope));
      } else if (directive == "ground") {
        parse_ground();
      } else if (directive == "sig") {
        parse_sig();
      } else if (directive == "depth") {
        if (depth_) throw ParseError(ParseError::Kind::Syntax, at.line, at.column,
                                     "duplicate depth directive");
        depth_ = number();
      } else {
        throw ParseError(ParseError::Kind::Syntax, at.line, at.column,
                         "unknown directive '" + directive + "'");
      }
      expect(Token::Type::Period, "expected '.'");
    }
    if (!atom_)
      throw ParseError(ParseError::Kind::MissingAtom, tok_.line, tok_.column,
                       "no atom directive");
    if (pos_.empty())
      throw ParseError(ParseError::Kind::Syntax, tok_.line, tok_.column,
                       "at least one pos directive is required");
    Problem p = make_problem(std::move(*atom_), std::move(pos_), std::move(neg_),
                             std::move(ground_), std::move(extras_));
    p.depth_override = depth_;
    return p;
  }

 private:
  using Scope = std::vector<std::pair<std::string, Variable>>;

  void shift() { tok_ = lexer_.next(); }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(ParseError::Kind::Syntax, tok_.line, tok_.column, message);
  }

  void expect(Token::Type type, const std::string& message) {
    if (tok_.type != type) fail(message);
    shift();
  }

  std::size_t number() {
    if (tok_.type != Token::Type::Int) fail("expected a number");
    if (tok_.text.size() > 6) fail("number too large");
    std::size_t n = static_cast<std::size_t>(std::stoul(tok_.text));
    shift();
    return n;
  }

  FunctorSymbol functor(const std::string& name, std::size_t arity, const Token& at) {
    for (const auto& [have_name, have_arity] : arities_) {
      if (have_name != name) continue;
      if (have_arity != arity)
        throw ParseError(ParseError::Kind::ArityClash, at.line, at.column,
                         "'" + name + "' used with arity " + std::to_string(arity) +
                             " after arity " + std::to_string(have_arity));
      return {name, arity};
    }
    arities_.emplace_back(name, arity);
    return {name, arity};
  }

  Term parse_term(Scope* scope) {
    if (tok_.type == Token::Type::Var) {
      std::string name = tok_.text;
      shift();
      for (const auto& [have, v] : *scope)
        if (have == name) return Term::variable(v);
      Variable v = fresh_variable(VarSpace::Ordinary, name);
      scope->emplace_back(name, v);
      return Term::variable(v);
    }
    if (tok_.type != Token::Type::Ident) fail("expected a term");
    Token at = tok_;
    std::string name = tok_.text;
    shift();
    std::vector<Term> args = parse_args(scope);
    FunctorSymbol f = functor(name, args.size(), at);
    return Term::compound(std::move(f), std::move(args));
  }

  std::vector<Term> parse_args(Scope* scope) {
    std::vector<Term> args;
    if (tok_.type != Token::Type::LParen) return args;
    shift();
    args.push_back(parse_term(scope));
    while (tok_.type == Token::Type::Comma) {
      shift();
      args.push_back(parse_term(scope));
    }
    expect(Token::Type::RParen, "expected ')' or ','");
    return args;
  }

  Atom parse_atom(Scope* scope) {
    if (tok_.type != Token::Type::Ident) fail("expected a predicate name");
    Token at = tok_;
    std::string name = tok_.text;
    shift();
    std::vector<Term> args = parse_args(scope);
    FunctorSymbol f = functor(name, args.size(), at);
    return Atom(std::move(f), std::move(args));
  }

  void parse_ground() {
    for (;;) {
      if (tok_.type != Token::Type::Var) fail("expected a variable name");
      bool known = false;
      for (const auto& [name, v] : atom_scope_)
        if (name == tok_.text) {
          if (!contains_var(ground_, v)) ground_.push_back(v);
          known = true;
          break;
        }
      if (!known)
        throw ParseError(ParseError::Kind::GroundVarNotInAtom, tok_.line, tok_.column,
                         "'" + tok_.text + "' does not occur in the atom directive");
      shift();
      if (tok_.type != Token::Type::Comma) return;
      shift();
    }
  }

  void parse_sig() {
    for (;;) {
      if (tok_.type != Token::Type::Ident) fail("expected a functor name");
      Token at = tok_;
      std::string name = tok_.text;
      shift();
      expect(Token::Type::Slash, "expected '/'");
      std::size_t arity = number();
      FunctorSymbol f = functor(name, arity, at);
      bool have = false;
      for (const FunctorSymbol& e : extras_) have = have || e == f;
      if (!have) extras_.push_back(f);
      if (tok_.type != Token::Type::Comma) return;
      shift();
    }
  }

  Lexer lexer_;
  Token tok_;
  std::optional<Atom> atom_;
  Scope atom_scope_;
  std::vector<Atom> pos_;
  std::vector<Atom> neg_;
  std::vector<Variable> ground_;
  std::vector<FunctorSymbol> extras_;
  std::optional<std::size_t> depth_;
  std::vector<std::pair<std::string, std::size_t>> arities_;
};

}  // namespace detail

/// Parses a problem file.  Throws ParseError on malformed input and
/// PreconditionError when the directives violate a problem invariant (for
/// example an atom that cannot unify with a must-unify atom).
inline Problem parse_problem(const std::string& text) {
  return detail::ProblemParser(text).parse();
}

/// Renders a problem in the file format; parsing the output yields a
/// variant-equal problem.  Signature entries beyond the ones collected from
/// the atoms are printed as sig directives, so the round-trip re-adds no
/// second set of spare symbols.
inline std::string print_problem(const Problem& p) {
  std::string out = "atom " + to_string(p.atom) + ".\n";
  for (const Atom& h : p.must_unify) out += "pos " + to_string(h) + ".\n";
  for (const Atom& h : p.must_not_unify) out += "neg " + to_string(h) + ".\n";
  if (!p.ground_vars.empty()) {
    out += "ground ";
    for (std::size_t i = 0; i < p.ground_vars.size(); ++i) {
      if (i) out += ", ";
      out += to_string(p.ground_vars[i]);
    }
    out += ".\n";
  }
  if (p.atom_symbol_count < p.signature.size()) {
    out += "sig ";
    for (std::size_t i = p.atom_symbol_count; i < p.signature.size(); ++i) {
      if (i > p.atom_symbol_count) out += ", ";
      out += p.signature[i].name + "/" + std::to_string(p.signature[i].arity);
    }
    out += ".\n";
  }
  if (p.depth_override) out += "depth " + std::to_string(*p.depth_override) + ".\n";
  return out;
}

/// One-line rendering of a solver verdict: the substitution in canonical
/// form (or "id"), or "fail (bound=N, conclusive|inconclusive)".
inline std::string print_solution(const SolveResult& result) {
  if (result.solution) return to_string(result.solution->sigma);
  return "fail (bound=" + std::to_string(result.depth_bound) + ", " +
         (result.conclusive ? "conclusive" : "inconclusive") + ")";
}

/// The same verdict as a JSON object with a fixed field set:
/// status, substitution, algorithm, depth_bound, conclusive,
/// stats{candidates_tested, branches}.
inline nlohmann::ordered_json render_json(const SolveResult& result, AlgorithmTag alg) {
  nlohmann::ordered_json j;
  j["status"] = result.solution ? "solution" : "fail";
  if (result.solution) {
    nlohmann::ordered_json sub = nlohmann::ordered_json::object();
    for (const auto& [v, t] : result.solution->sigma.bindings())
      sub[to_string(v)] = to_string(t);
    j["substitution"] = std::move(sub);
  } else {
    j["substitution"] = nullptr;
  }
  j["algorithm"] = to_string(alg);
  j["depth_bound"] = result.depth_bound;
  j["conclusive"] = result.conclusive;
  j["stats"] = {{"candidates_tested", result.stats.candidates_tested},
                {"branches", result.stats.branches}};
  return j;
}

}  // namespace selunif
