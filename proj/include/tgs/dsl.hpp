#pragma once

// Text format for control problems (.tgs files): declarations, a basic
// action theory, a program, and a metric-temporal specification of bad
// behavior. See docs/dsl.md for the grammar.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tgs/basics.hpp"
#include "tgs/rational.hpp"
#include "tgs/source_ast.hpp"

namespace tgs::dsl {

enum class Tok {
  End, Ident, Number,
  LBrace, RBrace, LParen, RParen, LBracket, RBracket,
  Colon, Semi, Comma, Dot, Star, Amp, Pipe, PipePipe, Bang, Question,
  EqEq, Neq, LessEq, GreaterEq, Less, Greater, Minus,
};

struct Token {
  Tok kind;
  std::string text;
  Rational number{0};
  SourceLoc loc;
};

class Lexer {
 public:
  Lexer(std::string text, std::string filename)
      : text_(std::move(text)), file_(std::move(filename)) {}

  Token next() {
    skip_ws();
    Token t;
    t.loc = here();
    if (pos_ >= text_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        advance();
      t.kind = Tok::Ident;
      t.text = text_.substr(start, pos_ - start);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        advance();
      // "1.5" and "3/4" are single number tokens.
      if (pos_ + 1 < text_.size() && (text_[pos_] == '.' || text_[pos_] == '/') &&
          std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
        advance();
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
          advance();
      }
      t.kind = Tok::Number;
      t.text = text_.substr(start, pos_ - start);
      t.number = parse_rational(t.text);
      return t;
    }
    auto two = [&](char second, Tok yes, Tok no) {
      advance();
      if (pos_ < text_.size() && text_[pos_] == second) {
        advance();
        t.kind = yes;
      } else {
        t.kind = no;
      }
    };
    switch (c) {
      case '{': advance(); t.kind = Tok::LBrace; return t;
      case '}': advance(); t.kind = Tok::RBrace; return t;
      case '(': advance(); t.kind = Tok::LParen; return t;
      case ')': advance(); t.kind = Tok::RParen; return t;
      case '[': advance(); t.kind = Tok::LBracket; return t;
      case ']': advance(); t.kind = Tok::RBracket; return t;
      case ':': advance(); t.kind = Tok::Colon; return t;
      case ';': advance(); t.kind = Tok::Semi; return t;
      case ',': advance(); t.kind = Tok::Comma; return t;
      case '.': advance(); t.kind = Tok::Dot; return t;
      case '*': advance(); t.kind = Tok::Star; return t;
      case '&': advance(); t.kind = Tok::Amp; return t;
      case '?': advance(); t.kind = Tok::Question; return t;
      case '-': advance(); t.kind = Tok::Minus; return t;
      case '|': two('|', Tok::PipePipe, Tok::Pipe); return t;
      case '!': two('=', Tok::Neq, Tok::Bang); return t;
      case '=':
        advance();
        if (pos_ < text_.size() && text_[pos_] == '=') {
          advance();
          t.kind = Tok::EqEq;
          return t;
        }
        throw Diagnostic(t.loc, "expected '==' (single '=' is not an operator)");
      case '<': two('=', Tok::LessEq, Tok::Less); return t;
      case '>': two('=', Tok::GreaterEq, Tok::Greater); return t;
      default:
        throw Diagnostic(t.loc, std::string("unexpected character '") + c + "'");
    }
  }

 private:
  SourceLoc here() const { return SourceLoc{file_, line_, col_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string text_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

namespace detail {

inline const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "objects", "fluents", "clocks", "action", "ssa", "reset", "init",
      "program", "spec_bad", "spec_good", "owner", "pre", "guard",
      "controller", "environment", "true", "false", "exists", "forall",
      "nil", "inf", "a", "U", "F", "G"};
  return words;
}

class Parser {
 public:
  Parser(std::string text, std::string filename)
      : lexer_(std::move(text), filename) {
    spec_.filename = std::move(filename);
    shift();
  }

  ast::SourceSpec parse_spec() {
    bool have_program = false, have_spec = false;
    while (cur_.kind != Tok::End) {
      if (cur_.kind != Tok::Ident)
        fail("expected a top-level section keyword");
      const std::string kw = cur_.text;
      if (kw == "objects") {
        shift();
        parse_objects();
      } else if (kw == "fluents") {
        shift();
        parse_fluents();
      } else if (kw == "clocks") {
        shift();
        parse_clocks();
      } else if (kw == "action") {
        shift();
        parse_action();
      } else if (kw == "ssa") {
        shift();
        parse_ssa();
      } else if (kw == "reset") {
        shift();
        parse_reset();
      } else if (kw == "init") {
        shift();
        parse_init();
      } else if (kw == "program") {
        SourceLoc loc = cur_.loc;
        shift();
        expect(Tok::Colon, "':'");
        if (have_program) throw Diagnostic(loc, "duplicate program section");
        spec_.program = parse_program();
        if (pending_semi_) pending_semi_ = false;
        else expect(Tok::Semi, "';'");
        have_program = true;
      } else if (kw == "spec_bad" || kw == "spec_good") {
        SourceLoc loc = cur_.loc;
        shift();
        expect(Tok::Colon, "':'");
        if (have_spec) throw Diagnostic(loc, "duplicate specification section");
        ast::MtlPtr phi = parse_mtl_formula(/*validate_atoms=*/true);
        if (kw == "spec_good") {
          phi = ast::m_not(phi);
          spec_.spec_was_desired = true;
        }
        spec_.spec_bad = phi;
        expect(Tok::Semi, "';'");
        have_spec = true;
      } else {
        fail("unknown section '" + kw + "'");
      }
    }
    if (!have_program)
      throw Diagnostic(SourceLoc{spec_.filename, 0, 0}, "missing program section");
    if (!have_spec)
      throw Diagnostic(SourceLoc{spec_.filename, 0, 0},
                       "missing spec_bad or spec_good section");
    finish_validation();
    return std::move(spec_);
  }

  // Entry point for a bare metric-temporal formula (no declarations; atoms
  // are taken as written).
  ast::MtlPtr parse_bare_mtl() {
    ast::MtlPtr m = parse_mtl_formula(/*validate_atoms=*/false);
    if (cur_.kind != Tok::End) fail("trailing input after formula");
    return m;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw Diagnostic(cur_.loc, message);
  }

  void shift() {
    if (!pending_.empty()) {
      cur_ = pending_.back();
      pending_.pop_back();
    } else {
      cur_ = lexer_.next();
    }
  }

  void unshift(const Token& t) {
    pending_.push_back(cur_);
    cur_ = t;
  }

  bool at_ident(const char* word) const {
    return cur_.kind == Tok::Ident && cur_.text == word;
  }

  Token expect(Tok kind, const char* what) {
    if (cur_.kind != kind) fail(std::string("expected ") + what);
    Token t = cur_;
    shift();
    return t;
  }

  std::string expect_name(const char* what) {
    if (cur_.kind != Tok::Ident) fail(std::string("expected ") + what);
    if (reserved_words().count(cur_.text))
      fail("'" + cur_.text + "' is a reserved word");
    std::string name = cur_.text;
    shift();
    return name;
  }

  // -- declarations ---------------------------------------------------------

  void parse_objects() {
    expect(Tok::LBrace, "'{'");
    while (cur_.kind != Tok::RBrace) {
      SourceLoc loc = cur_.loc;
      std::string name = expect_name("object name");
      expect(Tok::Colon, "':'");
      std::string type = expect_name("type name");
      expect(Tok::Semi, "';'");
      if (objects_.count(name))
        throw Diagnostic(loc, "duplicate object '" + name + "'");
      objects_[name] = type;
      spec_.objects.push_back({name, type});
    }
    shift();
  }

  void parse_fluents() {
    expect(Tok::LBrace, "'{'");
    while (cur_.kind != Tok::RBrace) {
      SourceLoc loc = cur_.loc;
      std::string name = expect_name("fluent name");
      std::vector<std::string> arg_types;
      if (cur_.kind == Tok::LParen) {
        shift();
        while (cur_.kind != Tok::RParen) {
          arg_types.push_back(expect_name("type name"));
          if (cur_.kind == Tok::Comma) shift();
          else if (cur_.kind != Tok::RParen) fail("expected ',' or ')'");
        }
        shift();
      }
      expect(Tok::Semi, "';'");
      if (fluents_.count(name))
        throw Diagnostic(loc, "duplicate fluent '" + name + "'");
      fluents_[name] = arg_types;
      spec_.fluents.push_back({name, arg_types});
    }
    shift();
  }

  void parse_clocks() {
    expect(Tok::LBrace, "'{'");
    while (cur_.kind != Tok::RBrace) {
      SourceLoc loc = cur_.loc;
      std::string name = expect_name("clock name");
      expect(Tok::Semi, "';'");
      if (clocks_.count(name))
        throw Diagnostic(loc, "duplicate clock '" + name + "'");
      clocks_.insert(name);
      spec_.clocks.push_back(name);
    }
    shift();
  }

  void parse_action() {
    ast::ActionDecl decl;
    decl.loc = cur_.loc;
    decl.name = expect_name("action name");
    if (actions_.count(decl.name))
      throw Diagnostic(decl.loc, "duplicate action '" + decl.name + "'");
    if (cur_.kind == Tok::LParen) {
      shift();
      while (cur_.kind != Tok::RParen) {
        ast::Binder b;
        b.var = expect_name("parameter name");
        expect(Tok::Colon, "':'");
        b.type = expect_name("type name");
        decl.params.push_back(b);
        if (cur_.kind == Tok::Comma) shift();
        else if (cur_.kind != Tok::RParen) fail("expected ',' or ')'");
      }
      shift();
    }
    expect(Tok::LBrace, "'{'");
    bool have_owner = false, have_pre = false;
    while (cur_.kind != Tok::RBrace) {
      if (at_ident("owner")) {
        shift();
        expect(Tok::Colon, "':'");
        if (at_ident("controller")) decl.owner = Owner::Controller;
        else if (at_ident("environment")) decl.owner = Owner::Environment;
        else fail("expected 'controller' or 'environment'");
        shift();
        expect(Tok::Semi, "';'");
        have_owner = true;
      } else if (at_ident("pre")) {
        shift();
        expect(Tok::Colon, "':'");
        decl.pre = parse_formula(decl.params, /*allow_acteq=*/false);
        expect(Tok::Semi, "';'");
        have_pre = true;
      } else if (at_ident("guard")) {
        shift();
        expect(Tok::Colon, "':'");
        decl.guard = parse_guard();
        expect(Tok::Semi, "';'");
      } else {
        fail("expected 'owner', 'pre' or 'guard'");
      }
    }
    shift();
    if (!have_owner)
      throw Diagnostic(decl.loc,
                       "action '" + decl.name + "' is missing an ownership tag");
    if (!have_pre) decl.pre = ast::f_true();
    actions_[decl.name] = decl.params;
    spec_.actions.push_back(std::move(decl));
  }

  void parse_ssa() {
    ast::SsaDecl decl;
    decl.loc = cur_.loc;
    decl.fluent = expect_name("fluent name");
    auto it = fluents_.find(decl.fluent);
    if (it == fluents_.end())
      throw Diagnostic(decl.loc, "undeclared fluent '" + decl.fluent + "'");
    if (cur_.kind == Tok::LParen) {
      shift();
      while (cur_.kind != Tok::RParen) {
        ast::Binder b;
        b.var = expect_name("parameter name");
        expect(Tok::Colon, "':'");
        b.type = expect_name("type name");
        decl.params.push_back(b);
        if (cur_.kind == Tok::Comma) shift();
        else if (cur_.kind != Tok::RParen) fail("expected ',' or ')'");
      }
      shift();
    }
    if (decl.params.size() != it->second.size())
      throw Diagnostic(decl.loc, "successor-state formula for '" + decl.fluent +
                                     "' has wrong arity");
    for (std::size_t i = 0; i < decl.params.size(); ++i)
      if (decl.params[i].type != it->second[i])
        throw Diagnostic(decl.loc, "parameter '" + decl.params[i].var +
                                       "' should have type '" + it->second[i] +
                                       "'");
    expect(Tok::Colon, "':'");
    decl.rhs = parse_formula(decl.params, /*allow_acteq=*/true);
    expect(Tok::Semi, "';'");
    spec_.ssas.push_back(std::move(decl));
  }

  void parse_reset() {
    ast::ResetDecl decl;
    decl.loc = cur_.loc;
    decl.clock = expect_name("clock name");
    if (!clocks_.count(decl.clock))
      throw Diagnostic(decl.loc, "undeclared clock '" + decl.clock + "'");
    expect(Tok::Colon, "':'");
    decl.rhs = parse_formula({}, /*allow_acteq=*/true);
    expect(Tok::Semi, "';'");
    spec_.resets.push_back(std::move(decl));
  }

  void parse_init() {
    expect(Tok::LBrace, "'{'");
    while (cur_.kind != Tok::RBrace) {
      SourceLoc loc = cur_.loc;
      ast::InitAtom atom;
      if (cur_.kind == Tok::Bang)
        throw Diagnostic(loc,
                         "init lists positive atoms only (closed world: "
                         "unlisted atoms are false)");
      atom.pred = expect_name("fluent name");
      auto it = fluents_.find(atom.pred);
      if (it == fluents_.end())
        throw Diagnostic(loc, "undeclared fluent '" + atom.pred + "'");
      if (cur_.kind == Tok::LParen) {
        shift();
        while (cur_.kind != Tok::RParen) {
          SourceLoc aloc = cur_.loc;
          std::string arg = expect_name("object name");
          auto oit = objects_.find(arg);
          if (oit == objects_.end())
            throw Diagnostic(aloc, "undeclared object '" + arg + "'");
          atom.args.push_back(arg);
          if (cur_.kind == Tok::Comma) shift();
          else if (cur_.kind != Tok::RParen) fail("expected ',' or ')'");
        }
        shift();
      }
      if (atom.args.size() != it->second.size())
        throw Diagnostic(loc, "fluent '" + atom.pred + "' expects " +
                                  std::to_string(it->second.size()) +
                                  " argument(s)");
      for (std::size_t i = 0; i < atom.args.size(); ++i)
        if (objects_[atom.args[i]] != it->second[i])
          throw Diagnostic(loc, "argument " + std::to_string(i + 1) + " of '" +
                                    atom.pred + "' should have type '" +
                                    it->second[i] + "'");
      expect(Tok::Semi, "';'");
      spec_.init.push_back(std::move(atom));
    }
    shift();
  }

  // -- static formulas ------------------------------------------------------

  using Scope = std::vector<ast::Binder>;

  std::optional<std::string> lookup_var(const Scope& scope,
                                        const std::string& name) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->var == name) return it->type;
    return std::nullopt;
  }

  ast::Term parse_term(const Scope& scope, const std::string& expected_type) {
    SourceLoc loc = cur_.loc;
    std::string name = expect_name("object or variable");
    ast::Term t;
    t.name = name;
    if (auto var_type = lookup_var(scope, name)) {
      t.is_var = true;
      if (*var_type != expected_type)
        throw Diagnostic(loc, "variable '" + name + "' has type '" + *var_type +
                                  "', expected '" + expected_type + "'");
      return t;
    }
    auto it = objects_.find(name);
    if (it == objects_.end())
      throw Diagnostic(loc, "undeclared object or variable '" + name + "'");
    if (it->second != expected_type)
      throw Diagnostic(loc, "object '" + name + "' has type '" + it->second +
                                "', expected '" + expected_type + "'");
    return t;
  }

  ast::ActionTerm parse_action_term(const Scope& scope) {
    SourceLoc loc = cur_.loc;
    ast::ActionTerm at;
    at.name = expect_name("action name");
    auto it = actions_.find(at.name);
    if (it == actions_.end())
      throw Diagnostic(loc, "undeclared action '" + at.name + "'");
    if (cur_.kind == Tok::LParen) {
      shift();
      std::size_t i = 0;
      while (cur_.kind != Tok::RParen) {
        if (i >= it->second.size())
          fail("too many arguments for action '" + at.name + "'");
        at.args.push_back(parse_term(scope, it->second[i].type));
        ++i;
        if (cur_.kind == Tok::Comma) shift();
        else if (cur_.kind != Tok::RParen) fail("expected ',' or ')'");
      }
      shift();
    }
    if (at.args.size() != it->second.size())
      throw Diagnostic(loc, "action '" + at.name + "' expects " +
                                std::to_string(it->second.size()) +
                                " argument(s)");
    return at;
  }

  ast::FormulaPtr parse_formula(Scope scope, bool allow_acteq) {
    return parse_f_or(scope, allow_acteq);
  }

  ast::FormulaPtr parse_f_or(Scope& scope, bool allow_acteq) {
    std::vector<ast::FormulaPtr> parts{parse_f_and(scope, allow_acteq)};
    while (cur_.kind == Tok::Pipe) {
      shift();
      parts.push_back(parse_f_and(scope, allow_acteq));
    }
    return ast::f_nary(ast::FKind::Or, std::move(parts));
  }

  ast::FormulaPtr parse_f_and(Scope& scope, bool allow_acteq) {
    std::vector<ast::FormulaPtr> parts{parse_f_unary(scope, allow_acteq)};
    while (cur_.kind == Tok::Amp) {
      shift();
      parts.push_back(parse_f_unary(scope, allow_acteq));
    }
    return ast::f_nary(ast::FKind::And, std::move(parts));
  }

  ast::FormulaPtr parse_f_unary(Scope& scope, bool allow_acteq) {
    if (cur_.kind == Tok::Bang) {
      shift();
      return ast::f_not(parse_f_unary(scope, allow_acteq));
    }
    if (at_ident("exists") || at_ident("forall")) {
      ast::FKind kind = cur_.text == "exists" ? ast::FKind::Exists
                                              : ast::FKind::Forall;
      SourceLoc loc = cur_.loc;
      shift();
      std::vector<ast::Binder> binders;
      while (true) {
        ast::Binder b;
        b.var = expect_name("variable name");
        expect(Tok::Colon, "':'");
        b.type = expect_name("type name");
        binders.push_back(b);
        if (cur_.kind == Tok::Comma) shift();
        else break;
      }
      expect(Tok::Dot, "'.'");
      bool empty = false;
      for (const auto& b : binders)
        if (!type_inhabited(b.type)) empty = true;
      if (empty)
        spec_.warnings.push_back(
            spec_.filename + ":" + std::to_string(loc.line) + ":" +
            std::to_string(loc.col) +
            ": warning: quantifier over an empty type expands vacuously");
      std::size_t base = scope.size();
      for (const auto& b : binders) scope.push_back(b);
      ast::FormulaPtr body = parse_f_or(scope, allow_acteq);
      scope.resize(base);
      return ast::f_quant(kind, std::move(binders), std::move(body));
    }
    return parse_f_primary(scope, allow_acteq);
  }

  ast::FormulaPtr parse_f_primary(Scope& scope, bool allow_acteq) {
    if (cur_.kind == Tok::LParen) {
      shift();
      ast::FormulaPtr f = parse_f_or(scope, allow_acteq);
      expect(Tok::RParen, "')'");
      return f;
    }
    if (cur_.kind != Tok::Ident) fail("expected a formula");
    if (cur_.text == "true") { shift(); return ast::f_true(); }
    if (cur_.text == "false") { shift(); return ast::f_false(); }
    if (cur_.text == "a") {
      SourceLoc loc = cur_.loc;
      if (!allow_acteq)
        throw Diagnostic(loc,
                         "action equalities are only allowed in successor-state "
                         "and reset formulas");
      shift();
      bool neq;
      if (cur_.kind == Tok::EqEq) neq = false;
      else if (cur_.kind == Tok::Neq) neq = true;
      else { fail("expected '==' or '!=' after 'a'"); }
      shift();
      return ast::f_acteq(parse_action_term(scope), neq);
    }
    SourceLoc loc = cur_.loc;
    std::string name = expect_name("fluent name");
    auto it = fluents_.find(name);
    if (it == fluents_.end())
      throw Diagnostic(loc, "undeclared fluent '" + name + "'");
    std::vector<ast::Term> args;
    if (cur_.kind == Tok::LParen) {
      shift();
      std::size_t i = 0;
      while (cur_.kind != Tok::RParen) {
        if (i >= it->second.size())
          fail("too many arguments for fluent '" + name + "'");
        args.push_back(parse_term(scope, it->second[i]));
        ++i;
        if (cur_.kind == Tok::Comma) shift();
        else if (cur_.kind != Tok::RParen) fail("expected ',' or ')'");
      }
      shift();
    }
    if (args.size() != it->second.size())
      throw Diagnostic(loc, "fluent '" + name + "' expects " +
                                std::to_string(it->second.size()) +
                                " argument(s)");
    return ast::f_atom(name, std::move(args));
  }

  bool type_inhabited(const std::string& type) const {
    for (const auto& [name, t] : objects_)
      if (t == type) return true;
    return false;
  }

  // -- guards ---------------------------------------------------------------

  Rational parse_nonnegative_number(const char* what) {
    if (cur_.kind == Tok::Minus)
      fail(std::string("negative ") + what + " is not allowed");
    Token t = expect(Tok::Number, what);
    return t.number;
  }

  ast::Guard parse_guard() {
    ast::Guard guard;
    if (at_ident("true")) {
      shift();
      return guard;
    }
    while (true) {
      if (cur_.kind == Tok::LBracket)
        fail("the always-box modality is not supported inside guards; "
             "guards are conjunctions of clock comparisons");
      SourceLoc loc = cur_.loc;
      std::string clock = expect_name("clock name");
      if (!clocks_.count(clock))
        throw Diagnostic(loc, "undeclared clock '" + clock + "'");
      ast::ClockAtom atom;
      atom.clock = clock;
      switch (cur_.kind) {
        case Tok::EqEq: atom.op = CmpOp::Eq; break;
        case Tok::LessEq: atom.op = CmpOp::Le; break;
        case Tok::GreaterEq: atom.op = CmpOp::Ge; break;
        case Tok::Less: atom.op = CmpOp::Lt; break;
        case Tok::Greater: atom.op = CmpOp::Gt; break;
        default: fail("expected a comparison operator");
      }
      shift();
      atom.bound = parse_nonnegative_number("clock bound");
      guard.push_back(std::move(atom));
      if (cur_.kind == Tok::Amp) shift();
      else break;
    }
    return guard;
  }

  // -- programs -------------------------------------------------------------

  ast::ProgramPtr parse_program() { return parse_p_conc(); }

  ast::ProgramPtr parse_p_conc() {
    ast::ProgramPtr lhs = parse_p_choice();
    while (cur_.kind == Tok::PipePipe) {
      shift();
      lhs = ast::p_binary(ast::PKind::Conc, lhs, parse_p_choice());
    }
    return lhs;
  }

  ast::ProgramPtr parse_p_choice() {
    ast::ProgramPtr lhs = parse_p_seq();
    while (cur_.kind == Tok::Pipe) {
      shift();
      lhs = ast::p_binary(ast::PKind::Choice, lhs, parse_p_seq());
    }
    return lhs;
  }

  ast::ProgramPtr parse_p_seq() {
    ast::ProgramPtr lhs = parse_p_star();
    while (cur_.kind == Tok::Semi) {
      // ';' doubles as the section terminator: it only continues the
      // sequence when a program can follow.
      shift();
      if (!starts_program()) {
        if (paren_depth_ > 0) fail("expected a program after ';'");
        pending_semi_ = true;
        break;
      }
      lhs = ast::p_binary(ast::PKind::Seq, lhs, parse_p_star());
    }
    return lhs;
  }

  bool starts_program() const {
    if (cur_.kind == Tok::LParen || cur_.kind == Tok::Question) return true;
    if (cur_.kind == Tok::Ident)
      return cur_.text == "nil" || actions_.count(cur_.text) > 0;
    return false;
  }

  ast::ProgramPtr parse_p_star() {
    ast::ProgramPtr p = parse_p_primary();
    while (cur_.kind == Tok::Star) {
      shift();
      p = ast::p_star(p);
    }
    return p;
  }

  ast::ProgramPtr parse_p_primary() {
    if (cur_.kind == Tok::LParen) {
      shift();
      ++paren_depth_;
      ast::ProgramPtr p = parse_p_conc();
      expect(Tok::RParen, "')'");
      --paren_depth_;
      return p;
    }
    if (cur_.kind == Tok::Question) {
      shift();
      expect(Tok::LParen, "'(' (tests are written ?(formula))");
      Scope scope;
      ast::FormulaPtr f = parse_f_or(scope, /*allow_acteq=*/false);
      expect(Tok::RParen, "')'");
      return ast::p_test(std::move(f));
    }
    if (at_ident("nil")) {
      shift();
      return ast::p_nil();
    }
    Scope scope;
    ast::ActionTerm at = parse_action_term(scope);
    for (const auto& arg : at.args)
      if (arg.is_var)
        fail("program actions must be ground");
    return ast::p_act(std::move(at));
  }

  // -- metric-temporal formulas --------------------------------------------

  ast::MtlPtr parse_mtl_formula(bool validate_atoms) {
    return parse_m_until(validate_atoms);
  }

  ast::MtlPtr parse_m_until(bool validate) {
    ast::MtlPtr lhs = parse_m_or(validate);
    if (at_ident("U")) {
      shift();
      ast::Interval ivl = parse_interval();
      ast::MtlPtr rhs = parse_m_until(validate);
      return ast::m_until(ivl, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ast::MtlPtr parse_m_or(bool validate) {
    ast::MtlPtr lhs = parse_m_and(validate);
    while (cur_.kind == Tok::Pipe) {
      shift();
      lhs = ast::m_binary(ast::MKind::Or, lhs, parse_m_and(validate));
    }
    return lhs;
  }

  ast::MtlPtr parse_m_and(bool validate) {
    ast::MtlPtr lhs = parse_m_unary(validate);
    while (cur_.kind == Tok::Amp) {
      shift();
      lhs = ast::m_binary(ast::MKind::And, lhs, parse_m_unary(validate));
    }
    return lhs;
  }

  ast::MtlPtr parse_m_unary(bool validate) {
    if (cur_.kind == Tok::Bang) {
      shift();
      return ast::m_not(parse_m_unary(validate));
    }
    if (at_ident("F")) {
      shift();
      ast::Interval ivl = parse_interval();
      return ast::m_finally(ivl, parse_m_unary(validate));
    }
    if (at_ident("G")) {
      shift();
      ast::Interval ivl = parse_interval();
      return ast::m_globally(ivl, parse_m_unary(validate));
    }
    return parse_m_primary(validate);
  }

  ast::MtlPtr parse_m_primary(bool validate) {
    if (cur_.kind == Tok::LParen) {
      shift();
      ast::MtlPtr m = parse_m_until(validate);
      expect(Tok::RParen, "')'");
      return m;
    }
    if (cur_.kind != Tok::Ident) fail("expected a formula");
    if (cur_.text == "true") { shift(); return ast::m_true(); }
    if (cur_.text == "false") { shift(); return ast::m_false(); }
    SourceLoc loc = cur_.loc;
    std::string name = expect_name("fluent name");
    std::vector<ast::Term> args;
    if (cur_.kind == Tok::LParen) {
      shift();
      while (cur_.kind != Tok::RParen) {
        std::string arg = expect_name("object name");
        if (validate && !objects_.count(arg))
          fail("undeclared object '" + arg + "'");
        args.push_back(ast::Term{false, arg});
        if (cur_.kind == Tok::Comma) shift();
        else if (cur_.kind != Tok::RParen) fail("expected ',' or ')'");
      }
      shift();
    }
    if (validate) {
      auto it = fluents_.find(name);
      if (it == fluents_.end())
        throw Diagnostic(loc, "undeclared fluent '" + name + "'");
      if (args.size() != it->second.size())
        throw Diagnostic(loc, "fluent '" + name + "' expects " +
                                  std::to_string(it->second.size()) +
                                  " argument(s)");
      for (std::size_t i = 0; i < args.size(); ++i)
        if (objects_[args[i].name] != it->second[i])
          throw Diagnostic(loc, "argument " + std::to_string(i + 1) + " of '" +
                                    name + "' should have type '" +
                                    it->second[i] + "'");
    }
    return ast::m_atom(std::move(name), std::move(args));
  }

  // Interval forms: [a,b] (a,b] [a,inf) <=c, or absent for [0,inf).
  // A '(' followed by anything but a number is a parenthesized formula,
  // not an interval, and is pushed back.
  ast::Interval parse_interval() {
    ast::Interval ivl;
    if (cur_.kind == Tok::LessEq) {
      shift();
      return ast::interval_upto(parse_nonnegative_number("interval endpoint"));
    }
    SourceLoc loc = cur_.loc;
    if (cur_.kind == Tok::LBracket) {
      shift();
      ivl.lo_strict = false;
    } else if (cur_.kind == Tok::LParen) {
      Token lparen = cur_;
      shift();
      if (cur_.kind != Tok::Number && cur_.kind != Tok::Minus) {
        unshift(lparen);
        return ivl;
      }
      ivl.lo_strict = true;
    } else {
      return ivl;  // bare operator: [0, inf)
    }
    ivl.lo = parse_nonnegative_number("interval endpoint");
    expect(Tok::Comma, "','");
    if (at_ident("inf")) {
      shift();
      ivl.hi_inf = true;
      expect(Tok::RParen, "')' (infinite intervals are right-open)");
      return ivl;
    }
    ivl.hi_inf = false;
    ivl.hi = parse_nonnegative_number("interval endpoint");
    if (cur_.kind == Tok::RBracket) ivl.hi_strict = false;
    else if (cur_.kind == Tok::RParen) ivl.hi_strict = true;
    else fail("expected ']' or ')'");
    shift();
    if (ivl.hi < ivl.lo)
      throw Diagnostic(loc, "inverted interval: upper endpoint is smaller "
                            "than lower endpoint");
    return ivl;
  }

  // -- whole-file validation -----------------------------------------------

  void finish_validation() {
    std::map<std::string, int> ssa_count;
    for (const auto& s : spec_.ssas) {
      if (++ssa_count[s.fluent] > 1)
        throw Diagnostic(s.loc, "duplicate successor-state formula for '" +
                                    s.fluent + "'");
    }
    for (const auto& f : spec_.fluents)
      if (!ssa_count.count(f.name))
        throw Diagnostic(SourceLoc{spec_.filename, 0, 0},
                         "missing successor-state formula for '" + f.name + "'");
    std::map<std::string, int> reset_count;
    for (const auto& r : spec_.resets) {
      if (++reset_count[r.clock] > 1)
        throw Diagnostic(r.loc,
                         "duplicate reset formula for '" + r.clock + "'");
    }
    for (const auto& c : spec_.clocks)
      if (!reset_count.count(c))
        throw Diagnostic(SourceLoc{spec_.filename, 0, 0},
                         "missing reset formula for clock '" + c + "'");
  }

  Lexer lexer_;
  Token cur_;
  std::vector<Token> pending_;
  bool pending_semi_ = false;
  int paren_depth_ = 0;
  ast::SourceSpec spec_;
  std::map<std::string, std::string> objects_;  // name -> type
  std::map<std::string, std::vector<std::string>> fluents_;
  std::set<std::string> clocks_;
  std::map<std::string, std::vector<ast::Binder>> actions_;
};

}  // namespace detail

// Parses a complete .tgs document.
inline ast::SourceSpec parse_spec(const std::string& text,
                                  const std::string& filename = "<input>") {
  return detail::Parser(text, filename).parse_spec();
}

// Parses a bare metric-temporal formula; atom names are taken as written.
inline ast::MtlPtr parse_mtl(const std::string& text,
                             const std::string& filename = "<mtl>") {
  return detail::Parser(text, filename).parse_bare_mtl();
}

// One step of a timed action trace.
struct TraceStep {
  Rational time{0};
  ast::ActionTerm action;
};

// Line format: "t: action(args)". Blank lines and // comments are skipped.
inline std::vector<TraceStep> parse_trace(const std::string& text,
                                          const std::string& filename = "<trace>") {
  std::vector<TraceStep> steps;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line = text.substr(
        pos, eol == std::string::npos ? std::string::npos : eol - pos);
    ++line_no;
    std::size_t comment = line.find("//");
    if (comment != std::string::npos) line = line.substr(0, comment);
    std::size_t begin = line.find_first_not_of(" \t\r");
    if (begin != std::string::npos) {
      SourceLoc loc{filename, line_no, static_cast<int>(begin) + 1};
      std::size_t colon = line.find(':', begin);
      if (colon == std::string::npos)
        throw Diagnostic(loc, "expected 'time: action'");
      TraceStep step;
      std::string time_text = line.substr(begin, colon - begin);
      std::size_t tend = time_text.find_last_not_of(" \t");
      time_text = time_text.substr(0, tend + 1);
      try {
        step.time = parse_rational(time_text);
      } catch (const std::exception&) {
        throw Diagnostic(loc, "malformed timestamp '" + time_text + "'");
      }
      if (step.time < Rational(0))
        throw Diagnostic(loc, "negative timestamp");
      std::string rest = line.substr(colon + 1);
      std::size_t rbegin = rest.find_first_not_of(" \t");
      if (rbegin == std::string::npos)
        throw Diagnostic(loc, "missing action");
      std::size_t rend = rest.find_last_not_of(" \t\r");
      rest = rest.substr(rbegin, rend - rbegin + 1);
      std::size_t paren = rest.find('(');
      if (paren == std::string::npos) {
        step.action.name = rest;
      } else {
        if (rest.back() != ')')
          throw Diagnostic(loc, "missing ')' in action term");
        step.action.name = rest.substr(0, paren);
        std::string args = rest.substr(paren + 1, rest.size() - paren - 2);
        std::size_t apos = 0;
        while (apos < args.size()) {
          std::size_t comma = args.find(',', apos);
          std::string arg = args.substr(
              apos, comma == std::string::npos ? std::string::npos
                                               : comma - apos);
          std::size_t abegin = arg.find_first_not_of(" \t");
          if (abegin == std::string::npos)
            throw Diagnostic(loc, "empty action argument");
          std::size_t aend = arg.find_last_not_of(" \t");
          step.action.args.push_back(
              ast::Term{false, arg.substr(abegin, aend - abegin + 1)});
          if (comma == std::string::npos) break;
          apos = comma + 1;
        }
      }
      if (!steps.empty() && step.time < steps.back().time)
        throw Diagnostic(loc, "timestamps must be nondecreasing");
      steps.push_back(std::move(step));
    }
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  return steps;
}

}  // namespace tgs::dsl
