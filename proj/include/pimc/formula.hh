/*
 * formula.hh
 *
 * PCTL abstract syntax, concrete-syntax parser and printer, and the
 * rewrite of invariance sugar G / G<=n into dualized until formulae.
 *
 * Grammar:
 *   formula := atom | "!" formula | formula "&" formula
 *            | "P" "[" cmp prob "]" "(" path ")" | "(" formula ")"
 *   path    := "X" formula | formula "U" formula | formula "U<=" int formula
 *            | "G" formula | "G<=" int formula
 *   cmp     := "<" | "<=" | ">" | ">="
 * "&" is left-associative and "!" binds tighter than "&"; "X", "U", "G",
 * "P" and "true" are reserved words ("true" denotes the whole space).
 */

#ifndef PIMC_FORMULA_HH_
#define PIMC_FORMULA_HH_

#include <cctype>
#include <charconv>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace pimc {

enum class Cmp { LT, LE, GT, GE };

inline const char* to_string(Cmp c) {
  switch (c) {
    case Cmp::LT: return "<";
    case Cmp::LE: return "<=";
    case Cmp::GT: return ">";
    default: return ">=";
  }
}

/* comparator of the dual event: 1 - w cmp p  <=>  w dual(cmp) 1-p */
inline Cmp dual(Cmp c) {
  switch (c) {
    case Cmp::LT: return Cmp::GT;
    case Cmp::LE: return Cmp::GE;
    case Cmp::GT: return Cmp::LT;
    default: return Cmp::LE;
  }
}

inline bool compare(double w, Cmp c, double p) {
  switch (c) {
    case Cmp::LT: return w < p;
    case Cmp::LE: return w <= p;
    case Cmp::GT: return w > p;
    default: return w >= p;
  }
}

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct PathFormula {
  enum class Kind { Next, BoundedUntil, Until, BoundedGlobally, Globally };
  Kind kind;
  FormulaPtr left;    // Next/Globally operand, or the constraint of an until
  FormulaPtr right;   // until target
  std::size_t bound;  // step count for the bounded forms
};

struct Formula {
  enum class Kind { Atom, Not, And, Prob };
  Kind kind;
  std::string name;                  // Atom
  FormulaPtr left, right;            // Not (left), And
  Cmp cmp = Cmp::GE;                 // Prob
  double p = 0.0;                    // Prob threshold
  std::optional<PathFormula> path;   // Prob
};

inline FormulaPtr make_atom(std::string name) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Atom;
  f->name = std::move(name);
  return f;
}
inline FormulaPtr make_not(FormulaPtr child) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Not;
  f->left = std::move(child);
  return f;
}
inline FormulaPtr make_and(FormulaPtr l, FormulaPtr r) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::And;
  f->left = std::move(l);
  f->right = std::move(r);
  return f;
}
inline FormulaPtr make_prob(Cmp cmp, double p, PathFormula path) {
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("make_prob: probability threshold outside [0,1]");
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Prob;
  f->cmp = cmp;
  f->p = p;
  f->path = std::move(path);
  return f;
}

inline PathFormula path_next(FormulaPtr s) {
  return {PathFormula::Kind::Next, std::move(s), nullptr, 0};
}
inline PathFormula path_until(FormulaPtr l, FormulaPtr r) {
  return {PathFormula::Kind::Until, std::move(l), std::move(r), 0};
}
inline PathFormula path_bounded_until(FormulaPtr l, FormulaPtr r, std::size_t n) {
  return {PathFormula::Kind::BoundedUntil, std::move(l), std::move(r), n};
}
inline PathFormula path_globally(FormulaPtr s) {
  return {PathFormula::Kind::Globally, std::move(s), nullptr, 0};
}
inline PathFormula path_bounded_globally(FormulaPtr s, std::size_t n) {
  return {PathFormula::Kind::BoundedGlobally, std::move(s), nullptr, n};
}

inline bool equal(const FormulaPtr& a, const FormulaPtr& b);

inline bool equal_path(const PathFormula& a, const PathFormula& b) {
  if (a.kind != b.kind || a.bound != b.bound) return false;
  if (!equal(a.left, b.left)) return false;
  return equal(a.right, b.right);
}

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Formula::Kind::Atom: return a->name == b->name;
    case Formula::Kind::Not: return equal(a->left, b->left);
    case Formula::Kind::And: return equal(a->left, b->left) && equal(a->right, b->right);
    case Formula::Kind::Prob:
      return a->cmp == b->cmp && a->p == b->p && equal_path(*a->path, *b->path);
  }
  return false;
}

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
        pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

namespace detail {

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : s_(text) {}

  FormulaPtr parse() {
    FormulaPtr f = formula();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input after formula");
    return f;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    if (!eat(c)) fail(std::string("expected '") + c + "' " + what);
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  static bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  /* lookahead: next token is the given reserved word */
  bool peek_word(char w) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != w) return false;
    return pos_ + 1 >= s_.size() || !ident_char(s_[pos_ + 1]);
  }
  bool eat_word(char w) {
    if (!peek_word(w)) return false;
    ++pos_;
    return true;
  }

  std::string identifier() {
    skip_ws();
    if (pos_ >= s_.size() || !ident_start(s_[pos_])) fail("expected an atom identifier");
    std::size_t start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  Cmp comparator() {
    skip_ws();
    if (pos_ >= s_.size()) fail("expected a comparator");
    char c = s_[pos_];
    if (c == '<') {
      ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '=') {
        ++pos_;
        return Cmp::LE;
      }
      return Cmp::LT;
    }
    if (c == '>') {
      ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '=') {
        ++pos_;
        return Cmp::GE;
      }
      return Cmp::GT;
    }
    fail("expected a comparator (<, <=, >, >=)");
  }

  double probability() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
            s_[pos_] == 'e' || s_[pos_] == 'E' || s_[pos_] == '+' || s_[pos_] == '-'))
      ++pos_;
    if (start == pos_) fail("expected a probability literal");
    double v{};
    auto [end, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc{} || end != s_.data() + pos_) {
      pos_ = start;
      fail("malformed probability literal");
    }
    if (v < 0.0 || v > 1.0) {
      pos_ = start;
      fail("probability literal outside [0,1]");
    }
    return v;
  }

  std::size_t step_count() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a step count");
    std::size_t v{};
    auto [end, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc{}) {
      pos_ = start;
      fail("malformed step count");
    }
    (void)end;
    return v;
  }

  /* formula := conj */
  FormulaPtr formula() { return conj(); }

  FormulaPtr conj() {
    FormulaPtr f = unary();
    while (eat('&')) f = make_and(f, unary());
    return f;
  }

  FormulaPtr unary() {
    if (eat('!')) return make_not(unary());
    return primary();
  }

  FormulaPtr primary() {
    skip_ws();
    if (eat('(')) {
      FormulaPtr f = formula();
      expect(')', "to close the parenthesized formula");
      return f;
    }
    if (peek_word('P')) {
      std::size_t save = pos_;
      ++pos_;
      if (!peek('[')) {
        pos_ = save;  // an atom that happens to be named P would land here,
      } else {        // but P is reserved, so fall through to the operator
        expect('[', "after P");
        Cmp c = comparator();
        double p = probability();
        expect(']', "after the probability bound");
        expect('(', "before the path formula");
        PathFormula pf = path();
        expect(')', "after the path formula");
        return make_prob(c, p, std::move(pf));
      }
    }
    skip_ws();
    std::size_t at = pos_;
    std::string id = identifier();
    if (id == "P" || id == "X" || id == "U" || id == "G") {
      pos_ = at;
      fail("'" + id + "' is reserved and cannot name an atom");
    }
    return make_atom(std::move(id));
  }

  /* paths exist only under a Prob operator; conjunction or negation of a
   * path formula is rejected by construction of this grammar */
  PathFormula path() {
    if (eat_word('X')) {
      FormulaPtr s = formula();
      check_no_path_tail("X");
      return path_next(std::move(s));
    }
    if (eat_word('G')) {
      if (peek('<')) {
        expect('<', "");
        expect('=', "in G<=");
        std::size_t n = step_count();
        FormulaPtr s = formula();
        check_no_path_tail("G<=");
        return path_bounded_globally(std::move(s), n);
      }
      FormulaPtr s = formula();
      check_no_path_tail("G");
      return path_globally(std::move(s));
    }
    FormulaPtr l = formula();
    if (!eat_word('U')) fail("expected 'U' in the path formula");
    if (peek('<')) {
      expect('<', "");
      expect('=', "in U<=");
      std::size_t n = step_count();
      FormulaPtr r = formula();
      check_no_path_tail("U<=");
      return path_bounded_until(std::move(l), std::move(r), n);
    }
    FormulaPtr r = formula();
    check_no_path_tail("U");
    return path_until(std::move(l), std::move(r));
  }

  /* a second temporal operator inside one P[...](...) is a path formula in
   * a state-formula position */
  void check_no_path_tail(const char* op) {
    skip_ws();
    if (peek_word('U'))
      fail(std::string("path formula after '") + op +
           "' cannot be an operand of another 'U' (paths only directly under P)");
  }
};

inline void print_formula(const Formula& f, std::string& out, bool parenthesize_and);

inline void print_path(const PathFormula& p, std::string& out) {
  char buf[32];
  switch (p.kind) {
    case PathFormula::Kind::Next:
      out += "X ";
      print_formula(*p.left, out, false);
      break;
    case PathFormula::Kind::Globally:
      out += "G ";
      print_formula(*p.left, out, false);
      break;
    case PathFormula::Kind::BoundedGlobally:
      std::snprintf(buf, sizeof buf, "G<=%zu ", p.bound);
      out += buf;
      print_formula(*p.left, out, false);
      break;
    case PathFormula::Kind::Until:
      print_formula(*p.left, out, false);
      out += " U ";
      print_formula(*p.right, out, false);
      break;
    case PathFormula::Kind::BoundedUntil:
      print_formula(*p.left, out, false);
      std::snprintf(buf, sizeof buf, " U<=%zu ", p.bound);
      out += buf;
      print_formula(*p.right, out, false);
      break;
  }
}

inline void print_formula(const Formula& f, std::string& out, bool parenthesize_and) {
  switch (f.kind) {
    case Formula::Kind::Atom:
      out += f.name;
      break;
    case Formula::Kind::Not:
      out += '!';
      print_formula(*f.left, out, true);
      break;
    case Formula::Kind::And: {
      if (parenthesize_and) out += '(';
      print_formula(*f.left, out, false);
      out += " & ";
      print_formula(*f.right, out, true);  // right operand: keep left associativity
      if (parenthesize_and) out += ')';
      break;
    }
    case Formula::Kind::Prob: {
      out += "P[";
      out += to_string(f.cmp);
      char buf[40];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, f.p);
      (void)ec;
      out.append(buf, end);
      out += "](";
      print_path(*f.path, out);
      out += ')';
      break;
    }
  }
}

}  // namespace detail

inline FormulaPtr parse(std::string_view text) {
  return detail::FormulaParser(text).parse();
}

inline std::string print(const FormulaPtr& f) {
  std::string out;
  detail::print_formula(*f, out, false);
  return out;
}

/* P_{cmp p}[G A] -> P_{dual(cmp) 1-p}[true U !A], likewise for G<=n */
inline FormulaPtr desugar_invariance(const FormulaPtr& f) {
  if (!f) return f;
  switch (f->kind) {
    case Formula::Kind::Atom:
      return f;
    case Formula::Kind::Not:
      return make_not(desugar_invariance(f->left));
    case Formula::Kind::And:
      return make_and(desugar_invariance(f->left), desugar_invariance(f->right));
    case Formula::Kind::Prob: {
      const PathFormula& p = *f->path;
      FormulaPtr l = desugar_invariance(p.left);
      FormulaPtr r = desugar_invariance(p.right);
      if (p.kind == PathFormula::Kind::Globally)
        return make_prob(dual(f->cmp), 1.0 - f->p, path_until(make_atom("true"), make_not(l)));
      if (p.kind == PathFormula::Kind::BoundedGlobally)
        return make_prob(dual(f->cmp), 1.0 - f->p,
                         path_bounded_until(make_atom("true"), make_not(l), p.bound));
      PathFormula np{p.kind, std::move(l), std::move(r), p.bound};
      return make_prob(f->cmp, f->p, std::move(np));
    }
  }
  return f;
}

}  // namespace pimc

#endif  // PIMC_FORMULA_HH_
