#include "varlie/dsl.hpp"

#include "varlie/linsys.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstring>
#include <set>
#include <sstream>
#include <stdexcept>

namespace varlie {

namespace {

constexpr int kMaxDiags = 25;

struct Token {
  enum Type { Ident, Int, Punct, End };
  Type type = End;
  std::string text;
  int line = 1;
  int col = 1;
};

std::vector<Token> lex(const std::string& src, std::vector<Diagnostic>& diags) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  while (i < src.size()) {
    unsigned char ch = (unsigned char)src[i];
    if (ch == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (std::isspace(ch)) {
      if (ch == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(ch)) {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum((unsigned char)src[j]) || src[j] == '_'))
        ++j;
      while (j < src.size() && src[j] == '\'') ++j;
      t.type = Token::Ident;
      t.text = src.substr(i, j - i);
      col += (int)(j - i);
      i = j;
      out.push_back(t);
      continue;
    }
    if (std::isdigit(ch)) {
      size_t j = i;
      while (j < src.size() && std::isdigit((unsigned char)src[j])) ++j;
      t.type = Token::Int;
      t.text = src.substr(i, j - i);
      col += (int)(j - i);
      i = j;
      out.push_back(t);
      continue;
    }
    if (std::strchr("=;,:()[]^+-*/", ch)) {
      t.type = Token::Punct;
      t.text = std::string(1, (char)ch);
      ++col;
      ++i;
      out.push_back(t);
      continue;
    }
    if ((int)diags.size() < kMaxDiags)
      diags.push_back(
          {line, col, std::string("unexpected character '") + (char)ch + "'"});
    ++col;
    ++i;
  }
  Token end;
  end.type = Token::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

struct ParseError {};

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words{
      "base",   "field",      "op",     "density", "equation", "collection",
      "task",   "components", "even",   "odd",     "weight",   "ops",
      "on",     "ghost",      "args",   "antifields",          "euler",
      "under",  "action",     "matches", "generator",          "order",
      "families", "exp",      "f"};
  return words;
}

class Parser {
 public:
  explicit Parser(const std::string& src) {
    toks_ = lex(src, diags_);
    sc_ = std::make_shared<Scenario>();
    sc_->ctx = std::make_shared<Context>();
  }

  ParseResult run() {
    while (peek().type != Token::End && (int)diags_.size() < kMaxDiags) {
      try {
        statement();
      } catch (ParseError&) {
        recover();
      }
    }
    ParseResult r;
    r.diags = diags_;
    r.ok = diags_.empty();
    r.scenario = sc_;
    return r;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::vector<Diagnostic> diags_;
  std::shared_ptr<Scenario> sc_;
  bool saw_field_ = false;

  struct ColBind {
    bool gamma = false;
    bool q = false;
  };
  std::map<std::string, ColBind> colbind_;

  Context& ctx() { return *sc_->ctx; }

  /* ---- token plumbing ---- */

  const Token& peek(int ahead = 0) const {
    size_t k = pos_ + ahead;
    if (k >= toks_.size()) k = toks_.size() - 1;
    return toks_[k];
  }
  const Token& next() {
    const Token& t = peek();
    if (t.type != Token::End) ++pos_;
    return t;
  }
  static bool is_punct(const Token& t, char c) {
    return t.type == Token::Punct && t.text[0] == c;
  }
  bool eat_punct(char c) {
    if (!is_punct(peek(), c)) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    if ((int)diags_.size() < kMaxDiags) diags_.push_back({t.line, t.col, msg});
    throw ParseError{};
  }

  Token expect_punct(char c, const std::string& what) {
    if (!is_punct(peek(), c))
      fail(peek(), "expected '" + std::string(1, c) + "' " + what);
    return next();
  }
  Token expect_ident(const std::string& what) {
    if (peek().type != Token::Ident) fail(peek(), "expected " + what);
    return next();
  }
  long expect_int(const std::string& what) {
    if (peek().type != Token::Int) fail(peek(), "expected " + what);
    return std::stol(next().text);
  }
  void expect_keyword(const std::string& kw) {
    Token t = expect_ident("'" + kw + "'");
    if (t.text != kw) fail(t, "expected '" + kw + "'");
  }
  bool peek_keyword(const std::string& kw) const {
    return peek().type == Token::Ident && peek().text == kw;
  }

  /* joins name '-' name '-' ... into a hyphenated word */
  std::string join_hyphens(const Token& first) {
    std::string s = first.text;
    while (is_punct(peek(), '-') && peek(1).type == Token::Ident) {
      next();
      s += "-" + next().text;
    }
    return s;
  }

  void recover() {
    while (peek().type != Token::End) {
      if (is_punct(peek(), ';')) {
        next();
        return;
      }
      next();
    }
  }

  /* ---- names ---- */

  bool name_taken(const std::string& n) const {
    const Context& c = *sc_->ctx;
    if (c.base_index(n) >= 0 || c.field_index(n) >= 0 || c.code_by_name(n) >= 0)
      return true;
    return sc_->ops.count(n) || sc_->densities.count(n) ||
           sc_->equations.count(n) || sc_->collections.count(n);
  }

  void check_free_name(const Token& t, const std::string& n) {
    if (reserved_words().count(n)) fail(t, "'" + n + "' is a reserved word");
    if (n.find('_') != std::string::npos || n.find('\'') != std::string::npos)
      fail(t, "declared names may not contain '_' or primes");
    if (name_taken(n)) fail(t, "'" + n + "' is already declared");
    if (n.size() >= 2 && n[0] == 'D' && ctx().base_index(n.substr(1)) >= 0)
      fail(t, "'" + n + "' collides with a total derivative symbol");
  }

  int want_field(const Token& t, const std::string& n) {
    int fi = ctx().field_index(n);
    if (fi < 0) fail(t, "undeclared field '" + n + "'");
    return fi;
  }
  std::vector<int> field_codes(int fi) const {
    std::vector<int> out;
    for (int k = 0; k < sc_->ctx->fields[fi].components; ++k)
      out.push_back(sc_->ctx->var_code(fi, k));
    return out;
  }

  /* ---- expressions: operator algebra over the scenario context ---- */

  TotalDiffOperator op_scalar(const Poly& p) {
    TotalDiffOperator a(ctx(), 1, 1);
    a.add(0, 0, midx_zero(ctx().dim()), p);
    return a;
  }

  Poly want_scalar(const TotalDiffOperator& v, const Token& t,
                   const std::string& what) {
    if (v.rows != 1 || v.cols != 1) fail(t, what + " must be scalar");
    for (auto& [key, p] : v.ent)
      if (midx_order(std::get<2>(key)) > 0)
        fail(t, what +
                    " must reduce to a differential function; a total "
                    "derivative factor is left unapplied");
    return v.entry(0, 0, midx_zero(ctx().dim()));
  }

  TotalDiffOperator op_pow(TotalDiffOperator v, long k, const Token& t) {
    if (k < 0) fail(t, "negative powers are not defined");
    if (v.rows != v.cols) fail(t, "only square operators can be raised");
    TotalDiffOperator out = TotalDiffOperator::identity(ctx(), v.rows);
    for (long i = 0; i < k; ++i) out = out.compose(v);
    return out;
  }

  TotalDiffOperator maybe_pow(TotalDiffOperator v) {
    if (!is_punct(peek(), '^')) return v;
    Token t = next();
    long k = expect_int("an integer exponent");
    return op_pow(v, k, t);
  }

  TotalDiffOperator parse_expr() {
    Token lead = peek();
    bool neg = false;
    if (is_punct(lead, '-')) {
      next();
      neg = true;
    }
    TotalDiffOperator v = parse_term();
    if (neg) v = v.scale(-1);
    for (;;) {
      if (is_punct(peek(), '+') || is_punct(peek(), '-')) {
        Token t = next();
        TotalDiffOperator rhs = parse_term();
        if (rhs.rows != v.rows || rhs.cols != v.cols)
          fail(t, "operands of '" + t.text + "' have different shapes");
        v = t.text[0] == '+' ? v + rhs : v - rhs;
      } else {
        break;
      }
    }
    return v;
  }

  TotalDiffOperator parse_term() {
    TotalDiffOperator v = parse_factor();
    while (is_punct(peek(), '*')) {
      Token t = next();
      TotalDiffOperator rhs = parse_factor();
      if (v.cols != rhs.rows) fail(t, "operator shapes do not compose");
      v = v.compose(rhs);
    }
    return v;
  }

  TotalDiffOperator parse_factor() {
    const Token& t = peek();
    if (t.type == Token::Int) {
      Token num = next();
      Rat r(std::stol(num.text));
      if (is_punct(peek(), '/')) {
        next();
        long den = expect_int("a denominator");
        if (den == 0) fail(num, "zero denominator");
        r /= den;
      }
      return maybe_pow(op_scalar(Poly::constant(ctx(), r)));
    }
    if (is_punct(t, '(')) {
      next();
      TotalDiffOperator v = parse_expr();
      expect_punct(')', "to close the group");
      return maybe_pow(v);
    }
    if (t.type == Token::Ident) return ident_factor();
    fail(t, "expected an expression factor");
  }

  /* applies a 1x1 operator head to a parenthesized scalar argument */
  TotalDiffOperator apply_head(const TotalDiffOperator& head, const Token& t) {
    next(); /* '(' */
    TotalDiffOperator arg = parse_expr();
    expect_punct(')', "to close the argument");
    if (head.rows != 1 || head.cols != 1)
      fail(t, "only scalar operators can be applied");
    Poly s = want_scalar(arg, t, "the operator argument");
    return op_scalar(head.apply_scalar(s));
  }

  struct JetHit {
    int code = -1;
    Midx sigma;
  };

  /* name or name_letters -> jet variable of a declared component */
  bool resolve_jet(const Token& t, const std::string& name, JetHit& hit,
                   bool strict) {
    const Context& c = ctx();
    std::string head = name;
    std::string letters;
    auto us = name.find('_');
    if (us != std::string::npos) {
      head = name.substr(0, us);
      for (size_t i = us; i < name.size(); ++i)
        if (name[i] != '_') letters += name[i];
    }
    int code = c.code_by_name(head);
    if (code < 0) {
      if (strict) fail(t, "undeclared symbol '" + head + "'");
      return false;
    }
    Midx sigma = midx_zero(c.dim());
    for (char ch : letters) {
      int dir = c.base_index(std::string(1, ch));
      if (dir < 0)
        fail(t, std::string("unknown base direction '") + ch + "' in '" +
                    name + "'");
      ++sigma[dir];
    }
    hit.code = code;
    hit.sigma = sigma;
    return true;
  }

  Poly exp_factor(const Token& t) {
    next(); /* '(' */
    TotalDiffOperator arg = parse_expr();
    expect_punct(')', "to close the exponent");
    Poly p = want_scalar(arg, t, "the exponent");
    std::map<int, long> lin;
    for (auto& [m, coef] : p.terms()) {
      bool shape = m.xpow.empty() && m.odd.empty() && m.expo.empty() &&
                   m.func.empty() && m.even.size() == 1 &&
                   m.even[0].second == 1 &&
                   midx_order(m.even[0].first.sigma) == 0;
      if (!shape || coef.get_den() != 1)
        fail(t,
             "the exponent must be an integer combination of order-0 even "
             "components");
      if (!coef.get_num().fits_slong_p()) fail(t, "exponent coefficient overflow");
      lin[m.even[0].first.code] += coef.get_num().get_si();
    }
    std::vector<std::pair<int, long>> v;
    for (auto& [code, k] : lin)
      if (k != 0) v.push_back({code, k});
    if (v.empty()) fail(t, "the exponent must be nonzero");
    return Poly::expf(ctx(), v);
  }

  Poly func_factor(const Token& t, int primes) {
    next(); /* '(' */
    TotalDiffOperator arg = parse_expr();
    expect_punct(')', "to close the argument");
    Poly p = want_scalar(arg, t, "the function argument");
    if (p.size() == 1) {
      auto& [m, coef] = *p.terms().begin();
      if (coef == 1 && m.xpow.empty() && m.odd.empty() && m.expo.empty() &&
          m.func.empty() && m.even.size() == 1 && m.even[0].second == 1 &&
          midx_order(m.even[0].first.sigma) == 0)
        return Poly::func(ctx(), m.even[0].first.code, primes);
    }
    fail(t, "formal functions take a single order-0 even component");
  }

  TotalDiffOperator ident_factor() {
    Token t = next();
    std::string name = t.text;
    int primes = 0;
    while (!name.empty() && name.back() == '\'') {
      name.pop_back();
      ++primes;
    }

    if (name == "exp" && primes == 0) {
      if (!is_punct(peek(), '(')) fail(t, "exp takes a parenthesized argument");
      return maybe_pow(op_scalar(exp_factor(t)));
    }
    if (name == "f") {
      if (!is_punct(peek(), '('))
        fail(t, "the formal function f takes a parenthesized argument");
      return maybe_pow(op_scalar(func_factor(t, primes)));
    }
    if (primes > 0) fail(t, "primes are reserved for the formal function f");

    JetHit hit;
    if (resolve_jet(t, name, hit, false)) {
      if (is_punct(peek(), '('))
        fail(t, "'" + name + "' is not an operator and cannot be applied");
      return maybe_pow(op_scalar(Poly::var(ctx(), hit.code, hit.sigma)));
    }
    if (name.find('_') == std::string::npos) {
      int bi = ctx().base_index(name);
      if (bi >= 0) {
        if (is_punct(peek(), '('))
          fail(t, "'" + name + "' is a coordinate and cannot be applied");
        return maybe_pow(op_scalar(Poly::xvar(ctx(), bi)));
      }
      if (name.size() == 2 && name[0] == 'D' &&
          ctx().base_index(name.substr(1)) >= 0) {
        Midx tau = midx_zero(ctx().dim());
        ++tau[ctx().base_index(name.substr(1))];
        TotalDiffOperator v = TotalDiffOperator::dpow(ctx(), tau);
        v = maybe_pow(v);
        if (is_punct(peek(), '(')) return maybe_pow(apply_head(v, t));
        return v;
      }
      auto oit = sc_->ops.find(name);
      if (oit != sc_->ops.end()) {
        if (is_punct(peek(), '('))
          return maybe_pow(apply_head(oit->second, t));
        return maybe_pow(oit->second);
      }
      auto dit = sc_->densities.find(name);
      if (dit != sc_->densities.end()) {
        if (is_punct(peek(), '('))
          fail(t, "'" + name + "' is a density and cannot be applied");
        return maybe_pow(op_scalar(dit->second));
      }
    }
    fail(t, "undeclared symbol '" + name + "'");
  }

  /* ---- statements ---- */

  void statement() {
    Token kw = expect_ident("a statement keyword");
    if (kw.text == "base") return base_stmt();
    if (kw.text == "field") return field_stmt();
    if (kw.text == "op") return op_stmt();
    if (kw.text == "density") return density_stmt();
    if (kw.text == "equation") return equation_stmt();
    if (kw.text == "collection") return collection_stmt();
    if (kw.text == "task") return task_stmt(kw);
    fail(kw, "unknown statement '" + kw.text + "'");
  }

  void base_stmt() {
    if (saw_field_)
      fail(peek(), "base coordinates must be declared before fields");
    for (;;) {
      Token n = expect_ident("a coordinate name");
      if (n.text.size() != 1 || !std::isalpha((unsigned char)n.text[0]))
        fail(n, "coordinate names are single letters");
      check_free_name(n, n.text);
      ctx().add_base(n.text);
      if (!eat_punct(',')) break;
    }
    expect_punct(';', "after the coordinate list");
  }

  Rat parse_srat() {
    bool neg = eat_punct('-');
    long num = expect_int("a number");
    Rat r(num);
    if (eat_punct('/')) {
      long den = expect_int("a denominator");
      if (den == 0) fail(peek(), "zero denominator");
      r /= den;
    }
    return neg ? Rat(-r) : r;
  }

  void field_stmt() {
    Token n = expect_ident("a field name");
    check_free_name(n, n.text);
    int comps = 1;
    if (peek_keyword("components")) {
      next();
      comps = (int)expect_int("a component count");
      if (comps < 1) fail(n, "component count must be positive");
    }
    Token par = expect_ident("'even' or 'odd'");
    if (par.text != "even" && par.text != "odd")
      fail(par, "expected 'even' or 'odd'");
    std::optional<Rat> w;
    if (peek_keyword("weight")) {
      next();
      w = parse_srat();
    }
    expect_punct(';', "after the field declaration");
    if (comps > 1)
      for (int k = 1; k <= comps; ++k) {
        std::string cn = n.text + std::to_string(k);
        if (name_taken(cn))
          fail(n, "component name '" + cn + "' is already declared");
      }
    if (ctx().dim() == 0)
      fail(n, "declare base coordinates before any field");
    ctx().add_field(n.text, comps, par.text == "odd", w);
    saw_field_ = true;
  }

  void op_stmt() {
    Token n = expect_ident("an operator name");
    expect_punct('=', "after the operator name");
    TotalDiffOperator v;
    if (is_punct(peek(), '['))
      v = matrix_literal();
    else
      v = parse_expr();
    expect_punct(';', "after the operator definition");
    check_free_name(n, n.text);
    sc_->ops.emplace(n.text, v);
  }

  TotalDiffOperator matrix_literal() {
    Token open = next(); /* '[' */
    std::vector<std::vector<TotalDiffOperator>> cells;
    for (;;) {
      expect_punct('[', "to open a row");
      std::vector<TotalDiffOperator> row;
      for (;;) {
        Token at = peek();
        TotalDiffOperator e = parse_expr();
        if (e.rows != 1 || e.cols != 1)
          fail(at, "matrix entries must be scalar operators");
        row.push_back(e);
        if (!eat_punct(',')) break;
      }
      expect_punct(']', "to close the row");
      if (!cells.empty() && cells[0].size() != row.size())
        fail(open, "matrix rows have different lengths");
      cells.push_back(row);
      if (!eat_punct(',')) break;
    }
    expect_punct(']', "to close the matrix");
    TotalDiffOperator m(ctx(), (int)cells.size(), (int)cells[0].size());
    for (int r = 0; r < m.rows; ++r)
      for (int c = 0; c < m.cols; ++c)
        for (auto& [key, p] : cells[r][c].ent)
          m.add(r, c, std::get<2>(key), p);
    return m;
  }

  void density_stmt() {
    Token n = expect_ident("a density name");
    expect_punct('=', "after the density name");
    TotalDiffOperator v = parse_expr();
    expect_punct(';', "after the density definition");
    check_free_name(n, n.text);
    sc_->densities.emplace(n.text, want_scalar(v, n, "a density"));
  }

  void equation_stmt() {
    Token n = expect_ident("an equation name");
    if (eat_punct('=')) {
      expect_keyword("euler");
      Token sn = expect_ident("an action density name");
      auto dit = sc_->densities.find(sn.text);
      if (dit == sc_->densities.end())
        fail(sn, "undeclared density '" + sn.text + "'");
      if (dit->second.parity() == 1 || dit->second.parity() == 2)
        fail(sn, "the action density must be even");
      expect_keyword("on");
      Token fn = expect_ident("a field name");
      int fi = want_field(fn, fn.text);
      expect_punct(';', "after the equation definition");
      check_free_name(n, n.text);
      Scenario::Equation eq;
      eq.kind = Scenario::Equation::EulerTuple;
      eq.qcodes = field_codes(fi);
      eq.F = EquationSystem::of_action(dit->second, eq.qcodes).F;
      sc_->equations.emplace(n.text, std::move(eq));
      return;
    }
    expect_punct(':', "after the equation name");
    Token lhs = expect_ident("a jet variable on the left-hand side");
    JetHit hit;
    resolve_jet(lhs, lhs.text, hit, true);
    if (ctx().code_odd(hit.code)) fail(lhs, "the unknown must be even");
    expect_punct('=', "between the sides");
    Token at = peek();
    TotalDiffOperator rhsOp = parse_expr();
    expect_punct(';', "after the equation");
    Poly rhs = want_scalar(rhsOp, at, "the right-hand side");
    check_free_name(n, n.text);
    std::vector<int> dirs;
    for (int i = 0; i < (int)hit.sigma.size(); ++i)
      for (int k = 0; k < hit.sigma[i]; ++k) dirs.push_back(i);
    Scenario::Equation eq;
    eq.kind = Scenario::Equation::NormalForm;
    try {
      if (dirs.size() == 1) {
        eq.normal =
            EquationNormalForm::evolution(ctx(), hit.code, dirs[0], rhs);
      } else if (dirs.size() == 2 && dirs[0] != dirs[1]) {
        eq.normal = EquationNormalForm::hyperbolic(ctx(), hit.code, dirs[0],
                                                   dirs[1], rhs);
      } else {
        fail(lhs,
             "the left-hand side must be a first derivative or a mixed "
             "second derivative");
      }
    } catch (const std::invalid_argument& e) {
      fail(at, e.what());
    }
    sc_->equations.emplace(n.text, std::move(eq));
  }

  void collection_stmt() {
    Token n = expect_ident("a collection name");
    expect_punct('=', "after the collection name");
    expect_keyword("ops");
    std::vector<std::string> opn;
    for (;;) {
      Token o = expect_ident("an operator name");
      if (!sc_->ops.count(o.text))
        fail(o, "undeclared operator '" + o.text + "'");
      opn.push_back(o.text);
      if (!eat_punct(',')) break;
    }
    expect_keyword("on");
    Token tf = expect_ident("a target field name");
    int tfi = want_field(tf, tf.text);
    expect_keyword("ghost");
    std::vector<int> ghostFields;
    for (;;) {
      Token g = expect_ident("a ghost field name");
      ghostFields.push_back(want_field(g, g.text));
      if (ctx().fields[ghostFields.back()].odd ==
          ctx().fields[tfi].odd)
        fail(g, "ghost parity must be opposite to the target parity");
      if (ctx().fields[ghostFields.back()].components != 1)
        fail(g, "ghost fields have one component");
      if (!eat_punct(',')) break;
    }
    expect_keyword("args");
    Token a1 = expect_ident("a section argument field");
    expect_punct(',', "between the argument fields");
    Token a2 = expect_ident("a section argument field");
    int f1 = want_field(a1, a1.text), f2 = want_field(a2, a2.text);
    for (auto [tok, fi] : {std::pair<Token, int>{a1, f1}, {a2, f2}}) {
      if (ctx().fields[fi].odd) fail(tok, "argument fields must be even");
      if (ctx().fields[fi].components != 1)
        fail(tok, "argument fields have one component");
    }
    if (f1 == f2) fail(a2, "the two argument fields must be distinct");

    Scenario::Collection col;
    col.C.ctx = sc_->ctx.get();
    col.C.target = field_codes(tfi);
    for (size_t i = 0; i < opn.size(); ++i) {
      const TotalDiffOperator& A = sc_->ops.at(opn[i]);
      if (A.rows != (int)col.C.target.size())
        fail(n, "operator '" + opn[i] + "' does not act on the target field");
      if (A.cols != 1)
        fail(n, "collections take single-column operators");
      col.C.ops.push_back(A);
    }
    if (ghostFields.size() != opn.size())
      fail(n, "one ghost field per operator is required");
    for (int gf : ghostFields) col.ghosts.push_back(field_codes(gf));
    col.args = {ctx().var_code(f1, 0), ctx().var_code(f2, 0)};

    if (peek_keyword("antifields")) {
      next();
      Token q = expect_ident("an antifield name");
      int qfi = want_field(q, q.text);
      if (ctx().fields[qfi].components != (int)col.C.target.size())
        fail(q, "antifield components must match the target field");
      if (ctx().fields[qfi].odd == ctx().fields[tfi].odd)
        fail(q, "antifield parity must be opposite to the target parity");
      col.antifields = field_codes(qfi);
      for (size_t i = 0; i < opn.size(); ++i) {
        expect_punct(',', "between the antifield names");
        Token g = expect_ident("an antighost name");
        int gfi = want_field(g, g.text);
        if (ctx().fields[gfi].components != 1)
          fail(g, "antighost fields have one component");
        if (ctx().fields[gfi].odd == ctx().fields[ghostFields[i]].odd)
          fail(g, "antighost parity must be opposite to the ghost parity");
        col.ghost_antifields.push_back(field_codes(gfi));
      }
      col.has_antifields = true;
    }
    expect_punct(';', "after the collection");
    check_free_name(n, n.text);
    sc_->collections.emplace(n.text, std::move(col));
  }

  /* ---- tasks ---- */

  const Scenario::Collection& want_collection(const Token& t,
                                              const std::string& n) {
    auto it = sc_->collections.find(n);
    if (it == sc_->collections.end())
      fail(t, "undeclared collection '" + n + "'");
    return it->second;
  }
  const Scenario::Equation& want_equation(const Token& t,
                                          const std::string& n) {
    auto it = sc_->equations.find(n);
    if (it == sc_->equations.end()) fail(t, "undeclared equation '" + n + "'");
    return it->second;
  }
  const TotalDiffOperator& want_op(const Token& t, const std::string& n) {
    auto it = sc_->ops.find(n);
    if (it == sc_->ops.end()) fail(t, "undeclared operator '" + n + "'");
    return it->second;
  }
  const Poly& want_density(const Token& t, const std::string& n) {
    auto it = sc_->densities.find(n);
    if (it == sc_->densities.end()) fail(t, "undeclared density '" + n + "'");
    return it->second;
  }

  void task_stmt(const Token& kw) {
    Token kt = expect_ident("a task kind");
    Scenario::Task T;
    T.kind = join_hyphens(kt);
    T.line = kt.line;
    T.col = kt.col;

    if (T.kind == "check-hamiltonian") {
      Token a = expect_ident("an operator name");
      const TotalDiffOperator& A = want_op(a, a.text);
      expect_keyword("on");
      Token fb = expect_ident("a field name");
      int fi = want_field(fb, fb.text);
      expect_keyword("ghost");
      Token fg = expect_ident("a ghost field name");
      int gi = want_field(fg, fg.text);
      if (ctx().fields[gi].odd == ctx().fields[fi].odd)
        fail(fg, "ghost parity must be opposite to the field parity");
      int nq = ctx().fields[fi].components;
      if (A.rows != nq || A.cols != nq ||
          ctx().fields[gi].components != nq)
        fail(a, "operator and field shapes do not match");
      T.a = a.text;
      T.b = fb.text;
      T.c = fg.text;
      T.heading = "check-hamiltonian " + T.a;
    } else if (T.kind == "extract-christoffel") {
      Token a = expect_ident("a collection name");
      want_collection(a, a.text);
      T.a = a.text;
      if (peek_keyword("order")) {
        next();
        T.order = (int)expect_int("an order bound");
      }
      colbind_[T.a].gamma = true;
      T.heading = "extract-christoffel " + T.a;
    } else if (T.kind == "build-q") {
      Token a = expect_ident("a collection name");
      want_collection(a, a.text);
      if (!colbind_[a.text].gamma)
        fail(a, "extract-christoffel must run before build-q for '" + a.text +
                    "'");
      colbind_[a.text].q = true;
      T.a = a.text;
      T.heading = "build-q " + T.a;
    } else if (T.kind == "verify-q2") {
      Token a = expect_ident("a collection name");
      want_collection(a, a.text);
      if (!colbind_[a.text].q)
        fail(a, "build-q must run before verify-q2 for '" + a.text + "'");
      T.a = a.text;
      T.heading = "verify-q2 " + T.a;
    } else if (T.kind == "schouten") {
      Token a = expect_ident("a collection or density name");
      if (sc_->collections.count(a.text)) {
        const auto& col = sc_->collections.at(a.text);
        if (col.C.size() != 1 || col.C.target.size() != 1)
          fail(a, "the charge form takes a single scalar operator");
        if (!colbind_[a.text].q)
          fail(a, "build-q must run before schouten for '" + a.text + "'");
        T.a = a.text;
        T.heading = "schouten " + T.a;
      } else {
        const Poly& d1 = want_density(a, a.text);
        Token b = expect_ident("a density name");
        const Poly& d2 = want_density(b, b.text);
        if (d1.parity() == 2 || d2.parity() == 2)
          fail(a, "densities must have definite parity");
        expect_keyword("on");
        expect_punct('(', "before the conjugate pair");
        Token fu = expect_ident("the even coordinate field");
        int ui = want_field(fu, fu.text);
        expect_punct(',', "between the pair fields");
        Token fb = expect_ident("the odd conjugate field");
        int bi = want_field(fb, fb.text);
        expect_punct(')', "after the conjugate pair");
        if (ctx().fields[ui].odd || !ctx().fields[bi].odd)
          fail(fu, "the pair lists the even coordinate then its odd partner");
        if (ctx().fields[ui].components != 1 ||
            ctx().fields[bi].components != 1)
          fail(fu, "pair fields have one component");
        T.a = a.text;
        T.b = b.text;
        T.c = fu.text;
        T.d = fb.text;
        if (peek_keyword("matches")) {
          next();
          Token at = peek();
          T.expr = want_scalar(parse_expr(), at, "the declared value");
          T.has_expr = true;
          if (peek_keyword("mod")) {
            Token m = next();
            if (join_hyphens(m) != "mod-div") fail(m, "expected 'mod-div'");
            T.mod_div = true;
          }
        }
        T.heading = "schouten " + T.a + " " + T.b;
      }
    } else if (T.kind == "noether") {
      Token a = expect_ident("an operator name");
      const TotalDiffOperator& N = want_op(a, a.text);
      expect_keyword("on");
      Token e = expect_ident("an equation name");
      const auto& eq = want_equation(e, e.text);
      if (eq.kind != Scenario::Equation::EulerTuple)
        fail(e, "noether takes an Euler-Lagrange equation tuple");
      if (N.cols != (int)eq.F.size())
        fail(a, "the identity operator does not match the equation tuple");
      T.a = a.text;
      T.b = e.text;
      T.heading = "noether " + T.a + " on " + T.b;
      if (peek_keyword("generator")) {
        next();
        Token g = expect_ident("a generator operator name");
        want_op(g, g.text);
        T.c = g.text;
        T.heading += " generator " + T.c;
      }
    } else if (T.kind == "brst") {
      Token a = expect_ident("a collection name");
      const auto& col = want_collection(a, a.text);
      if (!col.has_antifields)
        fail(a, "brst needs a collection with antifields");
      if (!colbind_[a.text].gamma)
        fail(a, "extract-christoffel must run before brst for '" + a.text +
                    "'");
      expect_keyword("on");
      Token e = expect_ident("an equation name");
      const auto& eq = want_equation(e, e.text);
      if (eq.kind != Scenario::Equation::EulerTuple)
        fail(e, "brst takes an Euler-Lagrange equation tuple");
      if (eq.qcodes != col.C.target)
        fail(e, "the equation tuple does not match the collection target");
      T.a = a.text;
      T.b = e.text;
      T.heading = "brst " + T.a + " on " + T.b;
    } else if (T.kind == "bv-master") {
      Token a = expect_ident("a collection name");
      const auto& col = want_collection(a, a.text);
      if (!col.has_antifields)
        fail(a, "bv-master needs a collection with antifields");
      if (!colbind_[a.text].gamma)
        fail(a, "extract-christoffel must run before bv-master for '" +
                    a.text + "'");
      expect_keyword("action");
      Token s = expect_ident("an action density name");
      const Poly& S = want_density(s, s.text);
      if (S.parity() == 1 || S.parity() == 2)
        fail(s, "the action density must be even");
      T.a = a.text;
      T.b = s.text;
      T.heading = "bv-master " + T.a + " action " + T.b;
    } else if (T.kind == "search") {
      bool haveW = false;
      while (!is_punct(peek(), ';') && peek().type != Token::End) {
        Token o = expect_ident("a search option");
        std::string opt = join_hyphens(o);
        if (opt == "weight" || opt == "max-weight") {
          T.weight = (int)expect_int("a weight");
          T.up_to = (opt == "max-weight");
          haveW = true;
        } else if (opt == "order") {
          T.order = (int)expect_int("an order bound");
        } else if (opt == "formal-f") {
          T.formal = true;
        } else if (opt == "families") {
          T.families = true;
        } else {
          fail(o, "unknown search option '" + opt + "'");
        }
      }
      if (!haveW || T.weight < 1) fail(kt, "search needs a weight >= 1");
      T.heading = "search " + std::string(T.up_to ? "max-weight " : "weight ") +
                  std::to_string(T.weight);
      if (T.order >= 0) T.heading += " order " + std::to_string(T.order);
      if (T.formal) T.heading += " formal-f";
      if (T.families) T.heading += " families";
    } else if (T.kind == "on-shell") {
      Token at = peek();
      T.expr = want_scalar(parse_expr(), at, "the reduced expression");
      T.has_expr = true;
      expect_keyword("under");
      Token e = expect_ident("an equation name");
      const auto& eq = want_equation(e, e.text);
      if (eq.kind != Scenario::Equation::NormalForm)
        fail(e, "on-shell takes an equation in normal form");
      T.b = e.text;
      T.heading = "on-shell " + render(T.expr) + " under " + T.b;
    } else {
      fail(kt, "unknown task '" + T.kind + "'");
    }
    expect_punct(';', "after the task");
    (void)kw;
    sc_->tasks.push_back(std::move(T));
  }
};

/* ---- execution ---- */

std::string yn(bool b) { return b ? "yes" : "no"; }

std::vector<int> codes_of(const Context& c, const std::string& fieldName) {
  int fi = c.field_index(fieldName);
  std::vector<int> out;
  for (int k = 0; k < c.fields[fi].components; ++k)
    out.push_back(c.var_code(fi, k));
  return out;
}

struct ColState {
  std::map<std::pair<int, int>, std::vector<BiDiffSymbol>> gamma;
  bool has_gamma = false;
  EvolutionaryField Q;
  bool has_q = false;
};

using Objects = std::vector<std::pair<std::string, std::string>>;

void run_check_hamiltonian(const Scenario& sc, const Scenario::Task& t,
                           TaskResult& r) {
  const Context& c = *sc.ctx;
  const TotalDiffOperator& A = sc.ops.at(t.a);
  auto q = codes_of(c, t.b), b = codes_of(c, t.c);
  auto chk = is_hamiltonian(A, q, b);
  r.objects.push_back({"adjoint", render(A.adjoint())});
  r.objects.push_back({"skew-adjoint", yn(chk.skew)});
  r.objects.push_back({"charge", render(w_charge(A, b))});
  r.objects.push_back({"charge self-bracket closes", yn(chk.jacobi)});
  if (!chk.jacobi)
    r.objects.push_back({"self-bracket", render(chk.self_bracket)});
  r.status = chk.passed() ? "pass" : "fail";
}

void run_extract_christoffel(const Scenario& sc, const Scenario::Task& t,
                             const RunFlags& flags, ColState& st,
                             TaskResult& r) {
  const auto& col = sc.collections.at(t.a);
  const Context& c = *sc.ctx;
  int bound = t.order >= 0 ? t.order : flags.order_bound;
  std::string an1 = c.code_name(col.args[0]);
  std::string an2 = c.code_name(col.args[1]);
  bool all = true;
  int ob = -1;
  for (int i = 0; i < col.C.size(); ++i)
    for (int j = i; j < col.C.size(); ++j) {
      auto R = christoffel_extract(col.C, i, j, {col.args[0]}, {col.args[1]},
                                   bound);
      ob = std::max(ob, R.order_bound);
      std::string tag = col.C.size() > 1 ? "[" + std::to_string(i + 1) + "," +
                                               std::to_string(j + 1) + "]"
                                         : "";
      if (!R.decided) {
        all = false;
        for (size_t k = 0; k < R.residual.size(); ++k)
          if (!R.residual[k].is_zero())
            r.objects.push_back({"unresolved residual" + tag,
                                 render(R.residual[k])});
        continue;
      }
      st.gamma[{i, j}] = R.gamma;
      for (size_t k = 0; k < R.gamma.size(); ++k) {
        std::string key = "gamma" + tag;
        if (R.gamma.size() > 1) key += "[" + std::to_string(k + 1) + "]";
        key += "(" + an1 + ", " + an2 + ")";
        Poly val = R.gamma[k].to_polys({col.args[0]}, {col.args[1]})[0];
        r.objects.push_back({key, render(val)});
      }
    }
  st.has_gamma = all;
  r.order_bound = ob;
  r.status = all ? "pass" : "inconclusive";
}

void run_build_q(const Scenario& sc, const Scenario::Task& t, ColState& st,
                 TaskResult& r) {
  const auto& col = sc.collections.at(t.a);
  const Context& c = *sc.ctx;
  if (!st.has_gamma) {
    r.objects.push_back({"note", "christoffel symbols unavailable"});
    r.status = "inconclusive";
    return;
  }
  st.Q = build_homological_field(col.C, col.ghosts, st.gamma);
  st.has_q = true;
  auto show = [&](int code) {
    r.objects.push_back(
        {"Q(" + c.code_name(code) + ")", render(st.Q.section(code))});
  };
  for (int code : col.C.target) show(code);
  for (auto& g : col.ghosts)
    for (int code : g) show(code);
  r.status = "pass";
}

void run_verify_q2(const Scenario& sc, const Scenario::Task& t,
                   const ColState& st, TaskResult& r) {
  const auto& col = sc.collections.at(t.a);
  const Context& c = *sc.ctx;
  if (!st.has_q) {
    r.objects.push_back({"note", "homological field unavailable"});
    r.status = "inconclusive";
    return;
  }
  auto chk = verify_homological(st.Q, col.C, col.ghosts);
  std::string how = chk.status == HomologicalCheck::Status::ExactZero
                        ? "exact zero"
                        : (chk.status == HomologicalCheck::Status::ZeroModKernel
                               ? "zero modulo the operator kernel"
                               : "nonzero");
  r.objects.push_back({"square", how});
  for (auto& [code, res] : chk.residuals)
    if (!res.is_zero())
      r.objects.push_back({"residual(" + c.code_name(code) + ")", render(res)});
  r.status = chk.passed() ? "pass" : "fail";
}

void run_schouten_charge(const Scenario& sc, const Scenario::Task& t,
                         const ColState& st, TaskResult& r) {
  const auto& col = sc.collections.at(t.a);
  if (!st.has_q) {
    r.objects.push_back({"note", "homological field unavailable"});
    r.status = "inconclusive";
    return;
  }
  int tgt = col.C.target[0];
  int gh = col.ghosts[0][0];
  Poly om = w_charge(col.C.ops[0], {gh});
  std::vector<ConjugatePair> pairs{{tgt, gh}};
  Poly sb = schouten(om, om, pairs);
  bool div = is_total_divergence(sb);
  EvolutionaryField X = field_of_charge(om, pairs);
  bool match = X.section(tgt) == st.Q.section(tgt) &&
               X.section(gh) == st.Q.section(gh);
  r.objects.push_back({"charge", render(om)});
  r.objects.push_back({"self-bracket is a total divergence", yn(div)});
  r.objects.push_back(
      {"field of the charge matches the homological field", yn(match)});
  r.status = (div && match) ? "pass" : "fail";
}

void run_schouten_pair(const Scenario& sc, const Scenario::Task& t,
                       TaskResult& r) {
  const Context& c = *sc.ctx;
  const Poly& d1 = sc.densities.at(t.a);
  const Poly& d2 = sc.densities.at(t.b);
  std::vector<ConjugatePair> pairs{
      {codes_of(c, t.c)[0], codes_of(c, t.d)[0]}};
  Poly br = schouten(d1, d2, pairs);
  int p1 = std::max(d1.parity(), 0), p2 = std::max(d2.parity(), 0);
  int s = ((p1 + 1) * (p2 + 1)) % 2;
  Poly anti = br + schouten(d2, d1, pairs).scale(s == 0 ? 1 : -1);
  bool asym = is_total_divergence(anti);
  r.objects.push_back({"bracket", render(br)});
  r.objects.push_back({"graded antisymmetry modulo divergences", yn(asym)});
  bool ok = asym;
  if (t.has_expr) {
    bool m = t.mod_div ? cohomology_equal(br, t.expr) : br == t.expr;
    r.objects.push_back({t.mod_div ? "matches the declared class"
                                   : "matches the declared value",
                         yn(m)});
    ok = ok && m;
  }
  r.status = ok ? "pass" : "fail";
}

void run_noether(const Scenario& sc, const Scenario::Task& t, TaskResult& r) {
  const TotalDiffOperator& N = sc.ops.at(t.a);
  const auto& eq = sc.equations.at(t.b);
  auto chk = noether_check(N, eq.F);
  r.objects.push_back({"identity holds off-shell", yn(chk.exact_zero)});
  for (size_t k = 0; k < chk.residual.size(); ++k)
    if (!chk.residual[k].is_zero())
      r.objects.push_back(
          {"residual[" + std::to_string(k + 1) + "]", render(chk.residual[k])});
  bool ok = chk.exact_zero;
  if (!t.c.empty()) {
    TotalDiffOperator gen = generator_from_relation(N);
    bool m = gen == sc.ops.at(t.c);
    auto lin = linear_noether_relation(sc.ops.at(t.c), eq.F);
    r.objects.push_back({"generator", render(gen)});
    r.objects.push_back({"matches the declared generator", yn(m)});
    r.objects.push_back(
        {"declared generator carries the identity", yn(lin.exact_zero)});
    ok = ok && m && lin.exact_zero;
  }
  r.status = ok ? "pass" : "fail";
}

void run_brst(const Scenario& sc, const Scenario::Task& t, const ColState& st,
              TaskResult& r) {
  const auto& col = sc.collections.at(t.a);
  const auto& eq = sc.equations.at(t.b);
  const Context& c = *sc.ctx;
  if (!st.has_gamma) {
    r.objects.push_back({"note", "christoffel symbols unavailable"});
    r.status = "inconclusive";
    return;
  }
  BVSpace bv{col.C.target, col.antifields, col.ghosts, col.ghost_antifields};
  EvolutionaryField d = koszul_tate(col.C, bv, eq.F);
  EvolutionaryField Qt = brst_lift(col.C, bv, st.gamma);
  EvolutionaryField D(c, true);
  std::vector<int> all = col.C.target;
  for (auto& g : col.ghosts) all.insert(all.end(), g.begin(), g.end());
  all.insert(all.end(), col.antifields.begin(), col.antifields.end());
  for (auto& g : col.ghost_antifields)
    all.insert(all.end(), g.begin(), g.end());
  for (int code : all)
    D.set_section(code, d.section(code) + Qt.section(code));
  for (int code : all)
    r.objects.push_back(
        {"D(" + c.code_name(code) + ")", render(D.section(code))});
  bool ok = true;
  for (auto& [code, res] : square_residuals(D, all))
    if (!res.is_zero()) {
      ok = false;
      r.objects.push_back(
          {"square residual(" + c.code_name(code) + ")", render(res)});
    }
  r.objects.push_back({"squares to zero", yn(ok)});
  r.status = ok ? "pass" : "fail";
}

void run_bv_master(const Scenario& sc, const Scenario::Task& t,
                   const ColState& st, TaskResult& r) {
  const auto& col = sc.collections.at(t.a);
  if (!st.has_gamma) {
    r.objects.push_back({"note", "christoffel symbols unavailable"});
    r.status = "inconclusive";
    return;
  }
  BVSpace bv{col.C.target, col.antifields, col.ghosts, col.ghost_antifields};
  Poly SBV = bv_action(sc.densities.at(t.b), col.C, bv, st.gamma);
  auto master = bv_master_check(SBV, bv.pairs());
  r.objects.push_back({"extended action", render(SBV)});
  r.objects.push_back(
      {"master equation holds without correction", yn(master.ok_initial)});
  r.objects.push_back({"correction", render(master.correction)});
  r.objects.push_back({"master equation holds", yn(master.ok)});
  if (!master.ok)
    r.objects.push_back({"self-bracket", render(master.self_bracket)});
  r.status = master.ok ? "pass" : "fail";
}

void run_search(const Scenario::Task& t, TaskResult& r) {
  std::vector<WeightReport> reps;
  if (t.up_to) {
    reps = search_up_to(t.weight, t.formal, t.order);
  } else {
    AnsatzSpec spec;
    spec.weight = t.weight;
    spec.max_order = t.order;
    spec.formal = t.formal;
    reps = {search_weight(spec)};
  }
  int entries = 0, suppressed = 0;
  bool conclusive = true;
  for (auto& w : reps) {
    entries += (int)w.entries.size();
    suppressed += w.suppressed;
    if (!w.notes.empty()) conclusive = false;
    for (auto& e : w.entries)
      if (e.status != "verified") conclusive = false;
  }
  r.objects.push_back({"entries", std::to_string(entries)});
  r.objects.push_back(
      {"suppressed trivial instances", std::to_string(suppressed)});
  r.block = render_search_report(reps);
  bool famfail = false;
  if (t.families) {
    r.block += "function-coefficient families:\n";
    for (auto& f : verify_function_families()) {
      r.block += "  " + f.description + ": " +
                 std::string(f.pass ? "pass" : "fail") + "\n";
      if (!f.pass) famfail = true;
    }
  }
  r.status = famfail ? "fail" : (conclusive ? "pass" : "inconclusive");
}

void run_on_shell(const Scenario& sc, const Scenario::Task& t, TaskResult& r) {
  const auto& eq = sc.equations.at(t.b);
  Poly red = on_shell_reduce(t.expr, {eq.normal});
  r.objects.push_back({"reduced", render(red)});
  r.status = red.is_zero() ? "pass" : "fail";
}

}  // namespace

std::string format_diagnostics(const std::string& file,
                               const std::vector<Diagnostic>& diags) {
  std::ostringstream os;
  for (auto& d : diags)
    os << file << ":" << d.line << ":" << d.col << ": error: " << d.message
       << "\n";
  return os.str();
}

ParseResult parse_scenario(const std::string& source) {
  Parser p(source);
  return p.run();
}

int Report::exit_code() const {
  if (nfail > 0) return 1;
  if (ninconclusive > 0) return 2;
  return 0;
}

Report run_scenario(const Scenario& sc, const RunFlags& flags) {
  if (flags.jobs > 0) set_jobs(flags.jobs);
  Report rep;
  std::map<std::string, ColState> state;
  for (const auto& t : sc.tasks) {
    auto t0 = std::chrono::steady_clock::now();
    TaskResult r;
    r.kind = t.kind;
    r.heading = t.heading;
    r.status = "pass";
    if (t.kind == "check-hamiltonian") {
      run_check_hamiltonian(sc, t, r);
    } else if (t.kind == "extract-christoffel") {
      run_extract_christoffel(sc, t, flags, state[t.a], r);
    } else if (t.kind == "build-q") {
      run_build_q(sc, t, state[t.a], r);
    } else if (t.kind == "verify-q2") {
      run_verify_q2(sc, t, state[t.a], r);
    } else if (t.kind == "schouten") {
      if (sc.collections.count(t.a))
        run_schouten_charge(sc, t, state[t.a], r);
      else
        run_schouten_pair(sc, t, r);
    } else if (t.kind == "noether") {
      run_noether(sc, t, r);
    } else if (t.kind == "brst") {
      run_brst(sc, t, state[t.a], r);
    } else if (t.kind == "bv-master") {
      run_bv_master(sc, t, state[t.a], r);
    } else if (t.kind == "search") {
      run_search(t, r);
    } else if (t.kind == "on-shell") {
      run_on_shell(sc, t, r);
    }
    auto t1 = std::chrono::steady_clock::now();
    r.elapsed_ms = (long)std::chrono::duration_cast<std::chrono::milliseconds>(
                       t1 - t0)
                       .count();
    if (r.status == "pass")
      ++rep.npass;
    else if (r.status == "fail")
      ++rep.nfail;
    else
      ++rep.ninconclusive;
    rep.tasks.push_back(std::move(r));
  }
  return rep;
}

std::string render_text(const Report& r, bool timing) {
  std::ostringstream os;
  os << "scenario: " << r.scenario << "\n";
  int i = 1;
  for (auto& t : r.tasks) {
    os << "task " << i++ << ": " << t.heading << " [" << t.status << "]\n";
    if (t.order_bound >= 0) os << "  order bound: " << t.order_bound << "\n";
    for (auto& [k, v] : t.objects) os << "  " << k << ": " << v << "\n";
    if (!t.block.empty()) {
      std::istringstream in(t.block);
      std::string line;
      while (std::getline(in, line)) os << "  " << line << "\n";
    }
    if (timing) os << "  time: " << t.elapsed_ms << " ms\n";
  }
  os << "summary: " << r.npass << " pass, " << r.nfail << " fail, "
     << r.ninconclusive << " inconclusive\n";
  return os.str();
}

std::string render_tree(const Report& r, bool timing) {
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["tasks"] = nlohmann::ordered_json::array();
  for (auto& t : r.tasks) {
    nlohmann::ordered_json jt;
    jt["task"] = t.heading;
    jt["kind"] = t.kind;
    jt["status"] = t.status;
    if (t.order_bound >= 0) jt["order_bound"] = t.order_bound;
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (auto& [k, v] : t.objects) obj[k] = v;
    jt["objects"] = obj;
    if (!t.block.empty()) {
      nlohmann::ordered_json lines = nlohmann::ordered_json::array();
      std::istringstream in(t.block);
      std::string line;
      while (std::getline(in, line)) lines.push_back(line);
      jt["table"] = lines;
    }
    if (timing) jt["elapsed_ms"] = t.elapsed_ms;
    j["tasks"].push_back(jt);
  }
  j["summary"] = {{"pass", r.npass},
                  {"fail", r.nfail},
                  {"inconclusive", r.ninconclusive}};
  return j.dump(2) + "\n";
}

std::string render_search_tree(const std::vector<WeightReport>& reports) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (auto& w : reports) {
    nlohmann::ordered_json jw;
    jw["weight"] = w.weight;
    jw["entries"] = nlohmann::ordered_json::array();
    for (auto& e : w.entries) {
      nlohmann::ordered_json je;
      je["operator"] = e.rendered;
      je["order"] = e.order;
      je["parameters"] = e.nparams;
      je["symbol"] = e.gamma_rendered;
      je["status"] = e.status;
      jw["entries"].push_back(je);
    }
    jw["suppressed"] = w.suppressed;
    jw["notes"] = w.notes;
    j.push_back(jw);
  }
  return j.dump(2) + "\n";
}

}  // namespace varlie
