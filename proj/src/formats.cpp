#include "spop/formats.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "spop/error.hpp"

namespace spop {

namespace {

// ------------------------------------------------------------------- lexer

enum class Tok { ident, punct, arrow, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  std::size_t line = 1;
  std::size_t col = 1;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '.';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text, std::size_t line = 1) : text_(text), line_(line) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

  bool at(std::string_view punct) const { return tok_.kind != Tok::end && tok_.kind != Tok::ident && tok_.text == punct; }

  bool accept(std::string_view punct) {
    if (!at(punct)) return false;
    advance();
    return true;
  }

  Token expect(std::string_view punct) {
    if (!at(punct)) fail("expected '" + std::string(punct) + "'");
    return next();
  }

  Token expect_ident(std::string_view what = "identifier") {
    if (tok_.kind != Tok::ident) fail("expected " + std::string(what));
    return next();
  }

  std::size_t expect_number() {
    const Token t = expect_ident("number");
    if (!std::all_of(t.text.begin(), t.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw ParseError("expected a number, got '" + t.text + "'", t.line, t.col);
    if (t.text.size() > 9) throw ParseError("number too large", t.line, t.col);
    return std::stoul(t.text);
  }

  [[noreturn]] void fail(const std::string& message) const {
    const std::string got = tok_.kind == Tok::end ? "end of input" : "'" + tok_.text + "'";
    throw ParseError(message + ", got " + got, tok_.line, tok_.col);
  }

 private:
  void advance() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '\n') {
        ++pos_;
        ++line_;
        col_ = 1;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
        ++col_;
      } else {
        break;
      }
    }
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    if (ident_char(c)) {
      std::size_t end = pos_;
      while (end < text_.size() && ident_char(text_[end])) ++end;
      tok_.kind = Tok::ident;
      tok_.text = std::string(text_.substr(pos_, end - pos_));
      col_ += end - pos_;
      pos_ = end;
      return;
    }
    if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      tok_.kind = Tok::arrow;
      tok_.text = "->";
      pos_ += 2;
      col_ += 2;
      return;
    }
    if (std::string_view("(),;[]=~>^:").find(c) == std::string_view::npos)
      throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    tok_.kind = Tok::punct;
    tok_.text = std::string(1, c);
    ++pos_;
    ++col_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t col_ = 1;
  Token tok_;
};

// --------------------------------------------------------------- raw terms

struct Raw {
  std::string name;
  std::size_t line = 0;
  std::size_t col = 0;
  bool applied = false;
  std::vector<Raw> args;
  std::optional<std::size_t> split;
  // f^e(t): e is "n" or a number.
  std::optional<std::string> power;
};

Raw parse_raw(Lexer& lex) {
  const Token id = lex.expect_ident("symbol or variable");
  Raw r;
  r.name = id.text;
  r.line = id.line;
  r.col = id.col;
  if (lex.accept("^")) r.power = lex.expect_ident("exponent").text;
  if (!lex.accept("(")) {
    if (r.power) lex.fail("expected '(' after an exponent");
    return r;
  }
  r.applied = true;
  if (lex.accept(")")) return r;
  while (true) {
    if (lex.at(";")) {
      if (r.split) lex.fail("second ';' in an argument list");
      lex.next();
      r.split = r.args.size();
      if (lex.accept(")")) return r;
    }
    r.args.push_back(parse_raw(lex));
    if (lex.accept(")")) return r;
    if (lex.at(";")) continue;
    lex.expect(",");
  }
}

PositionMask prefix_mask(std::size_t k) { return k == 0 ? 0 : k >= 64 ? ~PositionMask{0} : (PositionMask{1} << k) - 1; }

struct SplitSite {
  PositionMask mask;
  std::size_t line;
  std::size_t col;
};

class TrsBuilder {
 public:
  Signature sig;
  std::set<std::string> vars;
  std::map<std::uint32_t, SplitSite> splits;

  Term build(const Raw& r) {
    if (r.power) throw ParseError("exponents are not allowed in rules", r.line, r.col);
    if (!r.applied && vars.count(r.name)) return Term::variable(sig.add_variable(r.name));
    if (r.applied && vars.count(r.name)) throw ParseError("variable '" + r.name + "' applied to arguments", r.line, r.col);
    std::vector<Term> args;
    for (const Raw& a : r.args) args.push_back(build(a));
    SymbolId f;
    try {
      f = sig.add_symbol(r.name, args.size());
    } catch (const Error& e) {
      throw ParseError(e.what(), r.line, r.col);
    }
    if (r.split) {
      const PositionMask m = prefix_mask(*r.split);
      auto [it, fresh] = splits.emplace(index_of(f), SplitSite{m, r.line, r.col});
      if (!fresh && it->second.mask != m)
        throw ParseError("split of '" + r.name + "' differs from the one at " + std::to_string(it->second.line) + ":" +
                             std::to_string(it->second.col),
                         r.line, r.col);
    }
    return Term::apply(f, std::move(args));
  }
};

void skip_block(Lexer& lex) {
  std::size_t depth = 1;
  while (depth > 0) {
    if (lex.peek().kind == Tok::end) lex.fail("unterminated block");
    const Token t = lex.next();
    if (t.kind == Tok::punct && t.text == "(") ++depth;
    if (t.kind == Tok::punct && t.text == ")") --depth;
  }
}

}  // namespace

// --------------------------------------------------------------------- TRS

Trs parse_trs(std::string_view text) {
  Lexer lex(text);
  TrsBuilder b;
  struct Site {
    std::size_t line, col;
  };
  std::vector<Rule> rules;
  std::vector<Site> sites;
  bool seen_rules = false;
  while (lex.peek().kind != Tok::end) {
    lex.expect("(");
    const Token kw = lex.expect_ident("VAR, RULES or COMMENT");
    if (kw.text == "VAR") {
      while (!lex.accept(")")) b.vars.insert(lex.expect_ident("variable name").text);
    } else if (kw.text == "RULES") {
      if (seen_rules) throw ParseError("second RULES block", kw.line, kw.col);
      seen_rules = true;
      while (!lex.accept(")")) {
        const Raw lhs = parse_raw(lex);
        if (lex.peek().kind != Tok::arrow) lex.fail("expected '->'");
        lex.next();
        const Raw rhs = parse_raw(lex);
        rules.push_back({b.build(lhs), b.build(rhs)});
        sites.push_back({lhs.line, lhs.col});
      }
    } else if (kw.text == "COMMENT") {
      skip_block(lex);
    } else {
      throw ParseError("unknown block '" + kw.text + "'", kw.line, kw.col);
    }
  }
  if (!seen_rules) throw ParseError("missing RULES block", 1, 1);
  // Report rule-level problems at the rule they concern.
  for (std::size_t i = 0; i < rules.size(); ++i) {
    try {
      Trs(b.sig, {rules[i]});
    } catch (const Error& e) {
      throw ParseError(e.what(), sites[i].line, sites[i].col);
    }
  }
  Trs trs(b.sig, std::move(rules));
  for (const auto& [id, site] : b.splits) {
    const auto f = static_cast<SymbolId>(id);
    if (trs.is_defined(f)) {
      trs.declare_split(f, site.mask);
    } else if (site.mask != 0) {
      throw ParseError("constructor '" + trs.signature().name(f) + "' cannot have normal arguments", site.line,
                       site.col);
    }
  }
  return trs;
}

std::string print_trs(const Trs& trs) {
  const Signature& sig = trs.signature();
  Tiering shown(sig.symbol_count());
  for (SymbolId f : trs.defined_symbols())
    if (auto m = trs.declared_split(f)) {
      shown.set_kind(f, SymbolKind::compositional);
      shown.set_normal_mask(f, *m);
    }
  std::string out;
  if (sig.variable_count() > 0) {
    out += "(VAR";
    for (std::size_t i = 0; i < sig.variable_count(); ++i) out += " " + sig.variable_name(static_cast<VarId>(i));
    out += ")\n";
  }
  out += "(RULES\n";
  for (const Rule& r : trs.rules())
    out += "  " + to_string(sig, r.lhs, &shown) + " -> " + to_string(sig, r.rhs, &shown) + "\n";
  out += ")\n";
  return out;
}

// ------------------------------------------------------------------- terms

namespace {

Term build_term(const Raw& r, const Signature& sig, std::optional<std::size_t> n) {
  if (!r.applied && !r.power)
    if (auto x = sig.find_variable(r.name); x && !sig.find_symbol(r.name)) return Term::variable(*x);
  const auto f = sig.find_symbol(r.name);
  if (!f) throw ParseError("unknown symbol '" + r.name + "'", r.line, r.col);
  std::vector<Term> args;
  for (const Raw& a : r.args) args.push_back(build_term(a, sig, n));
  if (args.size() != sig.arity(*f))
    throw ParseError("'" + r.name + "' takes " + std::to_string(sig.arity(*f)) + " arguments, got " +
                         std::to_string(args.size()),
                     r.line, r.col);
  if (!r.power) return Term::apply(*f, std::move(args));
  std::size_t times = 0;
  if (*r.power == "n") {
    if (!n) throw ParseError("exponent 'n' outside a pattern", r.line, r.col);
    times = *n;
  } else if (!r.power->empty() && r.power->size() < 10 &&
             std::all_of(r.power->begin(), r.power->end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    times = std::stoul(*r.power);
  } else {
    throw ParseError("bad exponent '" + *r.power + "'", r.line, r.col);
  }
  if (args.size() != 1) throw ParseError("exponents need a unary symbol", r.line, r.col);
  Term t = args[0];
  for (std::size_t i = 0; i < times; ++i) t = Term::apply(*f, {t});
  return t;
}

}  // namespace

Term parse_term(std::string_view text, const Signature& sig, std::optional<std::size_t> n) {
  Lexer lex(text);
  const Raw r = parse_raw(lex);
  if (lex.peek().kind != Tok::end) lex.fail("trailing input after term");
  return build_term(r, sig, n);
}

// ------------------------------------------------------------ certificates

Certificate parse_certificate(std::string_view text, const Trs& trs) {
  const Signature& sig = trs.signature();
  const std::size_t n = sig.symbol_count();
  std::vector<std::vector<SymbolId>> classes;  // highest first
  std::set<std::uint32_t> placed;
  std::set<std::uint32_t> recursive;
  std::map<std::uint32_t, PositionMask> safe;
  std::optional<Variant> variant;
  std::set<std::string> seen;
  std::size_t safe_line = 1;

  auto lookup = [&](const Token& t) {
    const auto f = sig.find_symbol(t.text);
    if (!f) throw ParseError("unknown symbol '" + t.text + "'", t.line, t.col);
    return *f;
  };

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    Lexer lex(text.substr(start, end - start), line_no);
    start = end + 1;
    if (lex.peek().kind == Tok::end) continue;
    const Token key = lex.expect_ident("section name");
    lex.expect(":");
    if (!seen.insert(key.text).second) throw ParseError("duplicate section '" + key.text + "'", key.line, key.col);
    if (key.text == "precedence") {
      while (lex.peek().kind != Tok::end) {
        std::vector<SymbolId> cls;
        do {
          const Token t = lex.expect_ident("symbol");
          const SymbolId f = lookup(t);
          if (!placed.insert(index_of(f)).second)
            throw ParseError("symbol '" + t.text + "' appears twice", t.line, t.col);
          cls.push_back(f);
        } while (lex.accept("~"));
        classes.push_back(std::move(cls));
        if (lex.peek().kind != Tok::end) lex.expect(">");
      }
    } else if (key.text == "recursive") {
      while (lex.peek().kind != Tok::end) {
        const Token t = lex.expect_ident("symbol");
        const SymbolId f = lookup(t);
        if (!trs.is_defined(f)) throw ParseError("constructor '" + t.text + "' cannot be recursive", t.line, t.col);
        recursive.insert(index_of(f));
        lex.accept(",");
      }
    } else if (key.text == "safe") {
      safe_line = line_no;
      while (lex.peek().kind != Tok::end) {
        const Token t = lex.expect_ident("symbol");
        const SymbolId f = lookup(t);
        if (!trs.is_defined(f))
          throw ParseError("constructor '" + t.text + "' has only safe positions", t.line, t.col);
        if (safe.count(index_of(f))) throw ParseError("symbol '" + t.text + "' listed twice", t.line, t.col);
        PositionMask m = 0;
        while (lex.peek().kind == Tok::ident) {
          const Token pt = lex.peek();
          const std::size_t p = lex.expect_number();
          if (p == 0 || p > sig.arity(f))
            throw ParseError("position " + std::to_string(p) + " outside 1.." + std::to_string(sig.arity(f)),
                             pt.line, pt.col);
          m |= PositionMask{1} << (p - 1);
        }
        safe[index_of(f)] = m;
        if (lex.peek().kind != Tok::end) lex.expect(";");
      }
    } else if (key.text == "variant") {
      const Token t = lex.expect_ident("variant");
      variant = parse_variant(t.text);
      if (!variant) throw ParseError("unknown variant '" + t.text + "'", t.line, t.col);
      if (lex.peek().kind != Tok::end) lex.fail("trailing input");
    } else {
      throw ParseError("unknown section '" + key.text + "'", key.line, key.col);
    }
  }
  if (!seen.count("precedence")) throw ParseError("missing precedence section", 1, 1);

  std::vector<int> levels(n, -1);
  const int top = static_cast<int>(classes.size());
  int bottom_constructors = -1;
  for (std::size_t c = 0; c < classes.size(); ++c)
    for (SymbolId f : classes[c]) {
      levels[index_of(f)] = top - static_cast<int>(c);
      if (!trs.is_defined(f)) bottom_constructors = top - static_cast<int>(c);
    }
  for (std::size_t i = 0; i < n; ++i)
    if (levels[i] < 0 && !trs.is_defined(static_cast<SymbolId>(i)))
      levels[i] = bottom_constructors >= 0 ? bottom_constructors : 0;

  Certificate cert;
  cert.precedence = Precedence::from_levels(std::move(levels));
  cert.tiering = Tiering(n);
  cert.variant = variant.value_or(Variant::spop);
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = static_cast<SymbolId>(i);
    if (!trs.is_defined(f)) continue;
    cert.tiering.set_kind(f, recursive.count(i) ? SymbolKind::recursive : SymbolKind::compositional);
    const PositionMask s = safe.count(i) ? safe[i] : 0;
    const PositionMask m = prefix_mask(sig.arity(f)) & ~s;
    cert.tiering.set_normal_mask(f, m);
    if (auto d = trs.declared_split(f); d && *d != m)
      throw ParseError("safe positions of '" + sig.name(f) + "' disagree with the split written in the system",
                       safe_line, 1);
  }
  return cert;
}

std::string print_certificate(const Signature& sig, const Certificate& cert) {
  std::ostringstream out;
  out << "precedence:";
  bool first = true;
  for (const auto& cls : cert.precedence.classes()) {
    out << (first ? " " : " > ");
    first = false;
    for (std::size_t i = 0; i < cls.size(); ++i) out << (i ? " ~ " : "") << sig.name(cls[i]);
  }
  out << "\nrecursive:";
  for (std::size_t i = 0; i < cert.tiering.symbol_count(); ++i)
    if (cert.tiering.is_recursive(static_cast<SymbolId>(i))) out << ' ' << sig.name(static_cast<SymbolId>(i));
  out << "\nsafe:";
  first = true;
  for (std::size_t i = 0; i < cert.tiering.symbol_count(); ++i) {
    const auto f = static_cast<SymbolId>(i);
    if (!cert.tiering.is_defined(f)) continue;
    const PositionMask s = prefix_mask(sig.arity(f)) & ~cert.tiering.normal_mask(f);
    if (s == 0) continue;
    out << (first ? " " : "; ") << sig.name(f);
    first = false;
    for (std::size_t p = 0; p < sig.arity(f); ++p)
      if (s >> p & 1) out << ' ' << p + 1;
  }
  out << "\nvariant: " << to_string(cert.variant) << '\n';
  return out.str();
}

// ------------------------------------------------------------ B_wsc programs

const BwscExpr* BwscProgram::find(std::string_view name) const {
  for (const auto& [n, e] : definitions)
    if (n == name) return &e;
  return nullptr;
}

namespace {

class BwscParser {
 public:
  explicit BwscParser(std::string_view text) : lex_(text) {}

  BwscProgram run() {
    while (lex_.peek().kind != Tok::end) {
      const Token kw = lex_.expect_ident("'def'");
      if (kw.text != "def") throw ParseError("expected 'def', got '" + kw.text + "'", kw.line, kw.col);
      const Token name = lex_.expect_ident("definition name");
      if (prog_.find(name.text)) throw ParseError("'" + name.text + "' defined twice", name.line, name.col);
      lex_.expect("=");
      BwscExpr e = expr();
      prog_.definitions.emplace_back(name.text, std::move(e));
    }
    if (prog_.definitions.empty()) throw ParseError("program has no definitions", 1, 1);
    if (prog_.main().is_successor()) throw ParseError("a successor can only be used inside a scheme", 1, 1);
    return std::move(prog_);
  }

 private:
  std::vector<BwscExpr> expr_list() {
    std::vector<BwscExpr> out;
    lex_.expect("[");
    if (lex_.accept("]")) return out;
    do out.push_back(expr());
    while (lex_.accept(","));
    lex_.expect("]");
    return out;
  }

  BwscExpr expr() {
    const Token t = lex_.expect_ident("expression");
    try {
      return build(t);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), t.line, t.col);
    }
  }

  BwscExpr build(const Token& t) {
    const std::string& s = t.text;
    if (s == "O") {
      lex_.expect("(");
      const std::size_t k = lex_.expect_number();
      lex_.expect(",");
      const std::size_t l = lex_.expect_number();
      lex_.expect(")");
      return BwscExpr::zero(k, l);
    }
    if (s == "I") {
      lex_.expect("(");
      const std::size_t k = lex_.expect_number();
      lex_.expect(",");
      const std::size_t l = lex_.expect_number();
      lex_.expect(",");
      const std::size_t j = lex_.expect_number();
      lex_.expect(")");
      return BwscExpr::proj(k, l, j);
    }
    if (s == "P") return BwscExpr::pred();
    if (s == "C") return BwscExpr::cond();
    if (s == "S0") return BwscExpr::succ(0);
    if (s == "S1") return BwscExpr::succ(1);
    if (s == "WSC") {
      lex_.expect("(");
      const std::size_t k = lex_.expect_number();
      lex_.expect(",");
      const std::size_t l = lex_.expect_number();
      lex_.expect(";");
      BwscExpr h = expr();
      lex_.expect(";");
      std::vector<std::size_t> sel;
      lex_.expect("[");
      if (!lex_.accept("]")) {
        do sel.push_back(lex_.expect_number());
        while (lex_.accept(","));
        lex_.expect("]");
      }
      lex_.expect(";");
      std::vector<BwscExpr> gs = expr_list();
      lex_.expect(")");
      return BwscExpr::wsc(k, l, std::move(h), std::move(sel), std::move(gs));
    }
    if (s == "SRN" || s == "SRNPS") {
      lex_.expect("(");
      BwscExpr g = expr();
      lex_.expect(",");
      BwscExpr h0 = expr();
      lex_.expect(",");
      BwscExpr h1 = expr();
      if (s == "SRN") {
        lex_.expect(")");
        return BwscExpr::srn(std::move(g), std::move(h0), std::move(h1));
      }
      lex_.expect(";");
      std::vector<BwscExpr> ps = expr_list();
      lex_.expect(")");
      return BwscExpr::srn_ps(std::move(g), std::move(h0), std::move(h1), std::move(ps));
    }
    if (const BwscExpr* e = prog_.find(s)) return *e;
    throw ParseError("unknown function '" + s + "'", t.line, t.col);
  }

  Lexer lex_;
  BwscProgram prog_;
};

}  // namespace

BwscProgram parse_bwsc_program(std::string_view text) { return BwscParser(text).run(); }

}  // namespace spop
