#include "spop/bwsc.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "spop/error.hpp"

namespace spop {

bool is_word(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](char c) { return c == '0' || c == '1'; });
}

// ------------------------------------------------------------ construction

namespace {

std::string arity_text(std::size_t k, std::size_t l) {
  return "(" + std::to_string(k) + "," + std::to_string(l) + ")";
}

void expect_arity(const BwscExpr& e, std::size_t k, std::size_t l, std::string_view role) {
  if (e.normal_arity() != k || e.safe_arity() != l)
    throw ArityMismatch(std::string(role) + " has arity " + arity_text(e.normal_arity(), e.safe_arity()) +
                        ", expected " + arity_text(k, l));
}

}  // namespace

BwscExpr BwscExpr::zero(std::size_t k, std::size_t l) {
  return BwscExpr(std::make_shared<const Node>(Node{Kind::zero, k, l, 0, {}, {}}));
}

BwscExpr BwscExpr::proj(std::size_t k, std::size_t l, std::size_t j) {
  if (j == 0 || j > k + l)
    throw ArityMismatch("projection index " + std::to_string(j) + " outside 1.." + std::to_string(k + l));
  return BwscExpr(std::make_shared<const Node>(Node{Kind::proj, k, l, j, {}, {}}));
}

BwscExpr BwscExpr::pred() { return BwscExpr(std::make_shared<const Node>(Node{Kind::pred, 0, 1, 0, {}, {}})); }

BwscExpr BwscExpr::cond() { return BwscExpr(std::make_shared<const Node>(Node{Kind::cond, 0, 4, 0, {}, {}})); }

BwscExpr BwscExpr::succ(int bit) {
  if (bit != 0 && bit != 1) throw Error("successor digit must be 0 or 1");
  return BwscExpr(std::make_shared<const Node>(Node{bit ? Kind::succ1 : Kind::succ0, 0, 1, 0, {}, {}}));
}

BwscExpr BwscExpr::wsc(std::size_t k, std::size_t l, BwscExpr h, std::vector<std::size_t> selection,
                       std::vector<BwscExpr> gs) {
  for (std::size_t i : selection)
    if (i == 0 || i > k)
      throw ArityMismatch("composition selects normal argument " + std::to_string(i) + " of " + std::to_string(k));
  expect_arity(h, selection.size(), gs.size(), "composed function");
  for (const BwscExpr& g : gs) expect_arity(g, k, l, "composition argument");
  std::vector<BwscExpr> children{std::move(h)};
  children.insert(children.end(), gs.begin(), gs.end());
  return BwscExpr(std::make_shared<const Node>(Node{Kind::wsc, k, l, 0, std::move(selection), std::move(children)}));
}

BwscExpr BwscExpr::srn(BwscExpr g, BwscExpr h0, BwscExpr h1) {
  const std::size_t k = g.normal_arity() + 1;
  const std::size_t l = g.safe_arity();
  expect_arity(h0, k, l + 1, "step function h0");
  expect_arity(h1, k, l + 1, "step function h1");
  return BwscExpr(
      std::make_shared<const Node>(Node{Kind::srn, k, l, 0, {}, {std::move(g), std::move(h0), std::move(h1)}}));
}

BwscExpr BwscExpr::srn_ps(BwscExpr g, BwscExpr h0, BwscExpr h1, std::vector<BwscExpr> ps) {
  const std::size_t k = g.normal_arity() + 1;
  const std::size_t l = g.safe_arity();
  expect_arity(h0, k, l + 1, "step function h0");
  expect_arity(h1, k, l + 1, "step function h1");
  if (ps.size() != l)
    throw ArityMismatch("parameter substitution needs " + std::to_string(l) + " functions, got " +
                        std::to_string(ps.size()));
  for (const BwscExpr& p : ps) expect_arity(p, k, l, "parameter function");
  std::vector<BwscExpr> children{std::move(g), std::move(h0), std::move(h1)};
  children.insert(children.end(), ps.begin(), ps.end());
  return BwscExpr(std::make_shared<const Node>(Node{Kind::srn_ps, k, l, 0, {}, std::move(children)}));
}

// -------------------------------------------------------------- evaluation

namespace {

Word apply(const BwscExpr& e, const std::vector<Word>& x, const std::vector<Word>& y);

std::vector<Word> apply_all(const std::vector<BwscExpr>& fs, std::size_t from, std::size_t to,
                            const std::vector<Word>& x, const std::vector<Word>& y) {
  std::vector<Word> out;
  for (std::size_t i = from; i < to; ++i) out.push_back(apply(fs[i], x, y));
  return out;
}

Word apply(const BwscExpr& e, const std::vector<Word>& x, const std::vector<Word>& y) {
  using K = BwscExpr::Kind;
  const auto& ch = e.children();
  switch (e.kind()) {
    case K::zero: return {};
    case K::proj: return e.index() <= x.size() ? x[e.index() - 1] : y[e.index() - 1 - x.size()];
    case K::pred: return y[0].empty() ? Word{} : y[0].substr(0, y[0].size() - 1);
    case K::cond:
      if (y[0].empty()) return y[1];
      return y[0].back() == '0' ? y[2] : y[3];
    case K::succ0: return y[0] + '0';
    case K::succ1: return y[0] + '1';
    case K::wsc: {
      std::vector<Word> hx;
      for (std::size_t i : e.selection()) hx.push_back(x[i - 1]);
      return apply(ch[0], hx, apply_all(ch, 1, ch.size(), x, y));
    }
    case K::srn:
    case K::srn_ps: {
      // Recursion on the first normal argument w; the call on a prefix z of
      // w sees the safe arguments params[|z|].
      const Word& w = x[0];
      std::vector<Word> rest(x.begin() + 1, x.end());
      std::vector<std::vector<Word>> params(w.size() + 1);
      params[w.size()] = y;
      for (std::size_t len = w.size(); len > 0; --len) {
        if (e.kind() == K::srn) {
          params[len - 1] = y;
          continue;
        }
        std::vector<Word> zx{w.substr(0, len - 1)};
        zx.insert(zx.end(), rest.begin(), rest.end());
        params[len - 1] = apply_all(ch, 3, ch.size(), zx, params[len]);
      }
      Word r = apply(ch[0], rest, params[0]);
      for (std::size_t len = 1; len <= w.size(); ++len) {
        std::vector<Word> zx{w.substr(0, len - 1)};
        zx.insert(zx.end(), rest.begin(), rest.end());
        std::vector<Word> ys = params[len];
        ys.push_back(std::move(r));
        r = apply(ch[w[len - 1] == '0' ? 1 : 2], zx, ys);
      }
      return r;
    }
  }
  return {};
}

}  // namespace

Word eval(const BwscExpr& e, const std::vector<Word>& normals, const std::vector<Word>& safes) {
  if (e.is_successor()) throw Error("a successor can only be used inside a scheme");
  if (normals.size() != e.normal_arity() || safes.size() != e.safe_arity())
    throw ArityMismatch("function of arity " + arity_text(e.normal_arity(), e.safe_arity()) + " applied to " +
                        arity_text(normals.size(), safes.size()) + " arguments");
  for (const auto* ws : {&normals, &safes})
    for (const Word& w : *ws)
      if (!is_word(w)) throw Error("not a binary word: " + w);
  return apply(e, normals, safes);
}

std::size_t nesting_depth(const BwscExpr& e) {
  std::size_t below = 0;
  for (const BwscExpr& c : e.children()) below = std::max(below, nesting_depth(c));
  const bool scheme = e.kind() == BwscExpr::Kind::srn || e.kind() == BwscExpr::Kind::srn_ps;
  return below + (scheme ? 1 : 0);
}

std::string to_string(const BwscExpr& e) {
  using K = BwscExpr::Kind;
  auto list = [](const std::vector<BwscExpr>& xs, std::size_t from) {
    std::string out = "[";
    for (std::size_t i = from; i < xs.size(); ++i) {
      if (i > from) out += ", ";
      out += to_string(xs[i]);
    }
    return out + "]";
  };
  const auto& ch = e.children();
  switch (e.kind()) {
    case K::zero: return "O(" + std::to_string(e.normal_arity()) + "," + std::to_string(e.safe_arity()) + ")";
    case K::proj:
      return "I(" + std::to_string(e.normal_arity()) + "," + std::to_string(e.safe_arity()) + "," +
             std::to_string(e.index()) + ")";
    case K::pred: return "P";
    case K::cond: return "C";
    case K::succ0: return "S0";
    case K::succ1: return "S1";
    case K::wsc: {
      std::string sel = "[";
      for (std::size_t i = 0; i < e.selection().size(); ++i) {
        if (i) sel += ", ";
        sel += std::to_string(e.selection()[i]);
      }
      sel += "]";
      return "WSC(" + std::to_string(e.normal_arity()) + "," + std::to_string(e.safe_arity()) + "; " +
             to_string(ch[0]) + "; " + sel + "; " + list(ch, 1) + ")";
    }
    case K::srn: return "SRN(" + to_string(ch[0]) + ", " + to_string(ch[1]) + ", " + to_string(ch[2]) + ")";
    case K::srn_ps:
      return "SRNPS(" + to_string(ch[0]) + ", " + to_string(ch[1]) + ", " + to_string(ch[2]) + "; " + list(ch, 3) +
             ")";
  }
  return {};
}

// --------------------------------------------------------------- compiler

namespace {

std::uint32_t fnv1a(std::string_view text) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : text) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

std::string hex8(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

class Compiler {
 public:
  Compiler() {
    eps_ = sig_.add_symbol("eps", 0);
    s_[0] = sig_.add_symbol("S0", 1);
    s_[1] = sig_.add_symbol("S1", 1);
  }

  CompiledBwsc run(const BwscExpr& e) {
    if (e.is_successor()) throw Error("a successor can only be used inside a scheme");
    const SymbolId root = compile(e);
    CompiledBwsc out;
    out.root = root;
    Tiering tiers(sig_.symbol_count());
    std::vector<std::vector<SymbolId>> below(sig_.symbol_count());
    for (const auto& [f, info] : defined_) {
      tiers.set_kind(f, info.recursive ? SymbolKind::recursive : SymbolKind::compositional);
      tiers.set_normal_mask(f, info.mask);
      below[index_of(f)] = info.below;
    }
    out.certificate.tiering = tiers;
    out.certificate.precedence = linearize(tiers, below);
    out.certificate.variant = uses_ps_ ? Variant::spop_ps : Variant::spop;
    out.trs = Trs(sig_, std::move(rules_));
    for (const auto& [f, info] : defined_) out.trs.declare_split(f, info.mask);
    return out;
  }

 private:
  struct Info {
    bool recursive = false;
    PositionMask mask = 0;
    std::vector<SymbolId> below;
  };

  Term var(const std::string& name) { return Term::variable(sig_.add_variable(name)); }

  std::vector<Term> vars(char prefix, std::size_t n) {
    std::vector<Term> out;
    for (std::size_t i = 1; i <= n; ++i) out.push_back(var(prefix + std::to_string(i)));
    return out;
  }

  static std::vector<Term> concat(std::vector<Term> a, const std::vector<Term>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }

  Term call(const BwscExpr& e, std::vector<Term> args, std::vector<SymbolId>& deps) {
    if (e.kind() == BwscExpr::Kind::succ0) return Term::apply(s_[0], std::move(args));
    if (e.kind() == BwscExpr::Kind::succ1) return Term::apply(s_[1], std::move(args));
    const SymbolId g = compile(e);
    if (std::find(deps.begin(), deps.end(), g) == deps.end()) deps.push_back(g);
    return Term::apply(g, std::move(args));
  }

  std::string name_of(const BwscExpr& e) {
    using K = BwscExpr::Kind;
    const std::string k = std::to_string(e.normal_arity()), l = std::to_string(e.safe_arity());
    switch (e.kind()) {
      case K::zero: return "ZERO_" + k + "_" + l;
      case K::proj: return "PROJ_" + k + "_" + l + "_" + std::to_string(e.index());
      case K::pred: return "PRED";
      case K::cond: return "COND";
      default: break;
    }
    const std::string key = to_string(e);
    const std::string prefix = e.kind() == K::wsc ? "SUB_" : e.kind() == K::srn ? "SRN_" : "SRNPS_";
    std::string name = prefix + hex8(fnv1a(key));
    // Distinct expressions that collide get a numbered suffix.
    for (int n = 2; names_.count(name) && names_[name] != key; ++n)
      name = prefix + hex8(fnv1a(key)) + "_" + std::to_string(n);
    names_[name] = key;
    return name;
  }

  SymbolId compile(const BwscExpr& e) {
    using K = BwscExpr::Kind;
    const std::string name = name_of(e);
    const std::size_t k = e.normal_arity(), l = e.safe_arity();
    if (auto f = sig_.find_symbol(name); f && defined_.count(*f)) return *f;
    const SymbolId f = sig_.add_symbol(name, k + l);
    Info info;
    info.mask = k == 0 ? 0 : (k == 64 ? ~PositionMask{0} : (PositionMask{1} << k) - 1);
    defined_.emplace(f, Info{});
    const auto& ch = e.children();
    auto rule = [&](std::vector<Term> args, Term rhs) { rules_.push_back({Term::apply(f, std::move(args)), rhs}); };
    switch (e.kind()) {
      case K::zero: rule(concat(vars('x', k), vars('y', l)), Term::apply(eps_)); break;
      case K::proj: {
        const auto args = concat(vars('x', k), vars('y', l));
        rule(args, args[e.index() - 1]);
        break;
      }
      case K::pred: {
        const Term x = var("x");
        rule({Term::apply(eps_)}, Term::apply(eps_));
        for (SymbolId s : s_) rule({Term::apply(s, {x})}, x);
        break;
      }
      case K::cond: {
        const Term x = var("x"), y = var("y"), z0 = var("z0"), z1 = var("z1");
        rule({Term::apply(eps_), y, z0, z1}, y);
        rule({Term::apply(s_[0], {x}), y, z0, z1}, z0);
        rule({Term::apply(s_[1], {x}), y, z0, z1}, z1);
        break;
      }
      case K::succ0:
      case K::succ1: break;
      case K::wsc: {
        const auto x = vars('x', k);
        const auto y = vars('y', l);
        std::vector<Term> hargs;
        for (std::size_t i : e.selection()) hargs.push_back(x[i - 1]);
        for (std::size_t i = 1; i < ch.size(); ++i) hargs.push_back(call(ch[i], concat(x, y), info.below));
        rule(concat(x, y), call(ch[0], std::move(hargs), info.below));
        break;
      }
      case K::srn:
      case K::srn_ps: {
        info.recursive = true;
        if (e.kind() == K::srn_ps) uses_ps_ = true;
        const Term z = var("z");
        const auto x = vars('x', k - 1);
        const auto y = vars('y', l);
        rule(concat(concat({Term::apply(eps_)}, x), y), call(ch[0], concat(x, y), info.below));
        for (int i = 0; i < 2; ++i) {
          const auto zx = concat({z}, x);
          std::vector<Term> inner_safe = y;
          if (e.kind() == K::srn_ps) {
            inner_safe.clear();
            for (std::size_t p = 3; p < ch.size(); ++p) inner_safe.push_back(call(ch[p], concat(zx, y), info.below));
          }
          const Term recursive_call = Term::apply(f, concat(zx, inner_safe));
          rule(concat(concat({Term::apply(s_[i], {z})}, x), y),
               call(ch[1 + static_cast<std::size_t>(i)], concat(concat(zx, y), {recursive_call}), info.below));
        }
        break;
      }
    }
    defined_[f] = std::move(info);
    return f;
  }

  Signature sig_;
  SymbolId eps_{};
  SymbolId s_[2]{};
  std::vector<Rule> rules_;
  std::map<SymbolId, Info> defined_;
  std::unordered_map<std::string, std::string> names_;
  bool uses_ps_ = false;
};

}  // namespace

CompiledBwsc compile_to_trs(const BwscExpr& e) { return Compiler().run(e); }

Term encode_word(const Signature& sig, const Word& w) {
  const auto eps = sig.find_symbol("eps");
  const auto s0 = sig.find_symbol("S0");
  const auto s1 = sig.find_symbol("S1");
  if (!eps || !s0 || !s1) throw Error("signature lacks the word constructors eps, S0, S1");
  Term t = Term::apply(*eps);
  for (char c : w) {
    if (c != '0' && c != '1') throw Error("not a binary word: " + w);
    t = Term::apply(c == '0' ? *s0 : *s1, {t});
  }
  return t;
}

Word decode_word(const Signature& sig, const Term& t) {
  Word out;
  const Term* cur = &t;
  while (true) {
    if (cur->is_variable()) throw Error("not a word: contains a variable");
    const std::string& name = sig.name(cur->symbol());
    if (name == "eps" && cur->arity() == 0) break;
    if ((name == "S0" || name == "S1") && cur->arity() == 1) {
      out.push_back(name[1]);
      cur = &cur->arg(0);
      continue;
    }
    throw Error("not a word: " + to_string(sig, t));
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace spop
