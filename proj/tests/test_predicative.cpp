#include "doctest.h"
#include "oracles.hpp"
#include "properties.hpp"
#include "spop/error.hpp"
#include "support.hpp"

using namespace spop;

namespace {

struct Square {
  Trs trs = fixtures::square();
  Certificate cert = fixtures::square_cert(trs);
  Term operator()(const char* text) const { return fixtures::term(trs, text); }
  SymbolId sym(const char* name) const { return fixtures::sym(trs, name); }
  std::string show(const SeqTerm& a) const { return to_string(trs.signature(), cert.tiering, a); }
};

// Z (constructor), g (compositional, 0), f (recursive, 1), h (compositional, 1)
// with h > f > g > Z: small enough to enumerate every chain.
struct Tiny {
  Signature sig;
  SymbolId Z, g, f, h;
  Tiering tiers{4};
  Precedence prec;
  NormalizedSignature normalized;

  Tiny() {
    Z = sig.add_symbol("Z", 0);
    g = sig.add_symbol("g", 0);
    f = sig.add_symbol("f", 1);
    h = sig.add_symbol("h", 1);
    tiers.set_kind(g, SymbolKind::compositional);
    tiers.set_kind(f, SymbolKind::recursive);
    tiers.set_kind(h, SymbolKind::compositional);
    tiers.set_normal_mask(f, 1);
    tiers.set_normal_mask(h, 1);
    prec = Precedence::from_levels({0, 1, 2, 3});
    normalized = {{Z, 0}, {g, 0}, {f, 1}, {h, 1}};
  }
};

}  // namespace

TEST_CASE("membership in T_n") {
  Square s;
  CHECK(in_Tn(s.trs, s.cert, s("square(S(S(Z)))")));
  CHECK(in_Tn(s.trs, s.cert, s("plus(S(Z), times(S(Z), S(Z)))")));
  CHECK_FALSE(in_Tn(s.trs, s.cert, s("times(plus(Z, Z), Z)")));
  CHECK(in_Tn(s.trs, s.cert, s("S(Z)")));
}

TEST_CASE("predicative interpretation") {
  Square s;
  const SeqTerm a = interpret(s.trs, s.cert, s("times(S(S(Z)), S(Z))"));
  CHECK(s.show(a) == "[times^n(S(S(Z)), S(Z))]");
  const SeqTerm b = interpret(s.trs, s.cert, s("plus(S(Z), times(S(Z), S(Z)))"));
  CHECK(s.show(b) == "[plus^n(S(Z)) times^n(S(Z), S(Z))]");
  REQUIRE(b.elements().size() == 2);
  CHECK(b.elements()[0] == Term::apply(s.sym("plus"), {s("S(Z)")}));
  CHECK(interpret(s.trs, s.cert, s("S(S(Z))")).empty());
  CHECK_THROWS_AS(interpret(s.trs, s.cert, s("times(plus(Z, Z), Z)")), NotInTn);
}

TEST_CASE("interpretations are empty exactly on values") {
  Square s;
  gen::Rng rng(9);
  std::vector<gen::Sym> syms;
  for (std::uint32_t i = 0; i < s.trs.signature().symbol_count(); ++i)
    syms.push_back({SymbolId{i}, s.trs.signature().arity(SymbolId{i})});
  std::size_t members = 0;
  for (int round = 0; round < 2000; ++round) {
    const Term t = gen::term(rng, syms, {}, 3);
    if (!in_Tn(s.trs, s.cert, t)) continue;
    ++members;
    CHECK(interpret(s.trs, s.cert, t).empty() == is_value(s.trs, t));
  }
  CHECK(members > 100);
}

TEST_CASE("concatenation") {
  Square s;
  const Term p = Term::apply(s.sym("plus"), {s("S(Z)")}), q = s("S(Z)");
  const SeqTerm nil = SeqTerm::list();
  CHECK(append(nil, SeqTerm::term(p)) == SeqTerm::list({p}));
  CHECK(append(SeqTerm::term(p), SeqTerm::term(q)) == SeqTerm::list({p, q}));
  CHECK(append(SeqTerm::list({p}), SeqTerm::list({q})) == SeqTerm::list({p, q}));
  const SeqTerm x = SeqTerm::list({p, q}), y = SeqTerm::term(q), z = SeqTerm::list({p});
  CHECK(append(append(x, y), z) == append(x, append(y, z)));
}

TEST_CASE("the running example under the sequence order") {
  Square s;
  const Term lhs = Term::apply(s.sym("times"), {s("S(S(Z))"), s("S(Z)")});
  const Term plus = Term::apply(s.sym("plus"), {s("S(Z)")});
  const Term times = Term::apply(s.sym("times"), {s("S(Z)"), s("S(Z)")});
  SequenceOrder order(s.cert.precedence, s.cert.tiering, 2);

  const auto one = order.orient(SeqTerm::term(lhs), SeqTerm::term(plus));
  REQUIRE(one);
  CHECK(one.proof->clause == SeqClause::ia);
  const auto two = order.orient(SeqTerm::term(lhs), SeqTerm::term(times));
  REQUIRE(two);
  CHECK(two.proof->clause == SeqClause::ts);
  const auto both = order.orient(SeqTerm::list({lhs}), SeqTerm::list({plus, times}));
  REQUIRE(both);
  CHECK(both.proof->clause == SeqClause::ms);
  REQUIRE(both.proof->premises.size() == 1);
  CHECK(both.proof->premises[0].clause == SeqClause::ialst);

  CHECK_FALSE(order.greater(SeqTerm::term(lhs), SeqTerm::term(lhs)));
  CHECK_FALSE(order.greater(SeqTerm::list({lhs}), SeqTerm::list({lhs})));

  // The same step as taken by the rewrite engine.
  const Term from = s("times(S(S(Z)), S(Z))"), to = s("plus(S(Z), times(S(Z), S(Z)))");
  CHECK(order.greater(interpret(s.trs, s.cert, from), interpret(s.trs, s.cert, to)));
}

TEST_CASE("mc recurrence") {
  for (std::size_t d = 0; d <= 3; ++d)
    for (std::size_t k = 1; k <= 4; ++k) CHECK(mc(1, d, k) == 1);
  CHECK(mc(2, 0, 2) == 3);
  CHECK(mc(3, 1, 2) == 21);
  CHECK(mc(2, 1, 2) == 5);
  CHECK(mc(3, 2, 2) == 73);
  CHECK(mc(4, 2, 2) == 585);
  CHECK_THROWS_AS(mc(40, 10, 10), Overflow);
}

TEST_CASE("slow against exhaustive chain enumeration") {
  Tiny t;
  for (std::size_t k = 1; k <= 2; ++k) {
    oracle::SlowOracle reference(t.prec, t.tiers, k, t.normalized, 2);
    SlowCalculator additive(t.prec, t.tiers, k, t.normalized);
    SlowCalculator exhaustive(t.prec, t.tiers, k, t.normalized, SlowMode::exhaustive);
    for (const Term& a : reference.candidates()) {
      const std::size_t expected = reference.slow(a);
      CHECK(additive.slow(a) == expected);
      CHECK(exhaustive.slow(a) == expected);
    }
    const std::vector<Term> list{Term::apply(t.f, {Term::apply(t.g)}), Term::apply(t.g)};
    CHECK(additive.slow(SeqTerm::list(list)) == reference.slow(list));
    CHECK(additive.slow(SeqTerm::list()) == 0);
  }
  // Z can only step to the empty list; g descends through [Z Z], [Z], [].
  SlowCalculator calc(t.prec, t.tiers, 2, t.normalized);
  CHECK(calc.slow(Term::apply(t.Z)) == 1);
  CHECK(calc.slow(Term::apply(t.g)) == 3);
}

TEST_CASE("sequence order laws on random sequences") {
  const auto tally = laws::approx_laws(17, 2000);
  INFO(tally.first);
  CHECK(tally.failures == 0);
  CHECK(tally.positives > 200);
}

TEST_CASE("slow is additive over lists") {
  const auto tally = laws::slowsum_laws(23, 300);
  INFO(tally.first);
  CHECK(tally.failures == 0);
  CHECK(tally.positives > 100);
}

TEST_CASE("slow bound for the squaring system") {
  Square s;
  const NormalizedSignature sig = normalized_signature(s.trs.signature(), s.cert.tiering);
  const SlowBound plus = check_slow_bound(s.cert.precedence, s.cert.tiering, 2, sig, s.sym("plus"), {s("S(Z)")});
  CHECK(plus.largest < plus.bound);
  CHECK(plus.constant == mc(2, 1, 2));
  const SlowBound times =
      check_slow_bound(s.cert.precedence, s.cert.tiering, 2, sig, s.sym("times"), {s("S(Z)"), s("S(Z)")});
  CHECK(times.rank == 3);
  CHECK(times.depth == 2);
  CHECK(times.bound == 73 * 16);
  CHECK(times.largest < times.bound);
  // Exponent zero: the bound is the constant itself.
  Certificate flat = s.cert;
  flat.tiering.set_kind(s.sym("plus"), SymbolKind::compositional);
  const SlowBound zero = check_slow_bound(flat.precedence, flat.tiering, 2, sig, s.sym("plus"), {s("Z")});
  CHECK(zero.depth == 0);
  CHECK(zero.bound == mc(2, 0, 2));
}

TEST_CASE("embedding of innermost steps") {
  Square s;
  const auto report = verify_embedding(s.trs, s.cert, s("square(S(S(Z)))"), {.keep_proofs = true});
  CHECK(report.width == 5);
  CHECK(report.steps.size() == 10);
  for (const auto& step : report.steps) CHECK(step.proof.has_value());

  const auto fig = verify_embedding(s.trs, s.cert, s("times(S(S(Z)), S(Z))"), {.width = 2});
  CHECK(fig.width == 2);
  REQUIRE_FALSE(fig.steps.empty());
  CHECK(s.show(fig.steps[0].from_seq) == "[times^n(S(S(Z)), S(Z))]");
  CHECK(s.show(fig.steps[0].to_seq) == "[plus^n(S(Z)) times^n(S(Z), S(Z))]");

  CHECK(verify_embedding(s.trs, s.cert, s("S(Z)")).steps.empty());
  CHECK_THROWS_AS(verify_embedding(s.trs, s.cert, s("times(plus(Z, Z), Z)")), NotInTn);

  const Trs rev = fixtures::rev();
  const Certificate rc = fixtures::rev_ps_cert(rev);
  const auto r = verify_embedding(rev, rc, fixtures::term(rev, "rev(cons(nil, cons(nil, nil)))"));
  CHECK(r.steps.size() == derivation_height(rev, fixtures::term(rev, "rev(cons(nil, cons(nil, nil)))")));
}

TEST_CASE("serial and parallel embedding checks agree") {
  Square s;
  EmbeddingOptions serial;
  serial.exec = Execution::serial;
  const auto a = verify_embedding(s.trs, s.cert, s("square(S(S(S(Z))))"), serial);
  const auto b = verify_embedding(s.trs, s.cert, s("square(S(S(S(Z))))"));
  CHECK(a.steps.size() == b.steps.size());
  CHECK(a.terms == b.terms);
}

TEST_CASE("rules under value substitutions") {
  // Interpreted right-hand sides stay within size(r) elements, and each of
  // them lies below the interpreted left-hand side, at most one heavy.
  for (int which = 0; which < 2; ++which) {
    const Trs trs = which ? fixtures::rev() : fixtures::square();
    const Certificate cert = which ? fixtures::rev_ps_cert(trs) : fixtures::square_cert(trs);
    const std::size_t width = trs.max_rhs_size();
    SequenceOrder order(cert.precedence, cert.tiering, width);
    const std::vector<Term> values = which ? std::vector<Term>{fixtures::term(trs, "nil"),
                                                               fixtures::term(trs, "cons(nil, nil)"),
                                                               fixtures::term(trs, "cons(cons(nil, nil), nil)")}
                                           : fixtures::numerals_up_to(trs, 2);
    std::size_t checked = 0;
    for (const Rule& rule : trs.rules()) {
      std::vector<VarId> vars;
      collect_variables(rule.lhs, vars);
      std::sort(vars.begin(), vars.end());
      vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
      std::vector<std::size_t> pick(vars.size(), 0);
      while (true) {
        Substitution sigma;
        for (std::size_t i = 0; i < vars.size(); ++i) sigma.bind(vars[i], values[pick[i]]);
        const Term l = substitute(rule.lhs, sigma), r = substitute(rule.rhs, sigma);
        const SeqTerm li = interpret(cert.tiering, l), ri = interpret(cert.tiering, r);
        REQUIRE(li.elements().size() == 1);
        CHECK(ri.elements().size() <= rule.rhs.size());
        std::size_t heavy = 0;
        for (const Term& u : ri.elements()) {
          CHECK(order.greater(li.elements()[0], u));
          heavy += order.heavy(li.elements()[0], u);
        }
        CHECK(heavy <= 1);
        ++checked;
        std::size_t i = 0;
        while (i < pick.size() && ++pick[i] == values.size()) pick[i++] = 0;
        if (i == pick.size()) break;
      }
    }
    CHECK(checked > 10);
  }
}
