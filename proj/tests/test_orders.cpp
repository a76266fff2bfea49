#include "doctest.h"
#include "properties.hpp"
#include "spop/error.hpp"
#include "spop/synthesis.hpp"
#include "support.hpp"

using namespace spop;

namespace {

struct Env {
  Trs trs;
  Certificate cert;
  Signature sig;

  Env(Trs t, Certificate c) : trs(std::move(t)), cert(std::move(c)), sig(trs.signature()) {
    for (const char* v : {"x", "y", "xs", "ys"})
      if (!sig.find_variable(v)) sig.add_variable(v);
  }
  Term operator()(const char* text) const { return parse_term(text, sig); }
};

Env square_env() {
  Trs trs = fixtures::square();
  Certificate cert = fixtures::square_cert(trs);
  return Env(std::move(trs), std::move(cert));
}

Env rev_env() {
  Trs trs = fixtures::rev();
  Certificate cert = fixtures::rev_ps_cert(trs);
  return Env(std::move(trs), std::move(cert));
}

std::string family_cert_text(std::size_t d) {
  std::string prec, rec;
  for (std::size_t i = d; i >= 1; --i) {
    prec += "f_" + std::to_string(i) + " > g_" + std::to_string(i) + " > ";
    rec += " g_" + std::to_string(i);
  }
  return "precedence: " + prec + "f_0 > a ~ b ~ s\nrecursive:" + rec + "\nsafe:\nvariant: spop\n";
}

}  // namespace

TEST_CASE("orienting the squaring rules") {
  const Env e = square_env();
  const auto mult = spop_gt(e.cert, e("times(S(x), y)"), e("plus(y, times(x, y))"));
  REQUIRE(mult);
  CHECK(mult.proof->clause == Clause::ia);
  const auto rec = spop_gt(e.cert, e("times(S(x), y)"), e("times(x, y)"));
  REQUIRE(rec);
  CHECK(rec.proof->clause == Clause::ts);
  const auto add = spop_gt(e.cert, e("plus(S(x), y)"), e("S(plus(x, y))"));
  REQUIRE(add);
  CHECK(add.proof->clause == Clause::ia);
  REQUIRE(add.proof->premises.size() == 1);
  CHECK(add.proof->premises[0].clause == Clause::ts);
  for (const auto* o : {&mult, &rec, &add}) CHECK(replay(e.cert, *o->proof) == "");
}

TEST_CASE("the strict part is irreflexive") {
  const Env e = square_env();
  const auto o = spop_gt(e.cert, e("S(x)"), e("S(x)"));
  CHECK_FALSE(o);
  CHECK_FALSE(o.failure.empty());
}

TEST_CASE("accumulator reversal needs parameter substitution") {
  const Env e = rev_env();
  const Term l = e("rev'(cons(x, xs), ys)"), r = e("rev'(xs, cons(x, ys))");
  const auto ps = spop_ps_gt(e.cert, l, r);
  REQUIRE(ps);
  CHECK(ps.proof->clause == Clause::ts);
  CHECK(replay(e.cert, *ps.proof) == "");
  const auto entry = spop_ps_gt(e.cert, e("rev(xs)"), e("rev'(xs, nil)"));
  REQUIRE(entry);
  CHECK(entry.proof->clause == Clause::ia);
  CHECK_FALSE(spop_gt(e.cert, l, r));
}

TEST_CASE("compatibility and degrees") {
  const Env sq = square_env();
  const auto c = check_compatibility(sq.trs, sq.cert);
  REQUIRE(c);
  CHECK(c.report->degree == 2);
  CHECK(c.report->proofs.size() == sq.trs.rules().size());
  CHECK(certified_degree(sq.trs, sq.cert) == 2);

  const Env rv = rev_env();
  const auto r = check_compatibility(rv.trs, rv.cert);
  REQUIRE(r);
  CHECK(r.report->degree == 1);

  for (std::size_t d = 1; d <= 3; ++d) {
    const Trs trs = gen_family(d);
    const Certificate cert = parse_certificate(family_cert_text(d), trs);
    const auto f = check_compatibility(trs, cert);
    REQUIRE(f);
    CHECK(f.report->degree == d);
  }

  const Trs empty = parse_trs("(RULES )");
  const auto none = check_compatibility(empty, Certificate{});
  REQUIRE(none);
  CHECK(none.report->degree == 0);
}

TEST_CASE("failures name the rule, identically in serial and parallel") {
  Env rv = rev_env();
  rv.cert.variant = Variant::spop;
  const auto par = check_compatibility(rv.trs, rv.cert, {}, Execution::parallel);
  const auto ser = check_compatibility(rv.trs, rv.cert, {}, Execution::serial);
  REQUIRE_FALSE(par);
  REQUIRE_FALSE(ser);
  CHECK(par.failure->rule == 2);
  CHECK(ser.failure->rule == par.failure->rule);
  CHECK(ser.failure->obligation == par.failure->obligation);
}

TEST_CASE("non-constructor systems are rejected") {
  const Trs trs = parse_trs("(VAR x) (RULES f(g(x)) -> x  g(x) -> x)");
  Certificate cert;
  cert.tiering = Tiering(trs.signature().symbol_count());
  cert.precedence = Precedence::from_levels(std::vector<int>(trs.signature().symbol_count(), 0));
  CHECK_THROWS_AS(check_compatibility(trs, cert), Error);
}

TEST_CASE("strict safe products reject the squaring system") {
  const Env e = square_env();
  OrderOptions strict;
  strict.strict_safe_products = true;
  CHECK_FALSE(spop_gt(e.cert, e("times(S(x), y)"), e("times(x, y)"), strict));
  CHECK_FALSE(spop_gt(e.cert, e("plus(S(x), y)"), e("plus(x, y)"), strict));
  CHECK(spop_gt(e.cert, e("plus(S(x), S(y))"), e("plus(x, y)"), strict));
  CHECK_FALSE(check_compatibility(e.trs, e.cert, strict));
}

TEST_CASE("certificate problems") {
  const Env e = square_env();
  CHECK(certificate_problems(e.trs, e.cert).empty());
  Certificate bad = e.cert;
  bad.precedence = Precedence::from_levels({0, 1, 2, 3, 4});  // constructors on top
  CHECK_FALSE(certificate_problems(e.trs, bad).empty());
  Certificate kinds = e.cert;
  kinds.tiering.set_kind(fixtures::sym(e.trs, "S"), SymbolKind::recursive);
  CHECK_FALSE(certificate_problems(e.trs, kinds).empty());
}

TEST_CASE("linearising a call graph keeps edges strict and depths intact") {
  const Env e = square_env();
  std::vector<std::vector<SymbolId>> below(e.trs.signature().symbol_count());
  const SymbolId plus = fixtures::sym(e.trs, "plus"), times = fixtures::sym(e.trs, "times"),
                 square = fixtures::sym(e.trs, "square"), S = fixtures::sym(e.trs, "S");
  below[index_of(plus)] = {S};
  below[index_of(times)] = {plus};
  below[index_of(square)] = {times};
  const Precedence p = linearize(e.cert.tiering, below);
  CHECK(p.greater(square, times));
  CHECK(p.greater(times, plus));
  CHECK(p.greater(plus, S));
  CHECK(recursion_depth(p, e.cert.tiering, square) == 2);
}

TEST_CASE("parameter substitution does not contain the plain order for arbitrary left sides") {
  // With a recursive call already in a safe argument of s, the weak safe
  // product accepts t while the other variant demands symbols below f.
  Signature sig;
  const SymbolId Sc = sig.add_symbol("S", 1);
  const SymbolId f = sig.add_symbol("f", 2);
  const VarId xv = sig.add_variable("x"), yv = sig.add_variable("y");
  Certificate cert;
  cert.tiering = Tiering(sig.symbol_count());
  cert.tiering.set_kind(f, SymbolKind::recursive);
  cert.tiering.set_normal_mask(f, 1);
  cert.precedence = Precedence::from_levels({0, 1});
  const Term x = Term::variable(xv), y = Term::variable(yv);
  const Term inner = Term::apply(f, {x, y});
  const Term s = Term::apply(f, {Term::apply(Sc, {x}), inner});
  const Term t = Term::apply(f, {x, inner});
  CHECK(spop_gt(cert, s, t));
  CHECK_FALSE(spop_ps_gt(cert, s, t));
}

TEST_CASE("random pairs: agreement with the definition, irreflexivity, subsumption, replay") {
  const auto tally = laws::order_laws(2024, 4000);
  INFO(tally.first);
  CHECK(tally.failures == 0);
  CHECK(tally.positives > 200);
}
