#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "spop/error.hpp"
#include "spop/synthesis.hpp"
#include "support.hpp"

using namespace spop;

namespace {

constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

// Smallest degree over every certificate with constructors in one bottom
// class, found by enumerating precedences, kinds and splits and orienting
// each rule with the reference order.
std::size_t brute_force_degree(const Trs& trs, Variant variant) {
  const Signature& sig = trs.signature();
  const std::vector<SymbolId> defs = trs.defined_symbols();
  const std::size_t n = defs.size();
  std::size_t best = none;
  std::vector<std::size_t> level(n, 0);
  while (true) {
    std::vector<bool> used(n, false);
    std::size_t classes = 0;
    for (std::size_t l : level) used[l] = true;
    while (classes < n && used[classes]) ++classes;
    bool contiguous = true;
    for (std::size_t l = classes; l < n; ++l) contiguous = contiguous && !used[l];
    if (contiguous) {
      for (std::size_t kinds = 0; kinds < (std::size_t{1} << n); ++kinds) {
        bool consistent = true;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            if (level[i] == level[j] && ((kinds >> i & 1) != (kinds >> j & 1))) consistent = false;
        if (!consistent) continue;
        std::vector<std::size_t> mask(n, 0);
        while (true) {
          Certificate cert;
          cert.variant = variant;
          cert.tiering = Tiering(sig.symbol_count());
          std::vector<int> levels(sig.symbol_count(), 0);
          std::set<std::size_t> rec_classes;
          for (std::size_t i = 0; i < n; ++i) {
            cert.tiering.set_kind(defs[i], kinds >> i & 1 ? SymbolKind::recursive : SymbolKind::compositional);
            cert.tiering.set_normal_mask(defs[i], mask[i]);
            levels[index_of(defs[i])] = static_cast<int>(level[i]) + 1;
            if (kinds >> i & 1) rec_classes.insert(level[i]);
          }
          cert.precedence = Precedence::from_levels(levels);
          oracle::PathOrder order(cert);
          bool ok = true;
          for (const Rule& r : trs.rules()) ok = ok && order.gt(r.lhs, r.rhs);
          if (ok) best = std::min(best, rec_classes.size());
          std::size_t i = 0;
          while (i < n && ++mask[i] == (std::size_t{1} << sig.arity(defs[i]))) mask[i++] = 0;
          if (i == n) break;
        }
      }
    }
    std::size_t i = 0;
    while (i < n && ++level[i] == n) level[i++] = 0;
    if (i == n) break;
  }
  return best;
}

const char* small_systems[] = {
    // doubling
    "(VAR x) (RULES d(Z) -> Z  d(S(x)) -> S(S(d(x))))",
    // exponentiation through doubling: not polynomial
    "(VAR x) (RULES d(Z) -> Z  d(S(x)) -> S(S(d(x)))  e(Z) -> S(Z)  e(S(x)) -> d(e(x)))",
    // addition recursing on either argument
    "(VAR x y) (RULES add(Z, y) -> y  add(S(x), y) -> S(add(x, y))  sub(x, Z) -> x  sub(S(x), S(y)) -> sub(x, y))",
    // a constant function calling a recursive one
    "(VAR x y) (RULES half(Z) -> Z  half(S(Z)) -> Z  half(S(S(x))) -> S(half(x))  q(x) -> half(half(x)))",
    // accumulator reversal
    fixtures::rev_text,
    // squaring, splits searched
    fixtures::square_text,
};

}  // namespace

TEST_CASE("squaring synthesises at degree two, reproducibly") {
  const Trs trs = fixtures::square();
  const auto a = synthesize(trs, Variant::spop);
  REQUIRE(a);
  CHECK(a.report->degree == 2);
  CHECK(check_compatibility(trs, *a.certificate));
  CHECK(a.levels.size() == 3);
  CHECK(a.levels[0].exhausted);
  CHECK(a.levels[1].exhausted);
  const auto b = synthesize(trs, Variant::spop);
  REQUIRE(b);
  CHECK(*a.certificate == *b.certificate);
}

TEST_CASE("accumulator reversal") {
  const Trs trs = fixtures::rev();
  const auto plain = synthesize(trs, Variant::spop);
  CHECK_FALSE(plain);
  CHECK_FALSE(plain.budget_exhausted);
  for (const auto& level : plain.levels) CHECK(level.exhausted);
  const auto ps = synthesize(trs, Variant::spop_ps);
  REQUIRE(ps);
  CHECK(ps.report->degree == 1);
  CHECK(ps.certificate->variant == Variant::spop_ps);
}

TEST_CASE("the family R_d needs exactly degree d") {
  for (std::size_t d = 0; d <= 4; ++d) {
    const auto r = synthesize(gen_family(d), Variant::spop);
    REQUIRE(r);
    CHECK(r.report->degree == d);
  }
}

TEST_CASE("degree is minimal over the whole certificate space") {
  SynthesisOptions free;
  free.free_splits = true;
  for (const char* text : small_systems) {
    const Trs trs = parse_trs(text);
    for (Variant v : {Variant::spop, Variant::spop_ps}) {
      CAPTURE(std::string(text));
      CAPTURE(to_string(v));
      const std::size_t expected = brute_force_degree(trs, v);
      const auto r = synthesize(trs, v, {}, free);
      if (expected == none) {
        CHECK_FALSE(r);
        CHECK_FALSE(r.budget_exhausted);
      } else {
        REQUIRE(r);
        CHECK(r.report->degree == expected);
      }
    }
  }
}

TEST_CASE("parallel search returns the serial certificate") {
  SynthesisOptions serial, parallel, free_serial, free_parallel;
  serial.exec = Execution::serial;
  free_serial.exec = Execution::serial;
  free_serial.free_splits = free_parallel.free_splits = true;
  std::vector<std::pair<Trs, Variant>> cases{{fixtures::square(), Variant::spop},
                                             {fixtures::rev(), Variant::spop_ps},
                                             {gen_family(2), Variant::spop},
                                             {gen_family(3), Variant::spop}};
  for (const char* text : small_systems) cases.emplace_back(parse_trs(text), Variant::spop);
  for (const auto& [trs, v] : cases) {
    const auto a = synthesize(trs, v, {}, serial), b = synthesize(trs, v, {}, parallel);
    REQUIRE(static_cast<bool>(a) == static_cast<bool>(b));
    if (a) CHECK(*a.certificate == *b.certificate);
    const auto c = synthesize(trs, v, {}, free_serial), e = synthesize(trs, v, {}, free_parallel);
    REQUIRE(static_cast<bool>(c) == static_cast<bool>(e));
    if (c) CHECK(*c.certificate == *e.certificate);
  }
}

TEST_CASE("budgets") {
  const Trs trs = fixtures::square();
  SearchBudget tiny;
  tiny.max_candidates = 1;
  const auto r = synthesize(trs, Variant::spop, tiny);
  CHECK_FALSE(r);
  CHECK(r.budget_exhausted);
  SearchBudget low;
  low.max_degree = 1;
  const auto capped = synthesize(trs, Variant::spop, low);
  CHECK_FALSE(capped);
  CHECK_FALSE(capped.budget_exhausted);
  SearchBudget zero;
  zero.max_candidates = 0;
  CHECK_THROWS_AS(synthesize(trs, Variant::spop, zero), Error);
  CHECK_THROWS_AS(synthesize(parse_trs("(VAR x) (RULES f(g(x)) -> x  g(x) -> x)"), Variant::spop), Error);
}

TEST_CASE("empty system") {
  const auto r = synthesize(parse_trs("(RULES )"), Variant::spop);
  REQUIRE(r);
  CHECK(r.report->degree == 0);
}
