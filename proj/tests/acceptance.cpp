// One line per acceptance criterion; nonzero exit when any fails.

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>

#include "properties.hpp"
#include "spop/error.hpp"
#include "spop/synthesis.hpp"

using namespace spop;

namespace {

constexpr double square_check_seconds = 1.0;
constexpr double rev_seconds = 30.0;
constexpr double ratio_growth = 1.10;
constexpr double ratio_ceiling = 5.0;
constexpr double slow_bound_seconds = 300.0;
constexpr std::size_t approx_cases = 10'000;
constexpr std::size_t slowsum_cases = 300;
constexpr std::size_t bwsc_cases = 120;
constexpr std::size_t order_cases = 10'000;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

struct Outcome {
  bool pass;
  std::string detail;
};

int failed = 0;

void criterion(int n, const char* name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failed;
  std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

Outcome square_check() {
  const auto start = Clock::now();
  const Trs trs = fixtures::square();
  const auto r = check_compatibility(trs, fixtures::square_cert(trs));
  const double t = since(start);
  if (!r) return {false, "not certified"};
  return {r.report->degree == 2 && t < square_check_seconds,
          "degree " + std::to_string(r.report->degree) + " in " + fmt(t) + " s"};
}

Outcome reversal() {
  const auto start = Clock::now();
  const Trs trs = fixtures::rev();
  const auto plain = synthesize(trs, Variant::spop);
  const auto ps = synthesize(trs, Variant::spop_ps);
  const double t = since(start);
  const bool plain_refuted = !plain && !plain.budget_exhausted;
  const std::size_t degree = ps ? ps.report->degree : 0;
  return {plain_refuted && ps && degree == 1 && t < rev_seconds,
          std::string("spop ") + (plain_refuted ? "refuted" : plain ? "certified" : "exhausted") + ", spop_ps " +
              (ps ? "degree " + std::to_string(degree) : std::string("none")) + ", " + fmt(t) + " s"};
}

Outcome families() {
  std::string detail;
  bool ok = true;
  for (std::size_t d = 1; d <= 3; ++d) {
    const Trs trs = gen_family(d);
    const auto r = synthesize(trs, Variant::spop);
    if (!r || r.report->degree != d) {
      ok = false;
      detail += "R_" + std::to_string(d) + " not at degree " + std::to_string(d) + "; ";
    }
    const SymbolId f = *trs.signature().find_symbol("f_" + std::to_string(d));
    for (std::size_t n = 1; n <= 8; ++n) {
      std::size_t power = 1;
      for (std::size_t i = 0; i < d; ++i) power *= n;
      const std::size_t h = derivation_height(trs, Term::apply(f, {parse_term("s^n(a)", trs.signature(), n)}));
      if (h < power) {
        ok = false;
        detail += "dh(R_" + std::to_string(d) + ", " + std::to_string(n) + ") = " + std::to_string(h) + "; ";
      }
    }
  }
  return {ok, ok ? "degrees 1..3, dh >= n^d for n = 1..8" : detail};
}

Outcome growth() {
  const Trs trs = fixtures::square();
  const SymbolId sq = fixtures::sym(trs, "square");
  double ratio[26] = {};
  double worst = 0;
  for (std::size_t n = 1; n <= 25; ++n) {
    const double h = static_cast<double>(derivation_height(trs, Term::apply(sq, {fixtures::numeral(trs, n)})));
    ratio[n] = h / static_cast<double>(n * n);
    worst = std::max(worst, ratio[n]);
  }
  return {ratio[25] <= ratio_growth * ratio[15] && worst <= ratio_ceiling,
          "ratio(15) " + fmt(ratio[15]) + ", ratio(25) " + fmt(ratio[25]) + ", max " + fmt(worst)};
}

Outcome embedding() {
  const Trs trs = fixtures::square();
  const Certificate cert = fixtures::square_cert(trs);
  const auto values = fixtures::numerals_up_to(trs, 4);
  std::size_t starts = 0, steps = 0, violations = 0;
  std::string first;
  auto visit = [&](const Term& t) {
    ++starts;
    try {
      steps += verify_embedding(trs, cert, t).steps.size();
    } catch (const EmbeddingViolation& e) {
      if (!violations++) first = e.what();
    }
  };
  for (const char* name : {"square", "plus", "times"}) {
    const SymbolId f = fixtures::sym(trs, name);
    if (trs.signature().arity(f) == 1) {
      for (const Term& x : values) visit(Term::apply(f, {x}));
    } else {
      for (const Term& x : values)
        for (const Term& y : values) visit(Term::apply(f, {x, y}));
    }
  }
  const auto fig = verify_embedding(trs, cert, fixtures::term(trs, "times(S(S(Z)), S(Z))"), {.width = 2});
  const bool golden =
      !fig.steps.empty() && to_string(trs.signature(), cert.tiering, fig.steps[0].from_seq) == "[times^n(S(S(Z)), S(Z))]";
  return {violations == 0 && golden,
          std::to_string(starts) + " start terms, " + std::to_string(steps) + " steps, " + std::to_string(violations) +
              " violations" + (golden ? "" : ", running example differs") + (first.empty() ? "" : ": " + first)};
}

Outcome sequence_laws() {
  const auto a = laws::approx_laws(101, approx_cases);
  const auto s = laws::slowsum_laws(103, slowsum_cases);
  const bool ok = a.failures == 0 && s.failures == 0 && a.cases >= approx_cases;
  return {ok, std::to_string(a.cases) + " pairs (" + std::to_string(a.positives) + " related), " +
                  std::to_string(s.cases) + " sums, " + std::to_string(a.failures + s.failures) + " failures" +
                  (a.first.empty() ? "" : ": " + a.first) + (s.first.empty() ? "" : ": " + s.first)};
}

Outcome slow_bounds() {
  const auto start = Clock::now();
  const Trs trs = fixtures::square();
  const Certificate cert = fixtures::square_cert(trs);
  const NormalizedSignature sig = normalized_signature(trs.signature(), cert.tiering);
  const auto values = fixtures::numerals_up_to(trs, 3);
  std::size_t checked = 0;
  for (SymbolId f : trs.defined_symbols()) {
    std::size_t normal = 0;
    for (std::size_t i = 0; i < trs.signature().arity(f); ++i) normal += cert.tiering.is_normal(f, i);
    std::vector<std::size_t> pick(normal, 0);
    while (true) {
      std::vector<Term> args;
      for (std::size_t i : pick) args.push_back(values[i]);
      check_slow_bound(cert.precedence, cert.tiering, 2, sig, f, args);
      ++checked;
      std::size_t i = 0;
      while (i < normal && ++pick[i] == values.size()) pick[i++] = 0;
      if (i == normal) break;
    }
  }
  const double t = since(start);
  return {t < slow_bound_seconds, std::to_string(checked) + " bounds hold, " + fmt(t) + " s"};
}

Outcome bwsc() {
  const auto b = laws::bwsc_laws(107, bwsc_cases, 4);
  return {b.failures == 0 && b.cases >= 100,
          std::to_string(b.cases) + " expressions (depths " + std::to_string(b.by_depth[0]) + "/" +
              std::to_string(b.by_depth[1]) + "/" + std::to_string(b.by_depth[2]) + "), " +
              std::to_string(b.evaluations) + " runs, " + std::to_string(b.failures) + " failures" +
              (b.first.empty() ? "" : ": " + b.first)};
}

Outcome orders() {
  const auto o = laws::order_laws(109, order_cases);
  return {o.failures == 0 && o.cases >= order_cases,
          std::to_string(o.cases) + " pairs (" + std::to_string(o.positives) + " oriented), " +
              std::to_string(o.failures) + " failures" + (o.first.empty() ? "" : ": " + o.first)};
}

}  // namespace

int main() {
  criterion(1, "square certified at degree 2", square_check);
  criterion(2, "reversal needs parameter substitution", reversal);
  criterion(3, "family R_d at degree d with n^d lower bound", families);
  criterion(4, "square derivation height grows as n^2", growth);
  criterion(5, "innermost steps embed into the sequence order", embedding);
  criterion(6, "sequence order and slow laws", sequence_laws);
  criterion(7, "slow bound below square, times, plus", slow_bounds);
  criterion(8, "B_wsc programs compile at their nesting depth", bwsc);
  criterion(9, "path order laws", orders);
  return failed == 0 ? 0 : 1;
}
