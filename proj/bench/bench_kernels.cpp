// Serial reference against OpenMP execution for the parallel kernels.

#include <benchmark/benchmark.h>

#include "spop/bwsc.hpp"
#include "spop/formats.hpp"
#include "spop/orders.hpp"
#include "spop/predicative.hpp"
#include "spop/synthesis.hpp"

namespace {

const char* square_trs = R"(
(VAR x y)
(RULES
  plus(Z; y) -> y
  plus(S(;x); y) -> S(;plus(x; y))
  times(Z, y;) -> Z
  times(S(;x), y;) -> plus(y; times(x, y;))
  square(x;) -> times(x, x;)
)
)";

const char* square_cert = R"(precedence: square > times > plus > S ~ Z
recursive: plus times
safe: plus 2
variant: spop
)";

spop::Execution exec_of(const benchmark::State& state) {
  return state.range(0) ? spop::Execution::parallel : spop::Execution::serial;
}

void BM_Compatibility(benchmark::State& state) {
  // A deep B_wsc program gives many rules to orient.
  using spop::BwscExpr;
  BwscExpr e = BwscExpr::proj(0, 1, 1);
  const BwscExpr step = BwscExpr::wsc(1, 2, BwscExpr::succ(0), {}, {BwscExpr::proj(1, 2, 3)});
  e = BwscExpr::srn(e, step, step);
  for (std::size_t k = 1; k <= 3; ++k) {
    std::vector<std::size_t> rest;
    for (std::size_t i = 2; i <= k + 1; ++i) rest.push_back(i);
    const BwscExpr h = BwscExpr::wsc(k + 1, 2, e, rest, {BwscExpr::proj(k + 1, 2, k + 3)});
    e = BwscExpr::srn(BwscExpr::proj(k, 1, k + 1), h, h);
  }
  const auto compiled = spop::compile_to_trs(e);
  for (auto _ : state) {
    auto r = spop::check_compatibility(compiled.trs, compiled.certificate, {}, exec_of(state));
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Compatibility)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Embedding(benchmark::State& state) {
  const spop::Trs trs = spop::parse_trs(square_trs);
  const spop::Certificate cert = spop::parse_certificate(square_cert, trs);
  const spop::Term start = spop::parse_term("square(S^4(Z))", trs.signature());
  spop::EmbeddingOptions options;
  options.exec = exec_of(state);
  for (auto _ : state) {
    auto r = spop::verify_embedding(trs, cert, start, options);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Embedding)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Synthesis(benchmark::State& state) {
  const spop::Trs trs = spop::gen_family(2);
  spop::SynthesisOptions options;
  options.exec = exec_of(state);
  for (auto _ : state) {
    auto r = spop::synthesize(trs, spop::Variant::spop, {}, options);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Synthesis)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
