#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "spop/cli.hpp"
#include "support.hpp"

using namespace spop;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "spop");
  std::vector<const char*> argv;
  for (auto& a : args) {
    if (a.rfind("@", 0) == 0) a = std::string(SPOP_CORPUS_DIR) + "/" + a.substr(1);
    argv.push_back(a.c_str());
  }
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str(), err.str()};
}

bool has(const std::string& text, const std::string& part) { return text.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("check") {
  const Run ok = run({"check", "@square.trs", "@square.cert"});
  CHECK(ok.code == exit_certified);
  CHECK(has(ok.out, "degree: 2"));
  CHECK(has(ok.out, "[ts") == false);
  CHECK(has(ok.out, "times(S(x), y;) -> plus(y; times(x, y;))  [ia"));

  const Run ps = run({"check", "@rev.trs", "@rev_ps.cert"});
  CHECK(ps.code == exit_certified);
  CHECK(has(ps.out, "degree: 1"));

  const Run plain = run({"check", "@rev.trs", "@rev_ps.cert", "--variant", "spop"});
  CHECK(plain.code == exit_refuted);
  CHECK(has(plain.out, "verdict: refuted"));

  const Run strict = run({"check", "@square.trs", "@square.cert", "--strict-safe"});
  CHECK(strict.code == exit_refuted);

  const Run stdin_trs = run({"check", "-", "@square.cert"}, fixtures::square_text);
  CHECK(stdin_trs.code == exit_certified);

  const Run json = run({"check", "@square.trs", "@square.cert", "--json"});
  CHECK(json.code == exit_certified);
  CHECK(has(json.out, "\"degree\": 2"));
}

TEST_CASE("input errors") {
  CHECK(run({}).code == exit_input_error);
  CHECK(run({"frob"}).code == exit_input_error);
  CHECK(run({"check", "@square.trs"}).code == exit_input_error);
  const Run missing = run({"check", "@nowhere.trs", "@square.cert"});
  CHECK(missing.code == exit_input_error);
  CHECK_FALSE(missing.err.empty());
  const Run bad = run({"check", "-", "@square.cert"}, "(RULES f(");
  CHECK(bad.code == exit_input_error);
  CHECK(has(bad.err, "1:"));
  CHECK(run({"check", "@square.trs", "@square.cert", "--variant", "lpo"}).code == exit_input_error);
  CHECK(run({"slow", "@square.trs", "@square.cert", "times", "2"}).code == exit_input_error);
}

TEST_CASE("synth") {
  const Run sq = run({"synth", "@square.trs"});
  CHECK(sq.code == exit_certified);
  CHECK(has(sq.out, "recursive: plus times"));
  CHECK(has(sq.err, "degree 2"));

  const Run rv = run({"synth", "@rev.trs", "--variant", "spop"});
  CHECK(rv.code == exit_refuted);
  CHECK(has(rv.err, "up to degree 2"));
  CHECK(run({"synth", "@rev.trs", "--variant", "spop_ps"}).code == exit_certified);

  const Run budget = run({"synth", "@square.trs", "--max-candidates", "1"});
  CHECK(budget.code == exit_exhausted);
  CHECK(has(budget.err, "budget"));
}

TEST_CASE("measure") {
  const Run m = run({"measure", "@square.trs", "square(S^n(Z))", "--from", "0", "--to", "3"});
  CHECK(m.code == exit_certified);
  CHECK(m.out == "n,dh,status\n0,2,ok\n1,5,ok\n2,10,ok\n3,17,ok\n");
  const Run serial = run({"measure", "@square.trs", "square(S^n(Z))", "--from", "0", "--to", "3", "--serial"});
  CHECK(serial.out == m.out);
  const Run starved = run({"measure", "@square.trs", "square(S^n(Z))", "--to", "1", "--fuel", "3"});
  CHECK(starved.code == exit_exhausted);
  CHECK(has(starved.out, ",fuel"));
}

TEST_CASE("embed-check and slow") {
  const Run e = run({"embed-check", "@square.trs", "@square.cert", "square(S(S(Z)))"});
  CHECK(e.code == exit_certified);
  CHECK(has(e.out, "width: 5"));
  CHECK(has(e.out, "steps: 10"));

  const Run s = run({"slow", "@square.trs", "@square.cert", "times", "S(S(Z))", "S(Z)"});
  CHECK(s.code == exit_certified);
  CHECK(has(s.out, "constant: 73"));
  CHECK(has(s.out, "verdict: bounded"));
}

TEST_CASE("bwsc") {
  const Run e = run({"bwsc", "eval", "@append_zeros.bwsc", "--normal", "10", "--safe", "1"});
  CHECK(e.code == exit_certified);
  CHECK(e.out == "100\n");
  const Run n = run({"bwsc", "eval", "@nested.bwsc", "--normal", "1111", "--safe", "0"});
  CHECK(n.out == "0111111\n");
  const Run c = run({"bwsc", "check", "@nested.bwsc"});
  CHECK(c.code == exit_certified);
  CHECK(has(c.out, "nesting_depth: 2"));
  CHECK(has(c.out, "degree: 2"));
  const Run compiled = run({"bwsc", "compile", "@append_zeros.bwsc"});
  CHECK(compiled.code == exit_certified);
  CHECK(has(compiled.out, "(RULES"));
}

TEST_CASE("gen-family output parses back") {
  const Run g = run({"gen-family", "2"});
  CHECK(g.code == exit_certified);
  const Trs trs = parse_trs(g.out);
  CHECK(trs.defined_symbols().size() == 5);
  const Run s = run({"synth", "-"}, g.out);
  CHECK(s.code == exit_certified);
  CHECK(has(s.err, "degree 2"));
}
