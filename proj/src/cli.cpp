#include "spop/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "spop/bwsc.hpp"
#include "spop/error.hpp"
#include "spop/formats.hpp"
#include "spop/orders.hpp"
#include "spop/predicative.hpp"
#include "spop/rewriting.hpp"
#include "spop/synthesis.hpp"

namespace spop {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::string read_input(const std::string& path, std::istream& in) {
  std::ostringstream buf;
  if (path == "-") {
    buf << in.rdbuf();
    return buf.str();
  }
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error("cannot open " + path);
  buf << file.rdbuf();
  return buf.str();
}

// Parse errors carry line:col; prefix the file name.
template <typename F>
auto parse_file(const std::string& path, std::istream& in, F parse) {
  const std::string text = read_input(path, in);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw Error(path + ":" + e.what());
  }
}

std::string bound_text(std::size_t d) {
  if (d == 0) return "O(1)";
  if (d == 1) return "O(n)";
  return "O(n^" + std::to_string(d) + ")";
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string word_text(const Word& w) { return w.empty() ? "ε" : w; }

Word parse_word(const std::string& s) {
  if (s == "ε" || s == "eps" || s == "e") return {};
  if (!is_word(s)) throw Error("not a binary word: " + s);
  return s;
}

struct Common {
  std::size_t fuel = default_fuel;
  std::string variant;
  bool strict_safe = false;
  bool json = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_variant) {
  cmd->add_option("--fuel", c.fuel, "Step/work budget for rewriting and measures")->check(CLI::PositiveNumber);
  if (with_variant)
    cmd->add_option("--variant", c.variant, "Order variant: spop or spop_ps (overrides the certificate)");
  cmd->add_flag("--strict-safe", c.strict_safe, "Compare safe tuples of recursive calls strictly");
  cmd->add_flag("--json", c.json, "Print a JSON report");
}

Variant variant_of(const std::string& text) {
  const auto v = parse_variant(text);
  if (!v) throw Error("unknown variant '" + text + "'");
  return *v;
}

json proof_summaries(const Trs& trs, const Certificate& cert, const DegreeReport& report) {
  json rules = json::array();
  const Signature& sig = trs.signature();
  for (std::size_t i = 0; i < trs.rules().size(); ++i) {
    const Rule& r = trs.rules()[i];
    const OrientationProof& p = report.proofs[i];
    rules.push_back({{"rule", to_string(sig, r.lhs, &cert.tiering) + " -> " + to_string(sig, r.rhs, &cert.tiering)},
                     {"clause", std::string(to_string(p.clause))},
                     {"proof_nodes", p.node_count()}});
  }
  return rules;
}

// ------------------------------------------------------------------ check

int cmd_check(const std::string& trs_file, const std::string& cert_file, const Common& c, std::istream& in,
              std::ostream& out) {
  const auto t0 = Clock::now();
  const Trs trs = parse_file(trs_file, in, [](const std::string& t) { return parse_trs(t); });
  Certificate cert = parse_file(cert_file, in, [&](const std::string& t) { return parse_certificate(t, trs); });
  if (!c.variant.empty()) cert.variant = variant_of(c.variant);
  if (!is_constructor_trs(trs)) throw Error("not a constructor system");
  json report;
  int code = exit_certified;
  std::string text;
  if (const auto problems = certificate_problems(trs, cert); !problems.empty()) {
    report["verdict"] = "refuted";
    report["failure"] = problems.front();
    text = "verdict: refuted\nfailure: " + problems.front() + "\n";
    code = exit_refuted;
  } else {
    const Compatibility compat = check_compatibility(trs, cert, OrderOptions{c.strict_safe});
    if (compat) {
      const std::size_t d = compat.report->degree;
      report["verdict"] = "certified";
      report["variant"] = std::string(to_string(cert.variant));
      report["degree"] = d;
      report["bound"] = bound_text(d);
      report["rules"] = proof_summaries(trs, cert, *compat.report);
      report["certificate"] = print_certificate(trs.signature(), cert);
      text = "verdict: certified\nvariant: " + std::string(to_string(cert.variant)) +
             "\ndegree: " + std::to_string(d) + "\nbound: " + bound_text(d) + "\n";
      for (const auto& r : report["rules"])
        text += "  " + r["rule"].get<std::string>() + "  [" + r["clause"].get<std::string>() + ", " +
                std::to_string(r["proof_nodes"].get<std::size_t>()) + " nodes]\n";
    } else {
      const auto& f = *compat.failure;
      report["verdict"] = "refuted";
      report["failure"] = f.obligation;
      if (f.rule != CompatibilityFailure::npos) report["rule"] = f.rule + 1;
      text = "verdict: refuted\nfailure: " + f.obligation + "\n";
      code = exit_refuted;
    }
  }
  report["time_ms"] = ms_since(t0);
  if (c.json)
    out << report.dump(2) << '\n';
  else
    out << text;
  return code;
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
  std::size_t max_degree = SearchBudget{}.max_degree;
  std::size_t budget_ms = static_cast<std::size_t>(SearchBudget{}.time_limit.count());
  std::size_t max_candidates = SearchBudget{}.max_candidates;
  bool free_splits = false;
};

int cmd_synth(const std::string& trs_file, const Common& c, const SynthArgs& a, std::istream& in, std::ostream& out,
              std::ostream& err) {
  const auto t0 = Clock::now();
  const Trs trs = parse_file(trs_file, in, [](const std::string& t) { return parse_trs(t); });
  const Variant variant = c.variant.empty() ? Variant::spop : variant_of(c.variant);
  SearchBudget budget;
  budget.max_degree = a.max_degree;
  budget.time_limit = std::chrono::milliseconds(a.budget_ms);
  budget.max_candidates = a.max_candidates;
  SynthesisOptions options;
  options.order.strict_safe_products = c.strict_safe;
  options.free_splits = a.free_splits;
  const SynthesisResult r = synthesize(trs, variant, budget, options);
  json report;
  std::string verdict = r ? "certified" : r.budget_exhausted ? "unknown" : "refuted";
  report["verdict"] = verdict;
  report["variant"] = std::string(to_string(variant));
  report["candidates"] = r.candidates;
  json levels = json::array();
  for (const SearchLevel& l : r.levels)
    levels.push_back({{"degree", l.degree}, {"candidates", l.candidates}, {"exhausted", l.exhausted}});
  report["levels"] = levels;
  if (r) {
    report["degree"] = r.report->degree;
    report["bound"] = bound_text(r.report->degree);
    report["rules"] = proof_summaries(trs, *r.certificate, *r.report);
    report["certificate"] = print_certificate(trs.signature(), *r.certificate);
  }
  report["time_ms"] = ms_since(t0);
  if (c.json) {
    out << report.dump(2) << '\n';
  } else if (r) {
    out << print_certificate(trs.signature(), *r.certificate);
    err << "certified: degree " << r.report->degree << ", " << bound_text(r.report->degree) << '\n';
  } else if (r.budget_exhausted) {
    err << "unknown: search budget exhausted after " << r.candidates << " candidates\n";
  } else {
    err << "refuted: no certificate up to degree " << (r.levels.empty() ? 0 : r.levels.back().degree) << '\n';
  }
  return r ? exit_certified : r.budget_exhausted ? exit_exhausted : exit_refuted;
}

// ---------------------------------------------------------------- measure

struct MeasureArgs {
  std::size_t from = 1;
  std::size_t to = 10;
  bool serial = false;
};

int cmd_measure(const std::string& trs_file, const std::string& pattern, const Common& c, const MeasureArgs& a,
                std::istream& in, std::ostream& out) {
  const Trs trs = parse_file(trs_file, in, [](const std::string& t) { return parse_trs(t); });
  if (a.to < a.from) throw Error("empty range");
  const std::size_t count = a.to - a.from + 1;
  std::vector<Term> terms;
  for (std::size_t n = a.from; n <= a.to; ++n) {
    Term t = [&] {
      try {
        return parse_term(pattern, trs.signature(), n);
      } catch (const ParseError& e) {
        throw Error(std::string("pattern:") + e.what());
      }
    }();
    if (!is_basic(trs, t)) throw Error("pattern does not instantiate to a basic term at n = " + std::to_string(n));
    terms.push_back(std::move(t));
  }
  std::vector<std::optional<std::size_t>> heights(count);
  auto measure = [&](std::size_t i) {
    try {
      heights[i] = derivation_height(trs, terms[i], c.fuel);
    } catch (const FuelExceeded&) {
      heights[i].reset();
    }
  };
  if (a.serial) {
    for (std::size_t i = 0; i < count; ++i) measure(i);
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) measure(static_cast<std::size_t>(i));
  }
  bool exhausted = false;
  out << "n,dh,status\n";
  for (std::size_t i = 0; i < count; ++i) {
    out << a.from + i << ',';
    if (heights[i]) {
      out << *heights[i] << ",ok\n";
    } else {
      out << ",fuel\n";
      exhausted = true;
    }
  }
  return exhausted ? exit_exhausted : exit_certified;
}

// ------------------------------------------------------------ embed-check

int cmd_embed(const std::string& trs_file, const std::string& cert_file, const std::string& start, const Common& c,
              std::optional<std::size_t> width, std::istream& in, std::ostream& out) {
  const auto t0 = Clock::now();
  const Trs trs = parse_file(trs_file, in, [](const std::string& t) { return parse_trs(t); });
  Certificate cert = parse_file(cert_file, in, [&](const std::string& t) { return parse_certificate(t, trs); });
  if (!c.variant.empty()) cert.variant = variant_of(c.variant);
  const Term t = [&] {
    try {
      return parse_term(start, trs.signature());
    } catch (const ParseError& e) {
      throw Error(std::string("term:") + e.what());
    }
  }();
  json report;
  report["start"] = to_string(trs.signature(), t, &cert.tiering);
  if (const auto problems = certificate_problems(trs, cert); !problems.empty()) {
    report["verdict"] = "refuted";
    report["failure"] = problems.front();
    if (c.json)
      out << report.dump(2) << '\n';
    else
      out << "verdict: refuted\nfailure: " << problems.front() << '\n';
    return exit_refuted;
  }
  EmbeddingOptions options;
  options.fuel = c.fuel;
  options.width = width;
  int code = exit_certified;
  try {
    const EmbeddingReport r = verify_embedding(trs, cert, t, options);
    report["verdict"] = "embedded";
    report["width"] = r.width;
    report["terms"] = r.terms;
    report["steps"] = r.steps.size();
  } catch (const EmbeddingViolation& e) {
    report["verdict"] = "violated";
    report["failure"] = e.what();
    code = exit_refuted;
  } catch (const NotInTn& e) {
    report["verdict"] = "violated";
    report["failure"] = e.what();
    code = exit_refuted;
  } catch (const FuelExceeded& e) {
    report["verdict"] = "unknown";
    report["failure"] = e.what();
    code = exit_exhausted;
  }
  report["time_ms"] = ms_since(t0);
  if (c.json) {
    out << report.dump(2) << '\n';
  } else {
    out << "verdict: " << report["verdict"].get<std::string>() << '\n';
    if (code == exit_certified)
      out << "width: " << report["width"] << "\nterms: " << report["terms"] << "\nsteps: " << report["steps"] << '\n';
    else
      out << "failure: " << report["failure"].get<std::string>() << '\n';
  }
  return code;
}

// ------------------------------------------------------------------- slow

int cmd_slow(const std::string& trs_file, const std::string& cert_file, const std::string& symbol,
             const std::vector<std::string>& values, std::size_t width, const Common& c, std::istream& in,
             std::ostream& out) {
  const Trs trs = parse_file(trs_file, in, [](const std::string& t) { return parse_trs(t); });
  const Certificate cert = parse_file(cert_file, in, [&](const std::string& t) { return parse_certificate(t, trs); });
  const Signature& sig = trs.signature();
  const auto f = sig.find_symbol(symbol);
  if (!f || !trs.is_defined(*f)) throw Error("'" + symbol + "' is not a defined symbol");
  if (values.size() != cert.tiering.normal_count(*f))
    throw Error("'" + symbol + "' has " + std::to_string(cert.tiering.normal_count(*f)) + " normal arguments");
  std::vector<Term> args;
  for (const std::string& v : values) {
    Term t = [&] {
      try {
        return parse_term(v, sig);
      } catch (const ParseError& e) {
        throw Error(std::string("value:") + e.what());
      }
    }();
    if (!is_value(trs, t)) throw Error("'" + v + "' is not a value");
    args.push_back(std::move(t));
  }
  json report;
  int code = exit_certified;
  try {
    const SlowBound b =
        check_slow_bound(cert.precedence, cert.tiering, width, normalized_signature(sig, cert.tiering), *f, args, c.fuel);
    report = {{"verdict", "bounded"}, {"rank", b.rank},   {"depth", b.depth},     {"constant", b.constant},
              {"argument_depth", b.argument_depth},       {"bound", b.bound},     {"largest", b.largest}};
  } catch (const BoundViolation& e) {
    report = {{"verdict", "violated"}, {"failure", e.what()}};
    code = exit_refuted;
  } catch (const FuelExceeded& e) {
    report = {{"verdict", "unknown"}, {"failure", e.what()}};
    code = exit_exhausted;
  }
  if (c.json) {
    out << report.dump(2) << '\n';
  } else {
    for (const auto& [k, v] : report.items())
      out << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
  return code;
}

// ------------------------------------------------------------------- bwsc

int cmd_bwsc(const std::string& sub, const std::string& prog_file, const std::string& def,
             const std::vector<std::string>& normals, const std::vector<std::string>& safes,
             const std::string& cert_out, const Common& c, std::istream& in, std::ostream& out) {
  const BwscProgram prog = parse_file(prog_file, in, [](const std::string& t) { return parse_bwsc_program(t); });
  const BwscExpr* e = def.empty() ? &prog.main() : prog.find(def);
  if (!e) throw Error("no definition named '" + def + "'");
  if (sub == "eval") {
    std::vector<Word> x, y;
    for (const auto& w : normals) x.push_back(parse_word(w));
    for (const auto& w : safes) y.push_back(parse_word(w));
    out << word_text(eval(*e, x, y)) << '\n';
    return exit_certified;
  }
  const CompiledBwsc compiled = compile_to_trs(*e);
  const Signature& sig = compiled.trs.signature();
  if (sub == "compile") {
    out << print_trs(compiled.trs);
    if (!cert_out.empty()) {
      std::ofstream file(cert_out, std::ios::binary);
      if (!file) throw Error("cannot write " + cert_out);
      file << print_certificate(sig, compiled.certificate);
    } else {
      std::istringstream lines(print_certificate(sig, compiled.certificate));
      for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
    }
    return exit_certified;
  }
  const Compatibility compat = check_compatibility(compiled.trs, compiled.certificate, OrderOptions{c.strict_safe});
  const std::size_t depth = nesting_depth(*e);
  json report;
  report["nesting_depth"] = depth;
  report["rules"] = compiled.trs.rules().size();
  report["variant"] = std::string(to_string(compiled.certificate.variant));
  int code = exit_certified;
  if (compat) {
    report["verdict"] = compat.report->degree == depth ? "certified" : "degree mismatch";
    report["degree"] = compat.report->degree;
    report["bound"] = bound_text(compat.report->degree);
    if (compat.report->degree != depth) code = exit_refuted;
  } else {
    report["verdict"] = "refuted";
    report["failure"] = compat.failure->obligation;
    code = exit_refuted;
  }
  if (c.json) {
    out << report.dump(2) << '\n';
  } else {
    for (const auto& [k, v] : report.items())
      out << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certify polynomial innermost runtime of rewrite systems with small polynomial path orders", "spop"};
  app.require_subcommand(1);
  Common common;

  std::string trs_file, cert_file, start, pattern, symbol, prog_file, def, cert_out;
  std::vector<std::string> values, normals, safes;
  std::size_t width_value = 2;
  std::optional<std::size_t> width;
  std::size_t family = 0;
  SynthArgs synth;
  MeasureArgs measure;

  auto* check = app.add_subcommand("check", "Check a certificate against a system");
  check->add_option("trs", trs_file, "Rewrite system ('-' for stdin)")->required();
  check->add_option("cert", cert_file, "Certificate")->required();
  add_common(check, common, true);

  auto* syn = app.add_subcommand("synth", "Search for a certificate of minimal degree");
  syn->add_option("trs", trs_file, "Rewrite system ('-' for stdin)")->required();
  add_common(syn, common, true);
  syn->add_option("--max-degree", synth.max_degree, "Largest degree searched")->check(CLI::PositiveNumber);
  syn->add_option("--budget-ms", synth.budget_ms, "Time budget in milliseconds")->check(CLI::PositiveNumber);
  syn->add_option("--max-candidates", synth.max_candidates, "Search nodes budget")->check(CLI::PositiveNumber);
  syn->add_flag("--free-splits", synth.free_splits, "Search splits even where the system declares them");

  auto* mea = app.add_subcommand("measure", "Derivation heights of a term family, as CSV");
  mea->add_option("trs", trs_file, "Rewrite system ('-' for stdin)")->required();
  mea->add_option("pattern", pattern, "Term with f^n(t) for n-fold application")->required();
  mea->add_option("--from", measure.from, "First n");
  mea->add_option("--to", measure.to, "Last n");
  mea->add_flag("--serial", measure.serial, "Measure one term at a time");
  add_common(mea, common, false);

  auto* emb = app.add_subcommand("embed-check", "Check that every reachable innermost step embeds");
  emb->add_option("trs", trs_file, "Rewrite system")->required();
  emb->add_option("cert", cert_file, "Certificate")->required();
  emb->add_option("term", start, "Start term")->required();
  auto* emb_width = emb->add_option("--width", width_value, "Width of the sequence order")->check(CLI::PositiveNumber);
  add_common(emb, common, true);

  auto* slw = app.add_subcommand("slow", "Check the bound on descending chains below f(values)");
  slw->add_option("trs", trs_file, "Rewrite system")->required();
  slw->add_option("cert", cert_file, "Certificate")->required();
  slw->add_option("symbol", symbol, "Defined symbol")->required();
  slw->add_option("values", values, "Values for the normal arguments");
  slw->add_option("--width", width_value, "Width of the sequence order")->check(CLI::PositiveNumber);
  add_common(slw, common, false);

  auto* bw = app.add_subcommand("bwsc", "Evaluate, compile or check a B_wsc program");
  bw->require_subcommand(1);
  std::string bw_sub;
  for (const char* name : {"eval", "compile", "check"}) {
    auto* s = bw->add_subcommand(name, name == std::string("eval")      ? "Evaluate the program"
                                       : name == std::string("compile") ? "Print the compiled rewrite system"
                                                                        : "Compile and certify the program");
    s->add_option("program", prog_file, "Program file ('-' for stdin)")->required();
    s->add_option("--def", def, "Definition to use instead of the last one");
    if (name == std::string("eval")) {
      s->add_option("--normal", normals, "Normal arguments (ε or e for the empty word)");
      s->add_option("--safe", safes, "Safe arguments");
    }
    if (name == std::string("compile")) s->add_option("--cert", cert_out, "Write the certificate to this file");
    if (name == std::string("check")) add_common(s, common, false);
    s->callback([&bw_sub, name] { bw_sub = name; });
  }

  auto* gen = app.add_subcommand("gen-family", "Print the system R_d whose runtime is at least n^d");
  gen->add_option("d", family, "Degree")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_certified : exit_input_error;
  }

  try {
    if (*check) return cmd_check(trs_file, cert_file, common, in, out);
    if (*syn) return cmd_synth(trs_file, common, synth, in, out, err);
    if (*mea) return cmd_measure(trs_file, pattern, common, measure, in, out);
    if (*emb) {
      if (*emb_width) width = width_value;
      return cmd_embed(trs_file, cert_file, start, common, width, in, out);
    }
    if (*slw) return cmd_slow(trs_file, cert_file, symbol, values, width_value, common, in, out);
    if (*bw) return cmd_bwsc(bw_sub, prog_file, def, normals, safes, cert_out, common, in, out);
    if (*gen) {
      out << print_trs(gen_family(family));
      return exit_certified;
    }
  } catch (const FuelExceeded& e) {
    err << "error: " << e.what() << '\n';
    return exit_exhausted;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_input_error;
  }
  return exit_input_error;
}

}  // namespace spop
