#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "eqpe/bench.hpp"
#include "eqpe/embedding.hpp"
#include "eqpe/generalization.hpp"
#include "eqpe/printer.hpp"
#include "support.hpp"

using namespace eqpe;
using namespace eqpe::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::vector<std::pair<Term, Term>> pairs(const Theory& th,
                                         std::initializer_list<std::pair<const char*, const char*>> texts) {
  std::vector<std::pair<Term, Term>> out;
  for (const auto& [l, r] : texts) out.emplace_back(term(th, l), term(th, r));
  return out;
}

std::vector<Equation> as_equations(const std::vector<Resultant>& rs) {
  std::vector<Equation> out;
  for (const auto& r : rs) out.push_back({"", r.lhs, r.rhs});
  return out;
}

SpecializeResult run(const Module& m, const std::string& call, bool rename_calls = true) {
  return specialize(m.theory, {term(m, call)}, {}, rename_calls, module_renames(m));
}

void golden_parser(Verdict& v) {
  auto t0 = Clock::now();
  auto p = load("parser.fmod");
  auto r = run(p, "init | L | G-PRODUCTIONS");
  double secs = seconds_since(t0);
  const Theory& th = *r.program;
  v.require(same_equations(th, th.equations(),
                           pairs(th, {{"finit(eps)", "feps"},
                                      {"finit(0 L:String)", "finit(L:String)"},
                                      {"finit(1)", "feps"},
                                      {"finit(1 1 L:String)", "fS(L:String)"},
                                      {"fS(eps)", "feps"},
                                      {"fS(1 L:String)", "fS(L:String)"}})),
            "program:\n" + show(th, th.equations()));
  v.require(secs < 10, "runtime");
  v.detail << th.equations().size() << " equations in " << secs << " s";
}

void golden_flip_tree(Verdict& v) {
  auto t0 = Clock::now();
  auto f = load("flip-tree.fmod");
  auto r = run(f, "flip(flip(T))");
  double secs = seconds_since(t0);
  const Theory& th = *r.program;
  v.require(same_equations(th, th.equations(),
                           pairs(th, {{"dflip(N:Nat)", "N:Nat"},
                                      {"dflip(L:NatTree {N:Nat} R:NatTree)",
                                       "dflip(L:NatTree) {N:Nat} dflip(R:NatTree)"}})),
            "program:\n" + show(th, th.equations()));
  v.require(secs < 5, "runtime");
  v.detail << th.equations().size() << " equations in " << secs << " s";
}

void golden_flip_fix(Verdict& v) {
  auto t0 = Clock::now();
  auto m = load("flip-fix-mutated.fmod");
  const Theory& mt = *m.theory;
  auto plain = run(m, "flip(fix(2, e, flip(BG)))", false);
  v.require(same_equations(mt, as_equations(plain.resultants),
                           pairs(mt, {{"flip(fix(2, e, flip(mt)))", "mt"},
                                      {"flip(fix(2, e, flip({R1 I R2} ; BG)))", "{R1 I R2} ; flip(flip(BG))"},
                                      {"flip(flip(mt))", "mt"},
                                      {"flip(flip({R1 I R2} ; BG))", "{R1 I R2} ; flip(flip(BG))"}})),
            "resultants:\n" + show(mt, as_equations(plain.resultants)));
  auto named = run(m, "flip(fix(2, e, flip(BG)))");
  const Theory& th = *named.program;
  v.require(same_equations(th, th.equations(),
                           pairs(th, {{"dflip-fix(mt)", "mt"},
                                      {"dflip-fix({R1:Ref I:Id R2:Ref} ; BG:BinGraph)",
                                       "{R1:Ref I:Id R2:Ref} ; dflip(BG:BinGraph)"},
                                      {"dflip(mt)", "mt"},
                                      {"dflip({R1:Ref I:Id R2:Ref} ; BG:BinGraph)",
                                       "{R1:Ref I:Id R2:Ref} ; dflip(BG:BinGraph)"}})),
            "program:\n" + show(th, th.equations()));
  double secs = seconds_since(t0);
  v.require(secs < 30, "runtime");
  v.detail << plain.resultants.size() << " resultants, " << th.equations().size() << " renamed equations in " << secs
           << " s";
}

void best_matching_terms(Verdict& v) {
  auto m = module_from(R"(fmod XOR is sort S . op 1 : -> S . op g : S -> S .
                          op _(+)_ : S S -> S [assoc comm] . vars X Y Z W : S . endfm)");
  const Theory& th = *m.theory;
  auto d = bmt_detail({term(m, "1 (+) g(X)"), term(m, "X (+) g(1)"), term(m, "X (+) Y")}, term(m, "g(1) (+) 1 (+) g(Y)"),
                      th);
  v.require(d.w.size() == 3, "three generalizer sets");
  if (d.w.size() != 3) return;
  v.require(same_terms(th, d.w[0], {term(m, "Z (+) 1"), term(m, "Z (+) g(W)")}), "W1 = " + show(th, d.w[0]));
  v.require(same_terms(th, d.w[1], {term(m, "Z (+) g(1)")}), "W2 = " + show(th, d.w[1]));
  v.require(same_terms(th, d.w[2], {term(m, "Z (+) W")}), "W3 = " + show(th, d.w[2]));
  v.require(same_terms(th, d.m, {term(m, "Z (+) 1"), term(m, "Z (+) g(1)")}), "M = " + show(th, d.m));
  v.require(same_terms(th, d.best, {term(m, "1 (+) g(X)"), term(m, "X (+) g(1)")}), "BMT = " + show(th, d.best));
  v.detail << "BMT = " << show(th, d.best);
}

void whistle(Verdict& v) {
  auto m = load("flip-fix.fmod");
  bool fires = embeds_modulo(term(m, "flip(fix(2, e, flip(BG)))"),
                             term(m, "flip(fix(2, e, flip(BG2:BinGraph) ; {R2 I R1}))"), *m.theory);
  auto f = load("flip-tree.fmod");
  bool quiet = !embeds_modulo(term(f, "flip(flip(BG:NatTree))"), term(f, "flip(N)"), *f.theory);
  v.require(fires, "growing fixed-graph call");
  v.require(quiet, "double flip against single flip");
  v.detail << "fires on the growing call: " << fires << ", silent on flip(N): " << quiet;
}

struct BenchCase {
  std::string name;
  std::string file;
  std::string call;
  std::string tmpl;
  InputKind input;
};

void benchmark(Verdict& v) {
  auto t0 = Clock::now();
  const std::vector<BenchCase> cases{
      {"parser", "parser.fmod", "init | L | G-PRODUCTIONS", "init | HOLE:String | G-PRODUCTIONS", InputKind::string},
      {"double-flip", "graph.fmod", "flip(flip(BG))", "flip(flip(HOLE:BinGraph))", InputKind::graph},
      {"flip-fix", "flip-fix-mutated.fmod", "flip(fix(2, e, flip(BG)))", "flip(fix(2, e, flip(HOLE:BinGraph)))",
       InputKind::graph}};
  for (const auto& c : cases) {
    auto m = load(c.file);
    const Theory& th = *m.theory;
    auto r = run(m, c.call);
    CompiledTheory orig(m.theory), spec(r.program);
    Term call = fill_template(th, term(m, c.tmpl), generate_input(th, c.input, 100000, 1));
    Term spec_call = r.renaming->forward(call);
    Term a, b;
    auto po = measure(orig, call, 10, &a);
    auto ps = measure(spec, spec_call, 10, &b);
    v.require(eq_modulo(th, normalize(r.renaming->backward(b), orig), a), c.name + " results differ");
    double imp = improvement(po.ms, ps.ms);
    double speedup = ps.ms > 0 ? po.ms / ps.ms : 0;
    double fewer = ps.match_attempts ? static_cast<double>(po.match_attempts) / ps.match_attempts : 0;
    v.detail << c.name << ": " << po.ms << " -> " << ps.ms << " ms (" << imp << "%), matches " << po.match_attempts
             << " -> " << ps.match_attempts << "; ";
    if (c.name == "parser") {
      v.require(speedup >= 2, "parser speedup " + std::to_string(speedup));
      v.require(fewer >= 2, "parser match ratio " + std::to_string(fewer));
    } else {
      v.require(imp > 0, c.name + " improvement");
    }
  }
  double secs = seconds_since(t0);
  v.require(secs < 300, "runtime");
  v.detail << "total " << secs << " s";
}

void semantics(Verdict& v) {
  std::size_t checks = 0;
  for (const auto& ex : bundled_calls()) {
    auto rep = semantic_preservation(ex, 200, 2024);
    checks += rep.checks;
    v.require(rep.ok(), rep.summary());
  }
  v.detail << checks << " ground instances";
}

void solver(Verdict& v) {
  auto t0 = Clock::now();
  auto rep = solver_oracle(8, 1000, 300);
  double secs = seconds_since(t0);
  v.require(rep.ok(), rep.summary());
  v.require(secs < 120, "runtime");
  v.detail << rep.checks << " problems, " << rep.witnesses << " enumerated solutions in " << secs << " s";
}

void closed(Verdict& v) {
  std::size_t checks = 0;
  for (const auto& ex : bundled_calls()) {
    auto m = load(ex.file);
    for (bool renamed : {false, true}) {
      auto r = run(m, ex.call, renamed);
      auto rep = closedness(r, *m.theory);
      checks += rep.checks;
      v.require(rep.ok(), ex.file + ": " + rep.summary());
    }
  }
  v.detail << checks << " resultants";
}

void termination(Verdict& v) {
  for (const auto& ex : bundled_calls()) {
    auto m = load(ex.file);
    CompiledTheory ct(m.theory);
    PeOptions opts;
    opts.max_iterations = 50;
    opts.max_depth = 25;
    try {
      auto st = eqnpe(ct, {term(m, ex.call)}, opts);
      v.detail << ex.file << " " << st.iterations << " iterations; ";
    } catch (const std::exception& e) {
      v.require(false, ex.file + ": " + e.what());
    }
  }
  auto m = load("chain.fmod");
  CompiledTheory ct(m.theory);
  auto t0 = Clock::now();
  bool raised = false;
  try {
    eqnpe(ct, {term(m, "f0(X)")});
  } catch (const NonConvergence&) {
    raised = true;
  }
  double secs = seconds_since(t0);
  v.require(raised, "chain theory converged");
  v.require(secs < 60, "runtime");
  v.detail << "chain: NonConvergence after " << secs << " s";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"parser golden program", golden_parser},
      {"deforestation golden program", golden_flip_tree},
      {"flip-fix golden program", golden_flip_fix},
      {"best matching terms", best_matching_terms},
      {"whistle", whistle},
      {"benchmark direction", benchmark},
      {"semantic preservation", semantics},
      {"solver oracle", solver},
      {"closedness", closed},
      {"termination guard", termination},
  };
  int failed = 0;
  run_with_stack([&] {
    for (std::size_t i = 0; i < criteria.size(); ++i) {
      Verdict v;
      try {
        criteria[i].second(v);
      } catch (const std::exception& e) {
        v.require(false, std::string("exception: ") + e.what());
      }
      failed += !v.pass;
      std::cout << (v.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": " << v.detail.str()
                << std::endl;
    }
  });
  return failed ? 1 : 0;
}
