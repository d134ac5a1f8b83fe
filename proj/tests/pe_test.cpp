#include <doctest.h>

#include <json.hpp>
#include <set>
#include <sstream>

#include "eqpe/matching.hpp"
#include "eqpe/printer.hpp"
#include "support.hpp"

using namespace eqpe;
using namespace eqpe::testing;

namespace {

std::vector<Term> calls(const Module& m, std::initializer_list<const char*> texts) {
  std::vector<Term> out;
  for (const char* t : texts) out.push_back(term(m, t));
  return out;
}

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

}  // namespace

TEST_SUITE("pe") {
  TEST_CASE("closedness of calls") {
    auto g = load("graph.fmod");
    CHECK(closed_modulo(calls(g, {"flip(flip(BG))"}), term(g, "{R1 I R2} ; flip(flip(BG2:BinGraph))"), *g.theory));
    CHECK(closed_modulo(calls(g, {"flip(flip(BG))"}), term(g, "BG"), *g.theory));
    CHECK(closed_modulo({}, term(g, "{# 1 #} ; mt"), *g.theory));
    CHECK_FALSE(closed_modulo({}, term(g, "flip(BG)"), *g.theory));
    // The binding of BG must itself be closed.
    CHECK_FALSE(closed_modulo(calls(g, {"flip(flip(BG))"}), term(g, "flip(flip(flip(BG)))"), *g.theory));

    auto m = load("flip-fix.fmod");
    CHECK_FALSE(closed_modulo(calls(m, {"flip(fix(2, e, flip(BG)))"}),
                              term(m, "flip(fix(2, e, flip(BG2:BinGraph) ; {R2 I R1}))"), *m.theory));
  }

  TEST_CASE("closedness tries every matcher") {
    auto m = module_from(R"(fmod T is sort S . ops a b : -> S . op k : S -> S .
                            op _+_ : S S -> S [assoc comm] . ops g h : S -> S .
                            vars X Y : S . eq g(k(X)) = X . eq h(k(X)) = X . endfm)");
    const Theory& th = *m.theory;
    // Only one of the two AC matchers leaves g(a) to X; the other leaves
    // it to g(Y), with Y := a.
    Term t = term(m, "h(g(b) + g(a))");
    CHECK(closed_modulo(calls(m, {"h(X + g(Y))", "g(b)"}), t, th));
    CHECK(closed_modulo(calls(m, {"h(X + g(Y))", "g(a)"}), t, th));
    CHECK_FALSE(closed_modulo(calls(m, {"h(X + g(Y))"}), t, th));
  }

  TEST_CASE("maximal defined subterms") {
    auto g = load("graph.fmod");
    auto rs = redexes(term(g, "{R2 I R1} ; flip(BG) ; flip(flip(mt))"), *g.theory);
    CHECK(same_terms(*g.theory, rs, calls(g, {"flip(BG)", "flip(flip(mt))"})));
    CHECK(redexes(term(g, "{# 1 #}"), *g.theory).empty());
  }

  TEST_CASE("unfolding") {
    auto f = load("flip-tree.fmod");
    CompiledTheory fc(f.theory);
    auto trees = unfold(calls(f, {"flip(flip(T))"}), fc);
    REQUIRE(trees.size() == 1);
    for (const auto* n : leaves(trees[0])) CHECK(closed_modulo(calls(f, {"flip(flip(T))"}), n->term, *f.theory));

    auto m = load("flip-fix.fmod");
    CompiledTheory mc(m.theory);
    auto mt = unfold(calls(m, {"flip(fix(2, e, flip(BG)))"}), mc);
    REQUIRE(mt.size() == 1);
    std::size_t stopped = 0;
    for (const auto& n : mt[0].nodes) stopped += n.status == NodeStatus::stopped;
    CHECK(stopped == 1);

    auto g = load("graph.fmod");
    CompiledTheory gc(g.theory);
    auto single = unfold(calls(g, {"{# 1 #} ; {1 2 #}"}), gc);
    REQUIRE(single.size() == 1);
    CHECK(single[0].nodes.size() == 1);
  }

  TEST_CASE("abstraction") {
    auto m = load("flip-fix.fmod");
    const Theory& th = *m.theory;
    CompiledTheory ct(m.theory);
    auto q = calls(m, {"flip(fix(2, e, flip(BG)))"});
    CHECK(same_calls(th, abstract(q, {}, ct), q));

    auto w = abstract(q, calls(m, {"flip(fix(2, e, flip(BG2:BinGraph) ; {R2 I R1}))"}), ct);
    CHECK(same_calls(th, w, calls(m, {"flip(fix(2, e, flip(G1:BinGraph) ; G2:BinGraph))"})));

    auto w2 = abstract(w, calls(m, {"{R2 I R1} ; flip(G3:BinGraph)"}), ct);
    CHECK(same_calls(th, w2, calls(m, {"flip(fix(2, e, flip(G1:BinGraph) ; G2:BinGraph))", "flip(G3:BinGraph)"})));

    // Calls already covered by a renaming add nothing.
    CHECK(same_calls(th, abstract(q, calls(m, {"flip(fix(2, e, flip(BG2:BinGraph)))"}), ct), q));
  }

  TEST_CASE("final call sets") {
    auto p = load("parser.fmod");
    CompiledTheory pc(p.theory);
    auto ps = eqnpe(pc, calls(p, {"init | L | G-PRODUCTIONS"}));
    CHECK(same_calls(*p.theory, ps.q,
                     calls(p, {"init | L | G-PRODUCTIONS", "S | L | G-PRODUCTIONS", "eps | eps | G-PRODUCTIONS"})));

    auto f = load("flip-tree.fmod");
    CompiledTheory fc(f.theory);
    auto fs = eqnpe(fc, calls(f, {"flip(flip(T))"}));
    CHECK(same_calls(*f.theory, fs.q, calls(f, {"flip(flip(T))"})));
    CHECK(fs.iterations == 1);

    auto m = load("flip-fix-mutated.fmod");
    CompiledTheory mc(m.theory);
    auto ms = eqnpe(mc, calls(m, {"flip(fix(2, e, flip(BG)))"}));
    CHECK(same_calls(*m.theory, ms.q, calls(m, {"flip(fix(2, e, flip(BG)))", "flip(flip(BG2:BinGraph))"})));

    auto u = load("flip-fix.fmod");
    CompiledTheory uc(u.theory);
    auto us = eqnpe(uc, calls(u, {"flip(fix(2, e, flip(BG)))"}));
    CHECK(same_calls(*u.theory, us.q,
                     calls(u, {"flip(fix(2, e, G1:BinGraph ; flip(G2:BinGraph)))", "flip(G3:BinGraph)"})));
    CHECK(us.iterations == 3);
  }

  TEST_CASE("resultants") {
    auto f = load("flip-tree.fmod");
    const Theory& ft = *f.theory;
    auto fr = run(f, "flip(flip(T))", false);
    CHECK(same_equations(ft, as_equations(fr.resultants),
                         pairs(ft, {{"flip(flip(N))", "N"},
                                    {"flip(flip(L {N} R))", "flip(flip(L)) {N} flip(flip(R))"}})));
    for (const auto& r : fr.resultants)
      CHECK(eq_modulo(ft, apply(ft, r.subst, fr.state.q[r.call]), r.lhs));

    auto m = load("flip-fix-mutated.fmod");
    const Theory& mt = *m.theory;
    auto mr = run(m, "flip(fix(2, e, flip(BG)))", false);
    CHECK(same_equations(mt, as_equations(mr.resultants),
                         pairs(mt, {{"flip(fix(2, e, flip(mt)))", "mt"},
                                    {"flip(fix(2, e, flip({R1 I R2} ; BG)))", "{R1 I R2} ; flip(flip(BG))"},
                                    {"flip(flip(mt))", "mt"},
                                    {"flip(flip({R1 I R2} ; BG))", "{R1 I R2} ; flip(flip(BG))"}})));

    auto g = load("graph.fmod");
    CompiledTheory gc(g.theory);
    SpecializationState st;
    st.q = calls(g, {"{# 1 #}"});
    st.trees = unfold(st.q, gc);
    CHECK(extract_resultants(st, *g.theory).empty());
  }

  TEST_CASE("renamed programs") {
    auto p = load("parser.fmod");
    auto pr = run(p, "init | L | G-PRODUCTIONS");
    const Theory& pt = *pr.program;
    CHECK(same_equations(pt, pt.equations(),
                         pairs(pt, {{"finit(eps)", "feps"},
                                    {"finit(0 L:String)", "finit(L:String)"},
                                    {"finit(1)", "feps"},
                                    {"finit(1 1 L:String)", "fS(L:String)"},
                                    {"fS(eps)", "feps"},
                                    {"fS(1 L:String)", "fS(L:String)"}})));

    auto f = load("flip-tree.fmod");
    auto fr = run(f, "flip(flip(T))");
    const Theory& ft = *fr.program;
    CHECK(same_equations(ft, ft.equations(),
                         pairs(ft, {{"dflip(N:Nat)", "N:Nat"},
                                    {"dflip(L:NatTree {N:Nat} R:NatTree)",
                                     "dflip(L:NatTree) {N:Nat} dflip(R:NatTree)"}})));

    auto m = load("flip-fix-mutated.fmod");
    auto mr = run(m, "flip(fix(2, e, flip(BG)))");
    const Theory& mt = *mr.program;
    CHECK(same_equations(mt, mt.equations(),
                         pairs(mt, {{"dflip-fix(mt)", "mt"},
                                    {"dflip-fix({R1:Ref I:Id R2:Ref} ; BG:BinGraph)",
                                     "{R1:Ref I:Id R2:Ref} ; dflip(BG:BinGraph)"},
                                    {"dflip(mt)", "mt"},
                                    {"dflip({R1:Ref I:Id R2:Ref} ; BG:BinGraph)",
                                     "{R1:Ref I:Id R2:Ref} ; dflip(BG:BinGraph)"}})));

    auto u = load("flip-fix.fmod");
    auto ur = run(u, "flip(fix(2, e, flip(BG)))");
    CHECK(ur.program->equations().size() == 5);
  }

  TEST_CASE("unnamed calls get numbered names") {
    auto f = load("flip-fix-mutated.fmod");
    auto r = specialize(f.theory, {term(f, "flip(fix(2, e, flip(BG)))")});
    REQUIRE(r.renaming);
    std::set<std::string> names;
    for (const auto& e : r.renaming->entries()) {
      names.insert(e.name);
      CHECK_FALSE(f.theory->find_symbol(e.name, e.args.size()));
    }
    CHECK(names.size() == r.renaming->entries().size());
  }

  TEST_CASE("forward and backward translation") {
    auto g = load("graph.fmod");
    const Theory& th = *g.theory;
    auto r = run(g, "flip(flip(BG))");
    REQUIRE(r.renaming);
    Term call = term(g, "flip(flip({# 1 2} ; {1 0 #}))");
    Term fwd = r.renaming->forward(call);
    CHECK(fwd->symbol() == r.program->symbol_id("dflip", 1));
    CHECK(eq_modulo(th, r.renaming->backward(fwd), call));
    CHECK_THROWS_AS(r.renaming->forward(term(g, "flip({# 1 #})")), NotClosed);
  }

  TEST_CASE("specialized programs compute the same results") {
    for (const auto& ex : bundled_calls()) {
      auto rep = semantic_preservation(ex, 40, 7);
      INFO(ex.file, ": ", rep.summary());
      CHECK(rep.ok());
      CHECK(rep.checks > 0);
    }
  }

  TEST_CASE("resultant right-hand sides are closed") {
    for (const auto& ex : bundled_calls()) {
      auto m = load(ex.file);
      auto r = run(m, ex.call);
      auto rep = closedness(r, *m.theory);
      INFO(ex.file, ": ", rep.summary());
      CHECK(rep.ok());
      CHECK(rep.checks == r.resultants.size());
    }
  }

  TEST_CASE("deterministic output") {
    for (const auto& ex : bundled_calls()) {
      auto m = load(ex.file);
      auto a = run(m, ex.call), b = run(m, ex.call);
      CHECK(print_module(*a.program) == print_module(*b.program));
    }
  }

  TEST_CASE("an ever-growing call set does not converge") {
    auto m = load("chain.fmod");
    CompiledTheory ct(m.theory);
    PeOptions opts;
    opts.max_iterations = 5;
    CHECK_THROWS_AS(eqnpe(ct, calls(m, {"f0(X)"}), opts), NonConvergence);
  }

  TEST_CASE("seeds must be defined calls") {
    auto g = load("graph.fmod");
    CompiledTheory ct(g.theory);
    CHECK_THROWS(eqnpe(ct, {}));
    CHECK_THROWS(eqnpe(ct, calls(g, {"{# 1 #}"})));
  }

  TEST_CASE("trace events are JSON lines") {
    auto m = load("flip-fix.fmod");
    CompiledTheory ct(m.theory);
    std::ostringstream out;
    PeOptions opts;
    opts.trace = &out;
    eqnpe(ct, calls(m, {"flip(fix(2, e, flip(BG)))"}), opts);
    std::istringstream in(out.str());
    std::string line;
    std::size_t n = 0;
    std::set<std::string> kinds;
    while (std::getline(in, line)) {
      auto j = nlohmann::json::parse(line);
      REQUIRE(j.contains("event"));
      kinds.insert(j["event"].get<std::string>());
      ++n;
    }
    CHECK(n > 3);
    CHECK(kinds.size() > 1);
  }
}
