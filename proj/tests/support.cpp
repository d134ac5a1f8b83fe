#include "support.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "eqpe/matching.hpp"
#include "eqpe/printer.hpp"
#include "eqpe/unification.hpp"

#ifndef EQPE_MODULES_DIR
#error "EQPE_MODULES_DIR must point at the bundled modules"
#endif

namespace eqpe::testing {

std::filesystem::path module_path(const std::string& name) {
  return std::filesystem::path(EQPE_MODULES_DIR) / name;
}

Module load(const std::string& name) { return load_module(module_path(name)); }

Module module_from(const std::string& text) { return parse_module(text); }

Term term(const Module& m, const std::string& text) {
  return parse_term(*m.theory, text, parse_lets(*m.theory, m.lets));
}

Term term(const Theory& th, const std::string& text) { return parse_term(th, text); }

const std::vector<ExampleCall>& bundled_calls() {
  static const std::vector<ExampleCall> calls = {
      {"parser.fmod", "init | L | G-PRODUCTIONS"},
      {"flip-tree.fmod", "flip(flip(T))"},
      {"graph.fmod", "flip(flip(BG))"},
      {"flip-fix.fmod", "flip(fix(2, e, flip(BG)))"},
      {"flip-fix-mutated.fmod", "flip(fix(2, e, flip(BG)))"},
  };
  return calls;
}

std::vector<std::pair<Term, std::string>> module_renames(const Module& m) {
  auto lets = parse_lets(*m.theory, m.lets);
  std::vector<std::pair<Term, std::string>> out;
  for (const auto& [pattern, name] : m.renames) out.emplace_back(parse_term(*m.theory, pattern, lets), name);
  return out;
}

std::string Report::summary() const {
  std::ostringstream os;
  os << checks << " checks, " << witnesses << " brute-force solutions, " << (failures.size() > 20 ? 20 : failures.size()) << " failures";
  for (const auto& f : failures) os << "\n  " << f;
  return os.str();
}

Term GroundGen::term(SortId s, int depth) {
  std::vector<std::pair<SymbolId, const OpDecl*>> all, constants;
  std::vector<SymbolId> symbols = th_.constructor_symbols();
  if (defined_)
    for (SymbolId f : th_.defined_symbols()) symbols.push_back(f);
  for (SymbolId f : symbols) {
    for (const auto& d : th_.symbol(f).decls) {
      if (!th_.leq(d.result, s)) continue;
      all.emplace_back(f, &d);
      if (d.args.empty()) constants.emplace_back(f, &d);
    }
  }
  if (all.empty()) throw Error("no ground terms of sort " + th_.sorts().name(s));
  const auto& pool = depth <= 0 && !constants.empty() ? constants : all;
  for (int attempt = 0; attempt < 20; ++attempt) {
    auto [f, d] = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng_)];
    const Symbol& sym = th_.symbol(f);
    std::vector<Term> args;
    if (sym.axioms.assoc) {
      std::size_t n = std::uniform_int_distribution<std::size_t>(2, 3)(rng_);
      for (std::size_t i = 0; i < n; ++i) args.push_back(term(d->args[i == 0 ? 0 : 1], depth - 1));
    } else {
      for (SortId a : d->args) args.push_back(term(a, depth - 1));
    }
    try {
      Term t = make_app(th_, f, std::move(args));
      if (t->sort() != kNoSort && th_.leq(t->sort(), s)) return t;
    } catch (const IllTyped&) {
    }
  }
  auto [f, d] = (constants.empty() ? all : constants).front();
  (void)d;
  if (th_.symbol(f).arity == 0) return make_app(th_, f, {});
  throw Error("could not build a ground term of sort " + th_.sorts().name(s));
}

Substitution GroundGen::instance_of(const Term& t, int depth) {
  Substitution s;
  for (const auto& v : variables(t)) s.bind(v, term(v.sort, depth));
  return s;
}

bool same_terms(const Theory& th, const std::vector<Term>& a, const std::vector<Term>& b) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const auto& x : a) {
    bool found = false;
    for (std::size_t j = 0; j < b.size() && !found; ++j) {
      if (used[j] || !eq_modulo_renaming(th, x, b[j])) continue;
      used[j] = true;
      found = true;
    }
    if (!found) return false;
  }
  return true;
}

bool same_equations(const Theory& th, const std::vector<Equation>& got,
                    const std::vector<std::pair<Term, Term>>& expected) {
  if (got.size() != expected.size()) return false;
  std::vector<bool> used(expected.size(), false);
  for (const auto& e : got) {
    bool found = false;
    for (std::size_t j = 0; j < expected.size() && !found; ++j) {
      if (used[j]) continue;
      if (!renaming_equal(th, {e.lhs, e.rhs}, {expected[j].first, expected[j].second})) continue;
      used[j] = true;
      found = true;
    }
    if (!found) return false;
  }
  return true;
}

std::string show(const Theory& th, const std::vector<Term>& ts) {
  std::string out = "{";
  for (std::size_t i = 0; i < ts.size(); ++i) out += (i ? ", " : "") + to_string(th, ts[i]);
  return out + "}";
}

std::string show(const Theory& th, const std::vector<Equation>& es) {
  std::string out;
  for (const auto& e : es) out += "\n  " + print_equation(th, e);
  return out;
}

// ---------------------------------------------------------------------------
// Solver oracle

namespace {

const char* kFreeCAc = R"(
fmod SOLVE-AC is
  sort S .
  ops a b : -> S .
  op f : S S -> S .
  op g : S S -> S [comm] .
  op _+_ : S S -> S [assoc comm] .
  vars X Y Z : S .
endfm
)";

const char* kAcu = R"(
fmod SOLVE-ACU is
  sort S .
  ops a e : -> S .
  op f : S S -> S .
  op g : S S -> S [comm] .
  op _+_ : S S -> S [assoc comm id: e] .
  vars X Y Z : S .
endfm
)";

class ProblemGen {
 public:
  ProblemGen(const Theory& th, std::uint64_t seed) : th_(th), rng_(seed) {
    s_ = th.sort("S");
    for (SymbolId f : th.declaration_order()) {
      const Symbol& sym = th.symbol(f);
      if (sym.arity == 0) constants_.push_back(f);
      else binary_.push_back(f);
    }
    for (const char* v : {"X", "Y", "Z"}) vars_.push_back(make_var(v, s_));
  }

  Term random(int depth, bool with_vars) {
    Term t;
    do t = build(depth, with_vars);
    while (!small_ac(t));
    return t;
  }

  std::mt19937_64& rng() { return rng_; }
  const std::vector<Term>& vars() const { return vars_; }

  bool small_ac(const Term& t) const {
    if (t->is_var()) return true;
    if (th_.symbol(t->symbol()).axioms.ac() && t->total_args() > 4) return false;
    if (term_depth(t) > 3) return false;  // depth counts the root as 1
    for (const auto& a : t->args())
      if (!small_ac(a)) return false;
    return true;
  }

 private:
  Term build(int depth, bool with_vars) {
    std::uniform_int_distribution<int> coin(0, 9);
    if (depth == 0 || coin(rng_) < 3) {
      if (with_vars && coin(rng_) < 5) return vars_[pick(vars_.size())];
      return make_app(th_, constants_[pick(constants_.size())], {});
    }
    SymbolId f = binary_[pick(binary_.size())];
    std::size_t n = th_.symbol(f).axioms.assoc ? 2 + pick(3) : 2;
    std::vector<Term> args;
    for (std::size_t i = 0; i < n; ++i) args.push_back(build(depth - 1, with_vars));
    return make_app(th_, f, std::move(args));
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  const Theory& th_;
  std::mt19937_64 rng_;
  SortId s_{};
  std::vector<SymbolId> constants_, binary_;
  std::vector<Term> vars_;
};

// Every term a matcher can bind when the subject is ground: subterms, AC
// sub-multisets, and the identity element.
std::vector<Term> binding_universe(const Theory& th, const Term& subject) {
  std::set<Term, TermLess> out;
  for (SymbolId f : th.declaration_order())
    if (th.symbol(f).axioms.identity) out.insert(th.symbol(f).axioms.identity->element);
  std::function<void(const Term&)> walk = [&](const Term& t) {
    out.insert(t);
    if (t->is_var()) return;
    const Symbol& sym = th.symbol(t->symbol());
    if (sym.axioms.ac()) {
      std::vector<std::uint32_t> count(t->arity(), 0);
      std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == t->arity()) {
          std::vector<std::pair<Term, std::uint32_t>> elems;
          std::uint64_t n = 0;
          for (std::size_t k = 0; k < count.size(); ++k)
            if (count[k]) {
              elems.emplace_back(t->arg(k), count[k]);
              n += count[k];
            }
          if (n >= 2) out.insert(make_ac(th, t->symbol(), std::move(elems)));
          return;
        }
        for (std::uint32_t c = 0; c <= t->mult(i); ++c) {
          count[i] = c;
          rec(i + 1);
        }
      };
      rec(0);
    }
    for (const auto& a : t->args()) walk(a);
  };
  walk(subject);
  return {out.begin(), out.end()};
}

// All ground terms of depth at most one.
std::vector<Term> shallow_universe(const Theory& th) {
  std::vector<Term> consts;
  std::vector<SymbolId> binary;
  for (SymbolId f : th.declaration_order()) {
    if (th.symbol(f).arity == 0) consts.push_back(make_app(th, f, {}));
    else binary.push_back(f);
  }
  std::set<Term, TermLess> out(consts.begin(), consts.end());
  for (SymbolId f : binary) {
    std::size_t max_n = th.symbol(f).axioms.assoc ? 4 : 2;
    std::vector<std::size_t> idx;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
      if (idx.size() >= 2) {
        std::vector<Term> args;
        for (auto i : idx) args.push_back(consts[i]);
        out.insert(make_app(th, f, std::move(args)));
      }
      if (idx.size() == max_n) return;
      for (std::size_t i = 0; i < consts.size(); ++i) {
        if (max_n > 2 && i < start) continue;  // multisets: nondecreasing
        idx.push_back(i);
        rec(i);
        idx.pop_back();
      }
    };
    rec(0);
  }
  return {out.begin(), out.end()};
}

void enumerate(const std::vector<Variable>& vars, const std::vector<Term>& universe,
               const std::function<void(const Substitution&)>& fn) {
  Substitution s;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == vars.size()) {
      fn(s);
      return;
    }
    for (const auto& u : universe) {
      s.bind(vars[i], u);
      rec(i + 1);
    }
  };
  rec(0);
}

std::vector<Variable> vars_of(const std::vector<Term>& ts) {
  std::vector<Variable> vs;
  for (const auto& t : ts) collect_variables(t, vs);
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

void check_matching(const Theory& th, const Term& p, const Term& s, Report& rep) {
  ++rep.checks;
  auto got = match_modulo(th, p, s);
  auto vars = vars_of({p});
  for (const auto& m : got) {
    bool bound = std::all_of(vars.begin(), vars.end(), [&](const Variable& v) { return m.contains(v); });
    if (!bound || !eq_modulo(th, apply(th, m, p), s))
      rep.fail("unsound matcher " + to_string(th, m) + " for " + to_string(th, p) + " <= " + to_string(th, s));
  }
  enumerate(vars, binding_universe(th, s), [&](const Substitution& g) {
    if (!eq_modulo(th, apply(th, g, p), s)) return;
    ++rep.witnesses;
    bool covered = std::any_of(got.begin(), got.end(), [&](const Substitution& m) {
      return std::all_of(vars.begin(), vars.end(),
                         [&](const Variable& v) { return eq_modulo(th, *m.find(v), *g.find(v)); });
    });
    if (!covered)
      rep.fail("missing matcher " + to_string(th, g) + " for " + to_string(th, p) + " <= " + to_string(th, s));
  });
}

void check_unification(const Theory& th, const Term& t1, const Term& t2, const std::vector<Term>& universe,
                       Report& rep) {
  ++rep.checks;
  auto got = unify_modulo(th, t1, t2);
  auto vars = vars_of({t1, t2});
  for (const auto& u : got)
    if (!eq_modulo(th, apply(th, u, t1), apply(th, u, t2)))
      rep.fail("unsound unifier " + to_string(th, u) + " for " + to_string(th, t1) + " = " + to_string(th, t2));
  for (std::size_t i = 0; i < got.size(); ++i)
    for (std::size_t j = 0; j < got.size(); ++j) {
      if (i == j) continue;
      std::vector<Term> a, b;
      for (const auto& v : vars) {
        Term x = make_var(v);
        a.push_back(apply(th, got[i], x));
        b.push_back(apply(th, got[j], x));
      }
      if (is_instance(th, a, b) && !is_instance(th, b, a))
        rep.fail("non-minimal unifier set for " + to_string(th, t1) + " = " + to_string(th, t2));
    }
  enumerate(vars, universe, [&](const Substitution& g) {
    if (!eq_modulo(th, apply(th, g, t1), apply(th, g, t2))) return;
    ++rep.witnesses;
    bool covered = std::any_of(got.begin(), got.end(), [&](const Substitution& u) {
      std::vector<std::pair<Term, Term>> probs;
      for (const auto& v : vars) {
        Term x = make_var(v);
        probs.emplace_back(apply(th, u, x), *g.find(v));
      }
      return for_each_match(th, probs, {}, [](const Substitution&) { return true; });
    });
    if (!covered)
      rep.fail("ground unifier " + to_string(th, g) + " not covered for " + to_string(th, t1) + " = " +
               to_string(th, t2));
  });
}

}  // namespace

Report solver_oracle(std::uint64_t seed, std::size_t match_problems, std::size_t unify_problems) {
  Report rep;
  for (const char* text : {kFreeCAc, kAcu}) {
    auto m = parse_module(text);
    const Theory& th = *m.theory;
    ProblemGen gen(th, seed++);
    for (std::size_t i = 0; i < match_problems; ++i) {
      Term p = gen.random(2, true);
      Term s;
      if (i % 2 == 0) {
        for (int depth : {1, 0, 0}) {
          Substitution g;
          for (const auto& v : variables(p)) g.bind(v, gen.random(depth, false));
          s = apply(th, g, p);
          if (gen.small_ac(s)) break;
        }
        if (!gen.small_ac(s)) s = gen.random(2, false);
      } else {
        s = gen.random(2, false);
      }
      try {
        check_matching(th, p, s, rep);
      } catch (const Error& e) {
        rep.fail(std::string(e.what()) + " on " + to_string(th, p) + " <= " + to_string(th, s));
      }
    }
    auto universe = shallow_universe(th);
    for (std::size_t i = 0; i < unify_problems; ++i) {
      Term t1 = gen.random(2, true);
      Term t2 = gen.random(2, true);
      if (i % 3 == 1) {
        // An instance of t1 over the same variables, so solutions exist.
        Substitution g;
        for (const auto& v : variables(t1)) {
          std::size_t k = std::uniform_int_distribution<std::size_t>(0, 2)(gen.rng());
          g.bind(v, k == 0 ? gen.random(0, false) : k == 1 ? gen.vars()[k] : gen.random(1, true));
        }
        Term cand = apply(th, g, t1);
        if (gen.small_ac(cand)) t2 = cand;
      } else if (i % 3 == 2) {
        // Sharing the root makes solvable problems more common.
        for (int k = 0; k < 20 && !t1->is_var() && (t2->is_var() || t1->symbol() != t2->symbol()); ++k)
          t2 = gen.random(2, true);
      }
      try {
        check_unification(th, t1, t2, universe, rep);
      } catch (const Error& e) {
        rep.fail(std::string(e.what()) + " on " + to_string(th, t1) + " = " + to_string(th, t2));
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

Report semantic_preservation(const ExampleCall& ex, std::size_t samples, std::uint64_t seed) {
  Report rep;
  auto m = load(ex.file);
  auto result = specialize(m.theory, {term(m, ex.call)}, {}, true, module_renames(m));
  const Renaming& ren = *result.renaming;
  CompiledTheory original(m.theory);
  CompiledTheory specialized(ren.specialized());
  GroundGen gen(*m.theory, seed);
  for (const auto& q : result.state.q) {
    for (std::size_t i = 0; i < samples; ++i) {
      ++rep.checks;
      Term g = apply(*m.theory, gen.instance_of(q, 1 + static_cast<int>(i % 4)), q);
      Term expect = normalize(g, original);
      Term got = normalize(ren.backward(normalize(ren.forward(g), specialized)), original);
      if (!eq_modulo(*m.theory, expect, got))
        rep.fail(ex.file + ": " + to_string(*m.theory, g) + " gives " + to_string(*m.theory, expect) +
                 " but the specialized program gives " + to_string(*m.theory, got));
    }
  }
  return rep;
}

Report closedness(const SpecializeResult& r, const Theory& th) {
  Report rep;
  for (const auto& res : r.resultants) {
    ++rep.checks;
    if (!closed_modulo(r.state.q, res.rhs, th)) rep.fail("not closed: " + to_string(th, res.rhs));
  }
  return rep;
}

}  // namespace eqpe::testing
