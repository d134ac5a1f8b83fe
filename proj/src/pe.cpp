#include "eqpe/pe.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include <json.hpp>

#include "eqpe/embedding.hpp"
#include "eqpe/errors.hpp"
#include "eqpe/generalization.hpp"
#include "eqpe/matching.hpp"
#include "eqpe/printer.hpp"

namespace eqpe {

namespace {

using nlohmann::json;

void emit(std::ostream* trace, const json& j) {
  if (trace) *trace << j.dump() << '\n';
}

json terms_json(const Theory& th, const std::vector<Term>& ts) {
  json a = json::array();
  for (const auto& t : ts) a.push_back(to_string(th, t));
  return a;
}

bool contains_renaming(const Theory& th, const std::vector<Term>& q, const Term& t) {
  return std::any_of(q.begin(), q.end(),
                     [&](const Term& x) { return eq_modulo_renaming(th, x, t).has_value(); });
}

void collect_redexes(const Term& t, const Theory& th, std::vector<Term>& out) {
  if (t->is_var()) return;
  if (th.defined(t->symbol())) {
    out.push_back(t);
    return;
  }
  for (const auto& a : t->args()) collect_redexes(a, th, out);
}

}  // namespace

bool closed_modulo(const std::vector<Term>& q, const Term& t, const Theory& th) {
  if (t->is_var()) return true;
  if (!th.defined(t->symbol())) {
    return std::all_of(t->args().begin(), t->args().end(),
                       [&](const Term& a) { return closed_modulo(q, a, th); });
  }
  for (const auto& p : q) {
    if (p->is_var() || p->symbol() != t->symbol()) continue;
    bool found = for_each_match(th, {{p, t}}, {}, [&](const Substitution& s) {
      return std::all_of(s.begin(), s.end(),
                         [&](const auto& b) { return closed_modulo(q, b.second, th); });
    });
    if (found) return true;
  }
  return false;
}

std::vector<Term> redexes(const Term& t, const Theory& th) {
  std::vector<Term> out;
  collect_redexes(t, th, out);
  return out;
}

StopPredicate make_whistle(const Theory& th, std::ostream* trace) {
  return [&th, trace](const NarrowingTree& tree, const std::vector<std::size_t>& ancestors,
                      const VariantNode& node) {
    auto mine = redexes(node.term, th);
    for (std::size_t a : ancestors) {
      for (const auto& r : redexes(tree.nodes[a].term, th)) {
        for (const auto& r2 : mine) {
          if (r->symbol() != r2->symbol() || !embeds_modulo(r, r2, th)) continue;
          emit(trace, {{"event", "whistle"},
                       {"node", node.id},
                       {"ancestor", a},
                       {"embedded", to_string(th, r)},
                       {"redex", to_string(th, r2)}});
          return true;
        }
      }
    }
    return false;
  };
}

std::vector<NarrowingTree> unfold(const std::vector<Term>& q, const CompiledTheory& ct,
                                  const PeOptions& opts) {
  const Theory& th = ct.theory();
  auto whistle = make_whistle(th, opts.trace);
  std::vector<NarrowingTree> trees;
  for (const auto& call : q) {
    trees.push_back(build_folding_tree(call, ct, whistle, opts.max_depth));
    const auto& tree = trees.back();
    if (tree.depth_exceeded)
      emit(opts.trace, {{"event", "depth_limit"}, {"call", to_string(th, call)}});
  }
  return trees;
}

namespace {

class Abstraction {
 public:
  Abstraction(const CompiledTheory& ct, std::ostream* trace)
      : ct_(ct), th_(ct.theory()), trace_(trace) {}

  std::vector<Term> run(std::vector<Term> q, const std::vector<Term>& ts, std::size_t depth) {
    if (depth > kMaxDepth) throw NonConvergence("abstraction does not terminate");
    for (const auto& t : ts) q = one(std::move(q), t, depth);
    return q;
  }

 private:
  static constexpr std::size_t kMaxDepth = 200;

  std::vector<Term> one(std::vector<Term> q, const Term& t, std::size_t depth) {
    if (t->is_var()) return q;
    if (!th_.defined(t->symbol())) return run(std::move(q), t->args(), depth);
    std::vector<Term> comparable;
    for (const auto& p : q)
      if (!p->is_var() && p->symbol() == t->symbol() && embeds_modulo(p, t, th_)) comparable.push_back(p);
    if (comparable.empty()) {
      if (!contains_renaming(th_, q, t)) {
        emit(trace_, {{"event", "add"}, {"term", to_string(th_, t)}});
        q.push_back(t);
      }
      return q;
    }
    if (closed_modulo(q, t, th_)) return q;

    auto best = bmt(comparable, t, th_);
    std::vector<Term> rest;
    for (const auto& p : q)
      if (std::none_of(best.begin(), best.end(), [&](const Term& b) { return equal(b, p); }))
        rest.push_back(p);
    std::vector<Term> pieces;
    for (const auto& b : best) {
      for (const auto& g : lgg_modulo(b, t, th_)) {
        pieces.push_back(normalize(g.term, ct_));
        for (const auto& s : {g.left, g.right})
          for (const auto& [x, v] : s) pieces.push_back(normalize(v, ct_));
      }
    }
    emit(trace_, {{"event", "generalize"},
                  {"term", to_string(th_, t)},
                  {"best", terms_json(th_, best)},
                  {"pieces", terms_json(th_, pieces)}});
    return run(std::move(rest), pieces, depth + 1);
  }

  const CompiledTheory& ct_;
  const Theory& th_;
  std::ostream* trace_;
};

}  // namespace

std::vector<Term> abstract(const std::vector<Term>& q, const std::vector<Term>& t,
                           const CompiledTheory& ct, std::ostream* trace) {
  return Abstraction(ct, trace).run(q, t, 0);
}

bool same_calls(const Theory& th, const std::vector<Term>& a, const std::vector<Term>& b) {
  if (a.size() != b.size()) return false;
  return std::all_of(a.begin(), a.end(), [&](const Term& x) { return contains_renaming(th, b, x); }) &&
         std::all_of(b.begin(), b.end(), [&](const Term& x) { return contains_renaming(th, a, x); });
}

SpecializationState eqnpe(const CompiledTheory& ct, const std::vector<Term>& seeds,
                          const PeOptions& opts) {
  const Theory& th = ct.theory();
  if (seeds.empty()) throw EmptyInput("no calls to specialize");
  SpecializationState st;
  for (const auto& s : seeds) {
    Term n = normalize(s, ct);
    if (n->is_var() || !th.defined(n->symbol()) || s->is_var() || !th.defined(s->symbol()))
      throw UnsupportedFeature("call " + to_string(th, s) + " is not rooted by a defined symbol");
    if (!contains_renaming(th, st.q, s)) st.q.push_back(s);
  }
  while (true) {
    ++st.iterations;
    emit(opts.trace, {{"event", "iteration"}, {"n", st.iterations}, {"Q", terms_json(th, st.q)}});
    st.trees = unfold(st.q, ct, opts);
    std::vector<Term> ls;
    for (const auto& tree : st.trees)
      for (const auto* n : leaves(tree))
        if (!contains_renaming(th, st.q, n->term) && !contains_renaming(th, ls, n->term))
          ls.push_back(n->term);
    auto next = abstract(st.q, ls, ct, opts.trace);
    if (same_calls(th, next, st.q)) {
      emit(opts.trace, {{"event", "converged"}, {"iterations", st.iterations}});
      return st;
    }
    if (st.iterations >= opts.max_iterations)
      throw NonConvergence("no fixpoint after " + std::to_string(st.iterations) + " iterations");
    st.q = std::move(next);
  }
}

std::vector<Resultant> extract_resultants(const SpecializationState& state, const Theory& th) {
  std::vector<Resultant> out;
  for (std::size_t i = 0; i < state.q.size(); ++i) {
    const auto& tree = state.trees[i];
    for (const auto* n : leaves(tree)) {
      Term lhs = apply(th, n->acc, state.q[i]);
      if (eq_modulo(th, lhs, n->term)) continue;
      bool dup = std::any_of(out.begin(), out.end(), [&](const Resultant& r) {
        return renaming_equal(th, {r.lhs, r.rhs}, {lhs, n->term});
      });
      if (dup) continue;
      out.push_back({lhs, n->term, i, n->id, n->acc});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Term transfer(const Theory& from, const Theory& to, const Term& t) {
  if (t->is_var()) {
    const auto& v = t->var();
    return make_var(v.name, to.sorts().at(from.sorts().name(v.sort)));
  }
  const Symbol& sym = from.symbol(t->symbol());
  SymbolId f = to.symbol_id(sym.name, sym.arity);
  if (t->has_mults()) {
    std::vector<std::pair<Term, std::uint32_t>> elems;
    for (std::size_t i = 0; i < t->arity(); ++i) elems.emplace_back(transfer(from, to, t->arg(i)), t->mult(i));
    return make_ac(to, f, std::move(elems));
  }
  std::vector<Term> args;
  for (const auto& a : t->args()) args.push_back(transfer(from, to, a));
  return make_app(to, f, std::move(args));
}

namespace {

// Signature of th restricted to the symbols accepted by keep.
TheoryBuilder copy_signature(const Theory& th, const std::string& name,
                             const std::function<bool(SymbolId)>& keep) {
  TheoryBuilder b(name);
  const auto& g = th.sorts();
  for (SortId s : th.sort_order())
    if (!g.synthesized(s)) b.add_sort(g.name(s));
  for (const auto& [lo, hi] : g.edges())
    if (!g.synthesized(lo) && !g.synthesized(hi)) b.add_subsort(g.name(lo), g.name(hi));
  if (th.protects_nat()) b.protect_nat();
  for (SymbolId f : th.declaration_order()) {
    const Symbol& sym = th.symbol(f);
    if (sym.builtin || !keep(f)) continue;
    OpAttributes attrs;
    attrs.assoc = sym.axioms.assoc;
    attrs.comm = sym.axioms.comm;
    if (sym.axioms.identity) {
      attrs.id_side = sym.axioms.identity->side;
      attrs.id_text = th.symbol(sym.axioms.identity->element->symbol()).name;
    }
    for (const auto& d : sym.decls) {
      std::vector<std::string> args;
      for (SortId a : d.args) args.push_back(g.name(a));
      b.add_op(sym.name, args, g.name(d.result), attrs);
    }
  }
  return b;
}

std::string name_stem(const std::string& name) {
  std::string out;
  for (char c : name)
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-') out += c;
  while (!out.empty() && out.front() == '-') out.erase(out.begin());
  return out.empty() ? "f" : out;
}

// Gives the variables of an equation readable names, preferring declared
// ones, and declares the rest.
std::pair<Term, Term> tidy(Theory& th, const Term& lhs, const Term& rhs) {
  std::vector<Variable> vs = variables(lhs);
  collect_variables(rhs, vs);
  Substitution ren;
  std::vector<std::string> used;
  for (const auto& v : vs) {
    std::string name = base_name(v.name);
    while (true) {
      auto d = th.find_variable(name);
      bool clash = std::find(used.begin(), used.end(), name) != used.end() || (d && d->sort != v.sort) ||
                   th.find_symbol(name, 0).has_value();
      if (!clash) break;
      name += "'";
    }
    used.push_back(name);
    if (!th.find_variable(name)) th.add_variable({v.sort, name});
    ren.bind(v, make_var(name, v.sort));
  }
  return {apply(th, ren, lhs), apply(th, ren, rhs)};
}

void declare_variables(const Theory& from, Theory& to) {
  for (const auto& v : from.declared_variables())
    if (auto s = to.sorts().find(from.sorts().name(v.sort))) to.add_variable({*s, v.name});
}

}  // namespace

std::shared_ptr<Theory> resultant_theory(const Theory& th, const std::vector<Resultant>& resultants) {
  auto out = copy_signature(th, th.name() + "-PE", [](SymbolId) { return true; }).build();
  declare_variables(th, *out);
  for (const auto& r : resultants) {
    auto [lhs, rhs] = tidy(*out, transfer(th, *out, r.lhs), transfer(th, *out, r.rhs));
    out->add_equation({"", lhs, rhs, false});
  }
  out->finalize();
  return out;
}

Renaming rename(const std::vector<Resultant>& resultants, const SpecializationState& state,
                std::shared_ptr<const Theory> th_ptr,
                const std::vector<std::pair<Term, std::string>>& names) {
  const Theory& th = *th_ptr;
  Renaming r;
  r.original_ = th_ptr;

  std::vector<std::string> taken;
  for (std::size_t i = 0; i < th.symbol_count(); ++i) taken.push_back(th.symbol(SymbolId(static_cast<int>(i))).name);
  std::map<std::string, int> counters;
  auto fresh_name = [&](const Term& q) {
    std::string stem = name_stem(th.symbol(q->symbol()).name);
    while (true) {
      std::string n = stem + std::to_string(counters[stem]++);
      if (std::find(taken.begin(), taken.end(), n) == taken.end()) return n;
    }
  };
  for (const auto& q : state.q) {
    RenamingEntry e;
    e.pattern = q;
    e.args = variables(q);
    for (const auto& [pattern, name] : names)
      if (eq_modulo_renaming(th, pattern, q)) e.name = name;
    if (e.name.empty()) e.name = fresh_name(q);
    if (std::find(taken.begin(), taken.end(), e.name) != taken.end() &&
        std::none_of(names.begin(), names.end(), [&](const auto& n) { return n.second == e.name; }))
      throw SignatureError("renamed symbol " + e.name + " clashes with an existing one");
    taken.push_back(e.name);
    r.entries_.push_back(std::move(e));
  }

  auto b = copy_signature(th, th.name() + "-SPEC", [&](SymbolId f) { return !th.defined(f); });
  for (const auto& e : r.entries_) {
    std::vector<std::string> args;
    for (const auto& x : e.args) args.push_back(th.sorts().name(x.sort));
    b.add_op(e.name, args, th.sorts().name(e.pattern->sort()));
  }
  r.specialized_ = b.build();
  Theory& spec = *r.specialized_;
  for (auto& e : r.entries_) e.symbol = spec.symbol_id(e.name, e.args.size());
  declare_variables(th, spec);

  for (const auto& res : resultants) {
    const auto& e = r.entries_[res.call];
    std::vector<Term> args;
    for (const auto& x : e.args) args.push_back(r.forward(apply(th, res.subst, make_var(x))));
    auto [lhs, rhs] = tidy(spec, make_app(spec, e.symbol, std::move(args)), r.forward(res.rhs));
    spec.add_equation({"", lhs, rhs, false});
  }
  spec.finalize();
  return r;
}

SpecializeResult specialize(std::shared_ptr<const Theory> th, const std::vector<Term>& seeds,
                            const PeOptions& opts, bool do_rename,
                            const std::vector<std::pair<Term, std::string>>& names) {
  CompiledTheory ct(th);
  SpecializeResult out{eqnpe(ct, seeds, opts), {}, std::nullopt, nullptr};
  out.resultants = extract_resultants(out.state, *th);
  for (const auto& r : out.resultants)
    if (!closed_modulo(out.state.q, r.rhs, *th))
      throw NotClosed("resultant rhs " + to_string(*th, r.rhs) + " is not closed");
  if (do_rename) {
    out.renaming = rename(out.resultants, out.state, th, names);
    out.program = out.renaming->specialized();
  } else {
    out.program = resultant_theory(*th, out.resultants);
  }
  return out;
}

std::optional<Term> Renaming::try_forward(const Term& t) const {
  const Theory& th = *original_;
  const Theory& spec = *specialized_;
  if (t->is_var()) return transfer(th, spec, t);
  if (!th.defined(t->symbol())) {
    const Symbol& sym = th.symbol(t->symbol());
    SymbolId f = spec.symbol_id(sym.name, sym.arity);
    if (t->has_mults()) {
      std::vector<std::pair<Term, std::uint32_t>> elems;
      for (std::size_t i = 0; i < t->arity(); ++i) {
        auto a = try_forward(t->arg(i));
        if (!a) return std::nullopt;
        elems.emplace_back(*a, t->mult(i));
      }
      return make_ac(spec, f, std::move(elems));
    }
    std::vector<Term> args;
    for (const auto& a : t->args()) {
      auto x = try_forward(a);
      if (!x) return std::nullopt;
      args.push_back(*x);
    }
    return make_app(spec, f, std::move(args));
  }
  for (const auto& e : entries_) {
    if (e.pattern->is_var() || e.pattern->symbol() != t->symbol()) continue;
    std::optional<Term> out;
    for_each_match(th, {{e.pattern, t}}, {}, [&](const Substitution& s) {
      std::vector<Term> args;
      for (const auto& x : e.args) {
        const Term* v = s.find(x);
        auto a = try_forward(v ? *v : make_var(x));
        if (!a) return false;
        args.push_back(*a);
      }
      out = make_app(spec, e.symbol, std::move(args));
      return true;
    });
    if (out) return out;
  }
  return std::nullopt;
}

Term Renaming::forward(const Term& t) const {
  auto out = try_forward(t);
  if (!out) throw NotClosed("term " + to_string(*original_, t) + " is not covered by the specialized calls");
  return *out;
}

Term Renaming::backward(const Term& t) const {
  const Theory& th = *original_;
  const Theory& spec = *specialized_;
  if (t->is_var()) return transfer(spec, th, t);
  for (const auto& e : entries_) {
    if (e.symbol != t->symbol()) continue;
    Substitution s;
    for (std::size_t i = 0; i < e.args.size(); ++i) s.bind(e.args[i], backward(t->arg(i)));
    return apply(th, s, e.pattern);
  }
  const Symbol& sym = spec.symbol(t->symbol());
  SymbolId f = th.symbol_id(sym.name, sym.arity);
  if (t->has_mults()) {
    std::vector<std::pair<Term, std::uint32_t>> elems;
    for (std::size_t i = 0; i < t->arity(); ++i) elems.emplace_back(backward(t->arg(i)), t->mult(i));
    return make_ac(th, f, std::move(elems));
  }
  std::vector<Term> args;
  for (const auto& a : t->args()) args.push_back(backward(a));
  return make_app(th, f, std::move(args));
}

}  // namespace eqpe
