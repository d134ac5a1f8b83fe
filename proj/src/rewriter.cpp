#include "eqpe/rewriter.hpp"

#include <algorithm>

#include "eqpe/matching.hpp"

namespace eqpe {

namespace {

using Slot = std::pair<Variable, Term>;

// Variables sitting directly under a non-AC identity symbol, on the side
// where the identity applies, paired with that identity.
void identity_slots(const Theory& th, const Term& t, std::vector<Slot>& out) {
  if (t->is_var()) return;
  const AxiomSet& ax = th.symbol(t->symbol()).axioms;
  if (ax.identity && !ax.assoc && t->arity() == 2) {
    const Term& e = ax.identity->element;
    auto consider = [&](std::size_t i) {
      const Term& a = t->arg(i);
      if (!a->is_var() || !th.leq(e->sort(), a->var().sort)) return;
      bool seen = std::any_of(out.begin(), out.end(),
                              [&](const Slot& s) { return s.first == a->var(); });
      if (!seen) out.emplace_back(a->var(), e);
    };
    if (ax.identity->side != IdSide::left || ax.comm) consider(1);
    if (ax.identity->side != IdSide::right || ax.comm) consider(0);
  }
  for (const auto& a : t->args()) identity_slots(th, a, out);
}

Rule extend(const Theory& th, const Rule& r) {
  SymbolId f = r.lhs->symbol();
  SortId top = th.sorts().top(th.symbol(f).decls.front().result);
  Term rest = make_var(fresh_variable("R", top));
  return Rule{r.label + "-ext", make_ac(th, f, {{r.lhs, 1}, {rest, 1}}),
              make_ac(th, f, {{r.rhs, 1}, {rest, 1}}), RuleOrigin::extension};
}

class Normalizer {
 public:
  Normalizer(const CompiledTheory& ct, RewriteStats* stats)
      : ct_(ct), th_(ct.theory()), stats_(stats) {}

  Term norm(const Term& t) {
    if (t->is_var()) return t;
    if (t->arity() == 0) return top(t);
    std::vector<Term> args;
    args.reserve(t->arity());
    bool changed = false;
    for (const auto& a : t->args()) {
      args.push_back(norm(a));
      changed = changed || args.back() != a;
    }
    return top(changed ? rebuild(t, std::move(args)) : t);
  }

  // Instantiates a rule rhs whose variables are bound to normal forms;
  // only the rhs skeleton needs simplification.
  Term inst(const Term& r, const Substitution& s) {
    if (r->is_var()) {
      const Term* v = s.find(r->var());
      return v ? *v : r;
    }
    if (r->ground()) return norm(r);
    std::vector<Term> args;
    args.reserve(r->arity());
    for (const auto& a : r->args()) args.push_back(inst(a, s));
    return top(rebuild(r, std::move(args)));
  }

  Term top(const Term& t) {
    if (t->is_var()) return t;
    for (std::size_t idx : ct_.rules_for(t->symbol())) {
      const Rule& rule = ct_.rules()[idx];
      auto m = match_first(th_, rule.lhs, t, &mstats_);
      if (!m) continue;
      if (++steps_ > ct_.fuel) throw NonTermination("rewrite fuel exhausted");
      return inst(rule.rhs, *m);
    }
    return t;
  }

  void flush() {
    if (stats_) {
      stats_->steps += steps_;
      stats_->match_attempts += mstats_.attempts;
    }
  }

  std::optional<RewriteResult> step(const Term& t, Position& p) {
    if (t->is_var()) return std::nullopt;
    for (std::uint32_t i = 0; i < t->arity(); ++i) {
      p.push_back(i);
      auto r = step(t->arg(i), p);
      p.pop_back();
      if (r) {
        r->term = replace(th_, t, {i}, r->term);
        return r;
      }
    }
    for (std::size_t idx : ct_.rules_for(t->symbol())) {
      const Rule& rule = ct_.rules()[idx];
      auto m = match_first(th_, rule.lhs, t, &mstats_);
      if (!m) continue;
      ++steps_;
      return RewriteResult{apply(th_, *m, rule.rhs), rule.label, p};
    }
    return std::nullopt;
  }

 private:
  Term rebuild(const Term& shape, std::vector<Term> args) {
    if (shape->has_mults()) {
      std::vector<std::pair<Term, std::uint32_t>> elems;
      elems.reserve(args.size());
      for (std::size_t i = 0; i < args.size(); ++i) elems.emplace_back(args[i], shape->mult(i));
      return make_ac(th_, shape->symbol(), std::move(elems));
    }
    return make_app(th_, shape->symbol(), std::move(args));
  }

  const CompiledTheory& ct_;
  const Theory& th_;
  RewriteStats* stats_;
  MatchStats mstats_;
  std::uint64_t steps_ = 0;
};

}  // namespace

CompiledTheory::CompiledTheory(std::shared_ptr<const Theory> th) : theory_(std::move(th)) {
  const Theory& t = *theory_;
  std::vector<Rule> base;
  for (std::size_t i = 0; i < t.equations().size(); ++i) {
    const Equation& e = t.equations()[i];
    std::string label = e.label.empty() ? "eq" + std::to_string(i + 1) : e.label;
    auto lv = variables(e.lhs);
    for (const auto& x : variables(e.rhs))
      if (std::find(lv.begin(), lv.end(), x) == lv.end())
        throw NonOrientable("equation " + label + " has extra variable " + x.name);
    base.push_back({label, e.lhs, e.rhs, RuleOrigin::equation});

    std::vector<Slot> slots;
    identity_slots(t, e.lhs, slots);
    const std::size_t k = std::min<std::size_t>(slots.size(), 12);
    for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
      Substitution s;
      for (std::size_t j = 0; j < k; ++j)
        if (mask >> j & 1) s.bind(slots[j].first, slots[j].second);
      Term lhs = apply(t, s, e.lhs);
      if (lhs->is_var()) continue;
      bool dup = std::any_of(base.begin(), base.end(), [&](const Rule& r) {
        return eq_modulo_renaming(t, r.lhs, lhs).has_value();
      });
      if (dup) continue;
      base.push_back({label + "-id" + std::to_string(mask), lhs, apply(t, s, e.rhs),
                      RuleOrigin::identity_variant});
    }
  }
  for (const auto& r : base) {
    rules_.push_back(r);
    if (t.symbol(r.lhs->symbol()).axioms.ac()) rules_.push_back(extend(t, r));
  }
  index_.resize(t.symbol_count());
  for (std::size_t i = 0; i < rules_.size(); ++i)
    index_[eqpe::index(rules_[i].lhs->symbol())].push_back(i);
}

CompiledTheory compile(std::shared_ptr<const Theory> th) { return CompiledTheory(std::move(th)); }

std::optional<RewriteResult> rewrite_step(const Term& t, const CompiledTheory& ct,
                                          RewriteStats* stats) {
  Normalizer n(ct, stats);
  Position p;
  auto r = n.step(t, p);
  n.flush();
  return r;
}

Term normalize(const Term& t, const CompiledTheory& ct, RewriteStats* stats) {
  Normalizer n(ct, stats);
  Term out;
  try {
    out = n.norm(t);
  } catch (...) {
    n.flush();
    throw;
  }
  n.flush();
  return out;
}

}  // namespace eqpe
