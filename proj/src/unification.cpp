#include "eqpe/unification.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "eqpe/matching.hpp"

namespace eqpe {

std::vector<std::vector<std::uint32_t>> diophantine_basis(const std::vector<std::uint32_t>& a,
                                                          const std::vector<std::uint32_t>& b,
                                                          std::size_t cap) {
  const std::size_t p = a.size(), n = a.size() + b.size();
  std::vector<long long> coef(n);
  for (std::size_t i = 0; i < p; ++i) coef[i] = a[i];
  for (std::size_t j = 0; j < b.size(); ++j) coef[p + j] = -static_cast<long long>(b[j]);
  using Vec = std::vector<std::uint32_t>;
  auto defect = [&](const Vec& v) {
    long long d = 0;
    for (std::size_t i = 0; i < n; ++i) d += coef[i] * v[i];
    return d;
  };
  std::vector<Vec> basis;
  auto dominated = [&](const Vec& v) {
    return std::any_of(basis.begin(), basis.end(), [&](const Vec& m) {
      for (std::size_t i = 0; i < n; ++i)
        if (m[i] > v[i]) return false;
      return true;
    });
  };
  std::set<Vec> frontier;
  for (std::size_t i = 0; i < n; ++i) {
    Vec e(n, 0);
    e[i] = 1;
    frontier.insert(e);
  }
  while (!frontier.empty()) {
    std::set<Vec> next;
    for (const Vec& v : frontier) {
      long long d = defect(v);
      if (d == 0) {
        if (!dominated(v)) basis.push_back(v);
        continue;
      }
      for (std::size_t k = 0; k < n; ++k) {
        if ((d > 0) != (coef[k] < 0)) continue;
        Vec w = v;
        ++w[k];
        if (!dominated(w)) next.insert(std::move(w));
      }
    }
    if (basis.size() > cap) throw SolverLimit("Diophantine basis exceeds cap");
    frontier = std::move(next);
  }
  return basis;
}

namespace {

struct State {
  std::vector<std::pair<Term, Term>> eqs;
  Substitution sigma;
};

class Unifier {
 public:
  Unifier(const Theory& th, const UnifyOptions& opts) : th_(th), opts_(opts) {}

  void run(State st) {
    while (!st.eqs.empty()) {
      if (++steps_ > opts_.max_steps) throw SolverLimit("unification step limit exceeded");
      std::size_t pick = 0;
      for (std::size_t i = 0; i < st.eqs.size(); ++i) {
        if (!ac_rooted(st.eqs[i].first) && !ac_rooted(st.eqs[i].second)) {
          pick = i;
          break;
        }
      }
      auto [s, t] = std::move(st.eqs[pick]);
      st.eqs.erase(st.eqs.begin() + static_cast<long>(pick));
      if (equal(s, t)) continue;
      if (s->is_var() && t->is_var()) {
        const Variable& x = s->var();
        const Variable& y = t->var();
        if (th_.leq(y.sort, x.sort) || !th_.leq(x.sort, y.sort))
          bind(st, x, t);
        else
          bind(st, y, s);
        continue;
      }
      if (s->is_var() || t->is_var()) {
        if (t->is_var()) std::swap(s, t);
        if (occurs(s->var(), t)) {
          // x = x + y can still collapse through the identity.
          if (ac_rooted(t) && th_.symbol(t->symbol()).axioms.identity) {
            Multiset m = ac_view(th_, t->symbol(), t);
            if (std::any_of(m.elems.begin(), m.elems.end(), [&](const Term& a) { return equal(a, s); }))
              ac_unify(t->symbol(), ac_view(th_, t->symbol(), s), std::move(m), st);
          }
          return;
        }
        bind(st, s->var(), t);
        continue;
      }
      const SymbolId fs = s->symbol(), ft = t->symbol();
      const AxiomSet& as = th_.symbol(fs).axioms;
      const AxiomSet& at = th_.symbol(ft).axioms;
      if ((as.assoc && !as.comm) || (at.assoc && !at.comm))
        throw UnsupportedAxioms("unification modulo associativity without commutativity");
      if (as.ac() || at.ac()) {
        if (fs == ft || !at.ac()) {
          ac_unify(fs, ac_view(th_, fs, s), ac_view(th_, fs, t), st);
        } else if (!as.ac()) {
          ac_unify(ft, ac_view(th_, ft, s), ac_view(th_, ft, t), st);
        } else {
          if (as.identity) ac_unify(fs, ac_view(th_, fs, s), ac_view(th_, fs, t), st);
          if (at.identity) ac_unify(ft, ac_view(th_, ft, s), ac_view(th_, ft, t), st);
        }
        return;
      }
      if (fs != ft) return;
      if (as.comm) {
        State alt = st;
        alt.eqs.emplace_back(s->arg(0), t->arg(1));
        alt.eqs.emplace_back(s->arg(1), t->arg(0));
        run(std::move(alt));
        st.eqs.emplace_back(s->arg(0), t->arg(0));
        st.eqs.emplace_back(s->arg(1), t->arg(1));
        continue;
      }
      for (std::size_t i = 0; i < s->arity(); ++i) st.eqs.emplace_back(s->arg(i), t->arg(i));
    }
    results_.push_back(std::move(st.sigma));
  }

  std::vector<Substitution>& results() { return results_; }

 private:
  bool ac_rooted(const Term& t) const {
    return !t->is_var() && th_.symbol(t->symbol()).axioms.ac();
  }

  void bind(State& st, const Variable& x, const Term& t) {
    Substitution single{{x, t}};
    for (auto& [l, r] : st.eqs) {
      l = apply(th_, single, l);
      r = apply(th_, single, r);
    }
    Substitution next;
    for (const auto& [y, v] : st.sigma) next.bind(y, apply(th_, single, v));
    next.bind(x, t);
    st.sigma = std::move(next);
  }

  void ac_unify(SymbolId h, Multiset S, Multiset T, const State& st) {
    for (std::size_t i = 0; i < S.elems.size(); ++i) {
      for (std::size_t j = 0; j < T.elems.size(); ++j) {
        if (S.counts[i] && T.counts[j] && equal(S.elems[i], T.elems[j])) {
          auto c = std::min(S.counts[i], T.counts[j]);
          S.counts[i] -= c;
          T.counts[j] -= c;
        }
      }
    }
    auto prune = [](Multiset& m) {
      Multiset out;
      for (std::size_t i = 0; i < m.elems.size(); ++i)
        if (m.counts[i]) {
          out.elems.push_back(m.elems[i]);
          out.counts.push_back(m.counts[i]);
        }
      m = std::move(out);
    };
    prune(S);
    prune(T);
    const AxiomSet& ax = th_.symbol(h).axioms;
    const Term identity = ax.identity ? ax.identity->element : nullptr;

    if (S.empty() && T.empty()) {
      run(st);
      return;
    }
    if (S.empty() || T.empty()) {
      const Multiset& m = S.empty() ? T : S;
      if (!identity) return;
      State next = st;
      for (const auto& e : m.elems) {
        if (!e->is_var()) return;
        next.eqs.emplace_back(e, identity);
      }
      run(std::move(next));
      return;
    }
    auto single_var = [](const Multiset& m) {
      return m.elems.size() == 1 && m.counts[0] == 1 && m.elems[0]->is_var();
    };
    if (single_var(S) || single_var(T)) {
      const Multiset& v = single_var(S) ? S : T;
      const Multiset& o = single_var(S) ? T : S;
      State next = st;
      next.eqs.emplace_back(v.elems[0], from_multiset(th_, h, o));
      run(std::move(next));
      return;
    }

    std::vector<Term> unknowns;
    std::vector<std::uint32_t> a, b;
    for (std::size_t i = 0; i < S.elems.size(); ++i) {
      unknowns.push_back(S.elems[i]);
      a.push_back(S.counts[i]);
    }
    for (std::size_t j = 0; j < T.elems.size(); ++j) {
      unknowns.push_back(T.elems[j]);
      b.push_back(T.counts[j]);
    }
    const std::size_t n = unknowns.size();
    auto raw = diophantine_basis(a, b, opts_.basis_cap);
    std::vector<std::vector<std::uint32_t>> basis;
    for (auto& v : raw) {
      bool ok = true;
      for (std::size_t u = 0; u < n; ++u)
        if (!unknowns[u]->is_var() && v[u] > 1) ok = false;
      if (ok) basis.push_back(std::move(v));
    }
    const bool allow_empty = identity != nullptr;
    SortId zsort = th_.sorts().top(th_.symbol(h).decls.front().result);

    std::vector<std::uint32_t> cover(n, 0);
    std::vector<std::size_t> chosen;
    // Later vectors able to cover each unknown, for pruning.
    std::vector<std::vector<std::uint32_t>> remaining(basis.size() + 1,
                                                      std::vector<std::uint32_t>(n, 0));
    for (std::size_t k = basis.size(); k-- > 0;)
      for (std::size_t u = 0; u < n; ++u)
        remaining[k][u] = remaining[k + 1][u] + (basis[k][u] ? 1 : 0);

    std::function<void(std::size_t)> rec = [&](std::size_t k) {
      for (std::size_t u = 0; u < n; ++u) {
        bool need = !unknowns[u]->is_var() || !allow_empty;
        if (need && cover[u] == 0 && remaining[k][u] == 0) return;
      }
      if (k == basis.size()) {
        if (chosen.empty()) return;
        State next = st;
        std::vector<Term> zs;
        for (std::size_t c = 0; c < chosen.size(); ++c)
          zs.push_back(make_var(fresh_variable("Z", zsort)));
        for (std::size_t u = 0; u < n; ++u) {
          std::vector<std::pair<Term, std::uint32_t>> parts;
          for (std::size_t c = 0; c < chosen.size(); ++c)
            if (auto m = basis[chosen[c]][u]) parts.emplace_back(zs[c], m);
          Term value = parts.empty() ? identity : make_ac(th_, h, std::move(parts));
          next.eqs.emplace_back(unknowns[u], value);
        }
        run(std::move(next));
        return;
      }
      const auto& v = basis[k];
      bool can_take = true;
      for (std::size_t u = 0; u < n; ++u)
        if (!unknowns[u]->is_var() && v[u] && cover[u]) can_take = false;
      if (can_take) {
        for (std::size_t u = 0; u < n; ++u) cover[u] += v[u];
        chosen.push_back(k);
        rec(k + 1);
        chosen.pop_back();
        for (std::size_t u = 0; u < n; ++u) cover[u] -= v[u];
      }
      rec(k + 1);
    };
    rec(0);
  }

  const Theory& th_;
  const UnifyOptions& opts_;
  std::size_t steps_ = 0;
  std::vector<Substitution> results_;
};

// Lowers sorts of range variables until every binding respects sorts;
// collects every successful specialization. The search runs over sort
// assignments so each one is visited once.
class SortSpecializer {
 public:
  SortSpecializer(const Theory& th, const Substitution& sigma, const std::vector<Variable>& vars,
                  std::size_t& budget)
      : th_(th), sigma_(sigma), vars_(vars), budget_(budget) {
    for (const auto& [x, t] : sigma)
      if (std::find(vars.begin(), vars.end(), x) != vars.end()) collect_variables(t, range_);
    std::sort(range_.begin(), range_.end());
    range_.erase(std::unique(range_.begin(), range_.end()), range_.end());
  }

  void run(std::vector<Substitution>& out) {
    std::vector<SortId> start;
    for (const auto& y : range_) start.push_back(y.sort);
    visit(start, out);
  }

 private:
  void visit(const std::vector<SortId>& assign, std::vector<Substitution>& out) {
    if (!seen_.insert(assign).second) return;
    if (budget_ == 0) throw SolverLimit("sort specialization limit exceeded");
    --budget_;
    Substitution rho;
    for (std::size_t i = 0; i < range_.size(); ++i)
      if (assign[i] != range_[i].sort) rho.bind(range_[i], make_var(fresh_variable(range_[i].name, assign[i])));
    Substitution next;
    for (const auto& [x, t] : sigma_) next.bind(x, rho.empty() ? t : apply(th_, rho, t));
    for (const auto& [y, t] : rho)
      if (!next.contains(y)) next.bind(y, t);
    const Term* violating = nullptr;
    for (const auto& [x, t] : next) {
      if (std::find(vars_.begin(), vars_.end(), x) == vars_.end()) continue;
      if (!th_.leq(t->sort(), x.sort)) {
        violating = &t;
        break;
      }
    }
    if (!violating) {
      out.push_back(std::move(next));
      return;
    }
    // Only variables of the violating binding are lowered.
    std::vector<Variable> inside = variables(*violating);
    for (std::size_t i = 0; i < range_.size(); ++i) {
      Variable now{assign[i], rho.contains(range_[i]) ? rho.find(range_[i])->get()->var().name : range_[i].name};
      if (std::find(inside.begin(), inside.end(), now) == inside.end()) continue;
      for (SortId lower : th_.sorts().immediate_subsorts(assign[i])) {
        auto lowered = assign;
        lowered[i] = lower;
        visit(lowered, out);
      }
    }
  }

  const Theory& th_;
  const Substitution& sigma_;
  const std::vector<Variable>& vars_;
  std::size_t& budget_;
  std::vector<Variable> range_;
  std::set<std::vector<SortId>> seen_;
};

void specialize_sorts(const Theory& th, const Substitution& sigma, const std::vector<Variable>& vars,
                      std::vector<Substitution>& out, std::size_t& budget) {
  SortSpecializer(th, sigma, vars, budget).run(out);
}

}  // namespace

std::vector<Substitution> minimize(const Theory& th, std::vector<Substitution> subs,
                                   const std::vector<Variable>& vars) {
  std::vector<std::vector<Term>> tuples;
  for (const auto& s : subs) {
    std::vector<Term> tup;
    for (const auto& x : vars) tup.push_back(apply(th, s, make_var(x)));
    tuples.push_back(std::move(tup));
  }
  std::vector<bool> keep(subs.size(), true);
  for (std::size_t j = 0; j < subs.size(); ++j) {
    for (std::size_t i = 0; i < subs.size() && keep[j]; ++i) {
      if (i == j || !keep[i]) continue;
      if (!is_instance(th, tuples[i], tuples[j])) continue;
      bool mutual = is_instance(th, tuples[j], tuples[i]);
      if (!mutual || i < j) keep[j] = false;
    }
  }
  std::vector<Substitution> out;
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (keep[i]) out.push_back(std::move(subs[i]));
  return out;
}

std::vector<Substitution> unify_modulo(const Theory& th,
                                       const std::vector<std::pair<Term, Term>>& eqs,
                                       const UnifyOptions& opts) {
  std::vector<Variable> vars;
  for (const auto& [l, r] : eqs) {
    collect_variables(l, vars);
    collect_variables(r, vars);
  }
  Unifier u(th, opts);
  u.run(State{eqs, {}});

  std::vector<Substitution> typed;
  std::size_t budget = 100000;
  for (const auto& s : u.results()) {
    std::vector<Substitution> spec;
    specialize_sorts(th, s, vars, spec, budget);
    for (auto& t : spec) typed.push_back(t.restricted(vars));
  }
  std::sort(typed.begin(), typed.end(), [](const Substitution& x, const Substitution& y) {
    const auto& bx = x.bindings();
    const auto& by = y.bindings();
    for (std::size_t i = 0; i < std::min(bx.size(), by.size()); ++i) {
      if (auto c = bx[i].first <=> by[i].first; c != 0) return c < 0;
      if (auto c = compare(bx[i].second, by[i].second); c != 0) return c < 0;
    }
    return bx.size() < by.size();
  });
  auto out = minimize(th, std::move(typed), vars);
#ifndef NDEBUG
  for (const auto& s : out)
    for (const auto& [l, r] : eqs)
      if (!equal(apply(th, s, l), apply(th, s, r))) throw Error("unsound unifier");
#endif
  return out;
}

std::vector<Substitution> unify_modulo(const Theory& th, const Term& t1, const Term& t2,
                                       const UnifyOptions& opts) {
  return unify_modulo(th, {{t1, t2}}, opts);
}

}  // namespace eqpe
