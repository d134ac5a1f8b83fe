#include "eqpe/matching.hpp"

#include <algorithm>
#include <memory>

namespace eqpe {

namespace {

struct AcState {
  SymbolId f;
  std::vector<std::pair<Term, std::uint32_t>> pats;
  std::shared_ptr<const std::vector<Term>> elems;
  std::vector<std::uint32_t> counts;
};

struct AssocState {
  SymbolId f;
  std::shared_ptr<const std::vector<Term>> pats;
  std::shared_ptr<const std::vector<Term>> subj;
  std::size_t pi = 0;
  std::size_t si = 0;
};

struct Goal {
  Term pattern;
  Term subject;
  std::shared_ptr<const AcState> ac = nullptr;
  std::shared_ptr<const AssocState> assoc = nullptr;
};

class Matcher {
 public:
  Matcher(const Theory& th, const MatchSink& sink, MatchStats* stats)
      : th_(th), sink_(sink), stats_(stats) {}

  bool solve(std::vector<Goal>& goals, Substitution& sub) {
    if (goals.empty()) return sink_(sub);
    Goal g = std::move(goals.back());
    goals.pop_back();
    if (stats_) ++stats_->attempts;
    bool stop;
    if (g.ac)
      stop = solve_ac(*g.ac, goals, sub);
    else if (g.assoc)
      stop = solve_assoc(*g.assoc, goals, sub);
    else
      stop = solve_plain(g.pattern, g.subject, goals, sub);
    goals.push_back(std::move(g));
    return stop;
  }

 private:
  bool with_binding(const Variable& x, const Term& value, std::vector<Goal>& goals,
                    Substitution& sub) {
    if (!th_.leq(value->sort(), x.sort)) return false;
    sub.bind(x, value);
    bool stop = solve(goals, sub);
    sub.erase(x);
    return stop;
  }

  // Runs solve with extra goals pushed (processed first-to-last).
  bool with_goals(std::vector<Goal> extra, std::vector<Goal>& goals, Substitution& sub) {
    std::size_t base = goals.size();
    for (auto it = extra.rbegin(); it != extra.rend(); ++it) goals.push_back(std::move(*it));
    bool stop = solve(goals, sub);
    goals.resize(base);
    return stop;
  }

  bool solve_plain(const Term& p, const Term& s, std::vector<Goal>& goals, Substitution& sub) {
    if (p->is_var()) {
      if (const Term* v = sub.find(p->var())) return equal(*v, s) && solve(goals, sub);
      return with_binding(p->var(), s, goals, sub);
    }
    if (p->ground()) return equal(p, s) && solve(goals, sub);

    const SymbolId f = p->symbol();
    const Symbol& sym = th_.symbol(f);
    const AxiomSet& ax = sym.axioms;
    if (ax.ac()) {
      auto st = std::make_shared<AcState>();
      st->f = f;
      for (std::size_t i = 0; i < p->arity(); ++i) st->pats.emplace_back(p->arg(i), p->mult(i));
      Multiset m = ac_view(th_, f, s);
      st->elems = std::make_shared<const std::vector<Term>>(std::move(m.elems));
      st->counts = std::move(m.counts);
      return with_goals({Goal{nullptr, nullptr, std::move(st), nullptr}}, goals, sub);
    }
    if (ax.assoc) {
      auto st = std::make_shared<AssocState>();
      st->f = f;
      st->pats = std::make_shared<const std::vector<Term>>(p->args());
      st->subj = std::make_shared<const std::vector<Term>>(assoc_view(th_, f, s));
      return with_goals({Goal{nullptr, nullptr, nullptr, std::move(st)}}, goals, sub);
    }

    if (!s->is_var() && s->symbol() == f) {
      std::vector<Goal> sub_goals;
      for (std::size_t i = 0; i < p->arity(); ++i) sub_goals.push_back({p->arg(i), s->arg(i)});
      if (with_goals(sub_goals, goals, sub)) return true;
      if (ax.comm && !equal(s->arg(0), s->arg(1))) {
        if (with_goals({{p->arg(0), s->arg(1)}, {p->arg(1), s->arg(0)}}, goals, sub)) return true;
      }
    }
    if (ax.identity && ax.identity->element) {
      const Term& e = ax.identity->element;
      auto try_side = [&](std::size_t var_pos, std::size_t other) {
        const Term& x = p->arg(var_pos);
        if (!x->is_var()) return false;
        if (const Term* v = sub.find(x->var())) {
          if (!equal(*v, e)) return false;
          return with_goals({{p->arg(other), s}}, goals, sub);
        }
        if (!th_.leq(e->sort(), x->var().sort)) return false;
        sub.bind(x->var(), e);
        bool stop = with_goals({{p->arg(other), s}}, goals, sub);
        sub.erase(x->var());
        return stop;
      };
      IdSide side = ax.identity->side;
      bool right = side != IdSide::left || ax.comm;
      bool left = side != IdSide::right || ax.comm;
      if (right && try_side(1, 0)) return true;
      if (left && try_side(0, 1)) return true;
    }
    return false;
  }

  static bool subtract(const std::vector<Term>& elems, std::vector<std::uint32_t>& counts,
                       const Term& t, std::uint64_t times) {
    for (std::size_t i = 0; i < elems.size(); ++i) {
      if (equal(elems[i], t)) {
        if (counts[i] < times) return false;
        counts[i] -= static_cast<std::uint32_t>(times);
        return true;
      }
    }
    return false;
  }

  Term remainder(SymbolId f, const std::vector<Term>& elems,
                 const std::vector<std::uint32_t>& counts, std::uint32_t divisor) {
    std::vector<std::pair<Term, std::uint32_t>> parts;
    for (std::size_t i = 0; i < elems.size(); ++i)
      if (counts[i]) parts.emplace_back(elems[i], counts[i] / divisor);
    if (parts.empty()) {
      const auto& id = th_.symbol(f).axioms.identity;
      return id ? id->element : nullptr;
    }
    return make_ac(th_, f, std::move(parts));
  }

  bool solve_ac(const AcState& st0, std::vector<Goal>& goals, Substitution& sub) {
    const SymbolId f = st0.f;
    const auto& elems = *st0.elems;
    std::vector<std::uint32_t> counts = st0.counts;
    std::vector<std::pair<Term, std::uint32_t>> vars;
    std::vector<std::pair<Term, std::uint32_t>> rigid;
    for (const auto& [p, c] : st0.pats) {
      if (p->is_var()) {
        if (const Term* v = sub.find(p->var())) {
          Multiset m = ac_view(th_, f, *v);
          for (std::size_t i = 0; i < m.elems.size(); ++i)
            if (!subtract(elems, counts, m.elems[i], std::uint64_t(m.counts[i]) * c)) return false;
        } else {
          vars.emplace_back(p, c);
        }
      } else if (p->ground()) {
        if (!subtract(elems, counts, p, c)) return false;
      } else {
        rigid.emplace_back(p, c);
      }
    }

    if (!rigid.empty()) {
      const Term& p = rigid.front().first;
      const Symbol& psym = th_.symbol(p->symbol());
      bool loose = psym.axioms.identity.has_value();
      for (std::size_t i = 0; i < elems.size(); ++i) {
        if (!counts[i]) continue;
        const Term& e = elems[i];
        if (!loose && (e->is_var() || e->symbol() != p->symbol())) continue;
        auto next = std::make_shared<AcState>();
        next->f = f;
        next->elems = st0.elems;
        next->counts = counts;
        next->counts[i] -= 1;
        next->pats = vars;
        for (std::size_t r = 0; r < rigid.size(); ++r) {
          std::uint32_t c = rigid[r].second - (r == 0 ? 1 : 0);
          if (c) next->pats.emplace_back(rigid[r].first, c);
        }
        if (with_goals({Goal{p, e, nullptr, nullptr}, Goal{nullptr, nullptr, std::move(next), nullptr}},
                       goals, sub))
          return true;
      }
      return false;
    }

    if (vars.empty()) {
      for (auto c : counts)
        if (c) return false;
      return solve(goals, sub);
    }
    if (vars.size() == 1) {
      std::uint32_t m = vars.front().second;
      for (auto c : counts)
        if (c % m) return false;
      Term value = remainder(f, elems, counts, m);
      if (!value) return false;
      return with_binding(vars.front().first->var(), value, goals, sub);
    }
    // Several unbound variables: choose the part of the first one, leave the
    // rest to a recursive goal.
    const Variable& x = vars.front().first->var();
    std::uint32_t m = vars.front().second;
    bool allow_empty = th_.symbol(f).axioms.identity.has_value();
    std::vector<std::uint32_t> take(elems.size(), 0);
    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
      if (i == elems.size()) {
        bool any = std::any_of(take.begin(), take.end(), [](auto c) { return c > 0; });
        if (!any && !allow_empty) return false;
        Term value = remainder(f, elems, take, 1);
        if (!th_.leq(value->sort(), x.sort)) return false;
        auto next = std::make_shared<AcState>();
        next->f = f;
        next->elems = st0.elems;
        next->counts = counts;
        for (std::size_t k = 0; k < elems.size(); ++k) next->counts[k] -= take[k] * m;
        next->pats.assign(vars.begin() + 1, vars.end());
        sub.bind(x, value);
        bool stop = with_goals({Goal{nullptr, nullptr, std::move(next), nullptr}}, goals, sub);
        sub.erase(x);
        return stop;
      }
      for (std::uint32_t c = counts[i] / m + 1; c-- > 0;) {
        take[i] = c;
        if (rec(i + 1)) return true;
      }
      take[i] = 0;
      return false;
    };
    return rec(0);
  }

  bool solve_assoc(const AssocState& st, std::vector<Goal>& goals, Substitution& sub) {
    const auto& pats = *st.pats;
    const auto& subj = *st.subj;
    const Symbol& sym = th_.symbol(st.f);
    if (st.pi == pats.size()) return st.si == subj.size() && solve(goals, sub);
    auto advance = [&](std::size_t dp, std::size_t ds) {
      auto next = std::make_shared<AssocState>(st);
      next->pi += dp;
      next->si += ds;
      return Goal{nullptr, nullptr, nullptr, std::move(next)};
    };
    const Term& p = pats[st.pi];
    std::size_t left = subj.size() - st.si;
    if (p->is_var()) {
      if (const Term* v = sub.find(p->var())) {
        auto seq = assoc_view(th_, st.f, *v);
        if (seq.size() > left) return false;
        for (std::size_t k = 0; k < seq.size(); ++k)
          if (!equal(seq[k], subj[st.si + k])) return false;
        return with_goals({advance(1, seq.size())}, goals, sub);
      }
      std::size_t min_len = sym.axioms.identity ? 0 : 1;
      for (std::size_t len = min_len; len <= left; ++len) {
        Term value;
        if (len == 0)
          value = sym.axioms.identity->element;
        else if (len == 1)
          value = subj[st.si];
        else
          value = make_app(th_, st.f,
                           std::vector<Term>(subj.begin() + st.si, subj.begin() + st.si + len));
        if (!th_.leq(value->sort(), p->var().sort)) continue;
        sub.bind(p->var(), value);
        bool stop = with_goals({advance(1, len)}, goals, sub);
        sub.erase(p->var());
        if (stop) return true;
      }
      return false;
    }
    if (left == 0) return false;
    return with_goals({Goal{p, subj[st.si], nullptr, nullptr}, advance(1, 1)}, goals, sub);
  }

  const Theory& th_;
  const MatchSink& sink_;
  MatchStats* stats_;
};

}  // namespace

bool for_each_match(const Theory& th, const std::vector<std::pair<Term, Term>>& problems,
                    const Substitution& initial, const MatchSink& sink, MatchStats* stats) {
  Matcher m(th, sink, stats);
  std::vector<Goal> goals;
  for (auto it = problems.rbegin(); it != problems.rend(); ++it)
    goals.push_back({it->first, it->second, nullptr, nullptr});
  Substitution sub = initial;
  return m.solve(goals, sub);
}

std::vector<Substitution> match_modulo(const Theory& th, const Term& pattern,
                                       const Term& subject) {
  std::vector<Substitution> out;
  for_each_match(th, {{pattern, subject}}, {}, [&](const Substitution& s) {
    if (std::none_of(out.begin(), out.end(), [&](const Substitution& o) { return equal(o, s); }))
      out.push_back(s);
    return false;
  });
#ifndef NDEBUG
  for (const auto& s : out)
    if (!equal(apply(th, s, pattern), subject)) throw Error("unsound matcher");
#endif
  return out;
}

std::optional<Substitution> match_first(const Theory& th, const Term& pattern,
                                        const Term& subject, MatchStats* stats,
                                        const Substitution& initial) {
  std::optional<Substitution> out;
  for_each_match(
      th, {{pattern, subject}}, initial,
      [&](const Substitution& s) {
        out = s;
        return true;
      },
      stats);
  return out;
}

bool is_instance(const Theory& th, const Term& general, const Term& specific) {
  return match_first(th, general, specific).has_value();
}

bool is_instance(const Theory& th, const std::vector<Term>& general,
                 const std::vector<Term>& specific) {
  if (general.size() != specific.size()) return false;
  std::vector<std::pair<Term, Term>> probs;
  for (std::size_t i = 0; i < general.size(); ++i) probs.emplace_back(general[i], specific[i]);
  return for_each_match(th, probs, {}, [](const Substitution&) { return true; });
}

namespace {

bool is_renaming(const Substitution& s) {
  std::vector<Variable> seen;
  for (const auto& [x, t] : s) {
    if (!t->is_var() || t->var().sort != x.sort) return false;
    if (std::find(seen.begin(), seen.end(), t->var()) != seen.end()) return false;
    seen.push_back(t->var());
  }
  return true;
}

}  // namespace

std::optional<Substitution> eq_modulo_renaming(const Theory& th, const Term& t1, const Term& t2) {
  if (t1->hash() == t2->hash() && equal(t1, t2)) {
    Substitution id;
    for (const auto& x : variables(t2)) id.bind(x, make_var(x));
    return id;
  }
  if (variables(t1).size() != variables(t2).size()) return std::nullopt;
  std::optional<Substitution> out;
  for_each_match(th, {{t2, t1}}, {}, [&](const Substitution& s) {
    if (!is_renaming(s)) return false;
    out = s;
    return true;
  });
  return out;
}

bool renaming_equal(const Theory& th, const std::vector<Term>& a, const std::vector<Term>& b) {
  if (a.size() != b.size()) return false;
  std::vector<Variable> va, vb;
  for (const auto& t : a) collect_variables(t, va);
  for (const auto& t : b) collect_variables(t, vb);
  if (va.size() != vb.size()) return false;
  std::vector<std::pair<Term, Term>> probs;
  for (std::size_t i = 0; i < a.size(); ++i) probs.emplace_back(b[i], a[i]);
  return for_each_match(th, probs, {}, [](const Substitution& s) { return is_renaming(s); });
}

}  // namespace eqpe
