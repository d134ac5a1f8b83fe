#include "eqpe/generalization.hpp"

#include <algorithm>
#include <functional>

#include "eqpe/errors.hpp"
#include "eqpe/matching.hpp"

namespace eqpe {

namespace {

struct Entry {
  Term s;
  Term t;
  Variable z;
};
using Store = std::vector<Entry>;

struct Partial {
  Term w;
  Store store;
};

std::vector<Term> expanded(const Multiset& m) {
  std::vector<Term> out;
  for (std::size_t i = 0; i < m.elems.size(); ++i)
    for (std::uint32_t k = 0; k < m.counts[i]; ++k) out.push_back(m.elems[i]);
  return out;
}

class Generalize {
 public:
  Generalize(const Theory& th, const GeneralizeOptions& opts) : th_(th), opts_(opts) {}

  std::vector<Partial> gen(const Term& s, const Term& t, const Store& store) {
    if (s->ground() && equal(s, t)) return {{s, store}};
    std::vector<Partial> out;
    if (!s->is_var() && !t->is_var() && s->symbol() == t->symbol()) {
      const AxiomSet& ax = th_.symbol(s->symbol()).axioms;
      if (ax.ac()) {
        out = gen_ac(s->symbol(), s, t, store);
      } else if (ax.comm) {
        out = gen_args(s->symbol(), {s->arg(0), s->arg(1)}, {t->arg(0), t->arg(1)}, store);
        auto swapped = gen_args(s->symbol(), {s->arg(0), s->arg(1)}, {t->arg(1), t->arg(0)}, store);
        out.insert(out.end(), swapped.begin(), swapped.end());
      } else if (s->arity() == t->arity()) {
        out = gen_args(s->symbol(), s->args(), t->args(), store);
      }
    } else {
      // One side may be seen as a one-element application of an ACU symbol.
      for (const Term* rooted : {&s, &t}) {
        const Term& r = *rooted;
        if (r->is_var()) continue;
        const AxiomSet& ax = th_.symbol(r->symbol()).axioms;
        if (!ax.ac() || !ax.identity) continue;
        auto more = gen_ac(r->symbol(), s, t, store);
        out.insert(out.end(), more.begin(), more.end());
      }
    }
    std::erase_if(out, [](const Partial& p) { return p.w->sort() == kNoSort; });
    if (out.empty()) out = generalize_by_variable(s, t, store);
    return out;
  }

 private:
  std::vector<Partial> generalize_by_variable(const Term& s, const Term& t, const Store& store) {
    for (const auto& e : store)
      if (equal(e.s, s) && equal(e.t, t)) return {{make_var(e.z), store}};
    std::vector<SortId> sorts = th_.sorts().minimal_upper_bounds(s->sort(), t->sort());
    if (sorts.empty()) sorts.push_back(th_.sorts().top(s->sort()));
    std::vector<Partial> out;
    for (SortId k : sorts) {
      Variable z = fresh_variable("G", k);
      Store next = store;
      next.push_back({s, t, z});
      out.push_back({make_var(z), std::move(next)});
    }
    return out;
  }

  std::vector<Partial> gen_args(SymbolId f, const std::vector<Term>& ss, const std::vector<Term>& ts,
                                const Store& store) {
    struct Acc {
      std::vector<Term> args;
      Store store;
    };
    std::vector<Acc> acc{{{}, store}};
    for (std::size_t i = 0; i < ss.size(); ++i) {
      std::vector<Acc> next;
      for (const auto& a : acc) {
        for (auto& p : gen(ss[i], ts[i], a.store)) {
          Acc b{a.args, std::move(p.store)};
          b.args.push_back(p.w);
          next.push_back(std::move(b));
        }
      }
      acc = std::move(next);
    }
    std::vector<Partial> out;
    for (auto& a : acc) out.push_back({make_app(th_, f, std::move(a.args)), std::move(a.store)});
    return out;
  }

  Term join(SymbolId f, std::vector<Term> args) const {
    if (args.empty()) return th_.symbol(f).axioms.identity->element;
    if (args.size() == 1) return args.front();
    return make_app(th_, f, std::move(args));
  }

  // Pairs arguments with equal roots; unpaired arguments are generalized
  // together by fresh variables.
  std::vector<Partial> gen_ac(SymbolId f, const Term& s, const Term& t, const Store& store) {
    const bool unit = th_.symbol(f).axioms.identity.has_value();
    auto ss = expanded(ac_view(th_, f, s));
    auto ts = expanded(ac_view(th_, f, t));
    const bool greedy = ss.size() > opts_.full_pairing_limit || ts.size() > opts_.full_pairing_limit;

    std::vector<Partial> out;
    std::vector<int> pair(ss.size(), -1);
    std::vector<bool> used(ts.size(), false);

    auto finish = [&] {
      std::vector<Term> ls, lt;
      std::vector<std::pair<Term, Term>> paired;
      for (std::size_t i = 0; i < ss.size(); ++i) {
        if (pair[i] < 0) ls.push_back(ss[i]);
        else paired.emplace_back(ss[i], ts[static_cast<std::size_t>(pair[i])]);
      }
      for (std::size_t j = 0; j < ts.size(); ++j)
        if (!used[j]) lt.push_back(ts[j]);
      if (!unit && (ls.empty() != lt.empty())) return;
      if (ls.empty() && lt.empty() && paired.empty()) return;

      struct Acc {
        std::vector<Term> args;
        Store store;
      };
      std::vector<Acc> acc{{{}, store}};
      for (const auto& [a, b] : paired) {
        std::vector<Acc> next;
        for (const auto& x : acc) {
          for (auto& p : gen(a, b, x.store)) {
            Acc y{x.args, std::move(p.store)};
            y.args.push_back(p.w);
            next.push_back(std::move(y));
          }
        }
        acc = std::move(next);
      }
      if (!ls.empty() || !lt.empty()) {
        // Leftovers: one variable per pair of blocks, or a single variable
        // when the identity can absorb the difference.
        std::size_t k = unit ? 1 : std::min(ls.size(), lt.size());
        std::vector<std::pair<Term, Term>> blocks;
        for (std::size_t i = 0; i < k; ++i) {
          auto block = [&](const std::vector<Term>& side) -> Term {
            if (unit) return join(f, side);
            if (i + 1 < k) return side[i];
            std::vector<Term> rest(side.begin() + static_cast<std::ptrdiff_t>(i), side.end());
            return join(f, rest);
          };
          blocks.emplace_back(block(ls), block(lt));
        }
        for (const auto& [a, b] : blocks) {
          std::vector<Acc> next;
          for (const auto& x : acc) {
            for (auto& p : generalize_by_variable(a, b, x.store)) {
              Acc y{x.args, std::move(p.store)};
              y.args.push_back(p.w);
              next.push_back(std::move(y));
            }
          }
          acc = std::move(next);
        }
      }
      for (auto& x : acc) out.push_back({join(f, std::move(x.args)), std::move(x.store)});
    };

    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == ss.size()) {
        finish();
        return;
      }
      bool paired_one = false;
      if (!ss[i]->is_var()) {
        const Term* last = nullptr;
        for (std::size_t j = 0; j < ts.size(); ++j) {
          if (used[j] || ts[j]->is_var() || ts[j]->symbol() != ss[i]->symbol()) continue;
          if (last && equal(*last, ts[j])) continue;  // same choice as before
          last = &ts[j];
          used[j] = true;
          pair[i] = static_cast<int>(j);
          rec(i + 1);
          used[j] = false;
          pair[i] = -1;
          paired_one = true;
          if (greedy) return;
        }
      }
      if (greedy && paired_one) return;
      rec(i + 1);
    };
    rec(0);
    return out;
  }

  const Theory& th_;
  const GeneralizeOptions& opts_;
};

Substitution side(const Store& store, bool left) {
  Substitution s;
  for (const auto& e : store) s.bind(e.z, left ? e.s : e.t);
  return s;
}

// Drops renamings and strictly more general terms.
template <class T, class Key>
std::vector<T> least_general(const Theory& th, std::vector<T> items, Key key) {
  std::vector<bool> keep(items.size(), true);
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = 0; j < items.size() && keep[i]; ++j) {
      if (i == j || !keep[j]) continue;
      if (!is_instance(th, key(items[i]), key(items[j]))) continue;
      bool back = is_instance(th, key(items[j]), key(items[i]));
      if (!back || j < i) keep[i] = false;
    }
  }
  std::vector<T> out;
  for (std::size_t i = 0; i < items.size(); ++i)
    if (keep[i]) out.push_back(std::move(items[i]));
  return out;
}

}  // namespace

std::vector<Generalizer> lgg_modulo(const Term& t1, const Term& t2, const Theory& th,
                                    const GeneralizeOptions& opts) {
  Generalize g(th, opts);
  std::vector<Generalizer> all;
  for (auto& p : g.gen(t1, t2, {})) {
    Generalizer r{p.w, side(p.store, true), side(p.store, false)};
#ifndef NDEBUG
    if (!eq_modulo(th, apply(th, r.left, r.term), t1) || !eq_modulo(th, apply(th, r.right, r.term), t2))
      throw Error("internal: generalizer does not instantiate to its inputs");
#endif
    all.push_back(std::move(r));
  }
  return least_general(th, std::move(all), [](const Generalizer& x) { return x.term; });
}

BmtDetail bmt_detail(const std::vector<Term>& u, const Term& t, const Theory& th) {
  if (u.empty()) throw EmptyInput("best matching terms of an empty set");
  BmtDetail d;
  std::vector<Term> pool;
  for (const auto& ui : u) {
    std::vector<Term> wi;
    for (const auto& g : lgg_modulo(ui, t, th)) wi.push_back(g.term);
    pool.insert(pool.end(), wi.begin(), wi.end());
    d.w.push_back(std::move(wi));
  }
  d.m = least_general(th, pool, [](const Term& x) { return x; });
  for (std::size_t i = 0; i < u.size(); ++i) {
    bool hit = std::any_of(d.w[i].begin(), d.w[i].end(), [&](const Term& w) {
      return std::any_of(d.m.begin(), d.m.end(),
                         [&](const Term& m) { return eq_modulo_renaming(th, w, m).has_value(); });
    });
    if (hit) d.best.push_back(u[i]);
  }
  return d;
}

std::vector<Term> bmt(const std::vector<Term>& u, const Term& t, const Theory& th) {
  return bmt_detail(u, t, th).best;
}

}  // namespace eqpe
