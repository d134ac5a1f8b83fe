#include "eqpe/term.hpp"

#include <algorithm>
#include <atomic>
#include <functional>

#include "eqpe/signature.hpp"

namespace eqpe {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::atomic<std::uint64_t> fresh_counter{0};

}  // namespace

TermNode::TermNode(Variable v)
    : is_var_(true), ground_(false), sort_(v.sort), var_(std::move(v)) {
  hash_ = mix(std::hash<std::string>{}(var_.name), static_cast<std::size_t>(index(var_.sort)) + 1);
}

TermNode::TermNode(SymbolId f, std::vector<Term> args, std::vector<std::uint32_t> mults,
                   SortId sort)
    : is_var_(false),
      ground_(true),
      symbol_(f),
      sort_(sort),
      var_{kNoSort, {}},
      args_(std::move(args)),
      mults_(std::move(mults)) {
  std::size_t h = mix(0x51ed27u, index(f));
  for (std::size_t i = 0; i < args_.size(); ++i) {
    h = mix(h, args_[i]->hash());
    if (!mults_.empty()) h = mix(h, mults_[i]);
    ground_ = ground_ && args_[i]->ground();
  }
  hash_ = h;
}

std::uint64_t TermNode::total_args() const {
  if (mults_.empty()) return args_.size();
  std::uint64_t n = 0;
  for (auto m : mults_) n += m;
  return n;
}

std::strong_ordering compare(const Term& a0, const Term& b0) {
  const TermNode* a = a0.get();
  const TermNode* b = b0.get();
  while (true) {
    if (a == b) return std::strong_ordering::equal;
    if (a->is_var() || b->is_var()) {
      if (a->is_var() && b->is_var()) return a->var() <=> b->var();
      return a->is_var() ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (auto c = a->symbol() <=> b->symbol(); c != 0) return c;
    if (auto c = a->total_args() <=> b->total_args(); c != 0) return c;
    if (!a->has_mults() && !b->has_mults()) {
      std::size_t n = a->arity();
      if (n == 0) return std::strong_ordering::equal;
      for (std::size_t i = 0; i + 1 < n; ++i)
        if (auto c = compare(a->arg(i), b->arg(i)); c != 0) return c;
      a = a->arg(n - 1).get();
      b = b->arg(n - 1).get();
      continue;
    }
    std::size_t i = 0, j = 0;
    std::uint32_t ri = a->arity() ? a->mult(0) : 0, rj = b->arity() ? b->mult(0) : 0;
    while (i < a->arity() && j < b->arity()) {
      if (auto c = compare(a->arg(i), b->arg(j)); c != 0) return c;
      std::uint32_t step = std::min(ri, rj);
      ri -= step;
      rj -= step;
      if (ri == 0 && ++i < a->arity()) ri = a->mult(i);
      if (rj == 0 && ++j < b->arity()) rj = b->mult(j);
    }
    return std::strong_ordering::equal;
  }
}

bool equal(const Term& a0, const Term& b0) {
  const TermNode* a = a0.get();
  const TermNode* b = b0.get();
  while (true) {
    if (a == b) return true;
    if (a->hash() != b->hash() || a->is_var() != b->is_var()) return false;
    if (a->is_var()) return a->var() == b->var();
    if (a->symbol() != b->symbol() || a->arity() != b->arity() ||
        a->has_mults() != b->has_mults())
      return false;
    std::size_t n = a->arity();
    for (std::size_t i = 0; i < n; ++i)
      if (a->mult(i) != b->mult(i)) return false;
    if (n == 0) return true;
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!equal(a->arg(i), b->arg(i))) return false;
    a = a->arg(n - 1).get();
    b = b->arg(n - 1).get();
  }
}

Term make_var(Variable v) { return std::make_shared<const TermNode>(std::move(v)); }

Term make_var(std::string name, SortId sort) { return make_var(Variable{sort, std::move(name)}); }

namespace {

bool is_identity(const Symbol& s, const Term& t, IdSide side) {
  const auto& id = s.axioms.identity;
  if (!id || !id->element) return false;
  if (id->side != IdSide::both && id->side != side) return false;
  return equal(t, id->element);
}

Term build_node(const Theory& th, SymbolId f, std::vector<Term> args,
                std::vector<std::uint32_t> mults) {
  std::vector<SortId> sorts;
  sorts.reserve(args.size());
  for (const auto& a : args) sorts.push_back(a->sort());
  SortId s = th.least_sort(f, sorts);
  return std::make_shared<const TermNode>(f, std::move(args), std::move(mults), s);
}

}  // namespace

Term make_ac(const Theory& th, SymbolId f, std::vector<std::pair<Term, std::uint32_t>> elems) {
  const Symbol& sym = th.symbol(f);
  std::vector<std::pair<Term, std::uint64_t>> flat;
  flat.reserve(elems.size());
  for (auto& [t, c] : elems) {
    if (c == 0) continue;
    if (!t->is_var() && t->symbol() == f) {
      for (std::size_t i = 0; i < t->arity(); ++i)
        flat.emplace_back(t->arg(i), std::uint64_t(t->mult(i)) * c);
    } else if (is_identity(sym, t, IdSide::both)) {
      continue;
    } else {
      flat.emplace_back(std::move(t), c);
    }
  }
  bool sorted = std::is_sorted(flat.begin(), flat.end(), [](const auto& x, const auto& y) {
    return compare(x.first, y.first) < 0;
  });
  if (!sorted)
    std::stable_sort(flat.begin(), flat.end(),
                     [](const auto& x, const auto& y) { return compare(x.first, y.first) < 0; });
  std::vector<Term> args;
  std::vector<std::uint32_t> mults;
  std::uint64_t total = 0;
  for (auto& [t, c] : flat) {
    total += c;
    if (!args.empty() && equal(args.back(), t)) {
      mults.back() += static_cast<std::uint32_t>(c);
    } else {
      args.push_back(std::move(t));
      mults.push_back(static_cast<std::uint32_t>(c));
    }
  }
  if (total == 0) {
    if (sym.axioms.identity && sym.axioms.identity->element) return sym.axioms.identity->element;
    throw IllTyped("empty argument list for " + sym.name);
  }
  if (total == 1) return args.front();

  SortId acc = kNoSort;
  bool first = true;
  for (std::size_t i = 0; i < args.size(); ++i) {
    SortId si = args[i]->sort();
    for (std::uint32_t k = 0; k < mults[i]; ++k) {
      if (first) {
        acc = si;
        first = false;
        continue;
      }
      SortId pair[2] = {acc, si};
      SortId next = th.least_sort(f, pair);
      bool stable = next == acc && k > 0;
      acc = next;
      if (stable || acc == kNoSort) break;
    }
  }
  return std::make_shared<const TermNode>(f, std::move(args), std::move(mults), acc);
}

Term make_app(const Theory& th, SymbolId f, std::vector<Term> args) {
  const Symbol& sym = th.symbol(f);
  const AxiomSet& ax = sym.axioms;
  if (args.size() != sym.arity && !(ax.assoc && args.size() >= 2))
    throw IllTyped("wrong number of arguments for " + sym.name);
  if (ax.ac()) {
    std::vector<std::pair<Term, std::uint32_t>> elems;
    elems.reserve(args.size());
    for (auto& a : args) elems.emplace_back(std::move(a), 1);
    return make_ac(th, f, std::move(elems));
  }
  if (ax.assoc) {
    std::vector<Term> seq;
    for (auto& a : args) {
      if (!a->is_var() && a->symbol() == f)
        seq.insert(seq.end(), a->args().begin(), a->args().end());
      else
        seq.push_back(std::move(a));
    }
    if (ax.identity) {
      std::vector<Term> kept;
      for (std::size_t i = 0; i < seq.size(); ++i) {
        bool erase = is_identity(sym, seq[i], IdSide::both) ||
                     (i > 0 && is_identity(sym, seq[i], IdSide::right)) ||
                     (i + 1 < seq.size() && is_identity(sym, seq[i], IdSide::left));
        if (!erase) kept.push_back(seq[i]);
      }
      seq = std::move(kept);
    }
    if (seq.empty()) return ax.identity->element;
    if (seq.size() == 1) return seq.front();
    SortId acc = seq[0]->sort();
    for (std::size_t i = 1; i < seq.size(); ++i) {
      SortId pair[2] = {acc, seq[i]->sort()};
      acc = th.least_sort(f, pair);
    }
    return std::make_shared<const TermNode>(f, std::move(seq), std::vector<std::uint32_t>{}, acc);
  }
  if (ax.identity && args.size() == 2) {
    if (is_identity(sym, args[1], IdSide::right)) return args[0];
    if (is_identity(sym, args[0], IdSide::left)) return args[1];
  }
  if (ax.comm && compare(args[1], args[0]) < 0) std::swap(args[0], args[1]);
  return build_node(th, f, std::move(args), {});
}

Term make_const(const Theory& th, std::string_view name) {
  return make_app(th, th.symbol_id(name, 0), {});
}

Term canonicalize(const Theory& th, const Term& t) {
  if (t->is_var()) return t;
  std::vector<Term> args;
  args.reserve(t->arity());
  for (const auto& a : t->args()) args.push_back(canonicalize(th, a));
  if (t->has_mults()) {
    std::vector<std::pair<Term, std::uint32_t>> elems;
    for (std::size_t i = 0; i < args.size(); ++i) elems.emplace_back(args[i], t->mult(i));
    return make_ac(th, t->symbol(), std::move(elems));
  }
  return make_app(th, t->symbol(), std::move(args));
}

bool eq_modulo(const Theory& th, const Term& a, const Term& b) {
  return equal(canonicalize(th, a), canonicalize(th, b));
}

std::uint64_t Multiset::size() const {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

Multiset ac_view(const Theory& th, SymbolId f, const Term& t) {
  Multiset m;
  if (!t->is_var() && t->symbol() == f) {
    m.elems = t->args();
    for (std::size_t i = 0; i < t->arity(); ++i) m.counts.push_back(t->mult(i));
    return m;
  }
  const auto& id = th.symbol(f).axioms.identity;
  if (id && id->element && equal(t, id->element)) return m;
  m.elems.push_back(t);
  m.counts.push_back(1);
  return m;
}

Term from_multiset(const Theory& th, SymbolId f, const Multiset& m) {
  std::vector<std::pair<Term, std::uint32_t>> elems;
  elems.reserve(m.elems.size());
  for (std::size_t i = 0; i < m.elems.size(); ++i) elems.emplace_back(m.elems[i], m.counts[i]);
  return make_ac(th, f, std::move(elems));
}

std::vector<Term> assoc_view(const Theory& th, SymbolId f, const Term& t) {
  if (!t->is_var() && t->symbol() == f) return t->args();
  const auto& id = th.symbol(f).axioms.identity;
  if (id && id->element && equal(t, id->element)) return {};
  return {t};
}

void collect_variables(const Term& t, std::vector<Variable>& out) {
  if (t->ground()) return;
  if (t->is_var()) {
    if (std::find(out.begin(), out.end(), t->var()) == out.end()) out.push_back(t->var());
    return;
  }
  for (const auto& a : t->args()) collect_variables(a, out);
}

std::vector<Variable> variables(const Term& t) {
  std::vector<Variable> out;
  collect_variables(t, out);
  return out;
}

bool occurs(const Variable& x, const Term& t) {
  if (t->ground()) return false;
  if (t->is_var()) return t->var() == x;
  for (const auto& a : t->args())
    if (occurs(x, a)) return true;
  return false;
}

std::size_t term_size(const Term& t) {
  std::size_t n = 1;
  if (!t->is_var())
    for (std::size_t i = 0; i < t->arity(); ++i) n += t->mult(i) * term_size(t->arg(i));
  return n;
}

std::size_t term_depth(const Term& t) {
  std::size_t d = 0;
  if (!t->is_var())
    for (const auto& a : t->args()) d = std::max(d, term_depth(a));
  return d + 1;
}

std::string base_name(std::string_view name) {
  auto p = name.find('#');
  return std::string(p == std::string_view::npos ? name : name.substr(0, p));
}

Variable fresh_variable(std::string_view base, SortId sort) {
  auto n = fresh_counter.fetch_add(1, std::memory_order_relaxed);
  return Variable{sort, base_name(base) + "#" + std::to_string(n)};
}

// ---------------------------------------------------------------------------

Substitution::Substitution(std::initializer_list<Binding> bs) {
  for (const auto& [x, t] : bs) bind(x, t);
}

const Term* Substitution::find(const Variable& x) const {
  auto it = std::lower_bound(bindings_.begin(), bindings_.end(), x,
                             [](const Binding& b, const Variable& v) { return b.first < v; });
  if (it == bindings_.end() || it->first != x) return nullptr;
  return &it->second;
}

void Substitution::bind(const Variable& x, Term t) {
  auto it = std::lower_bound(bindings_.begin(), bindings_.end(), x,
                             [](const Binding& b, const Variable& v) { return b.first < v; });
  if (it != bindings_.end() && it->first == x)
    it->second = std::move(t);
  else
    bindings_.insert(it, {x, std::move(t)});
}

void Substitution::erase(const Variable& x) {
  auto it = std::lower_bound(bindings_.begin(), bindings_.end(), x,
                             [](const Binding& b, const Variable& v) { return b.first < v; });
  if (it != bindings_.end() && it->first == x) bindings_.erase(it);
}

Substitution Substitution::restricted(const std::vector<Variable>& vars) const {
  Substitution out;
  for (const auto& [x, t] : bindings_)
    if (std::find(vars.begin(), vars.end(), x) != vars.end()) out.bindings_.emplace_back(x, t);
  return out;
}

bool equal(const Substitution& a, const Substitution& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.bindings()[i].first != b.bindings()[i].first ||
        !equal(a.bindings()[i].second, b.bindings()[i].second))
      return false;
  return true;
}

Term apply(const Theory& th, const Substitution& s, const Term& t) {
  if (s.empty() || t->ground()) return t;
  if (t->is_var()) {
    const Term* v = s.find(t->var());
    return v ? *v : t;
  }
  std::vector<Term> args;
  args.reserve(t->arity());
  bool changed = false;
  for (const auto& a : t->args()) {
    args.push_back(apply(th, s, a));
    changed = changed || args.back() != a;
  }
  if (!changed) return t;
  if (t->has_mults()) {
    std::vector<std::pair<Term, std::uint32_t>> elems;
    for (std::size_t i = 0; i < args.size(); ++i) elems.emplace_back(args[i], t->mult(i));
    return make_ac(th, t->symbol(), std::move(elems));
  }
  return make_app(th, t->symbol(), std::move(args));
}

Substitution compose(const Theory& th, const Substitution& s1, const Substitution& s2) {
  Substitution out;
  for (const auto& [x, t] : s1) {
    Term v = apply(th, s2, t);
    if (!(v->is_var() && v->var() == x)) out.bind(x, std::move(v));
  }
  for (const auto& [x, t] : s2)
    if (!s1.contains(x)) out.bind(x, t);
  return out;
}

std::pair<Term, Substitution> fresh_rename(const Theory& th, const Term& t) {
  Substitution r;
  for (const auto& x : variables(t)) r.bind(x, make_var(fresh_variable(x.name, x.sort)));
  return {apply(th, r, t), r};
}

bool sort_respecting(const Theory& th, const Substitution& s) {
  for (const auto& [x, t] : s)
    if (!th.leq(t->sort(), x.sort)) return false;
  return true;
}

// ---------------------------------------------------------------------------

namespace {

void collect_positions(const Term& t, Position& p, std::vector<std::pair<Position, Term>>& out) {
  if (t->is_var()) return;
  out.emplace_back(p, t);
  for (std::uint32_t i = 0; i < t->arity(); ++i) {
    p.push_back(i);
    collect_positions(t->arg(i), p, out);
    p.pop_back();
  }
}

Term replace_at(const Theory& th, const Term& t, const Position& p, std::size_t k, const Term& s) {
  if (k == p.size()) return s;
  if (t->is_var() || p[k] >= t->arity()) throw InvalidPosition("invalid position");
  std::uint32_t i = p[k];
  Term child = replace_at(th, t->arg(i), p, k + 1, s);
  if (t->has_mults()) {
    std::vector<std::pair<Term, std::uint32_t>> elems;
    for (std::size_t j = 0; j < t->arity(); ++j) {
      std::uint32_t m = t->mult(j) - (j == i ? 1 : 0);
      if (m) elems.emplace_back(t->arg(j), m);
    }
    elems.emplace_back(child, 1);
    return make_ac(th, t->symbol(), std::move(elems));
  }
  std::vector<Term> args = t->args();
  args[i] = child;
  return make_app(th, t->symbol(), std::move(args));
}

}  // namespace

std::vector<std::pair<Position, Term>> subterms_at(const Term& t) {
  std::vector<std::pair<Position, Term>> out;
  Position p;
  collect_positions(t, p, out);
  return out;
}

Term subterm(const Term& t, const Position& p) {
  Term cur = t;
  for (auto i : p) {
    if (cur->is_var() || i >= cur->arity()) throw InvalidPosition("invalid position");
    cur = cur->arg(i);
  }
  return cur;
}

Term replace(const Theory& th, const Term& t, const Position& p, const Term& s) {
  return replace_at(th, t, p, 0, s);
}

std::vector<std::vector<std::uint32_t>> submultiset_positions(const Term& t) {
  std::vector<std::vector<std::uint32_t>> out;
  if (t->is_var() || !t->has_mults()) return out;
  const std::uint64_t total = t->total_args();
  std::vector<std::uint32_t> cur(t->arity(), 0);
  std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t i, std::uint64_t n) {
    if (i == cur.size()) {
      if (n >= 2 && n < total) out.push_back(cur);
      return;
    }
    for (std::uint32_t c = 0; c <= t->mult(i); ++c) {
      cur[i] = c;
      rec(i + 1, n + c);
    }
    cur[i] = 0;
  };
  rec(0, 0);
  return out;
}

}  // namespace eqpe
