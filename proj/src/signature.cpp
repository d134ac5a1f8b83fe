#include "eqpe/signature.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace eqpe {

namespace {

struct Closure {
  std::vector<std::string> names;
  std::vector<std::vector<bool>> leq;
};

Closure close(std::vector<std::string> names,
              const std::vector<std::pair<std::string, std::string>>& edges) {
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  auto id = [&](const std::string& n) -> std::size_t {
    auto it = std::lower_bound(names.begin(), names.end(), n);
    if (it == names.end() || *it != n) throw UnknownSort("unknown sort " + n);
    return static_cast<std::size_t>(it - names.begin());
  };
  const std::size_t n = names.size();
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) leq[i][i] = true;
  for (const auto& [lo, hi] : edges) leq[id(lo)][id(hi)] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (leq[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (leq[k][j]) leq[i][j] = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && leq[i][j] && leq[j][i])
        throw SignatureError("subsort cycle between " + names[i] + " and " + names[j]);
  return {std::move(names), std::move(leq)};
}

std::vector<int> components(const std::vector<std::vector<bool>>& leq) {
  const std::size_t n = leq.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (leq[i][j]) parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
  std::vector<int> label(n, -1), comp(n);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int r = find(static_cast<int>(i));
    if (label[r] < 0) label[r] = next++;
    comp[i] = label[r];
  }
  return comp;
}

}  // namespace

SortGraph SortGraph::build(std::vector<std::string> names,
                           const std::vector<std::pair<std::string, std::string>>& edges) {
  Closure c = close(names, edges);
  std::vector<int> comp = components(c.leq);
  int ncomp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;

  auto all_edges = edges;
  std::vector<std::string> synthesized;
  for (int k = 0; k < ncomp; ++k) {
    std::vector<std::string> maximal;
    for (std::size_t i = 0; i < c.names.size(); ++i) {
      if (comp[i] != k) continue;
      bool is_max = true;
      for (std::size_t j = 0; j < c.names.size(); ++j)
        if (j != i && c.leq[i][j]) is_max = false;
      if (is_max) maximal.push_back(c.names[i]);
    }
    if (maximal.size() > 1) {
      std::string top = "Top";
      for (const auto& m : maximal) top += "-" + m;
      synthesized.push_back(top);
      for (const auto& m : maximal) all_edges.emplace_back(m, top);
    }
  }
  auto all_names = c.names;
  all_names.insert(all_names.end(), synthesized.begin(), synthesized.end());
  Closure f = close(all_names, all_edges);

  SortGraph g;
  g.names_ = f.names;
  g.leq_ = f.leq;
  g.component_ = components(g.leq_);
  g.synthesized_.assign(g.names_.size(), false);
  for (const auto& s : synthesized) g.synthesized_[index(g.at(s))] = true;
  int n2 = g.component_.empty() ? 0 : *std::max_element(g.component_.begin(), g.component_.end()) + 1;
  g.tops_.assign(n2, kNoSort);
  for (std::size_t i = 0; i < g.names_.size(); ++i) {
    bool is_max = true;
    for (std::size_t j = 0; j < g.names_.size(); ++j)
      if (j != i && g.leq_[i][j]) is_max = false;
    if (is_max) g.tops_[g.component_[i]] = SortId(static_cast<int>(i));
  }
  for (const auto& [lo, hi] : all_edges) g.edges_.emplace_back(g.at(lo), g.at(hi));
  return g;
}

std::optional<SortId> SortGraph::find(std::string_view name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) return std::nullopt;
  return SortId(static_cast<int>(it - names_.begin()));
}

SortId SortGraph::at(std::string_view name) const {
  if (auto s = find(name)) return *s;
  throw UnknownSort("unknown sort " + std::string(name));
}

bool SortGraph::leq(SortId a, SortId b) const {
  if (a == kNoSort || b == kNoSort) return false;
  return leq_[index(a)][index(b)];
}

std::vector<SortId> SortGraph::minimal_upper_bounds(SortId a, SortId b) const {
  std::vector<SortId> ups;
  for (std::size_t i = 0; i < size(); ++i) {
    auto c = SortId{static_cast<std::int32_t>(i)};
    if (leq(a, c) && leq(b, c)) ups.push_back(c);
  }
  std::vector<SortId> out;
  for (SortId c : ups) {
    bool minimal = std::none_of(ups.begin(), ups.end(),
                                [&](SortId d) { return d != c && leq(d, c); });
    if (minimal) out.push_back(c);
  }
  return out;
}

std::vector<SortId> SortGraph::maximal_lower_bounds(SortId a, SortId b) const {
  std::vector<SortId> lows;
  for (std::size_t i = 0; i < size(); ++i) {
    auto c = SortId{static_cast<std::int32_t>(i)};
    if (leq(c, a) && leq(c, b)) lows.push_back(c);
  }
  std::vector<SortId> out;
  for (SortId c : lows) {
    bool maximal = std::none_of(lows.begin(), lows.end(),
                                [&](SortId d) { return d != c && leq(c, d); });
    if (maximal) out.push_back(c);
  }
  return out;
}

std::vector<SortId> SortGraph::immediate_subsorts(SortId s) const {
  std::vector<SortId> below;
  for (std::size_t i = 0; i < size(); ++i) {
    auto c = SortId{static_cast<std::int32_t>(i)};
    if (c != s && leq(c, s)) below.push_back(c);
  }
  std::vector<SortId> out;
  for (SortId c : below) {
    bool maximal = std::none_of(below.begin(), below.end(),
                                [&](SortId d) { return d != c && leq(c, d); });
    if (maximal) out.push_back(c);
  }
  return out;
}

std::vector<std::string> mixfix_pieces(std::string_view name) {
  if (name.find('_') == std::string_view::npos) return {};
  std::vector<std::string> out;
  std::string lit;
  auto flush = [&] {
    if (!lit.empty()) out.push_back(std::move(lit));
    lit.clear();
  };
  for (char ch : name) {
    if (ch == '_') {
      flush();
      out.emplace_back("_");
    } else if (std::string_view("(){}[],").find(ch) != std::string_view::npos) {
      flush();
      out.emplace_back(1, ch);
    } else {
      lit += ch;
    }
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------

std::optional<SymbolId> Theory::find_symbol(std::string_view name, std::size_t arity) const {
  auto it = std::lower_bound(symbols_.begin(), symbols_.end(), std::pair(name, arity),
                             [](const Symbol& s, const auto& key) {
                               return std::pair(std::string_view(s.name), s.arity) < key;
                             });
  if (it == symbols_.end() || it->name != name || it->arity != arity) return std::nullopt;
  return SymbolId(static_cast<int>(it - symbols_.begin()));
}

std::vector<SymbolId> Theory::symbols_named(std::string_view name) const {
  std::vector<SymbolId> out;
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i].name == name) out.push_back(SymbolId(static_cast<int>(i)));
  return out;
}

SymbolId Theory::symbol_id(std::string_view name, std::size_t arity) const {
  if (auto f = find_symbol(name, arity)) return *f;
  throw SignatureError("unknown operator " + std::string(name) + "/" + std::to_string(arity));
}

SortId Theory::compute_least_sort(SymbolId f, std::span<const SortId> args) const {
  const Symbol& sym = symbol(f);
  std::vector<SortId> results;
  for (const OpDecl& d : sym.decls) {
    bool ok = d.args.size() == args.size();
    for (std::size_t i = 0; ok && i < args.size(); ++i) ok = sorts_.leq(args[i], d.args[i]);
    if (ok) results.push_back(d.result);
  }
  SortId best = kNoSort;
  for (SortId r : results) {
    bool minimal = std::none_of(results.begin(), results.end(),
                                [&](SortId o) { return o != r && sorts_.leq(o, r); });
    if (minimal && (best == kNoSort || r < best)) best = r;
  }
  return best;
}

SortId Theory::least_sort(SymbolId f, std::span<const SortId> args) const {
  for (SortId a : args)
    if (a == kNoSort) return kNoSort;
  const Symbol& sym = symbol(f);
  if (sym.axioms.assoc && args.size() > 2) {
    SortId acc = args[0];
    for (std::size_t i = 1; i < args.size() && acc != kNoSort; ++i) {
      SortId pair[2] = {acc, args[i]};
      acc = least_sort(f, pair);
    }
    return acc;
  }
  const auto& table = sort_tables_[index(f)];
  if (!table.empty() && args.size() == sym.arity) {
    std::size_t key = 0;
    for (std::size_t i = args.size(); i-- > 0;) key = key * sorts_.size() + index(args[i]);
    return table[key];
  }
  return compute_least_sort(f, args);
}

std::vector<SymbolId> Theory::defined_symbols() const {
  std::vector<SymbolId> out;
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (defined_[i]) out.push_back(SymbolId(static_cast<int>(i)));
  return out;
}

std::vector<SymbolId> Theory::constructor_symbols() const {
  std::vector<SymbolId> out;
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (!defined_[i]) out.push_back(SymbolId(static_cast<int>(i)));
  return out;
}

std::optional<Variable> Theory::find_variable(std::string_view name) const {
  for (const auto& v : vars_)
    if (v.name == name) return v;
  return std::nullopt;
}

void Theory::set_identity(SymbolId f, Term element) {
  Symbol& sym = symbols_[index(f)];
  if (!sym.axioms.identity) throw SignatureError(sym.name + " has no identity attribute");
  if (!element->ground() || element->sort() == kNoSort)
    throw SignatureError("identity of " + sym.name + " must be a well-typed ground term");
  sym.axioms.identity->element = std::move(element);
}

void Theory::add_variable(Variable v) {
  for (auto& w : vars_)
    if (w.name == v.name) {
      w = std::move(v);
      return;
    }
  vars_.push_back(std::move(v));
}

void Theory::add_equation(Equation e) { equations_.push_back(std::move(e)); }

void Theory::finalize() {
  defined_.assign(symbols_.size(), false);
  for (const auto& e : equations_) {
    if (e.lhs->is_var()) throw SignatureError("equation " + e.label + " has a variable lhs");
    if (e.lhs->sort() == kNoSort || e.rhs->sort() == kNoSort)
      throw IllTyped("equation " + e.label + " is ill-typed");
    auto lv = variables(e.lhs);
    for (const auto& x : variables(e.rhs))
      if (std::find(lv.begin(), lv.end(), x) == lv.end())
        throw NonOrientable("equation " + e.label + " has extra variable " + x.name);
    defined_[index(e.lhs->symbol())] = true;
  }
}

Classification classify_symbols(const Theory& th) {
  return {th.defined_symbols(), th.constructor_symbols()};
}

SortId least_sort(const Term& t, const Theory&) {
  if (t->sort() == kNoSort) throw IllTyped("term has no sort");
  return t->sort();
}

bool sort_leq(SortId a, SortId b, const Theory& th) {
  if (a == kNoSort || b == kNoSort || index(a) >= th.sorts().size() ||
      index(b) >= th.sorts().size())
    throw UnknownSort("undeclared sort");
  return th.leq(a, b);
}

// ---------------------------------------------------------------------------

void TheoryBuilder::add_sort(const std::string& name) {
  if (std::find(sorts_.begin(), sorts_.end(), name) == sorts_.end()) sorts_.push_back(name);
}

void TheoryBuilder::add_subsort(const std::string& lower, const std::string& upper) {
  subsorts_.emplace_back(lower, upper);
}

void TheoryBuilder::add_op(const std::string& name, const std::vector<std::string>& args,
                           const std::string& result, const OpAttributes& attrs) {
  ops_.push_back({name, args, result, attrs, false});
}

void TheoryBuilder::protect_nat() {
  if (nat_) return;
  nat_ = true;
  add_sort("Nat");
  ops_.push_back({"0", {}, "Nat", {}, true});
  ops_.push_back({"s_", {"Nat"}, "Nat", {}, true});
}

std::shared_ptr<Theory> TheoryBuilder::build() const {
  auto th = std::make_shared<Theory>();
  th->name_ = name_;
  th->nat_ = nat_;
  th->sorts_ = SortGraph::build(sorts_, subsorts_);
  for (const auto& s : sorts_) th->sort_order_.push_back(th->sorts_.at(s));

  std::vector<std::pair<std::string, std::size_t>> keys;
  for (const auto& op : ops_) keys.emplace_back(op.name, op.args.size());
  std::vector<std::pair<std::string, std::size_t>> first_order;
  for (const auto& k : keys)
    if (std::find(first_order.begin(), first_order.end(), k) == first_order.end())
      first_order.push_back(k);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  th->symbols_.resize(keys.size());
  std::vector<const OpAttributes*> attrs_of(keys.size(), nullptr);
  for (const auto& op : ops_) {
    auto pos = std::lower_bound(keys.begin(), keys.end(), std::pair(op.name, op.args.size()));
    std::size_t i = static_cast<std::size_t>(pos - keys.begin());
    Symbol& sym = th->symbols_[i];
    OpDecl d;
    for (const auto& a : op.args) d.args.push_back(th->sorts_.at(a));
    d.result = th->sorts_.at(op.result);
    if (attrs_of[i] == nullptr) {
      attrs_of[i] = &op.attrs;
      sym.name = op.name;
      sym.arity = op.args.size();
      sym.builtin = op.builtin;
      sym.axioms.assoc = op.attrs.assoc;
      sym.axioms.comm = op.attrs.comm;
      if (op.attrs.id_side) sym.axioms.identity = IdentityAxiom{nullptr, *op.attrs.id_side};
      sym.pieces = mixfix_pieces(op.name);
      if (!sym.pieces.empty()) {
        auto holes = std::count(sym.pieces.begin(), sym.pieces.end(), "_");
        if (static_cast<std::size_t>(holes) != sym.arity)
          throw SignatureError("operator " + op.name + " has " + std::to_string(holes) +
                               " placeholders but arity " + std::to_string(sym.arity));
      }
      if ((op.attrs.assoc || op.attrs.comm || op.attrs.id_side) && sym.arity != 2)
        throw SignatureError("operator " + op.name + " with axioms must be binary");
    } else {
      const OpAttributes& a = *attrs_of[i];
      if (a.assoc != op.attrs.assoc || a.comm != op.attrs.comm || a.id_side != op.attrs.id_side ||
          a.id_text != op.attrs.id_text)
        throw SignatureError("overloads of " + op.name + " disagree on axioms");
      if (th->sorts_.component(sym.decls.front().result) != th->sorts_.component(d.result))
        throw SignatureError("ad-hoc overloading of " + op.name + " across kinds");
    }
    if (op.attrs.assoc) {
      int k = th->sorts_.component(d.result);
      for (SortId a : d.args)
        if (th->sorts_.component(a) != k)
          throw SignatureError("assoc operator " + op.name + " mixes kinds");
    }
    sym.decls.push_back(std::move(d));
  }
  for (const auto& k : first_order) {
    auto pos = std::lower_bound(keys.begin(), keys.end(), k);
    th->decl_order_.push_back(SymbolId(static_cast<int>(pos - keys.begin())));
  }

  const std::size_t ns = th->sorts_.size();
  th->sort_tables_.resize(th->symbols_.size());
  for (std::size_t i = 0; i < th->symbols_.size(); ++i) {
    std::size_t arity = th->symbols_[i].arity;
    std::size_t cells = 1;
    for (std::size_t k = 0; k < arity; ++k) cells *= ns;
    if (arity > 3 || cells > 200000) continue;
    auto& table = th->sort_tables_[i];
    table.resize(cells);
    std::vector<SortId> args(arity);
    for (std::size_t key = 0; key < cells; ++key) {
      std::size_t rest = key;
      for (std::size_t k = 0; k < arity; ++k) {
        args[k] = SortId(static_cast<int>(rest % ns));
        rest /= ns;
      }
      table[key] = th->compute_least_sort(SymbolId(static_cast<int>(i)), args);
    }
  }
  th->defined_.assign(th->symbols_.size(), false);

  for (std::size_t i = 0; i < th->symbols_.size(); ++i) {
    if (!attrs_of[i] || !attrs_of[i]->id_side) continue;
    const std::string& text = attrs_of[i]->id_text;
    auto c = th->find_symbol(text, 0);
    if (!c) throw SignatureError("identity element " + text + " is not a declared constant");
    Term e = make_app(*th, *c, {});
    const Symbol& sym = th->symbols_[i];
    if (th->sorts_.component(e->sort()) != th->sorts_.component(sym.decls.front().result))
      throw SignatureError("identity element " + text + " has an incompatible sort");
    th->set_identity(SymbolId(static_cast<int>(i)), e);
  }
  return th;
}

}  // namespace eqpe
