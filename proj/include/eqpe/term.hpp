#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eqpe {

enum class SortId : std::int32_t {};
enum class SymbolId : std::int32_t {};

inline constexpr SortId kNoSort{-1};

constexpr std::size_t index(SortId s) { return static_cast<std::size_t>(s); }
constexpr std::size_t index(SymbolId f) { return static_cast<std::size_t>(f); }

class Theory;

struct Variable {
  SortId sort;
  std::string name;

  friend auto operator<=>(const Variable&, const Variable&) = default;
};

class TermNode;
using Term = std::shared_ptr<const TermNode>;

// Variables and applications share one node type. Applications of assoc
// symbols are flattened; for assoc+comm symbols the arguments are distinct,
// sorted, and carry multiplicities.
class TermNode {
 public:
  explicit TermNode(Variable v);
  TermNode(SymbolId f, std::vector<Term> args, std::vector<std::uint32_t> mults,
           SortId sort);

  bool is_var() const { return is_var_; }
  const Variable& var() const { return var_; }
  SymbolId symbol() const { return symbol_; }
  const std::vector<Term>& args() const { return args_; }
  std::size_t arity() const { return args_.size(); }
  const Term& arg(std::size_t i) const { return args_[i]; }
  std::uint32_t mult(std::size_t i) const {
    return mults_.empty() ? 1u : mults_[i];
  }
  bool has_mults() const { return !mults_.empty(); }
  // Argument count with multiplicities expanded.
  std::uint64_t total_args() const;
  SortId sort() const { return sort_; }
  std::size_t hash() const { return hash_; }
  bool ground() const { return ground_; }

 private:
  bool is_var_;
  bool ground_;
  SymbolId symbol_{};
  SortId sort_;
  std::size_t hash_;
  Variable var_;
  std::vector<Term> args_;
  std::vector<std::uint32_t> mults_;
};

// Total canonical order: variables first by (sort, name), applications by
// (symbol, argument count, arguments).
std::strong_ordering compare(const Term& a, const Term& b);
bool equal(const Term& a, const Term& b);

struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return compare(a, b) < 0; }
};
struct TermHash {
  std::size_t operator()(const Term& t) const { return t->hash(); }
};
struct TermEq {
  bool operator()(const Term& a, const Term& b) const { return equal(a, b); }
};

Term make_var(Variable v);
Term make_var(std::string name, SortId sort);
// Builds f(args) in canonical form. Arguments must already be canonical.
Term make_app(const Theory& th, SymbolId f, std::vector<Term> args);
// Builds f over a multiset of elements (AC symbols only).
Term make_ac(const Theory& th, SymbolId f,
             std::vector<std::pair<Term, std::uint32_t>> elems);
Term make_const(const Theory& th, std::string_view name);

Term canonicalize(const Theory& th, const Term& t);
bool eq_modulo(const Theory& th, const Term& a, const Term& b);

// Multiset of arguments of an AC symbol f as seen from t: the arguments of t
// if t is f-rooted, empty if t is f's identity, otherwise {t}.
struct Multiset {
  std::vector<Term> elems;
  std::vector<std::uint32_t> counts;

  std::uint64_t size() const;
  bool empty() const { return elems.empty(); }
};
Multiset ac_view(const Theory& th, SymbolId f, const Term& t);
Term from_multiset(const Theory& th, SymbolId f, const Multiset& m);

// Sequence of arguments of an assoc symbol f as seen from t.
std::vector<Term> assoc_view(const Theory& th, SymbolId f, const Term& t);

std::vector<Variable> variables(const Term& t);
void collect_variables(const Term& t, std::vector<Variable>& out);
bool occurs(const Variable& x, const Term& t);
std::size_t term_size(const Term& t);
std::size_t term_depth(const Term& t);

// Fresh variables get a globally unique numeric suffix: base#N.
Variable fresh_variable(std::string_view base, SortId sort);
std::string base_name(std::string_view name);

class Substitution {
 public:
  using Binding = std::pair<Variable, Term>;

  Substitution() = default;
  Substitution(std::initializer_list<Binding> bs);

  const Term* find(const Variable& x) const;
  bool contains(const Variable& x) const { return find(x) != nullptr; }
  // Adds or replaces a binding.
  void bind(const Variable& x, Term t);
  void erase(const Variable& x);
  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  auto begin() const { return bindings_.begin(); }
  auto end() const { return bindings_.end(); }
  const std::vector<Binding>& bindings() const { return bindings_; }

  Substitution restricted(const std::vector<Variable>& vars) const;

 private:
  std::vector<Binding> bindings_;
};

bool equal(const Substitution& a, const Substitution& b);

Term apply(const Theory& th, const Substitution& s, const Term& t);
// apply(compose(s1, s2), t) == apply(s2, apply(s1, t))
Substitution compose(const Theory& th, const Substitution& s1,
                     const Substitution& s2);
std::pair<Term, Substitution> fresh_rename(const Theory& th, const Term& t);
// Checks least_sort(value) <= sort(variable) for every binding.
bool sort_respecting(const Theory& th, const Substitution& s);

using Position = std::vector<std::uint32_t>;

// Non-variable positions in pre-order. For AC applications an index
// addresses a distinct argument; replace() substitutes one copy of it.
std::vector<std::pair<Position, Term>> subterms_at(const Term& t);
Term subterm(const Term& t, const Position& p);
Term replace(const Theory& th, const Term& t, const Position& p, const Term& s);
// Proper sub-multisets with at least two elements of an AC-rooted term, as
// lists of per-argument counts.
std::vector<std::vector<std::uint32_t>> submultiset_positions(const Term& t);

}  // namespace eqpe
