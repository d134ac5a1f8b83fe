#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "eqpe/errors.hpp"
#include "eqpe/term.hpp"

namespace eqpe {

class SortGraph {
 public:
  // Sorts get ids in name order; components lacking a unique maximal sort
  // get a synthesized top sort.
  static SortGraph build(std::vector<std::string> names,
                         const std::vector<std::pair<std::string, std::string>>& edges);

  std::size_t size() const { return names_.size(); }
  const std::string& name(SortId s) const { return names_[index(s)]; }
  std::optional<SortId> find(std::string_view name) const;
  SortId at(std::string_view name) const;  // throws UnknownSort
  bool leq(SortId a, SortId b) const;
  bool synthesized(SortId s) const { return synthesized_[index(s)]; }
  int component(SortId s) const { return component_[index(s)]; }
  SortId top(SortId s) const { return tops_[component_[index(s)]]; }
  std::vector<SortId> minimal_upper_bounds(SortId a, SortId b) const;
  std::vector<SortId> maximal_lower_bounds(SortId a, SortId b) const;
  // Maximal sorts strictly below s.
  std::vector<SortId> immediate_subsorts(SortId s) const;
  // Declared (non-transitive) edges, as given.
  const std::vector<std::pair<SortId, SortId>>& edges() const { return edges_; }

 private:
  std::vector<std::string> names_;
  std::vector<bool> synthesized_;
  std::vector<std::vector<bool>> leq_;
  std::vector<int> component_;
  std::vector<SortId> tops_;
  std::vector<std::pair<SortId, SortId>> edges_;
};

enum class IdSide { both, left, right };

struct IdentityAxiom {
  Term element;
  IdSide side = IdSide::both;
};

struct AxiomSet {
  bool assoc = false;
  bool comm = false;
  std::optional<IdentityAxiom> identity;

  bool ac() const { return assoc && comm; }
  bool empty() const { return !assoc && !comm && !identity; }
};

struct OpDecl {
  std::vector<SortId> args;
  SortId result;
};

struct Symbol {
  std::string name;
  std::size_t arity = 0;
  AxiomSet axioms;
  std::vector<OpDecl> decls;
  // Mixfix template split into literal tokens and "_" holes; empty for
  // prefix syntax.
  std::vector<std::string> pieces;
  bool builtin = false;
};

struct Equation {
  std::string label;
  Term lhs;
  Term rhs;
  bool variant = false;
};

struct OpAttributes {
  bool assoc = false;
  bool comm = false;
  std::optional<IdSide> id_side;
  std::string id_text;  // name of the identity constant
};

class Theory {
 public:
  const std::string& name() const { return name_; }
  const SortGraph& sorts() const { return sorts_; }
  SortId sort(std::string_view name) const { return sorts_.at(name); }

  std::size_t symbol_count() const { return symbols_.size(); }
  const Symbol& symbol(SymbolId f) const { return symbols_[index(f)]; }
  std::optional<SymbolId> find_symbol(std::string_view name, std::size_t arity) const;
  std::vector<SymbolId> symbols_named(std::string_view name) const;
  SymbolId symbol_id(std::string_view name, std::size_t arity) const;
  // Declaration order, for printing.
  const std::vector<SymbolId>& declaration_order() const { return decl_order_; }
  const std::vector<SortId>& sort_order() const { return sort_order_; }

  // Least result sort of f applied to arguments of the given sorts, or
  // kNoSort. Variadic assoc applications fold binary application.
  SortId least_sort(SymbolId f, std::span<const SortId> args) const;
  bool leq(SortId a, SortId b) const { return sorts_.leq(a, b); }

  const std::vector<Equation>& equations() const { return equations_; }
  bool defined(SymbolId f) const { return defined_[index(f)]; }
  std::vector<SymbolId> defined_symbols() const;
  std::vector<SymbolId> constructor_symbols() const;

  const std::vector<Variable>& declared_variables() const { return vars_; }
  std::optional<Variable> find_variable(std::string_view name) const;
  bool protects_nat() const { return nat_; }

  // Construction phase only: these mutate a theory that has not yet been
  // shared.
  void set_identity(SymbolId f, Term element);
  void add_variable(Variable v);
  void add_equation(Equation e);
  void finalize();

 private:
  friend class TheoryBuilder;

  SortId compute_least_sort(SymbolId f, std::span<const SortId> args) const;

  std::string name_;
  SortGraph sorts_;
  std::vector<Symbol> symbols_;
  std::vector<SymbolId> decl_order_;
  std::vector<SortId> sort_order_;
  std::vector<std::vector<SortId>> sort_tables_;
  std::vector<Equation> equations_;
  std::vector<bool> defined_;
  std::vector<Variable> vars_;
  bool nat_ = false;
};

// Classification into defined symbols (roots of equation lhs's) and the rest.
struct Classification {
  std::vector<SymbolId> defined;
  std::vector<SymbolId> constructors;
};
Classification classify_symbols(const Theory& th);

SortId least_sort(const Term& t, const Theory& th);  // throws IllTyped
bool sort_leq(SortId a, SortId b, const Theory& th);

class TheoryBuilder {
 public:
  explicit TheoryBuilder(std::string name) : name_(std::move(name)) {}

  void add_sort(const std::string& name);
  void add_subsort(const std::string& lower, const std::string& upper);
  void add_op(const std::string& name, const std::vector<std::string>& args,
              const std::string& result, const OpAttributes& attrs = {});
  // Sort Nat with 0 and s_.
  void protect_nat();

  // Identity elements must name constants of the signature.
  std::shared_ptr<Theory> build() const;

 private:
  struct OpEntry {
    std::string name;
    std::vector<std::string> args;
    std::string result;
    OpAttributes attrs;
    bool builtin;
  };
  std::string name_;
  std::vector<std::string> sorts_;
  std::vector<std::pair<std::string, std::string>> subsorts_;
  std::vector<OpEntry> ops_;
  bool nat_ = false;
};

// Splits an operator name into mixfix pieces ("_->_._" -> _ -> _ . _).
std::vector<std::string> mixfix_pieces(std::string_view name);

}  // namespace eqpe
