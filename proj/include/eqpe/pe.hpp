#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "eqpe/narrowing.hpp"
#include "eqpe/rewriter.hpp"

namespace eqpe {

struct PeOptions {
  std::size_t max_depth = 25;
  std::size_t max_iterations = 50;
  // JSON lines, one object per event.
  std::ostream* trace = nullptr;
};

bool closed_modulo(const std::vector<Term>& q, const Term& t, const Theory& th);

// Maximal subterms rooted by a defined symbol.
std::vector<Term> redexes(const Term& t, const Theory& th);

// Fires when a redex of the candidate embeds a same-root redex of some
// ancestor.
StopPredicate make_whistle(const Theory& th, std::ostream* trace = nullptr);

std::vector<NarrowingTree> unfold(const std::vector<Term>& q, const CompiledTheory& ct,
                                  const PeOptions& opts = {});

std::vector<Term> abstract(const std::vector<Term>& q, const std::vector<Term>& t,
                           const CompiledTheory& ct, std::ostream* trace = nullptr);

struct SpecializationState {
  std::vector<Term> q;
  std::vector<NarrowingTree> trees;  // parallel to q
  std::size_t iterations = 0;
};

SpecializationState eqnpe(const CompiledTheory& ct, const std::vector<Term>& seeds,
                          const PeOptions& opts = {});

// Same set up to variable renaming.
bool same_calls(const Theory& th, const std::vector<Term>& a, const std::vector<Term>& b);

struct Resultant {
  Term lhs;
  Term rhs;
  std::size_t call = 0;  // index into Q
  std::size_t leaf = 0;  // node id in the call's tree
  Substitution subst;    // lhs = subst(Q[call])
};

std::vector<Resultant> extract_resultants(const SpecializationState& state, const Theory& th);

struct RenamingEntry {
  Term pattern;
  std::string name;
  std::vector<Variable> args;
  SymbolId symbol{};  // in the specialized theory
};

class Renaming {
 public:
  const Theory& original() const { return *original_; }
  const std::shared_ptr<Theory>& specialized() const { return specialized_; }
  const std::vector<RenamingEntry>& entries() const { return entries_; }

  // Replaces covered calls by renamed ones; throws NotClosed.
  Term forward(const Term& t) const;
  // Expands renamed calls back into the original signature.
  Term backward(const Term& t) const;

 private:
  friend Renaming rename(const std::vector<Resultant>&, const SpecializationState&,
                         std::shared_ptr<const Theory>, const std::vector<std::pair<Term, std::string>>&);
  std::optional<Term> try_forward(const Term& t) const;

  std::shared_ptr<const Theory> original_;
  std::shared_ptr<Theory> specialized_;
  std::vector<RenamingEntry> entries_;
};

// Names may be given for call patterns (matched up to renaming); the rest
// get the root name with a counter.
Renaming rename(const std::vector<Resultant>& resultants, const SpecializationState& state,
                std::shared_ptr<const Theory> th,
                const std::vector<std::pair<Term, std::string>>& names = {});

// The original signature with the resultants as its equations.
std::shared_ptr<Theory> resultant_theory(const Theory& th, const std::vector<Resultant>& resultants);

struct SpecializeResult {
  SpecializationState state;
  std::vector<Resultant> resultants;
  std::optional<Renaming> renaming;
  std::shared_ptr<Theory> program;  // renamed, or the resultants over th
};

// eqnpe, resultants, closedness check and (optionally) renaming.
SpecializeResult specialize(std::shared_ptr<const Theory> th, const std::vector<Term>& seeds,
                            const PeOptions& opts = {}, bool rename = true,
                            const std::vector<std::pair<Term, std::string>>& names = {});

// Rebuilds a term of one theory in another with the same symbol names.
Term transfer(const Theory& from, const Theory& to, const Term& t);

}  // namespace eqpe
