#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "eqpe/signature.hpp"
#include "eqpe/term.hpp"

namespace eqpe {

struct UnifyOptions {
  std::size_t basis_cap = 10000;
  std::size_t max_steps = 2000000;
};

// Complete set of unifiers modulo the free, C, AC and ACU axioms. Results
// are restricted to the variables of the problem, idempotent, sort
// respecting, and pairwise incomparable.
std::vector<Substitution> unify_modulo(const Theory& th, const Term& t1, const Term& t2,
                                       const UnifyOptions& opts = {});
std::vector<Substitution> unify_modulo(const Theory& th,
                                       const std::vector<std::pair<Term, Term>>& eqs,
                                       const UnifyOptions& opts = {});

// Minimal non-negative non-zero solutions of a·x = b·y.
std::vector<std::vector<std::uint32_t>> diophantine_basis(const std::vector<std::uint32_t>& a,
                                                          const std::vector<std::uint32_t>& b,
                                                          std::size_t cap = 10000);

// Drops substitutions that are strict instances (on vars) of another one and
// duplicates up to renaming; keeps the first representative.
std::vector<Substitution> minimize(const Theory& th, std::vector<Substitution> subs,
                                   const std::vector<Variable>& vars);

}  // namespace eqpe
