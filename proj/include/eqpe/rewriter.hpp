#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eqpe/signature.hpp"
#include "eqpe/term.hpp"

namespace eqpe {

enum class RuleOrigin { equation, identity_variant, extension };

struct Rule {
  std::string label;
  Term lhs;
  Term rhs;
  RuleOrigin origin = RuleOrigin::equation;
};

struct RewriteStats {
  std::uint64_t steps = 0;
  std::uint64_t match_attempts = 0;
};

class CompiledTheory {
 public:
  explicit CompiledTheory(std::shared_ptr<const Theory> th);

  const Theory& theory() const { return *theory_; }
  const std::shared_ptr<const Theory>& theory_ptr() const { return theory_; }
  const std::vector<Rule>& rules() const { return rules_; }
  const std::vector<std::size_t>& rules_for(SymbolId f) const { return index_[eqpe::index(f)]; }

  std::uint64_t fuel = 1000000;

 private:
  std::shared_ptr<const Theory> theory_;
  std::vector<Rule> rules_;
  std::vector<std::vector<std::size_t>> index_;
};

CompiledTheory compile(std::shared_ptr<const Theory> th);

struct RewriteResult {
  Term term;
  std::string label;
  Position position;
};

// One innermost-leftmost step, or nothing if t is irreducible.
std::optional<RewriteResult> rewrite_step(const Term& t, const CompiledTheory& ct,
                                          RewriteStats* stats = nullptr);
// Throws NonTermination when more than ct.fuel steps are needed.
Term normalize(const Term& t, const CompiledTheory& ct, RewriteStats* stats = nullptr);

}  // namespace eqpe
