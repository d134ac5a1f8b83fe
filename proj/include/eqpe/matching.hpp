#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "eqpe/signature.hpp"
#include "eqpe/term.hpp"

namespace eqpe {

struct MatchStats {
  std::uint64_t attempts = 0;
};

// Returning true from the sink stops the enumeration.
using MatchSink = std::function<bool(const Substitution&)>;

// Enumerates matchers θ ⊇ initial with θ(pattern_i) =_B subject_i for every
// pair. Subject variables are treated as constants. Returns true if the sink
// stopped the search.
bool for_each_match(const Theory& th, const std::vector<std::pair<Term, Term>>& problems,
                    const Substitution& initial, const MatchSink& sink,
                    MatchStats* stats = nullptr);

std::vector<Substitution> match_modulo(const Theory& th, const Term& pattern,
                                       const Term& subject);
std::optional<Substitution> match_first(const Theory& th, const Term& pattern,
                                        const Term& subject, MatchStats* stats = nullptr,
                                        const Substitution& initial = {});
// True iff specific is a B-instance of general.
bool is_instance(const Theory& th, const Term& general, const Term& specific);
bool is_instance(const Theory& th, const std::vector<Term>& general,
                 const std::vector<Term>& specific);
// A variable renaming ρ with t1 =_B t2ρ, if any.
std::optional<Substitution> eq_modulo_renaming(const Theory& th, const Term& t1, const Term& t2);
bool renaming_equal(const Theory& th, const std::vector<Term>& a, const std::vector<Term>& b);

}  // namespace eqpe
