#pragma once

#include <cstddef>
#include <vector>

#include "eqpe/signature.hpp"
#include "eqpe/term.hpp"

namespace eqpe {

struct Generalizer {
  Term term;
  Substitution left;   // apply(left, term) =_B t1
  Substitution right;  // apply(right, term) =_B t2
};

struct GeneralizeOptions {
  // AC argument lists longer than this are paired greedily.
  std::size_t full_pairing_limit = 8;
};

// Minimal complete set of least general generalizations modulo the axioms.
std::vector<Generalizer> lgg_modulo(const Term& t1, const Term& t2, const Theory& th,
                                    const GeneralizeOptions& opts = {});

struct BmtDetail {
  std::vector<std::vector<Term>> w;  // generalizer terms per element of U
  std::vector<Term> m;                // least general among all of them
  std::vector<Term> best;
};

BmtDetail bmt_detail(const std::vector<Term>& u, const Term& t, const Theory& th);
std::vector<Term> bmt(const std::vector<Term>& u, const Term& t, const Theory& th);

}  // namespace eqpe
