#pragma once

#include "eqpe/signature.hpp"
#include "eqpe/term.hpp"

namespace eqpe {

// u ⊴_B t: t reduces to (a renaming of) u by dropping symbols, working on
// canonical forms modulo the axioms of each symbol.
bool embeds_modulo(const Term& u, const Term& t, const Theory& th);

// Plain homeomorphic embedding, axioms ignored.
bool classic_embedding(const Term& u, const Term& t);

}  // namespace eqpe
