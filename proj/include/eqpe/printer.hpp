#pragma once

#include <functional>
#include <string>

#include "eqpe/signature.hpp"
#include "eqpe/term.hpp"

namespace eqpe {

struct PrintOptions {
  // Overrides how variables are written; defaults to their names.
  std::function<std::string(const Variable&)> var_name;
  bool var_sorts = false;  // write X:Sort
};

std::string to_string(const Theory& th, const Term& t, const PrintOptions& opts = {});
std::string to_string(const Theory& th, const Substitution& s, const PrintOptions& opts = {});

}  // namespace eqpe
