#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eqpe/signature.hpp"

namespace eqpe {

struct Module {
  std::shared_ptr<Theory> theory;
  // From comment pragmas "--- @rename CALL => NAME" and "--- @let NAME = TERM".
  std::vector<std::pair<std::string, std::string>> renames;
  std::vector<std::pair<std::string, std::string>> lets;
};

Module parse_module(std::string_view text);
Module load_module(const std::filesystem::path& path);

using Lets = std::map<std::string, Term>;

// Mixfix term syntax of the theory. Single tokens naming a let binding are
// replaced by its term; X:Sort introduces a variable inline.
Term parse_term(const Theory& th, std::string_view text, const Lets& lets = {});
Lets parse_lets(const Theory& th, const std::vector<std::pair<std::string, std::string>>& defs);

std::string print_module(const Theory& th);
std::string print_equation(const Theory& th, const Equation& e);

bool structurally_equal(const Theory& a, const Theory& b);

}  // namespace eqpe
