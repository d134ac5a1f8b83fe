#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "eqpe/module_io.hpp"
#include "eqpe/pe.hpp"
#include "eqpe/rewriter.hpp"

namespace eqpe::testing {

std::filesystem::path module_path(const std::string& name);
Module load(const std::string& name);
Module module_from(const std::string& text);

// A parsed term using the module's let bindings.
Term term(const Module& m, const std::string& text);
Term term(const Theory& th, const std::string& text);

struct ExampleCall {
  std::string file;
  std::string call;
};
// Every bundled module that is expected to converge, with its call.
const std::vector<ExampleCall>& bundled_calls();

std::vector<std::pair<Term, std::string>> module_renames(const Module& m);

struct Report {
  std::size_t checks = 0;
  std::size_t witnesses = 0;  // brute-force solutions compared
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
  void fail(std::string msg) {
    if (failures.size() < 20) failures.push_back(std::move(msg));
    else if (failures.size() == 20) failures.push_back("...");
  }
  std::string summary() const;
};

// Random ground constructor terms of a given sort.
class GroundGen {
 public:
  // With defined = true, defined symbols are used as well as constructors.
  GroundGen(const Theory& th, std::uint64_t seed, bool defined = false)
      : th_(th), rng_(seed), defined_(defined) {}
  Term term(SortId s, int depth);
  Substitution instance_of(const Term& t, int depth);
  std::mt19937_64& rng() { return rng_; }

 private:
  const Theory& th_;
  std::mt19937_64 rng_;
  bool defined_;
};

// Same multiset of terms up to renaming each element separately.
bool same_terms(const Theory& th, const std::vector<Term>& a, const std::vector<Term>& b);
// Same set of equations up to renaming each equation separately.
bool same_equations(const Theory& th, const std::vector<Equation>& got,
                    const std::vector<std::pair<Term, Term>>& expected);

std::string show(const Theory& th, const std::vector<Term>& ts);
std::string show(const Theory& th, const std::vector<Equation>& es);

// Matching and unification against brute-force enumeration over small
// theories with free, C, AC and ACU symbols.
Report solver_oracle(std::uint64_t seed, std::size_t match_problems, std::size_t unify_problems);

// For every call of the final Q: random ground instances normalize to the
// same result in the original and, after back translation, the specialized
// program.
Report semantic_preservation(const ExampleCall& ex, std::size_t samples, std::uint64_t seed);

// Every resultant rhs is closed with respect to the final set of calls.
Report closedness(const SpecializeResult& r, const Theory& th);

}  // namespace eqpe::testing
