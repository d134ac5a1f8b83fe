#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "eqpe/rewriter.hpp"

namespace eqpe {

// Runs fn on a thread with a large stack; deep right-nested terms need it
// for normalization and destruction. Exceptions are rethrown.
void run_with_stack(const std::function<void()>& fn, std::size_t bytes = std::size_t{1} << 30);

enum class InputKind { string, graph };

// A word 0^a 1^b over __ with a + b = size (size >= 1).
Term generate_string(const Theory& th, std::size_t size, std::uint64_t seed);
// A chain of size nodes {prev id next} over _;_ with ids cycling through 0..4.
Term generate_graph(const Theory& th, std::size_t size, std::uint64_t seed);
Term generate_input(const Theory& th, InputKind kind, std::size_t size, std::uint64_t seed);

// Replaces the variable named HOLE in the template.
Term fill_template(const Theory& th, const Term& tmpl, const Term& input);

struct ProgramStats {
  double ms = 0;  // mean over runs
  std::uint64_t steps = 0;
  std::uint64_t match_attempts = 0;
};

struct BenchReport {
  ProgramStats original;
  ProgramStats specialized;
  double improvement = 0;  // 100 * (orig - spec) / orig, 0 when orig is 0
};

ProgramStats measure(const CompiledTheory& ct, const Term& input, std::size_t runs, Term* result = nullptr);
double improvement(double original_ms, double specialized_ms);

std::string to_json(const BenchReport& r);

}  // namespace eqpe
