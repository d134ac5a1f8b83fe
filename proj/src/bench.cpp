#include "eqpe/bench.hpp"

#include <pthread.h>

#include <chrono>
#include <exception>
#include <map>
#include <random>

#include <json.hpp>

#include "eqpe/errors.hpp"

namespace eqpe {

namespace {

struct Job {
  const std::function<void()>* fn;
  std::exception_ptr error;
};

void* trampoline(void* p) {
  auto* job = static_cast<Job*>(p);
  try {
    (*job->fn)();
  } catch (...) {
    job->error = std::current_exception();
  }
  return nullptr;
}

}  // namespace

void run_with_stack(const std::function<void()>& fn, std::size_t bytes) {
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, bytes);
  Job job{&fn, nullptr};
  pthread_t tid;
  int rc = pthread_create(&tid, &attr, trampoline, &job);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    fn();
    return;
  }
  pthread_join(tid, nullptr);
  if (job.error) std::rethrow_exception(job.error);
}

Term generate_string(const Theory& th, std::size_t size, std::uint64_t seed) {
  if (size == 0) return make_const(th, "eps");
  std::mt19937_64 rng(seed);
  std::size_t zeros = std::uniform_int_distribution<std::size_t>(0, size - 1)(rng);
  SymbolId cons = th.symbol_id("__", 2);
  Term zero = make_const(th, "0");
  Term one = make_const(th, "1");
  Term t = one;  // zeros < size, so the word ends in 1
  for (std::size_t k = size - 1; k-- > 0;) t = make_app(th, cons, {k < zeros ? zero : one, t});
  return t;
}

Term generate_graph(const Theory& th, std::size_t size, std::uint64_t seed) {
  if (size == 0) return make_const(th, "mt");
  (void)seed;
  SymbolId node = th.symbol_id("{___}", 3);
  SymbolId join = th.symbol_id("_;_", 2);
  std::vector<Term> ids;
  for (const char* n : {"0", "1", "2", "3", "4"}) ids.push_back(make_const(th, n));
  Term none = make_const(th, "#");
  std::map<Term, std::uint32_t, TermLess> counts;
  for (std::size_t k = 0; k < size; ++k) {
    Term prev = k == 0 ? none : ids[(k - 1) % 5];
    Term next = k + 1 == size ? none : ids[(k + 1) % 5];
    ++counts[make_app(th, node, {prev, ids[k % 5], next})];
  }
  std::vector<std::pair<Term, std::uint32_t>> elems(counts.begin(), counts.end());
  return make_ac(th, join, std::move(elems));
}

Term generate_input(const Theory& th, InputKind kind, std::size_t size, std::uint64_t seed) {
  return kind == InputKind::string ? generate_string(th, size, seed) : generate_graph(th, size, seed);
}

Term fill_template(const Theory& th, const Term& tmpl, const Term& input) {
  for (const auto& x : variables(tmpl)) {
    if (x.name != "HOLE") continue;
    Substitution s;
    s.bind(x, input);
    return apply(th, s, tmpl);
  }
  throw Error("call template has no HOLE variable");
}

ProgramStats measure(const CompiledTheory& ct, const Term& input, std::size_t runs, Term* result) {
  ProgramStats out;
  double total = 0;
  for (std::size_t r = 0; r < std::max<std::size_t>(runs, 1); ++r) {
    RewriteStats stats;
    auto start = std::chrono::steady_clock::now();
    Term nf = normalize(input, ct, &stats);
    auto end = std::chrono::steady_clock::now();
    total += std::chrono::duration<double, std::milli>(end - start).count();
    if (r == 0) {
      out.steps = stats.steps;
      out.match_attempts = stats.match_attempts;
      if (result) *result = nf;
    }
  }
  out.ms = total / static_cast<double>(std::max<std::size_t>(runs, 1));
  return out;
}

double improvement(double original_ms, double specialized_ms) {
  if (original_ms <= 0) return 0;
  return 100.0 * (original_ms - specialized_ms) / original_ms;
}

std::string to_json(const BenchReport& r) {
  auto prog = [](const ProgramStats& p) {
    return nlohmann::json{{"ms", p.ms}, {"steps", p.steps}, {"match_attempts", p.match_attempts}};
  };
  nlohmann::json j{{"original", prog(r.original)},
                   {"specialized", prog(r.specialized)},
                   {"improvement", r.improvement}};
  return j.dump(2);
}

}  // namespace eqpe
