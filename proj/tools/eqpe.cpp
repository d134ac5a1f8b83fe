#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "eqpe/bench.hpp"
#include "eqpe/errors.hpp"
#include "eqpe/module_io.hpp"
#include "eqpe/narrowing.hpp"
#include "eqpe/pe.hpp"
#include "eqpe/printer.hpp"

using namespace eqpe;

namespace {

std::pair<std::string, std::string> split_once(const std::string& s, const std::string& sep) {
  auto p = s.find(sep);
  if (p == std::string::npos) throw Error("expected '" + sep + "' in '" + s + "'");
  auto trim = [](std::string x) {
    auto a = x.find_first_not_of(' ');
    auto b = x.find_last_not_of(' ');
    return a == std::string::npos ? std::string() : x.substr(a, b - a + 1);
  };
  return {trim(s.substr(0, p)), trim(s.substr(p + sep.size()))};
}

// Module pragmas first, command-line definitions override them.
Lets lets_for(const Module& m, const std::vector<std::string>& defs) {
  auto all = m.lets;
  for (const auto& d : defs) all.push_back(split_once(d, "="));
  return parse_lets(*m.theory, all);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

struct Common {
  std::string file;
  std::vector<std::string> lets;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Narrowing-driven partial evaluation of equational programs"};
  app.require_subcommand(1);

  Common spec_opts;
  std::string call;
  std::vector<std::string> names;
  bool no_rename = false;
  std::size_t max_depth = 25, max_iter = 50;
  std::string trace_path, dot_path, out_path;
  auto* spec = app.add_subcommand("specialize", "Specialize a module for a call");
  spec->add_option("file", spec_opts.file, "Module file")->required();
  spec->add_option("--call", call, "Call to specialize")->required();
  spec->add_option("--let", spec_opts.lets, "NAME=TERM binding usable in terms");
  spec->add_option("--name", names, "CALL=>NAME for a renamed symbol");
  spec->add_flag("--no-rename", no_rename, "Emit resultants over the original symbols");
  spec->add_option("--max-depth", max_depth, "Narrowing tree depth bound");
  spec->add_option("--max-iter", max_iter, "Fixpoint iteration bound");
  spec->add_option("--trace", trace_path, "JSON lines trace file");
  spec->add_option("--dot", dot_path, "DOT file with the final trees");
  spec->add_option("-o,--output", out_path, "Output module (default <file>.spec.fmod)");

  Common norm_opts;
  std::string norm_term;
  auto* norm = app.add_subcommand("normalize", "Normalize a term");
  norm->add_option("file", norm_opts.file, "Module file")->required();
  norm->add_option("term", norm_term, "Term")->required();
  norm->add_option("--let", norm_opts.lets, "NAME=TERM binding");

  Common narrow_opts;
  std::string narrow_term, narrow_dot;
  std::size_t narrow_depth = 25;
  auto* narrow = app.add_subcommand("narrow", "Build the folding narrowing tree of a term");
  narrow->add_option("file", narrow_opts.file, "Module file")->required();
  narrow->add_option("term", narrow_term, "Term")->required();
  narrow->add_option("--let", narrow_opts.lets, "NAME=TERM binding");
  narrow->add_option("--dot", narrow_dot, "DOT output file");
  narrow->add_option("--max-depth", narrow_depth, "Depth bound");

  Common var_opts;
  std::string var_term;
  std::size_t var_depth = 25;
  auto* vars = app.add_subcommand("variants", "Print the variants of a term level by level");
  vars->add_option("file", var_opts.file, "Module file")->required();
  vars->add_option("term", var_term, "Term")->required();
  vars->add_option("--let", var_opts.lets, "NAME=TERM binding");
  vars->add_option("--max-depth", var_depth, "Depth bound");

  std::string orig_file, spec_file, orig_call, spec_call, input_kind = "string";
  std::vector<std::string> bench_lets;
  std::size_t size = 100000, runs = 10;
  std::uint64_t seed = 1;
  auto* bench = app.add_subcommand("bench", "Compare normalization time of two programs");
  bench->add_option("original", orig_file, "Original module")->required();
  bench->add_option("specialized", spec_file, "Specialized module")->required();
  bench->add_option("--call", orig_call, "Original call template with a HOLE variable")->required();
  bench->add_option("--spec-call", spec_call, "Specialized call template (default: --call)");
  bench->add_option("--input", input_kind, "Generated input: string or graph")
      ->check(CLI::IsMember({"string", "graph"}));
  bench->add_option("--size", size, "Input size");
  bench->add_option("--seed", seed, "Random seed");
  bench->add_option("--runs", runs, "Runs to average");
  bench->add_option("--let", bench_lets, "NAME=TERM binding for the original module");

  CLI11_PARSE(app, argc, argv);

  int code = 0;
  auto body = [&] {
    try {
      if (*spec) {
        auto m = load_module(spec_opts.file);
        auto lets = lets_for(m, spec_opts.lets);
        Term seed_call = parse_term(*m.theory, call, lets);
        std::vector<std::pair<Term, std::string>> renames;
        for (const auto& [pattern, name] : m.renames) renames.emplace_back(parse_term(*m.theory, pattern, lets), name);
        for (const auto& n : names) {
          auto [pattern, name] = split_once(n, "=>");
          renames.emplace_back(parse_term(*m.theory, pattern, lets), name);
        }
        std::ofstream trace;
        PeOptions opts;
        opts.max_depth = max_depth;
        opts.max_iterations = max_iter;
        if (!trace_path.empty()) {
          trace.open(trace_path);
          opts.trace = &trace;
        }
        auto result = specialize(m.theory, {seed_call}, opts, !no_rename, renames);
        if (!dot_path.empty()) {
          std::string dot;
          for (const auto& t : result.state.trees) dot += to_dot(*m.theory, t);
          write_file(dot_path, dot);
        }
        std::string text = print_module(*result.program);
        write_file(out_path.empty() ? spec_opts.file + ".spec.fmod" : out_path, text);
        std::cout << text;
      } else if (*norm) {
        auto m = load_module(norm_opts.file);
        Term t = parse_term(*m.theory, norm_term, lets_for(m, norm_opts.lets));
        CompiledTheory ct(m.theory);
        std::cout << to_string(*m.theory, normalize(t, ct)) << '\n';
      } else if (*narrow) {
        auto m = load_module(narrow_opts.file);
        Term t = parse_term(*m.theory, narrow_term, lets_for(m, narrow_opts.lets));
        CompiledTheory ct(m.theory);
        auto tree = build_folding_tree(t, ct, make_whistle(*m.theory), narrow_depth);
        std::string dot = to_dot(*m.theory, tree);
        if (narrow_dot.empty()) std::cout << dot;
        else write_file(narrow_dot, dot);
        for (const auto* n : leaves(tree))
          std::cout << to_string(*m.theory, n->acc) << "  " << to_string(*m.theory, n->term) << '\n';
      } else if (*vars) {
        auto m = load_module(var_opts.file);
        Term t = parse_term(*m.theory, var_term, lets_for(m, var_opts.lets));
        CompiledTheory ct(m.theory);
        auto tree = build_folding_tree(t, ct, nullptr, var_depth);
        std::size_t depth = 0;
        bool any = true;
        while (any) {
          any = false;
          for (const auto& n : tree.nodes) {
            if (n.depth != depth || n.status == NodeStatus::folded) continue;
            if (!any) std::cout << "level " << depth << '\n';
            any = true;
            std::cout << "  " << to_string(*m.theory, n.term) << "  " << to_string(*m.theory, n.acc) << '\n';
          }
          ++depth;
        }
        if (tree.depth_exceeded) std::cout << "depth bound reached\n";
      } else if (*bench) {
        auto om = load_module(orig_file);
        auto sm = load_module(spec_file);
        Term ot = parse_term(*om.theory, orig_call, lets_for(om, bench_lets));
        Term st = parse_term(*sm.theory, spec_call.empty() ? orig_call : spec_call, lets_for(sm, {}));
        auto kind = input_kind == "string" ? InputKind::string : InputKind::graph;
        BenchReport r;
        {
          CompiledTheory oc(om.theory), sc(sm.theory);
          Term oi = fill_template(*om.theory, ot, generate_input(*om.theory, kind, size, seed));
          Term si = fill_template(*sm.theory, st, generate_input(*sm.theory, kind, size, seed));
          r.original = measure(oc, oi, runs);
          r.specialized = measure(sc, si, runs);
        }
        r.improvement = improvement(r.original.ms, r.specialized.ms);
        std::cout << to_json(r) << '\n';
      }
    } catch (const ParseError& e) {
      std::cerr << "parse error at " << e.what() << '\n';
      code = 1;
    } catch (const NonConvergence& e) {
      std::cerr << "error: " << e.what() << '\n';
      code = 2;
    } catch (const NonTermination& e) {
      std::cerr << "error: " << e.what() << '\n';
      code = 2;
    } catch (const SolverLimit& e) {
      std::cerr << "error: " << e.what() << '\n';
      code = 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      code = 1;
    }
  };
  run_with_stack(body);
  return code;
}
