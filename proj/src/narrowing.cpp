#include "eqpe/narrowing.hpp"

#include <algorithm>
#include <sstream>

#include "eqpe/matching.hpp"
#include "eqpe/printer.hpp"
#include "eqpe/unification.hpp"

namespace eqpe {

namespace {

Substitution normalize_bindings(const Substitution& s, const CompiledTheory& ct) {
  Substitution out;
  for (const auto& [x, t] : s) out.bind(x, normalize(t, ct));
  return out;
}

std::vector<Term> image(const Theory& th, const Substitution& s, const std::vector<Variable>& vars) {
  std::vector<Term> out;
  out.reserve(vars.size());
  for (const auto& x : vars) out.push_back(apply(th, s, make_var(x)));
  return out;
}

}  // namespace

std::vector<NarrowStep> narrow_steps(const Term& t, const CompiledTheory& ct) {
  const Theory& th = ct.theory();
  const auto vars = variables(t);
  std::vector<NarrowStep> raw;
  for (std::size_t idx = 0; idx < ct.rules().size(); ++idx) {
    const Rule& rule = ct.rules()[idx];
    for (const auto& [pos, sub] : subterms_at(t)) {
      if (sub->symbol() != rule.lhs->symbol()) continue;
      Substitution fresh;
      for (const auto& x : variables(rule.lhs)) fresh.bind(x, make_var(fresh_variable(x.name, x.sort)));
      Term lhs = apply(th, fresh, rule.lhs);
      Term rhs = apply(th, fresh, rule.rhs);
      for (const auto& sigma : unify_modulo(th, sub, lhs)) {
        Term next = normalize(apply(th, sigma, replace(th, t, pos, rhs)), ct);
        raw.push_back({normalize_bindings(sigma.restricted(vars), ct), next, rule.label, pos});
      }
    }
  }
  // Keep one step per class of equally general substitutions, dropping the
  // strictly less general ones.
  std::vector<std::vector<Term>> tuples;
  for (const auto& s : raw) tuples.push_back(image(th, s.subst, vars));
  std::vector<bool> keep(raw.size(), true);
  for (std::size_t j = 0; j < raw.size(); ++j) {
    for (std::size_t i = 0; i < raw.size() && keep[j]; ++i) {
      if (i == j || !keep[i]) continue;
      if (!is_instance(th, tuples[i], tuples[j])) continue;
      bool mutual = is_instance(th, tuples[j], tuples[i]);
      if (mutual && !renaming_equal(th, {raw[i].term}, {raw[j].term})) continue;
      if (!mutual || i < j) keep[j] = false;
    }
  }
  std::vector<NarrowStep> out;
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (keep[i]) out.push_back(std::move(raw[i]));
  return out;
}

std::vector<std::size_t> NarrowingTree::ancestors(std::size_t id) const {
  std::vector<std::size_t> chain;
  std::optional<std::size_t> cur = id;
  while (cur) {
    chain.push_back(*cur);
    cur = nodes[*cur].parent;
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

NarrowingTree build_folding_tree(const Term& t, const CompiledTheory& ct, const StopPredicate& stop,
                                 std::size_t max_depth) {
  const Theory& th = ct.theory();
  NarrowingTree tree;
  tree.root_vars = variables(t);
  VariantNode root;
  root.call = t;
  root.term = normalize(t, ct);
  tree.nodes.push_back(root);

  auto subsumes = [&](const VariantNode& w, const VariantNode& c) {
    std::vector<Term> general{w.term}, specific{c.term};
    auto gi = image(th, w.acc, tree.root_vars);
    auto si = image(th, c.acc, tree.root_vars);
    general.insert(general.end(), gi.begin(), gi.end());
    specific.insert(specific.end(), si.begin(), si.end());
    return is_instance(th, general, specific);
  };

  std::vector<std::size_t> frontier{0};
  while (!frontier.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t id : frontier) {
      auto steps = narrow_steps(tree.nodes[id].term, ct);
      if (steps.empty()) {
        tree.nodes[id].status = NodeStatus::leaf;
        continue;
      }
      tree.nodes[id].status = NodeStatus::expanded;
      for (auto& st : steps) {
        VariantNode c;
        c.id = tree.nodes.size();
        c.term = st.term;
        c.call = st.term;
        c.acc = normalize_bindings(compose(th, tree.nodes[id].acc, st.subst).restricted(tree.root_vars), ct);
        c.parent = id;
        c.label = st.label;
        c.position = st.position;
        c.step = st.subst;
        c.depth = tree.nodes[id].depth + 1;
        for (const auto& w : tree.nodes) {
          if (w.status == NodeStatus::folded) continue;
          if (subsumes(w, c)) {
            c.status = NodeStatus::folded;
            c.folded_into = w.id;
            break;
          }
        }
        tree.nodes[id].children.push_back(c.id);
        tree.nodes.push_back(c);
        VariantNode& node = tree.nodes.back();
        if (node.status == NodeStatus::folded) continue;
        if (stop && stop(tree, tree.ancestors(id), node)) {
          node.status = NodeStatus::stopped;
        } else if (node.depth >= max_depth) {
          node.status = NodeStatus::depth_limit;
          tree.depth_exceeded = true;
        } else {
          next.push_back(node.id);
        }
      }
    }
    frontier = std::move(next);
  }
  return tree;
}

std::vector<const VariantNode*> leaves(const NarrowingTree& tree) {
  std::vector<const VariantNode*> out;
  for (const auto& n : tree.nodes)
    if (n.children.empty() && n.status != NodeStatus::folded) out.push_back(&n);
  return out;
}

std::vector<std::pair<Substitution, Term>> derivations(const NarrowingTree& tree) {
  std::vector<std::pair<Substitution, Term>> out;
  for (const auto* n : leaves(tree)) out.emplace_back(n->acc, n->term);
  return out;
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const Theory& th, const NarrowingTree& tree) {
  std::ostringstream os;
  os << "digraph narrowing {\n  node [shape=box, fontname=\"monospace\"];\n";
  const auto& root = tree.root();
  bool normalized = !equal(root.call, root.term);
  if (normalized) os << "  call [label=\"" << escape(to_string(th, root.call)) << "\"];\n";
  for (const auto& n : tree.nodes) {
    std::string style;
    switch (n.status) {
      case NodeStatus::stopped: style = ", style=dashed"; break;
      case NodeStatus::folded: style = ", style=dotted"; break;
      case NodeStatus::depth_limit: style = ", color=red"; break;
      default: break;
    }
    os << "  n" << n.id << " [label=\"" << escape(to_string(th, n.term)) << "\"" << style << "];\n";
  }
  if (normalized) os << "  call -> n0 [style=dotted];\n";
  for (const auto& n : tree.nodes) {
    if (!n.parent) continue;
    os << "  n" << *n.parent << " -> n" << n.id << " [label=\""
       << escape(to_string(th, n.step) + " " + n.label) << "\"];\n";
    if (n.folded_into) os << "  n" << n.id << " -> n" << *n.folded_into << " [style=dashed];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace eqpe
