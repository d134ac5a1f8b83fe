#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eqpe/rewriter.hpp"

namespace eqpe {

struct NarrowStep {
  Substitution subst;  // restricted to the variables of the narrowed term
  Term term;           // normalized result
  std::string label;
  Position position;
};

// All one-step narrowings of a normalized term, deduplicated and with
// strictly less general substitutions removed.
std::vector<NarrowStep> narrow_steps(const Term& t, const CompiledTheory& ct);

enum class NodeStatus { expanded, leaf, stopped, folded, depth_limit };

struct VariantNode {
  std::size_t id = 0;
  Term call;  // the goal as given; differs from term only at the root
  Term term;
  Substitution acc;
  std::optional<std::size_t> parent;
  std::string label;
  Position position;
  Substitution step;
  std::size_t depth = 0;
  NodeStatus status = NodeStatus::leaf;
  std::optional<std::size_t> folded_into;
  std::vector<std::size_t> children;
};

struct NarrowingTree {
  std::vector<VariantNode> nodes;
  std::vector<Variable> root_vars;
  bool depth_exceeded = false;

  const VariantNode& root() const { return nodes.front(); }
  std::vector<std::size_t> ancestors(std::size_t id) const;  // root first, id included
};

using StopPredicate = std::function<bool(const NarrowingTree&, const std::vector<std::size_t>&,
                                         const VariantNode&)>;

NarrowingTree build_folding_tree(const Term& t, const CompiledTheory& ct, const StopPredicate& stop,
                                 std::size_t max_depth = 25);

std::vector<const VariantNode*> leaves(const NarrowingTree& tree);
std::vector<std::pair<Substitution, Term>> derivations(const NarrowingTree& tree);

std::string to_dot(const Theory& th, const NarrowingTree& tree);

}  // namespace eqpe
