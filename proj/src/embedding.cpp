#include "eqpe/embedding.hpp"

#include <functional>
#include <map>

namespace eqpe {

namespace {

std::vector<Term> expanded(const Term& t) {
  std::vector<Term> out;
  for (std::size_t i = 0; i < t->arity(); ++i)
    for (std::uint32_t k = 0; k < t->mult(i); ++k) out.push_back(t->arg(i));
  return out;
}

class Embedder {
 public:
  explicit Embedder(const Theory& th) : th_(th) {}

  bool emb(const Term& u, const Term& t) {
    auto key = std::make_pair(u.get(), t.get());
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool r = compute(u, t);
    memo_[key] = r;
    return r;
  }

 private:
  bool compute(const Term& u, const Term& t) {
    if (u->is_var() && t->is_var()) return true;
    if (t->is_var()) return false;
    for (const auto& a : t->args())
      if (emb(u, a)) return true;
    if (u->is_var() || u->symbol() != t->symbol()) return false;
    const AxiomSet& ax = th_.symbol(t->symbol()).axioms;
    if (ax.assoc) return couple_blocks(u, t, ax.comm);
    if (ax.comm) {
      return (emb(u->arg(0), t->arg(0)) && emb(u->arg(1), t->arg(1))) ||
             (emb(u->arg(0), t->arg(1)) && emb(u->arg(1), t->arg(0)));
    }
    for (std::size_t i = 0; i < u->arity(); ++i)
      if (!emb(u->arg(i), t->arg(i))) return false;
    return true;
  }

  // Assigns every argument of u to an argument of t; arguments of u sharing
  // a target form a block that must embed in it. Without commutativity the
  // blocks are contiguous and in order.
  bool couple_blocks(const Term& u, const Term& t, bool comm) {
    auto us = expanded(u);
    auto ts = expanded(t);
    const SymbolId f = t->symbol();
    std::vector<int> target(us.size(), -1);
    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
      if (i == us.size()) {
        for (std::size_t j = 0; j < ts.size(); ++j) {
          std::vector<Term> block;
          for (std::size_t k = 0; k < us.size(); ++k)
            if (target[k] == static_cast<int>(j)) block.push_back(us[k]);
          if (block.empty()) continue;
          Term b = block.size() == 1 ? block.front() : make_app(th_, f, block);
          keep_.push_back(b);  // memo keys are addresses
          if (!emb(b, ts[j])) return false;
        }
        return true;
      }
      std::size_t from = 0;
      if (!comm && i > 0) from = static_cast<std::size_t>(target[i - 1]);
      for (std::size_t j = from; j < ts.size(); ++j) {
        target[i] = static_cast<int>(j);
        if (rec(i + 1)) return true;
      }
      target[i] = -1;
      return false;
    };
    return rec(0);
  }

  const Theory& th_;
  std::map<std::pair<const TermNode*, const TermNode*>, bool> memo_;
  std::vector<Term> keep_;
};

}  // namespace

bool embeds_modulo(const Term& u, const Term& t, const Theory& th) {
  Embedder e(th);
  return e.emb(u, t);
}

bool classic_embedding(const Term& u, const Term& t) {
  if (u->is_var() && t->is_var()) return true;
  if (t->is_var()) return false;
  auto ts = expanded(t);
  for (const auto& a : ts)
    if (classic_embedding(u, a)) return true;
  if (u->is_var() || u->symbol() != t->symbol()) return false;
  auto us = expanded(u);
  if (us.size() != ts.size()) return false;
  for (std::size_t i = 0; i < us.size(); ++i)
    if (!classic_embedding(us[i], ts[i])) return false;
  return true;
}

}  // namespace eqpe
