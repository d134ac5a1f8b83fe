#include "eqpe/printer.hpp"

#include <string_view>

namespace eqpe {

namespace {

bool is_hole(const std::string& p) { return p == "_"; }

bool opens(const std::string& tok) { return tok == "(" || tok == "{" || tok == "["; }
bool closes(const std::string& tok) {
  return tok == ")" || tok == "}" || tok == "]" || tok == ",";
}

class Printer {
 public:
  Printer(const Theory& th, const PrintOptions& opts) : th_(th), opts_(opts) {}

  void term(const Term& t) {
    if (t->is_var()) {
      emit(opts_.var_name ? opts_.var_name(t->var()) : t->var().name);
      if (opts_.var_sorts) out_ += ":" + th_.sorts().name(t->var().sort);
      return;
    }
    const Symbol& sym = th_.symbol(t->symbol());
    if (sym.builtin && t->arity() == 1) {
      // s_ chains over 0 print as numerals.
      std::size_t n = 0;
      Term cur = t;
      while (!cur->is_var() && cur->arity() == 1 && th_.symbol(cur->symbol()).builtin) {
        ++n;
        cur = cur->arg(0);
      }
      if (!cur->is_var() && cur->arity() == 0 && th_.symbol(cur->symbol()).builtin) {
        emit(std::to_string(n));
        return;
      }
    }
    if (t->arity() == 0) {
      emit(sym.name);
      return;
    }
    std::vector<Term> args;
    for (std::size_t i = 0; i < t->arity(); ++i)
      for (std::uint32_t k = 0; k < t->mult(i); ++k) args.push_back(t->arg(i));

    if (sym.pieces.empty()) {
      emit(sym.name);
      out_ += "(";
      last_ = "(";
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) emit(",");
        term(args[i]);
      }
      emit(")");
      return;
    }
    if (args.size() > sym.arity) {
      // Flattened assoc application: join the arguments by the middle
      // literals of the binary template.
      std::vector<std::string> mid(sym.pieces.begin() + 1, sym.pieces.end() - 1);
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i)
          for (const auto& m : mid) emit(m);
        argument(args[i], false, false, t->symbol());
      }
      return;
    }
    std::size_t k = 0;
    for (std::size_t i = 0; i < sym.pieces.size(); ++i) {
      const auto& p = sym.pieces[i];
      if (!is_hole(p)) {
        emit(p);
        continue;
      }
      bool enclosed = i > 0 && !is_hole(sym.pieces[i - 1]) && i + 1 < sym.pieces.size() &&
                      !is_hole(sym.pieces[i + 1]);
      bool last = i + 1 == sym.pieces.size();
      argument(args[k++], enclosed, last, t->symbol());
    }
  }

  std::string str() && { return std::move(out_); }

 private:
  bool open_template(const Term& t) const {
    if (t->is_var() || t->arity() == 0) return false;
    const auto& pieces = th_.symbol(t->symbol()).pieces;
    if (pieces.empty()) return false;
    return is_hole(pieces.front()) || is_hole(pieces.back());
  }

  // A right-nested chain of f can be written without parentheses when no
  // declaration of f accepts its own result in the first argument.
  bool right_chain_ok(SymbolId f) const {
    const Symbol& sym = th_.symbol(f);
    if (sym.axioms.assoc || sym.pieces.empty() || !is_hole(sym.pieces.front())) return false;
    for (const auto& d1 : sym.decls)
      for (const auto& d2 : sym.decls)
        if (th_.leq(d1.result, d2.args.front())) return false;
    return true;
  }

  void argument(const Term& a, bool enclosed, bool last, SymbolId parent) {
    bool parens = open_template(a) && !enclosed;
    if (parens && last && a->symbol() == parent && right_chain_ok(parent)) parens = false;
    if (parens) emit("(");
    term(a);
    if (parens) emit(")");
  }

  void emit(const std::string& tok) {
    if (!out_.empty() && !opens(last_) && !closes(tok)) out_ += ' ';
    out_ += tok;
    last_ = tok;
  }

  const Theory& th_;
  const PrintOptions& opts_;
  std::string out_;
  std::string last_;
};

}  // namespace

std::string to_string(const Theory& th, const Term& t, const PrintOptions& opts) {
  Printer p(th, opts);
  p.term(t);
  return std::move(p).str();
}

std::string to_string(const Theory& th, const Substitution& s, const PrintOptions& opts) {
  std::string out = "{";
  bool first = true;
  for (const auto& [x, t] : s) {
    if (!first) out += ", ";
    first = false;
    out += (opts.var_name ? opts.var_name(x) : x.name) + " ↦ " + to_string(th, t, opts);
  }
  return out + "}";
}

}  // namespace eqpe
