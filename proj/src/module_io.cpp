#include "eqpe/module_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "eqpe/errors.hpp"
#include "eqpe/printer.hpp"

namespace eqpe {

namespace {

struct Tok {
  std::string text;
  int line = 1;
  int col = 1;
  bool space_before = true;
};

bool special(char c) {
  return c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' || c == ',';
}

struct Lexed {
  std::vector<Tok> toks;
  std::vector<std::string> pragmas;
};

Lexed lex(std::string_view s) {
  Lexed out;
  int line = 1, col = 1;
  std::size_t i = 0;
  bool space = true;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < s.size(); ++k, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      space = true;
      continue;
    }
    if (s.substr(i, 3) == "---" || s.substr(i, 3) == "***") {
      std::size_t end = s.find('\n', i);
      if (end == std::string_view::npos) end = s.size();
      std::string body(s.substr(i + 3, end - i - 3));
      auto first = body.find_first_not_of(" \t");
      if (first != std::string::npos && body[first] == '@') out.pragmas.push_back(body.substr(first + 1));
      advance(end - i);
      space = true;
      continue;
    }
    Tok t;
    t.line = line;
    t.col = col;
    t.space_before = space;
    if (special(c)) {
      t.text = std::string(1, c);
      advance(1);
    } else {
      std::size_t j = i;
      while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && !special(s[j])) ++j;
      t.text = std::string(s.substr(i, j - i));
      advance(j - i);
      // A statement terminator glued to the previous token.
      bool at_end = i >= s.size() || std::isspace(static_cast<unsigned char>(s[i]));
      if (at_end && t.text.size() > 1 && t.text.back() == '.') {
        t.text.pop_back();
        out.toks.push_back(t);
        Tok dot{".", line, col - 1, false};
        out.toks.push_back(dot);
        space = false;
        continue;
      }
    }
    out.toks.push_back(std::move(t));
    space = false;
  }
  return out;
}

[[noreturn]] void fail(const Tok& t, const std::string& msg) { throw ParseError(msg, t.line, t.col); }

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

// ---------------------------------------------------------------------------
// Terms

class TermParser {
 public:
  TermParser(const Theory& th, const std::vector<Tok>& toks, const Lets& lets)
      : th_(th), toks_(toks), lets_(lets) {
    depth_.resize(toks.size() + 1, 0);
    for (std::size_t k = 0; k < toks.size(); ++k) {
      int d = depth_[k];
      if (toks[k].text == "(" || toks[k].text == "[" || toks[k].text == "{") ++d;
      if (toks[k].text == ")" || toks[k].text == "]" || toks[k].text == "}") --d;
      depth_[k + 1] = d;
    }
    for (std::size_t f = 0; f < th.symbol_count(); ++f) {
      const Symbol& sym = th.symbol(SymbolId(static_cast<int>(f)));
      for (const auto& p : sym.pieces)
        if (p != "_") literals_.insert(p);
    }
  }

  Term parse() {
    if (toks_.empty()) throw ParseError("empty term", 1, 1);
    auto ts = span(0, toks_.size());
    if (ts.empty()) {
      for (const auto& t : toks_)
        if (!known(t.text)) fail(t, "unexpected token '" + t.text + "'");
      fail(toks_.front(), "no well-sorted parse of term");
    }
    if (ts.size() > 1) {
      std::string alts;
      for (const auto& t : ts) alts += "\n  " + to_string(th_, t);
      fail(toks_.front(), "ambiguous term:" + alts);
    }
    return ts.front();
  }

 private:
  bool known(const std::string& s) const {
    if (s == "(" || s == ")" || s == ",") return true;
    if (lets_.count(s) || th_.find_variable(s) || literals_.count(s)) return true;
    if (!th_.symbols_named(s).empty()) return true;
    if (th_.protects_nat() && all_digits(s)) return true;
    auto colon = s.find(':');
    return colon != std::string::npos && colon > 0 && th_.sorts().find(s.substr(colon + 1));
  }

  bool balanced(std::size_t i, std::size_t j) const {
    if (depth_[i] != depth_[j]) return false;
    for (std::size_t k = i + 1; k <= j; ++k)
      if (depth_[k] < depth_[i]) return false;
    return true;
  }

  static void add(std::vector<Term>& out, const Term& t) {
    if (t->sort() == kNoSort) return;
    if (std::none_of(out.begin(), out.end(), [&](const Term& x) { return equal(x, t); })) out.push_back(t);
  }

  const std::vector<Term>& span(std::size_t i, std::size_t j) {
    auto key = std::make_pair(i, j);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<Term> out;
    if (balanced(i, j)) compute(i, j, out);
    return memo_[key] = std::move(out);
  }

  void compute(std::size_t i, std::size_t j, std::vector<Term>& out) {
    const std::string& first = toks_[i].text;
    if (j - i == 1) {
      if (auto it = lets_.find(first); it != lets_.end()) {
        add(out, it->second);
        return;
      }
      if (auto v = th_.find_variable(first)) add(out, make_var(*v));
      auto colon = first.find(':');
      if (colon != std::string::npos && colon > 0) {
        if (auto s = th_.sorts().find(first.substr(colon + 1))) add(out, make_var(first.substr(0, colon), *s));
      }
      if (auto c = th_.find_symbol(first, 0)) add(out, make_app(th_, *c, {}));
      if (th_.protects_nat() && all_digits(first) && first.size() < 7) add(out, numeral(std::stoul(first)));
      return;
    }
    if (first == "(" && toks_[j - 1].text == ")" && balanced(i + 1, j - 1))
      for (const auto& t : span(i + 1, j - 1)) add(out, t);
    if (toks_[i + 1].text == "(" && toks_[j - 1].text == ")" && balanced(i + 1, j)) prefix(i, j, out);
    for (std::size_t f = 0; f < th_.symbol_count(); ++f) {
      auto id = SymbolId(static_cast<int>(f));
      const Symbol& sym = th_.symbol(id);
      if (sym.pieces.empty()) continue;
      std::vector<std::pair<std::size_t, std::size_t>> holes;
      mixfix(id, sym.pieces, 0, i, j, holes, out);
    }
  }

  Term numeral(unsigned long n) {
    Term t = make_app(th_, th_.symbol_id("0", 0), {});
    SymbolId s = th_.symbol_id("s_", 1);
    for (unsigned long k = 0; k < n; ++k) t = make_app(th_, s, {t});
    return t;
  }

  void prefix(std::size_t i, std::size_t j, std::vector<Term>& out) {
    std::vector<std::pair<std::size_t, std::size_t>> parts;
    std::size_t start = i + 2;
    for (std::size_t k = i + 2; k < j - 1; ++k) {
      if (toks_[k].text == "," && depth_[k] == depth_[i + 2]) {
        parts.emplace_back(start, k);
        start = k + 1;
      }
    }
    parts.emplace_back(start, j - 1);
    if (parts.size() == 1 && parts[0].first == parts[0].second) return;
    auto f = th_.find_symbol(toks_[i].text, parts.size());
    if (!f || !th_.symbol(*f).pieces.empty()) return;
    for (const auto& [a, b] : parts)
      if (a == b) return;
    combine(*f, parts, out);
  }

  void combine(SymbolId f, const std::vector<std::pair<std::size_t, std::size_t>>& parts,
               std::vector<Term>& out) {
    std::vector<std::vector<Term>> options;
    for (const auto& [a, b] : parts) {
      options.push_back(span(a, b));
      if (options.back().empty()) return;
    }
    std::vector<Term> args(parts.size());
    auto rec = [&](auto& self, std::size_t k) -> void {
      if (k == parts.size()) {
        add(out, make_app(th_, f, args));
        return;
      }
      for (const auto& t : options[k]) {
        args[k] = t;
        self(self, k + 1);
      }
    };
    rec(rec, 0);
  }

  void mixfix(SymbolId f, const std::vector<std::string>& pieces, std::size_t pi, std::size_t pos,
              std::size_t j, std::vector<std::pair<std::size_t, std::size_t>>& holes,
              std::vector<Term>& out) {
    if (pi == pieces.size()) {
      if (pos == j) combine(f, holes, out);
      return;
    }
    if (pos >= j) return;
    const std::string& p = pieces[pi];
    if (p != "_") {
      if (toks_[pos].text == p) mixfix(f, pieces, pi + 1, pos + 1, j, holes, out);
      return;
    }
    const bool last = pi + 1 == pieces.size();
    const std::string* next = last || pieces[pi + 1] == "_" ? nullptr : &pieces[pi + 1];
    const std::size_t need = pieces.size() - pi - 1;  // each later piece takes a token
    for (std::size_t k = pos + 1; k + need <= j; ++k) {
      if (last && k != j) continue;
      if (next && (k >= j || toks_[k].text != *next)) continue;
      if (!balanced(pos, k) || span(pos, k).empty()) continue;
      holes.emplace_back(pos, k);
      mixfix(f, pieces, pi + 1, k, j, holes, out);
      holes.pop_back();
    }
  }

  const Theory& th_;
  const std::vector<Tok>& toks_;
  const Lets& lets_;
  std::vector<int> depth_;
  std::set<std::string> literals_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Term>> memo_;
};

// ---------------------------------------------------------------------------
// Modules

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "sort", "sorts", "subsort", "subsorts", "op", "ops", "var", "vars", "eq", "ceq", "rl", "crl",
      "mb", "cmb", "protecting", "pr", "including", "inc", "extending", "ex", "endfm"};
  return k;
}

struct Statement {
  std::vector<Tok> toks;  // without the terminator
};

struct PendingEq {
  std::string label;
  std::vector<Tok> lhs;
  std::vector<Tok> rhs;
  bool variant = false;
};

class ModuleParser {
 public:
  explicit ModuleParser(std::string_view text) : lexed_(lex(text)) {}

  Module run() {
    const auto& t = lexed_.toks;
    if (t.empty()) throw ParseError("empty input", 1, 1);
    if (t[0].text != "fmod") fail(t[0], "expected 'fmod'");
    if (t.size() < 3) fail(t.back(), "incomplete module header");
    if (t[2].text != "is") fail(t[2], "expected 'is'");
    TheoryBuilder builder(t[1].text);
    std::vector<std::pair<std::string, std::string>> vars;
    std::vector<Tok> var_toks;
    std::vector<PendingEq> eqs;

    std::size_t k = 3;
    bool ended = false;
    while (k < t.size()) {
      const Tok& head = t[k];
      if (head.text == "endfm") {
        ended = true;
        if (k + 1 < t.size()) fail(t[k + 1], "text after 'endfm'");
        break;
      }
      if (!keywords().count(head.text)) fail(head, "expected a declaration, found '" + head.text + "'");
      // Collect up to the terminating '.'.
      std::size_t e = k + 1;
      int depth = 0;
      for (; e < t.size(); ++e) {
        const auto& x = t[e].text;
        if (x == "(" || x == "[" || x == "{") ++depth;
        if (x == ")" || x == "]" || x == "}") --depth;
        if (depth == 0 && x == "." && (e + 1 == t.size() || keywords().count(t[e + 1].text))) break;
        if (depth == 0 && keywords().count(x)) fail(t[e], "expected '.' before '" + x + "'");
      }
      if (e >= t.size()) fail(t.back(), "expected '.' at end of declaration");
      std::vector<Tok> body(t.begin() + static_cast<std::ptrdiff_t>(k + 1), t.begin() + static_cast<std::ptrdiff_t>(e));
      statement(head, body, builder, vars, var_toks, eqs);
      k = e + 1;
    }
    if (!ended) fail(t.back(), "missing 'endfm'");

    Module m;
    m.theory = builder.build();
    Theory& th = *m.theory;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      auto s = th.sorts().find(vars[i].second);
      if (!s) fail(var_toks[i], "unknown sort '" + vars[i].second + "'");
      th.add_variable({*s, vars[i].first});
    }
    for (const auto& e : eqs) {
      Term lhs = TermParser(th, e.lhs, {}).parse();
      Term rhs = TermParser(th, e.rhs, {}).parse();
      th.add_equation({e.label, lhs, rhs, e.variant});
    }
    th.finalize();
    for (const auto& p : lexed_.pragmas) pragma(p, m);
    return m;
  }

 private:
  static void pragma(const std::string& p, Module& m) {
    std::istringstream is(p);
    std::string kind;
    is >> kind;
    std::string rest;
    std::getline(is, rest);
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t\r");
      auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    if (kind == "rename") {
      auto arrow = rest.rfind("=>");
      if (arrow != std::string::npos) m.renames.emplace_back(trim(rest.substr(0, arrow)), trim(rest.substr(arrow + 2)));
    } else if (kind == "let") {
      auto eq = rest.find('=');
      if (eq != std::string::npos) m.lets.emplace_back(trim(rest.substr(0, eq)), trim(rest.substr(eq + 1)));
    }
  }

  static std::vector<std::string> sort_names(const std::vector<Tok>& ts) {
    std::vector<std::string> out;
    for (const auto& t : ts) out.push_back(t.text);
    return out;
  }

  // Adjacent tokens form one name.
  static std::vector<std::string> names(const std::vector<Tok>& ts) {
    std::vector<std::string> out;
    for (const auto& t : ts) {
      if (out.empty() || t.space_before) out.push_back(t.text);
      else out.back() += t.text;
    }
    return out;
  }

  void statement(const Tok& head, const std::vector<Tok>& body, TheoryBuilder& b,
                 std::vector<std::pair<std::string, std::string>>& vars, std::vector<Tok>& var_toks,
                 std::vector<PendingEq>& eqs) {
    const std::string& kw = head.text;
    if (kw == "sort" || kw == "sorts") {
      if (body.empty()) fail(head, "expected sort names");
      for (const auto& t : body) b.add_sort(t.text);
    } else if (kw == "subsort" || kw == "subsorts") {
      std::vector<std::vector<std::string>> groups(1);
      for (const auto& t : body) {
        if (t.text == "<") groups.emplace_back();
        else groups.back().push_back(t.text);
      }
      if (groups.size() < 2 || std::any_of(groups.begin(), groups.end(), [](const auto& g) { return g.empty(); }))
        fail(head, "malformed subsort declaration");
      for (std::size_t g = 0; g + 1 < groups.size(); ++g)
        for (const auto& lo : groups[g])
          for (const auto& hi : groups[g + 1]) b.add_subsort(lo, hi);
    } else if (kw == "op" || kw == "ops") {
      op(head, body, b, kw == "ops");
    } else if (kw == "var" || kw == "vars") {
      auto colon = std::find_if(body.begin(), body.end(), [](const Tok& t) { return t.text == ":"; });
      if (colon == body.end() || colon == body.begin() || colon + 1 == body.end())
        fail(head, "malformed variable declaration");
      std::string sort;
      for (auto it = colon + 1; it != body.end(); ++it) sort += it->text;
      for (auto it = body.begin(); it != colon; ++it) {
        vars.emplace_back(it->text, sort);
        var_toks.push_back(*it);
      }
    } else if (kw == "eq") {
      eqs.push_back(equation(head, body));
    } else if (kw == "protecting" || kw == "pr" || kw == "including" || kw == "inc" ||
               kw == "extending" || kw == "ex") {
      if (body.size() == 1 && body[0].text == "NAT") b.protect_nat();
      else throw UnsupportedFeature("module importation is limited to NAT (line " + std::to_string(head.line) + ")");
    } else {
      throw UnsupportedFeature("'" + kw + "' statements are not supported (line " + std::to_string(head.line) + ")");
    }
  }

  static std::pair<std::vector<Tok>, std::vector<Tok>> split_attrs(const std::vector<Tok>& ts) {
    if (ts.empty() || ts.back().text != "]") return {ts, {}};
    int depth = 0;
    for (std::size_t k = ts.size(); k-- > 0;) {
      if (ts[k].text == "]") ++depth;
      if (ts[k].text == "[" && --depth == 0) {
        return {std::vector<Tok>(ts.begin(), ts.begin() + static_cast<std::ptrdiff_t>(k)),
                std::vector<Tok>(ts.begin() + static_cast<std::ptrdiff_t>(k + 1), ts.end() - 1)};
      }
    }
    return {ts, {}};
  }

  void op(const Tok& head, const std::vector<Tok>& body, TheoryBuilder& b, bool many) {
    auto [decl, attr_toks] = split_attrs(body);
    auto colon = std::find_if(decl.begin(), decl.end(), [](const Tok& t) { return t.text == ":"; });
    auto arrow = std::find_if(decl.begin(), decl.end(), [](const Tok& t) { return t.text == "->"; });
    if (colon == decl.end() || colon == decl.begin()) fail(head, "expected 'NAME :' in operator declaration");
    if (arrow == decl.end() || arrow < colon) fail(head, "expected '->' in operator declaration");
    if (arrow + 1 == decl.end()) fail(*arrow, "expected result sort");
    if (arrow + 2 != decl.end()) fail(*(arrow + 2), "unexpected token after result sort");
    std::vector<Tok> name_toks(decl.begin(), colon);
    std::vector<std::string> ns;
    if (many) {
      ns = names(name_toks);
    } else {
      std::string n;
      for (const auto& t : name_toks) n += t.text;
      ns.push_back(n);
    }
    auto args = sort_names(std::vector<Tok>(colon + 1, arrow));
    std::string result = (arrow + 1)->text;

    OpAttributes attrs;
    for (std::size_t k = 0; k < attr_toks.size(); ++k) {
      const auto& a = attr_toks[k].text;
      auto element = [&]() {
        if (k + 1 >= attr_toks.size()) fail(attr_toks[k], "expected identity element");
        return attr_toks[++k].text;
      };
      if (a == "assoc") attrs.assoc = true;
      else if (a == "comm") attrs.comm = true;
      else if (a == "ctor") continue;
      else if (a == "id:") {
        attrs.id_side = IdSide::both;
        attrs.id_text = element();
      } else if ((a == "left" || a == "right") && k + 1 < attr_toks.size() && attr_toks[k + 1].text == "id:") {
        ++k;
        attrs.id_side = a == "left" ? IdSide::left : IdSide::right;
        attrs.id_text = element();
      } else if (a == "prec") {
        ++k;
      } else if (a == "gather" || a == "format") {
        while (k < attr_toks.size() && attr_toks[k].text != ")") ++k;
      } else if (a == "memo" || a == "idem" || a == "iter" || a == "frozen" || a == "strat" ||
                 a == "poly" || a == "special" || a == "config" || a == "object" || a == "msg") {
        throw UnsupportedFeature("operator attribute '" + a + "' is not supported (line " +
                                 std::to_string(attr_toks[k].line) + ")");
      } else {
        fail(attr_toks[k], "unknown operator attribute '" + a + "'");
      }
    }
    for (const auto& n : ns) b.add_op(n, args, result, attrs);
  }

  PendingEq equation(const Tok& head, const std::vector<Tok>& body) {
    PendingEq e;
    std::size_t start = 0;
    if (body.size() >= 4 && body[0].text == "[" && body[2].text == "]" && body[3].text == ":") {
      e.label = body[1].text;
      start = 4;
    }
    std::vector<Tok> rest(body.begin() + static_cast<std::ptrdiff_t>(start), body.end());
    auto [terms, attrs] = split_attrs(rest);
    bool attr_like = !attrs.empty() && (attrs[0].text == "variant" || attrs[0].text == "label" ||
                                        attrs[0].text == "metadata" || attrs[0].text == "nonexec" ||
                                        attrs[0].text == "owise");
    if (!attr_like) terms = rest;
    else {
      for (std::size_t k = 0; k < attrs.size(); ++k) {
        const auto& a = attrs[k].text;
        if (a == "variant") e.variant = true;
        else if (a == "label" && k + 1 < attrs.size()) e.label = attrs[++k].text;
        else if (a == "metadata" && k + 1 < attrs.size()) ++k;
        else throw UnsupportedFeature("equation attribute '" + a + "' is not supported (line " +
                                      std::to_string(attrs[k].line) + ")");
      }
    }
    int depth = 0;
    std::size_t split = terms.size();
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const auto& x = terms[k].text;
      if (x == "(" || x == "[" || x == "{") ++depth;
      if (x == ")" || x == "]" || x == "}") --depth;
      if (depth == 0 && x == "=") {
        if (split != terms.size()) fail(terms[k], "more than one '=' in equation");
        split = k;
      }
    }
    if (split == terms.size()) fail(head, "expected '=' in equation");
    if (split == 0) fail(terms[0], "missing left-hand side");
    if (split + 1 == terms.size()) fail(terms[split], "missing right-hand side");
    e.lhs.assign(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(split));
    e.rhs.assign(terms.begin() + static_cast<std::ptrdiff_t>(split + 1), terms.end());
    return e;
  }

  Lexed lexed_;
};

// ---------------------------------------------------------------------------
// Printing

std::string attributes(const Theory& th, const Symbol& sym) {
  std::vector<std::string> a;
  if (sym.axioms.assoc) a.push_back("assoc");
  if (sym.axioms.comm) a.push_back("comm");
  if (sym.axioms.identity) {
    std::string e = th.symbol(sym.axioms.identity->element->symbol()).name;
    switch (sym.axioms.identity->side) {
      case IdSide::both: a.push_back("id: " + e); break;
      case IdSide::left: a.push_back("left id: " + e); break;
      case IdSide::right: a.push_back("right id: " + e); break;
    }
  }
  if (a.empty()) return "";
  std::string out = " [";
  for (std::size_t i = 0; i < a.size(); ++i) out += (i ? " " : "") + a[i];
  return out + "]";
}

PrintOptions equation_options(const Theory& th) {
  PrintOptions o;
  o.var_name = [&th](const Variable& v) {
    auto d = th.find_variable(v.name);
    if (d && d->sort == v.sort) return v.name;
    return v.name + ":" + th.sorts().name(v.sort);
  };
  return o;
}

}  // namespace

Module parse_module(std::string_view text) { return ModuleParser(text).run(); }

Module load_module(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_module(ss.str());
}

Term parse_term(const Theory& th, std::string_view text, const Lets& lets) {
  auto lexed = lex(text);
  return TermParser(th, lexed.toks, lets).parse();
}

Lets parse_lets(const Theory& th, const std::vector<std::pair<std::string, std::string>>& defs) {
  Lets out;
  for (const auto& [name, text] : defs) out[name] = parse_term(th, text, out);
  return out;
}

std::string print_equation(const Theory& th, const Equation& e) {
  auto o = equation_options(th);
  std::string out = "eq ";
  if (!e.label.empty()) out += "[" + e.label + "] : ";
  out += to_string(th, e.lhs, o) + " = " + to_string(th, e.rhs, o);
  if (e.variant) out += " [variant]";
  return out + " .";
}

std::string print_module(const Theory& th) {
  std::ostringstream os;
  const auto& g = th.sorts();
  os << "fmod " << th.name() << " is\n";
  if (th.protects_nat()) os << "  protecting NAT .\n";
  std::vector<std::string> sorts;
  for (SortId s : th.sort_order())
    if (!g.synthesized(s) && !(th.protects_nat() && g.name(s) == "Nat")) sorts.push_back(g.name(s));
  if (!sorts.empty()) {
    os << (sorts.size() == 1 ? "  sort" : "  sorts");
    for (const auto& s : sorts) os << ' ' << s;
    os << " .\n";
  }
  for (const auto& [lo, hi] : g.edges())
    if (!g.synthesized(lo) && !g.synthesized(hi)) os << "  subsort " << g.name(lo) << " < " << g.name(hi) << " .\n";
  for (SymbolId f : th.declaration_order()) {
    const Symbol& sym = th.symbol(f);
    if (sym.builtin) continue;
    for (const auto& d : sym.decls) {
      os << "  op " << sym.name << " :";
      for (SortId a : d.args) os << ' ' << g.name(a);
      os << " -> " << g.name(d.result) << attributes(th, sym) << " .\n";
    }
  }
  for (const auto& v : th.declared_variables()) os << "  var " << v.name << " : " << g.name(v.sort) << " .\n";
  for (const auto& e : th.equations()) os << "  " << print_equation(th, e) << '\n';
  os << "endfm\n";
  return os.str();
}

bool structurally_equal(const Theory& a, const Theory& b) {
  if (a.name() != b.name() || a.protects_nat() != b.protects_nat()) return false;
  const auto& ga = a.sorts();
  const auto& gb = b.sorts();
  if (ga.size() != gb.size()) return false;
  for (std::size_t i = 0; i < ga.size(); ++i)
    if (ga.name(SortId(static_cast<int>(i))) != gb.name(SortId(static_cast<int>(i)))) return false;
  if (ga.edges() != gb.edges() || a.sort_order() != b.sort_order()) return false;
  if (a.symbol_count() != b.symbol_count() || a.declaration_order() != b.declaration_order()) return false;
  for (std::size_t i = 0; i < a.symbol_count(); ++i) {
    const Symbol& x = a.symbol(SymbolId(static_cast<int>(i)));
    const Symbol& y = b.symbol(SymbolId(static_cast<int>(i)));
    if (x.name != y.name || x.arity != y.arity || x.builtin != y.builtin) return false;
    if (x.axioms.assoc != y.axioms.assoc || x.axioms.comm != y.axioms.comm) return false;
    if (x.axioms.identity.has_value() != y.axioms.identity.has_value()) return false;
    if (x.axioms.identity && (x.axioms.identity->side != y.axioms.identity->side ||
                              !equal(x.axioms.identity->element, y.axioms.identity->element)))
      return false;
    if (x.decls.size() != y.decls.size()) return false;
    for (std::size_t k = 0; k < x.decls.size(); ++k)
      if (x.decls[k].args != y.decls[k].args || x.decls[k].result != y.decls[k].result) return false;
  }
  if (a.declared_variables() != b.declared_variables()) return false;
  if (a.equations().size() != b.equations().size()) return false;
  for (std::size_t i = 0; i < a.equations().size(); ++i) {
    const auto& x = a.equations()[i];
    const auto& y = b.equations()[i];
    if (x.label != y.label || x.variant != y.variant || !equal(x.lhs, y.lhs) || !equal(x.rhs, y.rhs))
      return false;
  }
  return true;
}

}  // namespace eqpe
