#pragma once

// Formula syntax for second-order linear logic, in negation normal form:
// negation lives on atoms only, `dual` realizes the duality table on
// compound formulas. Binders are alpha-renamed apart at parse time.
//
// ASCII grammar (UTF-8 aliases accepted on input):
//   atoms:  1  bot  0  top  X  ~X
//   binary: A*B (tensor)  A|B (par)  A&B (with)  A+B (plus)  A -o B
//   unary:  !A  ?A
//   binders: all X. A   ex X. A
// precedence: ! ~  >  *  >  |  >  &  >  +  >  -o ; binaries right-associate.

#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ll2 {

enum class Conn : uint8_t {
  Var, DualVar, One, Bot, Zero, Top,
  Tensor, Par, Plus, With, Forall, Exists, Bang, Quest
};

struct Formula;
using Fm = std::shared_ptr<const Formula>;

struct Formula {
  Conn conn;
  std::string var;  // Var/DualVar/Forall/Exists
  Fm a, b;

  Formula(Conn c, std::string v, Fm x, Fm y) : conn(c), var(std::move(v)), a(std::move(x)), b(std::move(y)) {}
};

inline Fm mk(Conn c, std::string v = {}, Fm a = nullptr, Fm b = nullptr) {
  return std::make_shared<const Formula>(c, std::move(v), std::move(a), std::move(b));
}

inline Fm f_var(const std::string& x) { return mk(Conn::Var, x); }
inline Fm f_dualvar(const std::string& x) { return mk(Conn::DualVar, x); }
inline Fm f_one() { return mk(Conn::One); }
inline Fm f_bot() { return mk(Conn::Bot); }
inline Fm f_zero() { return mk(Conn::Zero); }
inline Fm f_top() { return mk(Conn::Top); }
inline Fm f_tensor(Fm a, Fm b) { return mk(Conn::Tensor, {}, std::move(a), std::move(b)); }
inline Fm f_par(Fm a, Fm b) { return mk(Conn::Par, {}, std::move(a), std::move(b)); }
inline Fm f_plus(Fm a, Fm b) { return mk(Conn::Plus, {}, std::move(a), std::move(b)); }
inline Fm f_with(Fm a, Fm b) { return mk(Conn::With, {}, std::move(a), std::move(b)); }
inline Fm f_forall(const std::string& x, Fm a) { return mk(Conn::Forall, x, std::move(a)); }
inline Fm f_exists(const std::string& x, Fm a) { return mk(Conn::Exists, x, std::move(a)); }
inline Fm f_bang(Fm a) { return mk(Conn::Bang, {}, std::move(a)); }
inline Fm f_quest(Fm a) { return mk(Conn::Quest, {}, std::move(a)); }

// Duality table; an involution since the AST is negation-normal.
inline Fm dual(const Fm& f) {
  switch (f->conn) {
    case Conn::Var: return f_dualvar(f->var);
    case Conn::DualVar: return f_var(f->var);
    case Conn::One: return f_bot();
    case Conn::Bot: return f_one();
    case Conn::Zero: return f_top();
    case Conn::Top: return f_zero();
    case Conn::Tensor: return f_par(dual(f->a), dual(f->b));
    case Conn::Par: return f_tensor(dual(f->a), dual(f->b));
    case Conn::Plus: return f_with(dual(f->a), dual(f->b));
    case Conn::With: return f_plus(dual(f->a), dual(f->b));
    case Conn::Forall: return f_exists(f->var, dual(f->a));
    case Conn::Exists: return f_forall(f->var, dual(f->a));
    case Conn::Bang: return f_quest(dual(f->a));
    case Conn::Quest: return f_bang(dual(f->a));
  }
  throw std::logic_error("dual: bad conn");
}

inline Fm f_lollipop(Fm a, Fm b) { return f_par(dual(a), std::move(b)); }

inline void free_vars_into(const Fm& f, std::set<std::string>& out) {
  switch (f->conn) {
    case Conn::Var:
    case Conn::DualVar:
      out.insert(f->var);
      return;
    case Conn::Forall:
    case Conn::Exists: {
      std::set<std::string> inner;
      free_vars_into(f->a, inner);
      inner.erase(f->var);
      out.insert(inner.begin(), inner.end());
      return;
    }
    default:
      if (f->a) free_vars_into(f->a, out);
      if (f->b) free_vars_into(f->b, out);
      return;
  }
}

inline std::set<std::string> free_vars(const Fm& f) {
  std::set<std::string> s;
  free_vars_into(f, s);
  return s;
}

inline bool is_closed(const Fm& f) { return free_vars(f).empty(); }

// Occurrences of the free variable x (counting both polarities); a syntactic
// bound on the slot degree of the induced functor.
inline int occurrences(const Fm& f, const std::string& x) {
  switch (f->conn) {
    case Conn::Var:
    case Conn::DualVar:
      return f->var == x ? 1 : 0;
    case Conn::Forall:
    case Conn::Exists:
      return f->var == x ? 0 : occurrences(f->a, x);
    default: {
      int n = 0;
      if (f->a) n += occurrences(f->a, x);
      if (f->b) n += occurrences(f->b, x);
      return n;
    }
  }
}

inline bool is_mall2(const Fm& f) {
  if (f->conn == Conn::Bang || f->conn == Conn::Quest) return false;
  if (f->a && !is_mall2(f->a)) return false;
  if (f->b && !is_mall2(f->b)) return false;
  return true;
}

// Every ! / ? subformula is closed. Guarantees the denotation is a finite
// normal functor, so it is the precondition of the whole semantic pipeline.
inline bool fincoh_condition(const Fm& f) {
  if ((f->conn == Conn::Bang || f->conn == Conn::Quest) && !is_closed(f->a)) return false;
  if (f->a && !fincoh_condition(f->a)) return false;
  if (f->b && !fincoh_condition(f->b)) return false;
  return true;
}

inline void subformulas_into(const Fm& f, std::vector<Fm>& out) {
  out.push_back(f);
  if (f->a) subformulas_into(f->a, out);
  if (f->b) subformulas_into(f->b, out);
}

inline std::vector<Fm> subformulas(const Fm& f) {
  std::vector<Fm> v;
  subformulas_into(f, v);
  return v;
}

// ---- alpha-equality via de Bruijn serialization ----

inline void debruijn_key(const Fm& f, std::vector<std::pair<std::string, int>>& binders, int depth,
                         std::string& out) {
  auto idx_of = [&](const std::string& x) -> int {
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      if (it->first == x) return depth - 1 - it->second;
    return -1;
  };
  out.push_back(static_cast<char>('A' + static_cast<int>(f->conn)));
  switch (f->conn) {
    case Conn::Var:
    case Conn::DualVar: {
      int i = idx_of(f->var);
      if (i >= 0) {
        out += "#" + std::to_string(i);
      } else {
        out += f->var;
      }
      out.push_back(';');
      return;
    }
    case Conn::Forall:
    case Conn::Exists:
      binders.emplace_back(f->var, depth);
      debruijn_key(f->a, binders, depth + 1, out);
      binders.pop_back();
      return;
    default:
      if (f->a) debruijn_key(f->a, binders, depth, out);
      if (f->b) debruijn_key(f->b, binders, depth, out);
      return;
  }
}

inline std::string alpha_key(const Fm& f) {
  std::string s;
  std::vector<std::pair<std::string, int>> binders;
  debruijn_key(f, binders, 0, s);
  return s;
}

inline bool alpha_equal(const Fm& f, const Fm& g) { return alpha_key(f) == alpha_key(g); }

// ---- substitution ----

inline Fm rename_binder(const Fm& f, const std::string& from, const std::string& to);

// Capture-avoiding substitution of Var(x) by b and DualVar(x) by dual(b).
inline Fm substitute(const Fm& f, const std::string& x, const Fm& b) {
  switch (f->conn) {
    case Conn::Var:
      return f->var == x ? b : f;
    case Conn::DualVar:
      return f->var == x ? dual(b) : f;
    case Conn::Forall:
    case Conn::Exists: {
      if (f->var == x) return f;  // shadowed
      if (free_vars(b).count(f->var)) {
        std::string fresh = f->var;
        auto fvb = free_vars(b);
        auto fva = free_vars(f->a);
        int i = 0;
        do {
          fresh = f->var + std::to_string(++i);
        } while (fvb.count(fresh) || fva.count(fresh) || fresh == x);
        Fm body = substitute(f->a, f->var, f_var(fresh));
        return mk(f->conn, fresh, substitute(body, x, b));
      }
      return mk(f->conn, f->var, substitute(f->a, x, b));
    }
    default: {
      Fm a2 = f->a ? substitute(f->a, x, b) : nullptr;
      Fm b2 = f->b ? substitute(f->b, x, b) : nullptr;
      if (a2 == f->a && b2 == f->b) return f;
      return mk(f->conn, f->var, a2, b2);
    }
  }
}

// ---- printing ----

namespace detail {
inline int prec(Conn c) {
  switch (c) {
    case Conn::Tensor: return 5;
    case Conn::Par: return 4;
    case Conn::With: return 3;
    case Conn::Plus: return 2;
    default: return 7;
  }
}
}  // namespace detail

inline std::string print_formula(const Fm& f, int parent_prec = 0) {
  auto wrap = [&](const std::string& s, int p) {
    return p < parent_prec ? "(" + s + ")" : s;
  };
  switch (f->conn) {
    case Conn::Var: return f->var;
    case Conn::DualVar: return "~" + f->var;
    case Conn::One: return "1";
    case Conn::Bot: return "bot";
    case Conn::Zero: return "0";
    case Conn::Top: return "top";
    case Conn::Bang: return "!" + print_formula(f->a, 7);
    case Conn::Quest: return "?" + print_formula(f->a, 7);
    case Conn::Tensor:
      return wrap(print_formula(f->a, 6) + "*" + print_formula(f->b, 5), 5);
    case Conn::Par:
      return wrap(print_formula(f->a, 5) + "|" + print_formula(f->b, 4), 4);
    case Conn::With:
      return wrap(print_formula(f->a, 4) + "&" + print_formula(f->b, 3), 3);
    case Conn::Plus:
      return wrap(print_formula(f->a, 3) + "+" + print_formula(f->b, 2), 2);
    case Conn::Forall:
      return wrap("all " + f->var + ". " + print_formula(f->a, 1), 1);
    case Conn::Exists:
      return wrap("ex " + f->var + ". " + print_formula(f->a, 1), 1);
  }
  return "?";
}

// ---- parser ----

struct ParseError : std::runtime_error {
  size_t pos;
  ParseError(const std::string& m, size_t p) : std::runtime_error(m + " at position " + std::to_string(p)), pos(p) {}
};

namespace detail {

struct Lexer {
  std::string src;
  size_t i = 0;

  struct Tok {
    std::string kind;  // "1" "bot" "0" "top" "id" "~" "*" "|" "&" "+" "-o" "!" "?" "(" ")" "all" "ex" "." "end"
    std::string text;
    size_t pos;
  };
  std::vector<Tok> toks;

  static bool starts(const std::string& s, size_t i, const char* pat) {
    size_t n = std::string(pat).size();
    return s.compare(i, n, pat) == 0;
  }

  explicit Lexer(std::string s) : src(std::move(s)) {
    while (i < src.size()) {
      char c = src[i];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') { ++i; continue; }
      size_t p = i;
      // UTF-8 aliases
      struct Alias { const char* pat; const char* kind; };
      static const Alias aliases[] = {
          {"⊗", "*"}, {"⅋", "|"}, {"⊕", "+"}, {"⊥", "bot"},
          {"⊤", "top"}, {"⊸", "-o"}, {"∀", "all"}, {"∃", "ex"},
          {"¬", "~"},
      };
      bool matched = false;
      for (auto& al : aliases) {
        if (starts(src, i, al.pat)) {
          toks.push_back({al.kind, al.pat, p});
          i += std::string(al.pat).size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
      if (starts(src, i, "-o")) { toks.push_back({"-o", "-o", p}); i += 2; continue; }
      if (std::string("~*|&+!?().").find(c) != std::string::npos) {
        toks.push_back({std::string(1, c), std::string(1, c), p});
        ++i;
        continue;
      }
      if (c == '1' || c == '0') {
        toks.push_back({std::string(1, c), std::string(1, c), p});
        ++i;
        continue;
      }
      if (isalpha(static_cast<unsigned char>(c))) {
        size_t j = i;
        while (j < src.size() && (isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
        std::string w = src.substr(i, j - i);
        i = j;
        if (w == "bot" || w == "top" || w == "all" || w == "ex")
          toks.push_back({w, w, p});
        else
          toks.push_back({"id", w, p});
        continue;
      }
      throw ParseError("unexpected character '" + std::string(1, c) + "'", p);
    }
    toks.push_back({"end", "", src.size()});
  }
};

struct Parser {
  std::vector<Lexer::Tok> toks;
  size_t k = 0;

  const Lexer::Tok& peek() const { return toks[k]; }
  Lexer::Tok eat() { return toks[k++]; }
  bool at(const std::string& kind) const { return toks[k].kind == kind; }
  void expect(const std::string& kind) {
    if (!at(kind)) throw ParseError("expected '" + kind + "', found '" + peek().text + "'", peek().pos);
    ++k;
  }

  // precedence: atoms/unary 6, * 5, | 4, & 3, + 2, -o 1
  Fm parse(int min_prec) {
    Fm lhs = parse_unary();
    for (;;) {
      int p;
      Conn c{};
      bool lolli = false;
      if (at("*")) { p = 5; c = Conn::Tensor; }
      else if (at("|")) { p = 4; c = Conn::Par; }
      else if (at("&")) { p = 3; c = Conn::With; }
      else if (at("+")) { p = 2; c = Conn::Plus; }
      else if (at("-o")) { p = 1; lolli = true; }
      else break;
      if (p < min_prec) break;
      eat();
      Fm rhs = parse(p);  // right-associative
      lhs = lolli ? f_lollipop(lhs, rhs) : mk(c, {}, lhs, rhs);
    }
    return lhs;
  }

  Fm parse_unary() {
    if (at("!")) { eat(); return f_bang(parse_unary()); }
    if (at("?")) { eat(); return f_quest(parse_unary()); }
    if (at("~")) {
      eat();
      if (!at("id")) throw ParseError("'~' applies to atoms only", peek().pos);
      return f_dualvar(eat().text);
    }
    if (at("1")) { eat(); return f_one(); }
    if (at("0")) { eat(); return f_zero(); }
    if (at("bot")) { eat(); return f_bot(); }
    if (at("top")) { eat(); return f_top(); }
    if (at("all") || at("ex")) {
      bool fa = at("all");
      eat();
      if (!at("id")) throw ParseError("binder expects a variable", peek().pos);
      std::string x = eat().text;
      expect(".");
      Fm body = parse(1);
      return fa ? f_forall(x, body) : f_exists(x, body);
    }
    if (at("(")) {
      eat();
      Fm f = parse(1);
      expect(")");
      return f;
    }
    if (at("id")) return f_var(eat().text);
    throw ParseError("expected a formula, found '" + peek().text + "'", peek().pos);
  }
};

// Rename binders so all bound names are distinct from each other and from
// free variables (Barendregt convention).
inline Fm barendregt(const Fm& f, std::set<std::string>& used) {
  switch (f->conn) {
    case Conn::Forall:
    case Conn::Exists: {
      std::string name = f->var;
      if (used.count(name)) {
        int i = 0;
        std::string fresh;
        do fresh = name + std::to_string(++i);
        while (used.count(fresh));
        name = fresh;
      }
      used.insert(name);
      Fm body = name == f->var ? f->a : substitute(f->a, f->var, f_var(name));
      return mk(f->conn, name, barendregt(body, used));
    }
    default: {
      Fm a = f->a ? barendregt(f->a, used) : nullptr;
      Fm b = f->b ? barendregt(f->b, used) : nullptr;
      if (a == f->a && b == f->b) return f;
      return mk(f->conn, f->var, a, b);
    }
  }
}

}  // namespace detail

inline Fm parse_formula(const std::string& text) {
  detail::Lexer lex(text);
  detail::Parser p{lex.toks};
  Fm f = p.parse(1);
  p.expect("end");
  std::set<std::string> used = free_vars(f);
  return detail::barendregt(f, used);
}

}  // namespace ll2
