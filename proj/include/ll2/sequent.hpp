#pragma once

// One-sided sequent calculus for MALL2 plus the ELL2 exponential rules
// (functorial promotion, weakening, contraction). Sequents are ordered;
// exchange is an explicit rule swapping two adjacent formulas. All other
// rules act on fixed positions: the principal formula of a conclusion is
// its last formula, premises feed it as (.., A) and (B, ..).

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "ll2/formula.hpp"

namespace ll2 {

using Sequent = std::vector<Fm>;

inline std::string print_sequent(const Sequent& s) {
  std::string out = "|-";
  for (size_t i = 0; i < s.size(); ++i) out += (i ? ", " : " ") + print_formula(s[i]);
  return out;
}

inline bool sequent_alpha_equal(const Sequent& a, const Sequent& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!alpha_equal(a[i], b[i])) return false;
  return true;
}

enum class Rule : uint8_t {
  Ax, Cut, Exchange, Tensor, Par, One, Bot, PlusL, PlusR, With, Top,
  Exists, Forall, Promotion, Weakening, Contraction
};

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Ax: return "ax";
    case Rule::Cut: return "cut";
    case Rule::Exchange: return "exchange";
    case Rule::Tensor: return "tensor";
    case Rule::Par: return "par";
    case Rule::One: return "one";
    case Rule::Bot: return "bot";
    case Rule::PlusL: return "plusl";
    case Rule::PlusR: return "plusr";
    case Rule::With: return "with";
    case Rule::Top: return "top";
    case Rule::Exists: return "exists";
    case Rule::Forall: return "forall";
    case Rule::Promotion: return "promotion";
    case Rule::Weakening: return "weakening";
    case Rule::Contraction: return "contraction";
  }
  return "?";
}

struct ProofNode;
using Proof = std::shared_ptr<const ProofNode>;

struct ProofNode {
  Rule rule;
  std::vector<Proof> premises;
  Fm formula;               // ax: A | plusl/plusr: the other side | weakening: A
                            // exists: the target ex X. A
  Fm witness;               // exists only
  std::string var;          // forall binder
  std::vector<Fm> context;  // top: Gamma
  int pos = -1;             // exchange: index swapped with index+1
};

inline Proof mk_proof(ProofNode n) { return std::make_shared<const ProofNode>(std::move(n)); }

inline Proof p_ax(Fm a) { return mk_proof({Rule::Ax, {}, std::move(a), nullptr, "", {}, -1}); }
inline Proof p_cut(Proof l, Proof r) { return mk_proof({Rule::Cut, {std::move(l), std::move(r)}, nullptr, nullptr, "", {}, -1}); }
inline Proof p_exchange(int i, Proof p) { return mk_proof({Rule::Exchange, {std::move(p)}, nullptr, nullptr, "", {}, i}); }
inline Proof p_tensor(Proof l, Proof r) { return mk_proof({Rule::Tensor, {std::move(l), std::move(r)}, nullptr, nullptr, "", {}, -1}); }
inline Proof p_par(Proof p) { return mk_proof({Rule::Par, {std::move(p)}, nullptr, nullptr, "", {}, -1}); }
inline Proof p_one() { return mk_proof({Rule::One, {}, nullptr, nullptr, "", {}, -1}); }
inline Proof p_bot(Proof p) { return mk_proof({Rule::Bot, {std::move(p)}, nullptr, nullptr, "", {}, -1}); }
inline Proof p_plusl(Fm other, Proof p) { return mk_proof({Rule::PlusL, {std::move(p)}, std::move(other), nullptr, "", {}, -1}); }
inline Proof p_plusr(Fm other, Proof p) { return mk_proof({Rule::PlusR, {std::move(p)}, std::move(other), nullptr, "", {}, -1}); }
inline Proof p_with(Proof l, Proof r) { return mk_proof({Rule::With, {std::move(l), std::move(r)}, nullptr, nullptr, "", {}, -1}); }
inline Proof p_top(std::vector<Fm> ctx) { return mk_proof({Rule::Top, {}, nullptr, nullptr, "", std::move(ctx), -1}); }
inline Proof p_exists(Fm target, Fm witness, Proof p) {
  return mk_proof({Rule::Exists, {std::move(p)}, std::move(target), std::move(witness), "", {}, -1});
}
inline Proof p_forall(const std::string& x, Proof p) { return mk_proof({Rule::Forall, {std::move(p)}, nullptr, nullptr, x, {}, -1}); }
inline Proof p_promotion(Proof p) { return mk_proof({Rule::Promotion, {std::move(p)}, nullptr, nullptr, "", {}, -1}); }
inline Proof p_weakening(Fm a, Proof p) { return mk_proof({Rule::Weakening, {std::move(p)}, std::move(a), nullptr, "", {}, -1}); }
inline Proof p_contraction(Proof p) { return mk_proof({Rule::Contraction, {std::move(p)}, nullptr, nullptr, "", {}, -1}); }

// ---- checking ----

struct CheckError : std::runtime_error {
  std::vector<int> path;  // child indices from the root
  CheckError(std::string msg, std::vector<int> p)
      : std::runtime_error(std::move(msg)), path(std::move(p)) {}
};

inline std::string path_string(const std::vector<int>& path) {
  std::string s = "root";
  for (int i : path) s += "." + std::to_string(i);
  return s;
}

namespace detail {

inline Sequent check_node(const Proof& p, std::vector<int>& path) {
  auto fail = [&](const std::string& m) -> Sequent {
    throw CheckError(m + " [at " + path_string(path) + "]", path);
  };
  auto need_premises = [&](size_t n) {
    if (p->premises.size() != n)
      fail(std::string(rule_name(p->rule)) + ": expected " + std::to_string(n) + " premises");
  };
  std::vector<Sequent> prem;
  for (size_t i = 0; i < p->premises.size(); ++i) {
    path.push_back(static_cast<int>(i));
    prem.push_back(check_node(p->premises[i], path));
    path.pop_back();
  }
  switch (p->rule) {
    case Rule::Ax: {
      need_premises(0);
      if (!p->formula) fail("ax: missing formula");
      return {p->formula, dual(p->formula)};
    }
    case Rule::Cut: {
      need_premises(2);
      if (prem[0].empty() || prem[1].empty()) fail("cut: empty premise");
      Fm a = prem[0].back();
      if (!alpha_equal(prem[1].front(), dual(a)))
        fail("cut: premises do not match on the cut formula (" + print_formula(a) + ")");
      Sequent out(prem[0].begin(), prem[0].end() - 1);
      out.insert(out.end(), prem[1].begin() + 1, prem[1].end());
      return out;
    }
    case Rule::Exchange: {
      need_premises(1);
      if (p->pos < 0 || p->pos + 1 >= static_cast<int>(prem[0].size()))
        fail("exchange: position out of range");
      Sequent out = prem[0];
      std::swap(out[p->pos], out[p->pos + 1]);
      return out;
    }
    case Rule::Tensor: {
      need_premises(2);
      if (prem[0].empty() || prem[1].empty()) fail("tensor: empty premise");
      Sequent out(prem[0].begin(), prem[0].end() - 1);
      out.push_back(f_tensor(prem[0].back(), prem[1].front()));
      out.insert(out.end(), prem[1].begin() + 1, prem[1].end());
      return out;
    }
    case Rule::Par: {
      need_premises(1);
      if (prem[0].size() < 2) fail("par: premise too short");
      Sequent out(prem[0].begin(), prem[0].end() - 2);
      out.push_back(f_par(prem[0][prem[0].size() - 2], prem[0].back()));
      return out;
    }
    case Rule::One:
      need_premises(0);
      return {f_one()};
    case Rule::Bot: {
      need_premises(1);
      Sequent out = prem[0];
      out.push_back(f_bot());
      return out;
    }
    case Rule::PlusL: {
      need_premises(1);
      if (prem[0].empty() || !p->formula) fail("plusl: bad node");
      Sequent out = prem[0];
      out.back() = f_plus(prem[0].back(), p->formula);
      return out;
    }
    case Rule::PlusR: {
      need_premises(1);
      if (prem[0].empty() || !p->formula) fail("plusr: bad node");
      Sequent out = prem[0];
      out.back() = f_plus(p->formula, prem[0].back());
      return out;
    }
    case Rule::With: {
      need_premises(2);
      if (prem[0].empty() || prem[1].empty()) fail("with: empty premise");
      Sequent ctx0(prem[0].begin(), prem[0].end() - 1);
      Sequent ctx1(prem[1].begin(), prem[1].end() - 1);
      if (!sequent_alpha_equal(ctx0, ctx1)) fail("with: contexts differ");
      Sequent out = ctx0;
      out.push_back(f_with(prem[0].back(), prem[1].back()));
      return out;
    }
    case Rule::Top: {
      need_premises(0);
      Sequent out = p->context;
      out.push_back(f_top());
      return out;
    }
    case Rule::Exists: {
      need_premises(1);
      if (prem[0].empty()) fail("exists: empty premise");
      if (!p->formula || p->formula->conn != Conn::Exists) fail("exists: target must be ex X. A");
      if (!p->witness) fail("exists: missing witness");
      Fm expected = substitute(p->formula->a, p->formula->var, p->witness);
      if (!alpha_equal(prem[0].back(), expected))
        fail("exists: premise ends with " + print_formula(prem[0].back()) + ", expected " +
             print_formula(expected));
      Sequent out = prem[0];
      out.back() = p->formula;
      return out;
    }
    case Rule::Forall: {
      need_premises(1);
      if (prem[0].empty()) fail("forall: empty premise");
      for (size_t i = 0; i + 1 < prem[0].size(); ++i)
        if (free_vars(prem[0][i]).count(p->var))
          fail("forall: " + p->var + " free in the context");
      Sequent out = prem[0];
      out.back() = f_forall(p->var, prem[0].back());
      return out;
    }
    case Rule::Promotion: {
      need_premises(1);
      if (prem[0].empty()) fail("promotion: empty premise");
      Sequent out;
      for (size_t i = 0; i + 1 < prem[0].size(); ++i) out.push_back(f_quest(prem[0][i]));
      out.push_back(f_bang(prem[0].back()));
      return out;
    }
    case Rule::Weakening: {
      need_premises(1);
      if (!p->formula) fail("weakening: missing formula");
      Sequent out = prem[0];
      out.push_back(f_quest(p->formula));
      return out;
    }
    case Rule::Contraction: {
      need_premises(1);
      if (prem[0].size() < 2) fail("contraction: premise too short");
      Fm a = prem[0].back();
      Fm b = prem[0][prem[0].size() - 2];
      if (a->conn != Conn::Quest) fail("contraction: principal formula is not ?A");
      if (!alpha_equal(a, b)) fail("contraction: the last two formulas differ");
      Sequent out(prem[0].begin(), prem[0].end() - 1);
      return out;
    }
  }
  return fail("unknown rule");
}

}  // namespace detail

inline Sequent check_proof(const Proof& p) {
  std::vector<int> path;
  return detail::check_node(p, path);
}

// ---- formula-level substitution through a proof ----

inline Proof substitute_proof(const Proof& p, const std::string& x, const Fm& b) {
  if (p->rule == Rule::Forall) {
    if (p->var == x) return p;  // x is bound from here up
    if (free_vars(b).count(p->var)) {
      // rename the proof-level binder apart, then substitute
      std::string fresh = p->var;
      int i = 0;
      do fresh = p->var + "_" + std::to_string(++i);
      while (free_vars(b).count(fresh) || fresh == x);
      ProofNode m = *p;
      m.var = fresh;
      m.premises = {substitute_proof(p->premises[0], p->var, f_var(fresh))};
      return substitute_proof(mk_proof(std::move(m)), x, b);
    }
  }
  ProofNode n = *p;
  n.premises.clear();
  for (auto& q : p->premises) n.premises.push_back(substitute_proof(q, x, b));
  if (n.formula) n.formula = substitute(n.formula, x, b);
  if (n.witness) n.witness = substitute(n.witness, x, b);
  for (auto& c : n.context) c = substitute(c, x, b);
  return mk_proof(std::move(n));
}

// ---- JSON serialization ----

inline nlohmann::ordered_json proof_to_json(const Proof& p) {
  nlohmann::ordered_json j;
  j["rule"] = rule_name(p->rule);
  if (p->formula) j["formula"] = print_formula(p->formula);
  if (p->witness) j["witness"] = print_formula(p->witness);
  if (!p->var.empty()) j["var"] = p->var;
  if (!p->context.empty()) {
    nlohmann::ordered_json ctx = nlohmann::ordered_json::array();
    for (auto& c : p->context) ctx.push_back(print_formula(c));
    j["formulas"] = ctx;
  }
  if (p->pos >= 0) j["positions"] = {p->pos};
  if (!p->premises.empty()) {
    nlohmann::ordered_json prem = nlohmann::ordered_json::array();
    for (auto& q : p->premises) prem.push_back(proof_to_json(q));
    j["premises"] = prem;
  }
  return j;
}

inline Proof proof_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rule")) throw std::runtime_error("proof json: missing rule");
  std::string rule = j["rule"];
  ProofNode n{};
  n.pos = -1;
  bool found = false;
  for (int r = 0; r <= static_cast<int>(Rule::Contraction); ++r)
    if (rule == rule_name(static_cast<Rule>(r))) {
      n.rule = static_cast<Rule>(r);
      found = true;
    }
  if (!found) throw std::runtime_error("proof json: unknown rule '" + rule + "'");
  if (j.contains("premises"))
    for (auto& q : j["premises"]) n.premises.push_back(proof_from_json(q));
  if (j.contains("formula")) n.formula = parse_formula(j["formula"].get<std::string>());
  if (j.contains("witness")) n.witness = parse_formula(j["witness"].get<std::string>());
  if (j.contains("var")) n.var = j["var"].get<std::string>();
  if (j.contains("formulas"))
    for (auto& c : j["formulas"]) n.context.push_back(parse_formula(c.get<std::string>()));
  if (j.contains("positions") && !j["positions"].empty()) n.pos = j["positions"][0].get<int>();
  return mk_proof(std::move(n));
}

// ---- helpers used all over the proof constructions ----

// Move the formula at position `from` to position `to` by adjacent swaps.
inline Proof p_move(Proof p, int from, int to) {
  while (from < to) {
    p = p_exchange(from, std::move(p));
    ++from;
  }
  while (from > to) {
    p = p_exchange(from - 1, std::move(p));
    --from;
  }
  return p;
}

inline bool proof_alpha_equal(const Proof& a, const Proof& b) {
  if (a->rule != b->rule || a->premises.size() != b->premises.size() || a->pos != b->pos)
    return false;
  if (!!a->formula != !!b->formula || (a->formula && !alpha_equal(a->formula, b->formula)))
    return false;
  if (!!a->witness != !!b->witness || (a->witness && !alpha_equal(a->witness, b->witness)))
    return false;
  if (a->context.size() != b->context.size()) return false;
  for (size_t i = 0; i < a->context.size(); ++i)
    if (!alpha_equal(a->context[i], b->context[i])) return false;
  if (a->rule == Rule::Forall && a->var != b->var) {
    // binder names may differ; compare conclusions instead
    // (cheap syntactic check: rename b's var to a's in its premise)
    return proof_alpha_equal(a->premises[0], substitute_proof(b->premises[0], b->var, f_var(a->var)));
  }
  for (size_t i = 0; i < a->premises.size(); ++i)
    if (!proof_alpha_equal(a->premises[i], b->premises[i])) return false;
  return true;
}

inline bool has_cut(const Proof& p) {
  if (p->rule == Rule::Cut) return true;
  for (auto& q : p->premises)
    if (has_cut(q)) return true;
  return false;
}

inline size_t proof_size(const Proof& p) {
  size_t n = 1;
  for (auto& q : p->premises) n += proof_size(q);
  return n;
}

}  // namespace ll2
