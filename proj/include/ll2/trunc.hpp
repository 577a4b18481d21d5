#pragma once

// Truncation at depth 2 and the decomposition of string-typed proofs into
// the normal shape (existential witnesses + promotion + contractions).

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ll2/cutelim.hpp"
#include "ll2/sequent.hpp"
#include "ll2/stock.hpp"

namespace ll2 {

// ---- truncation at depth 2 ----

// Replace every !B (resp ?B) whose own modality sits under `depth` >= 2
// enclosing modalities by 1 (resp bot).
inline Fm truncate_formula(const Fm& f, int depth) {
  switch (f->conn) {
    case Conn::Bang:
      if (depth >= 2) return f_one();
      return f_bang(truncate_formula(f->a, depth + 1));
    case Conn::Quest:
      if (depth >= 2) return f_bot();
      return f_quest(truncate_formula(f->a, depth + 1));
    case Conn::Var:
    case Conn::DualVar:
    case Conn::One:
    case Conn::Bot:
    case Conn::Zero:
    case Conn::Top:
      return f;
    case Conn::Forall:
    case Conn::Exists:
      return mk(f->conn, f->var, truncate_formula(f->a, depth));
    default:
      return mk(f->conn, f->var, truncate_formula(f->a, depth),
                f->b ? truncate_formula(f->b, depth) : nullptr);
  }
}

namespace trunc_detail {

// modality depths (relative to `depth`) of the occurrences of x in `a`
// that survive truncation
inline void surviving_depths(const Fm& a, const std::string& x, int depth, std::set<int>& out) {
  switch (a->conn) {
    case Conn::Var:
    case Conn::DualVar:
      if (a->var == x) out.insert(depth);
      return;
    case Conn::Bang:
    case Conn::Quest:
      if (depth >= 2) return;  // the whole subtree is erased
      surviving_depths(a->a, x, depth + 1, out);
      return;
    case Conn::Forall:
    case Conn::Exists:
      if (a->var != x) surviving_depths(a->a, x, depth, out);
      return;
    default:
      if (a->a) surviving_depths(a->a, x, depth, out);
      if (a->b) surviving_depths(a->b, x, depth, out);
      return;
  }
}

// the canonical proof of |- bot, ..., bot, 1 (k bots)
inline Proof bots_then_one(int k) {
  Proof p = p_one();  // |- 1
  for (int t = 0; t < k; ++t) p = p_bot(p);
  // |- 1, bot^k; rotate the 1 to the end
  return p_move(p, 0, k);
}

// |- 1*1, bot : the gadget a depth-2 contraction is cut against
inline Proof contraction_gadget() { return p_bot(p_tensor(p_one(), p_one())); }

}  // namespace trunc_detail

inline Proof truncate_depth2(const Proof& p, int depth = 0) {
  using namespace trunc_detail;
  switch (p->rule) {
    case Rule::Promotion: {
      if (depth >= 2) {
        Sequent s = check_proof(p);
        return bots_then_one(static_cast<int>(s.size()) - 1);
      }
      return p_promotion(truncate_depth2(p->premises[0], depth + 1));
    }
    case Rule::Weakening: {
      Proof q = truncate_depth2(p->premises[0], depth);
      if (depth >= 2) return p_bot(std::move(q));  // ?A became bot
      return p_weakening(truncate_formula(p->formula, depth + 1), std::move(q));
    }
    case Rule::Contraction: {
      Proof q = truncate_depth2(p->premises[0], depth);
      if (depth >= 2) {
        // premise now ends with bot, bot: fold them and cut against
        // |- bot, 1*1
        q = p_par(std::move(q));  // |- G, bot|bot
        return p_cut(std::move(q), contraction_gadget());
      }
      return p_contraction(std::move(q));
    }
    case Rule::Ax:
      return p_ax(truncate_formula(p->formula, depth));
    case Rule::Top: {
      std::vector<Fm> ctx;
      for (auto& c : p->context) ctx.push_back(truncate_formula(c, depth));
      return p_top(std::move(ctx));
    }
    case Rule::PlusL:
    case Rule::PlusR: {
      Proof q = truncate_depth2(p->premises[0], depth);
      Fm other = truncate_formula(p->formula, depth);
      return p->rule == Rule::PlusL ? p_plusl(other, std::move(q)) : p_plusr(other, std::move(q));
    }
    case Rule::Exists: {
      Proof q = truncate_depth2(p->premises[0], depth);
      Fm target = truncate_formula(p->formula, depth);
      // the witness is truncated at the residual depth of the variable
      std::set<int> depths;
      surviving_depths(target->a, target->var, depth, depths);
      Fm witness;
      if (depths.empty()) {
        witness = truncate_formula(p->witness, depth);
      } else if (depths.size() == 1) {
        witness = truncate_formula(p->witness, *depths.begin());
      } else {
        throw std::invalid_argument(
            "truncate_depth2: existential witness used at mixed modality depths");
      }
      return p_exists(target, witness, std::move(q));
    }
    case Rule::Forall:
      return p_forall(p->var, truncate_depth2(p->premises[0], depth));
    default: {
      ProofNode n = *p;
      n.premises.clear();
      for (auto& q : p->premises) n.premises.push_back(truncate_depth2(q, depth));
      if (n.formula) n.formula = truncate_formula(n.formula, depth);
      return mk_proof(std::move(n));
    }
  }
}

// ---- decomposition of |- !Str -o !!Bool ----

struct DecomposeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace trunc_detail {

// Find the exists node that introduced the (passive) formula at `pos` and
// splice it out: below that node the position silently carries the
// un-quantified instance, which every intermediate rule treats as context.
// Returns the spliced proof and the witness.
struct SpliceCtx {
  cutelim_detail::ConclCache cache;
};

inline std::pair<Proof, Fm> splice_exists(SpliceCtx& cx, const Proof& p, int pos) {
  const Sequent& s = cx.cache.of(p);
  int n = static_cast<int>(s.size());
  auto rebuild = [&](int child, int child_pos) -> std::pair<Proof, Fm> {
    auto [np, wit] = splice_exists(cx, p->premises[child], child_pos);
    ProofNode m = *p;
    m.premises[child] = np;
    return {mk_proof(std::move(m)), wit};
  };
  switch (p->rule) {
    case Rule::Exists:
      if (pos == n - 1) return {p->premises[0], p->witness};
      return rebuild(0, pos);
    case Rule::Exchange: {
      int k = p->pos;
      int ip = pos == k ? k + 1 : (pos == k + 1 ? k : pos);
      return rebuild(0, ip);
    }
    case Rule::Tensor: {
      int l1 = static_cast<int>(cx.cache.of(p->premises[0]).size());
      if (pos < l1 - 1) return rebuild(0, pos);
      if (pos == l1 - 1) throw DecomposeError("string input consumed by a tensor");
      return rebuild(1, pos - l1 + 1);
    }
    case Rule::With: {
      // the formula is duplicated: splice both branches, witnesses must agree
      auto [q0, w0] = splice_exists(cx, p->premises[0], pos);
      auto [q1, w1] = splice_exists(cx, p->premises[1], pos);
      if (!alpha_equal(w0, w1)) throw DecomposeError("witnesses differ across a with branch");
      ProofNode m = *p;
      m.premises = {q0, q1};
      return {mk_proof(std::move(m)), w0};
    }
    case Rule::Par:
    case Rule::Bot:
    case Rule::PlusL:
    case Rule::PlusR:
    case Rule::Forall:
    case Rule::Weakening:
    case Rule::Contraction:
      if (pos == n - 1) throw DecomposeError("string input touched by a logical rule");
      return rebuild(0, pos);
    case Rule::Promotion:
      throw DecomposeError("string input crossed a promotion");
    case Rule::Ax:
    case Rule::One:
    case Rule::Top:
      throw DecomposeError("witness not extractable (input reaches an axiom)");
    case Rule::Cut:
      throw DecomposeError("decompose expects a cut-free proof");
  }
  throw DecomposeError("unexpected rule in splice");
}

}  // namespace trunc_detail

struct StringDecomposition {
  Proof core;                 // |- Str[A_1]', ..., Str[A_n]', !Bool
  std::vector<Fm> witnesses;  // A_1 ... A_n, closed
};

// Normalize and take apart a proof of |- !Str -o !!Bool (or its unfolded
// two-formula form) into the displayed shape of the string-predicate lemma.
inline StringDecomposition decompose_string_proof(const Proof& input, uint64_t fuel = 500000) {
  Proof p = cut_eliminate(input, fuel);
  Sequent s = check_proof(p);
  Fm strty = f_str();
  Fm want1 = f_lollipop(f_bang(strty), f_bang(f_bang(f_bool())));
  if (s.size() == 1) {
    if (!alpha_equal(s[0], want1)) throw DecomposeError("not a proof of !Str -o !!Bool");
    // the final rule producing the single par must be a par (possibly under
    // nothing else: a one-formula sequent admits no exchange)
    if (p->rule != Rule::Par) throw DecomposeError("expected a trailing par");
    p = p->premises[0];
    s = check_proof(p);
  }
  if (s.size() != 2 || !alpha_equal(s[0], f_quest(dual(strty))) ||
      !alpha_equal(s[1], f_bang(f_bang(f_bool()))))
    throw DecomposeError("not of the shape |- ?Str', !!Bool");

  // walk down through exchange / contraction / weakening to the promotion
  // (tracking where the !!Bool sits)
  Proof cur = p;
  int bool_pos = 1;
  while (cur->rule != Rule::Promotion) {
    switch (cur->rule) {
      case Rule::Exchange: {
        int k = cur->pos;
        bool_pos = bool_pos == k ? k + 1 : (bool_pos == k + 1 ? k : bool_pos);
        break;
      }
      case Rule::Contraction:
      case Rule::Weakening: {
        Sequent cs = check_proof(cur);
        if (bool_pos == static_cast<int>(cs.size()) - 1)
          throw DecomposeError("structural rule touched the boolean output");
        break;
      }
      default:
        throw DecomposeError("unexpected rule between the par and the promotion");
    }
    cur = cur->premises[0];
  }
  Sequent prom = check_proof(cur);
  if (bool_pos != static_cast<int>(prom.size()) - 1)
    throw DecomposeError("the boolean output does not come from the main promotion");
  // the promotion premise: |- Str', ..., Str', !Bool
  Proof core = cur->premises[0];
  Sequent core_seq = check_proof(core);
  int n = static_cast<int>(core_seq.size()) - 1;
  if (!alpha_equal(core_seq.back(), f_bang(f_bool())))
    throw DecomposeError("promotion body does not end with !Bool");
  for (int t = 0; t < n; ++t)
    if (!alpha_equal(core_seq[t], dual(strty)))
      throw DecomposeError("promotion context is not made of Str'");
  (void)prom;

  // pull out the existential introduction of each Str' position
  StringDecomposition out;
  for (int t = 0; t < n; ++t) {
    // splice position t; after splicing, the conclusion at t becomes
    // Str[A_t]'; positions of the remaining Str' are unchanged
    trunc_detail::SpliceCtx scx;
    auto [spliced, wit] = trunc_detail::splice_exists(scx, core, t);
    if (!is_closed(wit)) throw DecomposeError("existential witness is not closed");
    if (!is_mall2(wit)) throw DecomposeError("existential witness is not a MALL2 formula");
    out.witnesses.push_back(wit);
    core = spliced;
  }
  out.core = core;
  // sanity: the spliced core proves |- Str[A_1]', .., Str[A_n]', !Bool
  Sequent final_seq = check_proof(out.core);
  for (int t = 0; t < n; ++t)
    if (!alpha_equal(final_seq[t], dual(f_str_of(out.witnesses[t]))))
      throw DecomposeError("spliced core has an unexpected conclusion");
  return out;
}

// Rebuild the displayed skeleton around a decomposition; proves the same
// two-formula sequent |- ?Str', !!Bool.
inline Proof recompose_string_proof(const StringDecomposition& d) {
  Proof cur = d.core;
  Sequent s = check_proof(cur);
  int n = static_cast<int>(d.witnesses.size());
  Fm strty = f_str();
  Fm target = dual(strty);  // ex X. Str[X]'
  for (int t = 0; t < n; ++t) {
    // bring position t to the end, apply the exists, put it back
    int len = static_cast<int>(s.size());
    cur = p_move(cur, t, len - 1);
    cur = p_exists(target, d.witnesses[t], cur);
    cur = p_move(cur, len - 1, t);
  }
  cur = p_promotion(cur);  // |- ?Str'^n, !!Bool
  if (n == 0) {
    cur = p_weakening(dual(strty), cur);  // |- !!Bool, ?Str'
    cur = p_move(cur, 1, 0);
  } else {
    // contract the n copies into one
    for (int t = 0; t < n - 1; ++t) {
      int len = n - t + 1;
      cur = p_move(cur, len - 1, 0);      // !!Bool to the front
      cur = p_contraction(cur);           // merge the last two ?Str'
      cur = p_move(cur, 0, len - 2);      // !!Bool back to the end
    }
    // |- ?Str', !!Bool already in order
  }
  return cur;
}

}  // namespace ll2
