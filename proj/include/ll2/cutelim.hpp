#pragma once

// Cut elimination for MALL2 + ELL2, innermost-cut-first. reduce() works on
// a generalized shape: the cut formula may sit at any position of either
// premise; commutation steps push the cut towards the rules that introduced
// the cut formulas, then a key reduction fires. Every case restores the
// contract order Gamma\i ++ Delta\j with explicit exchanges, so denotations
// are preserved exactly, not merely up to permutation.

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ll2/sequent.hpp"

namespace ll2 {

struct FuelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace cutelim_detail {

// conclusion cache; keeps proofs alive so node addresses stay unique
struct ConclCache {
  std::map<const ProofNode*, std::pair<Proof, Sequent>> memo;

  const Sequent& of(const Proof& p) {
    auto it = memo.find(p.get());
    if (it != memo.end()) return it->second.second;
    Sequent s = check_proof(p);
    return memo.emplace(p.get(), std::make_pair(p, std::move(s))).first->second.second;
  }
};

// move a block of `len` adjacent formulas so it starts at `to`
inline Proof move_block(Proof p, int start, int len, int to) {
  if (to == start || len == 0) return p;
  if (to < start) {
    for (int t = 0; t < len; ++t) p = p_move(std::move(p), start + t, to + t);
  } else {
    for (int t = len - 1; t >= 0; --t) p = p_move(std::move(p), start + t, to + t);
  }
  return p;
}

// turn |- B(lenB) ++ A(lenA) into |- A ++ B
inline Proof rotate_halves(Proof p, int lenB, int lenA) {
  return move_block(std::move(p), lenB, lenA, 0);
}

struct Eliminator {
  ConclCache cache;
  uint64_t fuel;

  explicit Eliminator(uint64_t f) : fuel(f) {}

  void burn() {
    if (fuel == 0) throw FuelError("cut elimination: fuel exhausted");
    --fuel;
  }

  // does the last rule of p introduce the formula at position i?
  bool owns(const Proof& p, int i) {
    int n = static_cast<int>(cache.of(p).size());
    switch (p->rule) {
      case Rule::Ax:
      case Rule::One:
      case Rule::Promotion:
        return true;
      case Rule::Top:
        return i == n - 1;  // context cuts are absorbed separately
      case Rule::Tensor:
        return i == static_cast<int>(cache.of(p->premises[0]).size()) - 1;
      case Rule::Exchange:
      case Rule::Cut:
        return false;
      default:
        return i == n - 1;
    }
  }

  Proof eliminate(const Proof& p) {
    std::vector<Proof> prem;
    for (auto& q : p->premises) prem.push_back(eliminate(q));
    if (p->rule != Rule::Cut) {
      ProofNode n = *p;
      n.premises = prem;
      return mk_proof(std::move(n));
    }
    int l1 = static_cast<int>(cache.of(prem[0]).size());
    return reduce(prem[0], l1 - 1, prem[1], 0);
  }

  // cut-free l |- Gamma (Gamma[i] = C), cut-free r |- Delta (Delta[j] = ~C);
  // returns a cut-free proof of Gamma\i ++ Delta\j
  Proof reduce(Proof l, int i, Proof r, int j) {
    burn();
    const Sequent g = cache.of(l);
    const Sequent d = cache.of(r);
    int n1 = static_cast<int>(g.size());
    int n2 = static_cast<int>(d.size());

    if (l->rule == Rule::Ax) return p_move(r, j, 0);
    if (r->rule == Rule::Ax) return p_move(l, i, n1 - 1);
    // a top axiom absorbs a cut on one of its context formulas
    if (l->rule == Rule::Top && i != n1 - 1) {
      std::vector<Fm> ctx;
      for (int t = 0; t + 1 < n1; ++t)
        if (t != i) ctx.push_back(g[t]);
      for (int t = 0; t < n2; ++t)
        if (t != j) ctx.push_back(d[t]);
      Proof out = p_top(ctx);  // |- ctx, top
      return p_move(std::move(out), static_cast<int>(ctx.size()), n1 - 2);
    }
    if (r->rule == Rule::Top && j != n2 - 1) {
      std::vector<Fm> ctx;
      for (int t = 0; t < n1; ++t)
        if (t != i) ctx.push_back(g[t]);
      for (int t = 0; t + 1 < n2; ++t)
        if (t != j) ctx.push_back(d[t]);
      return p_top(ctx);  // the top ends Delta\j, which ends the target
    }

    if (!owns(l, i)) return commute(l, i, r, j);
    if (!owns(r, j)) {
      Proof flipped = reduce(r, j, l, i);  // |- Delta\j ++ Gamma\i
      return rotate_halves(std::move(flipped), n2 - 1, n1 - 1);
    }

    // both principal: orient so the positive connective is on the left
    switch (g[i]->conn) {
      case Conn::Tensor:
      case Conn::Plus:
      case Conn::One:
      case Conn::Forall:
      case Conn::Bang:
        return key(l, i, r, j);
      default: {
        Proof flipped = key(r, j, l, i);
        return rotate_halves(std::move(flipped), n2 - 1, n1 - 1);
      }
    }
  }

  // key reductions; the cut formula of l is the positive side, principal in
  // l's last rule, and the dual is principal in r's
  Proof key(const Proof& l, int i, const Proof& r, int j) {
    const Sequent g = cache.of(l);
    const Sequent d = cache.of(r);
    int n1 = static_cast<int>(g.size());
    int n2 = static_cast<int>(d.size());
    switch (l->rule) {
      case Rule::One: {
        if (r->rule != Rule::Bot) throw std::logic_error("cut: 1 against non-bot");
        return r->premises[0];
      }
      case Rule::Tensor: {
        if (r->rule != Rule::Par) throw std::logic_error("cut: tensor against non-par");
        const Proof& p1 = l->premises[0];  // |- G1, A
        const Proof& p2 = l->premises[1];  // |- B, G2
        const Proof& p3 = r->premises[0];  // |- D'', A~, B~
        int l1 = static_cast<int>(cache.of(p1).size());
        int l2 = static_cast<int>(cache.of(p2).size());
        int l3 = static_cast<int>(cache.of(p3).size());
        Proof inner = reduce(p2, 0, p3, l3 - 1);  // |- G2, D'', A~
        int inner_len = (l2 - 1) + (l3 - 1);
        return reduce(p1, l1 - 1, inner, inner_len - 1);  // |- G1, G2, D''
      }
      case Rule::PlusL:
      case Rule::PlusR: {
        if (r->rule != Rule::With) throw std::logic_error("cut: plus against non-with");
        const Proof& p1 = l->premises[0];
        const Proof& branch = l->rule == Rule::PlusL ? r->premises[0] : r->premises[1];
        int l1 = static_cast<int>(cache.of(p1).size());
        int lb = static_cast<int>(cache.of(branch).size());
        return reduce(p1, l1 - 1, branch, lb - 1);
      }
      case Rule::Forall: {
        if (r->rule != Rule::Exists) throw std::logic_error("cut: forall against non-exists");
        Proof p1b = substitute_proof(l->premises[0], l->var, r->witness);
        const Proof& p2 = r->premises[0];
        int l1 = static_cast<int>(cache.of(p1b).size());
        int l2 = static_cast<int>(cache.of(p2).size());
        return reduce(p1b, l1 - 1, p2, l2 - 1);
      }
      case Rule::Promotion: {
        const Proof& p1 = l->premises[0];
        int l1 = static_cast<int>(cache.of(p1).size());
        int k = l1 - 1;  // width of the box context
        if (r->rule == Rule::Promotion) {
          const Proof& p2 = r->premises[0];
          Proof inner = reduce(p1, l1 - 1, p2, j);  // |- Th1', Th2\j
          return p_promotion(std::move(inner));
        }
        if (r->rule == Rule::Weakening) {
          Proof out = r->premises[0];  // |- Delta'
          for (int t = 0; t < k; ++t) out = p_weakening(g[t]->a, std::move(out));
          // |- Delta', ?B_0..?B_{k-1}; target is the rotation
          return rotate_halves(std::move(out), n2 - 1, k);
        }
        if (r->rule == Rule::Contraction) {
          const Proof& p2 = r->premises[0];  // |- D'', ?A~, ?A~
          int dlen = static_cast<int>(cache.of(p2).size());
          int dtail = dlen - 2;
          Proof c1 = reduce(l, i, p2, dlen - 1);          // |- ?Th, D'', ?A~
          int c1len = k + (dlen - 1);
          Proof out = reduce(l, i, c1, c1len - 1);        // |- ?Th, ?Th, D''
          for (int t = 0; t < k; ++t) {
            int total = 2 * (k - t) + dtail + t;
            out = p_move(std::move(out), 0, total - 1);
            out = p_move(std::move(out), (k - t) - 1, total - 2);
            out = p_contraction(std::move(out));
          }
          // |- D'', merged ?Th
          return rotate_halves(std::move(out), dtail, k);
        }
        throw std::logic_error("cut: promotion against unexpected rule");
      }
      default:
        throw std::logic_error("cut: unexpected key case");
    }
  }

  // l's last rule does not own position i: push the cut into l's premises
  Proof commute(const Proof& l, int i, const Proof& r, int j) {
    const Sequent g = cache.of(l);
    const Sequent d = cache.of(r);
    int n1 = static_cast<int>(g.size());
    int n2 = static_cast<int>(d.size());
    int dtail = n2 - 1;
    switch (l->rule) {
      case Rule::Exchange: {
        int k = l->pos;
        int ip = i == k ? k + 1 : (i == k + 1 ? k : i);
        Proof rec = reduce(l->premises[0], ip, r, j);
        if (i == k || i == k + 1) return rec;  // the swap involved the cut formula
        int kp = k - (ip < k ? 1 : 0);
        return p_exchange(kp, std::move(rec));
      }
      case Rule::Tensor: {
        const Proof& p1 = l->premises[0];
        const Proof& p2 = l->premises[1];
        int l1 = static_cast<int>(cache.of(p1).size());
        if (i < l1 - 1) {
          Proof rec = reduce(p1, i, r, j);  // |- G1\i, A, Delta\j
          int pa = l1 - 2;                  // position of A
          rec = p_move(std::move(rec), pa, pa + dtail);
          Proof out = p_tensor(std::move(rec), p2);
          // |- G1\i, Delta\j, AxB, G2'
          int g2 = n1 - l1;
          out = p_move(std::move(out), pa + dtail, pa);
          return move_block(std::move(out), pa + 1, dtail, pa + 1 + g2);
        }
        int ip = i - l1 + 1;
        Proof rec = reduce(p2, ip, r, j);  // |- B, G2\ip, Delta\j
        return p_tensor(p1, std::move(rec));
      }
      case Rule::Par: {
        Proof rec = reduce(l->premises[0], i, r, j);  // |- G''\i, A, B, Delta\j
        int pa = n1 - 2;
        rec = p_move(std::move(rec), pa + 1, pa + 1 + dtail);
        rec = p_move(std::move(rec), pa, pa + dtail);
        rec = p_par(std::move(rec));
        return p_move(std::move(rec), pa + dtail, pa);
      }
      case Rule::Bot:
      case Rule::Weakening: {
        Proof rec = reduce(l->premises[0], i, r, j);
        Proof out = l->rule == Rule::Bot ? p_bot(std::move(rec))
                                         : p_weakening(l->formula, std::move(rec));
        return p_move(std::move(out), n1 - 2 + dtail, n1 - 2);
      }
      case Rule::PlusL:
      case Rule::PlusR: {
        Proof rec = reduce(l->premises[0], i, r, j);
        int pa = n1 - 2;
        rec = p_move(std::move(rec), pa, pa + dtail);
        Proof out = l->rule == Rule::PlusL ? p_plusl(l->formula, std::move(rec))
                                           : p_plusr(l->formula, std::move(rec));
        return p_move(std::move(out), pa + dtail, pa);
      }
      case Rule::With: {
        Proof rec1 = reduce(l->premises[0], i, r, j);
        Proof rec2 = reduce(l->premises[1], i, r, j);
        int pa = n1 - 2;
        rec1 = p_move(std::move(rec1), pa, pa + dtail);
        rec2 = p_move(std::move(rec2), pa, pa + dtail);
        Proof out = p_with(std::move(rec1), std::move(rec2));
        return p_move(std::move(out), pa + dtail, pa);
      }
      case Rule::Exists: {
        Proof rec = reduce(l->premises[0], i, r, j);
        int pa = n1 - 2;
        rec = p_move(std::move(rec), pa, pa + dtail);
        Proof out = p_exists(l->formula, l->witness, std::move(rec));
        return p_move(std::move(out), pa + dtail, pa);
      }
      case Rule::Forall: {
        // rename the eigenvariable away from the incoming context
        std::set<std::string> avoid;
        for (int t = 0; t < n2; ++t)
          for (auto& v : free_vars(d[t])) avoid.insert(v);
        std::string x = l->var;
        Proof body = l->premises[0];
        if (avoid.count(x)) {
          int c = 0;
          std::string fresh;
          do fresh = x + "_" + std::to_string(++c);
          while (avoid.count(fresh));
          body = substitute_proof(body, x, f_var(fresh));
          x = fresh;
        }
        Proof rec = reduce(body, i, r, j);
        int pa = n1 - 2;
        rec = p_move(std::move(rec), pa, pa + dtail);
        Proof out = p_forall(x, std::move(rec));
        return p_move(std::move(out), pa + dtail, pa);
      }
      case Rule::Contraction: {
        Proof rec = reduce(l->premises[0], i, r, j);  // |- ctx\i, ?A, ?A, Delta\j
        int pa = n1 - 2;
        rec = p_move(std::move(rec), pa + 1, pa + 1 + dtail);
        rec = p_move(std::move(rec), pa, pa + dtail);
        rec = p_contraction(std::move(rec));
        return p_move(std::move(rec), pa + dtail, pa);
      }
      case Rule::Cut:
        throw std::logic_error("cut: premises were not cut-free");
      default:
        throw std::logic_error("cut: no commutation for this rule");
    }
  }
};

}  // namespace cutelim_detail

inline Proof cut_eliminate(const Proof& p, uint64_t fuel = 500000) {
  cutelim_detail::Eliminator e(fuel);
  return e.eliminate(p);
}

}  // namespace ll2
