#pragma once

// The combinatorial presentation of normal functors: normal forms
// <X1,...,Xn> x with bound-variable coherence spaces, considered up to
// alpha-renaming. A normal form here carries one term per sequent component
// (formula denotations are the one-component case), so proof denotations
// and formula denotations share one representation.
//
// Canonical form: for every slot, and for every Bind node inside the terms,
// the variable numbering is the one whose serialization is lexicographically
// least over all permutations of that bound space. Equality after
// canonicalization is plain id equality.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ll2/cohspace.hpp"
#include "ll2/graph.hpp"
#include "ll2/term.hpp"

namespace ll2 {

struct NormalForm {
  std::vector<Graph> slots;   // bound space per functor parameter
  std::vector<TermId> comps;  // one term per sequent component

  int arity() const { return static_cast<int>(slots.size()); }

  bool operator==(const NormalForm& o) const { return slots == o.slots && comps == o.comps; }
  bool operator<(const NormalForm& o) const {
    if (slots.size() != o.slots.size()) return slots.size() < o.slots.size();
    for (size_t i = 0; i < slots.size(); ++i)
      if (!(slots[i] == o.slots[i])) return slots[i] < o.slots[i];
    if (comps.size() != o.comps.size()) return comps.size() < o.comps.size();
    for (size_t i = 0; i < comps.size(); ++i)
      if (comps[i] != o.comps[i]) {
        int c = compare_terms(comps[i], o.comps[i]);
        if (c) return c < 0;
      }
    return false;
  }
};

// max_i Card|X_i| over one nf / over a set of nfs
inline int nf_width(const NormalForm& n) {
  int d = 0;
  for (auto& g : n.slots) d = std::max(d, static_cast<int>(g.n));
  return d;
}

inline int degree(const std::vector<NormalForm>& nfs) {
  int d = 0;
  for (auto& n : nfs) d = std::max(d, nf_width(n));
  return d;
}

inline int degree_of_slot(const std::vector<NormalForm>& nfs, int slot) {
  int d = 0;
  for (auto& n : nfs) d = std::max(d, static_cast<int>(n.slots[slot].n));
  return d;
}

// ---- canonicalization ----

namespace detail {

using Perms = std::vector<std::vector<int>>;

// Serialize under the given renumbering and rebuild the renumbered term.
// `path` holds the permutations of the Bind nodes enclosing the current
// position (outside-in), aligned with variable levels n_slots, n_slots+1...
// Every Bind picks the permutation minimizing its own serialization given
// the outer choices; that choice is context-deterministic, so equal
// alpha-classes serialize and rebuild identically.
inline std::pair<std::string, TermId> canon_term(TermId t, const Perms& slot_perms, int n_slots,
                                                 std::vector<const std::vector<int>*>& path) {
  const TermNode& n = tnode(t);
  std::string out;
  out.push_back(static_cast<char>(n.kind));
  switch (n.kind) {
    case TK::Var: {
      int level = static_cast<int>(n.a);
      int idx = static_cast<int>(n.b);
      int mapped;
      if (level < n_slots)
        mapped = slot_perms[level][idx];
      else
        mapped = (*path[level - n_slots])[idx];
      out.append(reinterpret_cast<const char*>(&level), sizeof level);
      out.append(reinterpret_cast<const char*>(&mapped), sizeof mapped);
      return {out, t_var(n.a, mapped)};
    }
    case TK::Tok:
      out.append(reinterpret_cast<const char*>(&n.a), sizeof n.a);
      out.append(reinterpret_cast<const char*>(&n.b), sizeof n.b);
      return {out, t};
    case TK::Unit:
      return {out, t};
    case TK::Pair: {
      auto [sa, ta] = canon_term(n.a, slot_perms, n_slots, path);
      auto [sb, tb] = canon_term(n.b, slot_perms, n_slots, path);
      return {out + sa + sb, t_pair(ta, tb)};
    }
    case TK::Inl: {
      auto [sa, ta] = canon_term(n.a, slot_perms, n_slots, path);
      return {out + sa, t_inl(ta)};
    }
    case TK::Inr: {
      auto [sa, ta] = canon_term(n.a, slot_perms, n_slots, path);
      return {out + sa, t_inr(ta)};
    }
    case TK::Bang: {
      auto es = bang_elems(t);
      std::vector<std::pair<std::string, TermId>> parts;
      for (TermId e : es) parts.push_back(canon_term(e, slot_perms, n_slots, path));
      std::sort(parts.begin(), parts.end());
      std::vector<TermId> res;
      for (auto& [s, id] : parts) {
        out += s;
        res.push_back(id);
      }
      return {out, t_bang(res)};
    }
    case TK::Bind: {
      const Graph& g = bind_graph(t);
      std::string best;
      TermId best_t = kNoTerm;
      Graph best_g;
      bool first = true;
      for_each_permutation(g.n, [&](const std::vector<int>& p) {
        Graph pg = g.permuted(p);
        std::string cand = pg.dump();
        path.push_back(&p);
        auto [sb, tb] = canon_term(n.b, slot_perms, n_slots, path);
        path.pop_back();
        cand += sb;
        if (first || cand < best) {
          best = std::move(cand);
          best_t = tb;
          best_g = pg;
          first = false;
        }
      });
      if (first) {  // empty bound space: single empty permutation
        static const std::vector<int> none;
        path.push_back(&none);
        auto [sb, tb] = canon_term(n.b, slot_perms, n_slots, path);
        path.pop_back();
        best = g.dump() + sb;
        best_t = tb;
        best_g = g;
      }
      return {out + best, t_bind(best_g, best_t)};
    }
  }
  return {out, t};
}

}  // namespace detail

inline bool term_has_bind(TermId t) {
  const TermNode& n = tnode(t);
  switch (n.kind) {
    case TK::Bind:
      return true;
    case TK::Pair:
      return term_has_bind(n.a) || term_has_bind(n.b);
    case TK::Inl:
    case TK::Inr:
      return term_has_bind(n.a);
    case TK::Bang:
      for (TermId e : bang_elems(t))
        if (term_has_bind(e)) return true;
      return false;
    default:
      return false;
  }
}

// Smallest alpha-variant: minimizes (permuted slot graphs, term serialization)
// lexicographically over all products of per-slot permutations.
inline NormalForm canonicalize(const NormalForm& nf) {
  int n = nf.arity();
  if (n == 0) {  // nothing to rename unless a binder hides inside
    bool has = false;
    for (TermId c : nf.comps) has = has || term_has_bind(c);
    if (!has) return nf;
  }
  std::vector<std::vector<std::vector<int>>> perms_by_slot(n);
  for (int s = 0; s < n; ++s) {
    for_each_permutation(nf.slots[s].n, [&](const std::vector<int>& p) { perms_by_slot[s].push_back(p); });
    if (perms_by_slot[s].empty()) perms_by_slot[s].push_back({});
  }
  std::vector<size_t> pick(n, 0);
  std::string best;
  NormalForm best_nf = nf;
  bool first = true;
  for (;;) {
    detail::Perms sp(n);
    for (int s = 0; s < n; ++s) sp[s] = perms_by_slot[s][pick[s]];
    std::string cand;
    std::vector<Graph> graphs(n);
    for (int s = 0; s < n; ++s) {
      graphs[s] = nf.slots[s].permuted(sp[s]);
      cand += graphs[s].dump();
      cand.push_back('/');
    }
    std::vector<TermId> comps;
    std::vector<const std::vector<int>*> path;
    for (TermId c : nf.comps) {
      auto [s, id] = detail::canon_term(c, sp, n, path);
      cand += s;
      comps.push_back(id);
    }
    if (first || cand < best) {
      best = cand;
      best_nf.slots = graphs;
      best_nf.comps = comps;
      first = false;
    }
    int s = 0;
    for (; s < n; ++s) {
      if (++pick[s] < perms_by_slot[s].size()) break;
      pick[s] = 0;
    }
    if (s == n) break;
  }
  return best_nf;
}

inline void sort_unique(std::vector<NormalForm>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

inline TermId canonical_point(TermId t) {
  if (!term_has_bind(t)) return t;
  NormalForm nf;
  nf.comps = {t};
  return canonicalize(nf).comps[0];
}

// ---- instantiation and abstraction ----

inline NormalForm canonicalize(const NormalForm& nf);

// Alpha-normalize a frame-0 point so binder-carrying instances compare by
// id against canonically built webs.
inline TermId canonical_point(TermId t);

// Substitute slot variables along per-slot embeddings (index vectors into
// the target webs). The result is a frame-0 point row: binder levels are
// rebased now that the slots are gone, and binder-carrying points are
// alpha-normalized.
inline std::vector<TermId> instantiate_nf(const NormalForm& nf,
                                          const std::vector<const CohSpace*>& spaces,
                                          const std::vector<std::vector<int>>& embs) {
  int n = nf.arity();
  std::vector<TermId> out;
  out.reserve(nf.comps.size());
  for (TermId c : nf.comps) {
    out.push_back(canonical_point(map_vars(c, [&](uint32_t level, uint32_t idx) -> TermId {
      if (static_cast<int>(level) < n) return spaces[level]->web[embs[level][idx]];
      return t_var(level - n, idx);
    })));
  }
  return out;
}

// All instances of one nf at the given spaces (product of per-slot
// embedding choices).
template <class F>
void for_each_instance(const NormalForm& nf, const std::vector<const CohSpace*>& spaces, const F& fn) {
  int n = nf.arity();
  std::vector<std::vector<std::vector<int>>> embs(n);
  for (int s = 0; s < n; ++s) {
    embs[s] = embeddings_into(nf.slots[s], *spaces[s]);
    if (embs[s].empty()) return;  // no instance
  }
  std::vector<size_t> pick(n, 0);
  for (;;) {
    std::vector<std::vector<int>> chosen(n);
    for (int s = 0; s < n; ++s) chosen[s] = embs[s][pick[s]];
    fn(instantiate_nf(nf, spaces, chosen), chosen);
    int s = 0;
    for (; s < n; ++s) {
      if (++pick[s] < embs[s].size()) break;
      pick[s] = 0;
    }
    if (s == n) break;
  }
}

inline uint64_t count_instances(const NormalForm& nf, const std::vector<const CohSpace*>& spaces) {
  uint64_t total = 1;
  for (int s = 0; s < nf.arity(); ++s) total *= count_embeddings_into(nf.slots[s], *spaces[s]);
  return total;
}

// Abstraction: recover the normal form of an instance row. Requires the
// slot spaces to have opaque token webs (tag per slot), so occurrences are
// recognizable; used at universal spaces and generated witnesses.
inline NormalForm nf_of_row(const std::vector<TermId>& row,
                            const std::vector<const CohSpace*>& spaces,
                            const std::vector<uint32_t>& slot_tags) {
  int n = static_cast<int>(spaces.size());
  std::vector<std::vector<int>> used(n);  // web indices, in discovery order
  auto slot_of_tag = [&](uint32_t tag) -> int {
    for (int s = 0; s < n; ++s)
      if (slot_tags[s] == tag) return s;
    return -1;
  };
  for (TermId c : row) {
    for_each_tok(c, [&](uint32_t tag, uint32_t idx) {
      int s = slot_of_tag(tag);
      if (s < 0) return;
      int w = spaces[s]->find(t_tok(tag, idx));
      if (w < 0) throw std::logic_error("nf_of_row: token outside slot web");
      auto& u = used[s];
      if (std::find(u.begin(), u.end(), w) == u.end()) u.push_back(w);
    });
  }
  NormalForm nf;
  nf.slots.resize(n);
  for (int s = 0; s < n; ++s) {
    std::sort(used[s].begin(), used[s].end());
    Graph g;
    g.n = static_cast<uint8_t>(used[s].size());
    for (size_t i = 0; i < used[s].size(); ++i)
      for (size_t j = 0; j < used[s].size(); ++j)
        if (spaces[s]->coherent(used[s][i], used[s][j])) g.rows[i] |= static_cast<uint16_t>(1u << j);
    nf.slots[s] = g;
  }
  // replace slot tokens by variables; the input is a frame-0 point, so its
  // binder levels shift up by the new slot count
  struct Replacer {
    const std::vector<std::vector<int>>& used;
    const std::vector<const CohSpace*>& spaces;
    const std::vector<uint32_t>& slot_tags;
    int n;

    TermId run(TermId t) {
      const TermNode& nd = tnode(t);
      switch (nd.kind) {
        case TK::Tok: {
          for (int s = 0; s < n; ++s)
            if (slot_tags[s] == nd.a) {
              int w = spaces[s]->find(t);
              auto it = std::find(used[s].begin(), used[s].end(), w);
              return t_var(s, static_cast<uint32_t>(it - used[s].begin()));
            }
          return t;
        }
        case TK::Var:
          return t_var(nd.a + n, nd.b);
        case TK::Unit:
          return t;
        case TK::Pair:
          return t_pair(run(nd.a), run(nd.b));
        case TK::Inl:
          return t_inl(run(nd.a));
        case TK::Inr:
          return t_inr(run(nd.a));
        case TK::Bang: {
          auto es = bang_elems(t);
          for (auto& e : es) e = run(e);
          return t_bang(es);
        }
        case TK::Bind:
          return t_bind(bind_graph(t), run(nd.b));
      }
      return t;
    }
  } rep{used, spaces, slot_tags, n};
  nf.comps.clear();
  for (TermId c : row) nf.comps.push_back(rep.run(c));
  return canonicalize(nf);
}

}  // namespace ll2
