#pragma once

// Points of coherence-space webs and normal-form pattern terms, hash-consed
// in a process-wide arena. Structural equality is id equality: combined with
// explicit canonicalization of binders this makes clique and web membership
// a plain integer comparison.
//
// Term grammar:
//   Var(level, index)   bound variable; levels count outside-in: a term that
//                       belongs to a normal form with n slots uses levels
//                       0..n-1 for the slots, then one level per Bind node
//                       on the path from the root
//   Tok(tag, index)     point of an opaque space (universal spaces, space
//                       literals, generated witnesses)
//   Unit                the point of 1 / bot
//   Pair(a, b)          tensor / par point
//   Inl(a), Inr(a)      plus / with point
//   Bang{e...}          a clique, as a point of !A / ?A (sorted, deduped)
//   Bind(G, body)       a normal form of a one-variable functor, as a point
//                       of a quantified formula; G is the bound space

#include <cassert>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "ll2/graph.hpp"

namespace ll2 {

using TermId = uint32_t;
inline constexpr TermId kNoTerm = 0xffffffffu;

enum class TK : uint8_t { Var, Tok, Unit, Pair, Inl, Inr, Bang, Bind };

struct TermNode {
  TK kind;
  uint32_t a = 0, b = 0;  // Var: level,index  Tok: tag,index  Pair: children
                          // Inl/Inr: a=child  Bang: a=pool offset, b=count
                          // Bind: a=graph id, b=body
  bool operator==(const TermNode& o) const { return kind == o.kind && a == o.a && b == o.b; }
};

struct TermNodeHash {
  size_t operator()(const TermNode& n) const {
    return (size_t(n.kind) * 0x9e3779b97f4a7c15ull) ^ (size_t(n.a) << 20) ^ size_t(n.b);
  }
};

class TermArena {
 public:
  static TermArena& get() {
    static TermArena a;
    return a;
  }

  TermId intern(TermNode n) {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = index_.find(n);
    if (it != index_.end()) return it->second;
    nodes_.push_back(n);
    TermId id = static_cast<TermId>(nodes_.size() - 1);
    index_.emplace(n, id);
    return id;
  }

  const TermNode& node(TermId id) const { return nodes_[id]; }

  uint32_t intern_graph(const Graph& g) {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = graph_index_.find(g);
    if (it != graph_index_.end()) return it->second;
    graphs_.push_back(g);
    uint32_t id = static_cast<uint32_t>(graphs_.size() - 1);
    graph_index_.emplace(g, id);
    return id;
  }

  const Graph& graph(uint32_t id) const { return graphs_[id]; }

  uint32_t intern_list(const std::vector<TermId>& xs) {
    std::lock_guard<std::mutex> lk(mu_);
    uint32_t off = static_cast<uint32_t>(pool_.size());
    pool_.insert(pool_.end(), xs.begin(), xs.end());
    return off;
  }

  const TermId* list(uint32_t off) const { return pool_.data() + off; }

  uint32_t intern_tag(const std::string& s) {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = tag_index_.find(s);
    if (it != tag_index_.end()) return it->second;
    tags_.push_back(s);
    uint32_t id = static_cast<uint32_t>(tags_.size() - 1);
    tag_index_.emplace(s, id);
    return id;
  }

  const std::string& tag(uint32_t id) const { return tags_[id]; }

 private:
  std::mutex mu_;
  std::vector<TermNode> nodes_;
  std::unordered_map<TermNode, TermId, TermNodeHash> index_;
  std::vector<Graph> graphs_;
  std::map<Graph, uint32_t> graph_index_;
  std::vector<TermId> pool_;
  std::vector<std::string> tags_;
  std::unordered_map<std::string, uint32_t> tag_index_;
};

inline const TermNode& tnode(TermId id) { return TermArena::get().node(id); }

inline TermId t_var(uint32_t level, uint32_t index) {
  return TermArena::get().intern({TK::Var, level, index});
}
inline TermId t_tok(uint32_t tag, uint32_t index) {
  return TermArena::get().intern({TK::Tok, tag, index});
}
inline TermId t_unit() { return TermArena::get().intern({TK::Unit, 0, 0}); }
inline TermId t_pair(TermId a, TermId b) { return TermArena::get().intern({TK::Pair, a, b}); }
inline TermId t_inl(TermId a) { return TermArena::get().intern({TK::Inl, a, 0}); }
inline TermId t_inr(TermId a) { return TermArena::get().intern({TK::Inr, a, 0}); }

int compare_terms(TermId x, TermId y);

inline TermId t_bang(std::vector<TermId> elems) {
  std::sort(elems.begin(), elems.end(), [](TermId x, TermId y) { return compare_terms(x, y) < 0; });
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  // element lists are deduped by content so equal cliques share one node
  static std::mutex mu;
  static std::map<std::vector<TermId>, TermId> content;
  std::lock_guard<std::mutex> lk(mu);
  auto it = content.find(elems);
  if (it != content.end()) return it->second;
  uint32_t off = TermArena::get().intern_list(elems);
  TermId id = TermArena::get().intern({TK::Bang, off, static_cast<uint32_t>(elems.size())});
  content.emplace(std::move(elems), id);
  return id;
}

inline TermId t_bind(const Graph& g, TermId body) {
  return TermArena::get().intern({TK::Bind, TermArena::get().intern_graph(g), body});
}

inline std::vector<TermId> bang_elems(TermId id) {
  const TermNode& n = tnode(id);
  assert(n.kind == TK::Bang);
  const TermId* p = TermArena::get().list(n.a);
  return std::vector<TermId>(p, p + n.b);
}

inline const Graph& bind_graph(TermId id) { return TermArena::get().graph(tnode(id).a); }
inline TermId bind_body(TermId id) { return tnode(id).b; }

// Total structural order, stable across interning order.
inline int compare_terms(TermId x, TermId y) {
  if (x == y) return 0;
  const TermNode& a = tnode(x);
  const TermNode& b = tnode(y);
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case TK::Var:
    case TK::Tok:
      if (a.a != b.a) return a.a < b.a ? -1 : 1;
      if (a.b != b.b) return a.b < b.b ? -1 : 1;
      return 0;
    case TK::Unit:
      return 0;
    case TK::Inl:
    case TK::Inr:
      return compare_terms(a.a, b.a);
    case TK::Pair: {
      int c = compare_terms(a.a, b.a);
      return c ? c : compare_terms(a.b, b.b);
    }
    case TK::Bang: {
      if (a.b != b.b) return a.b < b.b ? -1 : 1;
      const TermId* pa = TermArena::get().list(a.a);
      const TermId* pb = TermArena::get().list(b.a);
      for (uint32_t i = 0; i < a.b; ++i) {
        int c = compare_terms(pa[i], pb[i]);
        if (c) return c;
      }
      return 0;
    }
    case TK::Bind: {
      const Graph& ga = TermArena::get().graph(a.a);
      const Graph& gb = TermArena::get().graph(b.a);
      if (!(ga == gb)) return ga < gb ? -1 : 1;
      return compare_terms(a.b, b.b);
    }
  }
  return 0;
}

struct TermLess {
  bool operator()(TermId x, TermId y) const { return compare_terms(x, y) < 0; }
};

// fn(level, index) -> replacement or kNoTerm to keep the variable.
template <class F>
TermId map_vars(TermId t, const F& fn) {
  const TermNode& n = tnode(t);
  switch (n.kind) {
    case TK::Var: {
      TermId r = fn(n.a, n.b);
      return r == kNoTerm ? t : r;
    }
    case TK::Tok:
    case TK::Unit:
      return t;
    case TK::Pair: {
      TermId a = map_vars(n.a, fn), b = map_vars(n.b, fn);
      return (a == n.a && b == n.b) ? t : t_pair(a, b);
    }
    case TK::Inl: {
      TermId a = map_vars(n.a, fn);
      return a == n.a ? t : t_inl(a);
    }
    case TK::Inr: {
      TermId a = map_vars(n.a, fn);
      return a == n.a ? t : t_inr(a);
    }
    case TK::Bang: {
      auto es = bang_elems(t);
      bool changed = false;
      for (auto& e : es) {
        TermId e2 = map_vars(e, fn);
        changed |= e2 != e;
        e = e2;
      }
      return changed ? t_bang(es) : t;
    }
    case TK::Bind: {
      TermId b = map_vars(n.b, fn);
      return b == n.b ? t : t_bind(TermArena::get().graph(n.a), b);
    }
  }
  return t;
}

template <class F>
void for_each_var(TermId t, const F& fn) {
  const TermNode& n = tnode(t);
  switch (n.kind) {
    case TK::Var:
      fn(n.a, n.b);
      return;
    case TK::Tok:
    case TK::Unit:
      return;
    case TK::Pair:
      for_each_var(n.a, fn);
      for_each_var(n.b, fn);
      return;
    case TK::Inl:
    case TK::Inr:
      for_each_var(n.a, fn);
      return;
    case TK::Bang:
      for (TermId e : bang_elems(t)) for_each_var(e, fn);
      return;
    case TK::Bind:
      for_each_var(n.b, fn);
      return;
  }
}

template <class F>
void for_each_tok(TermId t, const F& fn) {
  const TermNode& n = tnode(t);
  switch (n.kind) {
    case TK::Tok:
      fn(n.a, n.b);
      return;
    case TK::Var:
    case TK::Unit:
      return;
    case TK::Pair:
      for_each_tok(n.a, fn);
      for_each_tok(n.b, fn);
      return;
    case TK::Inl:
    case TK::Inr:
      for_each_tok(n.a, fn);
      return;
    case TK::Bang:
      for (TermId e : bang_elems(t)) for_each_tok(e, fn);
      return;
    case TK::Bind:
      for_each_tok(n.b, fn);
      return;
  }
}

// Rebase bind levels when the number of slots a term lives under changes
// from n_old to n_new (slot references are remapped by `slot_map`, which may
// be empty when there are none).
inline TermId remap_levels(TermId t, const std::vector<int>& slot_map, int n_old, int n_new) {
  return map_vars(t, [&](uint32_t level, uint32_t idx) -> TermId {
    if (static_cast<int>(level) < n_old) {
      int s = slot_map.at(level);
      assert(s >= 0);
      return t_var(static_cast<uint32_t>(s), idx);
    }
    return t_var(level - n_old + n_new, idx);
  });
}

}  // namespace ll2
