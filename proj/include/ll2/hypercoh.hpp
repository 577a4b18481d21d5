#pragma once

// Second-order hypercoherences. Two routes to the coherence data of a
// formula:
//   - h_label / h_eval: the ground-truth oracle, direct recursion on the
//     connective clauses with quantifiers handled by a bounded search over
//     hypercoherence witnesses and unfoldings;
//   - sigma_eval: specifications by projections, composing label tables
//     over the normal-form presentation, with the possibility of a
//     valuation decided by a bounded witness search (the criterion the
//     paper leaves open).
// The two are compared subset-by-subset in the test batteries; the caps of
// the bounded searches are guarded there by a cap-stability regression.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ll2/denot.hpp"

namespace ll2 {

enum class HLabel : uint8_t { Dot, Minus, Plus };  // singleton, coherent, incoherent

inline char hlabel_char(HLabel l) { return l == HLabel::Dot ? 'o' : (l == HLabel::Minus ? '-' : '+'); }

inline HLabel hlabel_flip(HLabel l) {
  if (l == HLabel::Dot) return l;
  return l == HLabel::Minus ? HLabel::Plus : HLabel::Minus;
}

// A finite hypercoherence with explicit coherent-subset data.
struct Hyper {
  std::vector<TermId> web;                // sorted by TermLess
  std::set<std::vector<int>> gamma2;      // coherent subsets of size >= 2, as index sets

  int find(TermId t) const {
    auto it = std::lower_bound(web.begin(), web.end(), t, TermLess{});
    return it != web.end() && *it == t ? static_cast<int>(it - web.begin()) : -1;
  }

  HLabel label_idx(const std::vector<int>& s) const {
    if (s.size() == 1) return HLabel::Dot;
    return gamma2.count(s) ? HLabel::Minus : HLabel::Plus;
  }

  HLabel label(const std::vector<TermId>& s) const {
    if (s.size() == 1) return HLabel::Dot;
    std::vector<int> idx;
    for (TermId t : s) {
      int i = find(t);
      if (i < 0) throw std::out_of_range("Hyper::label: point not in web");
      idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    if (idx.size() == 1) return HLabel::Dot;
    return label_idx(idx);
  }

  // pair-coherence restriction, as a coherence space
  CohSpace pair_restriction() const {
    CohSpace s;
    s.web = web;
    s.coh.assign(web.size(), Bits(web.size()));
    for (size_t i = 0; i < web.size(); ++i) s.coh[i].set(i);
    for (auto& g : gamma2)
      if (g.size() == 2) {
        s.coh[g[0]].set(g[1]);
        s.coh[g[1]].set(g[0]);
      }
    return s;
  }

  bool is_clique(const std::vector<TermId>& c) const {
    // every finite non-empty subset coherent
    std::vector<int> idx;
    for (TermId t : c) {
      int i = find(t);
      if (i < 0) return false;
      idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    int m = static_cast<int>(idx.size());
    if (m > 20) throw CapError("Hyper::is_clique: subset too large");
    for (uint32_t bits = 1; bits < (1u << m); ++bits) {
      if (__builtin_popcount(bits) < 2) continue;
      std::vector<int> sub;
      for (int t = 0; t < m; ++t)
        if ((bits >> t) & 1) sub.push_back(idx[t]);
      if (!gamma2.count(sub)) return false;
    }
    return true;
  }

  bool operator==(const Hyper& o) const { return web == o.web && gamma2 == o.gamma2; }
};

using HEnv = std::map<std::string, Hyper>;

// All hypercoherences on k opaque points, one per isomorphism class.
inline const std::vector<Hyper>& hypers_of_size(int k) {
  static std::vector<std::vector<Hyper>> cache;
  if (k < 0 || k > 4) throw std::invalid_argument("hypers_of_size: out of range");
  while (static_cast<int>(cache.size()) <= k) {
    int n = static_cast<int>(cache.size());
    std::vector<Hyper> out;
    // subsets of size >= 2
    std::vector<std::vector<int>> subs;
    for (uint32_t bits = 0; bits < (1u << n); ++bits) {
      if (__builtin_popcount(bits) < 2) continue;
      std::vector<int> s;
      for (int t = 0; t < n; ++t)
        if ((bits >> t) & 1) s.push_back(t);
      subs.push_back(s);
    }
    uint32_t tag = TermArena::get().intern_tag("h" + std::to_string(n));
    std::vector<TermId> web;
    for (int t = 0; t < n; ++t) web.push_back(t_tok(tag, t));
    std::set<std::set<std::vector<int>>> seen;
    for (uint64_t mask = 0; mask < (1ull << subs.size()); ++mask) {
      std::set<std::vector<int>> g2;
      for (size_t t = 0; t < subs.size(); ++t)
        if ((mask >> t) & 1) g2.insert(subs[t]);
      // canonicalize by permutations
      std::set<std::vector<int>> best = g2;
      for_each_permutation(n, [&](const std::vector<int>& p) {
        std::set<std::vector<int>> img;
        for (auto& s : g2) {
          std::vector<int> m;
          for (int v : s) m.push_back(p[v]);
          std::sort(m.begin(), m.end());
          img.insert(m);
        }
        if (img < best) best = img;
      });
      if (!seen.insert(best).second) continue;
      Hyper h;
      h.web = web;
      h.gamma2 = best;
      out.push_back(std::move(h));
    }
    cache.push_back(std::move(out));
  }
  return cache[k];
}

// ---- the label oracle ----

struct HCaps {
  int point_slack = 2;  // witness web size <= sum of bound sizes + slack
  int set_slack = 2;    // unfolding size <= member count + slack
};

inline HLabel h_label(const Fm& f, const HEnv& env, const std::vector<TermId>& s, Ctx& cx,
                      const HCaps& caps = {});

namespace hyper_detail {

inline std::vector<TermId> sorted_unique(std::vector<TermId> v) {
  std::sort(v.begin(), v.end(), TermLess{});
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// project a subset of pair points componentwise
inline std::vector<TermId> proj1(const std::vector<TermId>& s) {
  std::vector<TermId> out;
  for (TermId t : s) out.push_back(tnode(t).a);
  return sorted_unique(std::move(out));
}

inline std::vector<TermId> proj2(const std::vector<TermId>& s) {
  std::vector<TermId> out;
  for (TermId t : s) out.push_back(tnode(t).b);
  return sorted_unique(std::move(out));
}

// tensor clause on labels: coherent iff both projections coherent
inline HLabel tensor_label(const Fm& a, const Fm& b, const HEnv& env, const std::vector<TermId>& s,
                           Ctx& cx, const HCaps& caps) {
  HLabel l1 = h_label(a, env, proj1(s), cx, caps);
  HLabel l2 = h_label(b, env, proj2(s), cx, caps);
  return (l1 != HLabel::Plus && l2 != HLabel::Plus) ? HLabel::Minus : HLabel::Plus;
}

// Bounded unfoldings of a set of trace points (Bind terms): every witness
// hypercoherence up to the cap, every way of instantiating each member at
// least once within the size cap. Only unfoldings whose instances jointly
// cover the witness web are evaluated: a non-covering one restricts to the
// induced sub-witness, which the size loop reaches on its own. fn gets
// (witness, unfolding) and returns true to stop the search.
template <class F>
bool for_each_unfolding(const std::vector<TermId>& binds, const HCaps& caps, Ctx& cx, const F& fn) {
  int total_vars = 0;
  for (TermId b : binds) total_vars += bind_graph(b).n;
  int scap = static_cast<int>(binds.size()) + caps.set_slack;
  int wcap = std::min(total_vars + caps.point_slack, 4);
  // instances of >= 1 point per member cover at most scap * maxvars points
  for (int wn = 0; wn <= wcap; ++wn) {
    for (const Hyper& w : hypers_of_size(wn)) {
      CohSpace pr = w.pair_restriction();
      struct Inst {
        TermId term;
        uint32_t mask;  // witness points used
      };
      std::vector<std::vector<Inst>> inst(binds.size());
      bool any = true;
      for (size_t m = 0; m < binds.size() && any; ++m) {
        for (auto& emb : embeddings_into(bind_graph(binds[m]), pr)) {
          uint32_t mask = 0;
          for (int v : emb) mask |= 1u << v;
          inst[m].push_back({detail::open_bind(binds[m], pr, emb), mask});
        }
        std::sort(inst[m].begin(), inst[m].end(),
                  [](const Inst& a, const Inst& b) { return a.term < b.term; });
        inst[m].erase(std::unique(inst[m].begin(), inst[m].end(),
                                  [](const Inst& a, const Inst& b) { return a.term == b.term; }),
                      inst[m].end());
        if (inst[m].empty()) any = false;
        if (inst[m].size() > 20) throw CapError("unfolding: too many instances");
      }
      if (!any) continue;
      uint32_t full = wn == 0 ? 0 : (1u << wn) - 1;
      std::vector<TermId> chosen;
      auto rec = [&](auto&& self, size_t m, uint32_t cover) -> bool {
        if (static_cast<int>(chosen.size()) > scap) return false;
        if (m == binds.size()) {
          if (cover != full) return false;
          auto u = sorted_unique(chosen);
          cx.tick();
          return fn(w, u);
        }
        size_t k = inst[m].size();
        for (uint32_t bits = 1; bits < (1u << k); ++bits) {
          if (static_cast<int>(chosen.size()) + __builtin_popcount(bits) > scap) continue;
          size_t base = chosen.size();
          uint32_t c2 = cover;
          for (size_t t = 0; t < k; ++t)
            if ((bits >> t) & 1) {
              chosen.push_back(inst[m][t].term);
              c2 |= inst[m][t].mask;
            }
          if (self(self, m + 1, c2)) return true;
          chosen.resize(base);
        }
        return false;
      };
      if (rec(rec, 0, 0)) return true;
    }
  }
  return false;
}

}  // namespace hyper_detail

inline HLabel h_label(const Fm& f, const HEnv& env, const std::vector<TermId>& s, Ctx& cx,
                      const HCaps& caps) {
  using namespace hyper_detail;
  cx.tick();
  if (s.empty()) throw std::invalid_argument("h_label: empty subset");
  if (s.size() == 1) return HLabel::Dot;
  switch (f->conn) {
    case Conn::Var:
      return env.at(f->var).label(s);
    case Conn::DualVar:
      return hlabel_flip(env.at(f->var).label(s));
    case Conn::One:
    case Conn::Bot:
      throw std::logic_error("h_label: several points in a unit web");
    case Conn::Zero:
    case Conn::Top:
      throw std::logic_error("h_label: points in an empty web");
    case Conn::Tensor:
      return tensor_label(f->a, f->b, env, s, cx, caps);
    case Conn::Par:
      return hlabel_flip(tensor_label(cached_dual(f->a), cached_dual(f->b), env, s, cx, caps));
    case Conn::Plus: {
      bool l = false, r = false;
      for (TermId t : s) (tnode(t).kind == TK::Inl ? l : r) = true;
      if (l && r) return HLabel::Plus;
      std::vector<TermId> strip;
      for (TermId t : s) strip.push_back(tnode(t).a);
      return h_label(l ? f->a : f->b, env, sorted_unique(std::move(strip)), cx, caps);
    }
    case Conn::With: {
      bool l = false, r = false;
      for (TermId t : s) (tnode(t).kind == TK::Inl ? l : r) = true;
      if (l && r) return HLabel::Minus;
      std::vector<TermId> strip;
      for (TermId t : s) strip.push_back(tnode(t).a);
      return h_label(l ? f->a : f->b, env, sorted_unique(std::move(strip)), cx, caps);
    }
    case Conn::Bang: {
      // coherent iff the union of the cliques is a clique
      std::vector<TermId> uni;
      for (TermId t : s) {
        auto es = bang_elems(t);
        uni.insert(uni.end(), es.begin(), es.end());
      }
      uni = sorted_unique(std::move(uni));
      if (uni.size() > 16) throw CapError("h_label: bang union too large");
      for (uint32_t bits = 1; bits < (1u << uni.size()); ++bits) {
        if (__builtin_popcount(bits) < 2) continue;
        std::vector<TermId> sub;
        for (size_t t = 0; t < uni.size(); ++t)
          if ((bits >> t) & 1) sub.push_back(uni[t]);
        if (h_label(f->a, {}, sub, cx, caps) == HLabel::Plus) return HLabel::Plus;
      }
      return HLabel::Minus;
    }
    case Conn::Quest: {
      Fm d = cached_dual(f->a);
      std::vector<TermId> uni;
      for (TermId t : s) {
        auto es = bang_elems(t);
        uni.insert(uni.end(), es.begin(), es.end());
      }
      uni = sorted_unique(std::move(uni));
      if (uni.size() > 16) throw CapError("h_label: quest union too large");
      for (uint32_t bits = 1; bits < (1u << uni.size()); ++bits) {
        if (__builtin_popcount(bits) < 2) continue;
        std::vector<TermId> sub;
        for (size_t t = 0; t < uni.size(); ++t)
          if ((bits >> t) & 1) sub.push_back(uni[t]);
        if (h_label(d, {}, sub, cx, caps) == HLabel::Plus) return HLabel::Minus;
      }
      return HLabel::Plus;
    }
    case Conn::Forall: {
      // coherent iff no bounded unfolding is strictly incoherent
      bool bad = hyper_detail::for_each_unfolding(s, caps, cx, [&](const Hyper& w,
                                                                   const std::vector<TermId>& u) {
        if (u.size() < 2) return false;
        HEnv env2 = env;
        env2[f->var] = w;
        return h_label(f->a, env2, u, cx, caps) == HLabel::Plus;
      });
      return bad ? HLabel::Plus : HLabel::Minus;
    }
    case Conn::Exists: {
      Fm body_dual = cached_dual(f->a);
      bool good = hyper_detail::for_each_unfolding(s, caps, cx, [&](const Hyper& w,
                                                                    const std::vector<TermId>& u) {
        if (u.size() < 2) return false;
        HEnv env2 = env;
        env2[f->var] = w;
        return h_label(body_dual, env2, u, cx, caps) == HLabel::Plus;
      });
      // dual of the forall over the dual body
      return good ? HLabel::Minus : HLabel::Plus;
    }
  }
  throw std::logic_error("h_label: bad conn");
}

// ---- the oracle: materialize web and coherent subsets ----

inline Hyper h_gamma_oracle(const Fm& f0, const HEnv& env, Ctx& cx, const HCaps& caps = {},
                            size_t subset_cap = 1u << 14) {
  Fm f = barendregt_formula(f0);
  // webs agree with the coherence model over the pair restrictions of the
  // environment (checked by the web-agreement battery; quantifier webs are
  // re-filtered by hyper self-coherence below)
  Env coh_env;
  for (auto& [name, h] : env) coh_env[name] = h.pair_restriction();

  std::function<Hyper(const Fm&)> eval = [&](const Fm& g) -> Hyper {
    Hyper out;
    switch (g->conn) {
      case Conn::Forall:
      case Conn::Exists: {
        Fm body_for_membership = g->conn == Conn::Forall ? g->a : cached_dual(g->a);
        std::vector<std::string> slot = {g->var};
        auto nfs = denote_nfs(g->a, coh_env, slot, cx);
        for (auto& nf : nfs) {
          TermId cand = canonical_point(t_bind(nf.slots[0], nf.comps[0]));
          // singleton unfoldings must all be coherent
          bool bad = hyper_detail::for_each_unfolding(
              {cand}, caps, cx, [&](const Hyper& w, const std::vector<TermId>& u) {
                if (u.size() < 2) return false;
                HEnv env2 = env;
                env2[g->var] = w;
                return h_label(body_for_membership, env2, u, cx, caps) == HLabel::Plus;
              });
          if (!bad) out.web.push_back(cand);
        }
        std::sort(out.web.begin(), out.web.end(), TermLess{});
        break;
      }
      default: {
        CohSpace s = eval_space(g, coh_env, cx);
        out.web = s.web;
        break;
      }
    }
    size_t n = out.web.size();
    if (n > 20) throw CapError("h_gamma_oracle: web too large");
    uint64_t total = n ? (1ull << n) : 1;
    if (total > subset_cap) throw CapError("h_gamma_oracle: subset count cap");
    for (uint64_t bits = 1; bits < total; ++bits) {
      if (__builtin_popcountll(bits) < 2) continue;
      std::vector<TermId> sub;
      std::vector<int> idx;
      for (size_t t = 0; t < n; ++t)
        if ((bits >> t) & 1) {
          sub.push_back(out.web[t]);
          idx.push_back(static_cast<int>(t));
        }
      if (h_label(g, env, sub, cx, caps) == HLabel::Minus) out.gamma2.insert(idx);
    }
    return out;
  };
  return eval(f);
}

// ---- specifications by projections ----

// A projection from P picks, for every normal form, a point of its slot-k
// bound space; valuations assign labels to projections of every slot.
struct Projection {
  int slot;
  std::vector<int> choice;  // aligned with the P order

  bool operator<(const Projection& o) const {
    return std::tie(slot, choice) < std::tie(o.slot, o.choice);
  }
  bool operator==(const Projection& o) const { return slot == o.slot && choice == o.choice; }
};

inline std::vector<Projection> projections_of(const std::vector<NormalForm>& p, int slot) {
  std::vector<Projection> out;
  std::vector<int> sizes;
  for (auto& nf : p) {
    if (nf.slots[slot].n == 0) return {};  // empty dependent product
    sizes.push_back(nf.slots[slot].n);
  }
  std::vector<int> pick(p.size(), 0);
  for (;;) {
    out.push_back(Projection{slot, pick});
    int t = 0;
    for (; t < static_cast<int>(p.size()); ++t) {
      if (++pick[t] < sizes[t]) break;
      pick[t] = 0;
    }
    if (t == static_cast<int>(p.size()) || p.empty()) break;
  }
  return out;
}

inline std::vector<Projection> all_projections(const std::vector<NormalForm>& p, int arity) {
  std::vector<Projection> out;
  for (int s = 0; s < arity; ++s) {
    auto ps = projections_of(p, s);
    out.insert(out.end(), ps.begin(), ps.end());
  }
  return out;
}

using Valuation = std::map<Projection, HLabel>;

namespace hyper_detail {

inline std::string dump_nf(const NormalForm& nf) {
  std::string s;
  for (auto& g : nf.slots) s += g.dump() + "/";
  for (TermId c : nf.comps) s += show_term(c, nf.arity()) + ";";
  return s;
}

inline std::string dump_p(const std::vector<NormalForm>& p) {
  std::string s;
  for (auto& nf : p) s += dump_nf(nf) + "|";
  return s;
}

inline std::string dump_val(const Valuation& v) {
  std::string s;
  for (auto& [f, l] : v) {
    s += std::to_string(f.slot) + ":";
    for (int c : f.choice) s += std::to_string(c) + ",";
    s += hlabel_char(l);
    s += " ";
  }
  return s;
}

// per-slot variable bijection a -> b respecting graphs and terms
inline std::optional<std::vector<std::vector<int>>> find_iso(const NormalForm& a,
                                                             const NormalForm& b) {
  int n = a.arity();
  if (b.arity() != n || a.comps.size() != b.comps.size()) return std::nullopt;
  for (int s = 0; s < n; ++s)
    if (a.slots[s].n != b.slots[s].n) return std::nullopt;
  std::vector<std::vector<std::vector<int>>> perms(n);
  for (int s = 0; s < n; ++s) {
    for (auto& e : graph_embeddings(a.slots[s], b.slots[s])) perms[s].push_back(e);
    if (perms[s].empty() && a.slots[s].n > 0) return std::nullopt;
    if (perms[s].empty()) perms[s].push_back({});
  }
  std::vector<size_t> pick(n, 0);
  for (;;) {
    std::vector<std::vector<int>> m(n);
    for (int s = 0; s < n; ++s) m[s] = perms[s][pick[s]];
    bool ok = true;
    for (size_t c = 0; c < a.comps.size() && ok; ++c) {
      TermId mapped = map_vars(a.comps[c], [&](uint32_t level, uint32_t idx) -> TermId {
        if (static_cast<int>(level) < n) return t_var(level, m[level][idx]);
        return kNoTerm;
      });
      ok = mapped == b.comps[c];
    }
    if (ok) return m;
    int s = 0;
    for (; s < n; ++s) {
      if (++pick[s] < perms[s].size()) break;
      pick[s] = 0;
    }
    if (s == n || n == 0) break;
  }
  return std::nullopt;
}

// split a pair pattern into one side's sub-pattern plus, per slot, the map
// from sub-pattern variable indices to parent indices
struct SplitPart {
  NormalForm nf;
  std::vector<std::vector<int>> parent_index;  // per slot
};

inline SplitPart split_component(const NormalForm& parent, TermId part) {
  int n = parent.arity();
  SplitPart out;
  out.parent_index.assign(n, {});
  std::vector<std::vector<int>> rank(n);
  for (int s = 0; s < n; ++s) rank[s].assign(parent.slots[s].n, -1);
  for_each_var(part, [&](uint32_t level, uint32_t idx) {
    if (static_cast<int>(level) >= n) return;
    if (rank[level][idx] < 0) {
      rank[level][idx] = static_cast<int>(out.parent_index[level].size());
      out.parent_index[level].push_back(idx);
    }
  });
  out.nf.slots.resize(n);
  for (int s = 0; s < n; ++s) out.nf.slots[s] = parent.slots[s].induced(out.parent_index[s]);
  out.nf.comps = {map_vars(part, [&](uint32_t level, uint32_t idx) -> TermId {
    if (static_cast<int>(level) >= n) return kNoTerm;
    return t_var(level, rank[level][idx]);
  })};
  return out;
}

}  // namespace hyper_detail

// Memo and caps for the sigma machinery; the `rows` map is the lazily
// materialized specification table.
struct SigmaCtx {
  HCaps caps;
  std::map<std::string, HLabel> rows;
  std::map<std::string, std::set<Valuation>> pval_memo;
  size_t row_count() const { return rows.size(); }
};

// The bounded realization search behind the possibility criterion: which
// valuations on P does some witness instantiation realize? Depends only on
// P (no ambient functor data is consulted).
inline std::set<Valuation> possible_valuations(const std::vector<NormalForm>& p, int arity, Ctx& cx,
                                               SigmaCtx& sx) {
  std::string key = std::to_string(arity) + "#" + hyper_detail::dump_p(p);
  auto hit = sx.pval_memo.find(key);
  if (hit != sx.pval_memo.end()) return hit->second;
  std::set<Valuation> out;
  auto projs = all_projections(p, arity);
  // per-slot witness size caps
  std::vector<int> cap(arity, 0);
  for (int s = 0; s < arity; ++s) {
    int total = 0;
    for (auto& nf : p) total += nf.slots[s].n;
    cap[s] = std::min(total + sx.caps.point_slack, 4);
  }
  int scap = static_cast<int>(p.size()) + sx.caps.set_slack;
  // enumerate witness tuples
  std::vector<size_t> wpick(arity, 0);
  std::vector<std::vector<Hyper>> wchoices(arity);
  for (int s = 0; s < arity; ++s)
    for (int k = 0; k <= cap[s]; ++k)
      for (auto& h : hypers_of_size(k)) wchoices[s].push_back(h);
  for (;;) {
    cx.tick();
    std::vector<const Hyper*> ws(arity);
    std::vector<CohSpace> pr(arity);
    for (int s = 0; s < arity; ++s) {
      ws[s] = &wchoices[s][wpick[s]];
      pr[s] = ws[s]->pair_restriction();
    }
    // instances of each member with their embeddings
    struct Inst {
      std::vector<std::vector<int>> embs;
    };
    std::vector<std::vector<Inst>> inst(p.size());
    bool feasible = true;
    for (size_t m = 0; m < p.size() && feasible; ++m) {
      std::vector<std::vector<std::vector<int>>> per_slot(arity);
      for (int s = 0; s < arity && feasible; ++s) {
        per_slot[s] = embeddings_into(p[m].slots[s], pr[s]);
        if (per_slot[s].empty()) feasible = false;
      }
      if (!feasible) break;
      std::vector<size_t> pick(arity, 0);
      for (;;) {
        Inst in;
        in.embs.resize(arity);
        for (int s = 0; s < arity; ++s) in.embs[s] = per_slot[s][pick[s]];
        inst[m].push_back(std::move(in));
        if (inst[m].size() > 24) throw CapError("possible_valuations: instance blowup");
        int s = 0;
        for (; s < arity; ++s) {
          if (++pick[s] < per_slot[s].size()) break;
          pick[s] = 0;
        }
        if (s == arity || arity == 0) break;
      }
    }
    if (feasible) {
      // choose a nonempty subset of instances per member (total bounded);
      // instances must jointly cover every witness point, else the same
      // valuation arises from the induced sub-witness
      std::vector<uint32_t> full(arity, 0);
      for (int s = 0; s < arity; ++s)
        full[s] = pr[s].size() ? (1u << pr[s].size()) - 1 : 0;
      std::vector<std::vector<const Inst*>> chosen(p.size());
      auto emit = [&]() {
        size_t total = 0;
        for (auto& c : chosen) total += c.size();
        if (static_cast<int>(total) > scap) return;
        for (int s = 0; s < arity; ++s) {
          uint32_t cover = 0;
          for (auto& c : chosen)
            for (const Inst* in : c)
              for (int v : in->embs[s]) cover |= 1u << v;
          if (cover != full[s]) return;
        }
        Valuation v;
        for (auto& f : projs) {
          std::set<int> image;  // web indices in the witness of f.slot
          for (size_t m = 0; m < p.size(); ++m)
            for (const Inst* in : chosen[m]) image.insert(in->embs[f.slot][f.choice[m]]);
          v[f] = ws[f.slot]->label_idx(std::vector<int>(image.begin(), image.end()));
        }
        out.insert(std::move(v));
      };
      auto rec = [&](auto&& self, size_t m) -> void {
        if (m == p.size()) {
          emit();
          return;
        }
        size_t k = inst[m].size();
        for (uint32_t bits = 1; bits < (1u << k); ++bits) {
          if (__builtin_popcount(bits) > scap) continue;
          chosen[m].clear();
          for (size_t t = 0; t < k; ++t)
            if ((bits >> t) & 1) chosen[m].push_back(&inst[m][t]);
          self(self, m + 1);
        }
        chosen[m].clear();
      };
      cx.tick(p.size());
      rec(rec, 0);
    }
    int s = 0;
    for (; s < arity; ++s) {
      if (++wpick[s] < wchoices[s].size()) break;
      wpick[s] = 0;
    }
    if (s == arity || arity == 0) break;
  }
  sx.pval_memo.emplace(std::move(key), out);
  return out;
}

// ---- sigma: label evaluation over the normal-form presentation ----

inline HLabel sigma_eval(const Fm& f, int arity, const std::vector<NormalForm>& p,
                         const Valuation& v, Ctx& cx, SigmaCtx& sx);

namespace hyper_detail {

inline bool sigma_singleton(const std::vector<NormalForm>& p, const Valuation& v) {
  if (p.size() != 1) return false;
  for (auto& [f, l] : v)
    if (l != HLabel::Dot) return false;
  return true;
}

}  // namespace hyper_detail

inline HLabel sigma_eval(const Fm& f, int arity, const std::vector<NormalForm>& p,
                         const Valuation& v, Ctx& cx, SigmaCtx& sx) {
  using namespace hyper_detail;
  cx.tick();
  if (sigma_singleton(p, v)) return HLabel::Dot;
  std::string key = alpha_key(f) + "#" + dump_p(p) + "#" + dump_val(v);
  auto hit = sx.rows.find(key);
  if (hit != sx.rows.end()) return hit->second;
  HLabel res;
  if (is_closed(f)) {
    // constant functor: the subset is readable off the patterns
    std::vector<TermId> pts;
    for (auto& nf : p) pts.push_back(nf.comps[0]);
    pts = sorted_unique(std::move(pts));
    res = h_label(f, {}, pts, cx, sx.caps);
  } else {
    switch (f->conn) {
      case Conn::Var:
      case Conn::DualVar: {
        // the identity functor on one slot: the image of the unique
        // projection is the subset itself
        Projection probe;
        bool found = false;
        for (auto& [g, l] : v) {
          probe = g;
          found = true;
          (void)l;
        }
        if (!found) throw std::logic_error("sigma: variable pattern without projections");
        HLabel l = v.at(probe);
        res = f->conn == Conn::Var ? l : hlabel_flip(l);
        break;
      }
      case Conn::Tensor:
      case Conn::Par: {
        bool par = f->conn == Conn::Par;
        Fm fa = par ? cached_dual(f->a) : f->a;
        Fm fb = par ? cached_dual(f->b) : f->b;
        // split every member, dedupe components, push the valuation
        auto side = [&](bool left) -> HLabel {
          std::vector<SplitPart> parts;
          for (auto& nf : p) {
            const TermNode& t = tnode(nf.comps[0]);
            parts.push_back(split_component(nf, left ? t.a : t.b));
          }
          std::vector<NormalForm> q;            // deduped component patterns
          std::vector<int> rep(parts.size());   // member -> index into q
          std::vector<std::vector<std::vector<int>>> iso(parts.size());  // q-var -> part-var
          for (size_t m = 0; m < parts.size(); ++m) {
            int found = -1;
            for (size_t r = 0; r < q.size() && found < 0; ++r) {
              auto i = find_iso(q[r], parts[m].nf);
              if (i) {
                found = static_cast<int>(r);
                iso[m] = *i;
              }
            }
            if (found < 0) {
              found = static_cast<int>(q.size());
              q.push_back(parts[m].nf);
              iso[m].resize(arity);
              for (int s = 0; s < arity; ++s) {
                iso[m][s].resize(parts[m].nf.slots[s].n);
                std::iota(iso[m][s].begin(), iso[m][s].end(), 0);
              }
            }
            rep[m] = found;
          }
          Valuation vq;
          for (auto& fq : all_projections(q, arity)) {
            Projection g;
            g.slot = fq.slot;
            g.choice.resize(p.size());
            for (size_t m = 0; m < p.size(); ++m) {
              int qvar = fq.choice[rep[m]];
              int pvar = parts[m].parent_index[fq.slot][iso[m][fq.slot][qvar]];
              g.choice[m] = pvar;
            }
            vq[fq] = v.at(g);
          }
          return sigma_eval(left ? fa : fb, arity, q, vq, cx, sx);
        };
        HLabel l1 = side(true);
        HLabel l2 = side(false);
        HLabel tens = (l1 != HLabel::Plus && l2 != HLabel::Plus) ? HLabel::Minus : HLabel::Plus;
        res = par ? hlabel_flip(tens) : tens;
        break;
      }
      case Conn::Plus:
      case Conn::With: {
        bool l = false, r = false;
        for (auto& nf : p) (tnode(nf.comps[0]).kind == TK::Inl ? l : r) = true;
        if (l && r) {
          res = f->conn == Conn::Plus ? HLabel::Plus : HLabel::Minus;
          break;
        }
        std::vector<NormalForm> q;
        for (auto& nf : p) {
          NormalForm m = nf;
          m.comps = {tnode(nf.comps[0]).a};
          q.push_back(std::move(m));
        }
        // same variables, same projections
        res = sigma_eval(l ? f->a : f->b, arity, q, v, cx, sx);
        break;
      }
      case Conn::Forall:
      case Conn::Exists: {
        bool fa = f->conn == Conn::Forall;
        Fm body = fa ? f->a : cached_dual(f->a);
        // unbind: the bound space becomes a fresh final slot
        std::vector<NormalForm> u;
        for (auto& nf : p) {
          NormalForm m;
          m.slots = nf.slots;
          m.slots.push_back(bind_graph(nf.comps[0]));
          m.comps = {bind_body(nf.comps[0])};
          u.push_back(std::move(m));
        }
        auto pv = possible_valuations(u, arity + 1, cx, sx);
        bool some_plus = false;
        for (auto& ve : pv) {
          // compatible: outer-slot projections agree with v
          bool compat = true;
          for (auto& [g, l] : v) {
            auto it = ve.find(g);
            if (it == ve.end() || it->second != l) { compat = false; break; }
          }
          if (!compat) continue;
          if (sigma_eval(body, arity + 1, u, ve, cx, sx) == HLabel::Plus) {
            some_plus = true;
            break;
          }
        }
        HLabel inner = some_plus ? HLabel::Plus : HLabel::Minus;
        res = fa ? inner : hlabel_flip(inner);
        break;
      }
      default:
        throw std::logic_error("sigma_eval: unexpected connective");
    }
  }
  sx.rows.emplace(std::move(key), res);
  return res;
}

// recover the (unique) embedding tuple realizing `pt` as an instance of nf
inline std::optional<std::vector<std::vector<int>>> recover_embedding(
    const NormalForm& nf, const std::vector<const CohSpace*>& spaces, TermId pt) {
  std::optional<std::vector<std::vector<int>>> found;
  for_each_instance(nf, spaces, [&](const std::vector<TermId>& row,
                                    const std::vector<std::vector<int>>& embs) {
    if (!found && row[0] == pt) found = embs;
  });
  return found;
}

// Label a concrete subset through the sigma route: abstract the points,
// read the projection labels off the arguments, evaluate the table.
inline HLabel sigma_label(const Fm& f, const std::vector<std::string>& slots,
                          const std::vector<const Hyper*>& args, const std::vector<TermId>& s,
                          Ctx& cx, SigmaCtx& sx) {
  if (s.size() == 1) return HLabel::Dot;
  int arity = static_cast<int>(slots.size());
  std::vector<CohSpace> pr;
  std::vector<const CohSpace*> prp;
  std::vector<uint32_t> tags;
  for (auto* h : args) {
    pr.push_back(h->pair_restriction());
  }
  for (auto& c : pr) {
    prp.push_back(&c);
    tags.push_back(c.web.empty() ? 0xffffffffu : tnode(c.web[0]).a);
  }
  // abstract points into canonical patterns
  std::vector<NormalForm> p;
  std::vector<int> member_of;  // per point
  std::vector<std::vector<std::vector<int>>> emb_of;
  for (TermId pt : s) {
    NormalForm nf = nf_of_row({pt}, prp, tags);
    int idx = -1;
    for (size_t r = 0; r < p.size(); ++r)
      if (p[r] == nf) idx = static_cast<int>(r);
    if (idx < 0) {
      idx = static_cast<int>(p.size());
      p.push_back(nf);
    }
    member_of.push_back(idx);
    auto emb = recover_embedding(p[idx], prp, pt);
    if (!emb) throw std::logic_error("sigma_label: embedding recovery failed");
    emb_of.push_back(*emb);
  }
  Valuation v;
  for (auto& f2 : all_projections(p, arity)) {
    std::set<int> image;
    for (size_t t = 0; t < s.size(); ++t)
      image.insert(emb_of[t][f2.slot][f2.choice[member_of[t]]]);
    v[f2] = args[f2.slot]->label_idx(std::vector<int>(image.begin(), image.end()));
  }
  return sigma_eval(f, arity, p, v, cx, sx);
}

}  // namespace ll2
