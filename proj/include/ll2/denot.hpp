#pragma once

// Formula denotations in the coherence-space model, through their
// combinatorial presentation: the set of normal forms of the induced normal
// functor, with the (non-reflexive) trace coherence decided by a bounded
// search over amalgams of bound spaces.
//
// Terms live in two frames. Normal forms with n slots use variable levels
// 0..n-1 for the slots; fully instantiated points sit in "frame 0", where
// binder levels are path positions. point_coherent works on frame-0 points.

#include <cassert>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ll2/cohspace.hpp"
#include "ll2/formula.hpp"
#include "ll2/normfun.hpp"

namespace ll2 {

struct CapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Caps {
  uint64_t max_web = 1u << 20;      // largest materialized web
  uint64_t max_cliques = 1u << 20;  // clique enumeration bound
  int max_bound_space = 12;         // widest bound space a gluing may build
  uint64_t max_rows = 60u << 20;    // proof-denotation working set
  uint64_t fuel = 40'000'000;       // coherence-search step budget
  int hyper_point_slack = 2;        // witness web size slack (Lemma-spec caps)
  int hyper_set_slack = 2;          // witness subset size slack
};

struct Ctx {
  Caps caps;
  uint64_t work = 0;
  std::map<std::string, CohSpace> space_memo;
  int fresh = 0;

  void tick(uint64_t n = 1) {
    work += n;
    if (work > caps.fuel) throw CapError("fuel exhausted");
  }

  std::string fresh_tag(const char* prefix) { return std::string(prefix) + std::to_string(fresh++); }
};

using Env = std::map<std::string, CohSpace>;

inline Fm cached_dual(const Fm& f) {
  static std::mutex mu;
  // the cache pins its keys: node addresses stay valid and unique
  static std::map<const Formula*, std::pair<Fm, Fm>> memo;
  std::lock_guard<std::mutex> lk(mu);
  auto it = memo.find(f.get());
  if (it != memo.end()) return it->second.second;
  Fm d = dual(f);
  memo.emplace(f.get(), std::make_pair(f, d));
  return d;
}

// ---- coherence of instantiated points, by structural recursion ----

inline bool point_coherent(const Fm& f, const Env& env, TermId p, TermId q, Ctx& cx);

namespace detail {

// Instantiate the outermost Bind of a frame-0 point at `space` along the
// vertex map `asg`; deeper binder levels shift down by one.
inline TermId open_bind(TermId bindterm, const CohSpace& space, const std::vector<int>& asg) {
  return canonical_point(map_vars(bind_body(bindterm), [&](uint32_t level, uint32_t idx) -> TermId {
    if (level == 0) return space.web[asg[idx]];
    return t_var(level - 1, idx);
  }));
}

}  // namespace detail

inline bool point_coherent(const Fm& f, const Env& env, TermId p, TermId q, Ctx& cx) {
  cx.tick();
  if (p == q) return true;  // webs are reflexive
  switch (f->conn) {
    case Conn::Var: {
      const CohSpace& s = env.at(f->var);
      return s.coherent_t(p, q);
    }
    case Conn::DualVar: {
      const CohSpace& s = env.at(f->var);
      return !s.coherent_t(p, q);  // p != q here
    }
    case Conn::One:
    case Conn::Bot:
      return true;
    case Conn::Zero:
    case Conn::Top:
      throw std::logic_error("point_coherent: empty web has no points");
    case Conn::Tensor: {
      const TermNode& np = tnode(p);
      const TermNode& nq = tnode(q);
      return point_coherent(f->a, env, np.a, nq.a, cx) && point_coherent(f->b, env, np.b, nq.b, cx);
    }
    case Conn::Par: {
      const TermNode& np = tnode(p);
      const TermNode& nq = tnode(q);
      return !(point_coherent(cached_dual(f->a), env, np.a, nq.a, cx) &&
               point_coherent(cached_dual(f->b), env, np.b, nq.b, cx));
    }
    case Conn::Plus: {
      const TermNode& np = tnode(p);
      const TermNode& nq = tnode(q);
      if (np.kind != nq.kind) return false;
      return point_coherent(np.kind == TK::Inl ? f->a : f->b, env, np.a, nq.a, cx);
    }
    case Conn::With: {
      const TermNode& np = tnode(p);
      const TermNode& nq = tnode(q);
      if (np.kind != nq.kind) return true;
      return point_coherent(np.kind == TK::Inl ? f->a : f->b, env, np.a, nq.a, cx);
    }
    case Conn::Bang: {
      for (TermId u : bang_elems(p))
        for (TermId v : bang_elems(q))
          if (!point_coherent(f->a, env, u, v, cx)) return false;
      return true;
    }
    case Conn::Quest: {
      Fm d = cached_dual(f->a);
      for (TermId u : bang_elems(p))
        for (TermId v : bang_elems(q))
          if (!point_coherent(d, env, u, v, cx)) return true;
      return false;
    }
    case Conn::Forall: {
      // coherent iff every pair of instantiations is coherent in the body
      const Graph& gp = bind_graph(p);
      const Graph& gq = bind_graph(q);
      for (const Amalgam& am : graph_amalgams(gp, gq)) {
        CohSpace w = space_from_graph(am.w, cx.fresh_tag("w"));
        Env env2 = env;
        env2[f->var] = w;
        TermId tp = detail::open_bind(p, w, am.left);
        TermId tq = detail::open_bind(q, w, am.right);
        if (!point_coherent(f->a, env2, tp, tq, cx)) return false;
      }
      return true;
    }
    case Conn::Exists: {
      // strictly coherent iff some instantiation makes the bodies distinct
      // and coherent in the (un-dualized) body
      Fm body_dual = cached_dual(f->a);
      const Graph& gp = bind_graph(p);
      const Graph& gq = bind_graph(q);
      for (const Amalgam& am : graph_amalgams(gp, gq)) {
        CohSpace w = space_from_graph(am.w, cx.fresh_tag("w"));
        Env env2 = env;
        env2[f->var] = w;
        TermId tp = detail::open_bind(p, w, am.left);
        TermId tq = detail::open_bind(q, w, am.right);
        if (tp != tq && point_coherent(body_dual, env2, tp, tq, cx)) return true;
      }
      return false;
    }
  }
  throw std::logic_error("point_coherent: bad conn");
}

// Sequent-level coherence: the par of the component formulas.
inline bool row_coherent(const std::vector<Fm>& seq, const Env& env, const std::vector<TermId>& a,
                         const std::vector<TermId>& b, Ctx& cx) {
  if (a == b) return true;
  for (size_t i = 0; i < seq.size(); ++i)
    if (!point_coherent(cached_dual(seq[i]), env, a[i], b[i], cx)) return true;
  return false;
}

// ---- compositional normal-form enumeration ----

std::vector<NormalForm> denote_nfs(const Fm& f, const Env& env, const std::vector<std::string>& slots,
                                   Ctx& cx);

inline CohSpace eval_space(const Fm& f, const Env& env, Ctx& cx);

namespace detail {

// Per-slot generic spaces of a normal form: the bound spaces themselves.
// Coherence of instances is invariant under embeddings, so checking at this
// minimal instantiation covers every instantiation.
inline std::vector<CohSpace> generic_spaces(const NormalForm& nf, Ctx& cx) {
  std::vector<CohSpace> out;
  for (auto& g : nf.slots) out.push_back(space_from_graph(g, cx.fresh_tag("g")));
  return out;
}

inline std::vector<std::vector<int>> identity_embs(const NormalForm& nf) {
  std::vector<std::vector<int>> out;
  for (auto& g : nf.slots) {
    std::vector<int> id(g.n);
    std::iota(id.begin(), id.end(), 0);
    out.push_back(id);
  }
  return out;
}

// Does the final slot of `sub` give a web point of the quantified formula?
// `body` is the quantifier body for the forall web, its dual for exists.
inline bool self_coherent_last(const Fm& body, const Env& env, const std::vector<std::string>& slots,
                               const NormalForm& sub, Ctx& cx) {
  int n = sub.arity() - 1;
  auto gens = generic_spaces(sub, cx);
  Env env2 = env;
  for (int s = 0; s < n; ++s) env2[slots[s]] = gens[s];
  const Graph& g = sub.slots[n];
  for (const Amalgam& am : graph_amalgams(g, g)) {
    CohSpace w = space_from_graph(am.w, cx.fresh_tag("w"));
    env2[slots[n]] = w;
    std::vector<const CohSpace*> sp;
    for (int s = 0; s < n; ++s) sp.push_back(&gens[s]);
    sp.push_back(&w);
    auto embs = identity_embs(sub);
    embs[n] = am.left;
    auto r1 = instantiate_nf(sub, sp, embs);
    embs[n] = am.right;
    auto r2 = instantiate_nf(sub, sp, embs);
    if (!point_coherent(body, env2, r1[0], r2[0], cx)) return false;
  }
  return true;
}

// All gluings of two normal forms over the same slot frame: per slot an
// amalgam of the bound spaces, the right term remapped into it.
template <class Combine>
void glue_nfs(const NormalForm& n1, const NormalForm& n2, Ctx& cx, const Combine& fn) {
  int n = n1.arity();
  assert(n2.arity() == n);
  std::vector<std::vector<Amalgam>> choices(n);
  for (int s = 0; s < n; ++s) {
    if (n1.slots[s].n + n2.slots[s].n > cx.caps.max_bound_space)
      throw CapError("bound space cap exceeded while gluing");
    choices[s] = graph_amalgams(n1.slots[s], n2.slots[s]);
    if (choices[s].empty()) throw CapError("amalgam cap exceeded while gluing");
  }
  std::vector<size_t> pick(n, 0);
  for (;;) {
    cx.tick();
    NormalForm out;
    out.slots.resize(n);
    std::vector<const Amalgam*> ams(n);
    for (int s = 0; s < n; ++s) {
      ams[s] = &choices[s][pick[s]];
      out.slots[s] = ams[s]->w;
    }
    // left embeds by identity; remap the right comps
    std::vector<TermId> right;
    for (TermId c : n2.comps)
      right.push_back(map_vars(c, [&](uint32_t level, uint32_t idx) -> TermId {
        if (static_cast<int>(level) < n) return t_var(level, ams[level]->right[idx]);
        return kNoTerm;
      }));
    fn(out.slots, n1.comps, right);
    int s = 0;
    for (; s < n; ++s) {
      if (++pick[s] < choices[s].size()) break;
      pick[s] = 0;
    }
    if (s == n || n == 0) break;
  }
}

}  // namespace detail

inline std::vector<NormalForm> denote_nfs(const Fm& f, const Env& env,
                                          const std::vector<std::string>& slots, Ctx& cx) {
  int n = static_cast<int>(slots.size());
  auto slot_index = [&](const std::string& x) -> int {
    for (int i = 0; i < n; ++i)
      if (slots[i] == x) return i;
    return -1;
  };
  std::vector<NormalForm> out;
  switch (f->conn) {
    case Conn::Var:
    case Conn::DualVar: {
      int k = slot_index(f->var);
      if (k >= 0) {
        NormalForm nf;
        nf.slots.assign(n, Graph::empty());
        nf.slots[k] = Graph::singleton();
        nf.comps = {t_var(k, 0)};
        out.push_back(nf);
      } else {
        auto it = env.find(f->var);
        if (it == env.end()) throw std::invalid_argument("denote: unbound variable " + f->var);
        for (TermId t : it->second.web) {
          NormalForm nf;
          nf.slots.assign(n, Graph::empty());
          nf.comps = {t};
          out.push_back(nf);
        }
      }
      return out;
    }
    case Conn::One:
    case Conn::Bot: {
      NormalForm nf;
      nf.slots.assign(n, Graph::empty());
      nf.comps = {t_unit()};
      out.push_back(nf);
      return out;
    }
    case Conn::Zero:
    case Conn::Top:
      return out;
    case Conn::Tensor:
    case Conn::Par: {
      auto l = denote_nfs(f->a, env, slots, cx);
      auto r = denote_nfs(f->b, env, slots, cx);
      for (auto& n1 : l)
        for (auto& n2 : r)
          detail::glue_nfs(n1, n2, cx, [&](const std::vector<Graph>& gs, const std::vector<TermId>& c1,
                                           const std::vector<TermId>& c2) {
            NormalForm nf;
            nf.slots = gs;
            nf.comps = {t_pair(c1[0], c2[0])};
            out.push_back(canonicalize(nf));
            if (out.size() > cx.caps.max_web) throw CapError("normal form cap exceeded");
          });
      sort_unique(out);
      return out;
    }
    case Conn::Plus:
    case Conn::With: {
      for (auto& nf : denote_nfs(f->a, env, slots, cx)) {
        NormalForm m = nf;
        m.comps = {t_inl(nf.comps[0])};
        out.push_back(m);
      }
      for (auto& nf : denote_nfs(f->b, env, slots, cx)) {
        NormalForm m = nf;
        m.comps = {t_inr(nf.comps[0])};
        out.push_back(m);
      }
      sort_unique(out);
      return out;
    }
    case Conn::Bang:
    case Conn::Quest: {
      if (!is_closed(f->a))
        throw std::invalid_argument("denote: open exponential (fincoh condition violated)");
      Fm base = f->conn == Conn::Bang ? f->a : cached_dual(f->a);
      CohSpace s = eval_space(base, {}, cx);
      for (auto& c : enumerate_cliques(s, cx.caps.max_cliques)) {
        NormalForm nf;
        nf.slots.assign(n, Graph::empty());
        nf.comps = {t_bang(c)};
        out.push_back(nf);
      }
      sort_unique(out);
      return out;
    }
    case Conn::Forall:
    case Conn::Exists: {
      auto sub_slots = slots;
      sub_slots.push_back(f->var);
      if (slot_index(f->var) >= 0 || env.count(f->var))
        throw std::invalid_argument("denote: shadowed binder " + f->var + " (rename apart first)");
      Fm body = f->conn == Conn::Forall ? f->a : cached_dual(f->a);
      for (auto& sub : denote_nfs(f->a, env, sub_slots, cx)) {
        if (!detail::self_coherent_last(body, env, sub_slots, sub, cx)) continue;
        NormalForm nf;
        nf.slots.assign(sub.slots.begin(), sub.slots.end() - 1);
        nf.comps = {t_bind(sub.slots.back(), sub.comps[0])};
        out.push_back(canonicalize(nf));
      }
      sort_unique(out);
      return out;
    }
  }
  throw std::logic_error("denote_nfs: bad conn");
}

inline CohSpace eval_space(const Fm& f, const Env& env, Ctx& cx) {
  // memo key: alpha form of f plus the environment contents
  std::string key = alpha_key(f);
  for (auto& [name, sp] : env) {
    key += "|" + name + ":";
    for (TermId t : sp.web) key += std::to_string(t) + ",";
    for (auto& row : sp.coh)
      for (size_t j = 0; j < row.size(); ++j) key += row.get(j) ? '1' : '0';
  }
  auto it = cx.space_memo.find(key);
  if (it != cx.space_memo.end()) return it->second;

  std::vector<TermId> web;
  for (auto& nf : denote_nfs(f, env, {}, cx)) web.push_back(nf.comps[0]);
  if (web.size() > cx.caps.max_web) throw CapError("web cap exceeded");
  CohSpace s = make_space(std::move(web), [&](TermId p, TermId q) {
    return point_coherent(f, env, p, q, cx);
  });
  cx.space_memo.emplace(std::move(key), s);
  return s;
}

// ---- the nf-level coherence relation (trace relation) ----

// Bounded decision: coherence of two instantiated points only depends on
// the induced subspaces on the images of the two embeddings, so ranging
// over amalgams of the bound spaces decides the universally quantified
// condition of the trace relation.
inline bool nf_coherent(const std::vector<Fm>& seq, const Env& env,
                        const std::vector<std::string>& slots, const NormalForm& n1,
                        const NormalForm& n2, Ctx& cx) {
  int n = static_cast<int>(slots.size());
  std::vector<std::vector<Amalgam>> choices(n);
  for (int s = 0; s < n; ++s) {
    choices[s] = graph_amalgams(n1.slots[s], n2.slots[s]);
    if (choices[s].empty()) throw CapError("amalgam cap exceeded in nf_coherent");
  }
  std::vector<size_t> pick(n, 0);
  for (;;) {
    cx.tick();
    std::vector<CohSpace> ws;
    ws.reserve(n);
    Env env2 = env;
    for (int s = 0; s < n; ++s) {
      ws.push_back(space_from_graph(choices[s][pick[s]].w, cx.fresh_tag("w")));
      env2[slots[s]] = ws[s];
    }
    std::vector<const CohSpace*> sp;
    for (int s = 0; s < n; ++s) sp.push_back(&ws[s]);
    std::vector<std::vector<int>> e1(n), e2(n);
    for (int s = 0; s < n; ++s) {
      e1[s] = choices[s][pick[s]].left;
      e2[s] = choices[s][pick[s]].right;
    }
    auto r1 = instantiate_nf(n1, sp, e1);
    auto r2 = instantiate_nf(n2, sp, e2);
    if (!row_coherent(seq, env2, r1, r2, cx)) return false;
    int s = 0;
    for (; s < n; ++s) {
      if (++pick[s] < choices[s].size()) break;
      pick[s] = 0;
    }
    if (s == n || n == 0) break;
  }
  return true;
}

// Reference decision by exhaustive search over witness spaces of size
// <= max_size per slot (all isomorphism classes, all embedding pairs).
inline bool nf_coherent_naive(const std::vector<Fm>& seq, const Env& env,
                              const std::vector<std::string>& slots, const NormalForm& n1,
                              const NormalForm& n2, int max_size, Ctx& cx) {
  int n = static_cast<int>(slots.size());
  std::vector<Graph> zs = graphs_up_to(max_size);
  std::vector<size_t> pick(n, 0);
  for (;;) {
    std::vector<CohSpace> ws;
    Env env2 = env;
    bool feasible = true;
    for (int s = 0; s < n && feasible; ++s) {
      const Graph& z = zs[pick[s]];
      if (z.n < n1.slots[s].n || z.n < n2.slots[s].n) feasible = false;
      ws.push_back(space_from_graph(z, "z" + std::to_string(s) + "_" + z.dump()));
    }
    if (feasible) {
      for (int s = 0; s < n; ++s) env2[slots[s]] = ws[s];
      std::vector<const CohSpace*> sp;
      for (int s = 0; s < n; ++s) sp.push_back(&ws[s]);
      // all embedding pairs, slotwise
      std::vector<std::vector<std::vector<int>>> em1(n), em2(n);
      bool any = true;
      for (int s = 0; s < n; ++s) {
        em1[s] = embeddings_into(n1.slots[s], ws[s]);
        em2[s] = embeddings_into(n2.slots[s], ws[s]);
        if (em1[s].empty() || em2[s].empty()) any = false;
      }
      if (any) {
        std::vector<size_t> p1(n, 0);
        for (;;) {
          std::vector<size_t> p2(n, 0);
          for (;;) {
            cx.tick();
            std::vector<std::vector<int>> e1(n), e2(n);
            for (int s = 0; s < n; ++s) {
              e1[s] = em1[s][p1[s]];
              e2[s] = em2[s][p2[s]];
            }
            auto r1 = instantiate_nf(n1, sp, e1);
            auto r2 = instantiate_nf(n2, sp, e2);
            if (!row_coherent(seq, env2, r1, r2, cx)) return false;
            int s = 0;
            for (; s < n; ++s) {
              if (++p2[s] < em2[s].size()) break;
              p2[s] = 0;
            }
            if (s == n || n == 0) break;
          }
          int s = 0;
          for (; s < n; ++s) {
            if (++p1[s] < em1[s].size()) break;
            p1[s] = 0;
          }
          if (s == n || n == 0) break;
        }
      }
    }
    int s = 0;
    for (; s < n; ++s) {
      if (++pick[s] < zs.size()) break;
      pick[s] = 0;
    }
    if (s == n || n == 0) break;
  }
  return true;
}

// ---- formula denotations ----

struct FormulaDenotation {
  Fm formula;                      // binders renamed apart
  std::vector<std::string> slots;  // free variables, sorted
  std::vector<NormalForm> nfs;     // NF(F), canonical, sorted

  int degree() const { return ll2::degree(nfs); }
  int degree_of_slot(int s) const { return ll2::degree_of_slot(nfs, s); }
};

inline Fm barendregt_formula(const Fm& f) {
  std::set<std::string> used = free_vars(f);
  return detail::barendregt(f, used);
}

inline FormulaDenotation denote_formula(const Fm& f0, Ctx& cx) {
  Fm f = barendregt_formula(f0);
  if (!fincoh_condition(f))
    throw std::invalid_argument("denote_formula: fincoh condition violated (open exponential)");
  FormulaDenotation fd;
  fd.formula = f;
  auto fv = free_vars(f);
  fd.slots.assign(fv.begin(), fv.end());
  fd.nfs = denote_nfs(f, {}, fd.slots, cx);
  return fd;
}

inline bool nf_self_coherent(const FormulaDenotation& fd, const NormalForm& nf, Ctx& cx) {
  return nf_coherent({fd.formula}, {}, fd.slots, nf, nf, cx);
}

// |F(X...)| by Prop. instantiation-space; also usable for counting only.
inline CohSpace instantiate_web(const FormulaDenotation& fd, const std::vector<const CohSpace*>& xs,
                                Ctx& cx) {
  Env env;
  for (size_t i = 0; i < fd.slots.size(); ++i) env[fd.slots[i]] = *xs[i];
  return eval_space(fd.formula, env, cx);
}

inline uint64_t web_size_at(const FormulaDenotation& fd, const std::vector<const CohSpace*>& xs) {
  uint64_t total = 0;
  for (auto& nf : fd.nfs) total += count_instances(nf, xs);
  return total;
}

inline std::vector<TermId> instantiate_clique(const std::vector<NormalForm>& clique,
                                              const std::vector<const CohSpace*>& xs) {
  std::vector<TermId> out;
  for (auto& nf : clique)
    for_each_instance(nf, xs, [&](const std::vector<TermId>&, const std::vector<std::vector<int>>& embs) {
      auto row = instantiate_nf(nf, xs, embs);
      out.push_back(row[0]);
    });
  std::sort(out.begin(), out.end(), TermLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<NormalForm> abstract_clique(const std::vector<TermId>& pts,
                                               const std::vector<const CohSpace*>& xs,
                                               const std::vector<uint32_t>& slot_tags) {
  std::vector<NormalForm> out;
  for (TermId t : pts) out.push_back(nf_of_row({t}, xs, slot_tags));
  sort_unique(out);
  return out;
}

// growth_profile: web sizes at [1..nmax] (the all-coherent n-point space).
inline std::vector<uint64_t> growth_profile(const Fm& f, int nmax, Ctx& cx) {
  FormulaDenotation fd = denote_formula(f, cx);
  if (fd.slots.size() != 1)
    throw std::invalid_argument("growth_profile: formula must have exactly one free variable");
  std::vector<uint64_t> out;
  for (int n = 1; n <= nmax; ++n) {
    CohSpace s = with_power(n);
    out.push_back(web_size_at(fd, {&s}));
  }
  return out;
}

// ---- uniform families ----

// A family of cliques indexed by tuples of spaces, given extensionally.
// Checks c_X = F(emb)^{-1}(c_Y) for every componentwise embedding between
// listed tuples.
struct SpaceTuple {
  std::vector<CohSpace> spaces;
};

inline bool check_uniform(const FormulaDenotation& fd, const std::vector<SpaceTuple>& tuples,
                          const std::vector<std::vector<TermId>>& cliques, Ctx& cx) {
  size_t m = tuples.size();
  for (size_t i = 0; i < m; ++i) {
    // each member must be a clique at its tuple
    Env env;
    for (size_t s = 0; s < fd.slots.size(); ++s) env[fd.slots[s]] = tuples[i].spaces[s];
    for (size_t a = 0; a < cliques[i].size(); ++a)
      for (size_t b = a + 1; b < cliques[i].size(); ++b)
        if (!point_coherent(fd.formula, env, cliques[i][a], cliques[i][b], cx)) return false;
  }
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < m; ++j) {
      // all embedding tuples from tuples[i] into tuples[j]
      int n = static_cast<int>(fd.slots.size());
      std::vector<std::vector<std::vector<int>>> embs(n);
      bool any = true;
      for (int s = 0; s < n && any; ++s) {
        embs[s] = enumerate_embeddings(tuples[i].spaces[s], tuples[j].spaces[s]);
        if (embs[s].empty()) any = false;
      }
      if (!any) continue;
      std::vector<size_t> pick(n, 0);
      for (;;) {
        cx.tick();
        // map each point of |F| at tuple i along the functor action of the
        // embedding: substitution on toks via the embedding index maps.
        // Slot webs must be pairwise disjoint for the reverse lookup.
        auto map_point = [&](TermId t) -> TermId {
          struct M {
            const FormulaDenotation& fd;
            const std::vector<SpaceTuple>& tuples;
            size_t i, j;
            const std::vector<std::vector<std::vector<int>>>& embs;
            const std::vector<size_t>& pick;

            TermId run(TermId t) {
              const TermNode& nd = tnode(t);
              switch (nd.kind) {
                case TK::Tok: {
                  for (size_t s = 0; s < fd.slots.size(); ++s) {
                    int w = tuples[i].spaces[s].find(t);
                    if (w >= 0) return tuples[j].spaces[s].web[embs[s][pick[s]][w]];
                  }
                  return t;
                }
                case TK::Var:
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
          } m{fd, tuples, i, j, embs, pick};
          return m.run(t);
        };
        // F(emb)^{-1}(c_j) restricted to the image equals the direct image
        // test: x in c_i iff F(emb)(x) in c_j, for every x in |F(tuple_i)|
        Env env_i;
        for (size_t s = 0; s < fd.slots.size(); ++s) env_i[fd.slots[s]] = tuples[i].spaces[s];
        CohSpace web_i = eval_space(fd.formula, env_i, cx);
        for (TermId x : web_i.web) {
          bool in_i = std::binary_search(cliques[i].begin(), cliques[i].end(), x, TermLess{});
          TermId fx = map_point(x);
          bool in_j = std::binary_search(cliques[j].begin(), cliques[j].end(), fx, TermLess{});
          if (in_i != in_j) return false;
        }
        int s = 0;
        for (; s < n; ++s) {
          if (++pick[s] < embs[s].size()) break;
          pick[s] = 0;
        }
        if (s == n || n == 0) break;
      }
    }
  }
  return true;
}

}  // namespace ll2
