#pragma once

// Proof denotations: the trace clique of the conclusion's par, built by
// structural recursion with one semantic action per rule. Closed sequents
// keep their rows in a flat buffer (proofs over string types produce rows
// in the millions); open sequents carry normal forms with bound spaces.

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ll2/denot.hpp"
#include "ll2/sequent.hpp"

namespace ll2 {

struct ProofDen {
  Sequent seq;
  std::vector<std::string> slots;  // sorted free variables; empty = closed
  size_t width = 0;                // formulas per row
  size_t nrows = 0;
  std::vector<TermId> flat;        // closed rows, row-major, sorted unique
  std::vector<NormalForm> open;    // open rows, canonical sorted unique

  bool is_closed() const { return slots.empty(); }

  std::vector<TermId> row(size_t r) const {
    return std::vector<TermId>(flat.begin() + r * width, flat.begin() + (r + 1) * width);
  }

  // uniform view, for tests and small data
  std::vector<NormalForm> rows_as_nfs() const {
    if (!is_closed()) return open;
    std::vector<NormalForm> out;
    for (size_t r = 0; r < nrows; ++r) out.push_back(NormalForm{{}, row(r)});
    return out;
  }
};

namespace denotproof_detail {

inline void sort_dedupe_flat(ProofDen& d) {
  size_t w = d.width;
  if (w == 0 || d.flat.empty()) {
    d.nrows = std::min<size_t>(d.nrows, 1);
    return;
  }
  std::vector<size_t> idx(d.flat.size() / w);
  std::iota(idx.begin(), idx.end(), 0);
  auto cmp = [&](size_t a, size_t b) {
    for (size_t t = 0; t < w; ++t) {
      TermId x = d.flat[a * w + t], y = d.flat[b * w + t];
      if (x != y) return x < y;
    }
    return false;
  };
  auto eq = [&](size_t a, size_t b) {
    for (size_t t = 0; t < w; ++t)
      if (d.flat[a * w + t] != d.flat[b * w + t]) return false;
    return true;
  };
  std::sort(idx.begin(), idx.end(), cmp);
  idx.erase(std::unique(idx.begin(), idx.end(), eq), idx.end());
  std::vector<TermId> out;
  out.reserve(idx.size() * w);
  for (size_t r : idx)
    for (size_t t = 0; t < w; ++t) out.push_back(d.flat[r * w + t]);
  d.flat = std::move(out);
  d.nrows = d.flat.size() / w;
}

inline void finish_open(ProofDen& d) {
  sort_unique(d.open);
  d.nrows = d.open.size();
}

inline std::vector<std::string> seq_slots(const Sequent& s) {
  std::set<std::string> vars;
  for (auto& f : s)
    for (auto& v : free_vars(f)) vars.insert(v);
  return {vars.begin(), vars.end()};
}

// re-index an open row from its slot frame into a larger/permuted one
inline NormalForm align_nf(const NormalForm& nf, const std::vector<int>& slot_map, int n_new,
                           const std::vector<Graph>& new_slots) {
  NormalForm out;
  out.slots = new_slots;
  for (size_t s = 0; s < nf.slots.size(); ++s)
    if (slot_map[s] >= 0)
      out.slots[slot_map[s]] = nf.slots[s];
    else if (nf.slots[s].n > 0)
      throw std::logic_error("align_nf: dropping a used slot");
  for (TermId c : nf.comps) out.comps.push_back(remap_levels(c, slot_map, nf.arity(), n_new));
  return out;
}

inline ProofDen align(const ProofDen& d, const std::vector<std::string>& new_slots) {
  if (d.slots == new_slots) return d;
  ProofDen out;
  out.seq = d.seq;
  out.slots = new_slots;
  out.width = d.width;
  int n_new = static_cast<int>(new_slots.size());
  std::vector<int> slot_map;
  for (auto& name : d.slots) {
    auto it = std::find(new_slots.begin(), new_slots.end(), name);
    slot_map.push_back(it == new_slots.end() ? -1 : static_cast<int>(it - new_slots.begin()));
  }
  std::vector<Graph> empty_slots(n_new, Graph::empty());
  if (d.is_closed() && n_new == 0) return d;
  if (d.is_closed()) {
    for (size_t r = 0; r < d.nrows; ++r) out.open.push_back(NormalForm{empty_slots, d.row(r)});
    out.nrows = out.open.size();
    return out;
  }
  for (auto& nf : d.open) out.open.push_back(align_nf(nf, slot_map, n_new, empty_slots));
  finish_open(out);
  return out;
}

}  // namespace denotproof_detail

ProofDen denote_proof(const Proof& p, Ctx& cx);

namespace denotproof_detail {

// positions (as formula paths) where the bound variable occurs in the body
// of a quantifier; used by the exists action
template <class F>
void walk_var_positions(const Fm& a, const std::string& x, TermId t, const F& fn) {
  switch (a->conn) {
    case Conn::Var:
    case Conn::DualVar:
      if (a->var == x) fn(t);
      return;
    case Conn::Tensor:
    case Conn::Par: {
      const TermNode& n = tnode(t);
      walk_var_positions(a->a, x, n.a, fn);
      walk_var_positions(a->b, x, n.b, fn);
      return;
    }
    case Conn::Plus:
    case Conn::With: {
      const TermNode& n = tnode(t);
      if (n.kind == TK::Inl)
        walk_var_positions(a->a, x, n.a, fn);
      else
        walk_var_positions(a->b, x, n.a, fn);
      return;
    }
    case Conn::Forall:
    case Conn::Exists:
      if (a->var != x) walk_var_positions(a->a, x, bind_body(t), fn);
      return;
    case Conn::Bang:
    case Conn::Quest:
      if (occurrences(a->a, x) > 0)
        throw std::logic_error("exists action: variable under an exponential");
      return;
    default:
      return;
  }
}

template <class F>
TermId replace_var_positions(const Fm& a, const std::string& x, TermId t, const F& fn) {
  switch (a->conn) {
    case Conn::Var:
    case Conn::DualVar:
      return a->var == x ? fn(t) : t;
    case Conn::Tensor:
    case Conn::Par: {
      const TermNode& n = tnode(t);
      return t_pair(replace_var_positions(a->a, x, n.a, fn),
                    replace_var_positions(a->b, x, n.b, fn));
    }
    case Conn::Plus:
    case Conn::With: {
      const TermNode& n = tnode(t);
      if (n.kind == TK::Inl) return t_inl(replace_var_positions(a->a, x, n.a, fn));
      return t_inr(replace_var_positions(a->b, x, n.a, fn));
    }
    case Conn::Forall:
    case Conn::Exists: {
      if (a->var == x) return t;
      TermId body = replace_var_positions(a->a, x, bind_body(t), fn);
      return t_bind(bind_graph(t), body);
    }
    default:
      return t;
  }
}

inline TermId shift_bind_levels(TermId t, int delta) {
  return map_vars(t, [&](uint32_t level, uint32_t idx) -> TermId {
    return t_var(level + delta, idx);
  });
}

}  // namespace denotproof_detail

inline ProofDen denote_proof(const Proof& p, Ctx& cx) {
  using namespace denotproof_detail;
  ProofDen out;
  std::vector<ProofDen> prem;
  for (auto& q : p->premises) prem.push_back(denote_proof(q, cx));

  auto finish = [&](ProofDen& d) -> ProofDen& {
    if (d.is_closed())
      sort_dedupe_flat(d);
    else
      finish_open(d);
    if (d.nrows > cx.caps.max_rows / std::max<size_t>(1, d.width))
      throw CapError("proof denotation row cap exceeded");
    return d;
  };

  switch (p->rule) {
    case Rule::Ax: {
      Fm a = barendregt_formula(p->formula);
      if (!fincoh_condition(a)) throw std::invalid_argument("denote_proof: fincoh violated at ax");
      out.seq = {a, dual(a)};
      out.slots = seq_slots(out.seq);
      out.width = 2;
      FormulaDenotation fd = denote_formula(a, cx);
      if (out.slots.empty()) {
        for (auto& nf : fd.nfs) {
          out.flat.push_back(nf.comps[0]);
          out.flat.push_back(nf.comps[0]);
        }
        out.nrows = fd.nfs.size();
        return finish(out);
      }
      // fd.slots == out.slots (both sorted free vars of a)
      for (auto& nf : fd.nfs)
        out.open.push_back(canonicalize(NormalForm{nf.slots, {nf.comps[0], nf.comps[0]}}));
      return finish(out);
    }
    case Rule::One: {
      out.seq = {f_one()};
      out.width = 1;
      out.flat = {t_unit()};
      out.nrows = 1;
      return out;
    }
    case Rule::Top: {
      out.seq = check_proof(p);
      out.slots = seq_slots(out.seq);
      out.width = out.seq.size();
      out.nrows = 0;
      return out;
    }
    case Rule::Bot: {
      ProofDen d = std::move(prem[0]);
      d.seq.push_back(f_bot());
      d.width += 1;
      if (d.is_closed()) {
        std::vector<TermId> flat;
        flat.reserve(d.nrows * d.width);
        for (size_t r = 0; r < d.nrows; ++r) {
          for (size_t t = 0; t < d.width - 1; ++t) flat.push_back(d.flat[r * (d.width - 1) + t]);
          flat.push_back(t_unit());
        }
        d.flat = std::move(flat);
      } else {
        for (auto& nf : d.open) nf.comps.push_back(t_unit());
      }
      return finish(d);
    }
    case Rule::Exchange: {
      ProofDen d = std::move(prem[0]);
      int i = p->pos;
      std::swap(d.seq[i], d.seq[i + 1]);
      if (d.is_closed()) {
        for (size_t r = 0; r < d.nrows; ++r)
          std::swap(d.flat[r * d.width + i], d.flat[r * d.width + i + 1]);
      } else {
        for (auto& nf : d.open) {
          std::swap(nf.comps[i], nf.comps[i + 1]);
          nf = canonicalize(nf);
        }
      }
      return finish(d);
    }
    case Rule::Par: {
      ProofDen d = std::move(prem[0]);
      size_t w = d.width;
      Fm merged = f_par(d.seq[w - 2], d.seq[w - 1]);
      d.seq.pop_back();
      d.seq.back() = merged;
      if (d.is_closed()) {
        std::vector<TermId> flat;
        flat.reserve(d.nrows * (w - 1));
        for (size_t r = 0; r < d.nrows; ++r) {
          for (size_t t = 0; t < w - 2; ++t) flat.push_back(d.flat[r * w + t]);
          flat.push_back(t_pair(d.flat[r * w + w - 2], d.flat[r * w + w - 1]));
        }
        d.flat = std::move(flat);
      } else {
        for (auto& nf : d.open) {
          TermId t = t_pair(nf.comps[w - 2], nf.comps[w - 1]);
          nf.comps.pop_back();
          nf.comps.back() = t;
        }
      }
      d.width -= 1;
      return finish(d);
    }
    case Rule::PlusL:
    case Rule::PlusR: {
      ProofDen d = std::move(prem[0]);
      bool left = p->rule == Rule::PlusL;
      if (!fincoh_condition(p->formula))
        throw std::invalid_argument("denote_proof: fincoh violated at plus");
      d.seq.back() = left ? f_plus(d.seq.back(), p->formula) : f_plus(p->formula, d.seq.back());
      if (d.is_closed()) {
        for (size_t r = 0; r < d.nrows; ++r) {
          TermId& c = d.flat[r * d.width + d.width - 1];
          c = left ? t_inl(c) : t_inr(c);
        }
      } else {
        for (auto& nf : d.open) nf.comps.back() = left ? t_inl(nf.comps.back()) : t_inr(nf.comps.back());
      }
      return finish(d);
    }
    case Rule::With: {
      Fm merged = f_with(prem[0].seq.back(), prem[1].seq.back());
      Sequent seq(prem[0].seq.begin(), prem[0].seq.end() - 1);
      seq.push_back(merged);
      auto slots = seq_slots(seq);
      ProofDen a = align(prem[0], slots);
      ProofDen b = align(prem[1], slots);
      out.seq = seq;
      out.slots = slots;
      out.width = a.width;
      if (out.is_closed()) {
        out.flat = a.flat;
        for (size_t r = 0; r < a.nrows; ++r) out.flat[r * out.width + out.width - 1] =
            t_inl(out.flat[r * out.width + out.width - 1]);
        size_t base = out.flat.size();
        out.flat.insert(out.flat.end(), b.flat.begin(), b.flat.end());
        for (size_t r = 0; r < b.nrows; ++r) out.flat[base + r * out.width + out.width - 1] =
            t_inr(out.flat[base + r * out.width + out.width - 1]);
        out.nrows = a.nrows + b.nrows;
        return finish(out);
      }
      for (auto nf : a.open) {
        nf.comps.back() = t_inl(nf.comps.back());
        out.open.push_back(std::move(nf));
      }
      for (auto nf : b.open) {
        nf.comps.back() = t_inr(nf.comps.back());
        out.open.push_back(std::move(nf));
      }
      return finish(out);
    }
    case Rule::Tensor: {
      Fm merged = f_tensor(prem[0].seq.back(), prem[1].seq.front());
      Sequent seq(prem[0].seq.begin(), prem[0].seq.end() - 1);
      seq.push_back(merged);
      seq.insert(seq.end(), prem[1].seq.begin() + 1, prem[1].seq.end());
      auto slots = seq_slots(seq);
      out.seq = seq;
      out.slots = slots;
      out.width = prem[0].width + prem[1].width - 1;
      if (slots.empty()) {
        size_t w1 = prem[0].width, w2 = prem[1].width;
        out.flat.reserve(prem[0].nrows * prem[1].nrows * out.width);
        for (size_t r1 = 0; r1 < prem[0].nrows; ++r1) {
          for (size_t r2 = 0; r2 < prem[1].nrows; ++r2) {
            for (size_t t = 0; t + 1 < w1; ++t) out.flat.push_back(prem[0].flat[r1 * w1 + t]);
            out.flat.push_back(
                t_pair(prem[0].flat[r1 * w1 + w1 - 1], prem[1].flat[r2 * w2]));
            for (size_t t = 1; t < w2; ++t) out.flat.push_back(prem[1].flat[r2 * w2 + t]);
            if (out.flat.size() > cx.caps.max_rows) throw CapError("tensor action row cap");
          }
        }
        out.nrows = out.flat.size() / std::max<size_t>(1, out.width);
        return finish(out);
      }
      ProofDen a = align(prem[0], slots);
      ProofDen b = align(prem[1], slots);
      size_t w1 = a.width;
      for (auto& n1 : a.open)
        for (auto& n2 : b.open)
          detail::glue_nfs(n1, n2, cx, [&](const std::vector<Graph>& gs,
                                           const std::vector<TermId>& c1,
                                           const std::vector<TermId>& c2) {
            NormalForm nf;
            nf.slots = gs;
            nf.comps.assign(c1.begin(), c1.end() - 1);
            nf.comps.push_back(t_pair(c1[w1 - 1], c2[0]));
            nf.comps.insert(nf.comps.end(), c2.begin() + 1, c2.end());
            out.open.push_back(canonicalize(nf));
          });
      return finish(out);
    }
    case Rule::Forall: {
      ProofDen d = std::move(prem[0]);
      int n_pre = static_cast<int>(d.slots.size());
      auto it = std::find(d.slots.begin(), d.slots.end(), p->var);
      Fm body = d.seq.back();
      out.seq = Sequent(d.seq.begin(), d.seq.end() - 1);
      out.seq.push_back(f_forall(p->var, body));
      out.slots = seq_slots(out.seq);
      out.width = d.width;
      if (it == d.slots.end()) {
        // vacuous quantifier: wrap with the empty bound space
        ProofDen a = align(d, out.slots);
        if (a.is_closed()) {
          for (size_t r = 0; r < a.nrows; ++r) {
            auto row = a.row(r);
            row.back() = canonical_point(t_bind(Graph::empty(), shift_bind_levels(row.back(), 1)));
            out.flat.insert(out.flat.end(), row.begin(), row.end());
          }
          out.nrows = a.nrows;
          return finish(out);
        }
        for (auto nf : a.open) {
          nf.comps.back() = t_bind(Graph::empty(), nf.comps.back());
          out.open.push_back(canonicalize(nf));
        }
        return finish(out);
      }
      int k = static_cast<int>(it - d.slots.begin());
      int n_new = n_pre - 1;
      // slot maps: wrapped component sends level k to the new binder
      // (= level n_new there), others must not mention k
      for (auto& nf : d.open) {
        // self-coherence of the wrapped part decides web membership;
        // reorder so the bound slot is last and reuse the trace check
        NormalForm probe;
        std::vector<std::string> probe_slots;
        for (int s = 0; s < n_pre; ++s)
          if (s != k) {
            probe.slots.push_back(nf.slots[s]);
            probe_slots.push_back(d.slots[s]);
          }
        probe.slots.push_back(nf.slots[k]);
        probe_slots.push_back(p->var);
        std::vector<int> to_probe(n_pre);
        for (int s = 0, t = 0; s < n_pre; ++s) to_probe[s] = s == k ? n_pre - 1 : t++;
        probe.comps = {remap_levels(nf.comps.back(), to_probe, n_pre, n_pre)};
        if (!detail::self_coherent_last(body, {}, probe_slots, probe, cx)) continue;

        NormalForm res;
        res.slots.clear();
        for (int s = 0; s < n_pre; ++s)
          if (s != k) res.slots.push_back(nf.slots[s]);
        std::vector<int> other_map(n_pre), wrap_map(n_pre);
        for (int s = 0, t = 0; s < n_pre; ++s) other_map[s] = s == k ? -1 : t++;
        for (int s = 0; s < n_pre; ++s)
          wrap_map[s] = s == k ? n_new : other_map[s];
        for (size_t c = 0; c + 1 < nf.comps.size(); ++c)
          res.comps.push_back(remap_levels(nf.comps[c], other_map, n_pre, n_new));
        // wrapped component: bind levels unchanged (slot count drops by one,
        // the new binder takes the freed level)
        TermId wrapped = map_vars(nf.comps.back(), [&](uint32_t level, uint32_t idx) -> TermId {
          if (static_cast<int>(level) < n_pre) return t_var(wrap_map[level], idx);
          return t_var(level, idx);
        });
        res.comps.push_back(t_bind(nf.slots[k], wrapped));
        out.open.push_back(canonicalize(res));
      }
      ProofDen fin = align(out, out.slots);  // no-op reorder safeguard
      fin.seq = out.seq;
      if (fin.slots.empty() && !fin.open.empty()) {
        // collapse to the closed representation
        ProofDen cl;
        cl.seq = fin.seq;
        cl.width = fin.width;
        for (auto& nf : fin.open) cl.flat.insert(cl.flat.end(), nf.comps.begin(), nf.comps.end());
        cl.nrows = fin.open.size();
        return finish(cl);
      }
      return finish(fin);
    }
    case Rule::Exists: {
      ProofDen d = std::move(prem[0]);
      Fm target = p->formula;  // ex X. A
      if (!fincoh_condition(target) || !fincoh_condition(p->witness))
        throw std::invalid_argument("denote_proof: fincoh violated at exists");
      std::string x = target->var;
      Fm a_body = target->a;
      Fm b_wit = p->witness;
      out.seq = Sequent(d.seq.begin(), d.seq.end() - 1);
      out.seq.push_back(target);
      out.slots = seq_slots(out.seq);
      out.width = d.width;
      int n_pre = static_cast<int>(d.slots.size());
      // work per row at its generic instantiation
      std::vector<NormalForm> rows = d.rows_as_nfs();
      Fm web_body = cached_dual(a_body);  // membership: self-coherent for ~A
      for (auto& nf : rows) {
        auto gens = detail::generic_spaces(nf, cx);
        Env env_gen;
        for (int s = 0; s < n_pre; ++s) env_gen[d.slots[s]] = gens[s];
        std::vector<const CohSpace*> sp;
        for (auto& g : gens) sp.push_back(&g);
        auto row0 = instantiate_nf(nf, sp, detail::identity_embs(nf));
        // collect the subterms sitting at x-positions of A
        std::vector<TermId> qs;
        walk_var_positions(a_body, x, row0.back(), [&](TermId q) {
          if (std::find(qs.begin(), qs.end(), q) == qs.end()) qs.push_back(q);
        });
        std::sort(qs.begin(), qs.end(), TermLess{});
        Graph vg;
        vg.n = static_cast<uint8_t>(qs.size());
        for (size_t u = 0; u < qs.size(); ++u) {
          vg.rows[u] = static_cast<uint16_t>(1u << u);
          for (size_t v = u + 1; v < qs.size(); ++v)
            if (point_coherent(b_wit, env_gen, qs[u], qs[v], cx)) vg.set_coh(u, v, true);
        }
        // rebuild: existing binders shift one level down the path, fresh
        // variables refer to the new outermost binder
        TermId shifted = denotproof_detail::shift_bind_levels(row0.back(), 1);
        // shifting must not touch the q subterms when matching: recompute
        // them on the shifted term instead
        std::vector<TermId> qs_shifted;
        for (TermId q : qs) qs_shifted.push_back(denotproof_detail::shift_bind_levels(q, 1));
        TermId packed = replace_var_positions(a_body, x, shifted, [&](TermId q) -> TermId {
          for (size_t u = 0; u < qs_shifted.size(); ++u)
            if (q == qs_shifted[u]) return t_var(0, static_cast<uint32_t>(u));
          throw std::logic_error("exists action: subterm mismatch");
        });
        TermId wrapped = t_bind(vg, packed);
        // web membership: the packed pattern must be self-coherent for ~A
        {
          NormalForm probe;
          probe.slots = {vg};
          probe.comps = {bind_body(wrapped)};
          std::vector<std::string> probe_slots = {x};
          Env env2 = env_gen;
          if (!detail::self_coherent_last(web_body, env2, probe_slots, probe, cx)) continue;
        }
        std::vector<TermId> final_row(row0.begin(), row0.end() - 1);
        final_row.push_back(wrapped);
        // re-abstract over the generic spaces
        std::vector<uint32_t> tags;
        for (auto& g : gens) tags.push_back(g.web.empty() ? 0xffffffffu : tnode(g.web[0]).a);
        NormalForm res = nf_of_row(final_row, sp, tags);
        // align from premise slots to conclusion slots
        std::vector<int> slot_map;
        for (auto& name : d.slots) {
          auto it2 = std::find(out.slots.begin(), out.slots.end(), name);
          slot_map.push_back(it2 == out.slots.end() ? -1 : static_cast<int>(it2 - out.slots.begin()));
        }
        std::vector<Graph> empty_slots(out.slots.size(), Graph::empty());
        out.open.push_back(canonicalize(align_nf(res, slot_map, static_cast<int>(out.slots.size()),
                                                 empty_slots)));
      }
      if (out.slots.empty()) {
        ProofDen cl;
        cl.seq = out.seq;
        cl.width = out.width;
        sort_unique(out.open);
        for (auto& nf : out.open) cl.flat.insert(cl.flat.end(), nf.comps.begin(), nf.comps.end());
        cl.nrows = out.open.size();
        return finish(cl);
      }
      return finish(out);
    }
    case Rule::Cut: {
      const ProofDen& d1 = prem[0];
      const ProofDen& d2 = prem[1];
      Fm cutf = d1.seq.back();
      out.seq = Sequent(d1.seq.begin(), d1.seq.end() - 1);
      out.seq.insert(out.seq.end(), d2.seq.begin() + 1, d2.seq.end());
      out.slots = seq_slots(out.seq);
      out.width = d1.width + d2.width - 2;
      if (d1.is_closed() && d2.is_closed()) {
        size_t w1 = d1.width, w2 = d2.width;
        size_t matched = 0;
        std::map<TermId, std::vector<size_t>> buckets;
        for (size_t r2 = 0; r2 < d2.nrows; ++r2) buckets[d2.flat[r2 * w2]].push_back(r2);
        for (size_t r1 = 0; r1 < d1.nrows; ++r1) {
          TermId q = d1.flat[r1 * w1 + w1 - 1];
          auto it = buckets.find(q);
          if (it == buckets.end()) continue;
          for (size_t r2 : it->second) {
            ++matched;
            for (size_t t = 0; t + 1 < w1; ++t) out.flat.push_back(d1.flat[r1 * w1 + t]);
            for (size_t t = 1; t < w2; ++t) out.flat.push_back(d2.flat[r2 * w2 + t]);
            if (out.flat.size() > cx.caps.max_rows) throw CapError("cut action row cap");
          }
        }
        out.nrows = out.width ? out.flat.size() / out.width : (matched ? 1 : 0);
        return finish(out);
      }
      // open cut: instantiate both sides at universal spaces sized by the
      // syntactic degree bound, compose, and abstract back
      std::set<std::string> vars(d1.slots.begin(), d1.slots.end());
      vars.insert(d2.slots.begin(), d2.slots.end());
      std::map<std::string, CohSpace> uni;
      std::map<std::string, uint32_t> tags;
      for (auto& v : vars) {
        int occ = 0;
        for (auto& f : out.seq) occ += occurrences(f, v);
        occ += occurrences(cutf, v);
        if (occ > 4) throw CapError("cut action: degree bound beyond the universal-space cap");
        CohSpace u = universal_space(occ);
        // tag lookup: universal webs are token webs
        tags[v] = u.web.empty() ? 0xffffffffu : tnode(u.web[0]).a;
        uni.emplace(v, std::move(u));
      }
      auto instantiate_all = [&](const ProofDen& d) {
        std::vector<std::vector<TermId>> rows;
        std::vector<const CohSpace*> sp;
        for (auto& s : d.slots) sp.push_back(&uni.at(s));
        for (auto& nf : d.rows_as_nfs())
          for_each_instance(nf, sp, [&](const std::vector<TermId>& row, const auto&) {
            rows.push_back(row);
          });
        return rows;
      };
      auto rows1 = instantiate_all(d1);
      auto rows2 = instantiate_all(d2);
      std::map<TermId, std::vector<size_t>> buckets;
      for (size_t r2 = 0; r2 < rows2.size(); ++r2) buckets[rows2[r2][0]].push_back(r2);
      std::vector<const CohSpace*> concl_sp;
      std::vector<uint32_t> concl_tags;
      for (auto& s : out.slots) {
        concl_sp.push_back(&uni.at(s));
        concl_tags.push_back(tags.at(s));
      }
      std::set<NormalForm> seen;
      for (auto& r1 : rows1) {
        auto it = buckets.find(r1.back());
        if (it == buckets.end()) continue;
        for (size_t r2 : it->second) {
          std::vector<TermId> row(r1.begin(), r1.end() - 1);
          row.insert(row.end(), rows2[r2].begin() + 1, rows2[r2].end());
          NormalForm nf = nf_of_row(row, concl_sp, concl_tags);
          if (seen.insert(nf).second) out.open.push_back(nf);
        }
      }
      if (out.slots.empty()) {
        ProofDen cl;
        cl.seq = out.seq;
        cl.width = out.width;
        sort_unique(out.open);
        for (auto& nf : out.open) cl.flat.insert(cl.flat.end(), nf.comps.begin(), nf.comps.end());
        cl.nrows = out.open.size();
        return finish(cl);
      }
      return finish(out);
    }
    case Rule::Promotion: {
      const ProofDen& d = prem[0];
      if (!d.is_closed())
        throw std::invalid_argument("denote_proof: promotion over an open sequent (fincoh violated)");
      size_t w = d.width;
      out.seq.clear();
      for (size_t t = 0; t + 1 < d.seq.size(); ++t) out.seq.push_back(f_quest(d.seq[t]));
      out.seq.push_back(f_bang(d.seq.back()));
      out.width = w;
      // distinct conclusion points of the premise
      std::vector<TermId> pts;
      for (size_t r = 0; r < d.nrows; ++r) pts.push_back(d.flat[r * w + w - 1]);
      std::sort(pts.begin(), pts.end(), TermLess{});
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      Fm af = d.seq.back();
      // coherence graph of the points
      size_t m = pts.size();
      std::vector<std::vector<bool>> coh(m, std::vector<bool>(m, false));
      for (size_t u = 0; u < m; ++u) {
        coh[u][u] = true;
        for (size_t v = u + 1; v < m; ++v)
          coh[u][v] = coh[v][u] = point_coherent(af, {}, pts[u], pts[v], cx);
      }
      std::vector<std::vector<size_t>> realizers(m);
      for (size_t r = 0; r < d.nrows; ++r) {
        TermId q = d.flat[r * w + w - 1];
        size_t u = std::lower_bound(pts.begin(), pts.end(), q, TermLess{}) - pts.begin();
        realizers[u].push_back(r);
      }
      std::vector<Fm> ctx_dual;
      for (size_t t = 0; t + 1 < d.seq.size(); ++t) ctx_dual.push_back(cached_dual(d.seq[t]));
      // enumerate cliques v of the point graph together with realizer
      // choices; per context slot the chosen rows' values must form a clique
      std::vector<size_t> clique;
      std::vector<std::vector<TermId>> ctx_sets(w - 1);
      std::vector<TermId> vset;
      auto emit = [&]() {
        for (size_t t = 0; t + 1 < w; ++t) out.flat.push_back(t_bang(ctx_sets[t]));
        out.flat.push_back(t_bang(vset));
        if (out.flat.size() > cx.caps.max_rows) throw CapError("promotion action row cap");
      };
      auto choose = [&](auto&& self, size_t ci) -> void {
        if (ci == clique.size()) {
          emit();
          return;
        }
        for (size_t r : realizers[clique[ci]]) {
          // extend the context sets; every new element must stay coherent
          std::vector<size_t> added(w - 1, 0);
          bool ok = true;
          for (size_t t = 0; t + 1 < w && ok; ++t) {
            TermId g = d.flat[r * w + t];
            bool dup = std::find(ctx_sets[t].begin(), ctx_sets[t].end(), g) != ctx_sets[t].end();
            if (!dup) {
              for (TermId e : ctx_sets[t])
                if (!point_coherent(ctx_dual[t], {}, e, g, cx)) { ok = false; break; }
              if (ok) {
                ctx_sets[t].push_back(g);
                added[t] = 1;
              }
            }
          }
          if (ok) self(self, ci + 1);
          for (size_t t = 0; t + 1 < w; ++t)
            if (added[t]) ctx_sets[t].pop_back();
        }
      };
      auto cliques = [&](auto&& self, size_t from) -> void {
        // current `clique` is a clique: emit all realizer combinations
        vset.assign(clique.size(), 0);
        for (size_t z = 0; z < clique.size(); ++z) vset[z] = pts[clique[z]];
        choose(choose, 0);
        for (size_t nxt = from; nxt < m; ++nxt) {
          bool ok = true;
          for (size_t z : clique)
            if (!coh[z][nxt]) { ok = false; break; }
          if (!ok) continue;
          clique.push_back(nxt);
          self(self, nxt + 1);
          clique.pop_back();
        }
      };
      cliques(cliques, 0);
      out.nrows = out.width ? out.flat.size() / out.width : 0;
      return finish(out);
    }
    case Rule::Weakening: {
      ProofDen d = std::move(prem[0]);
      if (!d.is_closed() || !is_closed(p->formula))
        throw std::invalid_argument("denote_proof: weakening over an open sequent");
      d.seq.push_back(f_quest(p->formula));
      size_t w = d.width;
      std::vector<TermId> flat;
      flat.reserve(d.nrows * (w + 1));
      for (size_t r = 0; r < d.nrows; ++r) {
        for (size_t t = 0; t < w; ++t) flat.push_back(d.flat[r * w + t]);
        flat.push_back(t_bang({}));
      }
      d.flat = std::move(flat);
      d.width = w + 1;
      return finish(d);
    }
    case Rule::Contraction: {
      ProofDen d = std::move(prem[0]);
      if (!d.is_closed())
        throw std::invalid_argument("denote_proof: contraction over an open sequent");
      Fm qa = d.seq.back();          // ?A
      Fm ad = cached_dual(qa->a);    // the union must be a clique of ~A
      size_t w = d.width;
      out.seq = Sequent(d.seq.begin(), d.seq.end() - 1);
      out.width = w - 1;
      for (size_t r = 0; r < d.nrows; ++r) {
        auto e1 = bang_elems(d.flat[r * w + w - 2]);
        auto e2 = bang_elems(d.flat[r * w + w - 1]);
        bool ok = true;
        for (TermId u : e1) {
          for (TermId v : e2)
            if (!point_coherent(ad, {}, u, v, cx)) { ok = false; break; }
          if (!ok) break;
        }
        if (!ok) continue;
        for (size_t t = 0; t + 2 < w; ++t) out.flat.push_back(d.flat[r * w + t]);
        e1.insert(e1.end(), e2.begin(), e2.end());
        out.flat.push_back(t_bang(e1));
      }
      out.nrows = out.width ? out.flat.size() / out.width : 0;
      return finish(out);
    }
  }
  throw std::logic_error("denote_proof: bad rule");
}

// equal denotations, the binding notion of proof equality up to commutation
inline bool same_denotation(const ProofDen& a, const ProofDen& b) {
  return a.width == b.width && a.nrows == b.nrows && a.flat == b.flat && a.open == b.open;
}

}  // namespace ll2
