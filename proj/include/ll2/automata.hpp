#pragma once

// Semantic evaluation of string-typed proofs: a DFA whose states are the
// reachable cliques of the (finite) denotation of the input type, with
// transitions given by composing with the snoc denotations, plus the
// reference automaton encodings and the purely syntactic evaluator they
// are validated against.

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ll2/denotproof.hpp"
#include "ll2/trunc.hpp"

namespace ll2 {

struct Dfa {
  struct State {
    std::vector<TermId> clique;  // the denotation backing the state
    int next[2] = {-1, -1};
    bool accepting = false;
  };
  std::vector<State> states;
  int initial = 0;

  bool run(const std::string& w) const {
    int q = initial;
    for (char c : w) {
      if (c != '0' && c != '1') throw std::invalid_argument("run_dfa: binary words only");
      q = states[q].next[c - '0'];
    }
    return states[q].accepting;
  }
};

inline bool run_dfa(const Dfa& d, const std::string& w) { return d.run(w); }

// Breadth-first product search; returns a shortest counterexample word of
// length <= maxlen if the automata differ on one.
inline std::optional<std::string> dfa_equiv(const Dfa& a, const Dfa& b, int maxlen) {
  std::set<std::pair<int, int>> seen;
  std::deque<std::tuple<int, int, std::string>> queue;
  queue.emplace_back(a.initial, b.initial, "");
  seen.insert({a.initial, b.initial});
  while (!queue.empty()) {
    auto [qa, qb, w] = queue.front();
    queue.pop_front();
    if (a.states[qa].accepting != b.states[qb].accepting) return w;
    if (static_cast<int>(w.size()) >= maxlen) continue;
    for (int x : {0, 1}) {
      int na = a.states[qa].next[x], nb = b.states[qb].next[x];
      if (seen.insert({na, nb}).second) queue.emplace_back(na, nb, w + char('0' + x));
    }
  }
  return std::nullopt;
}

// ---- hand-written reference automata ----

struct DfaDescription {
  int n_states = 1;
  int initial = 0;
  std::vector<int> delta0, delta1;  // total transition tables
  std::vector<bool> accepting;
};

inline DfaDescription dfa_accept_all() { return {1, 0, {0}, {0}, {true}}; }

inline DfaDescription dfa_parity() {  // even number of 1s
  return {2, 0, {0, 1}, {1, 0}, {true, false}};
}

inline DfaDescription dfa_contains00() {
  // 0: nothing, 1: just saw a 0, 2: saw 00 (sink)
  return {3, 0, {1, 2, 2}, {0, 0, 2}, {false, false, true}};
}

inline Dfa dfa_of_description(const DfaDescription& d) {
  Dfa out;
  out.initial = d.initial;
  out.states.resize(d.n_states);
  for (int s = 0; s < d.n_states; ++s) {
    out.states[s].next[0] = d.delta0[s];
    out.states[s].next[1] = d.delta1[s];
    out.states[s].accepting = d.accepting[s];
  }
  return out;
}

// ---- encoding a DFA as a proof of |- !Str -o !!Bool ----

namespace automata_detail {

// the state type 1 + 1 + ... + 1 (right-nested); n >= 1
inline Fm state_formula(int n) {
  if (n == 1) return f_one();
  return f_plus(f_one(), state_formula(n - 1));
}

// |- Q selecting state j
inline Proof select_state(int j, int n) {
  if (n == 1) return p_one();
  if (j == 0) return p_plusl(state_formula(n - 1), p_one());
  return p_plusr(f_one(), select_state(j - 1, n - 1));
}

// |- C, dual(Q_n) by with-branches; mk(s) builds |- C for state s
template <class MkBranch>
Proof with_branches(int n, int offset, const MkBranch& mk) {
  if (n == 1) return p_bot(mk(offset));  // |- C, bot
  Proof l = p_bot(mk(offset));
  Proof r = with_branches(n - 1, offset + 1, mk);
  return p_with(std::move(l), std::move(r));  // |- C, bot & dual(Q_{n-1})
}

}  // namespace automata_detail

// The constructive half of the regular-language characterization: every
// DFA yields a deciding proof, by instantiating the string at the state
// type and handing it the two transition functions.
inline Proof reference_dfa_encode(const DfaDescription& d) {
  using namespace automata_detail;
  int n = d.n_states;
  Fm q = state_formula(n);
  auto delta_fn = [&](const std::vector<int>& table) -> Proof {
    Proof body = with_branches(n, 0, [&](int s) { return select_state(table[s], n); });
    body = p_move(body, 0, 1);  // |- dual(Q), Q
    body = p_par(body);         // |- Q -o Q
    return p_promotion(body);   // |- !(Q -o Q)
  };
  Proof d0 = delta_fn(d.delta0);
  Proof d1 = delta_fn(d.delta1);
  // final predicate: apply the composite to the initial state and test
  Proof accept = with_branches(n, 0, [&](int s) { return d.accepting[s] ? p_true() : p_false(); });
  accept = p_move(accept, 0, 1);                              // |- dual(Q), Bool
  Proof pred = p_tensor(select_state(d.initial, n), accept);  // |- Q * dual(Q), Bool
  pred = p_promotion(pred);                                   // |- ?(dual(Q-oQ)), !Bool
  // assemble Str[Q]' = !(Q-oQ) * (!(Q-oQ) * ?(dual(Q-oQ)))
  Proof inner = p_tensor(d1, pred);   // |- !D * ?D', !Bool
  Proof outer = p_tensor(d0, inner);  // |- Str[Q]', !Bool
  Proof ex = p_move(outer, 0, 1);     // |- !Bool, Str[Q]'
  ex = p_exists(dual(f_str()), q, ex);
  ex = p_move(ex, 0, 1);  // |- Str', !Bool
  ex = p_promotion(ex);   // |- ?Str', !!Bool
  return p_par(ex);       // |- !Str -o !!Bool
}

// ---- syntactic evaluation ----

// Cut the proof against the promoted Church word and normalize; accepts
// iff the normal form is the canonical !!true.
inline bool syntactic_eval(const Proof& p, const std::string& w, uint64_t fuel = 4'000'000) {
  Fm strty = f_str();
  Fm boolb = f_bang(f_bang(f_bool()));
  Sequent s = check_proof(p);
  Proof two;
  if (s.size() == 1) {
    // unfold the lollipop with an eta gadget: cut against
    // |- !Str * (!!Bool)', ?Str', !!Bool
    Proof g1 = p_move(p_ax(f_bang(strty)), 0, 1);  // |- ?Str', !Str
    Proof g2 = p_ax(dual(boolb));                  // |- (!!Bool)', !!Bool
    Proof gadget = p_tensor(g1, g2);               // |- ?Str', !Str * (!!Bool)', !!Bool
    gadget = p_move(gadget, 1, 0);
    two = p_cut(p, gadget);  // |- ?Str', !!Bool
  } else {
    two = p;
  }
  Sequent ts = check_proof(two);
  if (ts.size() != 2 || !alpha_equal(ts[0], f_quest(dual(strty))) || !alpha_equal(ts[1], boolb))
    throw std::invalid_argument("syntactic_eval: not a proof of !Str -o !!Bool");
  Proof word = p_promotion(church_generic(w));  // |- !Str
  Proof app = p_cut(word, two);                 // |- !!Bool
  Proof nf = cut_eliminate(app, fuel);
  // the only cut-free proofs of |- !!Bool are !!true and !!false
  const ProofNode* cur = nf.get();
  for (int t = 0; t < 2; ++t) {
    if (cur->rule != Rule::Promotion) throw std::logic_error("syntactic_eval: unexpected normal form");
    cur = cur->premises[0].get();
  }
  if (cur->rule == Rule::PlusL) return true;
  if (cur->rule == Rule::PlusR) return false;
  throw std::logic_error("syntactic_eval: unexpected normal form");
}

// ---- semantic extraction ----

struct ExtractStats {
  size_t snoc_members[2] = {0, 0};
  size_t core_members = 0;
};

namespace automata_detail {

// split a point of Str[A_1] x (Str[A_2] x ...) into its n components
inline void unfold_tuple(TermId pt, int n, std::vector<TermId>& comps) {
  comps.clear();
  TermId cur = pt;
  for (int t = 0; t < n; ++t) {
    if (t + 1 < n) {
      comps.push_back(tnode(cur).a);
      cur = tnode(cur).b;
    } else {
      comps.push_back(cur);
    }
  }
}

inline TermId fold_tuple(const std::vector<TermId>& comps) {
  if (comps.empty()) return t_unit();
  TermId cur = comps.back();
  for (size_t t = comps.size() - 1; t-- > 0;) cur = t_pair(comps[t], cur);
  return cur;
}

}  // namespace automata_detail

// Extract the automaton of a decomposed string proof. States are the
// reachable cliques of [[Str[A_1] x ... x Str[A_n]]] from the empty-word
// denotation; transitions compose componentwise with the snoc morphisms;
// acceptance composes with the core and compares with true at Bool (the
// union of the composed !Bool cliques).
// `max_depth` < 0 explores the full reachable orbit; otherwise only states
// within that many letters of the initial one are materialized (missing
// transitions stay -1), which is enough for bounded-word checks.
inline Dfa extract_dfa(const StringDecomposition& d, Ctx& cx, size_t state_cap = 1u << 16,
                       int max_depth = -1, ExtractStats* stats = nullptr) {
  using automata_detail::fold_tuple;
  using automata_detail::unfold_tuple;
  int n = static_cast<int>(d.witnesses.size());
  {
    // the semantics distinguishes the booleans; extraction relies on it
    ProofDen t = denote_proof(p_true(), cx);
    ProofDen f = denote_proof(p_false(), cx);
    if (same_denotation(t, f)) throw std::logic_error("extract_dfa: booleans collapsed");
  }
  // componentwise snoc morphisms, bucketed input -> outputs
  std::vector<std::map<TermId, std::vector<TermId>>> snoc_im[2];
  for (int x : {0, 1}) {
    snoc_im[x].resize(n);
    for (int t = 0; t < n; ++t) {
      ProofDen den = denote_proof(snoc_open(x, d.witnesses[t]), cx);
      if (stats) stats->snoc_members[x] += den.nrows;
      for (size_t r = 0; r < den.nrows; ++r)
        snoc_im[x][t][den.flat[r * 2]].push_back(den.flat[r * 2 + 1]);
    }
  }

  ProofDen init = denote_proof(p_tensor_words("", d.witnesses), cx);
  std::vector<TermId> q0(init.flat.begin(), init.flat.end());
  std::sort(q0.begin(), q0.end());

  ProofDen core = denote_proof(d.core, cx);
  if (stats) stats->core_members = core.nrows;
  size_t w = core.width;
  TermId truepoint = t_inl(t_unit());

  auto accepting = [&](const std::vector<TermId>& q) -> bool {
    // core rows: (s_1, .., s_n, b); collect b over rows whose input tuple
    // lies in q, then compare the union at Bool
    std::set<TermId> outs;
    for (size_t r = 0; r < core.nrows; ++r) {
      TermId folded;
      if (n == 0) {
        folded = t_unit();
      } else {
        std::vector<TermId> comps(core.flat.begin() + r * w, core.flat.begin() + r * w + n);
        folded = fold_tuple(comps);
      }
      bool inq = n == 0 ? std::binary_search(q.begin(), q.end(), t_unit())
                        : std::binary_search(q.begin(), q.end(), folded);
      if (inq) outs.insert(core.flat[r * w + w - 1]);
    }
    std::set<TermId> uni;
    for (TermId b : outs)
      for (TermId e : bang_elems(b)) uni.insert(e);
    return uni.size() == 1 && *uni.begin() == truepoint;
  };

  auto transition = [&](const std::vector<TermId>& q, int x) -> std::vector<TermId> {
    std::set<TermId> out;
    std::vector<TermId> comps;
    for (TermId pt : q) {
      if (n == 0) {
        out.insert(pt);
        continue;
      }
      unfold_tuple(pt, n, comps);
      std::vector<const std::vector<TermId>*> images(n);
      bool any = true;
      for (int t = 0; t < n && any; ++t) {
        auto it = snoc_im[x][t].find(comps[t]);
        if (it == snoc_im[x][t].end())
          any = false;
        else
          images[t] = &it->second;
      }
      if (!any) continue;
      std::vector<size_t> pick(n, 0);
      std::vector<TermId> chosen(n);
      for (;;) {
        for (int t = 0; t < n; ++t) chosen[t] = (*images[t])[pick[t]];
        out.insert(fold_tuple(chosen));
        int t = 0;
        for (; t < n; ++t) {
          if (++pick[t] < images[t]->size()) break;
          pick[t] = 0;
        }
        if (t == n) break;
      }
    }
    std::vector<TermId> res(out.begin(), out.end());
    std::sort(res.begin(), res.end());
    return res;
  };

  Dfa dfa;
  std::map<std::vector<TermId>, int> index;
  std::deque<std::pair<int, int>> frontier;  // state, depth
  std::vector<int> depth_of;
  auto state_of = [&](std::vector<TermId> q, int depth) -> int {
    auto it = index.find(q);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(dfa.states.size());
    if (dfa.states.size() >= state_cap) throw CapError("extract_dfa: state cap exceeded");
    Dfa::State st;
    st.clique = q;
    st.accepting = accepting(q);
    dfa.states.push_back(std::move(st));
    depth_of.push_back(depth);
    index.emplace(std::move(q), id);
    frontier.emplace_back(id, depth);
    return id;
  };
  dfa.initial = state_of(q0, 0);
  while (!frontier.empty()) {
    auto [id, depth] = frontier.front();
    frontier.pop_front();
    if (max_depth >= 0 && depth >= max_depth) continue;
    for (int x : {0, 1}) {
      auto next = transition(dfa.states[id].clique, x);
      int nid = state_of(std::move(next), depth + 1);
      dfa.states[id].next[x] = nid;
    }
  }
  return dfa;
}

inline std::string dfa_dot(const Dfa& d) {
  std::ostringstream os;
  os << "digraph dfa {\n  rankdir=LR;\n";
  for (size_t s = 0; s < d.states.size(); ++s) {
    os << "  q" << s << " [shape=" << (d.states[s].accepting ? "doublecircle" : "circle")
       << ",label=\"q" << s << " (" << d.states[s].clique.size() << ")\"];\n";
  }
  os << "  start [shape=point];\n  start -> q" << d.initial << ";\n";
  for (size_t s = 0; s < d.states.size(); ++s)
    for (int x : {0, 1})
      os << "  q" << s << " -> q" << d.states[s].next[x] << " [label=\"" << x << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace ll2
