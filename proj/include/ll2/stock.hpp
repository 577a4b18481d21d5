#pragma once

// Stock proofs: booleans, composition pipes, Church strings and snoc.
//
// Conventions. D(a) = a -o a; Str[a] = !D -o !D -o !D with the first
// argument the 0-step function. A word w = x1...xk is encoded so the
// letter read first is applied first: the composite is f_xk o ... o f_x1.

#include <string>
#include <vector>

#include "ll2/sequent.hpp"

namespace ll2 {

inline Fm f_bool() { return f_plus(f_one(), f_one()); }
inline Fm f_step(const Fm& a) { return f_lollipop(a, a); }  // a -o a

inline Fm f_str_of(const Fm& a) {
  Fm d = f_step(a);
  return f_lollipop(f_bang(d), f_lollipop(f_bang(d), f_bang(d)));
}

inline Fm f_str() { return f_forall("X", f_str_of(f_var("X"))); }

inline Proof p_true() { return p_plusl(f_one(), p_one()); }
inline Proof p_false() { return p_plusr(f_one(), p_one()); }

// |- ~a, a
inline Proof p_id_pair(const Fm& a) { return p_ax(dual(a)); }

// Composition pipe with k function inputs:
//   |- ~a, D', ..., D', a      (D' = dual(a -o a), one per input,
//                               in application order)
// Built by stacking tensor steps on the axiom.
inline Proof p_comp_chain(const Fm& a, int k) {
  Proof cur = p_id_pair(a);  // |- ~a, a
  for (int i = 0; i < k; ++i) {
    // prem1 = cur (last = a), prem2 = |- ~a, a  =>  ..., a * ~a, a
    cur = p_tensor(cur, p_id_pair(a));
  }
  return cur;
}

// |- D', ..., D', a -o a: the chain with its endpoints folded into a par.
inline Proof p_composite(const Fm& a, int k) {
  Proof cur = p_comp_chain(a, k);
  // conclusion: ~a, D'...D', a; bring ~a next to the final a
  cur = p_move(cur, 0, k);
  return p_par(cur);
}

namespace detail {

// Proof under construction plus a char tag per conclusion position, so
// exchanges never lose track of what sits where.
struct SeqBuilder {
  Proof p;
  std::string tags;

  int find(char c) const {
    auto i = tags.find(c);
    return i == std::string::npos ? -1 : static_cast<int>(i);
  }

  void move(int from, int to) {
    p = p_move(p, from, to);
    char c = tags[from];
    tags.erase(tags.begin() + from);
    tags.insert(tags.begin() + to, c);
  }

  void move_tag(char c, int to) { move(find(c), to); }

  // contract the last two positions (must carry ?-formulas)
  void contract(char merged) {
    p = p_contraction(p);
    tags.pop_back();
    tags.back() = merged;
  }

  void weaken(const Fm& a, char tag) {
    p = p_weakening(a, p);
    tags.push_back(tag);
  }

  void par(char merged) {
    p = p_par(p);
    tags.pop_back();
    tags.back() = merged;
  }
};

}  // namespace detail

// Church encoding of a binary word at type a: |- Str[a].
inline Proof church(const std::string& w, const Fm& a) {
  int k = static_cast<int>(w.size());
  Fm wk = dual(f_step(a));  // payload of weakenings: the formula under ?
  detail::SeqBuilder b;
  b.p = p_promotion(p_composite(a, k));  // |- ?D'_1..?D'_k, !D
  b.tags = w + "!";
  // collapse each letter group to one channel, parked at the end
  for (char bit : {'1', '0'}) {
    char merged = bit == '1' ? 'B' : 'A';
    if (b.find(bit) < 0) {
      b.weaken(wk, merged);
      continue;
    }
    b.move_tag(bit, static_cast<int>(b.tags.size()) - 1);
    b.tags.back() = merged;
    while (b.find(bit) >= 0) {
      b.move_tag(bit, static_cast<int>(b.tags.size()) - 2);
      b.contract(merged);
    }
  }
  // arrange |- ?D'(0), ?D'(1), !D and fold the two pars
  b.move_tag('A', 0);
  b.move_tag('B', 1);
  b.move_tag('!', 2);
  b.par('S');
  b.par('S');
  return b.p;
}

// |- Str (with the quantifier), for the generic variable X.
inline Proof church_generic(const std::string& w) { return p_forall("X", church(w, f_var("X"))); }

// snoc^x at type a, in the two-formula form |- Str[a]', Str[a]; cutting a
// word |- Str[a] against it appends the letter x.
inline Proof snoc_open(int x, const Fm& a) {
  // pipe: |- ?D', !D (one function channel in, the boxed function out)
  auto pipe = [&]() -> Proof {
    Proof c = p_comp_chain(a, 1);  // |- ~a, D', a
    c = p_move(c, 0, 1);           // |- D', ~a, a
    c = p_par(c);                  // |- D', D
    return p_promotion(c);         // |- ?D', !D
  };
  // post piece: |- ?D'(s-out), ?D'(fx), !D(out): composite of the string's
  // own output with one extra use of the x-step
  Proof post = p_comp_chain(a, 2);  // |- ~a, D'1, D'2, a
  post = p_move(post, 0, 2);        // |- D'1, D'2, ~a, a
  post = p_par(post);               // |- D'1, D'2, D
  post = p_promotion(post);         // |- ?D'1(s-out), ?D'2(fx), !D

  detail::SeqBuilder b;
  // inner tensor: |- ?D'(f1), !D * ?D'(s-out), ?D'(fx), !D
  b.p = p_tensor(pipe(), post);
  b.tags = "1Tx!";
  b.move_tag('T', 0);  // |- !D*?D', ?D'(f1), ?D'(fx), !D
  // outer tensor: prem1 = pipe (last = !D), prem2 = current (first = the tensor)
  b.p = p_tensor(pipe(), b.p);
  b.tags = "0S" + b.tags.substr(1);  // |- ?D'(f0), Str', ?D'(f1), ?D'(fx), !D
  // contract the extra step use into its letter group
  char grp = x == 1 ? '1' : '0';
  b.move_tag('!', 0);
  b.move_tag(grp, static_cast<int>(b.tags.size()) - 2);  // beside 'x'
  {
    // ensure orientation: group channel then x-channel at the end
    if (b.tags[b.tags.size() - 1] != 'x') b.move_tag('x', static_cast<int>(b.tags.size()) - 1);
    b.contract(grp);
  }
  // arrange |- Str', ?D'(f0), ?D'(f1), !D
  b.move_tag('S', 0);
  b.move_tag('0', 1);
  b.move_tag('1', 2);
  b.move_tag('!', 3);
  b.par('R');
  b.par('R');  // |- Str', Str
  return b.p;
}

// |- Str[a] -o Str[a]
inline Proof snoc_proof(int x, const Fm& a) { return p_par(snoc_open(x, a)); }

// Tensor of word encodings; gives the initial DFA state when w is empty.
inline Proof p_tensor_words(const std::string& w, const std::vector<Fm>& witnesses) {
  if (witnesses.empty()) return p_one();
  Proof cur = church(w, witnesses.back());
  for (size_t i = witnesses.size() - 1; i-- > 0;) cur = p_tensor(church(w, witnesses[i]), cur);
  return cur;
}

}  // namespace ll2
