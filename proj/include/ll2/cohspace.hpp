#pragma once

// Finite coherence spaces: a web of interned terms plus a reflexive
// symmetric coherence matrix, and the operations of the multiplicative,
// additive, exponential and affine structure. Everything is a value;
// operations return fresh spaces.

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ll2/graph.hpp"
#include "ll2/term.hpp"

namespace ll2 {

class Bits {
 public:
  Bits() = default;
  explicit Bits(size_t n) : n_(n), w_((n + 63) / 64, 0) {}
  bool get(size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  void set(size_t i, bool v = true) {
    if (v)
      w_[i >> 6] |= (uint64_t(1) << (i & 63));
    else
      w_[i >> 6] &= ~(uint64_t(1) << (i & 63));
  }
  size_t size() const { return n_; }
  bool operator==(const Bits& o) const { return n_ == o.n_ && w_ == o.w_; }

 private:
  size_t n_ = 0;
  std::vector<uint64_t> w_;
};

struct CohSpace {
  std::vector<TermId> web;   // sorted by compare_terms, no duplicates
  std::vector<Bits> coh;     // coh[i].get(j): symmetric, reflexive

  size_t size() const { return web.size(); }

  int find(TermId t) const {
    auto it = std::lower_bound(web.begin(), web.end(), t, TermLess{});
    if (it == web.end() || *it != t) return -1;
    return static_cast<int>(it - web.begin());
  }

  bool coherent(int i, int j) const { return coh[i].get(j); }

  bool coherent_t(TermId a, TermId b) const {
    int i = find(a), j = find(b);
    if (i < 0 || j < 0) throw std::out_of_range("CohSpace::coherent_t: point not in web");
    return coh[i].get(j);
  }

  bool operator==(const CohSpace& o) const { return web == o.web && coh == o.coh; }
};

inline CohSpace make_space(std::vector<TermId> web, const std::function<bool(TermId, TermId)>& rel) {
  std::sort(web.begin(), web.end(), TermLess{});
  web.erase(std::unique(web.begin(), web.end()), web.end());
  CohSpace s;
  s.web = std::move(web);
  s.coh.assign(s.web.size(), Bits(s.web.size()));
  for (size_t i = 0; i < s.web.size(); ++i) {
    s.coh[i].set(i);
    for (size_t j = i + 1; j < s.web.size(); ++j)
      if (rel(s.web[i], s.web[j])) {
        s.coh[i].set(j);
        s.coh[j].set(i);
      }
  }
  return s;
}

inline CohSpace space_from_graph(const Graph& g, const std::string& tag) {
  uint32_t id = TermArena::get().intern_tag(tag);
  std::vector<TermId> web;
  for (int i = 0; i < g.n; ++i) web.push_back(t_tok(id, i));
  // tok comparison is by (tag, index): already sorted
  CohSpace s;
  s.web = std::move(web);
  s.coh.assign(g.n, Bits(g.n));
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (g.coh(i, j)) s.coh[i].set(j);
  return s;
}

inline CohSpace one_space() {
  CohSpace s;
  s.web = {t_unit()};
  s.coh.assign(1, Bits(1));
  s.coh[0].set(0);
  return s;
}

inline CohSpace zero_space() { return CohSpace{}; }

inline CohSpace dual_space(const CohSpace& x) {
  CohSpace s = x;
  for (size_t i = 0; i < s.size(); ++i)
    for (size_t j = 0; j < s.size(); ++j) s.coh[i].set(j, i == j || !x.coh[i].get(j));
  return s;
}

inline CohSpace tensor(const CohSpace& x, const CohSpace& y) {
  std::vector<TermId> web;
  web.reserve(x.size() * y.size());
  for (TermId a : x.web)
    for (TermId b : y.web) web.push_back(t_pair(a, b));
  return make_space(std::move(web), [&](TermId p, TermId q) {
    const TermNode& np = tnode(p);
    const TermNode& nq = tnode(q);
    return x.coherent_t(np.a, nq.a) && y.coherent_t(np.b, nq.b);
  });
}

inline CohSpace plus(const CohSpace& x, const CohSpace& y) {
  std::vector<TermId> web;
  for (TermId a : x.web) web.push_back(t_inl(a));
  for (TermId b : y.web) web.push_back(t_inr(b));
  return make_space(std::move(web), [&](TermId p, TermId q) {
    const TermNode& np = tnode(p);
    const TermNode& nq = tnode(q);
    if (np.kind != nq.kind) return false;
    return np.kind == TK::Inl ? x.coherent_t(np.a, nq.a) : y.coherent_t(np.a, nq.a);
  });
}

inline CohSpace par(const CohSpace& x, const CohSpace& y) {
  return dual_space(tensor(dual_space(x), dual_space(y)));
}

inline CohSpace with_(const CohSpace& x, const CohSpace& y) {
  return dual_space(plus(dual_space(x), dual_space(y)));
}

inline CohSpace lollipop(const CohSpace& x, const CohSpace& y) { return par(dual_space(x), y); }

inline bool is_clique(const std::vector<TermId>& s, const CohSpace& x) {
  for (size_t i = 0; i < s.size(); ++i) {
    int a = x.find(s[i]);
    if (a < 0) return false;
    for (size_t j = i + 1; j < s.size(); ++j) {
      int b = x.find(s[j]);
      if (b < 0 || !x.coherent(a, b)) return false;
    }
  }
  return true;
}

// All cliques, deterministic order (by point index, lexicographic), the
// empty clique first. `cap`: hard bound on the count, throws beyond.
inline std::vector<std::vector<TermId>> enumerate_cliques(const CohSpace& x, size_t cap = 1u << 20) {
  std::vector<std::vector<TermId>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int from) -> void {
    std::vector<TermId> c;
    c.reserve(cur.size());
    for (int i : cur) c.push_back(x.web[i]);
    out.push_back(std::move(c));
    if (out.size() > cap) throw std::runtime_error("enumerate_cliques: cap exceeded");
    for (int v = from; v < static_cast<int>(x.size()); ++v) {
      bool ok = true;
      for (int u : cur)
        if (!x.coherent(u, v)) { ok = false; break; }
      if (!ok) continue;
      cur.push_back(v);
      self(self, v + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

// ---- embeddings ----

inline bool is_embedding(const std::vector<int>& f, const CohSpace& x, const CohSpace& y) {
  if (f.size() != x.size()) return false;
  std::vector<bool> used(y.size(), false);
  for (size_t i = 0; i < f.size(); ++i) {
    if (f[i] < 0 || f[i] >= static_cast<int>(y.size()) || used[f[i]]) return false;
    used[f[i]] = true;
  }
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = 0; j < x.size(); ++j)
      if (x.coherent(i, j) != y.coherent(f[i], f[j])) return false;
  return true;
}

inline std::vector<std::vector<int>> enumerate_embeddings(const CohSpace& x, const CohSpace& y) {
  std::vector<std::vector<int>> out;
  std::vector<int> img(x.size(), -1);
  std::vector<bool> used(y.size(), false);
  auto rec = [&](auto&& self, size_t i) -> void {
    if (i == x.size()) {
      out.push_back(img);
      return;
    }
    for (size_t v = 0; v < y.size(); ++v) {
      if (used[v]) continue;
      bool ok = true;
      for (size_t j = 0; j < i; ++j)
        if (x.coherent(i, j) != y.coherent(v, img[j])) { ok = false; break; }
      if (!ok) continue;
      img[i] = static_cast<int>(v);
      used[v] = true;
      self(self, i + 1);
      used[v] = false;
    }
  };
  rec(rec, 0);
  return out;
}

// Embeddings of a bound-space graph into a space, as index vectors.
inline std::vector<std::vector<int>> embeddings_into(const Graph& g, const CohSpace& y) {
  std::vector<std::vector<int>> out;
  std::vector<int> img(g.n, -1);
  std::vector<bool> used(y.size(), false);
  auto rec = [&](auto&& self, int i) -> void {
    if (i == g.n) {
      out.push_back(img);
      return;
    }
    for (size_t v = 0; v < y.size(); ++v) {
      if (used[v]) continue;
      bool ok = true;
      for (int j = 0; j < i; ++j)
        if (g.coh(i, j) != y.coherent(v, img[j])) { ok = false; break; }
      if (!ok) continue;
      img[i] = static_cast<int>(v);
      used[v] = true;
      self(self, i + 1);
      used[v] = false;
    }
  };
  rec(rec, 0);
  return out;
}

inline uint64_t count_embeddings_into(const Graph& g, const CohSpace& y) {
  uint64_t cnt = 0;
  std::vector<int> img(g.n, -1);
  std::vector<bool> used(y.size(), false);
  auto rec = [&](auto&& self, int i) -> void {
    if (i == g.n) { ++cnt; return; }
    for (size_t v = 0; v < y.size(); ++v) {
      if (used[v]) continue;
      bool ok = true;
      for (int j = 0; j < i; ++j)
        if (g.coh(i, j) != y.coherent(v, img[j])) { ok = false; break; }
      if (!ok) continue;
      img[i] = static_cast<int>(v);
      used[v] = true;
      self(self, i + 1);
      used[v] = false;
    }
  };
  rec(rec, 0);
  return cnt;
}

// ---- exponential ----

inline CohSpace bang(const CohSpace& x, size_t cap = 1u << 20) {
  auto cliques = enumerate_cliques(x, cap);
  std::vector<TermId> web;
  web.reserve(cliques.size());
  for (auto& c : cliques) web.push_back(t_bang(c));
  return make_space(std::move(web), [&](TermId p, TermId q) {
    auto a = bang_elems(p);
    auto b = bang_elems(q);
    for (TermId u : a)
      for (TermId v : b)
        if (!x.coherent_t(u, v)) return false;
    return true;
  });
}

// ---- morphisms: cliques of x -o y are sets of Pair(a,b) ----

inline std::vector<TermId> compose(const std::vector<TermId>& c, const std::vector<TermId>& d) {
  std::vector<TermId> out;
  for (TermId p : c) {
    const TermNode& np = tnode(p);
    for (TermId q : d) {
      const TermNode& nq = tnode(q);
      if (np.b == nq.a) out.push_back(t_pair(np.a, nq.b));
    }
  }
  std::sort(out.begin(), out.end(), TermLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<TermId> identity_clique(const CohSpace& x) {
  std::vector<TermId> out;
  for (TermId t : x.web) out.push_back(t_pair(t, t));
  return out;
}

// Relational image c(s) = { y | (x,y) in c, x in s }.
inline std::vector<TermId> apply_clique(const std::vector<TermId>& c, const std::vector<TermId>& s) {
  std::vector<TermId> out;
  for (TermId p : c) {
    const TermNode& np = tnode(p);
    if (std::binary_search(s.begin(), s.end(), np.a, TermLess{})) out.push_back(np.b);
  }
  std::sort(out.begin(), out.end(), TermLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---- affine structure: X -o' Y = (X -o Y) & Y ----

inline CohSpace affine_space(const CohSpace& x, const CohSpace& y) {
  return with_(lollipop(x, y), y);
}

struct AffineClique {
  std::vector<TermId> linear;    // pairs, the (X -o Y) side
  std::vector<TermId> constant;  // points of Y
};

inline AffineClique affine_split(const std::vector<TermId>& c) {
  AffineClique r;
  for (TermId t : c) {
    const TermNode& n = tnode(t);
    if (n.kind == TK::Inl)
      r.linear.push_back(n.a);
    else if (n.kind == TK::Inr)
      r.constant.push_back(n.a);
    else
      throw std::invalid_argument("affine_split: not a point of an affine function space");
  }
  std::sort(r.linear.begin(), r.linear.end(), TermLess{});
  std::sort(r.constant.begin(), r.constant.end(), TermLess{});
  return r;
}

inline std::vector<TermId> affine_join(const AffineClique& a) {
  std::vector<TermId> out;
  for (TermId t : a.linear) out.push_back(t_inl(t));
  for (TermId t : a.constant) out.push_back(t_inr(t));
  std::sort(out.begin(), out.end(), TermLess{});
  return out;
}

// c' o_aff c = (c'_1 o c_1) |_| (c'_2 u c'_1(c_2))
inline std::vector<TermId> affine_compose(const std::vector<TermId>& c, const std::vector<TermId>& d) {
  AffineClique a = affine_split(c), b = affine_split(d);
  AffineClique r;
  r.linear = compose(a.linear, b.linear);
  r.constant = b.constant;
  auto extra = apply_clique(b.linear, a.constant);
  r.constant.insert(r.constant.end(), extra.begin(), extra.end());
  std::sort(r.constant.begin(), r.constant.end(), TermLess{});
  r.constant.erase(std::unique(r.constant.begin(), r.constant.end()), r.constant.end());
  return affine_join(r);
}

// Extensional application of an affine map: f(q) = f_1(q) u f_2.
inline std::vector<TermId> affine_apply(const std::vector<TermId>& c, const std::vector<TermId>& q) {
  AffineClique a = affine_split(c);
  auto out = apply_clique(a.linear, q);
  out.insert(out.end(), a.constant.begin(), a.constant.end());
  std::sort(out.begin(), out.end(), TermLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---- stock spaces ----

inline CohSpace discrete(int n) { return space_from_graph(Graph::uniform(n, false), "d" + std::to_string(n)); }

// [n] = 1 & ... & 1: n pairwise coherent points.
inline CohSpace with_power(int n) { return space_from_graph(Graph::uniform(n, true), "n" + std::to_string(n)); }

// Direct sum of one representative of every isomorphism class of coherence
// spaces with <= d points; every space of size <= d embeds into it.
inline CohSpace universal_space(int d) {
  std::vector<Graph> classes = graphs_up_to(d);
  int total = 0;
  for (auto& g : classes) total += g.n;
  Graph big;
  if (total > Graph::kMax) {
    // build the matrix directly; Graph caps at 16 vertices
    uint32_t tag = TermArena::get().intern_tag("u" + std::to_string(d));
    std::vector<TermId> web;
    for (int i = 0; i < total; ++i) web.push_back(t_tok(tag, i));
    CohSpace s;
    s.web = std::move(web);
    s.coh.assign(total, Bits(total));
    int off = 0;
    for (auto& g : classes) {
      for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
          if (g.coh(i, j)) s.coh[off + i].set(off + j);
      off += g.n;
    }
    for (int i = 0; i < total; ++i) s.coh[i].set(i);
    return s;
  }
  big.n = static_cast<uint8_t>(total);
  for (int i = 0; i < total; ++i) big.rows[i] = static_cast<uint16_t>(1u << i);
  int off = 0;
  for (auto& g : classes) {
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        if (g.coh(i, j)) big.set_coh(off + i, off + j, true);
    off += g.n;
  }
  return space_from_graph(big, "u" + std::to_string(d));
}

// ---- term printing ----

inline std::map<std::pair<uint32_t, uint32_t>, std::string>& tok_names() {
  static std::map<std::pair<uint32_t, uint32_t>, std::string> m;
  return m;
}

inline std::string show_tok(uint32_t tag, uint32_t idx) {
  auto it = tok_names().find({tag, idx});
  if (it != tok_names().end()) return it->second;
  return TermArena::get().tag(tag) + std::to_string(idx);
}

// Slot variables print a..z (with a numeric suffix for later indices); vars
// bound by the k-th Bind on the path print xk_i.
inline std::string var_name(uint32_t level, uint32_t index, int n_slots) {
  if (static_cast<int>(level) < n_slots) {
    std::string s(1, static_cast<char>('a' + (level % 26)));
    s += index == 0 ? "" : std::to_string(index);
    if (static_cast<int>(level) >= 26) s += "'";
    return s;
  }
  return "x" + std::to_string(level - n_slots) + (index == 0 ? "" : "_" + std::to_string(index));
}

inline std::string show_term_at(TermId t, int n_slots, int depth) {
  const TermNode& n = tnode(t);
  switch (n.kind) {
    case TK::Var:
      return var_name(n.a, n.b, n_slots);
    case TK::Tok:
      return show_tok(n.a, n.b);
    case TK::Unit:
      return "*";
    case TK::Pair:
      return "(" + show_term_at(n.a, n_slots, depth) + ", " + show_term_at(n.b, n_slots, depth) + ")";
    case TK::Inl:
      return "inl " + show_term_at(n.a, n_slots, depth);
    case TK::Inr:
      return "inr " + show_term_at(n.a, n_slots, depth);
    case TK::Bang: {
      std::string s = "{";
      bool first = true;
      for (TermId e : bang_elems(t)) {
        if (!first) s += ", ";
        first = false;
        s += show_term_at(e, n_slots, depth);
      }
      return s + "}";
    }
    case TK::Bind: {
      const Graph& g = bind_graph(t);
      uint32_t lvl = static_cast<uint32_t>(n_slots + depth);
      std::string s = "<";
      for (int i = 0; i < g.n; ++i) {
        if (i) s += " ";
        s += var_name(lvl, i, n_slots);
      }
      std::string rel;
      for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j)
          if (g.coh(i, j)) {
            if (!rel.empty()) rel += ", ";
            rel += var_name(lvl, i, n_slots) + "~" + var_name(lvl, j, n_slots);
          }
      if (!rel.empty()) s += " | " + rel;
      return s + "> " + show_term_at(n.b, n_slots, depth + 1);
    }
  }
  return "?";
}

inline std::string show_term(TermId t, int n_slots = 0) { return show_term_at(t, n_slots, 0); }

// ---- space literals ----

// Literal syntax: {a,b,c; a~b, b~c}: named points, listed pairs coherent,
// everything else strictly incoherent.
inline CohSpace parse_space_literal(const std::string& text) {
  auto fail = [&](const std::string& m) { throw std::runtime_error("space literal: " + m); };
  size_t i = 0;
  auto skip = [&] { while (i < text.size() && isspace(static_cast<unsigned char>(text[i]))) ++i; };
  skip();
  if (i >= text.size() || text[i] != '{') fail("expected '{'");
  ++i;
  auto ident = [&]() -> std::string {
    skip();
    size_t j = i;
    while (j < text.size() && (isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
    if (j == i) fail("expected a point name");
    std::string w = text.substr(i, j - i);
    i = j;
    return w;
  };
  std::vector<std::string> names;
  skip();
  if (i < text.size() && text[i] == '}') {
    return zero_space();
  }
  names.push_back(ident());
  skip();
  while (i < text.size() && text[i] == ',') {
    ++i;
    names.push_back(ident());
    skip();
  }
  std::map<std::string, int> idx;
  for (size_t k = 0; k < names.size(); ++k) {
    if (idx.count(names[k])) fail("duplicate point '" + names[k] + "'");
    idx[names[k]] = static_cast<int>(k);
  }
  std::vector<std::pair<int, int>> edges;
  if (i < text.size() && text[i] == ';') {
    ++i;
    skip();
    while (i < text.size() && text[i] != '}') {
      std::string a = ident();
      skip();
      if (i >= text.size() || text[i] != '~') fail("expected '~'");
      ++i;
      std::string b = ident();
      if (!idx.count(a) || !idx.count(b)) fail("unknown point in coherence list");
      edges.emplace_back(idx[a], idx[b]);
      skip();
      if (i < text.size() && text[i] == ',') { ++i; skip(); }
    }
  }
  if (i >= text.size() || text[i] != '}') fail("expected '}'");
  uint32_t tag = TermArena::get().intern_tag("lit:" + text);
  CohSpace s;
  for (size_t k = 0; k < names.size(); ++k) s.web.push_back(t_tok(tag, static_cast<uint32_t>(k)));
  s.coh.assign(names.size(), Bits(names.size()));
  for (size_t k = 0; k < names.size(); ++k) s.coh[k].set(k);
  for (auto& e : edges) {
    s.coh[e.first].set(e.second);
    s.coh[e.second].set(e.first);
  }
  for (size_t k = 0; k < names.size(); ++k)
    tok_names()[{tag, static_cast<uint32_t>(k)}] = names[k];
  return s;
}

inline std::string dot_export(const CohSpace& x, const std::string& name = "space") {
  std::ostringstream os;
  os << "graph " << name << " {\n";
  for (size_t i = 0; i < x.size(); ++i)
    os << "  p" << i << " [label=\"" << show_term(x.web[i]) << "\"];\n";
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = i + 1; j < x.size(); ++j)
      if (x.coherent(i, j)) os << "  p" << i << " -- p" << j << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace ll2
