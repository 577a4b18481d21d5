#pragma once

// Small reflexive undirected graphs: the bound-variable spaces of normal
// forms, and the search space of the bounded coherence decision procedure.
// Capacity is 16 vertices, enough for amalgams of two bound spaces.

#include <array>
#include <cstdint>
#include <algorithm>
#include <functional>
#include <numeric>
#include <tuple>
#include <stdexcept>
#include <string>
#include <vector>

namespace ll2 {

struct Graph {
  static constexpr int kMax = 16;
  uint8_t n = 0;
  std::array<uint16_t, kMax> rows{};  // rows[i] bit j: i and j coherent; reflexive

  static Graph empty() { return Graph{}; }

  static Graph singleton() {
    Graph g;
    g.n = 1;
    g.rows[0] = 1;
    return g;
  }

  // n points, off-diagonal coherence constant
  static Graph uniform(int k, bool coherent) {
    if (k < 0 || k > kMax) throw std::invalid_argument("Graph::uniform size");
    Graph g;
    g.n = static_cast<uint8_t>(k);
    for (int i = 0; i < k; ++i)
      g.rows[i] = coherent ? static_cast<uint16_t>((1u << k) - 1) : static_cast<uint16_t>(1u << i);
    return g;
  }

  bool coh(int i, int j) const { return (rows[i] >> j) & 1; }

  void set_coh(int i, int j, bool v) {
    if (v) {
      rows[i] |= static_cast<uint16_t>(1u << j);
      rows[j] |= static_cast<uint16_t>(1u << i);
    } else {
      rows[i] &= static_cast<uint16_t>(~(1u << j));
      rows[j] &= static_cast<uint16_t>(~(1u << i));
    }
  }

  Graph complement() const {  // strict coherence flipped, diagonal kept
    Graph g;
    g.n = n;
    for (int i = 0; i < n; ++i) {
      g.rows[i] = static_cast<uint16_t>(~rows[i] & ((1u << n) - 1));
      g.rows[i] |= static_cast<uint16_t>(1u << i);
    }
    return g;
  }

  // Induced subgraph on the vertices listed in `keep` (in that order).
  Graph induced(const std::vector<int>& keep) const {
    Graph g;
    g.n = static_cast<uint8_t>(keep.size());
    for (size_t i = 0; i < keep.size(); ++i)
      for (size_t j = 0; j < keep.size(); ++j)
        if (coh(keep[i], keep[j])) g.rows[i] |= static_cast<uint16_t>(1u << j);
    return g;
  }

  Graph permuted(const std::vector<int>& perm) const {  // vertex i -> perm[i]
    Graph g;
    g.n = n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (coh(i, j)) g.rows[perm[i]] |= static_cast<uint16_t>(1u << perm[j]);
    return g;
  }

  bool operator==(const Graph& o) const {
    if (n != o.n) return false;
    for (int i = 0; i < n; ++i)
      if (rows[i] != o.rows[i]) return false;
    return true;
  }

  auto key() const {
    uint64_t lo = 0, hi = 0;
    for (int i = 0; i < n && i < 4; ++i) lo |= uint64_t(rows[i]) << (16 * i);
    for (int i = 4; i < n && i < 8; ++i) hi |= uint64_t(rows[i]) << (16 * (i - 4));
    // 16 rows do not fit in two words; fold the tail in
    for (int i = 8; i < n; ++i) hi = hi * 1000003u + rows[i];
    return std::tuple<uint8_t, uint64_t, uint64_t>(n, lo, hi);
  }

  bool operator<(const Graph& o) const { return key() < o.key(); }

  std::string dump() const {
    std::string s = std::to_string(int(n)) + ":";
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += coh(i, j) ? '1' : '0';
    return s;
  }
};

inline void for_each_permutation(int k, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  do f(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
}

// Lexicographically least permuted form; usable as an isomorphism-class key
// for the sizes that occur in bound spaces (<= ~8).
inline Graph canonical_graph(const Graph& g) {
  if (g.n <= 1) return g;
  Graph best = g;
  bool first = true;
  for_each_permutation(g.n, [&](const std::vector<int>& p) {
    Graph h = g.permuted(p);
    if (first || h < best) best = h, first = false;
  });
  return best;
}

// One representative per isomorphism class of reflexive graphs on exactly k
// vertices. Cached; k up to 6 is instantaneous, beyond that unsupported.
inline const std::vector<Graph>& graphs_of_size(int k) {
  static std::vector<std::vector<Graph>> cache;  // by size
  if (k < 0 || k > 6) throw std::invalid_argument("graphs_of_size: size out of range");
  if (static_cast<int>(cache.size()) > k) return cache[k];
  while (static_cast<int>(cache.size()) <= k) {
    int n = static_cast<int>(cache.size());
    std::vector<Graph> reps;
    int m = n * (n - 1) / 2;
    std::vector<Graph> seen;
    for (uint32_t bits = 0; bits < (1u << m); ++bits) {
      Graph g;
      g.n = static_cast<uint8_t>(n);
      for (int i = 0; i < n; ++i) g.rows[i] = static_cast<uint16_t>(1u << i);
      int e = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++e)
          if ((bits >> e) & 1) g.set_coh(i, j, true);
      Graph c = canonical_graph(g);
      bool dup = false;
      for (auto& h : seen)
        if (h == c) { dup = true; break; }
      if (!dup) seen.push_back(c);
    }
    std::sort(seen.begin(), seen.end());
    cache.push_back(std::move(seen));
  }
  return cache[k];
}

// All graphs with at most k vertices, one per isomorphism class.
inline std::vector<Graph> graphs_up_to(int k) {
  std::vector<Graph> out;
  for (int i = 0; i <= k; ++i)
    for (auto& g : graphs_of_size(i)) out.push_back(g);
  return out;
}

// Injections f : [a.n] -> [b.n] with a.coh(i,j) == b.coh(f i, f j).
inline std::vector<std::vector<int>> graph_embeddings(const Graph& a, const Graph& b) {
  std::vector<std::vector<int>> out;
  std::vector<int> img(a.n, -1);
  uint32_t used = 0;
  auto rec = [&](auto&& self, int i) -> void {
    if (i == a.n) {
      out.emplace_back(img.begin(), img.begin() + a.n);
      return;
    }
    for (int v = 0; v < b.n; ++v) {
      if ((used >> v) & 1) continue;
      bool ok = true;
      for (int j = 0; j < i; ++j)
        if (a.coh(i, j) != b.coh(v, img[j])) { ok = false; break; }
      if (!ok) continue;
      img[i] = v;
      used |= 1u << v;
      self(self, i + 1);
      used &= ~(1u << v);
    }
  };
  rec(rec, 0);
  return out;
}

// A partial matching between g and h that is an isomorphism on the induced
// subgraphs: dom (g-vertices, increasing), img (matched h-vertices).
struct PartialIso {
  std::vector<int> dom, img;
};

inline std::vector<PartialIso> partial_graph_isos(const Graph& g, const Graph& h) {
  std::vector<PartialIso> out;
  PartialIso cur;
  uint32_t used = 0;
  auto rec = [&](auto&& self, int from) -> void {
    out.push_back(cur);
    for (int i = from; i < g.n; ++i) {
      for (int v = 0; v < h.n; ++v) {
        if ((used >> v) & 1) continue;
        bool ok = true;
        for (size_t t = 0; t < cur.dom.size(); ++t)
          if (g.coh(i, cur.dom[t]) != h.coh(v, cur.img[t])) { ok = false; break; }
        if (!ok) continue;
        cur.dom.push_back(i);
        cur.img.push_back(v);
        used |= 1u << v;
        self(self, i + 1);
        used &= ~(1u << v);
        cur.dom.pop_back();
        cur.img.pop_back();
      }
    }
  };
  rec(rec, 0);
  return out;
}

// An amalgam of two graphs: a common extension W together with the two
// vertex assignments. Enumerates every joint "induced subspace pattern" two
// embeddings into an arbitrary space can realize: a partial isomorphism
// decides which vertices coincide, free bits decide cross coherence.
struct Amalgam {
  Graph w;
  std::vector<int> left, right;  // vertex maps into w
};

inline std::vector<Amalgam> graph_amalgams(const Graph& g, const Graph& h) {
  std::vector<Amalgam> out;
  for (const PartialIso& pi : partial_graph_isos(g, h)) {
    std::vector<int> l(g.n), r(h.n, -1);
    for (int i = 0; i < g.n; ++i) l[i] = i;
    for (size_t t = 0; t < pi.dom.size(); ++t) r[pi.img[t]] = pi.dom[t];
    std::vector<int> fresh;  // h-vertices not matched
    for (int v = 0; v < h.n; ++v)
      if (r[v] < 0) fresh.push_back(v);
    int nw = g.n + static_cast<int>(fresh.size());
    if (nw > Graph::kMax) continue;
    for (size_t t = 0; t < fresh.size(); ++t) r[fresh[t]] = g.n + static_cast<int>(t);
    Graph base;
    base.n = static_cast<uint8_t>(nw);
    for (int i = 0; i < nw; ++i) base.rows[i] = static_cast<uint16_t>(1u << i);
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        if (g.coh(i, j)) base.rows[i] |= static_cast<uint16_t>(1u << j);
    for (int v = 0; v < h.n; ++v)
      for (int u = 0; u < h.n; ++u)
        if (h.coh(v, u)) base.set_coh(r[v], r[u], true);
    // free pairs: unmatched g-vertex (not in pi.dom) x fresh h-vertex
    std::vector<int> gfree;
    for (int i = 0; i < g.n; ++i)
      if (std::find(pi.dom.begin(), pi.dom.end(), i) == pi.dom.end()) gfree.push_back(i);
    std::vector<std::pair<int, int>> free_pairs;
    for (int i : gfree)
      for (size_t t = 0; t < fresh.size(); ++t) free_pairs.emplace_back(i, g.n + static_cast<int>(t));
    if (free_pairs.size() > 20) throw std::runtime_error("graph_amalgams: amalgam too large");
    for (uint32_t bits = 0; bits < (1u << free_pairs.size()); ++bits) {
      Graph w = base;
      for (size_t t = 0; t < free_pairs.size(); ++t)
        if ((bits >> t) & 1) w.set_coh(free_pairs[t].first, free_pairs[t].second, true);
      out.push_back(Amalgam{w, l, r});
    }
  }
  return out;
}

}  // namespace ll2
