#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "resultlab/errors.hpp"
#include "resultlab/rng.hpp"

namespace resultlab::trees {

// Exact integer arithmetic for counts and identity sides. Counts grow like
// n * d^4, so 128 bits covers everything up to n ~ 10^6.
using Int = __int128;

inline std::string int_to_string(Int v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  std::string s;
  while (u) {
    s += static_cast<char>('0' + static_cast<int>(u % 10));
    u /= 10;
  }
  if (neg) s += '-';
  std::reverse(s.begin(), s.end());
  return s;
}

inline int64_t to_i64(Int v) {
  require(v <= INT64_MAX && v >= INT64_MIN, "count exceeds 64-bit range");
  return static_cast<int64_t>(v);
}

struct Tree {
  int n = 0;
  std::vector<std::vector<int>> adj;
};

inline Tree make_tree(int n, std::span<const std::pair<int, int>> edges) {
  require(n >= 1, "not a tree");
  Tree t;
  t.n = n;
  t.adj.assign(n, {});
  for (auto [a, b] : edges) {
    require(a >= 0 && a < n && b >= 0 && b < n && a != b, "not a tree");
    t.adj[a].push_back(b);
    t.adj[b].push_back(a);
  }
  return t;
}

inline void validate(const Tree& t) {
  require(t.n >= 1 && static_cast<int>(t.adj.size()) == t.n, "not a tree");
  int64_t edges = 0;
  for (int v = 0; v < t.n; ++v) {
    edges += static_cast<int64_t>(t.adj[v].size());
    for (int u : t.adj[v]) {
      require(u >= 0 && u < t.n && u != v, "not a tree");
    }
  }
  require(edges == 2LL * (t.n - 1), "not a tree");
  // connectivity by DFS
  std::vector<uint8_t> seen(t.n, 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : t.adj[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        stack.push_back(u);
      }
    }
  }
  require(reached == t.n, "not a tree");
}

struct VertexStats {
  int64_t d;  // degree
  int64_t x;  // d - 1
  int64_t T;  // sum of x over neighbors
  int64_t A;  // binom(d-1, 2)
};

inline std::vector<VertexStats> vertex_stats(const Tree& t) {
  std::vector<VertexStats> st(t.n);
  for (int v = 0; v < t.n; ++v) {
    int64_t d = static_cast<int64_t>(t.adj[v].size());
    st[v].d = d;
    st[v].x = d - 1;
    st[v].A = d >= 3 ? (d - 1) * (d - 2) / 2 : 0;
  }
  for (int v = 0; v < t.n; ++v) {
    int64_t T = 0;
    for (int u : t.adj[v]) T += st[u].x;
    st[v].T = T;
  }
  return st;
}

struct SubtreeCounts {
  Int S = 0, P = 0, Y = 0;
  bool operator==(const SubtreeCounts& o) const { return S == o.S && P == o.P && Y == o.Y; }
};

inline Int binom4(Int k) {
  if (k < 4) return 0;
  return k * (k - 1) * (k - 2) * (k - 3) / 24;
}

// S = sum binom(d,4); P = (1/2) sum [T^2 - sum_{u~v} x_u^2]; Y = sum A*T.
inline SubtreeCounts counts_by_formula(const Tree& t) {
  validate(t);
  auto st = vertex_stats(t);
  SubtreeCounts c;
  Int P2 = 0;
  for (int v = 0; v < t.n; ++v) {
    c.S += binom4(st[v].d);
    c.Y += static_cast<Int>(st[v].A) * st[v].T;
    Int xsq = 0;
    for (int u : t.adj[v]) xsq += static_cast<Int>(st[u].x) * st[u].x;
    P2 += static_cast<Int>(st[v].T) * st[v].T - xsq;
  }
  require(P2 % 2 == 0, "path count sum must be even");
  c.P = P2 / 2;
  return c;
}

namespace detail {

// Classify a 5-vertex induced subtree by its induced degree sum of squares:
// star {4,1,1,1,1} -> 20, wye {3,2,1,1,1} -> 16, path {2,2,2,1,1} -> 14.
inline void classify5(int64_t sumsq, SubtreeCounts& c) {
  if (sumsq == 20)
    c.S += 1;
  else if (sumsq == 16)
    c.Y += 1;
  else
    c.P += 1;
}

// Scan over all C(n,5) vertex subsets with adjacency bitsets (n <= 64-bit
// masks). A 5-subset of a tree induces a forest, so it is connected iff it
// has exactly 4 induced edges.
inline SubtreeCounts counts_by_subset_scan(const Tree& t) {
  const int n = t.n;
  std::vector<uint64_t> nb(n, 0);
  for (int v = 0; v < n; ++v)
    for (int u : t.adj[v]) nb[v] |= (1ull << u);
  SubtreeCounts c;
  for (int a = 0; a < n; ++a) {
    uint64_t ma = 1ull << a;
    for (int b = a + 1; b < n; ++b) {
      uint64_t mb = ma | (1ull << b);
      int eb = static_cast<int>(__builtin_popcountll(nb[b] & ma));
      for (int d = b + 1; d < n; ++d) {
        uint64_t md = mb | (1ull << d);
        int ed = eb + static_cast<int>(__builtin_popcountll(nb[d] & mb));
        for (int e = d + 1; e < n; ++e) {
          uint64_t me = md | (1ull << e);
          int ee = ed + static_cast<int>(__builtin_popcountll(nb[e] & md));
          for (int f = e + 1; f < n; ++f) {
            int ef = ee + static_cast<int>(__builtin_popcountll(nb[f] & me));
            if (ef != 4) continue;
            uint64_t m = me | (1ull << f);
            int64_t sumsq = 0;
            for (int v : {a, b, d, e, f}) {
              int64_t dv = __builtin_popcountll(nb[v] & m);
              sumsq += dv * dv;
            }
            classify5(sumsq, c);
          }
        }
      }
    }
  }
  return c;
}

// Enumerate connected 5-vertex subsets once each (ESU-style growth from an
// anchor vertex, extending only to higher-labeled vertices).
inline SubtreeCounts counts_by_connected_enumeration(const Tree& t) {
  const int n = t.n;
  SubtreeCounts c;
  std::vector<int> sub;
  std::vector<uint8_t> in_sub(n, 0), in_ext(n, 0);
  std::vector<uint64_t> nb;
  if (n <= 64) {
    nb.assign(n, 0);
    for (int v = 0; v < n; ++v)
      for (int u : t.adj[v]) nb[v] |= (1ull << u);
  }
  std::function<void(std::vector<int>&, int)> extend = [&](std::vector<int>& ext, int anchor) {
    if (sub.size() == 5) {
      int64_t sumsq = 0;
      if (!nb.empty()) {
        uint64_t m = 0;
        for (int v : sub) m |= (1ull << v);
        for (int v : sub) {
          int64_t dv = __builtin_popcountll(nb[v] & m);
          sumsq += dv * dv;
        }
      } else {
        for (int v : sub) {
          int64_t dv = 0;
          for (int u : t.adj[v]) dv += in_sub[u];
          sumsq += dv * dv;
        }
      }
      classify5(sumsq, c);
      return;
    }
    // choose each extension vertex in turn; forbid it for later branches
    std::vector<int> local = ext;
    while (!local.empty()) {
      int w = local.back();
      local.pop_back();
      sub.push_back(w);
      in_sub[w] = 1;
      std::vector<int> next = local;
      std::vector<int> added;
      for (int u : t.adj[w]) {
        if (u > anchor && !in_sub[u] && !in_ext[u]) {
          next.push_back(u);
          in_ext[u] = 1;
          added.push_back(u);
        }
      }
      extend(next, anchor);
      for (int u : added) in_ext[u] = 0;
      in_sub[w] = 0;
      sub.pop_back();
    }
  };
  for (int v = 0; v < n; ++v) {
    sub = {v};
    std::fill(in_sub.begin(), in_sub.end(), 0);
    std::fill(in_ext.begin(), in_ext.end(), 0);
    in_sub[v] = 1;
    std::vector<int> ext;
    for (int u : t.adj[v])
      if (u > v) {
        ext.push_back(u);
        in_ext[u] = 1;
      }
    extend(ext, v);
  }
  return c;
}

}  // namespace detail

inline constexpr int kOracleMaxN = 64;

// Brute-force oracle, independent of the formula path: full subset scan for
// small n, connected-set enumeration (still direct counting) beyond.
inline SubtreeCounts counts_by_enumeration(const Tree& t) {
  validate(t);
  require(t.n <= kOracleMaxN, "oracle scale exceeded");
  if (t.n < 5) return {};
  if (t.n <= 24) return detail::counts_by_subset_scan(t);
  return detail::counts_by_connected_enumeration(t);
}

// 2*F(k) with F(k) = binom(k-1,2)^2/2 + k(k-1)^2/2 - 9*binom(k,4); the
// doubled value is always an integer.
inline Int F_doubled(int64_t k) {
  Int a = k >= 3 ? static_cast<Int>(k - 1) * (k - 2) / 2 : 0;  // binom(k-1,2)
  return a * a + static_cast<Int>(k) * (k - 1) * (k - 1) - 18 * binom4(k);
}

struct IdentityResiduals {
  Int lhs1 = 0;  // Y - 9S - P
  Int rhs1 = 0;  // sum_v [F(d_v) - (T_v - A_v)^2 / 2]
  // Per-vertex sides of the pointwise identity, multiplied by 4 so that all
  // terms are integers.
  std::vector<Int> miracle_lhs4;
  std::vector<Int> miracle_rhs4;
  bool identity1_ok = false;
  bool miracle_ok = false;
};

inline IdentityResiduals identity_residuals(const Tree& t) {
  validate(t);
  auto st = vertex_stats(t);
  auto c = counts_by_formula(t);
  IdentityResiduals r;
  r.lhs1 = c.Y - 9 * c.S - c.P;
  Int rhs_doubled = 0;
  r.miracle_lhs4.resize(t.n);
  r.miracle_rhs4.resize(t.n);
  r.miracle_ok = true;
  for (int v = 0; v < t.n; ++v) {
    const int64_t d = st[v].d;
    const Int TA = st[v].T - st[v].A;
    rhs_doubled += F_doubled(d) - TA * TA;
    // lhs*4 = 4F(d) - 2(T-A)^2
    r.miracle_lhs4[v] = 2 * F_doubled(d) - 2 * TA * TA;
    // rhs*4 = 10 sum_{u~v}(d_v - d_u) - 12(d-2) - d(d-1)(d-3)(d-4)
    //         - 2(T-A-2)(T-A-3)
    Int deg_diff = 0;
    for (int u : t.adj[v]) deg_diff += d - st[u].d;
    r.miracle_rhs4[v] = 10 * deg_diff - 12 * (static_cast<Int>(d) - 2) -
                        static_cast<Int>(d) * (d - 1) * (d - 3) * (d - 4) -
                        2 * (TA - 2) * (TA - 3);
    if (r.miracle_lhs4[v] != r.miracle_rhs4[v]) r.miracle_ok = false;
  }
  require(rhs_doubled % 2 == 0, "identity sum must be even");
  r.rhs1 = rhs_doubled / 2;
  r.identity1_ok = (r.lhs1 == r.rhs1);
  return r;
}

struct FamilyCoefficients {
  int64_t C;
  int64_t coef_Y;  // C(2C^2+7C+7)
  int64_t coef_P;  // C(C+1)(C^2+3C+4)
  int64_t coef_S;  // 24(C+1)(C+2)
};

inline FamilyCoefficients family_coefficients(int64_t C) {
  require(C >= 1, "family parameter must be >= 1");
  return {C, C * (2 * C * C + 7 * C + 7), C * (C + 1) * (C * C + 3 * C + 4),
          24 * (C + 1) * (C + 2)};
}

inline Int family_lhs(int64_t C, const SubtreeCounts& c) {
  auto f = family_coefficients(C);
  return f.coef_Y * c.Y - f.coef_P * c.P - f.coef_S * c.S;
}

// --- labeled tree enumeration / generation (Prufer sequences) ---

inline Tree prufer_decode(int n, std::span<const int> seq) {
  require(n >= 1, "not a tree");
  Tree t;
  t.n = n;
  t.adj.assign(n, {});
  if (n <= 2) {
    if (n == 2) {
      t.adj[0].push_back(1);
      t.adj[1].push_back(0);
    }
    return t;
  }
  require(static_cast<int>(seq.size()) == n - 2, "prufer sequence length mismatch");
  std::vector<int> deg(n, 1);
  for (int s : seq) {
    require(s >= 0 && s < n, "prufer symbol out of range");
    ++deg[s];
  }
  // pointer-based O(n) decode
  int ptr = 0;
  while (deg[ptr] != 1) ++ptr;
  int leaf = ptr;
  for (int i = 0; i < n - 2; ++i) {
    int s = seq[i];
    t.adj[leaf].push_back(s);
    t.adj[s].push_back(leaf);
    if (--deg[s] == 1 && s < ptr) {
      leaf = s;
    } else {
      ++ptr;
      while (deg[ptr] != 1) ++ptr;
      leaf = ptr;
    }
  }
  t.adj[leaf].push_back(n - 1);
  t.adj[n - 1].push_back(leaf);
  return t;
}

inline constexpr int kEnumerationMaxN = 9;

// Visits every labeled tree on n vertices exactly once (n^(n-2) trees for
// n >= 2); returns the number visited. visit(tree_id, tree).
inline uint64_t enumerate_labeled_trees(int n, const std::function<void(uint64_t, const Tree&)>& visit) {
  require(n >= 1 && n <= kEnumerationMaxN, "enumeration scale exceeded");
  if (n <= 2) {
    visit(0, prufer_decode(n, {}));
    return 1;
  }
  uint64_t total = 1;
  for (int i = 0; i < n - 2; ++i) total *= static_cast<uint64_t>(n);
  std::vector<int> seq(n - 2, 0);
  for (uint64_t id = 0; id < total; ++id) {
    uint64_t rem = id;
    for (int i = n - 3; i >= 0; --i) {
      seq[i] = static_cast<int>(rem % n);
      rem /= n;
    }
    visit(id, prufer_decode(n, seq));
  }
  return total;
}

// Enumerates the sub-range [begin, end) of Prufer ranks; lets sweeps
// partition the sequence space across workers.
inline void enumerate_labeled_trees_range(int n, uint64_t begin, uint64_t end,
                                          const std::function<void(uint64_t, const Tree&)>& visit) {
  require(n >= 1 && n <= kEnumerationMaxN, "enumeration scale exceeded");
  if (n <= 2) {
    if (begin == 0 && end > 0) visit(0, prufer_decode(n, {}));
    return;
  }
  std::vector<int> seq(n - 2, 0);
  for (uint64_t id = begin; id < end; ++id) {
    uint64_t rem = id;
    for (int i = n - 3; i >= 0; --i) {
      seq[i] = static_cast<int>(rem % n);
      rem /= n;
    }
    visit(id, prufer_decode(n, seq));
  }
}

inline uint64_t labeled_tree_count(int n) {
  if (n <= 2) return 1;
  uint64_t total = 1;
  for (int i = 0; i < n - 2; ++i) total *= static_cast<uint64_t>(n);
  return total;
}

// Uniform labeled tree via a uniform random Prufer sequence.
inline Tree random_tree(int n, Rng& rng) {
  require(n >= 1, "not a tree");
  if (n <= 2) return prufer_decode(n, {});
  std::vector<int> seq(n - 2);
  for (auto& s : seq) s = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
  return prufer_decode(n, seq);
}

// --- randomized structured families for the C >= 3 counterexample sweep ---
//
// Uniform labeled trees sit far inside the C=3 inequality (their family value
// is strongly negative), so the sweep mixes in leaf-heavy shapes: random
// caterpillars and random "cores padded with leaves". Double stars with
// center degree 5 and caterpillars with spine degree 5 are the known
// violators and appear with non-negligible probability here.

inline Tree random_caterpillar(int max_n, Rng& rng) {
  int spine = 2 + static_cast<int>(rng.next_below(static_cast<uint64_t>(std::max(2, max_n / 6))));
  std::vector<std::pair<int, int>> edges;
  int next = spine;
  for (int i = 0; i + 1 < spine; ++i) edges.emplace_back(i, i + 1);
  std::vector<int> deg(spine, 0);
  for (auto [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  for (int i = 0; i < spine && next < max_n; ++i) {
    int target = 3 + static_cast<int>(rng.next_below(4));  // degree 3..6
    while (deg[i] < target && next < max_n) {
      edges.emplace_back(i, next++);
      ++deg[i];
    }
  }
  return make_tree(next, edges);
}

inline Tree random_leafy_core(int max_n, Rng& rng) {
  int core = 2 + static_cast<int>(rng.next_below(static_cast<uint64_t>(std::max(2, max_n / 8))));
  Tree base = random_tree(core, rng);
  std::vector<std::pair<int, int>> edges;
  for (int v = 0; v < core; ++v)
    for (int u : base.adj[v])
      if (u > v) edges.emplace_back(v, u);
  int next = core;
  for (int v = 0; v < core && next < max_n; ++v) {
    int pad = 2 + static_cast<int>(rng.next_below(4));  // 2..5 leaves
    for (int j = 0; j < pad && next < max_n; ++j) edges.emplace_back(v, next++);
  }
  return make_tree(next, edges);
}

}  // namespace resultlab::trees
