#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "resultlab/errors.hpp"
#include "resultlab/rng.hpp"

namespace resultlab::cliquecodes {

// Edge coordinates of the complete graph on [n] in lexicographic order of
// (i, j) with 0 <= i < j < n.
inline int edge_index(int n, int i, int j) {
  require(0 <= i && i < j && j < n, "edge index out of range");
  // edges (0,1),(0,2),...,(0,n-1),(1,2),...
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

inline int64_t edge_count(int n) { return static_cast<int64_t>(n) * (n - 1) / 2; }

// A parity-check family: each check is the edge set of a graph G_i on [n],
// stored both as an edge bit-vector over the C(n,2) coordinates and as
// per-vertex adjacency masks (for fast clique-intersection parity).
struct ParityCheckFamily {
  int n = 0;
  std::string construction;                       // "alon", "even", "random", ...
  std::vector<std::vector<uint64_t>> edge_bits;   // per check, C(n,2)-bit set
  std::vector<std::vector<uint32_t>> vertex_rows; // per check, n adjacency masks

  int64_t r() const { return static_cast<int64_t>(edge_bits.size()); }

  void add_check(const std::vector<std::pair<int, int>>& edges) {
    std::vector<uint64_t> bits((edge_count(n) + 63) / 64, 0);
    std::vector<uint32_t> rows(n, 0);
    for (auto [i, j] : edges) {
      if (i > j) std::swap(i, j);
      int idx = edge_index(n, i, j);
      if (bits[idx >> 6] & (1ull << (idx & 63))) continue;  // dedupe
      bits[idx >> 6] |= 1ull << (idx & 63);
      rows[i] |= 1u << j;
      rows[j] |= 1u << i;
    }
    edge_bits.push_back(std::move(bits));
    vertex_rows.push_back(std::move(rows));
  }

  void add_check_from_bits(const std::vector<uint64_t>& bits) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        int idx = edge_index(n, i, j);
        if (bits[idx >> 6] & (1ull << (idx & 63))) edges.emplace_back(i, j);
      }
    add_check(edges);
  }
};

// Parity of |E(K_S) ∩ E(G)| for a vertex subset mask, via a direct loop over
// the check's edges (test oracle for the incremental engine).
inline int clique_parity_naive(const ParityCheckFamily& fam, int check, uint32_t mask) {
  int par = 0;
  for (int i = 0; i < fam.n; ++i) {
    if (!(mask & (1u << i))) continue;
    uint32_t row = fam.vertex_rows[check][i] & mask;
    par ^= __builtin_popcount(row & ~((1u << (i + 1)) - 1)) & 1;  // only j > i
  }
  return par;
}

struct VerifyResult {
  bool ok = true;
  uint32_t failing_mask = 0;  // first failing subset in Gray-code order
};

inline constexpr int kVerifyMaxN = 24;

// Exhaustive scan over all vertex subsets S with |S| >= 2: the family is
// clique-avoiding iff every such S has odd intersection parity with at least
// one check. Subsets are walked in Gray-code order so each step toggles one
// vertex and parities update with one AND+popcount per check.
inline VerifyResult verify_clique_avoiding(const ParityCheckFamily& fam) {
  require(fam.n >= 2 && fam.n <= kVerifyMaxN, "scale exceeded");
  const int r = static_cast<int>(fam.r());
  const uint64_t total = 1ull << fam.n;
  std::vector<uint8_t> parity(std::max(r, 1), 0);
  uint32_t mask = 0;
  int size = 0;
  for (uint64_t i = 1; i < total; ++i) {
    int v = __builtin_ctzll(i);  // toggled bit between gray(i-1) and gray(i)
    uint32_t vbit = 1u << v;
    uint32_t others = (mask & ~vbit);
    for (int c = 0; c < r; ++c)
      parity[c] ^= __builtin_popcount(fam.vertex_rows[c][v] & others) & 1;
    mask ^= vbit;
    size += (mask & vbit) ? 1 : -1;
    if (size < 2) continue;
    bool covered = false;
    for (int c = 0; c < r; ++c)
      if (parity[c]) {
        covered = true;
        break;
      }
    if (!covered) return {false, mask};
  }
  return {true, 0};
}

// Parity checks for odd n: blocks B_i = {2i-1, 2i} (1-indexed), and G_i is
// the union of all triangles with base B_i and apex j > 2i.
inline ParityCheckFamily alon_checks(int n) {
  require(n >= 3 && n % 2 == 1, "n must be odd");
  ParityCheckFamily fam;
  fam.n = n;
  fam.construction = "alon";
  for (int i = 1; i <= (n - 1) / 2; ++i) {
    int a = 2 * i - 1, b = 2 * i;  // 1-indexed block
    std::vector<std::pair<int, int>> edges;
    edges.emplace_back(a - 1, b - 1);
    for (int j = 2 * i + 1; j <= n; ++j) {
      edges.emplace_back(a - 1, j - 1);
      edges.emplace_back(b - 1, j - 1);
    }
    fam.add_check(edges);
  }
  return fam;
}

// Even n: the odd construction on [n-1] plus one augmentation check, gated by
// exhaustive verification. Candidates are tried in a fixed order starting
// with the star at vertex n (which covers the even-size cliques through n);
// random single-graph augmentations fill out the search budget. Never
// returns an unverified family.
inline ParityCheckFamily even_checks(int n, int64_t search_budget = 200) {
  require(n >= 2 && n % 2 == 0 && n <= kVerifyMaxN, "n must be even and small");
  auto make_base = [&]() {
    ParityCheckFamily fam;
    fam.n = n;
    fam.construction = "even";
    if (n - 1 >= 3) {
      auto odd = alon_checks(n - 1);
      for (const auto& bits : odd.edge_bits) {
        // re-embed the [n-1] check into n vertices
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n - 1; ++i)
          for (int j = i + 1; j < n - 1; ++j) {
            int idx = edge_index(n - 1, i, j);
            if (bits[idx >> 6] & (1ull << (idx & 63))) edges.emplace_back(i, j);
          }
        fam.add_check(edges);
      }
    }
    return fam;
  };

  // candidate 0: star at the last vertex
  {
    auto fam = make_base();
    std::vector<std::pair<int, int>> star;
    for (int j = 0; j < n - 1; ++j) star.emplace_back(j, n - 1);
    fam.add_check(star);
    if (verify_clique_avoiding(fam).ok) return fam;
  }
  Rng rng(0xC0DE5EEDull, static_cast<uint64_t>(n));
  int64_t words = (edge_count(n) + 63) / 64;
  for (int64_t trial = 0; trial < search_budget; ++trial) {
    auto fam = make_base();
    std::vector<uint64_t> bits(words, 0);
    for (auto& w : bits) w = rng.next_u64();
    int64_t e = edge_count(n);
    if (e % 64) bits[words - 1] &= (1ull << (e % 64)) - 1;
    fam.add_check_from_bits(bits);
    if (verify_clique_avoiding(fam).ok) return fam;
  }
  fail("no verified even-n family found within search budget");
}

enum class CodimSearch { proven_no, found_yes, inconclusive };

inline const char* to_string(CodimSearch s) {
  switch (s) {
    case CodimSearch::proven_no: return "proven_no";
    case CodimSearch::found_yes: return "found_yes";
    default: return "inconclusive";
  }
}

inline bool random_code_trial(int n, int r, Rng& rng) {
  require(n >= 2 && n <= kVerifyMaxN, "scale exceeded");
  ParityCheckFamily fam;
  fam.n = n;
  fam.construction = "random";
  int64_t e = edge_count(n);
  int64_t words = (e + 63) / 64;
  for (int i = 0; i < r; ++i) {
    std::vector<uint64_t> bits(words, 0);
    for (auto& w : bits) w = rng.next_u64();
    if (e % 64) bits[words - 1] &= (1ull << (e % 64)) - 1;
    fam.add_check_from_bits(bits);
  }
  if (r == 0) return false;  // empty family accepts every clique indicator
  return verify_clique_avoiding(fam).ok;
}

// Does any clique-avoiding family with r checks exist on n vertices?
// Exhaustive for (n <= 5, r <= 2): scans check-sets up to order symmetry.
// Larger parameters need an explicit sampling budget.
inline CodimSearch min_codim_exists(int n, int r, int64_t budget = 0, Rng* rng = nullptr) {
  require(n >= 2 && n <= kVerifyMaxN && r >= 0, "scale exceeded");
  if (r == 0) return CodimSearch::proven_no;  // chi_{{i,j}} != 0 always survives
  int64_t e = edge_count(n);
  if (n <= 5 && r <= 2) {
    uint64_t vecs = (1ull << e) - 1;
    ParityCheckFamily fam;
    fam.n = n;
    auto set_from_word = [&](uint64_t w) {
      std::vector<uint64_t> bits{w};
      return bits;
    };
    if (r == 1) {
      for (uint64_t v = 1; v <= vecs; ++v) {
        fam.edge_bits.clear();
        fam.vertex_rows.clear();
        fam.add_check_from_bits(set_from_word(v));
        if (verify_clique_avoiding(fam).ok) return CodimSearch::found_yes;
      }
      return CodimSearch::proven_no;
    }
    for (uint64_t v1 = 1; v1 <= vecs; ++v1)
      for (uint64_t v2 = v1 + 1; v2 <= vecs; ++v2) {
        fam.edge_bits.clear();
        fam.vertex_rows.clear();
        fam.add_check_from_bits(set_from_word(v1));
        fam.add_check_from_bits(set_from_word(v2));
        if (verify_clique_avoiding(fam).ok) return CodimSearch::found_yes;
      }
    return CodimSearch::proven_no;
  }
  require(budget > 0 && rng != nullptr, "need budget");
  for (int64_t t = 0; t < budget; ++t)
    if (random_code_trial(n, r, *rng)) return CodimSearch::found_yes;
  return CodimSearch::inconclusive;
}

}  // namespace resultlab::cliquecodes
