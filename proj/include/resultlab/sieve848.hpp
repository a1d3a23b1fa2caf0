#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "resultlab/errors.hpp"

namespace resultlab::sieve848 {

inline std::vector<int64_t> primes_upto(int64_t n) {
  std::vector<uint8_t> is_comp(n + 1, 0);
  std::vector<int64_t> primes;
  for (int64_t p = 2; p <= n; ++p) {
    if (is_comp[p]) continue;
    primes.push_back(p);
    for (int64_t q = p * p; q <= n; q += p) is_comp[q] = 1;
  }
  return primes;
}

struct PrimeFilter {
  std::string description;
  std::function<bool(int64_t)> pred;

  static PrimeFilter all() { return {"all primes", [](int64_t) { return true; }}; }
  static PrimeFilter excluding(std::vector<int64_t> ps) {
    std::string d = "p not in {";
    for (size_t i = 0; i < ps.size(); ++i) d += (i ? "," : "") + std::to_string(ps[i]);
    d += "}";
    return {d, [ps](int64_t p) { return std::find(ps.begin(), ps.end(), p) == ps.end(); }};
  }
  static PrimeFilter one_mod_four_ge(int64_t lo) {
    return {"p = 1 (mod 4), p >= " + std::to_string(lo),
            [lo](int64_t p) { return p % 4 == 1 && p >= lo; }};
  }
};

// Product over filtered primes p <= P_max of (1 - c/p^2), with a rigorous
// tail bracket: the infinite product lies in [value - tail_bound, value]
// since each omitted factor is in (1 - c/p^2, 1] and
// sum_{m > P_max} c/m^2 < c/P_max.
struct TruncatedProduct {
  std::string filter_desc;
  double c = 0;
  int64_t p_max = 0;
  double value = 1.0;
  double tail_bound = 0.0;
  double lower() const { return value - tail_bound; }
};

inline TruncatedProduct truncated_product(const PrimeFilter& filter, double c, int64_t p_max,
                                          std::span<const int64_t> primes) {
  require(p_max >= 100, "p_max too small");
  TruncatedProduct tp;
  tp.filter_desc = filter.description;
  tp.c = c;
  tp.p_max = p_max;
  double v = 1.0;
  for (int64_t p : primes) {
    if (p > p_max) break;
    if (!filter.pred(p)) continue;
    v *= (1.0 - c / (static_cast<double>(p) * static_cast<double>(p)));
  }
  tp.value = v;
  tp.tail_bound = c / static_cast<double>(p_max);
  return tp;
}

inline TruncatedProduct truncated_product(const PrimeFilter& filter, double c, int64_t p_max) {
  auto primes = primes_upto(p_max);
  return truncated_product(filter, c, p_max, primes);
}

struct ConstantRow {
  std::string name;
  double value = 0;       // truncated product value (upper end of bracket)
  double tail_bound = 0;  // bracket width
  double closed_form = 0; // 0 when none exists
  std::string stated;     // the recorded 4-digit inequality
  bool ok = false;
};

// The four recorded constants, each confirmed from its truncated-product
// bracket: three lower bounds on closed-form products and one upper bound on
// the p = 1 (mod 4), p >= 13 tail.
inline std::vector<ConstantRow> constants_table(int64_t p_max) {
  auto primes = primes_upto(p_max);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  std::vector<ConstantRow> rows;

  auto add_product_row = [&](const PrimeFilter& f, double c, double closed, double stated_lo,
                             const std::string& name, const std::string& stated) {
    auto tp = truncated_product(f, c, p_max, primes);
    ConstantRow r{name, tp.value, tp.tail_bound, closed, stated, false};
    // bracket must contain the closed form and confirm the stated digits
    bool contains = (closed >= tp.lower() && closed <= tp.value);
    r.ok = contains && (tp.lower() >= stated_lo);
    rows.push_back(r);
    return r.ok;
  };

  bool ok = true;
  ok &= add_product_row(PrimeFilter::all(), 1.0, 6.0 / pi2, 0.6079, "prod_all(1-1/p^2)",
                        ">=0.6079");
  ok &= add_product_row(PrimeFilter::excluding({5}), 1.0, 25.0 / (4.0 * pi2), 0.6332,
                        "prod_p!=5(1-1/p^2)", ">=0.6332");
  ok &= add_product_row(PrimeFilter::excluding({2, 5}), 1.0, 25.0 / (3.0 * pi2), 0.8443,
                        "prod_p!=2,5(1-1/p^2)", ">=0.8443");
  {
    auto tp = truncated_product(PrimeFilter::one_mod_four_ge(13), 2.0, p_max, primes);
    // upper bound for 1 - product uses the bracket's lower end
    double one_minus_upper = 1.0 - tp.lower();
    ConstantRow r{"1-prod_p=1(4),p>=13(1-2/p^2)", tp.value, tp.tail_bound, 0.0, "<=0.0274",
                  one_minus_upper <= 0.0274};
    rows.push_back(r);
    ok &= r.ok;
  }
  require(ok, "constant verification failed");
  return rows;
}

// Round up/down to 4 decimal digits, the convention used for the recorded
// constants ("rounding to preserve the stated inequalities").
inline double ceil4(double x) { return std::ceil(x * 10000.0 - 1e-9) / 10000.0; }
inline double floor4(double x) { return std::floor(x * 10000.0 + 1e-9) / 10000.0; }

struct CaseBound {
  std::string name;
  std::vector<double> term_uppers;  // per-term upper bounds, 4-digit ceilings
  double total_upper = 0;           // sum of un-rounded upper bounds
  std::string digits;               // the 4-digit strings joined by '+'
  bool ok = false;
};

// Recomputes the four case bounds of the main proposition from the constants
// and asserts each stays below 0.04 - eta with eta = 0.002.
inline std::vector<CaseBound> case_bounds(int64_t p_max) {
  auto primes = primes_upto(p_max);
  auto tail13 = truncated_product(PrimeFilter::one_mod_four_ge(13), 2.0, p_max, primes);
  auto ne5 = truncated_product(PrimeFilter::excluding({5}), 1.0, p_max, primes);
  auto ne25 = truncated_product(PrimeFilter::excluding({2, 5}), 1.0, p_max, primes);
  const double tail_up = 1.0 - tail13.lower();  // upper bound, 0.0273...
  const double u5 = 1.0 - ne5.lower();          // 0.3667...
  const double u25 = 1.0 - ne25.lower();        // 0.1556...
  const double eta = 0.002;

  auto make = [&](const std::string& name, std::vector<double> terms) {
    CaseBound cb;
    cb.name = name;
    double total = 0;
    for (double t : terms) {
      double r = ceil4(t);
      cb.term_uppers.push_back(r);
      total += t;
      if (!cb.digits.empty()) cb.digits += "+";
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%.4f", r);
      cb.digits += buf;
    }
    cb.total_upper = total;
    cb.ok = total < 0.04 - eta;
    return cb;
  };

  std::vector<CaseBound> out;
  out.push_back(make("even_b_in_Astar", {23.0 / 25.0 * tail_up, 2.0 / 25.0 * u25}));
  out.push_back(make("all_odd", {0.5 * 23.0 / 25.0 * tail_up, 1.0 / 50.0, u25 / 50.0}));
  out.push_back(make("mixed_parity", {0.5 * 23.0 / 25.0 * tail_up, u5 / 25.0, u25 / 25.0}));
  out.push_back(make("two_classes", {2.0 / 25.0 * u5}));
  for (const auto& cb : out) require(cb.ok, "case bound failed: " + cb.name);
  return out;
}

// --- squarefree machinery ---

namespace detail {

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline uint64_t powmod(uint64_t b, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

// Square root of -1 modulo p^2 for p = 1 (mod 4): root mod p by exponent
// (p-1)/4, then a Hensel lift.
inline uint64_t sqrt_minus_one_mod_p2(uint64_t p) {
  uint64_t r = 0;
  for (uint64_t a = 2; a < p; ++a) {
    uint64_t t = powmod(a, (p - 1) / 4, p);
    if (mulmod(t, t, p) == p - 1) {
      r = t;
      break;
    }
  }
  require(r != 0, "no sqrt(-1) mod p");
  uint64_t p2 = p * p;
  // f(r) = r^2 + 1; lift r -> r - f(r)/p * inv(2r) * p (mod p^2)
  uint64_t f_over_p = (mulmod(r, r, p2) + 1) / p;
  uint64_t inv2r = powmod(2 * r % p, p - 2, p);
  uint64_t k = mulmod(f_over_p % p, inv2r, p);
  uint64_t lifted = (r + p2 - k * p % p2) % p2;
  require((mulmod(lifted, lifted, p2) + 1) % p2 == 0, "hensel lift failed");
  return lifted;
}

}  // namespace detail

// Marks a in [1, N] with a^2 + 1 not squarefree, by sieving the two roots of
// x^2 = -1 (mod p^2) for each prime p = 1 (mod 4). Only such primes can
// divide a^2 + 1 to a square.
inline std::vector<uint8_t> diag_marks(int64_t N) {
  require(N >= 1 && N <= 10'000'000, "N out of range");
  std::vector<uint8_t> marked(N + 1, 0);
  auto primes = primes_upto(N);
  for (int64_t p : primes) {
    if (p % 4 != 1) continue;
    uint64_t r = detail::sqrt_minus_one_mod_p2(static_cast<uint64_t>(p));
    int64_t p2 = p * p;
    for (int64_t root : {static_cast<int64_t>(r), p2 - static_cast<int64_t>(r)}) {
      for (int64_t a = root; a <= N; a += p2) marked[a] = 1;
    }
  }
  return marked;
}

inline double diag_density(int64_t N) {
  auto marked = diag_marks(N);
  int64_t count = 0;
  for (int64_t a = 1; a <= N; ++a) count += marked[a];
  return static_cast<double>(count) / static_cast<double>(N);
}

// Naive oracle: trial-divide m by p^2 over primes p with p^2 <= m.
inline bool not_squarefree(int64_t m, std::span<const int64_t> primes) {
  for (int64_t p : primes) {
    int64_t p2 = p * p;
    if (p2 > m) break;
    if (m % p2 == 0) return true;
  }
  return false;
}

inline bool a2plus1_not_squarefree_trial(int64_t a) {
  int64_t m = a * a + 1;
  auto primes = primes_upto(static_cast<int64_t>(std::sqrt(static_cast<double>(m))) + 2);
  return not_squarefree(m, primes);
}

// --- extremal search over pairwise-compatible sets ---

struct ExtremalResult {
  int64_t N = 0;
  int64_t construction_size_7 = 0;   // |{a <= N : a = 7 (mod 25)}|
  int64_t construction_size_18 = 0;  // |{a <= N : a = 18 (mod 25)}|
  int64_t best_found = 0;            // max clique in the compatibility graph
  std::vector<int64_t> witness;
  bool witness_valid = false;
  bool matches_construction = false;
  bool complete = true;  // branch-and-bound ran to completion
};

namespace detail {

// Greedy-coloring bound + branch and bound for max clique on a small graph.
class MaxClique {
 public:
  MaxClique(const std::vector<std::vector<uint8_t>>& adj, int64_t node_budget)
      : adj_(adj), n_(static_cast<int>(adj.size())), budget_(node_budget) {}

  std::pair<std::vector<int>, bool> run() {
    std::vector<int> cand(n_);
    for (int i = 0; i < n_; ++i) cand[i] = i;
    // order by degree descending for better early bounds
    std::vector<int> deg(n_, 0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) deg[i] += adj_[i][j];
    std::sort(cand.begin(), cand.end(), [&](int a, int b) { return deg[a] > deg[b]; });
    std::vector<int> cur;
    expand(cand, cur);
    return {best_, !out_of_budget_};
  }

 private:
  void expand(std::vector<int>& cand, std::vector<int>& cur) {
    if (out_of_budget_) return;
    if (++nodes_ > budget_) {
      out_of_budget_ = true;
      return;
    }
    if (cand.empty()) {
      if (cur.size() > best_.size()) best_ = cur;
      return;
    }
    // greedy coloring upper bound: vertices ordered by color class
    std::vector<int> color(cand.size());
    std::vector<std::vector<int>> classes;
    for (size_t i = 0; i < cand.size(); ++i) {
      int v = cand[i];
      size_t k = 0;
      for (; k < classes.size(); ++k) {
        bool conflict = false;
        for (int u : classes[k])
          if (adj_[v][u]) {
            conflict = true;
            break;
          }
        if (!conflict) break;
      }
      if (k == classes.size()) classes.emplace_back();
      classes[k].push_back(v);
      color[i] = static_cast<int>(k) + 1;
    }
    // re-order candidates by color (ascending) and scan from the back
    std::vector<std::pair<int, int>> order;  // (color, vertex)
    size_t idx = 0;
    for (size_t k = 0; k < classes.size(); ++k)
      for (int v : classes[k]) order.emplace_back(static_cast<int>(k) + 1, v), ++idx;
    for (size_t i = order.size(); i-- > 0;) {
      auto [c, v] = order[i];
      if (cur.size() + c <= best_.size()) return;
      cur.push_back(v);
      std::vector<int> next;
      for (size_t j = 0; j < i; ++j)
        if (adj_[v][order[j].second]) next.push_back(order[j].second);
      expand(next, cur);
      cur.pop_back();
      if (out_of_budget_) return;
    }
  }

  const std::vector<std::vector<uint8_t>>& adj_;
  int n_;
  int64_t budget_;
  int64_t nodes_ = 0;
  bool out_of_budget_ = false;
  std::vector<int> best_;
};

}  // namespace detail

inline ExtremalResult extremal_search(int64_t N, int64_t node_budget = 20'000'000) {
  require(N >= 1 && N <= 2000, "N out of range");
  ExtremalResult res;
  res.N = N;
  for (int64_t a = 1; a <= N; ++a) {
    if (a % 25 == 7) ++res.construction_size_7;
    if (a % 25 == 18) ++res.construction_size_18;
  }
  // vertices: diagonal-constraint survivors
  auto marked = diag_marks(N);
  std::vector<int64_t> verts;
  for (int64_t a = 1; a <= N; ++a)
    if (marked[a]) verts.push_back(a);
  auto primes = primes_upto(N + 2);
  int m = static_cast<int>(verts.size());
  std::vector<std::vector<uint8_t>> adj(m, std::vector<uint8_t>(m, 0));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      bool edge = not_squarefree(verts[i] * verts[j] + 1, primes);
      adj[i][j] = adj[j][i] = edge;
    }
  detail::MaxClique mc(adj, node_budget);
  auto [clique, complete] = mc.run();
  res.complete = complete;
  res.best_found = static_cast<int64_t>(clique.size());
  for (int i : clique) res.witness.push_back(verts[i]);
  std::sort(res.witness.begin(), res.witness.end());
  // post-hoc validation, edge by edge
  res.witness_valid = true;
  for (size_t i = 0; i < res.witness.size() && res.witness_valid; ++i) {
    if (!not_squarefree(res.witness[i] * res.witness[i] + 1, primes)) res.witness_valid = false;
    for (size_t j = i + 1; j < res.witness.size(); ++j)
      if (!not_squarefree(res.witness[i] * res.witness[j] + 1, primes)) {
        res.witness_valid = false;
        break;
      }
  }
  res.matches_construction =
      res.best_found == std::max(res.construction_size_7, res.construction_size_18);
  return res;
}

// --- the sieve lemma's main-term comparison ---

struct ResidueSystem {
  int64_t p;                     // prime
  std::vector<int64_t> classes;  // residues mod p^2, at most 2
};

struct SieveLemmaResult {
  int64_t count = 0;      // exact count
  double main_term = 0;   // (N/q)(1 - prod(1 - |R_p|/p^2))
  double abs_err = 0;
};

inline SieveLemmaResult sieve_lemma_check(int64_t N, int64_t q, int64_t t,
                                          const std::vector<ResidueSystem>& residues) {
  require(N >= 1 && q >= 1 && t >= 0 && t < q, "bad residue system");
  for (const auto& rs : residues) {
    require(rs.p >= 2, "bad residue system");
    require(rs.classes.size() <= 2, "bad residue system");
    if (!rs.classes.empty()) require(std::gcd(rs.p, q) == 1, "bad residue system");
    for (int64_t c : rs.classes) require(c >= 0 && c < rs.p * rs.p, "bad residue system");
  }
  SieveLemmaResult out;
  int64_t start = (t == 0) ? q : t;
  for (int64_t n = start; n <= N; n += q) {
    for (const auto& rs : residues) {
      int64_t r = n % (rs.p * rs.p);
      bool hit = false;
      for (int64_t c : rs.classes)
        if (c == r) {
          hit = true;
          break;
        }
      if (hit) {
        ++out.count;
        break;
      }
    }
  }
  double prod = 1.0;
  for (const auto& rs : residues)
    prod *= 1.0 - static_cast<double>(rs.classes.size()) /
                      (static_cast<double>(rs.p) * static_cast<double>(rs.p));
  out.main_term = static_cast<double>(N) / static_cast<double>(q) * (1.0 - prod);
  out.abs_err = std::abs(static_cast<double>(out.count) - out.main_term);
  return out;
}

}  // namespace resultlab::sieve848
