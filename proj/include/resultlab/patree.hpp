#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "resultlab/errors.hpp"
#include "resultlab/rng.hpp"

namespace resultlab::patree {

// f(w) = 3(w+1)^2 / (2(w+2)(2w+1)), the limiting leaf fraction.
inline double f_of_w(double w) {
  require(w > 0, "w must be positive");
  return 3.0 * (w + 1.0) * (w + 1.0) / (2.0 * (w + 2.0) * (2.0 * w + 1.0));
}

// Equivalent additive form 3/4 - 1/(2(w+2)) + 1/(4(2w+1)).
inline double f_of_w_additive(double w) {
  require(w > 0, "w must be positive");
  return 0.75 - 0.5 / (w + 2.0) + 0.25 / (2.0 * w + 1.0);
}

inline constexpr double kWInfinity = std::numeric_limits<double>::infinity();

// Inverse of f on [1, inf), clamped: x <= 2/3 -> 1, x >= 3/4 - 1e-12 -> inf.
// Bisection on w in [1, 1e9], terminating at absolute tolerance 1e-12 in x.
inline double f_inverse(double x) {
  if (x <= 2.0 / 3.0) return 1.0;
  if (x >= 0.75 - 1e-12) return kWInfinity;
  double lo = 1.0, hi = 1e9;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f_of_w(mid);
    if (std::abs(fm - x) <= 1e-12) return mid;
    if (fm < x)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-9 * std::max(1.0, lo)) break;
  }
  return 0.5 * (lo + hi);
}

// The attractiveness-weighted preferential attachment tree. Labels are in
// {1, w}; per-vertex neighbor label counts are kept as integers and doubles
// are derived on demand, so from-scratch recomputation matches the
// incremental state bit for bit.
struct WeightedPATree {
  double w = 1.0;
  std::vector<uint8_t> label_is_w;  // a(v) = w if set, else 1
  std::vector<int32_t> parent;      // -1 for the root
  std::vector<int32_t> deg;         // plain degree
  std::vector<int64_t> n1;          // neighbors with label 1
  std::vector<int64_t> nw;          // neighbors with label w
  int64_t e11 = 0, e1w = 0, eww = 0;  // edge counts by endpoint labels

  int64_t t() const { return static_cast<int64_t>(label_is_w.size()); }
  double attract(int64_t v) const { return label_is_w[v] ? w : 1.0; }
  double weighted_degree(int64_t v) const {
    return static_cast<double>(n1[v]) + w * static_cast<double>(nw[v]);
  }
  // S_t^{(1)} = 2 e11 + w e1w, S_t^{(w)} = e1w + 2w eww, S_t = sum.
  double S1() const { return 2.0 * static_cast<double>(e11) + w * static_cast<double>(e1w); }
  double Sw() const { return static_cast<double>(e1w) + 2.0 * w * static_cast<double>(eww); }
  double S() const { return S1() + Sw(); }
  double R() const { return Sw() / S(); }
  double D() const { return Sw() - 0.5 * S(); }
  // T_t = sum over edges of a(u)a(v).
  double edge_weight_sum() const {
    return static_cast<double>(e11) + w * static_cast<double>(e1w) +
           w * w * static_cast<double>(eww);
  }
};

namespace detail {

// Fenwick tree over per-vertex sampling weights.
class Fenwick {
 public:
  explicit Fenwick(int64_t cap) : tree_(cap + 1, 0.0), n_(cap) {}

  void add(int64_t i, double delta) {
    for (int64_t j = i + 1; j <= n_; j += j & (-j)) tree_[j] += delta;
  }

  double total(int64_t count) const {
    double s = 0;
    for (int64_t j = count; j > 0; j -= j & (-j)) s += tree_[j];
    return s;
  }

  // smallest index i < count with prefix sum > u
  int64_t find(double u, int64_t count) const {
    int64_t pos = 0;
    int64_t mask = 1;
    while ((mask << 1) <= n_) mask <<= 1;
    double rem = u;
    for (int64_t step = mask; step > 0; step >>= 1) {
      int64_t next = pos + step;
      if (next <= n_ && tree_[next] <= rem) {
        rem -= tree_[next];
        pos = next;
      }
    }
    if (pos >= count) pos = count - 1;
    return pos;
  }

 private:
  std::vector<double> tree_;
  int64_t n_;
};

}  // namespace detail

// One growth step given the already-drawn new label; split out so the
// simulator and tests share the bookkeeping.
inline void attach(WeightedPATree& tree, int64_t parent, bool new_is_w) {
  int64_t child = tree.t();
  tree.label_is_w.push_back(new_is_w ? 1 : 0);
  tree.parent.push_back(static_cast<int32_t>(parent));
  tree.deg.push_back(1);
  tree.n1.push_back(tree.label_is_w[parent] ? 0 : 1);
  tree.nw.push_back(tree.label_is_w[parent] ? 1 : 0);
  tree.deg[parent] += 1;
  if (new_is_w)
    tree.nw[parent] += 1;
  else
    tree.n1[parent] += 1;
  bool pw = tree.label_is_w[parent];
  if (pw && new_is_w)
    tree.eww += 1;
  else if (!pw && !new_is_w)
    tree.e11 += 1;
  else
    tree.e1w += 1;
}

// Simulates to time t. The root exists at t=1; the t=2 attachment is the
// only 0/0 case of the sampling rule and is resolved deterministically (one
// candidate parent). Sampling uses a Fenwick index, O(log t) per step.
// Incremental sums are re-derived from neighbor counts every
// `bookkeeping_every` steps and must agree exactly.
inline WeightedPATree simulate(double w, int64_t t, Rng& rng, int64_t bookkeeping_every = 10000) {
  require(w >= 1.0, "w must be >= 1");
  require(t >= 1, "t must be >= 1");
  WeightedPATree tree;
  tree.w = w;
  tree.label_is_w.push_back(rng.next_double() < 0.5 ? 1 : 0);
  tree.parent.push_back(-1);
  tree.deg.push_back(0);
  tree.n1.push_back(0);
  tree.nw.push_back(0);
  if (t == 1) return tree;

  detail::Fenwick fw(t);
  // t = 2: deterministic attachment to the root
  {
    bool lbl = rng.next_double() < 0.5;
    attach(tree, 0, lbl);
    fw.add(0, tree.weighted_degree(0));
    fw.add(1, tree.weighted_degree(1));
  }
  for (int64_t cur = 2; cur < t; ++cur) {
    double total = fw.total(cur);
    double u = rng.next_double() * total;
    int64_t parent = fw.find(u, cur);
    bool lbl = rng.next_double() < 0.5;
    double a_new = lbl ? w : 1.0;
    double a_parent = tree.attract(parent);
    attach(tree, parent, lbl);
    fw.add(parent, a_new);
    fw.add(cur, a_parent);
    if (bookkeeping_every > 0 && (cur + 1) % bookkeeping_every == 0) {
      // from-scratch recomputation of the running sums
      int64_t e11 = 0, e1w = 0, eww = 0;
      std::vector<int64_t> n1(tree.t(), 0), nw(tree.t(), 0);
      for (int64_t v = 1; v < tree.t(); ++v) {
        int64_t p = tree.parent[v];
        bool vw = tree.label_is_w[v], pw2 = tree.label_is_w[p];
        if (vw && pw2)
          ++eww;
        else if (!vw && !pw2)
          ++e11;
        else
          ++e1w;
        if (vw)
          ++nw[p];
        else
          ++n1[p];
        if (pw2)
          ++nw[v];
        else
          ++n1[v];
      }
      require(e11 == tree.e11 && e1w == tree.e1w && eww == tree.eww,
              "bookkeeping mismatch: edge counts");
      for (int64_t v = 0; v < tree.t(); ++v)
        require(n1[v] == tree.n1[v] && nw[v] == tree.nw[v], "bookkeeping mismatch: degrees");
    }
  }
  return tree;
}

struct LeafStats {
  int64_t L = 0;   // degree-1 vertices
  int64_t L1 = 0;  // leaves whose unique neighbor has label 1
  int64_t Lw = 0;  // leaves whose unique neighbor has label w
};

inline LeafStats leaf_stats(const WeightedPATree& tree) {
  require(tree.t() >= 2, "leaves undefined");
  LeafStats st;
  for (int64_t v = 0; v < tree.t(); ++v) {
    if (tree.deg[v] != 1) continue;
    ++st.L;
    // the unique neighbor's label is readable off the neighbor label counts
    if (tree.nw[v] == 1)
      ++st.Lw;
    else
      ++st.L1;
  }
  return st;
}

struct EstimatorResult {
  double leaf_fraction = 0;
  double w_hat = 1;
};

inline EstimatorResult estimate_w(const WeightedPATree& tree) {
  auto st = leaf_stats(tree);
  EstimatorResult res;
  res.leaf_fraction = static_cast<double>(st.L) / static_cast<double>(tree.t());
  res.w_hat = f_inverse(res.leaf_fraction);
  return res;
}

struct DriftAudit {
  // exact conditional expectations by enumeration over parent candidates
  double exact_dS = 0, exact_dD = 0, exact_parent_label = 0, exact_dL1 = 0, exact_dLw = 0;
  // closed forms
  double form_dS = 0, form_dD = 0, form_parent_label = 0, form_dL1 = 0, form_dLw = 0;
  // Monte Carlo means and 3-sigma half-widths
  double mc_dS = 0, mc_dS_band = 0;
  double mc_parent_label = 0, mc_parent_label_band = 0;
  bool exact_ok(double tol = 1e-12) const {
    auto close = [tol](double a, double b) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); };
    return close(exact_dS, form_dS) && close(exact_dD, form_dD) &&
           close(exact_parent_label, form_parent_label) && close(exact_dL1, form_dL1) &&
           close(exact_dLw, form_dLw);
  }
  bool mc_ok() const {
    return std::abs(mc_dS - exact_dS) <= mc_dS_band &&
           std::abs(mc_parent_label - exact_parent_label) <= mc_parent_label_band;
  }
};

// Exact one-step conditional expectations at the current state, against the
// closed forms, plus a Monte Carlo cross-check on `samples` draws.
inline DriftAudit drift_audit(const WeightedPATree& tree, int64_t samples, Rng& rng) {
  require(tree.t() >= 2, "state too small");
  const double w = tree.w;
  const double S = tree.S();
  const double mu = 0.5 * (1.0 + w);
  auto leaves = leaf_stats(tree);
  DriftAudit a;
  // enumerate parent candidates
  double e_ax = 0;       // E[a(X)]
  double e_dSw = 0;      // E[Delta S^(w)]
  double p_label_w = 0;  // P[a(X) = w]
  double p_leaf1 = 0, p_leafw = 0;
  for (int64_t v = 0; v < tree.t(); ++v) {
    double pv = tree.weighted_degree(v) / S;
    double av = tree.attract(v);
    e_ax += pv * av;
    bool vw = tree.label_is_w[v];
    if (vw) p_label_w += pv;
    // E[Delta S^(w)] = E[ 1{a(x)=w} a(y) + 1{a(y)=w} a(x) ], label y uniform
    e_dSw += pv * ((vw ? mu : 0.0) + 0.5 * av);
    if (tree.deg[v] == 1) {
      if (tree.nw[v] == 1)
        p_leafw += pv;
      else
        p_leaf1 += pv;
    }
  }
  a.exact_dS = e_ax + mu;
  a.exact_dD = e_dSw - 0.5 * a.exact_dS;
  a.exact_parent_label = e_ax;
  // new leaf joins L1/Lw according to the parent's label; an existing leaf
  // chosen as parent stops being one
  double p_parent_label_1 = 1.0 - p_label_w;
  a.exact_dL1 = p_parent_label_1 - p_leaf1;
  a.exact_dLw = p_label_w - p_leafw;

  const double D = tree.D();
  a.form_dS = D * (w - 1.0) / S + (w + 1.0);
  a.form_dD = mu * D / S;
  a.form_parent_label = 2.0 * tree.edge_weight_sum() / S;
  a.form_dL1 = (tree.S1() - static_cast<double>(leaves.L1)) / S;
  a.form_dLw = (tree.Sw() - w * static_cast<double>(leaves.Lw)) / S;

  if (samples > 0) {
    double sum_dS = 0, sumsq_dS = 0, sum_al = 0, sumsq_al = 0;
    // sampling by linear scan over a prefix-weight array
    std::vector<double> weights(tree.t());
    for (int64_t v = 0; v < tree.t(); ++v)
      weights[v] = tree.weighted_degree(v) / S;
    for (int64_t s = 0; s < samples; ++s) {
      double u = rng.next_double();
      double acc = 0;
      int64_t x = tree.t() - 1;
      for (int64_t v = 0; v < tree.t(); ++v) {
        acc += weights[v];
        if (u < acc) {
          x = v;
          break;
        }
      }
      double ay = rng.next_double() < 0.5 ? w : 1.0;
      double ds = tree.attract(x) + ay;
      sum_dS += ds;
      sumsq_dS += ds * ds;
      sum_al += tree.attract(x);
      sumsq_al += tree.attract(x) * tree.attract(x);
    }
    double n = static_cast<double>(samples);
    a.mc_dS = sum_dS / n;
    a.mc_parent_label = sum_al / n;
    double var_dS = std::max(0.0, sumsq_dS / n - a.mc_dS * a.mc_dS);
    double var_al = std::max(0.0, sumsq_al / n - a.mc_parent_label * a.mc_parent_label);
    a.mc_dS_band = 3.0 * std::sqrt(var_dS / n) + 1e-12;
    a.mc_parent_label_band = 3.0 * std::sqrt(var_al / n) + 1e-12;
  }
  return a;
}

}  // namespace resultlab::patree
