#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "resultlab/errors.hpp"
#include "resultlab/rng.hpp"

namespace resultlab::chasing {

struct Vec2 {
  double x = 0, y = 0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

// --- follow-the-leader blow-up construction ---

// Half-plane constraint <p, x> >= r^2 with p = r*u, |u| = 1. The implied body
// at step t is the unit disk intersected with the first t half-planes.
struct HalfPlane {
  Vec2 p;
  double r = 0;
};

struct HalfPlaneSystem {
  std::vector<HalfPlane> constraints;
};

struct FtlSchedule {
  double r1 = 0.05;
  int64_t pairs = 1000;
  std::function<double(int64_t)> phi;  // phi(m), m >= 1; positive, nonincreasing, < pi/8

  static FtlSchedule harmonic(double c, double r1, int64_t pairs) {
    FtlSchedule s;
    s.r1 = r1;
    s.pairs = pairs;
    s.phi = [c](int64_t m) { return c / static_cast<double>(m); };
    return s;
  }
};

// The alternating construction: p_{2m-1} at angle -phi_m, p_{2m} at angle
// +phi_m, radii tight against the immediately preceding constraint:
//   r_{2m} = r_{2m-1}/cos(2 phi_m),  r_{2m+1} = r_{2m}/cos(phi_m + phi_{m+1}).
struct FtlInstance {
  double r1 = 0;
  std::vector<double> radii;   // r_t for t = 1..2*pairs (index t-1)
  std::vector<double> angles;  // angle of u_t
  std::vector<double> px, py;  // cartesian p_t, cached for pair checks
  double sup_r = 0;

  int64_t points() const { return static_cast<int64_t>(radii.size()); }
  Vec2 point(int64_t t) const { return {px[t - 1], py[t - 1]}; }
  HalfPlane constraint(int64_t t) const { return {point(t), radii[t - 1]}; }
};

inline FtlInstance build_ftl_instance(const FtlSchedule& sched) {
  require(sched.pairs >= 1, "need at least one pair");
  require(sched.r1 > 0 && sched.r1 < 1, "r1 out of range");
  FtlInstance inst;
  inst.r1 = sched.r1;
  inst.radii.reserve(2 * sched.pairs);
  inst.angles.reserve(2 * sched.pairs);
  double r = sched.r1;
  double prev_phi = sched.phi(1);
  for (int64_t m = 1; m <= sched.pairs; ++m) {
    double ph = sched.phi(m);
    require(ph > 0 && ph < std::numbers::pi / 8.0, "angle out of range");
    require(ph <= prev_phi + 1e-15, "angles must be nonincreasing");
    prev_phi = ph;
    // p_{2m-1}
    inst.radii.push_back(r);
    inst.angles.push_back(-ph);
    // p_{2m}
    double r2 = r / std::cos(2.0 * ph);
    inst.radii.push_back(r2);
    inst.angles.push_back(ph);
    // r_{2m+1}
    r = r2 / std::cos(ph + sched.phi(m + 1));
    inst.sup_r = std::max(inst.sup_r, std::max(r2, r));
  }
  require(inst.sup_r <= 1.0, "r1 too large");
  inst.px.resize(inst.radii.size());
  inst.py.resize(inst.radii.size());
  for (size_t i = 0; i < inst.radii.size(); ++i) {
    inst.px[i] = inst.radii[i] * std::cos(inst.angles[i]);
    inst.py[i] = inst.radii[i] * std::sin(inst.angles[i]);
  }
  return inst;
}

// sup_t r_t <= r1 * exp(C * sum phi_m^2) with C = 8, from 1/cos x <= exp(x^2)
// on |x| <= pi/4 applied to both recurrence factors.
inline double sup_r_bound(const FtlSchedule& sched) {
  double s = 0;
  for (int64_t m = 1; m <= sched.pairs + 1; ++m) {
    double ph = sched.phi(m);
    s += ph * ph;
  }
  return sched.r1 * std::exp(8.0 * s);
}

struct FeasibilityReport {
  bool ok = true;
  int64_t bad_i = -1, bad_j = -1;
  int64_t exhaustive_points = 0;
  int64_t sampled_pairs = 0;
};

// Feasibility (1): cos(angle(u_i, u_j)) >= r_i / r_j for all i <= j.
// Exhaustive over the first `exhaustive_points` indices, sampled beyond.
inline FeasibilityReport verify_feasibility(const FtlInstance& inst, int64_t exhaustive_points,
                                            int64_t samples, Rng& rng, double tol = 1e-12) {
  FeasibilityReport rep;
  int64_t n = inst.points();
  int64_t ex = std::min(exhaustive_points, n);
  rep.exhaustive_points = ex;
  auto check = [&](int64_t i, int64_t j) {  // 1-based, i < j
    // cos(angle(u_i,u_j)) = <p_i,p_j>/(r_i r_j)
    double lhs = (inst.px[i - 1] * inst.px[j - 1] + inst.py[i - 1] * inst.py[j - 1]) /
                 (inst.radii[i - 1] * inst.radii[j - 1]);
    double rhs = inst.radii[i - 1] / inst.radii[j - 1];
    return lhs >= rhs - tol;
  };
  for (int64_t i = 1; i <= ex && rep.ok; ++i)
    for (int64_t j = i + 1; j <= ex; ++j)
      if (!check(i, j)) {
        rep = {false, i, j, ex, 0};
        return rep;
      }
  if (n > ex) {
    for (int64_t s = 0; s < samples; ++s) {
      int64_t i = 1 + static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(n)));
      int64_t j = 1 + static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(n)));
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      ++rep.sampled_pairs;
      if (!check(i, j)) {
        rep.ok = false;
        rep.bad_i = i;
        rep.bad_j = j;
        return rep;
      }
    }
  }
  return rep;
}

struct FtlCost {
  double cost = 0;             // sum of flip and cross step lengths
  double lower_bound_sum = 0;  // tan x >= x term by term
  double sup_r = 0;
};

// Streaming evaluation of the construction cost, with optional checkpoints
// (pair index -> cumulative cost).
inline FtlCost ftl_cost(const FtlSchedule& sched,
                        const std::vector<int64_t>& checkpoints = {},
                        std::vector<double>* checkpoint_costs = nullptr) {
  require(sched.pairs >= 1, "need at least one pair");
  require(sched.r1 > 0 && sched.r1 < 1, "r1 out of range");
  FtlCost out;
  if (checkpoint_costs) checkpoint_costs->assign(checkpoints.size(), 0.0);
  double r = sched.r1;
  out.sup_r = r;
  for (int64_t m = 1; m <= sched.pairs; ++m) {
    double ph = sched.phi(m);
    require(ph > 0 && ph < std::numbers::pi / 8.0, "angle out of range");
    double phn = sched.phi(m + 1);
    double r2 = r / std::cos(2.0 * ph);
    out.cost += r * std::tan(2.0 * ph) + r2 * std::tan(ph + phn);
    out.lower_bound_sum += 2.0 * r * ph + r2 * (ph + phn);
    r = r2 / std::cos(ph + phn);
    out.sup_r = std::max(out.sup_r, std::max(r2, r));
    if (checkpoint_costs)
      for (size_t c = 0; c < checkpoints.size(); ++c)
        if (checkpoints[c] == m) (*checkpoint_costs)[c] = out.cost;
  }
  require(out.sup_r <= 1.0, "r1 too large");
  return out;
}

// --- minimum-norm point of (unit disk) ∩ (half-planes) ---
//
// Geometry used: every constraint <p_i, x> >= r_i^2 forces ||x|| >= r_i, and
// the origin's projection onto the boundary line of constraint i is exactly
// p_i. Hence if the projection of the largest-radius constraint is feasible
// it is the minimizer; otherwise the minimizer is a vertex of two constraint
// lines (or a disk intersection), found by candidate enumeration.
inline Vec2 min_norm_point(const HalfPlaneSystem& sys, double tol = 1e-9) {
  const auto& cs = sys.constraints;
  auto feasible = [&](Vec2 q) {
    if (q.norm() > 1.0 + tol) return false;
    for (const auto& c : cs)
      if (c.p.dot(q) < c.r * c.r - tol) return false;
    return true;
  };
  if (cs.empty()) return {0, 0};
  if (feasible({0, 0})) return {0, 0};
  size_t imax = 0;
  for (size_t i = 1; i < cs.size(); ++i)
    if (cs[i].r > cs[imax].r) imax = i;
  if (feasible(cs[imax].p)) return cs[imax].p;
  // vertex enumeration fallback
  bool found = false;
  Vec2 best{0, 0};
  double best_norm = 2.0;
  auto consider = [&](Vec2 q) {
    if (!feasible(q)) return;
    double nq = q.norm();
    if (!found || nq < best_norm) {
      found = true;
      best = q;
      best_norm = nq;
    }
  };
  for (size_t i = 0; i < cs.size(); ++i) consider(cs[i].p);
  for (size_t i = 0; i < cs.size(); ++i) {
    for (size_t j = i + 1; j < cs.size(); ++j) {
      // solve <p_i, x> = r_i^2, <p_j, x> = r_j^2
      double det = cs[i].p.x * cs[j].p.y - cs[i].p.y * cs[j].p.x;
      if (std::abs(det) < 1e-15) continue;
      double bi = cs[i].r * cs[i].r, bj = cs[j].r * cs[j].r;
      consider({(bi * cs[j].p.y - bj * cs[i].p.y) / det,
                (cs[i].p.x * bj - cs[j].p.x * bi) / det});
    }
    // intersections of line <p_i, x> = r_i^2 with the unit circle
    const auto& c = cs[i];
    double rr = c.r;  // distance from origin to the line
    if (rr <= 1.0) {
      Vec2 u = c.p * (1.0 / c.p.norm());
      Vec2 v{-u.y, u.x};
      double h = std::sqrt(std::max(0.0, 1.0 - rr * rr));
      consider(c.p + v * h);
      consider(c.p - v * h);
    }
  }
  require(found, "infeasible body");
  return best;
}

// Min-norm point of the FTL body after the first t constraints. The newest
// constraint has the largest radius, so its projection is checked against
// all predecessors in O(t).
inline Vec2 min_norm_point_prefix(const FtlInstance& inst, int64_t t, double tol = 1e-9) {
  require(t >= 1 && t <= inst.points(), "step out of range");
  Vec2 cand = inst.point(t);
  bool ok = cand.norm() <= 1.0 + tol;
  for (int64_t i = 1; i <= t && ok; ++i) {
    double lhs = inst.px[i - 1] * cand.x + inst.py[i - 1] * cand.y;
    if (lhs < inst.radii[i - 1] * inst.radii[i - 1] - tol) ok = false;
  }
  if (ok) return cand;
  // fall back to the generic solver on the explicit system
  HalfPlaneSystem sys;
  for (int64_t i = 1; i <= t; ++i) sys.constraints.push_back(inst.constraint(i));
  return min_norm_point(sys, tol);
}

// --- rotating-line adversary with epsilon-hysteresis ---

// A request is an affine subspace of R^d: a single point, or a line
// {base + s * dir}.
struct AffineRequest {
  std::vector<double> base;
  std::vector<double> dir;  // empty for a point request
  bool is_line() const { return !dir.empty(); }
};

inline std::vector<double> project_affine(const AffineRequest& req, std::span<const double> x) {
  std::vector<double> out = req.base;
  if (req.is_line()) {
    double s = 0;
    for (size_t i = 0; i < out.size(); ++i) s += (x[i] - req.base[i]) * req.dir[i];
    for (size_t i = 0; i < out.size(); ++i) out[i] += s * req.dir[i];
  }
  return out;
}

inline double distance_to_affine(const AffineRequest& req, std::span<const double> x) {
  auto p = project_affine(req, x);
  double s = 0;
  for (size_t i = 0; i < p.size(); ++i) s += (p[i] - x[i]) * (p[i] - x[i]);
  return std::sqrt(s);
}

struct OnlineAlgorithm {
  virtual ~OnlineAlgorithm() = default;
  virtual std::string name() const = 0;
  virtual std::vector<double> respond(const AffineRequest& req, std::span<const double> x) = 0;
};

// Move to the nearest feasible point.
struct GreedyProjection : OnlineAlgorithm {
  std::string name() const override { return "greedy"; }
  std::vector<double> respond(const AffineRequest& req, std::span<const double> x) override {
    return project_affine(req, x);
  }
};

// Move only when infeasible; for affine requests this coincides with greedy
// projection since feasible sets have empty interior.
struct LazyProjection : OnlineAlgorithm {
  std::string name() const override { return "lazy"; }
  std::vector<double> respond(const AffineRequest& req, std::span<const double> x) override {
    if (distance_to_affine(req, x) <= 1e-12) return {x.begin(), x.end()};
    return project_affine(req, x);
  }
};

// Move to the minimum-norm point of the request.
struct FollowLeader : OnlineAlgorithm {
  std::string name() const override { return "ftl"; }
  std::vector<double> respond(const AffineRequest& req, std::span<const double>) override {
    std::vector<double> origin(req.base.size(), 0.0);
    return project_affine(req, origin);
  }
};

// Test-only adversary fodder: rides the requested line a fixed amount below
// the semicircle midpoint so pivot switches actually trigger.
struct Undercutter : OnlineAlgorithm {
  double undershoot;
  explicit Undercutter(double u) : undershoot(u) {}
  std::string name() const override { return "undercutter"; }
  std::vector<double> respond(const AffineRequest& req, std::span<const double>) override {
    // project the origin, then slide toward the base point (the pivot)
    std::vector<double> origin(req.base.size(), 0.0);
    auto p = project_affine(req, origin);
    if (req.is_line()) {
      for (size_t i = 0; i < p.size(); ++i) p[i] -= undershoot * req.dir[i];
    }
    return p;
  }
};

inline std::unique_ptr<OnlineAlgorithm> make_algorithm(const std::string& name) {
  if (name == "greedy") return std::make_unique<GreedyProjection>();
  if (name == "lazy") return std::make_unique<LazyProjection>();
  if (name == "ftl") return std::make_unique<FollowLeader>();
  fail("unknown algorithm: " + name);
}

struct TraceStep {
  double x = 0, y = 0;
  double step_cost = 0;
  double cumulative = 0;
  int64_t pivot_switches = 0;
};

struct ChasingTrace {
  std::vector<TraceStep> steps;
  double total_cost = 0;
  double offline_opt = 0;
  double offline_correction = 0;  // O(eps) accounting, reported separately
  double ratio = 0;
  int64_t pivot_switches = 0;
  double min_post_switch_offset = 0;  // hysteresis check; >= +eps expected
  bool hysteresis_ok = true;
};

namespace detail {

inline Vec2 rot(Vec2 v, double a) {
  double c = std::cos(a), s = std::sin(a);
  return {v.x * c - v.y * s, v.x * s + v.y * c};
}

// Runs the 2-D rotating-line adversary inside coordinates (cx, cy) of a
// d-dimensional state, pinning the other coordinates at the algorithm's
// current values. The line starts as the diameter through the pivot (1,0)
// in plane coordinates and rotates by angle_step per request; the pivot
// switches to the other unit-circle intersection when the algorithm's
// offset from the chord midpoint reaches -eps.
inline void run_plane_adversary(OnlineAlgorithm& alg, std::vector<double>& state, int cx, int cy,
                                double eps, double angle_step, ChasingTrace& trace,
                                size_t step_cap) {
  Vec2 pivot{1.0, 0.0};
  double dir = 1.0;  // +1: clockwise sweep of the chord endpoint
  double tau = 0.0;
  const double stop_sin = 1.0 - 1e-6;
  bool first_request = true;
  while (true) {
    if (!first_request) tau += angle_step;
    first_request = false;
    bool last = std::sin(tau) >= stop_sin || tau >= std::numbers::pi / 2.0;
    if (last) tau = std::min(tau, std::asin(stop_sin));
    Vec2 q = rot(pivot * -1.0, -dir * 2.0 * tau);
    Vec2 chord = q - pivot;
    double chord_len = chord.norm();
    Vec2 e = chord * (1.0 / chord_len);

    AffineRequest req;
    req.base.assign(state.size(), 0.0);
    req.dir.assign(state.size(), 0.0);
    for (size_t i = 0; i < state.size(); ++i) req.base[i] = state[i];
    req.base[cx] = pivot.x;
    req.base[cy] = pivot.y;
    req.dir[cx] = e.x;
    req.dir[cy] = e.y;

    auto next = alg.respond(req, state);
    require(next.size() == state.size(), "algorithm returned wrong dimension");
    require(distance_to_affine(req, next) <= 1e-9, "algorithm violated constraint");
    double step_cost = 0;
    for (size_t i = 0; i < state.size(); ++i)
      step_cost += (next[i] - state[i]) * (next[i] - state[i]);
    step_cost = std::sqrt(step_cost);
    state = next;
    trace.total_cost += step_cost;
    if (trace.steps.size() < step_cap)
      trace.steps.push_back({state[cx], state[cy], step_cost, trace.total_cost,
                             trace.pivot_switches});

    if (last) break;

    // signed offset along the chord from the pivot, versus the midpoint
    Vec2 pos{state[cx], state[cy]};
    double s = (pos - pivot).dot(e);
    double offset = s - std::cos(tau);
    if (offset <= -eps) {
      // switch pivot to the other unit-circle intersection, reverse rotation
      double post = (chord_len - s) - std::cos(tau);  // offset measured from q
      pivot = q;
      dir = -dir;
      ++trace.pivot_switches;
      if (trace.pivot_switches == 1 || post < trace.min_post_switch_offset)
        trace.min_post_switch_offset = post;
      if (post < eps - 1e-9) trace.hysteresis_ok = false;
    }
  }
}

}  // namespace detail

inline ChasingTrace line_chasing_adversary(OnlineAlgorithm& alg, double eps, double angle_step,
                                           size_t step_cap = 1u << 22) {
  require(eps > 0 && eps < 1, "eps out of range");
  require(angle_step > 0, "angle step must be positive");
  ChasingTrace trace;
  std::vector<double> state(2, 0.0);
  detail::run_plane_adversary(alg, state, 0, 1, eps, angle_step, trace, step_cap);
  trace.offline_opt = 1.0;  // the final pivot lies on the unit circle
  trace.offline_correction = eps * static_cast<double>(trace.pivot_switches + 1);
  trace.ratio = trace.total_cost / trace.offline_opt;
  return trace;
}

// Orthogonal decomposition adversary: the 2-D construction runs sequentially
// in each coordinate plane (2k-1, 2k); requests are affine lines fixing all
// other coordinates at the algorithm's current values. offline_opt follows
// the diagonal play bound sqrt(d/2).
inline ChasingTrace product_adversary(OnlineAlgorithm& alg, int d, double eps, double angle_step,
                                      size_t step_cap = 1u << 22) {
  require(d >= 2 && d % 2 == 0 && d <= 16, "d must be even and <= 16");
  require(eps > 0 && eps < 1, "eps out of range");
  ChasingTrace trace;
  std::vector<double> state(d, 0.0);
  int planes = d / 2;
  for (int k = 0; k < planes; ++k)
    detail::run_plane_adversary(alg, state, 2 * k, 2 * k + 1, eps, angle_step, trace, step_cap);
  trace.offline_opt = std::sqrt(static_cast<double>(planes));
  trace.offline_correction = eps * static_cast<double>(trace.pivot_switches + planes);
  trace.ratio = trace.total_cost / trace.offline_opt;
  return trace;
}

}  // namespace resultlab::chasing
