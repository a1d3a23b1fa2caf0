#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "resultlab/errors.hpp"
#include "resultlab/rng.hpp"

namespace resultlab::gdcurve {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

struct SmoothConvexFn {
  std::string family;
  int dimension = 1;
  double smoothness_L = 1.0;  // analytic upper bound on the gradient Lipschitz constant
  std::function<double(std::span<const double>)> value;
  std::function<Vec(std::span<const double>)> gradient;
};

namespace detail {

// Largest eigenvalue of A^T A through power iteration on x -> A^T (A x),
// driven to 1e-12 relative change. The result is padded by 1e-6 so the
// returned constant stays a valid upper bound despite the Rayleigh quotient
// approaching the top eigenvalue from below.
inline double top_singular_sq(const std::vector<Vec>& rows, int dim, Rng& rng) {
  Vec x(dim);
  for (auto& v : x) v = rng.next_normal();
  double lam = 0;
  for (int it = 0; it < 20000; ++it) {
    Vec ax(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) ax[r] = dot(rows[r], x);
    Vec y(dim, 0.0);
    for (size_t r = 0; r < rows.size(); ++r)
      for (int j = 0; j < dim; ++j) y[j] += rows[r][j] * ax[r];
    double ny = norm(y);
    require(ny > 0, "degenerate matrix in instance generation");
    for (int j = 0; j < dim; ++j) y[j] /= ny;
    double new_lam = 0;
    Vec ay(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) ay[r] = dot(rows[r], y);
    new_lam = dot(ay, ay);
    if (it > 2 && std::abs(new_lam - lam) <= 1e-12 * std::abs(new_lam)) {
      lam = new_lam;
      break;
    }
    lam = new_lam;
    x = y;
  }
  return lam * (1.0 + 1e-6);
}

}  // namespace detail

// f(x) = 0.5 x^T Q x with Q = M^T M; L = lambda_max(Q).
inline SmoothConvexFn make_quadratic(int dim, Rng& rng) {
  std::vector<Vec> m(dim, Vec(dim));
  for (auto& row : m)
    for (auto& v : row) v = rng.next_normal() / std::sqrt(static_cast<double>(dim));
  // Q = M^T M
  auto q = std::make_shared<std::vector<Vec>>(dim, Vec(dim, 0.0));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double s = 0;
      for (int k = 0; k < dim; ++k) s += m[k][i] * m[k][j];
      (*q)[i][j] = s;
    }
  SmoothConvexFn f;
  f.family = "quadratic";
  f.dimension = dim;
  f.smoothness_L = detail::top_singular_sq(m, dim, rng);  // lambda_max(M^T M)
  f.value = [q](std::span<const double> x) {
    double s = 0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * dot((*q)[i], x);
    return 0.5 * s;
  };
  f.gradient = [q](std::span<const double> x) {
    Vec g(x.size());
    for (size_t i = 0; i < x.size(); ++i) g[i] = dot((*q)[i], x);
    return g;
  };
  return f;
}

// f(x) = log sum_i exp(<a_i, x> + b_i); Hessian <= lambda_max(A^T A) I.
inline SmoothConvexFn make_logsumexp(int dim, Rng& rng) {
  int m = 2 * dim + 3;
  auto rows = std::make_shared<std::vector<Vec>>(m, Vec(dim));
  auto offs = std::make_shared<Vec>(m);
  for (auto& row : *rows)
    for (auto& v : row) v = rng.next_normal() / std::sqrt(static_cast<double>(dim));
  for (auto& b : *offs) b = 0.3 * rng.next_normal();
  SmoothConvexFn f;
  f.family = "logsumexp";
  f.dimension = dim;
  f.smoothness_L = detail::top_singular_sq(*rows, dim, rng);
  auto logits = [rows, offs](std::span<const double> x) {
    Vec z(rows->size());
    for (size_t i = 0; i < rows->size(); ++i) z[i] = dot((*rows)[i], x) + (*offs)[i];
    return z;
  };
  f.value = [logits](std::span<const double> x) {
    Vec z = logits(x);
    double zmax = z[0];
    for (double v : z) zmax = std::max(zmax, v);
    double s = 0;
    for (double v : z) s += std::exp(v - zmax);
    return zmax + std::log(s);
  };
  f.gradient = [rows, logits](std::span<const double> x) {
    Vec z = logits(x);
    double zmax = z[0];
    for (double v : z) zmax = std::max(zmax, v);
    double s = 0;
    for (double& v : z) {
      v = std::exp(v - zmax);
      s += v;
    }
    Vec g(x.size(), 0.0);
    for (size_t i = 0; i < rows->size(); ++i) {
      double p = z[i] / s;
      for (size_t j = 0; j < x.size(); ++j) g[j] += p * (*rows)[i][j];
    }
    return g;
  };
  return f;
}

// Regularized logistic loss on random labels;
// L = lambda_max(A^T A)/(4m) + lambda.
inline SmoothConvexFn make_logistic(int dim, Rng& rng) {
  int m = 3 * dim;
  auto rows = std::make_shared<std::vector<Vec>>(m, Vec(dim));
  auto ys = std::make_shared<Vec>(m);
  for (auto& row : *rows)
    for (auto& v : row) v = rng.next_normal();
  for (auto& y : *ys) y = rng.next_double() < 0.5 ? -1.0 : 1.0;
  const double lambda = 0.05;
  SmoothConvexFn f;
  f.family = "logistic";
  f.dimension = dim;
  f.smoothness_L = detail::top_singular_sq(*rows, dim, rng) / (4.0 * m) + lambda;
  f.value = [rows, ys, lambda](std::span<const double> x) {
    double s = 0;
    for (size_t i = 0; i < rows->size(); ++i) {
      double t = -(*ys)[i] * dot((*rows)[i], x);
      // log(1 + e^t), stable
      s += t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    }
    return s / static_cast<double>(rows->size()) + 0.5 * lambda * dot(x, x);
  };
  f.gradient = [rows, ys, lambda](std::span<const double> x) {
    Vec g(x.size(), 0.0);
    for (size_t i = 0; i < rows->size(); ++i) {
      double t = -(*ys)[i] * dot((*rows)[i], x);
      double sig = 1.0 / (1.0 + std::exp(-t));
      double coef = -(*ys)[i] * sig / static_cast<double>(rows->size());
      for (size_t j = 0; j < x.size(); ++j) g[j] += coef * (*rows)[i][j];
    }
    for (size_t j = 0; j < x.size(); ++j) g[j] += lambda * x[j];
    return g;
  };
  return f;
}

// Mean of Huber losses on unit-norm rows, scaled by 1/delta so that the
// smoothness bound is L = 1/delta.
inline SmoothConvexFn make_huber(int dim, Rng& rng) {
  int m = 2 * dim + 1;
  auto rows = std::make_shared<std::vector<Vec>>(m, Vec(dim));
  auto offs = std::make_shared<Vec>(m);
  for (auto& row : *rows) {
    double nrm = 0;
    for (auto& v : row) {
      v = rng.next_normal();
      nrm += v * v;
    }
    nrm = std::sqrt(nrm);
    for (auto& v : row) v /= nrm;
  }
  for (auto& b : *offs) b = rng.next_normal();
  const double delta = 0.5;
  SmoothConvexFn f;
  f.family = "huber";
  f.dimension = dim;
  f.smoothness_L = 1.0 / delta;
  auto huber = [](double t, double d) {
    double a = std::abs(t);
    return a <= d ? 0.5 * t * t : d * (a - 0.5 * d);
  };
  auto dhuber = [](double t, double d) {
    return t > d ? d : (t < -d ? -d : t);
  };
  f.value = [rows, offs, huber, delta](std::span<const double> x) {
    double s = 0;
    for (size_t i = 0; i < rows->size(); ++i)
      s += huber(dot((*rows)[i], x) - (*offs)[i], delta);
    return s / (delta * static_cast<double>(rows->size()));
  };
  f.gradient = [rows, offs, dhuber, delta](std::span<const double> x) {
    Vec g(x.size(), 0.0);
    for (size_t i = 0; i < rows->size(); ++i) {
      double coef = dhuber(dot((*rows)[i], x) - (*offs)[i], delta) /
                    (delta * static_cast<double>(rows->size()));
      for (size_t j = 0; j < x.size(); ++j) g[j] += coef * (*rows)[i][j];
    }
    return g;
  };
  return f;
}

inline SmoothConvexFn make_instance(const std::string& family, int dim, Rng& rng) {
  if (family == "quadratic") return make_quadratic(dim, rng);
  if (family == "logsumexp") return make_logsumexp(dim, rng);
  if (family == "logistic") return make_logistic(dim, rng);
  if (family == "huber") return make_huber(dim, rng);
  fail("unknown family: " + family);
}

inline const std::vector<std::string> kFamilies = {"quadratic", "logsumexp", "logistic", "huber"};

struct GDRun {
  double eta = 0;
  std::vector<Vec> iterates;   // x_0 .. x_K (K <= steps if stopped early)
  std::vector<Vec> gradients;  // gradient at each recorded iterate
  std::vector<double> values;  // f(x_0) .. f(x_N), padded after early stop
  std::vector<double> decreases;  // D_k = values[k] - values[k+1]
  int64_t early_stop_k = -1;      // first k with ||grad|| < 1e-14, or -1
};

inline GDRun run_gd(const SmoothConvexFn& f, std::span<const double> x0, double eta, int steps) {
  require(eta > 0 && steps >= 1, "bad gd parameters");
  GDRun run;
  run.eta = eta;
  Vec x(x0.begin(), x0.end());
  for (int k = 0; k <= steps; ++k) {
    double fx = f.value(x);
    Vec g = f.gradient(x);
    if (!std::isfinite(fx) || !std::isfinite(norm(g)))
      fail("numeric overflow at step " + std::to_string(k));
    run.iterates.push_back(x);
    run.gradients.push_back(g);
    run.values.push_back(fx);
    if (norm(g) < 1e-14) {
      run.early_stop_k = k;
      break;
    }
    if (k < steps)
      for (size_t j = 0; j < x.size(); ++j) x[j] -= eta * g[j];
  }
  // keep the value curve at full length; a converged tail repeats the last
  // value so trailing decreases are exactly zero
  while (static_cast<int>(run.values.size()) < steps + 1) run.values.push_back(run.values.back());
  run.decreases.resize(steps);
  for (int k = 0; k < steps; ++k) run.decreases[k] = run.values[k] - run.values[k + 1];
  return run;
}

struct ConvexityCheck {
  bool convex = true;
  int64_t first_violation = -1;
};

// D_{k+1} <= D_k + rel_tol * max(1, |D_k|) for all k.
inline ConvexityCheck curve_is_convex(const GDRun& run, double rel_tol) {
  for (size_t k = 0; k + 1 < run.decreases.size(); ++k) {
    double slack = rel_tol * std::max(1.0, std::abs(run.decreases[k]));
    if (run.decreases[k + 1] > run.decreases[k] + slack)
      return {false, static_cast<int64_t>(k)};
  }
  return {true, -1};
}

inline ConvexityCheck values_are_convex(std::span<const double> values, double rel_tol) {
  GDRun tmp;
  tmp.decreases.resize(values.size() - 1);
  for (size_t k = 0; k + 1 < values.size(); ++k) tmp.decreases[k] = values[k] - values[k + 1];
  return curve_is_convex(tmp, rel_tol);
}

struct StepAudit {
  double margin_A = 0;      // D_k - eta<g_{k+1},g_k> - ||Delta||^2/(2L)
  double margin_B = 0;      // eta||g_{k+1}||^2 - D_{k+1}
  double margin_coco = 0;   // -eta<g_k,Delta> - ||Delta||^2/L
  double margin_final = 0;  // (D_k - D_{k+1}) - (3/(2L) - eta)||Delta||^2
  bool ok(double tol, bool include_final) const {
    bool base = margin_A >= -tol && margin_B >= -tol && margin_coco >= -tol;
    return include_final ? base && margin_final >= -tol : base;
  }
};

struct AuditResult {
  std::vector<StepAudit> steps;
  bool all_ok = true;
  int64_t first_violation = -1;
};

// Per-step margins of the proof inequalities: the Bregman lower bound (A),
// the convexity upper bound (B), 1/L-cocoercivity of the gradients, and the
// combined (3/(2L) - eta) decrease bound. include_final should be set only
// when eta <= 1.5/L, where the combined bound is guaranteed.
inline AuditResult proof_step_audit(const SmoothConvexFn& f, const GDRun& run, double tol = 1e-9,
                                    bool include_final = true) {
  AuditResult res;
  const double L = f.smoothness_L;
  const double eta = run.eta;
  size_t upto = run.iterates.size() >= 2 ? run.iterates.size() - 1 : 0;
  for (size_t k = 0; k + 1 < run.values.size() && k < upto; ++k) {
    if (k + 1 >= run.gradients.size()) break;
    const Vec& gk = run.gradients[k];
    const Vec& gk1 = run.gradients[k + 1];
    Vec delta(gk.size());
    for (size_t j = 0; j < gk.size(); ++j) delta[j] = gk1[j] - gk[j];
    double Dk = run.decreases[k];
    double Dk1 = k + 1 < run.decreases.size() ? run.decreases[k + 1] : 0.0;
    double d2 = dot(delta, delta);
    StepAudit a;
    a.margin_A = Dk - eta * dot(gk1, gk) - d2 / (2 * L);
    a.margin_B = eta * dot(gk1, gk1) - Dk1;
    a.margin_coco = -eta * dot(gk, delta) - d2 / L;
    a.margin_final = (Dk - Dk1) - (1.5 / L - eta) * d2;
    if (!a.ok(tol, include_final) && res.first_violation < 0)
      res.first_violation = static_cast<int64_t>(k);
    res.steps.push_back(a);
  }
  res.all_ok = res.first_violation < 0;
  return res;
}

struct ScanRow {
  std::string family;
  int64_t instance = 0;
  double eta_over_L = 0;
  bool convex = true;
  int64_t first_violation_k = -1;
  bool audit_ok = true;
};

struct ScanSummary {
  std::vector<ScanRow> rows;
  double largest_clean_eta = 0;  // largest grid eta with zero violations
  int64_t violations = 0;
};

inline Vec random_x0(int dim, Rng& rng) {
  Vec x(dim);
  for (auto& v : x) v = 2.0 * rng.next_normal();
  return x;
}

inline ScanSummary threshold_scan(const std::string& family, const std::vector<double>& etas_over_L,
                                  int instances, int dim, int steps, uint64_t seed,
                                  double rel_tol = 1e-10, double audit_tol = 1e-9) {
  bool known = false;
  for (const auto& fam : kFamilies) known = known || fam == family;
  require(known, "unknown family: " + family);
  ScanSummary out;
  std::vector<int64_t> violations_per_eta(etas_over_L.size(), 0);
  for (int inst = 0; inst < instances; ++inst) {
    Rng rng = trial_stream(seed, static_cast<uint64_t>(inst));
    SmoothConvexFn f = make_instance(family, dim, rng);
    Vec x0 = random_x0(dim, rng);
    for (size_t ei = 0; ei < etas_over_L.size(); ++ei) {
      double m = etas_over_L[ei];
      double eta = m / f.smoothness_L;
      GDRun run = run_gd(f, x0, eta, steps);
      auto conv = curve_is_convex(run, rel_tol);
      auto audit = proof_step_audit(f, run, audit_tol, m <= 1.5 + 1e-12);
      ScanRow row{family, inst, m, conv.convex, conv.first_violation, audit.all_ok};
      if (!conv.convex) ++violations_per_eta[ei];
      out.rows.push_back(row);
    }
  }
  for (size_t ei = 0; ei < etas_over_L.size(); ++ei) {
    if (violations_per_eta[ei] == 0)
      out.largest_clean_eta = std::max(out.largest_clean_eta, etas_over_L[ei]);
    out.violations += violations_per_eta[ei];
  }
  return out;
}

}  // namespace resultlab::gdcurve
