#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "resultlab/errors.hpp"

namespace resultlab::sphereq {

inline constexpr double kEulerGamma = 0.57721566490153286060651209;

// Cosine integral Ci(x) for x > 0. Power series
//   gamma + ln x + sum_k (-x^2)^k / (2k (2k)!)
// up to x = 8; beyond that the auxiliary-function form
//   Ci(x) = f(x) sin x - g(x) cos x
// with f, g extracted from the continued fraction for E1(ix) (modified
// Lentz). The two branches agree to ~1e-12 at the seam.
inline double cosine_integral(double x) {
  require(x > 0, "Ci domain error: x must be positive");
  if (x <= 8.0) {
    double sum = 0.0;
    double term = 1.0;  // will track (-1)^k x^(2k) / (2k (2k)!) via recurrence
    double x2 = x * x;
    for (int k = 1; k < 100; ++k) {
      if (k == 1)
        term = -x2 / 4.0;  // k=1: -x^2 / (2 * 2!)
      else
        term *= -x2 * (2.0 * k - 2.0) / (2.0 * k * (2.0 * k) * (2.0 * k - 1.0));
      sum += term;
      if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) break;
    }
    return kEulerGamma + std::log(x) + sum;
  }
  // Modified Lentz for the continued fraction
  //   E1(ix) = e^{-ix} / (ix + 1 - 1/(ix + 3 - 4/(ix + 5 - 9/(...))))
  using C = std::complex<double>;
  const double tiny = 1e-300;
  C b(1.0, x);  // ix + 1
  C c(1.0 / tiny, 0.0);
  C d = 1.0 / b;
  C h = d;
  for (int i = 1; i <= 200; ++i) {
    double a = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    C del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) break;
  }
  // Ci(x) = -Re(e^{-ix} h) = sin(x) * (-Im h) - cos(x) * (Re h)
  return std::sin(x) * (-h.imag()) - std::cos(x) * h.real();
}

// 4*pi*(ln(n*pi) + gamma - Ci(n*pi)), the odd-n closed form.
inline double asymptotic_form(int n) {
  require(n >= 1, "n must be positive");
  double npi = n * std::numbers::pi;
  return 4.0 * std::numbers::pi * (std::log(npi) + kEulerGamma - cosine_integral(npi));
}

// [1 + cos(n pi e)] / (1 - e^2) for odd n, with the removable singularity at
// |e| = 1 handled through u = 1 - |e|:
//   numerator = 1 - cos(n pi u) = 2 sin^2(n pi u / 2), denominator = u(2-u),
// which tends to 0 like (n pi)^2 u / 4.
inline double oscillation_factor(int n, double e) {
  double u = 1.0 - std::abs(e);
  if (u <= 0) return 0.0;
  if (u < 1e-6) {
    double s = std::sin(0.5 * n * std::numbers::pi * u);
    return 2.0 * s * s / (u * (2.0 - u));
  }
  return (1.0 + std::cos(n * std::numbers::pi * e)) / (1.0 - e * e);
}

inline double integrand(int n, double theta, double phi) {
  require(n >= 1, "n must be positive");
  require(n % 2 == 1, "even n diverges under this form");
  double e1 = std::cos(theta);
  double e2 = std::sin(theta) * std::sin(phi);
  return oscillation_factor(n, e1) * oscillation_factor(n, e2);
}

struct QuadratureResult {
  double value = 0;
  double err_estimate = 0;
  int64_t panels = 0;
};

namespace detail {

struct PanelBudget {
  int64_t used = 0;
  int64_t limit = 0;
  double partial = 0;
  void charge(const std::string& what) {
    if (++used > limit)
      fail("quadrature budget exceeded in " + what + " (best estimate " +
           std::to_string(partial) + ")");
  }
};

// Adaptive Simpson with Richardson extrapolation on accept.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double fa,
                               double m, double fm, double b, double fb, double whole,
                               double tol, int depth, int max_depth, PanelBudget& budget,
                               double& err_acc, const std::string& tag) {
  budget.charge(tag);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth >= max_depth || std::abs(delta) <= 15.0 * tol) {
    err_acc += std::abs(delta) / 15.0;
    double v = left + right + delta / 15.0;
    budget.partial += v;
    return v;
  }
  double lv = adaptive_simpson(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1, max_depth,
                               budget, err_acc, tag);
  double rv = adaptive_simpson(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1, max_depth,
                               budget, err_acc, tag);
  return lv + rv;
}

// Integrates f over [a, b] with an oscillation-aware initial grid of
// `init_panels` panels, then adaptive subdivision per panel.
inline double integrate_1d(const std::function<double(double)>& f, double a, double b,
                           int init_panels, double tol_abs, int max_depth, PanelBudget& budget,
                           double& err_acc, const std::string& tag) {
  double total = 0;
  double width = (b - a) / init_panels;
  double tol_panel = tol_abs / init_panels;
  for (int i = 0; i < init_panels; ++i) {
    double pa = a + i * width;
    double pb = (i + 1 == init_panels) ? b : pa + width;
    double pm = 0.5 * (pa + pb);
    double fa = f(pa), fm = f(pm), fb = f(pb);
    double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
    total += adaptive_simpson(f, pa, fa, pm, fm, pb, fb, whole, tol_panel, 0, max_depth, budget,
                              err_acc, tag);
  }
  return total;
}

}  // namespace detail

// Panels per variable: at least 8 per oscillation period (the phase n*pi*e
// sweeps n periods across e in [-1,1]).
inline int initial_panels(int n, double period_span) {
  return std::max(16, static_cast<int>(std::ceil(8.0 * n * period_span)));
}

// Angular integral of the odd-n product form over the sphere:
//   I(n) = int_0^pi dtheta sin(theta) g(cos theta) int_0^{2pi} dphi g(sin theta sin phi)
// Nested adaptive quadrature: outer in theta, inner in phi. With
// solid_angle = false the sin(theta) weight is dropped (the plain
// dtheta dphi convention) so both readings of the prompt are computable.
inline QuadratureResult angular_integral(int n, double rel_tol, bool solid_angle = true,
                                         int64_t panel_budget = 80'000'000, int max_depth = 28) {
  require(n >= 1 && n % 2 == 1, "even n diverges under this form");
  require(n <= 201, "n out of range");
  require(rel_tol >= 1e-10, "rel_tol too small");
  const double pi = std::numbers::pi;
  detail::PanelBudget budget{0, panel_budget, 0.0};

  // scale estimate for the absolute tolerance: the large-n closed form is
  // within a factor of order one of the integral for all odd n
  double scale = std::max(4.0, asymptotic_form(n));
  double tol_outer = rel_tol * scale * 0.25;

  auto inner = [&](double theta, double tol_abs) {
    double st = std::sin(theta);
    auto f = [&](double phi) { return oscillation_factor(n, st * std::sin(phi)); };
    double err = 0;
    int panels = initial_panels(n, st);  // phase span ~ n*st periods over [0,2pi]
    return detail::integrate_1d(f, 0.0, 2.0 * pi, panels, tol_abs, max_depth, budget, err,
                                "inner");
  };

  double err_outer = 0;
  auto outer_f = [&](double theta) {
    double weight = (solid_angle ? std::sin(theta) : 1.0) *
                    oscillation_factor(n, std::cos(theta));
    if (weight == 0.0) return 0.0;
    // inner tolerance proportional to this point's weight in the outer sum
    double tol_inner = tol_outer / std::max(1.0, std::abs(weight)) * 0.5;
    return weight * inner(theta, tol_inner);
  };
  QuadratureResult res;
  // outer initial panels: the phase n*pi*cos(theta) sweeps n periods over [0,pi]
  res.value = detail::integrate_1d(outer_f, 0.0, pi, initial_panels(n, 1.0), tol_outer, max_depth,
                                   budget, err_outer, "outer");
  res.err_estimate = err_outer;
  res.panels = budget.used;
  return res;
}

// Reduced domain [0, pi/2] x [-pi/2, pi/2] times 4, exploiting the
// theta -> pi - theta and phi -> pi - phi symmetries.
inline QuadratureResult angular_integral_reduced(int n, double rel_tol,
                                                 int64_t panel_budget = 80'000'000,
                                                 int max_depth = 28) {
  require(n >= 1 && n % 2 == 1, "even n diverges under this form");
  const double pi = std::numbers::pi;
  detail::PanelBudget budget{0, panel_budget, 0.0};
  double scale = std::max(4.0, asymptotic_form(n));
  double tol_outer = rel_tol * scale * 0.25 / 4.0;
  auto inner = [&](double theta, double tol_abs) {
    double st = std::sin(theta);
    auto f = [&](double phi) { return oscillation_factor(n, st * std::sin(phi)); };
    double err = 0;
    int panels = initial_panels(n, st * 0.5);
    return detail::integrate_1d(f, -0.5 * pi, 0.5 * pi, panels, tol_abs, max_depth, budget, err,
                                "inner");
  };
  double err_outer = 0;
  auto outer_f = [&](double theta) {
    double weight = std::sin(theta) * oscillation_factor(n, std::cos(theta));
    if (weight == 0.0) return 0.0;
    double tol_inner = tol_outer / std::max(1.0, std::abs(weight)) * 0.5;
    return weight * inner(theta, tol_inner);
  };
  QuadratureResult res;
  res.value = 4.0 * detail::integrate_1d(outer_f, 0.0, 0.5 * pi, initial_panels(n, 0.5),
                                         tol_outer, max_depth, budget, err_outer, "outer");
  res.err_estimate = 4.0 * err_outer;
  res.panels = budget.used;
  return res;
}

struct CompareRow {
  int n = 0;
  double quadrature = 0;
  double asymptotic = 0;
  double rel_error = 0;
  double prefactor = 0;  // 32 G mu^2 / (pi^3 n^2) with G mu^2 = 1
  int64_t panels = 0;
};

inline std::vector<CompareRow> compare_table(const std::vector<int>& ns, double rel_tol) {
  std::vector<CompareRow> rows;
  for (int n : ns) {
    auto q = angular_integral(n, rel_tol);
    CompareRow r;
    r.n = n;
    r.quadrature = q.value;
    r.asymptotic = asymptotic_form(n);
    r.rel_error = std::abs(q.value - r.asymptotic) / std::abs(r.asymptotic);
    r.prefactor = 32.0 / (std::pow(std::numbers::pi, 3) * n * n);
    r.panels = q.panels;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace resultlab::sphereq
