#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace microlimit::quad {

/// Nodes and weights of a quadrature rule.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double apply(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// n-point Gauss–Legendre rule on [-1, 1] (Newton iteration on P_n).
Rule gauss_legendre(int n);

/// n-point Gauss–Legendre rule mapped to [a, b].
Rule gauss_legendre(int n, double a, double b);

/// Composite rule: [a, b] split into equal panels no wider than `max_width`,
/// each carrying an `order`-point Gauss–Legendre rule.
Rule composite_gauss_legendre(double a, double b, double max_width, int order = 8);

/// n-point Gauss–Hermite rule for the weight exp(-t^2) on the real line
/// (Golub–Welsch).
Rule gauss_hermite(int n);

struct Estimate {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

// Gauss 7 / Kronrod 15 abscissae and weights.
inline constexpr double kXgk[8] = {0.991455371120812639206854697526329,
                                   0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926,
                                   0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013,
                                   0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245,
                                   0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {0.022935322010529224963732008058970,
                                   0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518,
                                   0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550,
                                   0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649,
                                   0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082,
                                  0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975,
                                  0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double fsum = f(c - dx) + f(c + dx);
    kronrod += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss–Kronrod (7/15) integration of f over [a, b].
/// Bisects the worst segment until the summed error estimate drops below
/// max(abs_tol, rel_tol * |value|) or `max_intervals` is reached.
template <class F>
Estimate adaptive(F&& f, double a, double b, double abs_tol = 1e-10, double rel_tol = 1e-12,
                  int max_intervals = 4000, int initial_panels = 1) {
  std::priority_queue<detail::Segment> heap;
  double value = 0.0, error = 0.0;
  initial_panels = std::max(1, initial_panels);
  const double w = (b - a) / initial_panels;
  for (int p = 0; p < initial_panels; ++p) {
    const double lo = a + p * w;
    const double hi = (p + 1 == initial_panels) ? b : a + (p + 1) * w;
    auto seg = detail::gk15(f, lo, hi);
    value += seg.value;
    error += seg.error;
    heap.push(seg);
  }
  int count = initial_panels;
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) && count < max_intervals) {
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to shed the drift of the incremental updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error, count};
}

}  // namespace microlimit::quad
