#include "microlimit/quadrature.hpp"

#include <Eigen/Dense>

#include "microlimit/common.hpp"

namespace microlimit::quad {

Rule gauss_legendre(int n) {
  if (n < 1) throw InputError("gauss_legendre: n must be >= 1");
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

Rule gauss_legendre(int n, double a, double b) {
  Rule rule = gauss_legendre(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = c + h * rule.nodes[i];
    rule.weights[i] *= h;
  }
  return rule;
}

Rule composite_gauss_legendre(double a, double b, double max_width, int order) {
  if (!(b > a)) throw InputError("composite_gauss_legendre: need b > a");
  if (!(max_width > 0.0)) throw InputError("composite_gauss_legendre: panel width must be positive");
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_width - 1e-12)));
  const Rule base = gauss_legendre(order);
  const double w = (b - a) / panels;
  Rule rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * order);
  rule.weights.reserve(rule.nodes.capacity());
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * w;
    for (int i = 0; i < order; ++i) {
      rule.nodes.push_back(c + 0.5 * w * base.nodes[i]);
      rule.weights.push_back(0.5 * w * base.weights[i]);
    }
  }
  return rule;
}

Rule gauss_hermite(int n) {
  if (n < 1) throw InputError("gauss_hermite: n must be >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(0, n - 1));
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mu0 = std::sqrt(kPi);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace microlimit::quad
