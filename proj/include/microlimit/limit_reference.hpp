#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "microlimit/charpoly.hpp"
#include "microlimit/ensembles.hpp"
#include "microlimit/quadrature.hpp"

namespace microlimit {

/// Sine process restricted to [-B, B], sampled exactly up to discretization.
///
/// The integral operator of sin(pi(x-y))/(pi(x-y)) on [-B, B] is discretized
/// with 10 Gauss-Legendre nodes per unit length and diagonalized once. A draw
/// keeps eigenfunction k with probability lambda_k and then samples the
/// resulting projection process point by point. Eigenfunctions are extended
/// off the nodes by the Nystrom formula and tabulated on a grid of step 1/32,
/// which drives a piecewise-linear proposal; each point is accepted by
/// rejection against the exact conditional density.
class SineWindowSampler {
 public:
  explicit SineWindowSampler(double B);

  double halfwidth() const { return B_; }
  const quad::Rule& gridpoints() const { return rule_; }
  /// All eigenvalues of the discretized operator, ascending.
  const Eigen::VectorXd& projectionspectrum() const { return evals_; }
  /// Trace of the operator: the expected number of points in the window.
  double expected_count() const;
  /// Eigenvalues kept for sampling (>= 1e-8).
  int retained() const { return static_cast<int>(lambda_.size()); }

  PointConfig sample(std::uint64_t seed) const;

  /// Shared, lazily built sampler for a given B (thread safe).
  static std::shared_ptr<const SineWindowSampler> cached(double B);

 private:
  // Values of the retained eigenfunctions at x.
  void eval_functions(double x, const std::vector<int>& selected, Eigen::VectorXd& out) const;

  double B_;
  quad::Rule rule_;
  Eigen::VectorXd evals_;
  std::vector<double> lambda_;    // retained eigenvalues
  Eigen::MatrixXd nystrom_;       // nodes x retained: sqrt(w_j) v_k[j] / lambda_k
  Eigen::VectorXd node_sin_, node_cos_;
  double h_;
  std::vector<double> grid_;      // fine grid on [-B, B]
  Eigen::MatrixXd grid_values_;   // grid x retained
};

/// A sine-process configuration on [-B, B]; 1 <= B <= 64.
PointConfig sample_sine_process(double B, std::uint64_t seed);

/// e^{i pi s} prod_{|y| <= B - 1} (1 - s/y) over a fresh sine sample on [-B, B],
/// at every s of the grid. Requires B >= 4 max|s|.
CharPolyEval xi_infinity_draw(const std::vector<cplx>& sgrid, double B, std::uint64_t seed);

/// xi_N of a fresh CUE(N) sample at every s of the grid; N >= 64.
CharPolyEval xi_infinity_cue_reference(int N, const std::vector<cplx>& sgrid, std::uint64_t seed);

}  // namespace microlimit
