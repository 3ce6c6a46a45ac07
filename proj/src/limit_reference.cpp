#include "microlimit/limit_reference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "microlimit/rng.hpp"

namespace microlimit {

namespace {

constexpr int kNodesPerUnit = 10;
constexpr double kGridStep = 1.0 / 32.0;
constexpr double kKeepThreshold = 1e-8;
constexpr double kEnvelope = 1.05;

double sinc(double d) {
  if (std::abs(d) < 1e-8) return 1.0;
  return std::sin(kPi * d) / (kPi * d);
}

void check_halfwidth(double B) {
  if (!(B >= 1.0 && B <= 64.0)) throw InputError("sine window half-width B must lie in [1, 64]");
}

}  // namespace

SineWindowSampler::SineWindowSampler(double B) : B_(B), h_(kGridStep) {
  check_halfwidth(B);
  rule_ = quad::composite_gauss_legendre(-B, B, 1.0, kNodesPerUnit);
  const int M = static_cast<int>(rule_.size());
  Eigen::VectorXd sw(M);
  for (int j = 0; j < M; ++j) sw[j] = std::sqrt(rule_.weights[j]);
  Eigen::MatrixXd a(M, M);
  for (int j = 0; j < M; ++j)
    for (int i = j; i < M; ++i) {
      const double v = sw[i] * sw[j] * sinc(rule_.nodes[i] - rule_.nodes[j]);
      a(i, j) = v;
      a(j, i) = v;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  evals_ = es.eigenvalues();
  std::vector<int> keep;
  for (int k = 0; k < M; ++k)
    if (evals_[k] >= kKeepThreshold) keep.push_back(k);
  const int K = static_cast<int>(keep.size());
  lambda_.resize(K);
  nystrom_.resize(M, K);
  for (int c = 0; c < K; ++c) {
    const int k = keep[c];
    lambda_[c] = std::min(1.0, evals_[k]);
    nystrom_.col(c) = sw.cwiseProduct(es.eigenvectors().col(k)) / evals_[k];
  }
  node_sin_.resize(M);
  node_cos_.resize(M);
  for (int j = 0; j < M; ++j) {
    node_sin_[j] = std::sin(kPi * rule_.nodes[j]);
    node_cos_[j] = std::cos(kPi * rule_.nodes[j]);
  }
  const int G = static_cast<int>(std::lround(2.0 * B / h_));
  h_ = 2.0 * B / G;
  grid_.resize(G + 1);
  for (int i = 0; i <= G; ++i) grid_[i] = -B + i * h_;
  grid_[G] = B;
  Eigen::MatrixXd kern(G + 1, M);
  for (int i = 0; i <= G; ++i)
    for (int j = 0; j < M; ++j) kern(i, j) = sinc(grid_[i] - rule_.nodes[j]);
  grid_values_ = kern * nystrom_;
}

double SineWindowSampler::expected_count() const { return evals_.sum(); }

void SineWindowSampler::eval_functions(double x, const std::vector<int>& selected,
                                       Eigen::VectorXd& out) const {
  const int M = static_cast<int>(rule_.size());
  const double sx = std::sin(kPi * x), cx = std::cos(kPi * x);
  Eigen::VectorXd r(M);
  for (int j = 0; j < M; ++j) {
    const double d = x - rule_.nodes[j];
    r[j] = std::abs(d) < 1e-8 ? 1.0 : (sx * node_cos_[j] - cx * node_sin_[j]) / (kPi * d);
  }
  out.resize(static_cast<Eigen::Index>(selected.size()));
  for (std::size_t c = 0; c < selected.size(); ++c) out[c] = r.dot(nystrom_.col(selected[c]));
}

PointConfig SineWindowSampler::sample(std::uint64_t seed) const {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> selected;
  for (int k = 0; k < static_cast<int>(lambda_.size()); ++k)
    if (unif(rng) < lambda_[k]) selected.push_back(k);

  PointConfig cfg;
  cfg.center = 0.0;
  cfg.scalefactor = 1.0;
  cfg.windowradius = B_;
  const int kappa = static_cast<int>(selected.size());
  if (kappa == 0) return cfg;

  const int G = static_cast<int>(grid_.size()) - 1;
  Eigen::MatrixXd phi(G + 1, kappa);
  for (int c = 0; c < kappa; ++c) phi.col(c) = grid_values_.col(selected[c]);
  Eigen::VectorXd p = phi.rowwise().squaredNorm();
  Eigen::MatrixXd basis(kappa, kappa);  // removed directions, orthonormal
  std::vector<double> cumulative(G);
  Eigen::VectorXd fx;

  for (int t = 0; t < kappa; ++t) {
    double total = 0.0;
    for (int i = 0; i < G; ++i) {
      total += 0.5 * h_ * (std::max(p[i], 0.0) + std::max(p[i + 1], 0.0));
      cumulative[i] = total;
    }
    double x = 0.0;
    Eigen::VectorXd proj;
    bool accepted = false;
    for (int trial = 0; trial < 100000 && !accepted; ++trial) {
      const double target = unif(rng) * total;
      const int cell = static_cast<int>(
          std::min<std::ptrdiff_t>(std::upper_bound(cumulative.begin(), cumulative.end(), target) -
                                       cumulative.begin(),
                                   G - 1));
      const double a = std::max(p[cell], 0.0), b = std::max(p[cell + 1], 0.0);
      const double r = unif(rng);
      // Inverse CDF of the linear density a + (b - a)u on [0, 1].
      const double root = std::sqrt(a * a + (b - a) * r * (a + b));
      const double den = a + root;
      const double u = den > 0.0 ? r * (a + b) / den : r;
      x = grid_[cell] + u * h_;
      const double q = a + (b - a) * u;
      eval_functions(x, selected, fx);
      proj = fx;
      if (t > 0) {
        const auto used = basis.leftCols(t);
        proj -= used * (used.transpose() * proj);
      }
      const double px = proj.squaredNorm();
      accepted = unif(rng) * kEnvelope * q < px;
    }
    if (!accepted) throw DegenerateSample("sine sampler: rejection step did not accept; resample");
    cfg.points.push_back(x);
    if (t > 0) {
      const auto used = basis.leftCols(t);
      proj -= used * (used.transpose() * proj);
    }
    const double nrm = proj.norm();
    if (!(nrm > 0.0)) throw DegenerateSample("sine sampler: repeated point; resample");
    basis.col(t) = proj / nrm;
    p -= (phi * basis.col(t)).cwiseAbs2();
  }
  std::sort(cfg.points.begin(), cfg.points.end());
  for (std::size_t i = 1; i < cfg.points.size(); ++i)
    if (cfg.points[i] - cfg.points[i - 1] < 1e-12) cfg.degenerate = true;
  return cfg;
}

std::shared_ptr<const SineWindowSampler> SineWindowSampler::cached(double B) {
  check_halfwidth(B);
  static std::mutex mutex;
  static std::map<double, std::shared_ptr<const SineWindowSampler>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(B);
  if (it != cache.end()) return it->second;
  auto sampler = std::make_shared<const SineWindowSampler>(B);
  cache.emplace(B, sampler);
  return sampler;
}

PointConfig sample_sine_process(double B, std::uint64_t seed) {
  return SineWindowSampler::cached(B)->sample(seed);
}

CharPolyEval xi_infinity_draw(const std::vector<cplx>& sgrid, double B, std::uint64_t seed) {
  check_halfwidth(B);
  double smax = 0.0;
  for (const auto& s : sgrid) smax = std::max(smax, std::abs(s));
  if (B < 4.0 * smax) throw InputError("xi_infinity_draw: B must be at least 4 max|s|");
  const PointConfig cfg = sample_sine_process(B, seed);
  CharPolyEval out;
  out.grid = sgrid;
  out.values.reserve(sgrid.size());
  // Points within 1 of the window edge are dropped.
  for (const auto& s : sgrid) out.values.push_back(truncated_product(cfg, s, B - 1.0));
  out.meta.ensemble = "sine";
  out.meta.n = static_cast<int>(cfg.points.size());
  out.meta.energy = 0.0;
  out.meta.seed = seed;
  out.meta.truncation = "sine window B=" + std::to_string(B) + ", product over |y| <= B-1";
  return out;
}

CharPolyEval xi_infinity_cue_reference(int N, const std::vector<cplx>& sgrid, std::uint64_t seed) {
  if (N < 64) throw InputError("xi_infinity_cue_reference: N must be >= 64");
  const Spectrum spec = sample_spectrum(Ensemble::CUE, N, seed);
  CharPolyEval out = xi_grid(spec, CharPolyParams::make(Ensemble::CUE), sgrid);
  out.meta.truncation = "CUE(" + std::to_string(N) + ") finite product";
  return out;
}

}  // namespace microlimit
