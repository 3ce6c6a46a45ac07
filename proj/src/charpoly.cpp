#include "microlimit/charpoly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "microlimit/kernels.hpp"

namespace microlimit {

namespace {

constexpr double kPoleGuard = 1e-13;

double wrap_angle(double t) {
  double r = t - std::floor(t + 0.5);
  if (r >= 0.5) r -= 1.0;
  return r;
}

double wrap_phase(double a) { return std::remainder(a, kTwoPi); }

void check_variant(const Spectrum& spectrum, const CharPolyParams& params) {
  params.validate();
  if (variant_for(spectrum.ensemble) != params.variant)
    throw InputError("xi variant " + to_string(params.variant) + " does not match ensemble " +
                     to_string(spectrum.ensemble));
}

// Per-eigenvalue data reused across evaluation points.
struct Nodes {
  XiVariant variant;
  int n;
  std::vector<double> cot;  // compact: cot(pi x_j), x_j = theta_j - E reduced; ordered by |x|
  std::vector<double> x;    // GUE: n rho (Lambda_i - E); ordered by |x| descending
};

Nodes make_nodes(const Spectrum& spectrum, const CharPolyParams& params) {
  check_variant(spectrum, params);
  Nodes nodes{params.variant, spectrum.n, {}, {}};
  if (params.variant == XiVariant::GUEXi) {
    const double E = params.energy;
    const double scale = spectrum.n * semicircle_density(E);
    const double rootn = std::sqrt(static_cast<double>(spectrum.n));
    nodes.x.reserve(spectrum.levels.size());
    for (double lam : spectrum.levels) {
      const double d = lam / rootn - E;
      if (std::abs(d) < kPoleGuard)
        throw DegenerateSample("eigenvalue on the evaluation pole; resample");
      nodes.x.push_back(scale * d);
    }
    std::sort(nodes.x.begin(), nodes.x.end(),
              [](double a, double b) { return std::abs(a) > std::abs(b); });
    return nodes;
  }
  const double E = params.variant == XiVariant::UnitaryXi ? 0.0 : params.energy;
  std::vector<double> xs;
  xs.reserve(spectrum.angles.size());
  for (double th : spectrum.angles) {
    const double x = wrap_angle(th - E);
    if (2.0 * std::abs(std::sin(kPi * x)) < kPoleGuard)
      throw DegenerateSample("eigenangle on the evaluation pole; resample");
    xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
  nodes.cot.reserve(xs.size());
  for (double x : xs) nodes.cot.push_back(std::cos(kPi * x) / std::sin(kPi * x));
  return nodes;
}

// log of cos(pi sigma) - c sin(pi sigma), continued along sigma' = t sigma, t in [0, 1].
cplx compact_factor_log(double c, cplx sigma) {
  auto w = [c](cplx sg) { return std::cos(kPi * sg) - c * std::sin(kPi * sg); };
  const cplx w1 = w(sigma);
  const double reach = std::abs(c) * std::abs(std::sin(kPi * sigma)) + std::abs(std::cos(kPi * sigma) - 1.0);
  if (reach < 0.5) return std::log(w1);
  const int steps = std::min(4096, 16 * static_cast<int>(std::ceil(reach)) + 16);
  cplx acc = 0.0;
  cplx prev = 1.0;
  for (int k = 1; k <= steps; ++k) {
    const cplx cur = (k == steps) ? w1 : w(sigma * (static_cast<double>(k) / steps));
    acc += std::log(cur / prev);
    prev = cur;
  }
  return acc;
}

LogValue nodes_log(const Nodes& nodes, cplx s) {
  if (s == cplx(0.0, 0.0)) return {0.0, 0.0};
  cplx acc = 0.0;
  if (nodes.variant == XiVariant::GUEXi) {
    // A straight segment from 1 never re-crosses the real axis, so the principal
    // log of 1 - s/x is already the continued one.
    for (double x : nodes.x) acc += std::log(1.0 - s / x);
  } else {
    const cplx sigma = s / static_cast<double>(nodes.n);
    for (double c : nodes.cot) acc += compact_factor_log(c, sigma);
    acc += cplx(0.0, kPi) * sigma * static_cast<double>(nodes.cot.size());
  }
  return {acc.real(), acc.imag()};
}

}  // namespace

std::string to_string(XiVariant variant) {
  switch (variant) {
    case XiVariant::UnitaryXi: return "unitary";
    case XiVariant::SOXi: return "so";
    case XiVariant::SpXi: return "sp";
    case XiVariant::GUEXi: return "gue";
  }
  return "?";
}

XiVariant variant_for(Ensemble ensemble) {
  switch (ensemble) {
    case Ensemble::CUE: return XiVariant::UnitaryXi;
    case Ensemble::SO: return XiVariant::SOXi;
    case Ensemble::Sp: return XiVariant::SpXi;
    case Ensemble::GUE: return XiVariant::GUEXi;
  }
  return XiVariant::UnitaryXi;
}

void CharPolyParams::validate() const {
  switch (variant) {
    case XiVariant::UnitaryXi: return;
    case XiVariant::SOXi:
    case XiVariant::SpXi:
      if (!(energy > -0.5 && energy < 0.5))
        throw InputError("energy E must lie in (-1/2, 1/2) for SO/Sp");
      if (energy == 0.0)
        throw InputError("energy E must be nonzero for SO/Sp (the limit excludes E = 0)");
      return;
    case XiVariant::GUEXi:
      if (!(std::abs(energy) < 2.0)) throw InputError("GUE energy E must lie in (-2, 2)");
      return;
  }
}

CharPolyParams CharPolyParams::make(Ensemble ensemble, double E) {
  CharPolyParams p{variant_for(ensemble), ensemble == Ensemble::CUE ? 0.0 : E};
  p.validate();
  return p;
}

LogValue xi_log(const Spectrum& spectrum, const CharPolyParams& params, cplx s) {
  return nodes_log(make_nodes(spectrum, params), s);
}

cplx xi_eval(const Spectrum& spectrum, const CharPolyParams& params, cplx s) {
  if (s == cplx(0.0, 0.0)) {
    check_variant(spectrum, params);
    return 1.0;
  }
  return xi_log(spectrum, params, s).value();
}

CharPolyEval xi_grid(const Spectrum& spectrum, const CharPolyParams& params,
                     const std::vector<cplx>& grid) {
  const Nodes nodes = make_nodes(spectrum, params);
  CharPolyEval out;
  out.grid = grid;
  out.values.reserve(grid.size());
  for (const cplx& s : grid)
    out.values.push_back(s == cplx(0.0, 0.0) ? cplx(1.0) : nodes_log(nodes, s).value());
  out.meta.ensemble = to_string(spectrum.ensemble);
  out.meta.n = spectrum.n;
  out.meta.energy = params.energy;
  out.meta.seed = spectrum.seed;
  out.meta.truncation = "none (finite product over all eigenvalues)";
  return out;
}

cplx det_oracle(const Eigen::MatrixXcd& matrix, const CharPolyParams& params, cplx s) {
  params.validate();
  const int n = static_cast<int>(matrix.rows());
  if (n != matrix.cols() || n < 1) throw InputError("det_oracle: matrix must be square");
  if (n > 64) throw InputError("det_oracle: n must be <= 64");
  if (s == cplx(0.0, 0.0)) return 1.0;
  cplx z_num, z_den;
  if (params.variant == XiVariant::GUEXi) {
    const double rootn = std::sqrt(static_cast<double>(n));
    const double rho = semicircle_density(params.energy);
    z_den = rootn * params.energy;
    z_num = z_den + s / (rootn * rho);
  } else {
    const double E = params.variant == XiVariant::UnitaryXi ? 0.0 : params.energy;
    z_den = std::exp(cplx(0.0, kTwoPi * E));
    z_num = std::exp(cplx(0.0, kTwoPi) * (E + s / static_cast<double>(n)));
  }
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  Eigen::PartialPivLU<Eigen::MatrixXcd> den(z_den * id - matrix);
  const auto& lu = den.matrixLU();
  double umin = std::abs(lu(0, 0)), umax = umin;
  for (int i = 1; i < n; ++i) {
    umin = std::min(umin, std::abs(lu(i, i)));
    umax = std::max(umax, std::abs(lu(i, i)));
  }
  if (!(umin > kPoleGuard * std::max(1.0, umax)))
    throw DegenerateSample("det_oracle: singular denominator; resample");
  Eigen::PartialPivLU<Eigen::MatrixXcd> num(z_num * id - matrix);
  // Ratio of the two determinants, taken factor by factor.
  const auto& lun = num.matrixLU();
  cplx ratio = 1.0;
  for (int i = 0; i < n; ++i) ratio *= lun(i, i) / lu(i, i);
  const double sign_num = num.permutationP().determinant();
  const double sign_den = den.permutationP().determinant();
  return ratio * (sign_num * sign_den);
}

cplx truncated_product(const PointConfig& config, cplx s, double B) {
  if (!(B >= 0.0)) throw InputError("truncated_product: B must be >= 0");
  if (B > config.windowradius * (1.0 + 1e-12))
    throw InputError("truncated_product: B exceeds the configuration's window radius");
  if (s == cplx(0.0, 0.0)) return 1.0;
  std::vector<double> pts;
  for (double x : config.points) {
    if (std::abs(x) > B) continue;
    if (std::abs(x) < kPoleGuard) throw DegenerateSample("point at the origin; resample");
    pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
  cplx acc = cplx(0.0, kPi) * s;
  for (double x : pts) acc += std::log(1.0 - s / x);
  return std::exp(acc);
}

double Window::radius(int n) const {
  if (kind == Kind::PowerLaw) return std::pow(static_cast<double>(n), -0.1);
  if (!(delta > 0.0)) throw InputError("window delta must be positive");
  return delta;
}

LocalizedValue localized_gue(const Spectrum& spectrum, double E, cplx s, const Window& window) {
  const auto params = CharPolyParams{XiVariant::GUEXi, E};
  check_variant(spectrum, params);
  LocalizedValue out;
  out.delta = window.radius(spectrum.n);
  out.leaves_bulk = !(E - out.delta > -2.0 && E + out.delta < 2.0);
  const double rho = semicircle_density(E);
  const double scale = spectrum.n * rho;
  const double rootn = std::sqrt(static_cast<double>(spectrum.n));
  std::vector<double> inside, outside;
  for (double lam : spectrum.levels) {
    const double d = lam / rootn - E;
    if (std::abs(d) < kPoleGuard) throw DegenerateSample("eigenvalue on the evaluation pole; resample");
    (std::abs(d) <= out.delta ? inside : outside).push_back(scale * d);
  }
  out.count = static_cast<int>(inside.size());
  out.empty = inside.empty();
  if (s == cplx(0.0, 0.0)) return out;
  auto prod = [s](std::vector<double>& xs) {
    std::sort(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
    cplx acc = 0.0;
    for (double x : xs) acc += std::log(1.0 - s / x);
    return acc;
  };
  const cplx log_in = prod(inside);
  const cplx log_out = prod(outside);
  out.window_product = std::exp(log_in);
  out.outside = std::exp(log_out);
  out.predicted = std::exp(log_in + s * E / (2.0 * rho));
  return out;
}

cplx normalized_gue(const Spectrum& spectrum, double E, cplx s) {
  const auto params = CharPolyParams{XiVariant::GUEXi, E};
  if (s == cplx(0.0, 0.0)) {
    check_variant(spectrum, params);
    return 1.0;
  }
  const auto lv = xi_log(spectrum, params, s);
  const double rho = semicircle_density(E);
  const cplx shift = -s * cplx(E / (2.0 * rho), -kPi);
  return std::exp(cplx(lv.logabs, lv.arg) + shift);
}

cplx ratio_statistic(const Spectrum& spectrum, const CharPolyParams& params,
                     const std::vector<cplx>& alphas, const std::vector<cplx>& betas) {
  if (alphas.empty() || alphas.size() != betas.size())
    throw InputError("ratio_statistic: alphas and betas must be nonempty and of equal length");
  const Nodes nodes = make_nodes(spectrum, params);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (alphas[i] == betas[i]) continue;
    const auto la = nodes_log(nodes, alphas[i]);
    const auto lb = nodes_log(nodes, betas[i]);
    if (!std::isfinite(lb.logabs) || std::exp(lb.logabs) < kPoleGuard)
      throw DegenerateSample("ratio_statistic: beta on a zero of xi; resample");
    acc += cplx(la.logabs - lb.logabs, la.arg - lb.arg);
  }
  return std::exp(acc);
}

int winding_zero_count(const Spectrum& spectrum, const CharPolyParams& params, double re0,
                       double re1, double im0, double im1, int steps) {
  if (!(re1 > re0 && im1 > im0)) throw InputError("winding_zero_count: empty rectangle");
  if (steps < 4) throw InputError("winding_zero_count: steps must be >= 4");
  const Nodes nodes = make_nodes(spectrum, params);
  auto phase = [&nodes](cplx s) {
    const auto lv = nodes_log(nodes, s);
    if (!std::isfinite(lv.logabs)) throw DegenerateSample("zero on the contour; move the rectangle");
    return lv.arg;
  };
  const cplx corners[5] = {{re0, im0}, {re1, im0}, {re1, im1}, {re0, im1}, {re0, im0}};
  double total = 0.0;
  // Recursive refinement keeps every phase increment below pi/4.
  auto segment = [&](auto&& self, cplx a, double pa, cplx b, double pb, int depth) -> double {
    const double d = wrap_phase(pb - pa);
    if (std::abs(d) < 0.25 * kPi || depth > 30) return d;
    const cplx mid = 0.5 * (a + b);
    const double pm = phase(mid);
    return self(self, a, pa, mid, pm, depth + 1) + self(self, mid, pm, b, pb, depth + 1);
  };
  for (int e = 0; e < 4; ++e) {
    cplx prev = corners[e];
    double pprev = phase(prev);
    for (int k = 1; k <= steps; ++k) {
      const cplx cur = corners[e] + (corners[e + 1] - corners[e]) * (static_cast<double>(k) / steps);
      const double pcur = phase(cur);
      total += segment(segment, prev, pprev, cur, pcur, 0);
      prev = cur;
      pprev = pcur;
    }
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

std::vector<double> xi_zeros(const Spectrum& spectrum, const CharPolyParams& params,
                             double radius) {
  check_variant(spectrum, params);
  const double E = params.variant == XiVariant::UnitaryXi ? 0.0 : params.energy;
  return microscopic_points(spectrum, E, radius).points;
}

}  // namespace microlimit
