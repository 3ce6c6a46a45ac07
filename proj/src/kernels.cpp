#include "microlimit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "microlimit/common.hpp"
#include "microlimit/quadrature.hpp"
#include "microlimit/rng.hpp"

namespace microlimit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRescale = 1e100;
const double kLogRescale = std::log(kRescale);

// Converts mantissa * exp(logscale) without spurious under/overflow.
double unscale(double mantissa, double logscale) {
  if (mantissa == 0.0) return 0.0;
  return std::copysign(std::exp(std::log(std::abs(mantissa)) + logscale), mantissa);
}

double log_psi0_scale(double x) { return -0.25 * x * x - 0.25 * std::log(kTwoPi); }

double distance_to_integer(double t) { return std::abs(t - std::nearbyint(t)); }

}  // namespace

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::SOEven: return "so-even";
    case KernelFamily::SOOdd: return "so-odd";
    case KernelFamily::Sp: return "sp";
    case KernelFamily::GUE: return "gue";
    case KernelFamily::Sine: return "sine";
  }
  return "?";
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "so-even") return KernelFamily::SOEven;
  if (name == "so-odd") return KernelFamily::SOOdd;
  if (name == "sp") return KernelFamily::Sp;
  if (name == "gue") return KernelFamily::GUE;
  if (name == "sine") return KernelFamily::Sine;
  throw InputError("unknown kernel family '" + name + "' (expected so-even|so-odd|sp|gue|sine)");
}

KernelSpec::KernelSpec(KernelFamily family, int size) : family_(family), size_(size) {
  if (family != KernelFamily::Sine && size < 1)
    throw InputError("KernelSpec: size must be a positive integer");
  if (family == KernelFamily::Sine) size_ = std::max(size, 0);
}

bool KernelSpec::is_compact() const {
  return family_ == KernelFamily::SOEven || family_ == KernelFamily::SOOdd ||
         family_ == KernelFamily::Sp;
}

RealInterval KernelSpec::domain() const {
  if (is_compact()) return {0.0, 0.5};
  return {-kInf, kInf};
}

RealInterval KernelSpec::quadrature_domain() const {
  if (family_ == KernelFamily::GUE) {
    const double r = 2.5 * std::sqrt(static_cast<double>(size_)) + 10.0;
    return {-r, r};
  }
  return domain();
}

int KernelSpec::dimension() const {
  switch (family_) {
    case KernelFamily::SOEven: return 2 * size_;
    case KernelFamily::SOOdd: return 2 * size_ + 1;
    case KernelFamily::Sp: return 2 * size_;
    case KernelFamily::GUE: return size_;
    case KernelFamily::Sine: return 0;
  }
  return 0;
}

double KernelSpec::rank() const {
  return family_ == KernelFamily::Sine ? kInf : static_cast<double>(size_);
}

double KernelSpec::oscillation_length() const {
  if (is_compact()) return 1.0 / (2.0 * size_);
  if (family_ == KernelFamily::GUE) return kPi / std::sqrt(static_cast<double>(size_));
  return 1.0;
}

double dirichlet_s(int N, double t) {
  const double k = std::nearbyint(t);
  const double u = t - k;  // in [-1/2, 1/2]
  const long long parity = std::llabs(static_cast<long long>(k)) % 2 * ((N - 1) % 2 != 0 ? 1 : 0);
  const double sign = (parity == 0) ? 1.0 : -1.0;
  const double su = std::sin(kPi * u);
  double value;
  if (std::abs(su) < 1e-8) {
    const double pu = kPi * u;
    value = N * (1.0 - (static_cast<double>(N) * N - 1.0) * pu * pu / 6.0);
  } else {
    value = std::sin(kPi * N * u) / su;
  }
  return sign * value;
}

std::vector<HermiteEvalRow> hermite_psi(int kmax, double x) {
  if (kmax < 0) throw InputError("hermite_psi: kmax must be nonnegative");
  if (!std::isfinite(x)) throw InputError("hermite_psi: x must be finite");
  // Values through kmax + 1 so the derivative relation closes at kmax.
  std::vector<double> psi(static_cast<std::size_t>(kmax) + 2);
  double logscale = log_psi0_scale(x);
  double prev = 0.0, cur = 1.0;
  psi[0] = unscale(cur, logscale);
  for (int k = 0; k <= kmax; ++k) {
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                        std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      logscale += kLogRescale;
    }
    psi[k + 1] = unscale(cur, logscale);
  }
  std::vector<HermiteEvalRow> rows(static_cast<std::size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) {
    const double lower = k > 0 ? std::sqrt(static_cast<double>(k)) * psi[k - 1] : 0.0;
    const double upper = std::sqrt(static_cast<double>(k + 1)) * psi[k + 1];
    rows[k] = {k, psi[k], 0.5 * (lower - upper)};
  }
  return rows;
}

HermitePair hermite_pair(int n, double x) {
  if (n < 1) throw InputError("hermite_pair: n must be >= 1");
  double logscale = log_psi0_scale(x);
  // m[j] holds the mantissa of psi_{k-3+j}; after the loop k = n + 1.
  double m[4] = {0.0, 0.0, 0.0, 1.0};
  for (int k = 0; k <= n; ++k) {
    const double next = (x * m[3] - std::sqrt(static_cast<double>(k)) * m[2]) /
                        std::sqrt(static_cast<double>(k + 1));
    m[0] = m[1];
    m[1] = m[2];
    m[2] = m[3];
    m[3] = next;
    if (std::abs(next) > kRescale) {
      for (double& v : m) v /= kRescale;
      logscale += kLogRescale;
    }
  }
  // m = {psi_{n-2}, psi_{n-1}, psi_n, psi_{n+1}} (psi_{-1} = 0).
  const double p_nm2 = unscale(m[0], logscale);
  const double p_nm1 = unscale(m[1], logscale);
  const double p_n = unscale(m[2], logscale);
  const double p_np1 = unscale(m[3], logscale);
  const double dn = static_cast<double>(n);
  HermitePair h;
  h.psi_prev = p_nm1;
  h.psi = p_n;
  h.dpsi = 0.5 * (std::sqrt(dn) * p_nm1 - std::sqrt(dn + 1.0) * p_np1);
  h.dpsi_prev = 0.5 * (std::sqrt(dn - 1.0) * p_nm2 - std::sqrt(dn) * p_n);
  return h;
}

double gue_kernel(int n, double x, const HermitePair& hx, double y, const HermitePair& hy) {
  const double rootn = std::sqrt(static_cast<double>(n));
  const double d = x - y;
  const double scale = std::max({1.0, std::abs(x), std::abs(y)});
  if (std::abs(d) < 1e-8 * scale) {
    // Confluent form, averaged over the two points: exact to O(d^2).
    const double kx = rootn * (hx.dpsi * hx.psi_prev - hx.psi * hx.dpsi_prev);
    const double ky = rootn * (hy.dpsi * hy.psi_prev - hy.psi * hy.dpsi_prev);
    return 0.5 * (kx + ky);
  }
  return rootn * (hx.psi * hy.psi_prev - hx.psi_prev * hy.psi) / d;
}

namespace {

void check_in_domain(const KernelSpec& spec, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) throw InputError("kernel_eval: arguments must be finite");
  const auto dom = spec.domain();
  if (!dom.contains(x, 1e-12) || !dom.contains(y, 1e-12))
    throw InputError("kernel_eval: point outside the " + to_string(spec.family()) +
                     " domain [0, 1/2]");
}

double sinc_pi(double d) {
  if (std::abs(d) < 1e-8) return 1.0 - kPi * kPi * d * d / 6.0;
  return std::sin(kPi * d) / (kPi * d);
}

}  // namespace

double kernel_eval(const KernelSpec& spec, double x, double y) {
  check_in_domain(spec, x, y);
  const int n = spec.size();
  switch (spec.family()) {
    case KernelFamily::SOEven:
      return dirichlet_s(2 * n - 1, x - y) + dirichlet_s(2 * n - 1, x + y);
    case KernelFamily::SOOdd:
      return dirichlet_s(2 * n, x - y) - dirichlet_s(2 * n, x + y);
    case KernelFamily::Sp:
      return dirichlet_s(2 * n + 1, x - y) - dirichlet_s(2 * n + 1, x + y);
    case KernelFamily::GUE:
      return gue_kernel(n, x, hermite_pair(n, x), y, hermite_pair(n, y));
    case KernelFamily::Sine:
      return sinc_pi(x - y);
  }
  return 0.0;
}

double kernel_diagonal(const KernelSpec& spec, double x) {
  check_in_domain(spec, x, x);
  const int n = spec.size();
  switch (spec.family()) {
    case KernelFamily::SOEven: return (2.0 * n - 1.0) + dirichlet_s(2 * n - 1, 2.0 * x);
    case KernelFamily::SOOdd: return 2.0 * n - dirichlet_s(2 * n, 2.0 * x);
    case KernelFamily::Sp: return (2.0 * n + 1.0) - dirichlet_s(2 * n + 1, 2.0 * x);
    case KernelFamily::GUE: {
      const auto h = hermite_pair(n, x);
      return std::sqrt(static_cast<double>(n)) * (h.dpsi * h.psi_prev - h.psi * h.dpsi_prev);
    }
    case KernelFamily::Sine: return 1.0;
  }
  return 0.0;
}

double semicircle_density(double x) {
  const double r = 4.0 - x * x;
  return r > 0.0 ? std::sqrt(r) / kTwoPi : 0.0;
}

double stieltjes_pv(double E) {
  if (!(std::abs(E) < 2.0)) throw InputError("stieltjes_pv: E must lie in (-2, 2)");
  const double h = 0.5 * (2.0 - std::abs(E));
  // Outer pieces under x = 2 sin(phi): rho(x) dx = (2/pi) cos^2(phi) dphi.
  auto outer = [E](double phi) {
    const double c = std::cos(phi);
    return (2.0 / kPi) * c * c / (2.0 * std::sin(phi) - E);
  };
  const double lo_end = std::asin(std::clamp((E - h) / 2.0, -1.0, 1.0));
  const double hi_start = std::asin(std::clamp((E + h) / 2.0, -1.0, 1.0));
  const auto left = quad::adaptive(outer, -0.5 * kPi, lo_end, 1e-14, 1e-14);
  const auto right = quad::adaptive(outer, hi_start, 0.5 * kPi, 1e-14, 1e-14);
  // Symmetric excision of radius h around E.
  auto inner = [E](double t) {
    if (t == 0.0) return 0.0;
    return (semicircle_density(E + t) - semicircle_density(E - t)) / t;
  };
  const auto core = quad::adaptive(inner, 0.0, h, 1e-14, 1e-14);
  return left.value + right.value + core.value;
}

KernelBoundReport verify_kernel_bounds(const KernelSpec& spec, double E, double delta,
                                       int samplecount, std::uint64_t seed) {
  if (samplecount < 1) throw InputError("verify_kernel_bounds: samplecount must be positive");
  if (!(delta > 0.0)) throw InputError("verify_kernel_bounds: delta must be positive");
  double lo, hi, scale;
  bool modular = false;
  switch (spec.family()) {
    case KernelFamily::GUE: {
      if (!(E - delta > -2.0 && E + delta < 2.0))
        throw InputError("verify_kernel_bounds: [E - delta, E + delta] must lie inside (-2, 2)");
      const double rootn = std::sqrt(static_cast<double>(spec.size()));
      lo = (E - delta) * rootn;
      hi = (E + delta) * rootn;
      scale = rootn;
      break;
    }
    case KernelFamily::Sine:
      lo = E - delta;
      hi = E + delta;
      scale = 1.0;
      break;
    default:
      if (!(E - delta >= 0.0 && E + delta <= 0.5))
        throw InputError("verify_kernel_bounds: [E - delta, E + delta] must lie inside [0, 1/2]");
      lo = E - delta;
      hi = E + delta;
      scale = spec.dimension();
      modular = true;
  }
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  KernelBoundReport report;
  report.pairs = samplecount;
  for (int i = 0; i < samplecount; ++i) {
    const double x = u(rng);
    const double y = (i % 10 == 0) ? x : u(rng);
    const double k = std::abs(kernel_eval(spec, x, y));
    const double dist = modular ? distance_to_integer(x - y) : std::abs(x - y);
    const double envelope = dist > 0.0 ? std::min(scale, 1.0 / dist) : scale;
    const double ratio = k / envelope;
    if (k > report.max_abs) report.max_abs = k;
    if (ratio > report.max_ratio) {
      report.max_ratio = ratio;
      report.argmax_x = x;
      report.argmax_y = y;
    }
  }
  return report;
}

double dirichlet_envelope_ratio(int N, int samplecount) {
  if (N < 1 || samplecount < 2) throw InputError("dirichlet_envelope_ratio: bad arguments");
  double best = 0.0;
  for (int i = 0; i < samplecount; ++i) {
    const double t = -0.5 + (i + 0.5) / samplecount;
    const double v = std::abs(dirichlet_s(N, t)) * (1.0 + N * std::abs(t)) / N;
    best = std::max(best, v);
  }
  return best;
}

}  // namespace microlimit
