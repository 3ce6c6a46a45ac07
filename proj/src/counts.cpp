#include "microlimit/counts.hpp"

#include <algorithm>
#include <cmath>

#include "microlimit/common.hpp"
#include "microlimit/quadrature.hpp"

namespace microlimit {

namespace {

constexpr double kDomainSlack = 1e-12;

void check_interval_in_domain(const KernelSpec& spec, const Interval& I) {
  const auto dom = spec.domain();
  if (!dom.contains(I.a, kDomainSlack) || !dom.contains(I.b, kDomainSlack))
    throw InputError("interval lies outside the " + to_string(spec.family()) + " domain");
}

double sinc_sq(double t) {
  if (std::abs(t) < 1e-8) return 1.0;
  const double v = std::sin(kPi * t) / (kPi * t);
  return v * v;
}

// Two-sided 97.5% Student t quantiles for df = 1..30.
double t975(int df) {
  static const double table[30] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                   2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                   2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                   2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
  if (df < 1) return std::numeric_limits<double>::infinity();
  if (df <= 30) return table[df - 1];
  return 1.96;
}

}  // namespace

Interval::Interval(double a_, double b_) : a(a_), b(b_) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    throw InputError("interval needs finite endpoints with a < b");
}

double expected_count_quadrature(const KernelSpec& spec, const Interval& I) {
  check_interval_in_domain(spec, I);
  if (spec.family() == KernelFamily::Sine) return I.length();
  const double a = std::max(I.a, spec.domain().lo);
  const double b = std::min(I.b, spec.domain().hi);
  if (!(b > a)) return 0.0;
  const double h = 0.5 * spec.oscillation_length();
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
  auto f = [&spec](double x) { return kernel_diagonal(spec, x); };
  return quad::adaptive(f, a, b, 1e-10, 1e-13, 20 * panels + 100, panels).value;
}

double variance_count_quadrature(const KernelSpec& spec, const Interval& I) {
  check_interval_in_domain(spec, I);
  if (spec.family() == KernelFamily::Sine) {
    // int_I int_R K^2 = |I| since int sinc^2 = 1; subtract the I x I part.
    const double L = I.length();
    auto f = [L](double t) { return (L - t) * sinc_sq(t); };
    const int panels = std::max(1, static_cast<int>(std::ceil(2.0 * L)));
    const double inner = quad::adaptive(f, 0.0, L, 1e-13, 1e-13, 50 * panels, panels).value;
    return L - 2.0 * inner;
  }
  const auto dom = spec.quadrature_domain();
  const double a = std::max(I.a, dom.lo);
  const double b = std::min(I.b, dom.hi);
  if (!(b > a)) return 0.0;
  const double h = 0.5 * spec.oscillation_length();
  const auto inner = quad::composite_gauss_legendre(a, b, h, 8);
  quad::Rule outer;
  auto append = [&outer, h](double lo, double hi) {
    if (!(hi > lo)) return;
    const auto r = quad::composite_gauss_legendre(lo, hi, h, 8);
    outer.nodes.insert(outer.nodes.end(), r.nodes.begin(), r.nodes.end());
    outer.weights.insert(outer.weights.end(), r.weights.begin(), r.weights.end());
  };
  append(dom.lo, a);
  append(b, dom.hi);
  if (outer.size() == 0) return 0.0;

  double total = 0.0;
  if (spec.family() == KernelFamily::GUE) {
    const int n = spec.size();
    std::vector<HermitePair> hin(inner.size()), hout(outer.size());
    for (std::size_t i = 0; i < inner.size(); ++i) hin[i] = hermite_pair(n, inner.nodes[i]);
    for (std::size_t j = 0; j < outer.size(); ++j) hout[j] = hermite_pair(n, outer.nodes[j]);
    for (std::size_t i = 0; i < inner.size(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < outer.size(); ++j) {
        const double k = gue_kernel(n, inner.nodes[i], hin[i], outer.nodes[j], hout[j]);
        row += outer.weights[j] * k * k;
      }
      total += inner.weights[i] * row;
    }
    return total;
  }
  for (std::size_t i = 0; i < inner.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < outer.size(); ++j) {
      const double k = kernel_eval(spec, inner.nodes[i], outer.nodes[j]);
      row += outer.weights[j] * k * k;
    }
    total += inner.weights[i] * row;
  }
  return total;
}

CountSummary summarize_counts(const std::vector<double>& counts) {
  const std::size_t m = counts.size();
  if (m < 2) throw InputError("summarize_counts: need at least 2 replicas");
  double mean = 0.0;
  for (double c : counts) mean += c;
  mean /= m;
  double s2 = 0.0, s4 = 0.0;
  for (double c : counts) {
    const double d = c - mean;
    s2 += d * d;
    s4 += d * d * d * d;
  }
  const double md = static_cast<double>(m);
  const double var = s2 / (md - 1.0);
  const double mu4 = s4 / md;
  CountSummary out;
  out.replicas = static_cast<int>(m);
  out.mean = mean;
  out.variance = var;
  // Counts have unit granularity; floor the errors at one count per m replicas.
  const double floor = 1.0 / md;
  out.stderrmean = std::max(std::sqrt(var / md), floor);
  const double v4 = (mu4 - var * var * (md - 3.0) / (md - 1.0)) / md;
  out.stderrvar = std::max(std::sqrt(std::max(v4, 0.0)), floor);
  return out;
}

int count_in(const std::vector<double>& values, const Interval& I) {
  int c = 0;
  for (double v : values) c += I.contains(v) ? 1 : 0;
  return c;
}

std::vector<double> count_coordinates(const Spectrum& spectrum, std::optional<double> E,
                                      double radius) {
  if (E) return microscopic_points(spectrum, *E, radius).points;
  switch (spectrum.ensemble) {
    case Ensemble::SO:
    case Ensemble::Sp: return spectrum.halfangles;
    case Ensemble::CUE: return spectrum.angles;
    case Ensemble::GUE: return spectrum.levels;
  }
  return {};
}

std::optional<CountOracle> count_oracle(Ensemble ensemble, int n, std::optional<double> E,
                                        const Interval& I, bool with_variance) {
  if (ensemble == Ensemble::CUE) {
    // Rotation invariance: intensity n on the circle, 1 per unit microscopically.
    if (E) return CountOracle{I.length(), std::nullopt};
    if (I.length() > 1.0) return std::nullopt;
    return CountOracle{n * I.length(), std::nullopt};
  }
  const KernelSpec spec = kernel_for(ensemble, n);
  std::optional<Interval> J;
  if (!E) {
    J = I;
  } else if (ensemble == Ensemble::GUE) {
    const double rho = semicircle_density(*E);
    const double rootn = std::sqrt(static_cast<double>(n));
    J = Interval(rootn * *E + I.a / (rho * rootn), rootn * *E + I.b / (rho * rootn));
  } else {
    const double lo = *E + I.a / n, hi = *E + I.b / n;
    if (lo >= 0.0 && hi <= 0.5) {
      J = Interval(lo, hi);
    } else if (lo >= -0.5 && hi <= 0.0) {
      J = Interval(-hi, -lo);
    }
  }
  if (!J) return std::nullopt;
  const auto dom = spec.domain();
  if (!dom.contains(J->a, kDomainSlack) || !dom.contains(J->b, kDomainSlack)) return std::nullopt;
  CountOracle o{expected_count_quadrature(spec, *J), std::nullopt};
  if (with_variance) o.variance = variance_count_quadrature(spec, *J);
  return o;
}

std::vector<std::vector<double>> replica_counts(const std::vector<Spectrum>& spectra,
                                                std::optional<double> E,
                                                const std::vector<Interval>& intervals) {
  double radius = 0.0;
  for (const auto& I : intervals) radius = std::max({radius, std::abs(I.a), std::abs(I.b)});
  std::vector<std::vector<double>> out(intervals.size(), std::vector<double>(spectra.size()));
  for (std::size_t r = 0; r < spectra.size(); ++r) {
    const auto pts = count_coordinates(spectra[r], E, radius);
    for (std::size_t i = 0; i < intervals.size(); ++i) out[i][r] = count_in(pts, intervals[i]);
  }
  return out;
}

CountSummary empirical_count_stats(Ensemble ensemble, int n, std::optional<double> E,
                                   const Interval& I, int m, std::uint64_t seed, int workers,
                                   bool tridiagonal, bool oracle) {
  if (m < 2) throw InputError("empirical_count_stats: m must be >= 2");
  check_dimension(ensemble, n);
  if (E) microscopic_scale(ensemble, n, *E);
  if (E && ensemble != Ensemble::GUE) {
    if (!(*E > -0.5 && *E < 0.5)) throw InputError("energy E must lie in (-1/2, 1/2)");
    if (*E == 0.0 && ensemble != Ensemble::CUE)
      throw InputError("energy E must be nonzero for SO/Sp (the limit excludes E = 0)");
  }
  const auto spectra = sample_replicas(ensemble, n, m, seed, workers, tridiagonal);
  const auto counts = replica_counts(spectra, E, {I});
  CountSummary s = summarize_counts(counts[0]);
  if (oracle) {
    if (auto o = count_oracle(ensemble, n, E, I)) {
      s.oraclemean = o->mean;
      s.oraclevar = o->variance;
    }
  }
  return s;
}

SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t k = x.size();
  if (k < 2 || y.size() != k) throw InputError("fit_line: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InputError("fit_line: x values must not all coincide");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ssr += r * r;
  }
  const int df = static_cast<int>(k) - 2;
  f.stderr_slope = df > 0 ? std::sqrt(ssr / df / sxx) : 0.0;
  const double t = df > 0 ? t975(df) : 0.0;
  f.lo95 = f.slope - t * f.stderr_slope;
  f.hi95 = f.slope + t * f.stderr_slope;
  return f;
}

AmenabilityReport amenability_audit(Ensemble ensemble, int n, double E,
                                    const std::vector<double>& lengths, int m, std::uint64_t seed,
                                    int workers, bool tridiagonal) {
  if (lengths.size() < 2) throw InputError("amenability_audit: need at least two lengths");
  for (double L : lengths)
    if (!(L >= 1.0) || !std::isfinite(L)) throw InputError("amenability_audit: lengths must be >= 1");
  if (m < 2) throw InputError("amenability_audit: m must be >= 2");
  check_dimension(ensemble, n);
  // Validate E before sampling.
  {
    Spectrum probe;
    probe.ensemble = ensemble;
    probe.n = n;
    microscopic_points(probe, E, 0.0);
  }
  const auto spectra =
      sample_replicas(ensemble, n, m, seed, workers, ensemble == Ensemble::GUE && tridiagonal);

  std::vector<Interval> intervals;
  for (double L : lengths) {
    intervals.emplace_back(L, 2.0 * L);
    intervals.emplace_back(-2.0 * L, -L);
  }
  const auto counts = replica_counts(spectra, E, intervals);

  AmenabilityReport rep;
  rep.ensemble = ensemble;
  rep.n = n;
  rep.energy = E;
  rep.replicas = m;
  std::vector<double> lx, ly_mean, ly_var, ly_sym;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const auto& cp = counts[2 * i];
    const auto& cm = counts[2 * i + 1];
    AuditRow row;
    row.length = lengths[i];
    row.plus = summarize_counts(cp);
    row.minus = summarize_counts(cm);
    std::vector<double> diff(cp.size());
    double cov = 0.0;
    for (std::size_t r = 0; r < cp.size(); ++r) {
      diff[r] = cp[r] - cm[r];
      cov += (cp[r] - row.plus.mean) * (cm[r] - row.minus.mean);
    }
    cov /= (cp.size() - 1.0);
    const auto ds = summarize_counts(diff);
    row.symmetrydefect = ds.mean;
    row.symmetrystderr = ds.stderrmean;
    row.covariance = cov;
    rep.rows.push_back(row);

    lx.push_back(std::log(lengths[i]));
    ly_mean.push_back(std::log(std::max(0.5 * (row.plus.mean + row.minus.mean), 1e-300)));
    ly_var.push_back(std::log(std::max(0.5 * (row.plus.variance + row.minus.variance), 1e-300)));
    // Defects below resolution are replaced by their standard error.
    ly_sym.push_back(std::log(std::max(std::abs(row.symmetrydefect), row.symmetrystderr)));
  }
  rep.meanslope = fit_line(lx, ly_mean);
  rep.varslope = fit_line(lx, ly_var);
  rep.symmetryslope = fit_line(lx, ly_sym);
  rep.mean_ok = rep.meanslope.slope <= 1.0 + rep.tol;
  rep.var_ok = rep.varslope.slope < 2.0 - rep.margin;
  rep.symmetry_ok = rep.symmetryslope.slope < 1.0 - rep.margin;
  return rep;
}

}  // namespace microlimit
