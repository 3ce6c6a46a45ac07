#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "microlimit/ensembles.hpp"
#include "microlimit/kernels.hpp"

namespace microlimit {

/// Half-open interval [a, b) with a < b.
struct Interval {
  double a;
  double b;

  Interval(double a_, double b_);
  double length() const { return b - a; }
  Interval reflected() const { return Interval(-b, -a); }
  bool contains(double x) const { return x >= a && x < b; }
};

struct CountSummary {
  double mean = 0.0;
  double variance = 0.0;
  double stderrmean = 0.0;
  double stderrvar = 0.0;
  int replicas = 0;
  std::optional<double> oraclemean;
  std::optional<double> oraclevar;
};

/// E X_I = int_I K(x, x) dx.
double expected_count_quadrature(const KernelSpec& spec, const Interval& I);

/// Var X_I = int_I int_{D \ I} K(x, y)^2 dy dx with D the (truncated) domain.
double variance_count_quadrature(const KernelSpec& spec, const Interval& I);

/// Mean, unbiased variance and their standard errors.
CountSummary summarize_counts(const std::vector<double>& counts);

/// Count of values in I.
int count_in(const std::vector<double>& values, const Interval& I);

/// Points counted for a spectrum: microscopic points around E when E is set,
/// otherwise raw reduced angles (SO/Sp), angles (CUE) or unscaled levels (GUE).
std::vector<double> count_coordinates(const Spectrum& spectrum, std::optional<double> E,
                                      double radius);

/// Oracle for the count of I: kernel quadrature in the natural coordinates,
/// or for E set the image interval when it stays inside the kernel's domain.
/// Returns nullopt when no oracle applies.
struct CountOracle {
  double mean;
  std::optional<double> variance;
};
std::optional<CountOracle> count_oracle(Ensemble ensemble, int n, std::optional<double> E,
                                        const Interval& I, bool with_variance = true);

/// counts[i][r]: count of intervals[i] in spectrum r.
std::vector<std::vector<double>> replica_counts(const std::vector<Spectrum>& spectra,
                                                std::optional<double> E,
                                                const std::vector<Interval>& intervals);

/// Monte Carlo mean/variance of the count of I over m spectra, with oracle
/// fields filled where an oracle applies.
CountSummary empirical_count_stats(Ensemble ensemble, int n, std::optional<double> E,
                                   const Interval& I, int m, std::uint64_t seed, int workers = 1,
                                   bool tridiagonal = false, bool oracle = true);

struct SlopeFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  double intercept = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
};

/// Ordinary least squares y = intercept + slope x with slope standard error.
SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct AuditRow {
  double length = 0.0;           // L; intervals [L, 2L] and [-2L, -L]
  CountSummary plus;
  CountSummary minus;
  double symmetrydefect = 0.0;   // mean of X_I - X_{-I}
  double symmetrystderr = 0.0;
  double covariance = 0.0;       // Cov(X_I, X_{-I})
};

struct AmenabilityReport {
  Ensemble ensemble = Ensemble::CUE;
  int n = 0;
  double energy = 0.0;
  int replicas = 0;
  std::vector<AuditRow> rows;
  SlopeFit meanslope;
  SlopeFit varslope;
  SlopeFit symmetryslope;
  double tol = 0.1;
  double margin = 0.1;
  bool mean_ok = false;
  bool var_ok = false;
  bool symmetry_ok = false;
  bool pass() const { return mean_ok && var_ok && symmetry_ok; }
};

/// Count regularity audit at the microscopic scale around E over a grid of
/// lengths L >= 1. GUE uses the tridiagonal sampler unless `tridiagonal` is false.
AmenabilityReport amenability_audit(Ensemble ensemble, int n, double E,
                                    const std::vector<double>& lengths, int m, std::uint64_t seed,
                                    int workers = 1, bool tridiagonal = true);

}  // namespace microlimit
