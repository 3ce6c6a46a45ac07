#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "microlimit/common.hpp"
#include "microlimit/ensembles.hpp"

namespace microlimit {

struct KSResult {
  double statistic = 0.0;
  double pvalue = 1.0;
  int m1 = 0;
  int m2 = 0;
};

/// Kolmogorov distribution tail Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

/// Two-sample Kolmogorov-Smirnov test. Exact sup-distance of the empirical
/// CDFs (ties handled), asymptotic p-value. Both samples need >= 50 values.
KSResult ks_two_sample(std::vector<double> a, std::vector<double> b);

enum class Functional { LogAbs, Re, Im };
std::string to_string(Functional f);
double apply_functional(Functional f, cplx value);
std::vector<double> apply_functional(Functional f, const std::vector<cplx>& values);

enum class Reference { DPP, CUE };
std::string to_string(Reference r);
Reference parse_reference(const std::string& name);

struct ReferenceSettings {
  double B = 32.0;  // DPP window half-width
  int N = 512;      // CUE dimension
};

/// values[i][r]: reference draw r of xi_infinity(svalues[i]).
std::vector<std::vector<cplx>> reference_draws(Reference reference,
                                               const std::vector<cplx>& svalues, int m,
                                               std::uint64_t seed, int workers = 1,
                                               const ReferenceSettings& settings = {});

/// values[i][r]: the statistic that converges to xi_infinity(svalues[i]) for
/// replica r: xi (CUE, SO, Sp) or the normalized GUE product.
/// GUE uses the tridiagonal sampler unless `tridiagonal` is false.
std::vector<std::vector<cplx>> statistic_draws(Ensemble ensemble, int n, double E,
                                               const std::vector<cplx>& svalues, int m,
                                               std::uint64_t seed, int workers = 1,
                                               bool tridiagonal = true);

struct ConvergenceRow {
  int n = 0;
  cplx svalue;
  Functional functional = Functional::LogAbs;
  KSResult ks;
};

struct ConvergenceTable {
  Ensemble ensemble = Ensemble::CUE;
  double energy = 0.0;
  Reference reference = Reference::CUE;
  int m = 0;
  std::uint64_t seed = 0;
  std::vector<ConvergenceRow> rows;

  /// Row for (n, s, functional); throws InputError when absent.
  const ConvergenceRow& at(int n, cplx s, Functional f) const;
};

/// KS comparison of the statistic against m reference draws for every
/// (n, s, functional). The reference sample is drawn once and shared.
ConvergenceTable convergence_sweep(Ensemble ensemble, double E, const std::vector<cplx>& svalues,
                                   const std::vector<int>& nlist, int m, std::uint64_t seed,
                                   Reference reference, int workers = 1,
                                   const ReferenceSettings& settings = {},
                                   bool tridiagonal = true);

}  // namespace microlimit
