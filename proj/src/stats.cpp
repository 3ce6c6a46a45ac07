#include "microlimit/stats.hpp"

#include <algorithm>
#include <cmath>

#include "microlimit/charpoly.hpp"
#include "microlimit/limit_reference.hpp"
#include "microlimit/parallel.hpp"
#include "microlimit/resample.hpp"
#include "microlimit/rng.hpp"

namespace microlimit {

double kolmogorov_q(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Small-lambda form: 1 - sqrt(2 pi)/lambda sum exp(-(2j-1)^2 pi^2 / (8 lambda^2)).
    const double y = std::exp(-kPi * kPi / (8.0 * lambda * lambda));
    double sum = 0.0;
    for (int j = 1; j <= 6; ++j) sum += std::pow(y, (2 * j - 1) * (2 * j - 1));
    return std::clamp(1.0 - std::sqrt(kTwoPi) / lambda * sum, 0.0, 1.0);
  }
  const double x = std::exp(-2.0 * lambda * lambda);
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::pow(x, j * j);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KSResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 50 || b.size() < 50) throw InputError("ks_two_sample: need at least 50 values per sample");
  for (double v : a)
    if (std::isnan(v)) throw InputError("ks_two_sample: NaN in first sample");
  for (double v : b)
    if (std::isnan(v)) throw InputError("ks_two_sample: NaN in second sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(i / n1 - j / n2));
  }
  KSResult r;
  r.statistic = d;
  r.m1 = static_cast<int>(a.size());
  r.m2 = static_cast<int>(b.size());
  const double en = std::sqrt(n1 * n2 / (n1 + n2));
  r.pvalue = kolmogorov_q((en + 0.12 + 0.11 / en) * d);
  return r;
}

std::string to_string(Functional f) {
  switch (f) {
    case Functional::LogAbs: return "logabs";
    case Functional::Re: return "re";
    case Functional::Im: return "im";
  }
  return "?";
}

double apply_functional(Functional f, cplx value) {
  switch (f) {
    case Functional::LogAbs: return std::log(std::abs(value));
    case Functional::Re: return value.real();
    case Functional::Im: return value.imag();
  }
  return 0.0;
}

std::vector<double> apply_functional(Functional f, const std::vector<cplx>& values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(apply_functional(f, v));
  return out;
}

std::string to_string(Reference r) { return r == Reference::DPP ? "dpp" : "cue"; }

Reference parse_reference(const std::string& name) {
  if (name == "dpp") return Reference::DPP;
  if (name == "cue") return Reference::CUE;
  throw InputError("unknown reference '" + name + "' (expected dpp|cue)");
}

namespace {

std::vector<std::vector<cplx>> transpose_draws(const std::vector<std::vector<cplx>>& per_replica,
                                               std::size_t ns) {
  std::vector<std::vector<cplx>> out(ns, std::vector<cplx>(per_replica.size()));
  for (std::size_t r = 0; r < per_replica.size(); ++r)
    for (std::size_t i = 0; i < ns; ++i) out[i][r] = per_replica[r][i];
  return out;
}

}  // namespace

std::vector<std::vector<cplx>> reference_draws(Reference reference,
                                               const std::vector<cplx>& svalues, int m,
                                               std::uint64_t seed, int workers,
                                               const ReferenceSettings& settings) {
  if (m < 1) throw InputError("reference_draws: m must be >= 1");
  if (svalues.empty()) throw InputError("reference_draws: empty s grid");
  std::vector<std::vector<cplx>> per(static_cast<std::size_t>(m));
  if (reference == Reference::DPP) SineWindowSampler::cached(settings.B);
  parallel_for(per.size(), workers, [&](std::size_t r) {
    per[r] = with_resample(derive_seed(seed, r), [&](std::uint64_t s) {
      return reference == Reference::DPP ? xi_infinity_draw(svalues, settings.B, s).values
                                         : xi_infinity_cue_reference(settings.N, svalues, s).values;
    });
  });
  return transpose_draws(per, svalues.size());
}

std::vector<std::vector<cplx>> statistic_draws(Ensemble ensemble, int n, double E,
                                               const std::vector<cplx>& svalues, int m,
                                               std::uint64_t seed, int workers, bool tridiagonal) {
  check_dimension(ensemble, n);
  if (m < 1) throw InputError("statistic_draws: m must be >= 1");
  if (svalues.empty()) throw InputError("statistic_draws: empty s grid");
  const CharPolyParams params = CharPolyParams::make(ensemble, E);
  std::vector<std::vector<cplx>> per(static_cast<std::size_t>(m));
  parallel_for(per.size(), workers, [&](std::size_t r) {
    per[r] = with_resample(derive_seed(seed, r), [&](std::uint64_t s) {
      const Spectrum spec = sample_spectrum(ensemble, n, s, tridiagonal);
      auto vals = xi_grid(spec, params, svalues).values;
      if (ensemble == Ensemble::GUE) {
        const double rho = semicircle_density(E);
        for (std::size_t i = 0; i < vals.size(); ++i)
          if (svalues[i] != cplx(0.0, 0.0))
            vals[i] *= std::exp(-svalues[i] * cplx(E / (2.0 * rho), -kPi));
      }
      return vals;
    });
  });
  return transpose_draws(per, svalues.size());
}

const ConvergenceRow& ConvergenceTable::at(int n, cplx s, Functional f) const {
  for (const auto& row : rows)
    if (row.n == n && row.svalue == s && row.functional == f) return row;
  throw InputError("convergence table has no such row");
}

ConvergenceTable convergence_sweep(Ensemble ensemble, double E, const std::vector<cplx>& svalues,
                                   const std::vector<int>& nlist, int m, std::uint64_t seed,
                                   Reference reference, int workers,
                                   const ReferenceSettings& settings, bool tridiagonal) {
  if (nlist.empty()) throw InputError("convergence_sweep: empty n list");
  if (svalues.empty()) throw InputError("convergence_sweep: empty s list");
  if (m < 50) throw InputError("convergence_sweep: m must be >= 50");
  CharPolyParams::make(ensemble, E);
  for (int n : nlist) check_dimension(ensemble, n);

  ConvergenceTable table;
  table.ensemble = ensemble;
  table.energy = E;
  table.reference = reference;
  table.m = m;
  table.seed = seed;
  const auto ref = reference_draws(reference, svalues, m, derive_seed(seed, 0x7265ULL), workers, settings);
  const Functional fs[3] = {Functional::LogAbs, Functional::Re, Functional::Im};
  for (int n : nlist) {
    const auto st = statistic_draws(ensemble, n, E, svalues, m,
                                    derive_seed(seed, 1, static_cast<std::uint64_t>(n)), workers,
                                    tridiagonal);
    for (std::size_t i = 0; i < svalues.size(); ++i)
      for (Functional f : fs) {
        ConvergenceRow row;
        row.n = n;
        row.svalue = svalues[i];
        row.functional = f;
        row.ks = ks_two_sample(apply_functional(f, st[i]), apply_functional(f, ref[i]));
        table.rows.push_back(row);
      }
  }
  return table;
}

}  // namespace microlimit
