#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace microlimit {

enum class KernelFamily { SOEven, SOOdd, Sp, GUE, Sine };

std::string to_string(KernelFamily family);
KernelFamily parse_kernel_family(const std::string& name);  // so-even|so-odd|sp|gue|sine

struct RealInterval {
  double lo;
  double hi;
  bool contains(double x, double slack = 0.0) const { return x >= lo - slack && x <= hi + slack; }
};

/// Selects a determinantal kernel.
///
/// `size` is n for SO(2n), SO(2n+1), Sp(2n) and GUE(n); it is ignored for the
/// sine kernel. The compact-group kernels act on the reduced eigenangles
/// in [0, 1/2]; GUE acts on unscaled eigenvalues on the real line.
class KernelSpec {
 public:
  KernelSpec(KernelFamily family, int size);

  KernelFamily family() const { return family_; }
  int size() const { return size_; }

  /// Natural support of the point process.
  RealInterval domain() const;

  /// Finite window used when the domain has to be integrated over
  /// (GUE: [-2.5 sqrt(n) - 10, 2.5 sqrt(n) + 10]).
  RealInterval quadrature_domain() const;

  /// Matrix dimension of the underlying group/ensemble (0 for Sine).
  int dimension() const;

  /// Expected total number of points (n for the projection kernels).
  double rank() const;

  /// Length scale of the kernel's oscillation (used to size quadrature panels).
  double oscillation_length() const;

  bool is_compact() const;

 private:
  KernelFamily family_;
  int size_;
};

/// sin(pi N t) / sin(pi t), continuous at integers.
double dirichlet_s(int N, double t);

struct HermiteEvalRow {
  int order;
  double value;
  double derivative;
};

/// Hermite functions psi_k(x) = He_k(x) e^{-x^2/4} / ((2 pi)^{1/4} sqrt(k!))
/// and their derivatives for k = 0..kmax.
std::vector<HermiteEvalRow> hermite_psi(int kmax, double x);

/// psi_{n-1}, psi_n and their derivatives at one point; what the GUE kernel needs.
struct HermitePair {
  double psi_prev = 0.0;   // psi_{n-1}(x)
  double psi = 0.0;        // psi_n(x)
  double dpsi_prev = 0.0;  // psi'_{n-1}(x)
  double dpsi = 0.0;       // psi'_n(x)
};
HermitePair hermite_pair(int n, double x);

/// GUE(n) kernel from precomputed Hermite pairs at x and y.
double gue_kernel(int n, double x, const HermitePair& hx, double y, const HermitePair& hy);

/// Evaluates K(x, y). Throws InputError when x or y lies outside spec.domain().
double kernel_eval(const KernelSpec& spec, double x, double y);

/// K(x, x), using the closed diagonal forms.
double kernel_diagonal(const KernelSpec& spec, double x);

/// rho_sc(x) = sqrt((4 - x^2)_+) / (2 pi).
double semicircle_density(double x);

/// Principal value of  int rho_sc(x) / (x - E) dx  for |E| < 2.
double stieltjes_pv(double E);

struct KernelBoundReport {
  double max_ratio = 0.0;  // max |K| / envelope over the scanned pairs
  double max_abs = 0.0;    // max |K|
  double argmax_x = 0.0;
  double argmax_y = 0.0;
  int pairs = 0;
};

/// Scans random (x, y) pairs in a bulk window and reports max |K(x,y)| divided
/// by the envelope min(scale, 1/|x - y|).
///
/// GUE: window [(E - delta) sqrt(n), (E + delta) sqrt(n)] with E and delta in
/// macroscopic units, scale sqrt(n); the window must sit inside (-2, 2).
/// Compact families: window [E - delta, E + delta] within [0, 1/2], scale the
/// matrix dimension, distance measured modulo 1. Sine: any window, scale 1.
/// Every tenth pair is placed on the diagonal.
KernelBoundReport verify_kernel_bounds(const KernelSpec& spec, double E, double delta,
                                       int samplecount, std::uint64_t seed = 1);

/// max over a uniform grid of t in (-1/2, 1/2) of |s_N(t)| (1 + N |t|) / N.
double dirichlet_envelope_ratio(int N, int samplecount);

}  // namespace microlimit
