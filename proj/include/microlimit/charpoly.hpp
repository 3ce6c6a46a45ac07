#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "microlimit/common.hpp"
#include "microlimit/ensembles.hpp"

namespace microlimit {

enum class XiVariant { UnitaryXi, SOXi, SpXi, GUEXi };

std::string to_string(XiVariant variant);
XiVariant variant_for(Ensemble ensemble);

struct CharPolyParams {
  XiVariant variant = XiVariant::UnitaryXi;
  double energy = 0.0;  // ignored for UnitaryXi

  /// Throws InputError when the energy does not suit the variant.
  void validate() const;
  static CharPolyParams make(Ensemble ensemble, double E = 0.0);
};

struct CharPolyEval {
  std::vector<cplx> grid;
  std::vector<cplx> values;
  struct Meta {
    std::string ensemble;
    int n = 0;
    double energy = 0.0;
    std::uint64_t seed = 0;
    std::string truncation;
  } meta;
};

/// log of a product: log-magnitude plus a phase unwound along the segment 0 -> s.
struct LogValue {
  double logabs = 0.0;
  double arg = 0.0;
  cplx value() const { return std::exp(cplx(logabs, arg)); }
};

/// Characteristic-polynomial ratio of the spectrum at s.
///
/// Compact groups: prod_j (e^{2 pi i(E + s/n)} - e^{2 pi i theta_j}) /
/// (e^{2 pi i E} - e^{2 pi i theta_j}), E = 0 for UnitaryXi.
/// GUE: prod_i (1 - s / (n rho_sc(E)(Lambda_i - E))).
/// Throws DegenerateSample when a node sits on the pole (|factor| < 1e-13).
LogValue xi_log(const Spectrum& spectrum, const CharPolyParams& params, cplx s);
cplx xi_eval(const Spectrum& spectrum, const CharPolyParams& params, cplx s);
CharPolyEval xi_grid(const Spectrum& spectrum, const CharPolyParams& params,
                     const std::vector<cplx>& grid);

/// The same ratio as a quotient of dense determinants (LU with partial pivoting).
/// `matrix` is a group element for the compact variants and the GUE matrix M
/// (unscaled) for GUEXi. n <= 64.
cplx det_oracle(const Eigen::MatrixXcd& matrix, const CharPolyParams& params, cplx s);

/// e^{i pi s} prod_{|x| <= B} (1 - s/x) over the configuration's points.
cplx truncated_product(const PointConfig& config, cplx s, double B);

struct Window {
  enum class Kind { Delta, PowerLaw };
  Kind kind = Kind::PowerLaw;
  double delta = 0.0;
  static Window Delta(double d) { return {Kind::Delta, d}; }
  static Window PowerLaw() { return {Kind::PowerLaw, 0.0}; }
  double radius(int n) const;
};

struct LocalizedValue {
  cplx window_product{1.0, 0.0};  // Pi_delta
  cplx predicted{1.0, 0.0};       // Pi_delta e^{sE / 2 rho_sc(E)}
  cplx outside{1.0, 0.0};         // Xi_n / Pi_delta, product over the complement
  double delta = 0.0;
  int count = 0;                   // eigenvalues in the window
  bool empty = false;
  bool leaves_bulk = false;        // [E - delta, E + delta] not inside (-2, 2)
};

/// GUE product restricted to |Lambda_i - E| <= delta, with the deterministic
/// factor e^{sE/(2 rho_sc(E))} standing in for the rest.
LocalizedValue localized_gue(const Spectrum& spectrum, double E, cplx s, const Window& window);

/// Xi_n(s) e^{-s(E/(2 rho_sc(E)) - i pi)}.
cplx normalized_gue(const Spectrum& spectrum, double E, cplx s);

/// prod_i xi(alpha_i) / xi(beta_i), accumulated in log space.
cplx ratio_statistic(const Spectrum& spectrum, const CharPolyParams& params,
                     const std::vector<cplx>& alphas, const std::vector<cplx>& betas);

/// Number of zeros of xi inside the rectangle [re0, re1] x [im0, im1] by the
/// argument principle along its boundary.
int winding_zero_count(const Spectrum& spectrum, const CharPolyParams& params, double re0,
                       double re1, double im0, double im1, int steps = 400);

/// The zeros of xi in s: n(theta_j - E + nu) (compact) or n rho_sc(E)(Lambda_i - E).
/// Points with |x| <= radius, sorted.
std::vector<double> xi_zeros(const Spectrum& spectrum, const CharPolyParams& params,
                             double radius);

}  // namespace microlimit
