#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "microlimit/common.hpp"
#include "microlimit/kernels.hpp"

namespace microlimit {

enum class Ensemble { CUE, SO, Sp, GUE };

std::string to_string(Ensemble ensemble);
Ensemble parse_ensemble(const std::string& name);  // cue|so|sp|gue

/// One sampled eigenvalue configuration.
///
/// Compact groups fill `angles` with eigenangles in [-1/2, 1/2) (eigenvalue
/// exp(2 pi i theta)), sorted ascending. For SO/Sp `halfangles` additionally
/// holds the n/2 reduced angles in [0, 1/2] (one per conjugate pair, without
/// the forced eigenvalue 1 of odd SO). GUE fills `levels` ascending.
struct Spectrum {
  Ensemble ensemble = Ensemble::CUE;
  int n = 0;
  std::vector<double> angles;
  std::vector<double> halfangles;
  std::vector<double> levels;
  std::uint64_t seed = 0;

  bool is_compact() const { return ensemble != Ensemble::GUE; }
  /// levels / sqrt(n).
  std::vector<double> macroscopic_levels() const;
};

/// Microscopic configuration around a centre E.
struct PointConfig {
  std::vector<double> points;  // sorted
  double center = 0.0;
  double scalefactor = 1.0;  // n for compact groups, n rho_sc(E) for GUE
  double windowradius = 0.0;
  bool degenerate = false;  // two points closer than 1e-12
};

/// Haar (CUE, SO, Sp) or GUE spectrum of an n x n matrix; deterministic in seed.
Spectrum sample_spectrum(Ensemble ensemble, int n, std::uint64_t seed);

/// GUE spectrum from the symmetric tridiagonal model: O(n^2) instead of O(n^3).
/// Same law as sample_spectrum(GUE, n, .), different stream.
Spectrum sample_gue_tridiag(int n, std::uint64_t seed);

/// Spectrum with a choice of GUE sampler (`tridiagonal` ignored for compact groups).
Spectrum sample_spectrum(Ensemble ensemble, int n, std::uint64_t seed, bool tridiagonal);

/// m replicas; replica r uses derive_seed(seed, r). Output order is replica
/// order regardless of `workers`.
std::vector<Spectrum> sample_replicas(Ensemble ensemble, int n, int m, std::uint64_t seed,
                                      int workers = 1, bool tridiagonal = false);

enum class MatrixGroup { U, SO, Sp };

/// Dense Haar matrix, n <= 64. Its eigenangles coincide with those of
/// sample_spectrum(CUE/SO/Sp, n, seed).
Eigen::MatrixXcd haar_matrix(MatrixGroup group, int n, std::uint64_t seed);

/// Dense GUE matrix M = (B + B^*)/sqrt(2), n <= 64; eigenvalues coincide
/// with sample_spectrum(GUE, n, seed).
Eigen::MatrixXcd gue_matrix(int n, std::uint64_t seed);

/// J = [[0, I], [-I, 0]] of size n (n even).
Eigen::MatrixXd symplectic_form(int n);

/// Points n(theta_j - E + nu) (compact groups, all integer nu) or
/// n rho_sc(E)(Lambda_i - E) (GUE) with |x| <= windowradius.
/// Throws InputError for E outside (-1/2, 1/2) / (-2, 2), or E = 0 for SO/Sp.
PointConfig microscopic_points(const Spectrum& spectrum, double E, double windowradius);

/// Microscopic scale factor: n for compact groups, n rho_sc(E) for GUE.
double microscopic_scale(Ensemble ensemble, int n, double E);

/// Determinantal kernel of the reduced-angle process (SO/Sp) or of GUE(n).
/// Throws InputError for CUE.
KernelSpec kernel_for(Ensemble ensemble, int n);

/// Validates n for the ensemble (n >= 2, Sp even); throws InputError.
void check_dimension(Ensemble ensemble, int n);

struct StructureReport {
  bool length_ok = true;
  bool sorted = true;
  bool finite = true;
  bool negation_closed = true;   // SO/Sp
  bool fixed_one = true;         // odd SO: an angle at 0
  bool det_one = true;           // SO/Sp: sum of angles = 0 mod 1
  double max_pairing_error = 0.0;
  bool ok() const {
    return length_ok && sorted && finite && negation_closed && fixed_one && det_one;
  }
};

/// Structural invariants of a spectrum at tolerance tol.
StructureReport check_structure(const Spectrum& spectrum, double tol = 1e-9);

}  // namespace microlimit
