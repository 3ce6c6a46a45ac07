#include "microlimit/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "microlimit/common.hpp"
#include "microlimit/parallel.hpp"
#include "microlimit/rng.hpp"

namespace microlimit {

namespace {

constexpr int kMaxDenseN = 64;

double wrap_angle(double t) {
  double r = t - std::floor(t + 0.5);
  if (r >= 0.5) r -= 1.0;
  return r;
}

double circular_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

cplx complex_normal(Rng& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

// Haar O(n) with the det fixed to +1 by a left reflection.
Eigen::MatrixXd haar_so_dense(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const auto& packed = qr.matrixQR();
  const auto& tau = qr.hCoeffs();
  int sign = 1;
  for (int i = 0; i < n; ++i) {
    if (tau[i] != 0.0) sign = -sign;
    if (packed(i, i) < 0.0) {
      q.col(i) = -q.col(i);
      sign = -sign;
    }
  }
  if (sign < 0) q.row(0) = -q.row(0);
  return q;
}

// [q_1 .. q_m, tau q_1 .. tau q_m] with tau(v) = -J conj(v); satisfies g J g^T = J.
Eigen::MatrixXcd haar_sp_dense(int n, Rng& rng) {
  const int m = n / 2;
  auto tau_map = [m](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd w(2 * m);
    w.head(m) = -v.tail(m).conjugate();
    w.tail(m) = v.head(m).conjugate();
    return w;
  };
  Eigen::MatrixXcd a(n, n);
  for (int k = 0; k < m; ++k) {
    Eigen::VectorXcd z(n);
    for (int i = 0; i < n; ++i) z[i] = complex_normal(rng);
    a.col(2 * k) = z;
    a.col(2 * k + 1) = tau_map(z);
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd g(n, n);
  for (int k = 0; k < m; ++k) {
    const cplx r = qr.matrixQR()(2 * k, 2 * k);
    const double ar = std::abs(r);
    Eigen::VectorXcd col = q.col(2 * k) * (ar > 0.0 ? r / ar : cplx(1.0));
    g.col(k) = col;
    g.col(m + k) = tau_map(col);
  }
  return g;
}

// Verblunsky coefficients of a CUE(N) spectral measure: |alpha_k|^2 ~ Beta(1, N-k-1)
// with uniform phase, and alpha_{N-1} uniform on the circle.
std::vector<cplx> cue_verblunsky(int N, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<cplx> alpha(N);
  for (int k = 0; k + 1 < N; ++k) {
    const double r2 = 1.0 - std::pow(1.0 - u(rng), 1.0 / (N - k - 1));
    const double phase = kTwoPi * u(rng);
    alpha[k] = std::polar(std::sqrt(r2), phase);
  }
  alpha[N - 1] = std::polar(1.0, kTwoPi * u(rng));
  return alpha;
}

struct PhaseValue {
  double psi;
  double dpsi;
};

// Prufer phase of b_{N-1}(e^{i phi}) = e^{i psi}; increasing in phi by 2 pi N per turn.
PhaseValue prufer_phase(const std::vector<cplx>& alpha, double phi) {
  const cplx z = std::polar(1.0, phi);
  cplx b = z;
  double psi = phi;
  double d = 1.0;
  const std::size_t last = alpha.size() - 1;
  for (std::size_t k = 0; k < last; ++k) {
    const cplx w = 1.0 - alpha[k] * b;
    const double nw = std::norm(w);
    psi += phi - 2.0 * std::atan2(w.imag(), w.real());
    d = 1.0 + d * (1.0 - std::norm(alpha[k])) / nw;
    // z (b - conj(alpha)) / w, written out to skip the library's guarded division.
    b = z * (b - std::conj(alpha[k])) * std::conj(w) * (1.0 / nw);
    b *= 0.5 * (3.0 - std::norm(b));
  }
  return {psi, d};
}

// Eigenangles of the CMV matrix: roots of psi(phi) = -eta (mod 2 pi).
std::vector<double> cmv_eigenangles(const std::vector<cplx>& alpha) {
  const int N = static_cast<int>(alpha.size());
  const double eta = std::arg(alpha[N - 1]);
  const int G = std::max(8, N);
  std::vector<double> grid(G + 1), fval(G + 1);
  for (int g = 0; g < G; ++g) {
    grid[g] = kTwoPi * g / G;
    fval[g] = prufer_phase(alpha, grid[g]).psi + eta;
  }
  grid[G] = kTwoPi;
  fval[G] = fval[0] + kTwoPi * N;

  std::vector<double> out;
  out.reserve(N);
  const double first = std::floor(fval[0] / kTwoPi) + 1.0;
  int cell = 0;
  for (int j = 0; j < N; ++j) {
    const double target = kTwoPi * (first + j);
    while (cell < G - 1 && fval[cell + 1] < target) ++cell;
    double lo = grid[cell], hi = grid[cell + 1];
    double flo = fval[cell] - target, fhi = fval[cell + 1] - target;
    double x = lo + (hi - lo) * (-flo) / (fhi - flo);
    for (int it = 0; it < 60; ++it) {
      const auto pv = prufer_phase(alpha, x);
      const double f = pv.psi + eta - target;
      if (std::abs(f) < 1e-11) break;
      if (f < 0.0) {
        lo = x;
      } else {
        hi = x;
      }
      double next = x - f / pv.dpsi;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - x);
      x = next;
      if (step < 1e-14 || hi - lo < 1e-14) break;
    }
    out.push_back(wrap_angle(x / kTwoPi));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Five-diagonal CMV matrix C = L M for the given Verblunsky coefficients.
Eigen::MatrixXcd cmv_matrix(const std::vector<cplx>& alpha) {
  const int N = static_cast<int>(alpha.size());
  auto theta_blocks = [&](int start) {
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(N, N);
    if (start == 1) t(0, 0) = 1.0;
    for (int j = start; j < N; j += 2) {
      if (j == N - 1) {
        t(j, j) = std::conj(alpha[j]);
        continue;
      }
      const double rho = std::sqrt(std::max(0.0, 1.0 - std::norm(alpha[j])));
      t(j, j) = std::conj(alpha[j]);
      t(j, j + 1) = rho;
      t(j + 1, j) = rho;
      t(j + 1, j + 1) = -alpha[j];
    }
    return t;
  };
  return theta_blocks(0) * theta_blocks(1);
}

Eigen::MatrixXcd haar_unitary_qr(int n, Rng& rng) {
  Eigen::MatrixXcd a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = complex_normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ();
  for (int i = 0; i < n; ++i) {
    const cplx r = qr.matrixQR()(i, i);
    const double ar = std::abs(r);
    if (ar > 0.0) q.col(i) *= r / ar;
  }
  return q;
}

// Eigenangles of an orthogonal/symplectic matrix from the eigenvalues of its
// Hermitian part, which come in equal pairs cos(2 pi theta).
void angles_from_cosines(std::vector<double> cosines, bool fixed_one, Spectrum& spec) {
  std::sort(cosines.begin(), cosines.end(), std::greater<double>());
  std::size_t start = fixed_one ? 1 : 0;
  spec.halfangles.clear();
  spec.angles.clear();
  for (std::size_t i = start; i + 1 < cosines.size(); i += 2) {
    const double c = std::clamp(0.5 * (cosines[i] + cosines[i + 1]), -1.0, 1.0);
    double t = std::acos(c) / kTwoPi;
    if (t < 1e-9) t = 0.0;
    spec.halfangles.push_back(t);
    spec.angles.push_back(wrap_angle(t));
    spec.angles.push_back(wrap_angle(-t));
  }
  if (fixed_one) spec.angles.push_back(0.0);
  std::sort(spec.halfangles.begin(), spec.halfangles.end());
  std::sort(spec.angles.begin(), spec.angles.end());
}

Spectrum so_spectrum_from_matrix(const Eigen::MatrixXd& g, std::uint64_t seed) {
  const int n = static_cast<int>(g.rows());
  Eigen::MatrixXd h = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  Spectrum s;
  s.ensemble = Ensemble::SO;
  s.n = n;
  s.seed = seed;
  std::vector<double> c(es.eigenvalues().data(), es.eigenvalues().data() + n);
  angles_from_cosines(std::move(c), n % 2 == 1, s);
  return s;
}

Spectrum sp_spectrum_from_matrix(const Eigen::MatrixXcd& g, std::uint64_t seed) {
  const int n = static_cast<int>(g.rows());
  Eigen::MatrixXcd h = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  Spectrum s;
  s.ensemble = Ensemble::Sp;
  s.n = n;
  s.seed = seed;
  std::vector<double> c(es.eigenvalues().data(), es.eigenvalues().data() + n);
  angles_from_cosines(std::move(c), false, s);
  return s;
}

Eigen::MatrixXcd gue_dense(int n, Rng& rng) {
  Eigen::MatrixXcd b(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) b(i, j) = complex_normal(rng);
  return (b + b.adjoint()) / std::sqrt(2.0);
}

}  // namespace

std::string to_string(Ensemble ensemble) {
  switch (ensemble) {
    case Ensemble::CUE: return "cue";
    case Ensemble::SO: return "so";
    case Ensemble::Sp: return "sp";
    case Ensemble::GUE: return "gue";
  }
  return "?";
}

Ensemble parse_ensemble(const std::string& name) {
  if (name == "cue") return Ensemble::CUE;
  if (name == "so") return Ensemble::SO;
  if (name == "sp") return Ensemble::Sp;
  if (name == "gue") return Ensemble::GUE;
  throw InputError("unknown ensemble '" + name + "' (expected cue|so|sp|gue)");
}

std::vector<double> Spectrum::macroscopic_levels() const {
  std::vector<double> out(levels);
  const double r = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& v : out) v *= r;
  return out;
}

void check_dimension(Ensemble ensemble, int n) {
  if (n < 2) throw InputError("matrix dimension n must be >= 2");
  if (ensemble == Ensemble::Sp && n % 2 != 0)
    throw InputError("Sp requires an even matrix dimension n");
}

Spectrum sample_spectrum(Ensemble ensemble, int n, std::uint64_t seed) {
  check_dimension(ensemble, n);
  switch (ensemble) {
    case Ensemble::CUE: {
      Rng rng = make_rng(derive_seed(seed, 0));
      Spectrum s;
      s.ensemble = Ensemble::CUE;
      s.n = n;
      s.seed = seed;
      s.angles = cmv_eigenangles(cue_verblunsky(n, rng));
      return s;
    }
    case Ensemble::SO: {
      Rng rng = make_rng(seed);
      return so_spectrum_from_matrix(haar_so_dense(n, rng), seed);
    }
    case Ensemble::Sp: {
      Rng rng = make_rng(seed);
      return sp_spectrum_from_matrix(haar_sp_dense(n, rng), seed);
    }
    case Ensemble::GUE: {
      Rng rng = make_rng(seed);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gue_dense(n, rng), Eigen::EigenvaluesOnly);
      Spectrum s;
      s.ensemble = Ensemble::GUE;
      s.n = n;
      s.seed = seed;
      s.levels.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
      return s;
    }
  }
  throw InputError("unknown ensemble");
}

Spectrum sample_gue_tridiag(int n, std::uint64_t seed) {
  check_dimension(Ensemble::GUE, n);
  Rng rng = make_rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd diag(n), sub(n - 1);
  for (int i = 0; i < n; ++i) diag[i] = g(rng);
  for (int k = 1; k < n; ++k) {
    std::gamma_distribution<double> gam(static_cast<double>(n - k), 1.0);
    sub[k - 1] = std::sqrt(gam(rng));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  Spectrum s;
  s.ensemble = Ensemble::GUE;
  s.n = n;
  s.seed = seed;
  s.levels.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return s;
}

Spectrum sample_spectrum(Ensemble ensemble, int n, std::uint64_t seed, bool tridiagonal) {
  if (ensemble == Ensemble::GUE && tridiagonal) return sample_gue_tridiag(n, seed);
  return sample_spectrum(ensemble, n, seed);
}

std::vector<Spectrum> sample_replicas(Ensemble ensemble, int n, int m, std::uint64_t seed,
                                      int workers, bool tridiagonal) {
  check_dimension(ensemble, n);
  if (m < 1) throw InputError("replica count m must be >= 1");
  std::vector<Spectrum> out(static_cast<std::size_t>(m));
  parallel_for(out.size(), workers, [&](std::size_t r) {
    out[r] = sample_spectrum(ensemble, n, derive_seed(seed, r), tridiagonal);
  });
  return out;
}

Eigen::MatrixXcd haar_matrix(MatrixGroup group, int n, std::uint64_t seed) {
  if (n > kMaxDenseN) throw InputError("haar_matrix: n must be <= 64");
  switch (group) {
    case MatrixGroup::U: {
      check_dimension(Ensemble::CUE, n);
      Rng arng = make_rng(derive_seed(seed, 0));
      Rng vrng = make_rng(derive_seed(seed, 1));
      const auto alpha = cue_verblunsky(n, arng);
      const Eigen::MatrixXcd v = haar_unitary_qr(n, vrng);
      return v * cmv_matrix(alpha) * v.adjoint();
    }
    case MatrixGroup::SO: {
      check_dimension(Ensemble::SO, n);
      Rng rng = make_rng(seed);
      return haar_so_dense(n, rng).cast<cplx>();
    }
    case MatrixGroup::Sp: {
      check_dimension(Ensemble::Sp, n);
      Rng rng = make_rng(seed);
      return haar_sp_dense(n, rng);
    }
  }
  throw InputError("unknown matrix group");
}

Eigen::MatrixXcd gue_matrix(int n, std::uint64_t seed) {
  if (n > kMaxDenseN) throw InputError("gue_matrix: n must be <= 64");
  check_dimension(Ensemble::GUE, n);
  Rng rng = make_rng(seed);
  return gue_dense(n, rng);
}

Eigen::MatrixXd symplectic_form(int n) {
  if (n % 2 != 0) throw InputError("symplectic_form: n must be even");
  const int m = n / 2;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  j.topRightCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
  j.bottomLeftCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
  return j;
}

double microscopic_scale(Ensemble ensemble, int n, double E) {
  if (ensemble == Ensemble::GUE) {
    if (!(std::abs(E) < 2.0)) throw InputError("GUE energy E must lie in (-2, 2)");
    return n * semicircle_density(E);
  }
  return static_cast<double>(n);
}

PointConfig microscopic_points(const Spectrum& spectrum, double E, double windowradius) {
  if (!(windowradius >= 0.0)) throw InputError("microscopic_points: windowradius must be >= 0");
  PointConfig cfg;
  cfg.center = E;
  cfg.windowradius = windowradius;
  const double n = spectrum.n;
  if (spectrum.is_compact()) {
    if (!(E > -0.5 && E < 0.5)) throw InputError("energy E must lie in (-1/2, 1/2)");
    if ((spectrum.ensemble == Ensemble::SO || spectrum.ensemble == Ensemble::Sp) && E == 0.0)
      throw InputError("energy E must be nonzero for SO/Sp (the limit excludes E = 0)");
    cfg.scalefactor = n;
    const double r = windowradius / n;
    for (double th : spectrum.angles) {
      const double d = th - E;
      const long long lo = static_cast<long long>(std::ceil(-r - d));
      const long long hi = static_cast<long long>(std::floor(r - d));
      for (long long nu = lo; nu <= hi; ++nu) {
        const double x = n * (d + static_cast<double>(nu));
        if (std::abs(x) <= windowradius) cfg.points.push_back(x);
      }
    }
  } else {
    cfg.scalefactor = microscopic_scale(Ensemble::GUE, spectrum.n, E);
    const double rootn = std::sqrt(n);
    for (double lam : spectrum.levels) {
      const double x = cfg.scalefactor * (lam / rootn - E);
      if (std::abs(x) <= windowradius) cfg.points.push_back(x);
    }
  }
  std::sort(cfg.points.begin(), cfg.points.end());
  for (std::size_t i = 1; i < cfg.points.size(); ++i)
    if (cfg.points[i] - cfg.points[i - 1] < 1e-12) cfg.degenerate = true;
  return cfg;
}

KernelSpec kernel_for(Ensemble ensemble, int n) {
  check_dimension(ensemble, n);
  switch (ensemble) {
    case Ensemble::SO:
      return n % 2 == 0 ? KernelSpec(KernelFamily::SOEven, n / 2)
                        : KernelSpec(KernelFamily::SOOdd, (n - 1) / 2);
    case Ensemble::Sp: return KernelSpec(KernelFamily::Sp, n / 2);
    case Ensemble::GUE: return KernelSpec(KernelFamily::GUE, n);
    case Ensemble::CUE: break;
  }
  throw InputError("no reduced-angle kernel for CUE");
}

StructureReport check_structure(const Spectrum& spectrum, double tol) {
  StructureReport rep;
  const auto& v = spectrum.is_compact() ? spectrum.angles : spectrum.levels;
  rep.length_ok = static_cast<int>(v.size()) == spectrum.n;
  rep.sorted = std::is_sorted(v.begin(), v.end());
  rep.finite = std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  if (spectrum.ensemble == Ensemble::SO || spectrum.ensemble == Ensemble::Sp) {
    std::vector<char> used(v.size(), 0);
    if (spectrum.ensemble == Ensemble::SO && spectrum.n % 2 == 1) {
      // Set aside the fixed eigenvalue 1 before pairing.
      std::size_t zero = v.size();
      for (std::size_t i = 0; i < v.size(); ++i)
        if (zero == v.size() || std::abs(v[i]) < std::abs(v[zero])) zero = i;
      rep.fixed_one = zero < v.size() && std::abs(v[zero]) <= tol;
      if (zero < v.size()) used[zero] = 1;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (used[i]) continue;
      used[i] = 1;
      double best = 1.0;
      std::size_t partner = v.size();
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (used[j]) continue;
        const double d = circular_distance(v[j], -v[i]);
        if (d < best) {
          best = d;
          partner = j;
        }
      }
      if (partner == v.size() || best > tol) {
        rep.negation_closed = false;
        continue;
      }
      used[partner] = 1;
      rep.max_pairing_error = std::max(rep.max_pairing_error, best);
    }
    double sum = 0.0;
    for (double t : v) sum += t;
    rep.det_one = circular_distance(sum, 0.0) <= tol;
  }
  return rep;
}

}  // namespace microlimit
