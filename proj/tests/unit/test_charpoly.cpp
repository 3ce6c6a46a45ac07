#include <doctest.h>

#include <cmath>
#include <random>

#include "microlimit/charpoly.hpp"
#include "microlimit/counts.hpp"
#include "microlimit/limit_reference.hpp"
#include "microlimit/rng.hpp"

using namespace microlimit;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

Eigen::MatrixXcd matrix_for(Ensemble e, int n, std::uint64_t seed) {
  switch (e) {
    case Ensemble::CUE: return haar_matrix(MatrixGroup::U, n, seed);
    case Ensemble::SO: return haar_matrix(MatrixGroup::SO, n, seed);
    case Ensemble::Sp: return haar_matrix(MatrixGroup::Sp, n, seed);
    case Ensemble::GUE: return gue_matrix(n, seed);
  }
  return {};
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(CharPolyParams::make(Ensemble::SO, 0.0), InputError);
  CHECK_THROWS_AS(CharPolyParams::make(Ensemble::Sp, 0.5), InputError);
  CHECK_THROWS_AS(CharPolyParams::make(Ensemble::GUE, 2.0), InputError);
  CHECK(CharPolyParams::make(Ensemble::CUE, 0.3).variant == XiVariant::UnitaryXi);
  CHECK(variant_for(Ensemble::Sp) == XiVariant::SpXi);
  CHECK(to_string(XiVariant::GUEXi) == "gue");
}

TEST_CASE("every operation is exactly 1 at s = 0") {
  for (auto [e, E] : {std::pair{Ensemble::CUE, 0.0}, std::pair{Ensemble::SO, 0.2}, std::pair{Ensemble::Sp, -0.3},
                      std::pair{Ensemble::GUE, 0.5}}) {
    const auto sp = sample_spectrum(e, 12, 4);
    const auto p = CharPolyParams::make(e, E);
    CHECK(xi_eval(sp, p, 0.0) == cplx(1.0));
    const auto grid = xi_grid(sp, p, {cplx(0.5), cplx(0.0), cplx(1, 1)});
    CHECK(grid.values.size() == 3);
    CHECK(grid.values[1] == cplx(1.0));
    CHECK(std::abs(det_oracle(matrix_for(e, 12, 4), p, 0.0) - 1.0) <= 1e-12);
    CHECK(ratio_statistic(sp, p, {cplx(0.3, 0.1)}, {cplx(0.3, 0.1)}) == cplx(1.0));
  }
  const auto g = sample_spectrum(Ensemble::GUE, 30, 1);
  CHECK(normalized_gue(g, 0.5, 0.0) == cplx(1.0));
  const auto loc = localized_gue(g, 0.5, 0.0, Window::PowerLaw());
  CHECK(loc.window_product == cplx(1.0));
  CHECK(loc.predicted == cplx(1.0));
  PointConfig cfg;
  cfg.points = {-0.5, 2.0};
  cfg.windowradius = 3.0;
  CHECK(truncated_product(cfg, 0.0, 3.0) == cplx(1.0));
}

TEST_CASE("determinant oracle examples") {
  {
    const auto p = CharPolyParams::make(Ensemble::SO, 0.2);
    const cplx s(1.3, 0.4);
    CHECK(rel(xi_eval(sample_spectrum(Ensemble::SO, 20, 2), p, s), det_oracle(haar_matrix(MatrixGroup::SO, 20, 2), p, s)) <= 1e-8);
  }
  {
    const auto p = CharPolyParams::make(Ensemble::GUE, 0.5);
    const cplx s(2.0, -1.0);
    CHECK(rel(xi_eval(sample_spectrum(Ensemble::GUE, 30, 3), p, s), det_oracle(gue_matrix(30, 3), p, s)) <= 1e-8);
  }
  {
    const auto p = CharPolyParams::make(Ensemble::CUE);
    CHECK(rel(xi_eval(sample_spectrum(Ensemble::CUE, 16, 4), p, 1.0), det_oracle(haar_matrix(MatrixGroup::U, 16, 4), p, 1.0)) <= 1e-8);
  }
}

TEST_CASE("product equals determinant for all variants") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> dim(2, 15);
  for (auto e : {Ensemble::CUE, Ensemble::SO, Ensemble::Sp, Ensemble::GUE}) {
    double worst = 0.0;
    for (int c = 0; c < 50; ++c) {
      const int n = e == Ensemble::Sp ? 2 * dim(rng) : 2 * dim(rng) - (c % 2);
      const double E = e == Ensemble::GUE ? 1.5 * u(rng) : (e == Ensemble::CUE ? 0.0 : 0.05 + 0.4 * std::abs(u(rng)));
      const cplx s(4.0 * u(rng), 2.0 * u(rng));
      const auto p = CharPolyParams::make(e, E);
      const std::uint64_t seed = derive_seed(5, c);
      worst = std::max(worst, rel(xi_eval(sample_spectrum(e, n, seed), p, s), det_oracle(matrix_for(e, n, seed), p, s)));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("xi vanishes at rescaled eigenangles") {
  const auto sp = sample_spectrum(Ensemble::SO, 20, 6);
  const auto p = CharPolyParams::make(Ensemble::SO, 0.2);
  const auto zeros = xi_zeros(sp, p, 5.0);
  REQUIRE_FALSE(zeros.empty());
  for (double z : zeros) {
    const double at = std::abs(xi_eval(sp, p, z));
    const double near = std::max(std::abs(xi_eval(sp, p, z + 0.3)), std::abs(xi_eval(sp, p, z - 0.3)));
    CHECK(at <= 1e-10 * near);
  }
}

TEST_CASE("winding number counts the zeros") {
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    for (auto [e, E] : {std::pair{Ensemble::SO, 0.2}, std::pair{Ensemble::GUE, 0.4}, std::pair{Ensemble::CUE, 0.0}}) {
      const auto sp = sample_spectrum(e, 24, seed);
      const auto p = CharPolyParams::make(e, E);
      // Zeros closer than 1e-7 to the vertical edges are left out of both counts.
      const auto zeros = xi_zeros(sp, p, 6.0 - 1e-7);
      CHECK(winding_zero_count(sp, p, -6.0 + 1e-7, 6.0 - 1e-7, -0.5, 0.5) == static_cast<int>(zeros.size()));
    }
}

TEST_CASE("GUE conjugation symmetry and E = 0 normalization") {
  const auto g = sample_spectrum(Ensemble::GUE, 40, 8);
  const auto p = CharPolyParams::make(Ensemble::GUE, 0.7);
  for (cplx s : {cplx(0.3, 0.2), cplx(-1.7, 0.9), cplx(2.5, -0.1)}) {
    const cplx a = xi_eval(g, p, std::conj(s)), b = std::conj(xi_eval(g, p, s));
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
    const cplx n0 = normalized_gue(g, 0.0, s);
    const cplx want = std::exp(cplx(0.0, kPi) * s) * xi_eval(g, CharPolyParams::make(Ensemble::GUE, 0.0), s);
    CHECK(std::abs(n0 - want) <= 1e-12 * std::abs(want));
  }
}

TEST_CASE("localized GUE products") {
  const auto g = sample_spectrum(Ensemble::GUE, 50, 9);
  const cplx s(1.0, 0.0);
  // A window containing every eigenvalue reproduces the full product.
  const auto all = localized_gue(g, 0.5, s, Window::Delta(5.0));
  CHECK(all.leaves_bulk);
  CHECK(all.count == 50);
  CHECK(std::abs(all.window_product - xi_eval(g, CharPolyParams::make(Ensemble::GUE, 0.5), s)) <=
        1e-12 * std::abs(all.window_product));
  const auto pl = localized_gue(g, 0.5, s, Window::PowerLaw());
  CHECK(pl.delta == doctest::Approx(std::pow(50.0, -0.1)));
  CHECK_FALSE(pl.leaves_bulk);
  const double rho = semicircle_density(0.5);
  CHECK(std::abs(pl.predicted - pl.window_product * std::exp(s * 0.5 / (2 * rho))) <= 1e-12 * std::abs(pl.predicted));
  const auto tiny = localized_gue(g, 0.5, s, Window::Delta(1e-9));
  CHECK(tiny.empty);
  CHECK(tiny.window_product == cplx(1.0));
}

TEST_CASE("ratio statistic") {
  const auto sp = sample_spectrum(Ensemble::SO, 30, 10);
  const auto p = CharPolyParams::make(Ensemble::SO, 0.25);
  const cplx a(0.4, 0.3), b(-1.1, 0.2);
  const cplx r1 = ratio_statistic(sp, p, {a}, {b});
  CHECK(std::abs(r1 - xi_eval(sp, p, a) / xi_eval(sp, p, b)) <= 1e-12 * std::abs(r1));
  const auto g = haar_matrix(MatrixGroup::SO, 30, 10);
  const cplx a2(1.7, -0.5), b2(0.2, 0.6);
  const cplx r2 = ratio_statistic(sp, p, {a, a2}, {b, b2});
  const cplx want = det_oracle(g, p, a) / det_oracle(g, p, b) * det_oracle(g, p, a2) / det_oracle(g, p, b2);
  CHECK(rel(r2, want) <= 1e-8);
  CHECK_THROWS_AS(ratio_statistic(sp, p, {a}, {}), InputError);
}

TEST_CASE("truncated product") {
  PointConfig cfg;
  cfg.points = {-1.0, 1.0};
  cfg.windowradius = 2.0;
  for (cplx s : {cplx(0.3, 0.2), cplx(-2.0, 1.0), cplx(0.9, -0.4)}) {
    const cplx want = std::exp(cplx(0.0, kPi) * s) * (1.0 - s * s);
    CHECK(std::abs(truncated_product(cfg, s, 2.0) - want) <= 1e-14 * std::max(1.0, std::abs(want)));
  }
  CHECK_THROWS_AS(truncated_product(cfg, 0.5, 3.0), InputError);
  cfg.points = {0.0};
  CHECK_THROWS_AS(truncated_product(cfg, 0.5, 1.0), DegenerateSample);
}

TEST_CASE("truncation error shrinks with the cutoff") {
  const cplx s(1.0, 0.0);
  double prev = INFINITY;
  for (double B : {4.0, 8.0, 16.0}) {
    double sum = 0.0;
    for (int r = 0; r < 200; ++r) {
      const auto cfg = sample_sine_process(32.0, derive_seed(12, r));
      sum += std::abs(truncated_product(cfg, s, B) / truncated_product(cfg, s, 31.0) - 1.0);
    }
    CHECK(sum / 200 < prev);
    prev = sum / 200;
  }
}

TEST_CASE("pole collision raises a degenerate sample") {
  Spectrum sp;
  sp.ensemble = Ensemble::SO;
  sp.n = 4;
  sp.angles = {-0.25, -0.1, 0.1, 0.25};
  sp.halfangles = {0.1, 0.25};
  CHECK_THROWS_AS(xi_eval(sp, CharPolyParams::make(Ensemble::SO, 0.25), cplx(0.3, 0.1)), DegenerateSample);
}
