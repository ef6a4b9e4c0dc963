#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "aircomp/channel.hpp"
#include "aircomp/error.hpp"
#include "aircomp/linalg.hpp"
#include "aircomp/rng.hpp"
#include "support/oracles.hpp"

using namespace aircomp;

namespace {

Matrix random_transmit(std::size_t K, std::size_t M, Rng& rng) {
  Matrix x(K, M);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t m = 0; m < M; ++m) x(k, m) = rng.uniform(-1.0, 1.0);
  }
  return x;
}

}  // namespace

TEST_CASE("iid_model materializes scaled identities") {
  const auto model = iid_model(1, 1, 1.0, 1.0);
  CHECK(model.fading_matrix() == (Matrix{{1, 0, 0, 0}, {0, 1, 0, 0}}));
  CHECK(model.noise_matrix() == (Matrix{{0, 0, 1, 0}, {0, 0, 0, 1}}));

  for (auto [K, M, sf, sn] : {std::tuple{2UL, 3UL, 0.7, 0.2}, std::tuple{3UL, 5UL, 1.0, 2.0}}) {
    const auto m = iid_model(K, M, sf, sn);
    const Matrix a = m.fading_matrix();
    const Matrix b = m.noise_matrix();
    CHECK(frobenius_norm(a) == doctest::Approx(sf * std::sqrt(2.0 * M * K)).epsilon(1e-12));
    CHECK(frobenius_norm(b) == doctest::Approx(sn * std::sqrt(2.0 * M)).epsilon(1e-12));
    CHECK(matmul_transpose(a, b) == Matrix(a.rows(), b.rows()));
    CHECK(expected_noise_energy(m) == doctest::Approx(2.0 * M * sn * sn));
  }
  CHECK_THROWS_AS(iid_model(0, 3, 1.0, 1.0), ValidationError);
}

TEST_CASE("temporal_ar_model") {
  CHECK_THROWS_AS(temporal_ar_model(1, 3, 1.0, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(temporal_ar_model(1, 3, -1.2, 1.0, 1.0), ValidationError);

  // ρ = 0 is the i.i.d. model up to a column permutation.
  const Matrix a0 = temporal_ar_model(2, 3, 0.0, 0.8, 0.5).fading_matrix();
  const Matrix ai = iid_model(2, 3, 0.8, 0.5).fading_matrix();
  for (std::size_t i = 0; i < a0.rows(); ++i) {
    std::size_t nz = 0;
    for (std::size_t j = 0; j < a0.cols(); ++j) {
      if (a0(i, j) != 0.0) {
        ++nz;
        CHECK(a0(i, j) == 0.8);
      }
    }
    CHECK(nz == 1);
  }
  CHECK(frobenius_norm(a0) == frobenius_norm(ai));

  for (double rho : {-0.7, 0.3, 0.9}) {
    const auto model = temporal_ar_model(2, 4, rho, 1.3, 0.4);
    const Matrix a = model.fading_matrix();
    for (std::size_t i = 0; i < a.rows(); ++i) {
      double n2 = 0.0;
      for (double v : a.row(i)) n2 += v * v;
      CHECK(n2 == doctest::Approx(1.3 * 1.3).epsilon(1e-12));
    }
    CHECK(validate_user_uncorrelated(a, 2, 4));
  }
}

TEST_CASE("AR(0.9) lag-2 autocovariance") {
  const auto model = temporal_ar_model(1, 3, 0.9, 1.0, 0.0);
  Rng rng(2024);
  const int n = 100000;
  std::vector<double> prod(n);
  for (int i = 0; i < n; ++i) {
    const auto real = sample(model, rng);
    prod[i] = real.fading[fading_index(1, 0, 0, 0)] * real.fading[fading_index(1, 0, 2, 0)];
  }
  const auto mo = oracle::moments(prod);
  CHECK(std::abs(mo.mean - 0.81) < 3.0 * mo.stderr_of_mean);
}

TEST_CASE("sample") {
  SUBCASE("A = 0, B = 0 gives zero realizations") {
    const auto model = dense_model(1, 1, Matrix(2, 4), Matrix(2, 4));
    Rng rng(1);
    const auto real = sample(model, rng);
    for (double v : real.fading) CHECK(v == 0.0);
    for (double v : real.noise) CHECK(v == 0.0);
  }
  SUBCASE("iid Gaussian variance") {
    const auto model = iid_model(2, 2, 1.0, 1.0);
    Rng rng(3);
    const int n = 100000;
    std::vector<double> sq(model.fading_length(), 0.0);
    for (int i = 0; i < n; ++i) {
      const auto real = sample(model, rng);
      for (std::size_t j = 0; j < sq.size(); ++j) sq[j] += real.fading[j] * real.fading[j];
    }
    for (double s : sq) {
      CHECK(s / n >= 0.97);
      CHECK(s / n <= 1.03);
    }
  }
  SUBCASE("deterministic given the seed") {
    for (const auto& model : {iid_model(3, 4, 1.0, 0.5), temporal_ar_model(2, 5, 0.4, 1.0, 0.1)}) {
      Rng r1(77);
      Rng r2(77);
      const auto x = sample(model, r1);
      const auto y = sample(model, r2);
      CHECK(x.fading == y.fading);
      CHECK(x.noise == y.noise);
    }
  }
}

TEST_CASE("stacked covariance of (H, N) matches [A;B][A;B]ᵀ") {
  // K = 1, M = 1: R has length 4; correlate noise with fading coordinates.
  const Matrix a{{1.0, 0.5, 0.0, 0.0}, {0.0, 0.8, 0.3, 0.0}};
  const Matrix b{{0.2, 0.0, 0.6, 0.0}, {0.0, 0.0, 0.1, 0.9}};
  const auto model = dense_model(1, 1, a, b);
  Rng rng(9);
  const int n = 100000;
  std::vector<std::vector<double>> draws(n);
  for (int i = 0; i < n; ++i) {
    const auto real = sample(model, rng);
    draws[i] = {real.fading[0], real.fading[1], real.noise[0], real.noise[1]};
  }
  const Matrix stacked{{1.0, 0.5, 0.0, 0.0}, {0.0, 0.8, 0.3, 0.0}, {0.2, 0.0, 0.6, 0.0},
                       {0.0, 0.0, 0.1, 0.9}};
  const Matrix cov = matmul_transpose(stacked, stacked);
  for (std::size_t p = 0; p < 4; ++p) {
    for (std::size_t q = 0; q < 4; ++q) {
      std::vector<double> prod(n);
      for (int i = 0; i < n; ++i) prod[i] = draws[i][p] * draws[i][q];
      const auto mo = oracle::moments(prod);
      CHECK(std::abs(mo.mean - cov(p, q)) < 5.0 * mo.stderr_of_mean);
    }
  }
}

TEST_CASE("sub-gaussian kinds") {
  CHECK(parse_subgaussian_kind("rademacher") == SubgaussianKind::rademacher);
  CHECK(to_string(SubgaussianKind::uniform_unit_variance) == "uniform_unit_variance");
  CHECK_THROWS_AS(parse_subgaussian_kind("cauchy"), ValidationError);
  for (auto kind : {SubgaussianKind::rademacher, SubgaussianKind::uniform_unit_variance}) {
    Rng rng(4);
    const int n = 100000;
    std::vector<double> sq(n);
    for (int i = 0; i < n; ++i) {
      const double v = draw(kind, rng);
      CHECK(std::abs(v) <= std::sqrt(3.0));
      sq[i] = v * v;
    }
    const auto mo = oracle::moments(sq);
    CHECK(std::abs(mo.mean - 1.0) < 5.0 * mo.stderr_of_mean + 1e-12);
  }
  Rng rng(5);
  const auto model = iid_model(2, 3, 1.0, 1.0, SubgaussianKind::rademacher);
  for (double v : draw_r(model, rng)) CHECK(std::abs(v) == 1.0);
}

TEST_CASE("apply") {
  SUBCASE("unit real fading, no noise") {
    const std::size_t K = 3;
    const std::size_t M = 2;
    const auto model = iid_model(K, M, 1.0, 1.0);
    ChannelRealization real{std::vector<double>(2 * K * M, 0.0), std::vector<double>(2 * M, 0.0)};
    for (std::size_t m = 0; m < M; ++m) {
      for (std::size_t k = 0; k < K; ++k) real.fading[fading_index(K, k, m, 0)] = 1.0;
    }
    const auto y = apply(model, real, Matrix(K, M, 0.5));
    for (const auto& v : y) CHECK(v == std::complex<double>(1.5, 0.0));
  }
  SUBCASE("zero transmit returns the noise") {
    const auto model = iid_model(2, 3, 1.0, 1.0);
    Rng rng(6);
    const auto real = sample(model, rng);
    const auto y = apply(model, real, Matrix(2, 3));
    for (std::size_t m = 0; m < 3; ++m) {
      CHECK(y[m].real() == real.noise[2 * m]);
      CHECK(y[m].imag() == real.noise[2 * m + 1]);
    }
  }
  SUBCASE("energy equals the dense-Q quadratic form") {
    const std::size_t K = 2;
    const std::size_t M = 3;
    const std::size_t cols = 2 * K * M + 2 * M;
    const Matrix a = oracle::random_matrix(2 * K * M, cols, 10);
    const Matrix b = oracle::random_matrix(2 * M, cols, 11);
    const auto model = dense_model(K, M, a, b);
    Rng rng(12);
    Rng copy = rng;
    const auto r = draw_r(model, copy);
    const auto real = sample(model, rng);
    Rng xr(13);
    const Matrix x = random_transmit(K, M, xr);
    double energy = 0.0;
    for (const auto& v : apply(model, real, x)) energy += std::norm(v);
    const double ref = oracle::energy_quadratic_form(oracle::dense_q(x), a, b, r);
    CHECK(std::abs(energy - ref) <= 1e-9 * std::max(1.0, ref));
  }
  SUBCASE("linear in x") {
    const auto model = temporal_ar_model(3, 4, 0.6, 1.0, 0.3);
    Rng rng(14);
    const auto real = sample(model, rng);
    const Matrix x1 = random_transmit(3, 4, rng);
    const Matrix x2 = random_transmit(3, 4, rng);
    const auto y12 = apply(model, real, x1 + x2);
    const auto y1 = apply(model, real, x1);
    const auto y2 = apply(model, real, x2);
    const auto y0 = apply(model, real, Matrix(3, 4));
    for (std::size_t m = 0; m < 4; ++m) CHECK(std::abs(y12[m] - (y1[m] + y2[m] - y0[m])) < 1e-12);
  }
  SUBCASE("dimension mismatch") {
    const auto model = iid_model(2, 3, 1.0, 1.0);
    Rng rng(15);
    const auto real = sample(model, rng);
    CHECK_THROWS_AS(apply(model, real, Matrix(3, 3)), ValidationError);
  }
}

TEST_CASE("validate_user_uncorrelated") {
  for (std::size_t K = 1; K <= 8; ++K) {
    for (std::size_t M = 1; M <= 8; ++M) {
      CHECK(validate_user_uncorrelated(iid_model(K, M, 1.0, 1.0).fading_matrix(), K, M));
    }
  }
  CHECK_FALSE(validate_user_uncorrelated(Matrix(8, 12, 1.0), 2, 2));
  CHECK(validate_user_uncorrelated(Matrix(8, 12, 1.0), 1, 4));
}

TEST_CASE("expected noise energy") {
  CHECK(expected_noise_energy(dense_model(1, 2, Matrix(4, 8), Matrix(4, 8))) == 0.0);
  const Matrix b = oracle::random_matrix(4, 8, 21);
  const auto model = dense_model(1, 2, Matrix(4, 8), b);
  const double expected = std::pow(frobenius_norm(b), 2);
  CHECK(expected_noise_energy(model) == doctest::Approx(expected).epsilon(1e-12));
  Rng rng(22);
  const int n = 100000;
  std::vector<double> e(n);
  for (int i = 0; i < n; ++i) {
    const auto real = sample(model, rng);
    e[i] = 0.0;
    for (double v : real.noise) e[i] += v * v;
  }
  const auto mo = oracle::moments(e);
  CHECK(std::abs(mo.mean - expected) < 5.0 * mo.stderr_of_mean);
}

TEST_CASE("streamed sampler matches the full realization") {
  for (const auto& model :
       {iid_model(2, 5, 0.7, 0.3), temporal_ar_model(3, 4, -0.5, 1.0, 0.2),
        dense_model(2, 2, oracle::random_matrix(8, 12, 31), oracle::random_matrix(4, 12, 32))}) {
    Rng r1(40);
    Rng r2(40);
    const auto real = sample(model, r1);
    ChannelSampler sampler(model, r2);
    const std::size_t K = model.users();
    std::vector<double> re(K);
    std::vector<double> im(K);
    for (std::size_t m = 0; m < model.uses(); ++m) {
      double nr = 0.0;
      double ni = 0.0;
      sampler.next(re, im, nr, ni);
      for (std::size_t k = 0; k < K; ++k) {
        CHECK(re[k] == doctest::Approx(real.fading[fading_index(K, k, m, 0)]).epsilon(1e-12));
        CHECK(im[k] == doctest::Approx(real.fading[fading_index(K, k, m, 1)]).epsilon(1e-12));
      }
      CHECK(nr == doctest::Approx(real.noise[2 * m]).epsilon(1e-12));
      CHECK(ni == doctest::Approx(real.noise[2 * m + 1]).epsilon(1e-12));
    }
  }
}

TEST_CASE("dense_model validation") {
  CHECK_THROWS_AS(dense_model(1, 1, Matrix(2, 3), Matrix(2, 4)), ValidationError);
  CHECK_THROWS_AS(dense_model(1, 1, Matrix(2, 4), Matrix(3, 4)), ValidationError);
  Matrix bad(2, 4);
  bad(0, 0) = NAN;
  CHECK_THROWS_AS(dense_model(1, 1, bad, Matrix(2, 4)), ValidationError);
  // 2·K·M + 2·M = 4098 > 4096 columns.
  CHECK_THROWS_AS(dense_model(1, 1025, Matrix(2050, 4100), Matrix(2050, 4100)), ValidationError);
  CHECK_THROWS_AS(iid_model(32, 64, 1.0, 1.0).fading_matrix(), ValidationError);
}
