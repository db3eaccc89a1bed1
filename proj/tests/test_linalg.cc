#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "lightons/linalg.h"
#include "test_util.h"

using namespace lightons;
using lightons::testing::random_spd;
using lightons::testing::unit;

TEST_CASE("pd_pair_init") {
  auto s = pd_pair_init(2, 1.0);
  CHECK(s.a.isApprox(Matrix::Identity(2, 2)));
  CHECK(s.v.isApprox(Matrix::Identity(2, 2)));
  CHECK(s.update_count == 0);

  auto t = pd_pair_init(1, 4.0);
  CHECK(t.a(0, 0) == 4.0);
  CHECK(t.v(0, 0) == 0.25);

  CHECK_THROWS_AS(pd_pair_init(3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pd_pair_init(0, 1.0), std::invalid_argument);
}

TEST_CASE("rank_one_update scalar and zero gradient") {
  auto s = pd_pair_init(1, 1.0);
  CHECK(rank_one_update(s, Vector::Ones(1)));
  CHECK(s.a(0, 0) == doctest::Approx(2.0));
  CHECK(s.v(0, 0) == doctest::Approx(0.5));
  CHECK(s.update_count == 1);

  const Matrix a = s.a, v = s.v;
  CHECK_FALSE(rank_one_update(s, Vector::Zero(1)));
  CHECK(s.a == a);
  CHECK(s.v == v);
  CHECK(s.update_count == 1);

  CHECK_THROWS_AS(rank_one_update(s, Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("rank_one_update tracks the dense inverse") {
  Rng rng(11);
  auto s = pd_pair_init(3, 2.0);
  for (int i = 0; i < 50; ++i) rank_one_update(s, unit(rng, 3));
  CHECK((s.v * s.a - Matrix::Identity(3, 3)).norm() <= 1e-10);
  CHECK((s.v - dense_inverse(s.a)).norm() <= 1e-10);
}

TEST_CASE("SMW drift over a long stream") {
  Rng rng(12);
  for (int d : {5, 20}) {
    auto s = pd_pair_init(d, 1.0);
    for (int i = 0; i < 10000; ++i) rank_one_update(s, unit(rng, d) * rng.uniform());
    CHECK(inverse_drift(s) <= 1e-6);
    CHECK(asymmetry(s.a) <= 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.a, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= 1.0 - 1e-10);
  }
}

TEST_CASE("refresh_every rebuilds V") {
  Rng rng(13);
  auto s = pd_pair_init(4, 1.0);
  s.refresh_every = 7;
  for (int i = 0; i < 30; ++i) rank_one_update(s, unit(rng, 4));
  CHECK(inverse_drift(s) <= 1e-12);
}

TEST_CASE("dense_inverse") {
  CHECK(dense_inverse(Matrix::Identity(3, 3)).isApprox(Matrix::Identity(3, 3)));
  Matrix a = Vector(Eigen::Vector2d(2, 4)).asDiagonal();
  Matrix m = dense_inverse(a);
  CHECK(m(0, 0) == doctest::Approx(0.5));
  CHECK(m(1, 1) == doctest::Approx(0.25));
  CHECK(std::abs(m(0, 1)) < 1e-15);

  Rng rng(14);
  Matrix r = random_spd(rng, 5, 0.5, 20.0);
  CHECK((dense_inverse(r) * r - Matrix::Identity(5, 5)).norm() <= 1e-10);

  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(dense_inverse(bad), NumericalError);
}

TEST_CASE("log_det") {
  CHECK(log_det(Matrix::Identity(4, 4)) == doctest::Approx(0.0));
  Matrix a = Vector(Eigen::Vector2d(std::exp(1.0), std::exp(2.0))).asDiagonal();
  CHECK(log_det(a) == doctest::Approx(3.0).epsilon(1e-14));

  Rng rng(15);
  Matrix r = random_spd(rng, 5, 0.1, 10.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(r, Eigen::EigenvaluesOnly);
  CHECK(std::abs(log_det(r) - es.eigenvalues().array().log().sum()) <= 1e-8);

  CHECK_THROWS_AS(log_det(-Matrix::Identity(2, 2)), NumericalError);
}

TEST_CASE("tridiagonalize small and diagonal inputs") {
  Matrix diag = Vector(Eigen::Vector3d(1, 2, 3)).asDiagonal();
  auto f = tridiagonalize(diag);
  CHECK((f.q * f.dense_c() * f.q.transpose() - diag).norm() <= 1e-12);
  // Q must be a signed permutation.
  for (int i = 0; i < 3; ++i) {
    CHECK(f.q.row(i).cwiseAbs().maxCoeff() == doctest::Approx(1.0));
    CHECK(f.q.row(i).cwiseAbs().sum() == doctest::Approx(1.0));
  }
  CHECK(f.offdiag.cwiseAbs().maxCoeff() <= 1e-14);

  Matrix two(2, 2);
  two << 3, 1, 1, 5;
  auto g = tridiagonalize(two);
  CHECK((g.q * g.dense_c() * g.q.transpose() - two).norm() <= 1e-14);
  CHECK((g.q.transpose() * g.q - Matrix::Identity(2, 2)).norm() <= 1e-14);

  Matrix asym = two;
  asym(0, 1) += 1e-3;
  CHECK_THROWS_AS(tridiagonalize(asym), std::invalid_argument);
}

TEST_CASE("tridiagonalize random SPD") {
  Rng rng(16);
  for (int d : {1, 3, 6, 12, 25}) {
    Matrix a = random_spd(rng, d, 0.1, 50.0);
    auto f = tridiagonalize(a);
    CHECK((f.q * f.dense_c() * f.q.transpose() - a).norm() <= 1e-8 * a.norm());
    CHECK((f.q.transpose() * f.q - Matrix::Identity(d, d)).norm() <= 1e-10);
    // C is tridiagonal by construction; apply_c agrees with the dense form.
    Vector x = lightons::testing::gaussian(rng, d);
    CHECK((f.apply_c(x) - f.dense_c() * x).norm() <= 1e-12 * (1.0 + x.norm() * a.norm()));
  }
}

TEST_CASE("tridiag_shifted_solve") {
  Vector z = tridiag_shifted_solve(Vector::Ones(2), Vector::Zero(1), 1.0,
                                   Vector(Eigen::Vector2d(2, 4)));
  CHECK(z(0) == doctest::Approx(1.0));
  CHECK(z(1) == doctest::Approx(2.0));

  Vector q(3);
  q << 1, -2, 5;
  CHECK((tridiag_shifted_solve(Vector::Ones(3), Vector::Zero(2), 0.0, q) - q).norm() == 0.0);

  Rng rng(17);
  const int d = 8;
  Vector diag(d), off(d - 1);
  for (int i = 0; i < d; ++i) diag(i) = 3.0 + rng.uniform();
  for (int i = 0; i < d - 1; ++i) off(i) = rng.uniform() - 0.5;
  Matrix dense = Matrix::Zero(d, d);
  dense.diagonal() = diag;
  for (int i = 0; i < d - 1; ++i) dense(i, i + 1) = dense(i + 1, i) = off(i);
  const double mu = 0.7;
  Vector rhs = lightons::testing::gaussian(rng, d);
  Vector fast = tridiag_shifted_solve(diag, off, mu, rhs);
  Vector ref = (dense + mu * Matrix::Identity(d, d)).llt().solve(rhs);
  CHECK((fast - ref).norm() <= 1e-9 * ref.norm());
  CHECK(((dense + mu * Matrix::Identity(d, d)) * fast - rhs).norm() <= 1e-9 * rhs.norm());

  Vector neg = -Vector::Ones(2);
  CHECK_THROWS_AS(tridiag_shifted_solve(neg, Vector::Zero(1), 0.0, Vector::Ones(2)),
                  NumericalError);
}

TEST_CASE("tridiagonal solve matches dense solve after change of basis") {
  Rng rng(18);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 15;
    Matrix a = random_spd(rng, d, 0.5, 30.0);
    Vector u = lightons::testing::gaussian(rng, d);
    const double mu = 5.0 * rng.uniform();
    auto f = tridiagonalize(a);
    Vector q = f.apply_c(f.q.transpose() * u);
    Vector via_c = f.q * tridiag_shifted_solve(f, mu, q);
    Vector dense = (a + mu * Matrix::Identity(d, d)).llt().solve(a * u);
    CHECK((via_c - dense).norm() <= 1e-8);
  }
}

TEST_CASE("elliptical potential chains") {
  Rng rng(19);
  for (int stream = 0; stream < 50; ++stream) {
    const int d = 1 + static_cast<int>(rng.uniform() * 20);
    const int n = 1 + static_cast<int>(rng.uniform() * 1000);
    const double lambda = 0.1 + 2.0 * rng.uniform();
    const double l = 0.1 + 2.0 * rng.uniform();
    auto s = pd_pair_init(d, lambda);
    const double logdet0 = log_det(s.a);
    const double trace0 = s.v.trace();
    double quad = 0.0, quad2 = 0.0;
    for (int i = 0; i < n; ++i) {
      Vector v = unit(rng, d) * l * rng.uniform();
      rank_one_update(s, v);
      const Vector av = s.v * v;
      quad += v.dot(av);
      quad2 += av.squaredNorm();
    }
    const double middle = log_det(s.a) - logdet0;
    const double right = d * std::log1p(l * l * n / (d * lambda));
    CHECK(quad <= middle + 1e-9);
    CHECK(middle <= right + 1e-9);
    const double middle2 = trace0 - dense_inverse(s.a).trace();
    CHECK(quad2 <= middle2 + 1e-9);
    CHECK(middle2 <= d / lambda + 1e-9);
  }
}
