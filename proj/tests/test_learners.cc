#include <cmath>
#include <limits>

#include "doctest.h"
#include "lightons/learners.h"
#include "lightons/tasks.h"
#include "test_util.h"

using namespace lightons;
using lightons::testing::gaussian;
using lightons::testing::in_ball;

namespace {

LearnerConfig unit_interval(Variant v) {
  LearnerConfig c;
  c.d = 1;
  c.diameter = 1.0;
  c.gradient_bound = 0.1;
  c.alpha = 5.0;
  c.epsilon = 1.0;
  c.k = 2.0;
  c.domain = make_box(-0.5, 0.5);
  c.variant = v;
  return c;
}

LearnerConfig fig1(Variant v, Task task, int d = 10, std::int64_t horizon = 10000) {
  LearnerConfig c;
  c.d = d;
  c.domain = make_ball(1.0);
  c.diameter = 2.0;
  c.gradient_bound = 0.1;
  c.alpha = task_alpha(task, BallDomain(1.0), 0.1);
  c.epsilon = d * std::log(double(horizon));
  c.variant = v;
  return c;
}

double a_norm(const Matrix& a, const Vector& v) { return std::sqrt(v.dot(a * v)); }

}  // namespace

TEST_CASE("gamma parameters") {
  CHECK(gamma_ons(1, 0.1, 5) == doctest::Approx(2.5));
  CHECK(gamma_ons(1, 1, 1e9) == doctest::Approx(0.5));
  CHECK(gamma_ons(2, 2, 0.1) == doctest::Approx(0.05));
  CHECK_THROWS_AS(gamma_ons(0, 1, 1), std::invalid_argument);

  CHECK(gamma_core(1, 0.1, 5, 2) == doctest::Approx(2.5));
  CHECK(gamma_core(1, 1, 10, 1 + 1e-12) == doctest::Approx(gamma_ons(1, 1, 10)));
  CHECK(gamma_core(1, 1, 10, 3) == doctest::Approx(0.25));
  CHECK_THROWS_AS(gamma_core(1, 1, 1, 1.0), std::invalid_argument);

  CHECK(gamma_prime(1, 0.1, 5, 2) == doctest::Approx(2.5));
  CHECK(gamma_prime(1, 0.1, 5, 2) == doctest::Approx(gamma_ons(1, 0.1, 5)));
  CHECK(gamma_prime(1, 1, 10, 5) == doctest::Approx(1.0 / 3.0));
  CHECK(gamma_prime(1, 1, 1e9, 2, 2.0, 1.0) == doctest::Approx(0.5 * gamma_prime(1, 1, 1e9, 2)));
  CHECK_THROWS_AS(gamma_prime(1, 1, 1, 2, 0.5, 1.0), std::invalid_argument);
  for (double k : {1.5, 2.0, 3.0}) {
    CHECK(gamma_prime(1.7, 0.3, 100, k) == doctest::Approx(gamma_ons(1.7, 0.3, 100)));
  }
}

TEST_CASE("config validation") {
  auto c = unit_interval(Variant::kCore);
  c.k = 1.0;
  CHECK_THROWS_AS(make_learner(c), std::invalid_argument);
  c = unit_interval(Variant::kOns);
  c.k = 0.5;
  CHECK_NOTHROW(make_learner(c));
  c.diameter = 0.5;  // box [-1/2, 1/2] has diameter 1
  CHECK_THROWS_AS(make_learner(c), std::invalid_argument);
}

TEST_CASE("ons_step scalar example") {
  auto s = make_learner(unit_interval(Variant::kOns));
  CHECK(s.gamma == doctest::Approx(2.5));
  auto rec = ons_step(s, Vector::Constant(1, 0.1));
  CHECK(s.pd.a(0, 0) == doctest::Approx(1.01));
  CHECK(s.x(0) == doctest::Approx(-0.1 / (2.5 * 1.01)).epsilon(1e-14));
  CHECK(rec.projected == ProjectionKind::kNone);
  CHECK(s.mahalanobis_projections == 0);

  const Vector x = s.x;
  const Matrix a = s.pd.a;
  ons_step(s, Vector::Zero(1));
  CHECK(s.x == x);
  CHECK(s.pd.a == a);
  CHECK(s.t == 2);
  CHECK_THROWS_AS(ons_step(s, Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("ons_step projection on exterior steps") {
  Rng rng(31);
  for (auto dom : {make_ball(1.0), make_box(-0.5, 0.5)}) {
    LearnerConfig c;
    c.d = 3;
    c.domain = dom;
    c.diameter = dom->diameter(3);
    c.gradient_bound = 10.0;
    c.alpha = 1.0;
    c.epsilon = 0.1;
    c.variant = Variant::kOns;
    auto s = make_learner(c);
    for (int t = 0; t < 30; ++t) {
      Vector g = 3.0 * lightons::testing::unit(rng, 3);
      const Vector x_prev = s.x;
      Matrix a_next = s.pd.a + g * g.transpose();
      Vector x_hat = x_prev - (1.0 / s.gamma) * dense_inverse(a_next) * g;
      auto rec = ons_step(s, g);
      CHECK(dom->contains(s.x, 1e-9));
      if (rec.projected == ProjectionKind::kMahalanobis) {
        for (int i = 0; i < 20; ++i) {
          Vector u = dom->project(in_ball(rng, 3, 1.0));
          CHECK(a_norm(a_next, s.x - u) <= a_norm(a_next, x_hat - u) + 1e-6);
        }
      }
    }
    CHECK(s.mahalanobis_projections > 0);
  }
}

TEST_CASE("lightons_core_step hysteresis") {
  auto s = make_learner(unit_interval(Variant::kCore));
  s.x = s.y = Vector::Constant(1, 1.0);  // |x_hat| = kD/2 exactly
  auto rec = lightons_core_step(s, Vector::Zero(1));
  CHECK(rec.projected == ProjectionKind::kNone);
  CHECK(s.x(0) == 1.0);

  s.x = s.y = Vector::Constant(1, 0.9);
  lightons_core_step(s, Vector::Zero(1));
  CHECK(s.x(0) == 0.9);
  CHECK_FALSE(s.config.domain->contains(s.x));

  s.x = s.y = Vector::Constant(1, 1.2);
  rec = lightons_core_step(s, Vector::Constant(1, 1e-9));
  CHECK(rec.projected == ProjectionKind::kMahalanobis);
  CHECK(s.mahalanobis_projections == 1);
  CHECK(s.x(0) == doctest::Approx(0.5));
}

TEST_CASE("lightons_step round one by hand") {
  LearnerConfig c;
  c.d = 2;
  c.domain = make_ball(0.5);
  c.diameter = 1.0;
  c.epsilon = 1.0;
  c.k = 2.0;
  c.gradient_bound = 1.0;
  c.alpha = 10.0;
  auto s = make_learner(c);
  CHECK(s.gamma == doctest::Approx(0.5));
  auto rec = lightons_step(s, Vector(Eigen::Vector2d(1, 0)));
  CHECK(rec.grad_g.isApprox(Eigen::Vector2d(1, 0)));
  CHECK(s.pd.a.isApprox(Eigen::Matrix2d(Eigen::Vector2d(2, 1).asDiagonal())));
  CHECK(s.y.isApprox(Eigen::Vector2d(-1, 0)));
  CHECK(s.x.isApprox(Eigen::Vector2d(-0.5, 0)));
  CHECK(rec.projected == ProjectionKind::kEuclideanOnly);
  CHECK(s.mahalanobis_projections == 0);

  const Vector y = s.y, x = s.x;
  lightons_step(s, Vector::Zero(2));
  CHECK(s.y == y);
  CHECK(s.x == x);
}

TEST_CASE("lightons_step forced projection") {
  LearnerConfig c;
  c.d = 3;
  c.domain = make_ball(0.5);
  c.diameter = 1.0;
  c.epsilon = 0.05;
  c.gradient_bound = 5.0;
  c.alpha = 10.0;
  auto s = make_learner(c);
  Rng rng(32);
  int projected = 0;
  for (int t = 0; t < 200; ++t) {
    auto rec = lightons_step(s, 5.0 * lightons::testing::unit(rng, 3));
    CHECK(s.y.norm() <= 0.5 * c.k * c.diameter + 1e-12);
    CHECK(c.domain->contains(s.x));
    if (rec.projected == ProjectionKind::kMahalanobis) {
      ++projected;
      CHECK(s.y.norm() <= 0.5 * c.diameter + 1e-12);
      CHECK(rec.zeta_t > 0.0);
    }
  }
  CHECK(projected > 0);
  CHECK(projected == s.mahalanobis_projections);
}

TEST_CASE("projection_budget") {
  CHECK(projection_budget(10, 1.0, 10.0, 2.0, 2.5, 10000) == 80);
  CHECK(projection_budget(10, 1.0, 10.0, std::numeric_limits<double>::infinity(), 2.5, 10000) ==
        0);
  CHECK(projection_budget(10, 1.0, 10.0, 1e12, 2.5, 10000) == 0);
  CHECK(projection_budget(10, 1.0, 10.0, 2.0, 2.5, 0) == 0);
  CHECK(projection_budget_unscaled(10, 1.0, 10.0, 2.5, 10000) == doctest::Approx(80.0));
}

TEST_CASE("regret_upper_bound") {
  const double eps = 10.0 * std::log(1e4);
  const double b = regret_upper_bound(10, 2.5, 0.1, eps, 1.0, 10000);
  CHECK(b == doctest::Approx(2.0 * std::log1p(100.0 / (10.0 * eps)) + 2.5 * eps / 8.0));
  CHECK(b == doctest::Approx(28.99).epsilon(1e-3));
  CHECK(regret_upper_bound(10, 2.5, 0.1, eps, 1.0, 0) == doctest::Approx(2.5 * eps / 8.0));
  const double log_full = regret_upper_bound(10, 2.5, 0.1, eps, 1.0, 10000) - 2.5 * eps / 8.0;
  const double log_half = regret_upper_bound(10, 1.25, 0.1, eps, 1.0, 10000) - 1.25 * eps / 8.0;
  CHECK(log_half == doctest::Approx(2.0 * log_full));
}

TEST_CASE("zeta schedule is O(1/t^2)") {
  const double z1 = zeta_schedule(2.5, 2.0, 2.0, 0.1, 1.0, 92.1, 100);
  const double z2 = zeta_schedule(2.5, 2.0, 2.0, 0.1, 1.0, 92.1, 1000);
  CHECK(z2 < z1);
  CHECK(z2 * 1e6 <= 1.0);
}

TEST_CASE("exp-concave linearization inequality") {
  Rng rng(33);
  BallDomain ball(1.0);
  for (Task task : {Task::kLinear, Task::kLogistic}) {
    const double alpha = task_alpha(task, ball, 0.1);
    const double g0 = gamma_ons(2.0, 0.1, alpha);
    StreamConfig sc;
    sc.spec = {task, 1.0, 0.1, alpha};
    sc.d = 10;
    sc.seed = 5;
    Stream stream = sample_stream(sc, 0, StreamTag::kTest, 10000);
    int violations = 0;
    for (const auto& sample : stream.samples) {
      Vector x = in_ball(rng, 10, 1.0);
      Vector u = in_ball(rng, 10, 1.0);
      LossEval ev = evaluate_loss(task, x, sample);
      const double lin = ev.grad.dot(x - u);
      if (ev.loss - loss_value(task, u, sample) > lin - 0.5 * g0 * lin * lin + 1e-12) ++violations;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("fig. 1 runs: properness, containment and budget") {
  for (Task task : {Task::kLinear, Task::kLogistic}) {
    auto c = fig1(Variant::kFull, task, 10, 2000);
    auto s = make_learner(c);
    StreamConfig sc;
    sc.spec = {task, 1.0, 0.1, c.alpha};
    sc.d = 10;
    sc.seed = 8;
    Stream stream = sample_stream(sc, 0, StreamTag::kTest, 2000);
    for (const auto& sample : stream.samples) {
      LossEval ev = evaluate_loss(task, s.x, sample);
      lightons_step(s, ev.grad, ev.loss);
      CHECK(c.domain->contains(s.x));
      CHECK(s.y.norm() <= 0.5 * c.k * c.diameter + 1e-12);
    }
    CHECK(s.mahalanobis_projections <= projection_budget(c, s.gamma, 2000));
    CHECK(s.gradient_bound_violations == 0);
  }
}

TEST_CASE("gradient-norm adaptive regret") {
  const int d = 5;
  const std::int64_t horizon = 3000;
  auto c = fig1(Variant::kFull, Task::kLinear, d, horizon);
  auto s = make_learner(c);
  StreamConfig sc;
  sc.spec = {Task::kLinear, 1.0, 0.1, c.alpha};
  sc.d = d;
  sc.seed = 9;
  Stream stream = sample_stream(sc, 0, StreamTag::kTest, horizon);
  // Shrinking the scale by 1/sqrt(t) makes gradient norms decay like 1/t
  // and keeps exp-concavity.
  for (std::size_t t = 0; t < stream.samples.size(); ++t) {
    const double f = 1.0 / std::sqrt(double(t + 1));
    stream.samples[t].x *= f;
    stream.samples[t].y *= f;
  }
  std::vector<double> losses;
  double g_t = 0.0;
  for (const auto& sample : stream.samples) {
    LossEval ev = evaluate_loss(Task::kLinear, s.x, sample);
    g_t += ev.grad.squaredNorm();
    losses.push_back(ev.loss);
    lightons_step(s, ev.grad, ev.loss);
  }
  auto best = offline_best_comparator(Task::kLinear, stream.samples, *c.domain);
  double regret = 0.0;
  for (std::size_t t = 0; t < losses.size(); ++t) {
    regret += losses[t] - loss_value(Task::kLinear, best.u, stream.samples[t]);
  }
  const double g0 = gamma_ons(c.diameter, c.gradient_bound, c.alpha);
  CHECK(g_t < 0.1 * c.gradient_bound * c.gradient_bound * horizon);
  CHECK(regret <= regret_upper_bound_adaptive(d, g0, g_t, c.epsilon, c.diameter) +
                      kTruncationSlack);
}
