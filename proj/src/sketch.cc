#include "lightons/sketch.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "lightons/conversion.h"
#include "lightons/projection.h"

namespace lightons {

namespace {

// Relative cut-offs below which singular values are treated as exactly zero.
constexpr double kShrinkFloor = 1e-12;    // on squared shrunk values
constexpr double kSigmaFloor = 1e-12;     // on sigma_{d'} / sigma_1

void svd_shrink(SketchState& st, double& delta_t) {
  Eigen::JacobiSVD<Matrix> svd(st.s, Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();  // descending, size 2d'
  const Matrix& v = svd.matrixV();
  const double s1 = sigma(0);
  double shrink = sigma(st.d_prime - 1) * sigma(st.d_prime - 1);
  if (sigma(st.d_prime - 1) <= kSigmaFloor * s1) shrink = 0.0;

  const int rows = 2 * st.d_prime;
  st.s.setZero();
  st.r = (1.0 / st.epsilon) * Matrix::Identity(rows, rows);
  int kept = 0;
  double top = 0.0;
  for (int i = 0; i < st.d_prime; ++i) {
    double val2 = sigma(i) * sigma(i) - shrink;
    if (val2 <= kShrinkFloor * s1 * s1) break;
    st.s.row(kept) = std::sqrt(val2) * v.col(i).transpose();
    st.r(kept, kept) = 1.0 / (st.epsilon + val2);
    top = std::max(top, val2);
    ++kept;
  }
  st.next_zero_row = kept;
  st.sigma1_sq_bound = top;
  delta_t = 2.0 * st.d_prime / st.epsilon * shrink;
  ++st.svd_events;
}

}  // namespace

SketchState sketch_init(int d, int d_prime, double epsilon) {
  if (d < 1) throw std::invalid_argument("sketch_init: d must be >= 1");
  if (d_prime < 1 || 2 * d_prime > d) {
    throw std::invalid_argument("sketch_init: need 1 <= d' <= d/2");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("sketch_init: epsilon must be positive");
  SketchState st;
  st.d = d;
  st.d_prime = d_prime;
  st.epsilon = epsilon;
  st.s = Matrix::Zero(2 * d_prime, d);
  st.r = (1.0 / epsilon) * Matrix::Identity(2 * d_prime, 2 * d_prime);
  return st;
}

double fast_fd_update(SketchState& st, const Vector& g) {
  if (g.size() != st.d) throw std::invalid_argument("fast_fd_update: dimension mismatch");
  if (g.norm() < kDegenerateGradient) return 0.0;

  const int rows = 2 * st.d_prime;
  const int i = st.next_zero_row;
  const Vector a = st.s * g;  // a(i) == 0: row i is still zero
  st.s.row(i) = g.transpose();
  st.sigma1_sq_bound += g.squaredNorm();

  if (i + 1 < rows) {
    // R^{-1} gains e_i a^T + b e_i^T with b = a + e_i ||g||^2. Both rank-one
    // corrections are applied together as a 2-column Woodbury update.
    Vector b = a;
    b(i) += g.squaredNorm();
    Matrix u(rows, 2);
    u.col(0).setZero();
    u(i, 0) = 1.0;
    u.col(1) = b;
    Matrix w(rows, 2);
    w.col(0) = a;
    w.col(1).setZero();
    w(i, 1) = 1.0;
    const Matrix ru = st.r * u;                         // 2d' x 2
    const Matrix wr = w.transpose() * st.r;             // 2 x 2d'
    Eigen::Matrix2d cap = Eigen::Matrix2d::Identity() + w.transpose() * ru;
    st.r.noalias() -= ru * cap.inverse() * wr;
    st.r = 0.5 * (st.r + st.r.transpose());
    st.next_zero_row = i + 1;
    return 0.0;
  }

  double delta_t = 0.0;
  svd_shrink(st, delta_t);
  st.delta_accum += delta_t;
  return delta_t;
}

Vector sketched_inverse_apply(const SketchState& st, const Vector& v) {
  if (v.size() != st.d) throw std::invalid_argument("sketched_inverse_apply: dimension mismatch");
  const Vector sv = st.s * v;
  return (v - st.s.transpose() * (st.r * sv)) / st.epsilon;
}

Matrix reconstruct_metric(const SketchState& st) {
  Matrix a = st.s.transpose() * st.s;
  a.diagonal().array() += st.epsilon;
  return a;
}

double sketch_inverse_drift(const SketchState& st) {
  const int rows = 2 * st.d_prime;
  Matrix m = st.s * st.s.transpose();
  m.diagonal().array() += st.epsilon;
  return (st.r * m - Matrix::Identity(rows, rows)).norm();
}

double fd_error_bound(const std::vector<double>& spectrum, int d_prime, double epsilon) {
  if (d_prime < 1) throw std::invalid_argument("fd_error_bound: d' must be >= 1");
  // tail[j] = sum_{i >= j} lambda_i, 0-based.
  std::vector<double> tail(spectrum.size() + 1, 0.0);
  for (std::size_t i = spectrum.size(); i-- > 0;) tail[i] = tail[i + 1] + std::max(0.0, spectrum[i]);
  double best = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= d_prime; ++j) {
    const double t = std::size_t(j - 1) < tail.size() ? tail[j - 1] : 0.0;
    const double val = 2.0 * d_prime / ((d_prime - j + 1) * epsilon) * t;
    best = std::min(best, val);
  }
  return best;
}

double sketch_regret_upper_bound(int d_prime, double gamma, double gradient_bound,
                                 double epsilon, double diameter, std::int64_t horizon,
                                 double delta_total, double c_g) {
  const double g2 = c_g * c_g * gradient_bound * gradient_bound;
  const double h = double(std::max<std::int64_t>(horizon, 0));
  return double(d_prime) / gamma * std::log1p(g2 * h / (2.0 * d_prime * epsilon)) +
         gamma * epsilon * diameter * diameter / 8.0 + delta_total / (2.0 * gamma);
}

SketchLearnerState make_sketch_learner(const LearnerConfig& config, int d_prime) {
  validate(config);
  if (config.variant != Variant::kFull) {
    throw std::invalid_argument("make_sketch_learner: sketching wraps the full LightONS learner");
  }
  SketchLearnerState st;
  st.config = config;
  st.gamma = gamma_for(config);
  st.sketch = sketch_init(config.d, d_prime, config.epsilon);
  st.y = Vector::Zero(config.d);
  st.x = Vector::Zero(config.d);
  return st;
}

RoundRecord lightons_sketch_step(SketchLearnerState& st, const Vector& grad_f, double loss) {
  const LearnerConfig& c = st.config;
  if (grad_f.size() != c.d) throw std::invalid_argument("lightons_sketch_step: dimension mismatch");
  if (grad_f.norm() > c.gradient_bound * (1.0 + 1e-12) && st.gradient_bound_violations++ == 0) {
    std::cerr << "warning: gradient norm exceeds configured bound at round " << st.t + 1
              << "; FastProj certificates no longer hold\n";
  }

  RoundRecord rec;
  rec.t = st.t + 1;
  rec.x = st.x;
  rec.grad_f = grad_f;
  rec.loss = loss;
  rec.grad_g = surrogate_gradient(grad_f, st.x, st.y);
  if (rec.grad_g.norm() >= kDegenerateGradient) ++st.update_events;
  fast_fd_update(st.sketch, rec.grad_g);

  const Vector y_hat = st.y - (1.0 / st.gamma) * sketched_inverse_apply(st.sketch, rec.grad_g);
  if (y_hat.norm() <= 0.5 * c.k * c.diameter) {
    st.y = y_hat;
  } else {
    const Matrix metric = reconstruct_metric(st.sketch);
    ++st.dense_materializations;
    const double zeta = zeta_schedule(st.gamma, c.k, c.diameter, c.gradient_bound, c.c_g,
                                      c.epsilon, rec.t);
    ProjectionRequest req;
    req.metric = &metric;
    req.point = y_hat;
    req.radius = 0.5 * c.diameter;
    req.tolerance = zeta;
    req.lambda_lo = c.epsilon;
    req.lambda_hi = c.epsilon + c.c_g * c.c_g * c.gradient_bound * c.gradient_bound * double(rec.t);
    auto res = fast_proj_detailed(req, c.backend);
    st.y = std::move(res.v);
    rec.projected = ProjectionKind::kMahalanobis;
    rec.zeta_t = zeta;
    rec.bisection_steps = res.bisection_steps;
    ++st.mahalanobis_projections;
    st.bisection_steps += res.bisection_steps;
  }
  const Vector x_next = c.domain->project(st.y);
  if (rec.projected == ProjectionKind::kNone && (x_next - st.y).norm() > 0.0) {
    rec.projected = ProjectionKind::kEuclideanOnly;
  }
  st.x = x_next;
  st.t = rec.t;
  rec.y_norm = st.y.norm();
  if (c.record_trace) st.trace.push_back(rec);
  return rec;
}

}  // namespace lightons
