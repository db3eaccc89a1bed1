#ifndef LIGHTONS_SKETCH_H_
#define LIGHTONS_SKETCH_H_

#include <cstdint>
#include <limits>
#include <vector>

#include "lightons/learners.h"
#include "lightons/linalg.h"

namespace lightons {

// Frequent-directions sketch of a gradient stream.
//
// S is 2d' x d; rows at index >= next_zero_row are exactly zero. R is the
// 2d' x 2d' inverse (eps I + S S^T)^{-1}, so that
//   A~ = eps I + S^T S,   A~^{-1} = (1/eps)(I - S^T R S).
// Between SVD events R is maintained by a rank-two Woodbury correction in
// O(d' d); when the last zero row is filled the sketch is shrunk by the
// d'-th squared singular value and R becomes diagonal again.
struct SketchState {
  int d = 0;
  int d_prime = 0;
  double epsilon = 1.0;
  Matrix s;
  Matrix r;
  int next_zero_row = 0;
  double delta_accum = 0.0;
  // Upper bound on sigma_1(S)^2: exact after an SVD, plus inserted ||g||^2.
  double sigma1_sq_bound = 0.0;
  std::int64_t svd_events = 0;
};

SketchState sketch_init(int d, int d_prime, double epsilon);

// Inserts g and returns the round's sketching error Delta_t
// (2d'/eps) sigma_{d'}^2 when an SVD fired, 0 otherwise. Zero gradients
// (||g|| < 1e-14) leave the state untouched.
double fast_fd_update(SketchState& state, const Vector& g);

// (1/eps)(v - S^T R S v), O(d' d).
Vector sketched_inverse_apply(const SketchState& state, const Vector& v);

// eps I + S^T S as a dense d x d matrix.
Matrix reconstruct_metric(const SketchState& state);

// ||R (eps I + S S^T) - I||_F.
double sketch_inverse_drift(const SketchState& state);

// min over j in [d'] of 2d' / ((d' - j + 1) eps) * sum_{i >= j} lambda_i for
// a spectrum sorted in descending order.
double fd_error_bound(const std::vector<double>& spectrum, int d_prime, double epsilon);

// d'/gamma log(1 + c_g^2 G^2 T / (2 d' eps)) + gamma eps D^2 / 8 + Delta / (2 gamma).
double sketch_regret_upper_bound(int d_prime, double gamma, double gradient_bound,
                                 double epsilon, double diameter, std::int64_t horizon,
                                 double delta_total, double c_g = 1.0);

struct SketchLearnerState {
  LearnerConfig config;
  double gamma = 0.0;
  SketchState sketch;
  Vector y;
  Vector x;
  std::int64_t t = 0;
  std::int64_t mahalanobis_projections = 0;
  std::int64_t bisection_steps = 0;
  std::int64_t update_events = 0;
  std::int64_t gradient_bound_violations = 0;
  // Allocation audit: d x d matrices materialized so far. Only FastProj
  // events may create them.
  std::int64_t dense_materializations = 0;
  std::vector<RoundRecord> trace;
};

// config.variant must be kFull; gamma is gamma_prime.
SketchLearnerState make_sketch_learner(const LearnerConfig& config, int d_prime);

RoundRecord lightons_sketch_step(SketchLearnerState& state, const Vector& grad_f,
                                 double loss = std::numeric_limits<double>::quiet_NaN());

}  // namespace lightons

#endif  // LIGHTONS_SKETCH_H_
