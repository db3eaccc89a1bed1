#ifndef LIGHTONS_LEARNERS_H_
#define LIGHTONS_LEARNERS_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "lightons/domain.h"
#include "lightons/linalg.h"
#include "lightons/projection.h"

namespace lightons {

enum class Variant { kOns, kCore, kFull };

// Which projection, if any, a round performed.
enum class ProjectionKind { kNone, kMahalanobis, kEuclideanOnly };

const char* to_string(ProjectionKind kind);

struct LearnerConfig {
  int d = 1;
  double diameter = 1.0;        // D
  double gradient_bound = 1.0;  // G
  double alpha = 1.0;           // exp-concavity
  double epsilon = 1.0;         // A_0 = epsilon I
  double k = 2.0;               // hysteresis coefficient, ignored by ONS
  DomainPtr domain;
  Variant variant = Variant::kFull;
  double c_f = 1.0;
  double c_g = 1.0;
  ProjectionBackend backend = ProjectionBackend::kTridiagonal;
  std::int64_t refresh_every = 0;  // forwarded to PdPairState
  bool record_trace = false;
};

// Throws std::invalid_argument on the first violated precondition.
void validate(const LearnerConfig& config);

struct RoundRecord {
  std::int64_t t = 0;
  Vector x;            // decision played this round
  double y_norm = 0.0; // ||y_{t+1}|| after the step
  Vector grad_f;
  Vector grad_g;
  double loss = std::numeric_limits<double>::quiet_NaN();
  ProjectionKind projected = ProjectionKind::kNone;
  double zeta_t = 0.0;
  int bisection_steps = 0;
};

struct LearnerState {
  LearnerConfig config;
  double gamma = 0.0;
  PdPairState pd;
  Vector y;  // core decision; equals x for ONS and Core
  Vector x;  // proper decision played next round
  std::int64_t t = 0;  // rounds completed
  std::int64_t mahalanobis_projections = 0;
  std::int64_t bisection_steps = 0;
  std::int64_t update_events = 0;  // O(d^2) preconditioner updates
  std::int64_t gradient_bound_violations = 0;
  std::vector<RoundRecord> trace;  // filled only when config.record_trace
};

// 1/2 min{1/(DG), alpha}
double gamma_ons(double diameter, double gradient_bound, double alpha);
// 1/2 min{2/((k+1) DG), alpha}
double gamma_core(double diameter, double gradient_bound, double alpha, double k);
// 1/2 min{1/(c_f c_g DG), 4/(c_f c_g (k+1) DG), alpha}
double gamma_prime(double diameter, double gradient_bound, double alpha, double k,
                   double c_f = 1.0, double c_g = 1.0);
double gamma_for(const LearnerConfig& config);

// Bisection tolerance for the FastProj call in round t (1-based):
//   min{ gamma / (2 k D (c_g^2 G^2 t + eps) t^2),
//        (1/t) sqrt(gamma / (2 (c_g^2 G^2 t + eps) t)) }.
double zeta_schedule(double gamma, double k, double diameter, double gradient_bound,
                     double c_g, double epsilon, std::int64_t t);

LearnerState make_learner(const LearnerConfig& config);

RoundRecord ons_step(LearnerState& state, const Vector& grad,
                     double loss = std::numeric_limits<double>::quiet_NaN());
RoundRecord lightons_core_step(LearnerState& state, const Vector& grad,
                               double loss = std::numeric_limits<double>::quiet_NaN());
RoundRecord lightons_step(LearnerState& state, const Vector& grad_f,
                          double loss = std::numeric_limits<double>::quiet_NaN());
// Dispatches on config.variant.
RoundRecord learner_step(LearnerState& state, const Vector& grad,
                         double loss = std::numeric_limits<double>::quiet_NaN());

// floor( 2 / ((k-1) D gamma) * sqrt(d T / eps) ): ceiling on the number of
// Mahalanobis projections over T rounds.
std::int64_t projection_budget(const LearnerConfig& config, double gamma, std::int64_t horizon);
std::int64_t projection_budget(int d, double diameter, double epsilon, double k,
                               double gamma, std::int64_t horizon);
// The looser (2 / (D gamma)) sqrt(dT/eps) form without the (k-1) factor.
double projection_budget_unscaled(int d, double diameter, double epsilon, double gamma,
                                  std::int64_t horizon);

// (d / (2 gamma)) log(1 + c_g^2 G^2 T / (d eps)) + gamma eps D^2 / 8.
double regret_upper_bound(const LearnerConfig& config, double gamma, std::int64_t horizon);
double regret_upper_bound(int d, double gamma, double gradient_bound, double epsilon,
                          double diameter, std::int64_t horizon, double c_g = 1.0);
// Same bound with c_g^2 G^2 T replaced by G_T = sum ||grad_f||^2.
double regret_upper_bound_adaptive(int d, double gamma, double sum_sq_grad,
                                   double epsilon, double diameter);

// Additive slack allowed on top of regret bounds for FastProj truncation.
inline constexpr double kTruncationSlack = 2.0;

}  // namespace lightons

#endif  // LIGHTONS_LEARNERS_H_
