#include "lightons/learners.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "lightons/conversion.h"

namespace lightons {

const char* to_string(ProjectionKind kind) {
  switch (kind) {
    case ProjectionKind::kNone: return "none";
    case ProjectionKind::kMahalanobis: return "mahalanobis";
    case ProjectionKind::kEuclideanOnly: return "euclidean_only";
  }
  return "none";
}

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_gradient_bound(LearnerState& s, const Vector& grad, double bound) {
  if (grad.norm() <= bound * (1.0 + 1e-12)) return;
  if (s.gradient_bound_violations++ == 0) {
    std::cerr << "warning: gradient norm " << grad.norm() << " exceeds configured bound "
              << bound << " at round " << s.t + 1
              << "; FastProj eigenvalue bounds and tolerances are no longer certified\n";
  }
}

// Mahalanobis projection of `point` onto X under the current A.
struct Projected {
  Vector v;
  double zeta = 0.0;
  int steps = 0;
};

Projected project_onto_domain(const LearnerState& s, const Vector& point, double zeta,
                              std::int64_t t) {
  const LearnerConfig& c = s.config;
  Projected out;
  if (auto radius = c.domain->ball_radius()) {
    ProjectionRequest req;
    req.metric = &s.pd.a;
    req.point = point;
    req.radius = *radius;
    req.tolerance = zeta;
    req.lambda_lo = c.epsilon;
    req.lambda_hi = c.epsilon + c.c_g * c.c_g * c.gradient_bound * c.gradient_bound * double(t);
    auto res = fast_proj_detailed(req, c.backend);
    out.v = std::move(res.v);
    out.zeta = zeta;
    out.steps = res.bisection_steps;
    return out;
  }
  out.v = mahalanobis_project_generic(*c.domain, s.pd.a, point);
  return out;
}

RoundRecord begin_record(const LearnerState& s, const Vector& grad, double loss) {
  RoundRecord rec;
  rec.t = s.t + 1;
  rec.x = s.x;
  rec.grad_f = grad;
  rec.grad_g = grad;
  rec.loss = loss;
  return rec;
}

void finish(LearnerState& s, RoundRecord& rec) {
  s.t = rec.t;
  rec.y_norm = s.y.norm();
  if (rec.projected == ProjectionKind::kMahalanobis) {
    ++s.mahalanobis_projections;
    s.bisection_steps += rec.bisection_steps;
  }
  if (s.config.record_trace) s.trace.push_back(rec);
}

void check_dim(const LearnerState& s, const Vector& g) {
  if (g.size() != s.config.d) throw std::invalid_argument("learner step: dimension mismatch");
}

}  // namespace

void validate(const LearnerConfig& c) {
  require(c.d >= 1, "LearnerConfig: d must be >= 1");
  require(c.diameter > 0.0, "LearnerConfig: diameter must be positive");
  require(c.gradient_bound > 0.0, "LearnerConfig: gradient bound must be positive");
  require(c.alpha > 0.0, "LearnerConfig: alpha must be positive");
  require(c.epsilon > 0.0, "LearnerConfig: epsilon must be positive");
  require(c.c_f >= 1.0 && c.c_g >= 1.0, "LearnerConfig: c_f, c_g must be >= 1");
  require(c.domain != nullptr, "LearnerConfig: domain is required");
  if (c.variant != Variant::kOns) require(c.k > 1.0, "LearnerConfig: k must exceed 1");
  require(c.domain->diameter(c.d) <= c.diameter * (1.0 + 1e-12),
          "LearnerConfig: D is smaller than the domain diameter");
  require(c.domain->enclosing_radius(c.d) <= 0.5 * c.diameter * (1.0 + 1e-12),
          "LearnerConfig: domain is not contained in B(D/2)");
}

double gamma_ons(double diameter, double gradient_bound, double alpha) {
  require(diameter > 0.0 && gradient_bound > 0.0 && alpha > 0.0,
          "gamma_ons: inputs must be positive");
  return 0.5 * std::min(1.0 / (diameter * gradient_bound), alpha);
}

double gamma_core(double diameter, double gradient_bound, double alpha, double k) {
  require(diameter > 0.0 && gradient_bound > 0.0 && alpha > 0.0,
          "gamma_core: inputs must be positive");
  require(k > 1.0, "gamma_core: k must exceed 1");
  return 0.5 * std::min(2.0 / ((k + 1.0) * diameter * gradient_bound), alpha);
}

double gamma_prime(double diameter, double gradient_bound, double alpha, double k,
                   double c_f, double c_g) {
  require(diameter > 0.0 && gradient_bound > 0.0 && alpha > 0.0,
          "gamma_prime: inputs must be positive");
  require(k > 1.0, "gamma_prime: k must exceed 1");
  require(c_f >= 1.0 && c_g >= 1.0, "gamma_prime: c_f, c_g must be >= 1");
  const double dg = c_f * c_g * diameter * gradient_bound;
  return 0.5 * std::min({1.0 / dg, 4.0 / ((k + 1.0) * dg), alpha});
}

double gamma_for(const LearnerConfig& c) {
  switch (c.variant) {
    case Variant::kOns: return gamma_ons(c.diameter, c.gradient_bound, c.alpha);
    case Variant::kCore: return gamma_core(c.diameter, c.gradient_bound, c.alpha, c.k);
    case Variant::kFull:
      return gamma_prime(c.diameter, c.gradient_bound, c.alpha, c.k, c.c_f, c.c_g);
  }
  return 0.0;
}

double zeta_schedule(double gamma, double k, double diameter, double gradient_bound,
                     double c_g, double epsilon, std::int64_t t) {
  const double td = double(t);
  const double spread = c_g * c_g * gradient_bound * gradient_bound * td + epsilon;
  const double first = gamma / (2.0 * k * diameter * spread * td * td);
  const double second = (1.0 / td) * std::sqrt(gamma / (2.0 * spread * td));
  return std::min(first, second);
}

LearnerState make_learner(const LearnerConfig& config) {
  validate(config);
  LearnerState s;
  s.config = config;
  s.gamma = gamma_for(config);
  s.pd = pd_pair_init(config.d, config.epsilon);
  s.pd.refresh_every = config.refresh_every;
  s.y = Vector::Zero(config.d);
  s.x = Vector::Zero(config.d);
  return s;
}

RoundRecord ons_step(LearnerState& s, const Vector& grad, double loss) {
  require(s.config.variant == Variant::kOns, "ons_step: learner is not ONS");
  check_dim(s, grad);
  check_gradient_bound(s, grad, s.config.gradient_bound);
  RoundRecord rec = begin_record(s, grad, loss);
  if (rank_one_update(s.pd, grad)) ++s.update_events;

  const Vector x_hat = s.x - (1.0 / s.gamma) * (s.pd.v * grad);
  if (s.config.domain->contains(x_hat, 0.0)) {
    s.x = x_hat;
  } else {
    const LearnerConfig& c = s.config;
    const double zeta = zeta_schedule(s.gamma, 1.0, c.diameter, c.gradient_bound, 1.0,
                                      c.epsilon, rec.t);
    auto p = project_onto_domain(s, x_hat, zeta, rec.t);
    s.x = std::move(p.v);
    rec.projected = ProjectionKind::kMahalanobis;
    rec.zeta_t = p.zeta;
    rec.bisection_steps = p.steps;
  }
  s.y = s.x;
  finish(s, rec);
  return rec;
}

RoundRecord lightons_core_step(LearnerState& s, const Vector& grad, double loss) {
  require(s.config.variant == Variant::kCore, "lightons_core_step: learner is not Core");
  check_dim(s, grad);
  check_gradient_bound(s, grad, s.config.gradient_bound);
  RoundRecord rec = begin_record(s, grad, loss);
  if (rank_one_update(s.pd, grad)) ++s.update_events;

  const LearnerConfig& c = s.config;
  const Vector x_hat = s.x - (1.0 / s.gamma) * (s.pd.v * grad);
  if (x_hat.norm() <= 0.5 * c.k * c.diameter) {
    s.x = x_hat;
  } else {
    const double zeta = zeta_schedule(s.gamma, c.k, c.diameter, c.gradient_bound, 1.0,
                                      c.epsilon, rec.t);
    auto p = project_onto_domain(s, x_hat, zeta, rec.t);
    s.x = std::move(p.v);
    rec.projected = ProjectionKind::kMahalanobis;
    rec.zeta_t = p.zeta;
    rec.bisection_steps = p.steps;
  }
  s.y = s.x;
  finish(s, rec);
  return rec;
}

RoundRecord lightons_step(LearnerState& s, const Vector& grad_f, double loss) {
  require(s.config.variant == Variant::kFull, "lightons_step: learner is not LightONS");
  check_dim(s, grad_f);
  const LearnerConfig& c = s.config;
  check_gradient_bound(s, grad_f, c.gradient_bound);
  RoundRecord rec = begin_record(s, grad_f, loss);

  rec.grad_g = surrogate_gradient(grad_f, s.x, s.y);
  if (rank_one_update(s.pd, rec.grad_g)) ++s.update_events;

  const Vector y_hat = s.y - (1.0 / s.gamma) * (s.pd.v * rec.grad_g);
  if (y_hat.norm() <= 0.5 * c.k * c.diameter) {
    s.y = y_hat;
  } else {
    const double zeta = zeta_schedule(s.gamma, c.k, c.diameter, c.gradient_bound, c.c_g,
                                      c.epsilon, rec.t);
    ProjectionRequest req;
    req.metric = &s.pd.a;
    req.point = y_hat;
    req.radius = 0.5 * c.diameter;
    req.tolerance = zeta;
    req.lambda_lo = c.epsilon;
    req.lambda_hi = c.epsilon + c.c_g * c.c_g * c.gradient_bound * c.gradient_bound * double(rec.t);
    auto res = fast_proj_detailed(req, c.backend);
    s.y = std::move(res.v);
    rec.projected = ProjectionKind::kMahalanobis;
    rec.zeta_t = zeta;
    rec.bisection_steps = res.bisection_steps;
  }
  const Vector x_next = c.domain->project(s.y);
  if (rec.projected == ProjectionKind::kNone && (x_next - s.y).norm() > 0.0) {
    rec.projected = ProjectionKind::kEuclideanOnly;
  }
  s.x = x_next;
  finish(s, rec);
  return rec;
}

RoundRecord learner_step(LearnerState& s, const Vector& grad, double loss) {
  switch (s.config.variant) {
    case Variant::kOns: return ons_step(s, grad, loss);
    case Variant::kCore: return lightons_core_step(s, grad, loss);
    case Variant::kFull: return lightons_step(s, grad, loss);
  }
  throw std::invalid_argument("learner_step: unknown variant");
}

std::int64_t projection_budget(int d, double diameter, double epsilon, double k,
                               double gamma, std::int64_t horizon) {
  require(k > 1.0, "projection_budget: k must exceed 1");
  if (horizon <= 0 || std::isinf(k)) return 0;
  const double n = 2.0 / ((k - 1.0) * diameter * gamma) *
                   std::sqrt(double(d) * double(horizon) / epsilon);
  return static_cast<std::int64_t>(std::floor(n));
}

std::int64_t projection_budget(const LearnerConfig& c, double gamma, std::int64_t horizon) {
  return projection_budget(c.d, c.diameter, c.epsilon, c.k, gamma, horizon);
}

double projection_budget_unscaled(int d, double diameter, double epsilon, double gamma,
                                  std::int64_t horizon) {
  if (horizon <= 0) return 0.0;
  return 2.0 / (diameter * gamma) * std::sqrt(double(d) * double(horizon) / epsilon);
}

double regret_upper_bound(int d, double gamma, double gradient_bound, double epsilon,
                          double diameter, std::int64_t horizon, double c_g) {
  const double g2 = c_g * c_g * gradient_bound * gradient_bound;
  return regret_upper_bound_adaptive(d, gamma, g2 * double(std::max<std::int64_t>(horizon, 0)),
                                     epsilon, diameter);
}

double regret_upper_bound(const LearnerConfig& c, double gamma, std::int64_t horizon) {
  const double c_g = c.variant == Variant::kFull ? c.c_g : 1.0;
  return regret_upper_bound(c.d, gamma, c.gradient_bound, c.epsilon, c.diameter, horizon, c_g);
}

double regret_upper_bound_adaptive(int d, double gamma, double sum_sq_grad, double epsilon,
                                   double diameter) {
  return double(d) / (2.0 * gamma) * std::log1p(sum_sq_grad / (double(d) * epsilon)) +
         gamma * epsilon * diameter * diameter / 8.0;
}

}  // namespace lightons
