#include "lightons/tasks.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace lightons {

namespace {

constexpr int kCalibrationDraws = 20000;
constexpr double kCalibrationQuantile = 5e-4;

// log(1 + e^z) without overflow.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_spec(const TaskSpec& spec) {
  if (!(spec.radius > 0.0) || !(spec.gradient_bound > 0.0) || !(spec.alpha > 0.0)) {
    throw std::invalid_argument("TaskSpec: radius, gradient bound and alpha must be positive");
  }
  if (spec.task == Task::kLogistic && spec.alpha >= 1.0) {
    throw std::invalid_argument("TaskSpec: logistic loss is never alpha-exp-concave for alpha >= 1");
  }
}

}  // namespace

const char* to_string(Task task) {
  return task == Task::kLinear ? "linear" : "logistic";
}

Task parse_task(const std::string& name) {
  if (name == "linear") return Task::kLinear;
  if (name == "logistic") return Task::kLogistic;
  throw std::invalid_argument("unknown task '" + name + "' (expected linear or logistic)");
}

LossEval linear_loss(const Vector& w, const LossSample& sample) {
  const double z = sample.x.dot(w) + sample.y;
  return {0.5 * z * z, z * sample.x};
}

LossEval logistic_loss(const Vector& w, const LossSample& sample) {
  const double z = sample.x.dot(w);
  return {softplus(z), sigmoid(z) * sample.x};
}

LossEval evaluate_loss(Task task, const Vector& w, const LossSample& sample) {
  if (w.size() != sample.x.size()) throw std::invalid_argument("evaluate_loss: dimension mismatch");
  return task == Task::kLinear ? linear_loss(w, sample) : logistic_loss(w, sample);
}

double loss_value(Task task, const Vector& w, const LossSample& sample) {
  const double z = sample.x.dot(w);
  if (task == Task::kLinear) {
    const double r = z + sample.y;
    return 0.5 * r * r;
  }
  return softplus(z);
}

double task_alpha(Task task, const ConvexDomain& domain, double gradient_bound) {
  const auto r = domain.ball_radius();
  if (r && std::abs(*r - 1.0) < 1e-12 && std::abs(gradient_bound - 0.1) < 1e-12) {
    return task == Task::kLinear ? 5.0 : std::exp(-0.2);
  }
  throw std::invalid_argument(
      "task_alpha: default alpha is only defined for the unit ball with G = 0.1; "
      "pass alpha explicitly");
}

double max_admissible_scale(const TaskSpec& spec, const LossSample& raw) {
  check_spec(spec);
  const double nx = raw.x.norm();
  const double inf = std::numeric_limits<double>::infinity();
  if (spec.task == Task::kLinear) {
    const double ny = std::abs(raw.y);
    const double m = spec.radius * nx + ny;
    if (m == 0.0) return inf;
    double s = 1.0 / (m * std::sqrt(spec.alpha));
    if (nx > 0.0) s = std::min(s, std::sqrt(spec.gradient_bound / (m * nx)));
    return s;
  }
  if (nx == 0.0) return inf;
  // exp(-alpha l) is concave iff alpha <= e^{-z}, z = x^T w <= s R ||x||.
  const double s_concave = -std::log(spec.alpha) / (spec.radius * nx);
  // sigma(s R nx) s nx is increasing in s; solve for = G.
  auto h = [&](double s) { return sigmoid(s * spec.radius * nx) * s * nx; };
  double lo = 0.0;
  double hi = spec.gradient_bound / nx * 2.0 + 1.0 / nx;
  while (h(hi) < spec.gradient_bound) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-16 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) <= spec.gradient_bound) lo = mid; else hi = mid;
  }
  return std::min(s_concave, lo);
}

double worst_case_gradient(const TaskSpec& spec, const LossSample& sample) {
  const double nx = sample.x.norm();
  if (spec.task == Task::kLinear) return (spec.radius * nx + std::abs(sample.y)) * nx;
  return sigmoid(spec.radius * nx) * nx;
}

Vector folded_normal(Rng& rng, int d) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = std::abs(rng.normal());
  return v;
}

LossSample raw_sample(Rng& rng, Task task, int d) {
  LossSample s;
  s.x = folded_normal(rng, d);
  if (task == Task::kLinear) s.y = std::abs(rng.normal());
  return s;
}

double calibrate_feature_scale(const TaskSpec& spec, int d) {
  if (d < 1) throw std::invalid_argument("calibrate_feature_scale: d must be >= 1");
  check_spec(spec);
  Rng rng(substream_seed(0, static_cast<std::uint64_t>(d), StreamTag::kCalibration));
  std::vector<double> scales(kCalibrationDraws);
  for (auto& s : scales) s = max_admissible_scale(spec, raw_sample(rng, spec.task, d));
  const auto k = static_cast<std::size_t>(kCalibrationQuantile * kCalibrationDraws);
  std::nth_element(scales.begin(), scales.begin() + k, scales.end());
  return scales[k];
}

Stream sample_stream(const StreamConfig& config, std::uint64_t run_index, StreamTag tag) {
  return sample_stream(config, run_index, tag, config.horizon);
}

Stream sample_stream(const StreamConfig& config, std::uint64_t run_index, StreamTag tag,
                     std::int64_t count) {
  if (config.d < 1) throw std::invalid_argument("sample_stream: d must be >= 1");
  if (count < 0) throw std::invalid_argument("sample_stream: negative sample count");
  check_spec(config.spec);
  Stream out;
  out.feature_scale = config.feature_scale > 0.0
                          ? config.feature_scale
                          : calibrate_feature_scale(config.spec, config.d);
  out.samples.reserve(static_cast<std::size_t>(count));
  Rng rng(substream_seed(config.seed, run_index, tag));
  for (std::int64_t t = 0; t < count; ++t) {
    LossSample raw = raw_sample(rng, config.spec.task, config.d);
    double s = out.feature_scale;
    const double cap = max_admissible_scale(config.spec, raw);
    if (s > cap) {
      s = cap;
      ++out.clipped;
    }
    raw.x *= s;
    raw.y *= s;
    out.samples.push_back(std::move(raw));
  }
  return out;
}

double average_loss(Task task, const std::vector<LossSample>& samples, const Vector& w) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& s : samples) acc += loss_value(task, w, s);
  return acc / double(samples.size());
}

ComparatorResult offline_best_comparator(Task task, const std::vector<LossSample>& samples,
                                         const ConvexDomain& domain, int max_iterations,
                                         double tol) {
  if (samples.empty()) throw std::invalid_argument("offline_best_comparator: no samples");
  const int d = static_cast<int>(samples.front().x.size());
  const double n = double(samples.size());

  // Second-moment matrix; exact Hessian of the linear loss.
  Matrix h = Matrix::Zero(d, d);
  Vector b = Vector::Zero(d);
  for (const auto& s : samples) {
    h.selfadjointView<Eigen::Lower>().rankUpdate(s.x, 1.0 / n);
    b += (s.y / n) * s.x;
  }
  h = h.selfadjointView<Eigen::Lower>();
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  double lipschitz = es.eigenvalues().maxCoeff();
  if (task == Task::kLogistic) lipschitz *= 0.25;
  lipschitz = std::max(lipschitz, 1e-300);

  auto gradient = [&](const Vector& w) -> Vector {
    if (task == Task::kLinear) return h * w + b;
    Vector g = Vector::Zero(d);
    for (const auto& s : samples) g += sigmoid(s.x.dot(w)) * s.x;
    return g / n;
  };
  auto objective = [&](const Vector& w) { return average_loss(task, samples, w); };

  ComparatorResult res;
  Vector w = Vector::Zero(d);
  Vector z = w;
  double theta = 1.0;
  double f_prev = objective(w);
  for (int it = 1; it <= max_iterations; ++it) {
    const Vector gz = gradient(z);
    const Vector w_next = domain.project(z - gz / lipschitz);
    const double f_next = objective(w_next);
    res.iterations = it;
    // Gradient-mapping norm at z.
    if (lipschitz * (z - w_next).norm() <= tol) {
      w = w_next;
      res.converged = true;
      break;
    }
    if (f_next > f_prev) {
      // Restart momentum.
      theta = 1.0;
      z = w;
      continue;
    }
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    z = w_next + ((theta - 1.0) / theta_next) * (w_next - w);
    w = w_next;
    theta = theta_next;
    f_prev = f_next;
  }
  res.u = w;
  res.objective = objective(w);
  return res;
}

Vector average_iterate(const std::vector<Vector>& decisions) {
  if (decisions.empty()) throw std::invalid_argument("average_iterate: no decisions");
  Vector acc = Vector::Zero(decisions.front().size());
  for (const auto& x : decisions) acc += x;
  return acc / double(decisions.size());
}

SxoResult online_to_batch(const std::vector<Vector>& decisions, Task task,
                          const std::vector<LossSample>& held_out, const ConvexDomain& domain,
                          double delta) {
  SxoResult r;
  r.x_bar = average_iterate(decisions);
  r.horizon = static_cast<std::int64_t>(decisions.size());
  r.delta = delta;
  r.risk_at_average = average_loss(task, held_out, r.x_bar);
  const auto best = offline_best_comparator(task, held_out, domain);
  r.risk_at_optimum = best.objective;
  r.excess_risk = r.risk_at_average - r.risk_at_optimum;
  return r;
}

double sxo_excess_risk_bound(double regret, std::int64_t horizon, double gamma, double delta) {
  if (horizon < 2) return std::numeric_limits<double>::infinity();
  const double reg = std::max(0.0, regret);
  const double l = std::log(4.0 * std::log(double(horizon)) / delta);
  return (reg + 4.0 * std::sqrt(reg * l / (2.0 * gamma)) + 8.0 / gamma * l) / double(horizon);
}

}  // namespace lightons
