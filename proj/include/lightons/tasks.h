#ifndef LIGHTONS_TASKS_H_
#define LIGHTONS_TASKS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lightons/domain.h"
#include "lightons/linalg.h"
#include "lightons/rng.h"

namespace lightons {

enum class Task { kLinear, kLogistic };

const char* to_string(Task task);
Task parse_task(const std::string& name);

// One round's data. Logistic samples carry no target (y == 0).
struct LossSample {
  Vector x;
  double y = 0.0;
};

struct LossEval {
  double loss = 0.0;
  Vector grad;
};

// 1/2 (x^T w + y)^2
LossEval linear_loss(const Vector& w, const LossSample& sample);
// log(1 + exp(x^T w)), evaluated without overflow.
LossEval logistic_loss(const Vector& w, const LossSample& sample);
LossEval evaluate_loss(Task task, const Vector& w, const LossSample& sample);
double loss_value(Task task, const Vector& w, const LossSample& sample);

// Regularity promised to the learner: every scaled sample keeps
// ||grad|| <= gradient_bound and alpha-exp-concavity over B(radius).
struct TaskSpec {
  Task task = Task::kLinear;
  double radius = 1.0;
  double gradient_bound = 0.1;
  double alpha = 5.0;
};

// alpha for the reference configuration X = B(1), G = 1/10: 5 for linear,
// e^{-1/5} for logistic. Any other configuration must pass alpha explicitly;
// this throws std::invalid_argument.
double task_alpha(Task task, const ConvexDomain& domain, double gradient_bound);

// Largest factor s such that s * (x, y) satisfies the TaskSpec regularity.
double max_admissible_scale(const TaskSpec& spec, const LossSample& raw);
// sup over w in B(radius) of ||grad||.
double worst_case_gradient(const TaskSpec& spec, const LossSample& sample);

// Vector of |z_i| with z_i standard normal.
Vector folded_normal(Rng& rng, int d);
LossSample raw_sample(Rng& rng, Task task, int d);

struct StreamConfig {
  TaskSpec spec;
  int d = 10;
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;
  double feature_scale = 0.0;  // <= 0 selects calibrate_feature_scale
  int runs = 1;
};

struct Stream {
  std::vector<LossSample> samples;
  double feature_scale = 0.0;
  std::int64_t clipped = 0;

  double clip_rate() const {
    return samples.empty() ? 0.0 : double(clipped) / double(samples.size());
  }
};

// Default sample scale: the 0.05% quantile of max_admissible_scale over
// 20000 draws from a fixed calibration sub-stream, so roughly one sample in
// two thousand is clipped.
double calibrate_feature_scale(const TaskSpec& spec, int d);

// Deterministic in (config, run_index, tag). Each sample is drawn as folded
// Gaussian, multiplied by the feature scale and, if it would still violate
// the TaskSpec, shrunk to its admissible scale (counted as clipped).
Stream sample_stream(const StreamConfig& config, std::uint64_t run_index,
                     StreamTag tag = StreamTag::kTrain);
Stream sample_stream(const StreamConfig& config, std::uint64_t run_index, StreamTag tag,
                     std::int64_t count);

struct ComparatorResult {
  Vector u;
  double objective = 0.0;  // average loss at u
  int iterations = 0;
  bool converged = false;
};

// argmin over the domain of the average loss, by accelerated projected
// gradient descent until the gradient-mapping norm drops below tol.
ComparatorResult offline_best_comparator(Task task, const std::vector<LossSample>& samples,
                                         const ConvexDomain& domain, int max_iterations = 200000,
                                         double tol = 1e-8);

double average_loss(Task task, const std::vector<LossSample>& samples, const Vector& w);

struct SxoResult {
  Vector x_bar;
  double excess_risk = 0.0;
  double risk_at_average = 0.0;
  double risk_at_optimum = 0.0;
  std::int64_t horizon = 0;
  double delta = 0.05;
};

Vector average_iterate(const std::vector<Vector>& decisions);

// Averages the online decisions and measures empirical excess risk on the
// held-out sample against its own empirical minimizer.
SxoResult online_to_batch(const std::vector<Vector>& decisions, Task task,
                          const std::vector<LossSample>& held_out, const ConvexDomain& domain,
                          double delta = 0.05);

// (Reg + 4 sqrt(Reg log(4 log T / delta) / (2 gamma)) + (8/gamma) log(4 log T / delta)) / T
double sxo_excess_risk_bound(double regret, std::int64_t horizon, double gamma, double delta);

}  // namespace lightons

#endif  // LIGHTONS_TASKS_H_
