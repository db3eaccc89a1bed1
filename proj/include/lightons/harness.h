#ifndef LIGHTONS_HARNESS_H_
#define LIGHTONS_HARNESS_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lightons/learners.h"
#include "lightons/tasks.h"

namespace lightons {

enum class Algorithm { kOns, kLightOns, kLightOnsCore, kLightOnsSketch };

const char* to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& name);

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kLightOns;
  Task task = Task::kLinear;
  int d = 10;
  std::int64_t horizon = 10000;
  int runs = 5;
  std::uint64_t seed = 0;
  std::optional<double> epsilon;  // unset: d * max(1, log T)
  double k = 2.0;
  int d_prime = 2;
  double radius = 1.0;
  double gradient_bound = 0.1;
  std::optional<double> alpha;          // unset: task_alpha
  std::optional<double> feature_scale;  // unset: calibrated default
  ProjectionBackend backend = ProjectionBackend::kTridiagonal;
  std::string out_dir;  // empty: nothing written
  bool emit_per_round = false;
};

// Thrown by validate_config with every violated precondition listed.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::vector<std::string>& problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

std::vector<std::string> config_problems(const ExperimentConfig& config);
void validate_config(const ExperimentConfig& config);

double resolved_epsilon(const ExperimentConfig& config);
double resolved_alpha(const ExperimentConfig& config);
LearnerConfig learner_config(const ExperimentConfig& config);

struct RunSummary {
  int run = 0;
  std::uint64_t seed = 0;  // sub-stream seed of the training stream
  double final_regret = 0.0;
  double regret_bound = 0.0;
  bool regret_audit_ok = true;
  std::int64_t mahalanobis_projections = 0;
  std::int64_t projection_budget = 0;
  bool budget_audit_ok = true;
  bool exceeds_unscaled_budget = false;
  double g_t = 0.0;  // sum of squared gradient norms at the played decisions
  double max_y_norm = 0.0;
  // Cost accounting in place of timings: O(d^2) preconditioner updates,
  // O(d^3)-class projection events and their bisection steps.
  std::int64_t update_events = 0;
  std::int64_t projection_events = 0;
  std::int64_t bisection_steps = 0;
  double clip_rate = 0.0;
  double delta_accum = 0.0;  // sketching error, 0 for dense learners
  std::int64_t gradient_bound_violations = 0;
  bool comparator_converged = true;
  double wall_seconds = 0.0;  // not written to CSV

  bool audits_ok() const { return regret_audit_ok && budget_audit_ok; }
};

struct TraceRow {
  std::int64_t t = 0;
  double regret = 0.0;
  double instantaneous_regret = 0.0;
  double y_norm = 0.0;
  ProjectionKind projected = ProjectionKind::kNone;
  double zeta_t = 0.0;
};

struct RunResult {
  RunSummary summary;
  std::vector<TraceRow> trace;
  std::vector<Vector> decisions;  // x_1..x_T
  Vector comparator;
  double gamma = 0.0;
};

// One run: stream, learner, hindsight comparator, regret series, audits.
RunResult run_single(const ExperimentConfig& config, int run_index);

// Validates, runs every index and writes outputs when out_dir is set.
std::vector<RunResult> run_experiment(const ExperimentConfig& config);

// summary.csv, metadata.json and, when emit_per_round, trace_run{i}.csv.
// Throws std::runtime_error on I/O failure.
void emit_csv(const ExperimentConfig& config, const std::vector<RunResult>& results,
              const std::string& dir);

std::string summary_header();
std::string summary_row(const RunSummary& summary);
std::string format_double(double value);

}  // namespace lightons

#endif  // LIGHTONS_HARNESS_H_
