// Command-line experiment runner.
//
//   lightons_cli --algorithm lightons --task linear --d 10 --T 10000 --runs 5 \
//       --seed 7 --out results/
//
// Exit status: 0 on success, 2 if any bound/budget audit failed, 1 on a
// configuration or I/O error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lightons/harness.h"

namespace {

void print_table(const lightons::ExperimentConfig& config,
                 const std::vector<lightons::RunResult>& results) {
  std::printf("%s / %s, d=%d, T=%lld\n", lightons::to_string(config.algorithm),
              lightons::to_string(config.task), config.d,
              static_cast<long long>(config.horizon));
  std::printf("%4s %12s %12s %8s %8s %10s %8s %9s %6s\n", "run", "regret", "bound", "proj",
              "budget", "max|y|", "clip%", "wall[s]", "audit");
  for (const auto& r : results) {
    const auto& s = r.summary;
    std::printf("%4d %12.6f %12.6f %8lld %8lld %10.6f %8.4f %9.3f %6s\n", s.run, s.final_regret,
                s.regret_bound, static_cast<long long>(s.mahalanobis_projections),
                static_cast<long long>(s.projection_budget), s.max_y_norm, 100.0 * s.clip_rate,
                s.wall_seconds, s.audits_ok() ? "ok" : "FAIL");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online Newton step experiments with lazy Mahalanobis projections"};
  lightons::ExperimentConfig config;
  std::string algorithm = "lightons";
  std::string task = "linear";
  std::string epsilon = "auto";
  std::string backend = "tridiagonal";
  double alpha = 0.0;
  double feature_scale = 0.0;
  bool summary_table = false;

  app.add_option("--algorithm", algorithm, "ons | lightons | lightons-core | lightons-sketch")
      ->check(CLI::IsMember({"ons", "lightons", "lightons-core", "lightons-sketch"}));
  app.add_option("--task", task, "linear | logistic")
      ->check(CLI::IsMember({"linear", "logistic"}));
  app.add_option("--d", config.d, "Dimension");
  app.add_option("--T", config.horizon, "Number of rounds");
  app.add_option("--runs", config.runs, "Independent runs");
  app.add_option("--seed", config.seed, "Base seed");
  app.add_option("--epsilon", epsilon, "Preconditioner coefficient, or 'auto' for d log T");
  app.add_option("--k", config.k, "Hysteresis coefficient");
  app.add_option("--d-prime", config.d_prime, "Sketch size (lightons-sketch)");
  app.add_option("--radius", config.radius, "Radius of the decision ball");
  app.add_option("--gradient-bound", config.gradient_bound, "Gradient norm bound G");
  auto* alpha_opt = app.add_option("--alpha", alpha, "Exp-concavity parameter");
  auto* scale_opt = app.add_option("--feature-scale", feature_scale, "Sample scale override");
  app.add_option("--backend", backend, "FastProj backend: dense | tridiagonal")
      ->check(CLI::IsMember({"dense", "tridiagonal"}));
  app.add_option("--out", config.out_dir, "Output directory");
  app.add_flag("--emit-per-round", config.emit_per_round, "Write trace_run{i}.csv files");
  app.add_flag("--summary-table", summary_table, "Print a comparison table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    config.algorithm = lightons::parse_algorithm(algorithm);
    config.task = lightons::parse_task(task);
    config.backend = backend == "dense" ? lightons::ProjectionBackend::kDense
                                        : lightons::ProjectionBackend::kTridiagonal;
    if (epsilon != "auto") {
      std::size_t used = 0;
      config.epsilon = std::stod(epsilon, &used);
      if (used != epsilon.size()) throw std::invalid_argument("bad --epsilon: " + epsilon);
    }
    if (alpha_opt->count()) config.alpha = alpha;
    if (scale_opt->count()) config.feature_scale = feature_scale;

    const auto results = lightons::run_experiment(config);
    if (summary_table) print_table(config, results);
    bool ok = true;
    for (const auto& r : results) {
      if (!r.summary.audits_ok()) {
        ok = false;
        std::cerr << "audit failure in run " << r.summary.run << ": regret "
                  << r.summary.final_regret << " (bound " << r.summary.regret_bound
                  << "), projections " << r.summary.mahalanobis_projections << " (budget "
                  << r.summary.projection_budget << ")\n";
      }
      if (r.summary.exceeds_unscaled_budget) {
        std::cerr << "note: run " << r.summary.run
                  << " exceeds the projection count without the (k-1) factor\n";
      }
    }
    return ok ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
