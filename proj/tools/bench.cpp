// Compares the OpenMP replication loop against the serial reference on one
// scenario and checks they aggregate to identical results.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "enrichsim/experiments.hpp"

using namespace enrichsim;

namespace {

double seconds(std::chrono::steady_clock::time_point a,
               std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

}  // namespace

int main(int argc, char** argv) {
  long reps = 20000;
  std::uint64_t seed = 19937;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--reps") == 0 && i + 1 < argc)
      reps = std::stol(argv[++i]);
    else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc)
      seed = std::stoull(argv[++i]);
    else {
      std::printf("usage: enrichsim_bench [--reps N] [--seed N]\n");
      return 1;
    }
  }

  Scenario scenario;  // homogeneous effect, the densest workload
  scenario.hr_f = 0.6;
  scenario.hr_s = 0.6;
  scenario.theta_f = 0.4;
  scenario.theta_s = 0.4;
  scenario.rho = -0.6;

  DesignSpec spec;
  spec.variant = SurrogateWeighting::LinearBlend;

  const LabeledScenario item{scenario, "bench"};

  const auto t0 = std::chrono::steady_clock::now();
  const auto serial = run_scenario_serial(scenario, spec, reps, seed);
  const auto t1 = std::chrono::steady_clock::now();
  const auto parallel = run_scenario(scenario, spec, reps, seed);
  const auto t2 = std::chrono::steady_clock::now();

  const double ts = seconds(t0, t1), tp = seconds(t1, t2);
  std::printf("replications: %ld   threads: %d\n", reps, omp_get_max_threads());
  std::printf("serial   %8.3f s   %8.0f reps/s\n", ts, reps / ts);
  std::printf("parallel %8.3f s   %8.0f reps/s   speedup %.2fx\n", tp,
              reps / tp, ts / tp);

  const auto a = aggregate(serial, item, spec.variant);
  const auto b = aggregate(parallel, item, spec.variant);
  const bool same = a.power == b.power && a.mean_events == b.mean_events &&
                    a.mean_duration == b.mean_duration;
  for (int z = 0; z < 5 && same; ++z)
    if (a.zone_freq[z] != b.zone_freq[z]) {
      std::printf("zone frequency mismatch\n");
      return 1;
    }
  if (!same) {
    std::printf("MISMATCH between serial and parallel aggregates\n");
    return 1;
  }
  std::printf("serial and parallel aggregates identical (power %.4f)\n",
              a.power);
  return 0;
}
