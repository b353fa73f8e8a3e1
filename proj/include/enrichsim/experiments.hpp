#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "enrichsim/trial.hpp"

namespace enrichsim {

struct LabeledScenario {
  Scenario scenario;
  std::string label;
};

struct ScenarioGrid {
  std::vector<LabeledScenario> items;
  long replications = 1;
  std::vector<SurrogateWeighting> variants{SurrogateWeighting::None};

  void validate() const;
};

/// Aggregated Monte Carlo outputs for one (scenario, variant) cell.
/// Proportion standard errors are sqrt(p(1-p)/N); means carry sample-sd
/// based standard errors.
struct OperatingCharacteristics {
  std::string label;
  std::string variant;
  double phi = 0.0, rho = 0.0;
  long replications = 0;

  double zone_freq[5] = {0, 0, 0, 0, 0};  // Favorable..Futility order
  double power = 0.0, power_se = 0.0;
  double mean_duration = 0.0, duration_se = 0.0;
  double mean_events = 0.0, events_se = 0.0;
  double reject_elementary = 0.0;
  double reject_intersection = 0.0;
};

const char* variant_token(SurrogateWeighting v);
SurrogateWeighting variant_from_token(const std::string& token);

/// Compact per-replication record; aggregation reduces these sequentially
/// so results are identical for any worker count.
struct RepRecord {
  std::uint8_t zone;
  std::uint8_t reject_overall;
  std::uint8_t reject_elementary;
  std::uint8_t reject_intersection;
  float duration;
  std::int32_t events;
};

/// Runs `replications` independent trials of one scenario, replication r on
/// stream block r, across OpenMP workers (threads <= 0: library default).
std::vector<RepRecord> run_scenario(const Scenario& scenario,
                                    const DesignSpec& spec, long replications,
                                    std::uint64_t seed, int threads = 0);

/// Serial reference of run_scenario: same per-replication code, plain loop.
/// Kept for equality testing and benchmarking against the parallel path.
std::vector<RepRecord> run_scenario_serial(const Scenario& scenario,
                                           const DesignSpec& spec,
                                           long replications,
                                           std::uint64_t seed);

OperatingCharacteristics aggregate(const std::vector<RepRecord>& records,
                                   const LabeledScenario& item,
                                   SurrogateWeighting variant);

/// Runs every (scenario, variant) cell of the grid. Variants share the
/// replication streams (common random numbers), so cross-variant deltas
/// are low-variance. Deterministic for fixed seed regardless of threads.
std::vector<OperatingCharacteristics> run_grid(const ScenarioGrid& grid,
                                               const DesignSpec& spec,
                                               std::uint64_t seed,
                                               int threads = 0,
                                               std::ostream* progress = nullptr);

struct VariantDelta {
  std::string label;
  std::string variant;
  double d_power = 0.0;
  double d_events = 0.0;
  double d_duration = 0.0;
};

/// Per-variant operating characteristics plus deltas against the first
/// variant in the grid (conventionally the no-surrogate benchmark).
struct VariantComparison {
  std::vector<OperatingCharacteristics> cells;
  std::vector<VariantDelta> deltas;
};

VariantComparison compare_variants(const ScenarioGrid& grid,
                                   const DesignSpec& spec, std::uint64_t seed,
                                   int threads = 0,
                                   std::ostream* progress = nullptr);

/// Fixed-column CSV (RFC 4180 quoting) and a JSON sidecar carrying the
/// full configuration and its hash.
void write_csv(const std::string& path,
               const std::vector<OperatingCharacteristics>& rows);
void write_json_sidecar(const std::string& path,
                        const std::string& canonical_config,
                        std::uint64_t seed,
                        const std::vector<OperatingCharacteristics>& rows);

/// FNV-1a hash of the canonical config text, for provenance.
std::uint64_t config_hash(const std::string& canonical_config);

/// The Table-2 style alternative grid: sets (a)-(d) crossed with
/// phi in {0.2, 0, -0.2} and rho in {-0.3, -0.6, -0.9}; 36 scenarios.
std::vector<LabeledScenario> alternative_grid();

/// Global-null scenario (hazard ratios 1, risk differences 0) at the
/// given correlation.
Scenario null_scenario(double rho);

}  // namespace enrichsim
