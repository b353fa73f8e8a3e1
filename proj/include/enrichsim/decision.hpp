#pragma once

#include <functional>
#include <string>

#include "enrichsim/power.hpp"

namespace enrichsim {

enum class Zone { Favorable, Promising, Enrichment, Unfavorable, Futility };

const char* zone_name(Zone z);

/// Conditional-power cutoffs driving the interim decision.
struct ZoneThresholds {
  double favorable = 0.9;    // cp_F >= favorable           -> Favorable
  double delta_f = 0.4;      // favorable > cp_F >= delta_f -> Promising
  double delta_s = 0.5;      // cp_F < delta_f, cp_S >= delta_s -> Enrichment
  double futility_f = 0.05;  // cp_F < futility_f and
  double futility_s = 0.05;  // cp_S < futility_s           -> Futility

  void validate() const;
};

/// Maps the pair of conditional powers to a zone. The five zones
/// partition [0,1]^2; ties use >= on the lower edge of each zone and
/// Futility is resolved before Unfavorable.
Zone classify_zone(double cp_f, double cp_s, const ZoneThresholds& th);

struct SsrResult {
  long events;         // chosen second-stage increment
  bool at_cap = false;
  bool non_monotone = false;  // cp decreased from planned to cap while short of target
};

/// Smallest integer increment in [planned_incr, cap_incr] whose conditional
/// power reaches the target; planned if already met, cap if unattainable.
/// Bisection on the integer grid (cp_fn must be nondecreasing).
SsrResult reestimate_events(const std::function<double(long)>& cp_fn,
                            long planned_incr, long cap_incr, double target);

/// Everything decide() needs about one population at the interim.
struct CpInputs {
  double z1 = 0.0;         // oriented interim statistic
  double predicted = 0.0;  // oriented surrogate-predicted statistic
  StageCounts counts{1.0, 2.0};
  long planned_incr = 1;
  long cap_incr = 1;
  InfoFraction info{1.0, {}};
  bool evaluable = true;  // false when the population had no events yet
};

struct InterimSnapshot {
  CpInputs full;
  CpInputs subgroup;
};

struct DecisionConfig {
  SurrogateWeighting variant = SurrogateWeighting::None;
  double alpha = 0.025;
  double power_target = 0.9;  // 1 - beta, the SSR target
  ZoneThresholds thresholds;
  bool futility_enabled = true;
};

enum class SelectedPopulation { Full, Subgroup, None };

struct InterimDecision {
  Zone zone = Zone::Unfavorable;
  SelectedPopulation selected = SelectedPopulation::Full;
  long n2_incr_final = 0;  // second-stage event increment; 0 after futility
  double cp_f = 0.0;
  double cp_s = 0.0;
  bool fallback_f = false;  // harmonic weight degenerated, linear blend used
  bool fallback_s = false;
  bool ssr_at_cap = false;
  bool ssr_non_monotone = false;
};

/// Full interim procedure: evaluates the configured (modified) conditional
/// power for both populations, classifies the zone, and re-estimates the
/// second-stage event increment on the full-population curve in the
/// Promising zone or the subgroup curve in the Enrichment zone. Favorable
/// and Unfavorable keep the planned increment; Futility stops the trial.
InterimDecision decide(const InterimSnapshot& snapshot,
                       const DecisionConfig& config);

}  // namespace enrichsim
