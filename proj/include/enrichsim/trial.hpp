#pragma once

#include <cstdint>
#include <vector>

#include "enrichsim/decision.hpp"
#include "enrichsim/inference.hpp"
#include "enrichsim/rng.hpp"

namespace enrichsim {

/// Data-generating truth for one simulated scenario. Hazard ratios are
/// treatment/control for exponential event times; surrogate responses are
/// binary with control rate p_c and risk difference theta per population.
/// rho is the correlation between the predicted statistic and the surrogate
/// effect (negative in the log-rank convention), phi the prediction offset.
struct Scenario {
  double hr_f = 1.0;
  double hr_s = 1.0;
  double control_median = 14.0;  // months
  double p_c_f = 0.2;
  double p_c_s = 0.2;
  double theta_f = 0.0;
  double theta_s = 0.0;
  double phi = 0.0;
  double rho = -0.6;
  double tau = 0.5;  // subgroup prevalence

  void validate() const;

  /// Hazard ratio for the complement of the subgroup, solved so the
  /// population-level log hazard ratio interpolates linearly in tau:
  /// log hr_c = (log hr_f - tau log hr_s) / (1 - tau). Homogeneous
  /// scenarios (hr_f == hr_s) are exact; heterogeneous ones are a
  /// documented mixture convention.
  double hr_complement() const;

  // Complement-subgroup surrogate parameters from the mixture identity.
  double p_c_complement() const;
  double theta_complement() const;
};

/// Which first-stage information count anchors the conditional-power
/// formula (and therefore the final event target = anchor + increment).
enum class CpAnchor {
  PlannedStage1,   // n1 = planned stage-1 events for every population
  ObservedInterim  // n1 = events observed in that population at the interim
};

/// All pre-specified design parameters.
struct DesignSpec {
  double alpha = 0.025;
  double power_target = 0.9;

  long d1_interim = 40;        // full-population events triggering the interim
  long d1_total = 60;          // cohort-1 events closing stage 1
  long d2_planned = 100;       // planned second-stage increment
  long d_total_planned = 160;  // planned total events
  double cap_multiplier = 1.4; // max total = ceil(1.4 * planned total)

  long cohort1_size = 75;
  long cohort2_size = 200;
  double accrual_stage1 = 8.0;   // patients per month
  double accrual_stage2 = 15.0;

  ZoneThresholds thresholds;
  bool futility_enabled = true;
  SurrogateWeighting variant = SurrogateWeighting::None;

  /// Information fraction fed to the surrogate weighting; defaults to
  /// d1_interim / d1_total (maturity of the interim statistic within
  /// stage 1). <= 0 means "use the default".
  double t_interim = 0.0;

  CpAnchor cp_anchor = CpAnchor::PlannedStage1;

  double surrogate_noise_sd = 0.0;  // sd of the observed risk difference
  bool poisson_accrual = false;     // default: deterministic 1/rate spacing
  bool dilute_enrichment_accrual = false;  // screen-outs consume accrual time

  void validate() const;
  double effective_t() const;
  long cap_total() const;
};

/// One enrolled cohort: survival rows plus each subject's binary
/// surrogate response.
struct SimCohort {
  std::vector<Subject> subjects;
  std::vector<std::uint8_t> surrogate;
};

/// Generates a cohort with deterministic (or Poisson) enrollment spacing,
/// Bernoulli(tau) subgroup membership, alternating 1:1 randomization within
/// subgroup, exponential event times, and binary surrogate responses.
/// subgroup_only restricts enrollment to subgroup members (screen-outs do
/// not consume calendar time unless the design says so).
SimCohort generate_cohort(RngStream& rng, long size, double accrual_rate,
                          const Scenario& scenario, bool subgroup_only,
                          double start_month, const DesignSpec& spec);

/// Draws the surrogate-predicted log-rank statistic (log-rank convention):
///   N( log(hr_pop) sqrt(m/4) + rho (theta_hat + phi - theta_pop), 1 - rho^2 ).
double draw_predicted_statistic(RngStream& rng, const Scenario& scenario,
                                Population population, long events_at_interim,
                                double theta_hat);

/// Everything observed at (or derived from) the interim look; reported for
/// diagnostics and reused by the correlation checks.
struct InterimReadout {
  double calendar_month = 0.0;
  double z1_f = 0.0, z1_s = 0.0;  // oriented interim statistics
  long m_f = 0, m_s = 0;          // events at the interim cut
  double theta_hat_f = 0.0, theta_hat_s = 0.0;
  double predicted_f = 0.0, predicted_s = 0.0;  // oriented
  bool subgroup_evaluable = true;
};

struct ReplicationOutcome {
  InterimReadout interim;
  InterimDecision decision;
  ClosedTestResult test;
  double duration_months = 0.0;
  long total_events = 0;          // events among all enrolled at the final cut
  bool target_truncated = false;  // event target exceeded enrollable events
  Zone zone() const { return decision.zone; }
};

/// Simulates one complete trial: cohort-1 enrollment, the event-triggered
/// interim with (modified) conditional powers, the zone decision, optional
/// enrichment and event-size re-estimation, second-stage continuation, and
/// the closed final test. Fully deterministic given (seed, replication).
ReplicationOutcome run_replication(std::uint64_t seed, std::uint64_t replication,
                                   const Scenario& scenario,
                                   const DesignSpec& spec);

}  // namespace enrichsim
