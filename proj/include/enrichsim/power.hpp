#pragma once

#include <array>
#include <optional>

namespace enrichsim {

// Sign convention, used throughout the library: every test statistic is
// oriented so that LARGER means BETTER treatment effect, and final tests
// reject for statistic > z_{1-alpha}. Raw log-rank statistics (where more
// treatment events push the statistic up) are negated on emission; anything
// printed for users is additionally reported in the log-rank convention.

enum class Population { Full, Subgroup };

/// Linear prediction of an oriented primary-endpoint statistic from an
/// observed surrogate treatment effect: a + b * theta_hat. When the
/// coefficients were fit on raw log-rank statistics (lower = better) set
/// logrank_convention and the prediction is negated into the oriented scale.
struct HistoricalModel {
  double intercept = 0.0;
  double slope = 0.0;
  bool logrank_convention = false;

  double predict_oriented(double theta_hat) const;
};

struct SurrogateReadout {
  double theta_hat;  // risk difference, treatment - control, in [-1, 1]
  Population population = Population::Full;
};

double predict_statistic(const HistoricalModel& model,
                         const SurrogateReadout& surrogate);

/// Planned information for the two stages, in events for event-driven
/// designs. n1 = first-stage events, n2 = cumulative planned total.
struct StageCounts {
  double n1;
  double n2;

  double planned_increment() const { return n2 - n1; }
  void validate() const;
};

/// Information fraction of the interim statistic, plus (only for the
/// survival-weighted variant) the control survival CDF evaluated at the
/// interim follow-up time.
struct InfoFraction {
  double t;
  std::optional<double> fc_t;
};

/// Probability of rejecting at the final analysis given the interim
/// statistic z1 and an actual second-stage increment of n2_incr_actual
/// information units:
///   1 - Phi( (z_{1-alpha} sqrt(n2) - z1 sqrt(n1)) / sqrt(incr)
///            - z1 sqrt(incr / n1) )
/// Strictly increasing in z1; for z1 > 0 and incr >= n1 strictly
/// increasing in the increment.
double conditional_power(double z1, const StageCounts& counts, double alpha,
                         double n2_incr_actual);

/// How the surrogate prediction is blended into the conditional-power
/// drift term. Config/CLI token in parentheses.
enum class SurrogateWeighting {
  None,              // (none) plain conditional power, prediction ignored
  LinearBlend,       // (W1)   g = z1*t + f*(1-t)
  HarmonicInfo,      // (W2)   g = z1*f / (z1*(1-t) + f*t)
  HarmonicSurvival,  // (W3)   g = z1*f / (z1*(1-Fc) + f*Fc)
};

struct McpValue {
  double value;
  // The harmonic weights are undefined when z1 and the prediction have
  // opposite signs, either is zero, or the denominator vanishes; those
  // evaluations fall back to the linear blend and are flagged here.
  bool fallback = false;
};

/// Modified conditional power: the drift term z1*sqrt(incr/n1) of the plain
/// formula is replaced by sqrt(incr/n1) * g with g the chosen blend of the
/// observed statistic and the predicted statistic. The critical-value term
/// is unchanged. With predicted == z1 every variant equals plain
/// conditional power.
McpValue modified_cp(SurrogateWeighting variant, double z1, double predicted,
                     const InfoFraction& info, const StageCounts& counts,
                     double alpha, double n2_incr_actual);

/// Schoenfeld event count for a one-sided log-rank test of hr_alt against
/// hr_margin (margin 1 = superiority):
///   D = (1+r)^2/r * (z_{1-alpha} + z_power)^2 / ln(hr_alt/hr_margin)^2,
/// rounded up. r is the treatment:control allocation ratio.
long required_events(double hr_alt, double alpha, double power,
                     double allocation = 1.0, double hr_margin = 1.0);

/// Vaccine efficacy in percent: 100 * (1 - hr), and its inverse.
double ve_from_hr(double hr);
double hr_from_ve(double ve_percent);

/// Cumulative per-arm information counts for the full population at each
/// stage; subgroup counts are tau * n_kj.
struct StageArmCounts {
  double n01, n11;  // stage-1 control / treatment
  double n02, n12;  // stage-2 cumulative control / treatment
};

struct PopulationVariances {
  double s0_sub = 1.0, s1_sub = 1.0;    // control / treatment, subgroup
  double s0_full = 1.0, s1_full = 1.0;  // control / treatment, full
};

/// Correlation matrix of (Z1_S, Z1_F, Z2_S, Z2_F) under the independent
/// increment assumption: within-population cross-stage correlation is
/// sqrt(n1/n2) and cross-population entries follow the pooled-variance
/// covariance identities. Symmetric, unit diagonal, positive semidefinite.
std::array<std::array<double, 4>, 4> theoretical_stage_covariance(
    const StageArmCounts& counts, double tau, const PopulationVariances& var);

}  // namespace enrichsim
