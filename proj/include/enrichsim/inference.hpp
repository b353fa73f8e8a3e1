#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "enrichsim/decision.hpp"
#include "enrichsim/power.hpp"

namespace enrichsim {

enum class Arm { Control = 0, Treatment = 1 };

/// One enrolled subject. event_month is the (uncensored) event time measured
/// from enrollment; censoring happens only through analysis cuts.
struct Subject {
  Arm arm;
  bool in_subgroup;
  double enroll_month;  // calendar time of enrollment
  double event_month;   // time from enrollment to event
};

/// Patient-level data plus the calendar analysis cut. Subjects enrolled
/// after the cut are excluded; everyone else is censored at cut - enroll.
struct SurvivalSample {
  std::vector<Subject> subjects;
  double cut_month = 0.0;

  /// Loads one subject per row: arm subgroup enroll_month event_month
  /// (whitespace or comma separated, '#' comments). The analysis cut is
  /// supplied by the caller.
  static SurvivalSample load(const std::string& path, double cut_month);
};

struct LogRankResult {
  double z_oriented;  // negated log-rank: positive favors treatment
  long events;
};

/// Two-sample log-rank statistic for the given population at a calendar
/// cut, Breslow handling for tied event times. Throws if the population
/// has no events at the cut.
LogRankResult logrank_statistic(std::span<const Subject> subjects,
                                Population population, double cut_month);

inline LogRankResult logrank_statistic(const SurvivalSample& sample,
                                       Population population) {
  return logrank_statistic(sample.subjects, population, sample.cut_month);
}

/// Second-stage increment statistic from cumulative statistics:
///   (z_cum * sqrt(d2) - z1 * sqrt(d1)) / sqrt(d2 - d1),
/// standard normal and independent of z1 under the null.
double increment_statistic(double z_cum, double z1, double d1, double d2);

/// Fixed-weight two-stage combination (Cui–Hung–Wang): w1 z1 + w2 z2_incr
/// with w1 = sqrt(n1/n2), w2 = sqrt((n2-n1)/n2) from the PLANNED counts,
/// never from any re-estimated size. w1^2 + w2^2 = 1.
double chw_combine(double z1, double z2_incr, const StageCounts& planned);

/// Equal-weight Hochberg statistic for the intersection hypothesis: with
/// one-sided p-values p = 1 - Phi(z), p_int = min(2 min(pF,pS), max(pF,pS))
/// mapped back through Phi^{-1}(1 - p_int). p-values are clamped to
/// [1e-16, 1-1e-16] before the inverse transform.
double hochberg_intersection(double z_f, double z_s);

/// Stagewise oriented statistics and event counts. z2_* are cumulative
/// (not incremental); z2_f is absent if and only if enrichment restricted
/// stage 2 to the subgroup.
struct StageStatistics {
  double z1_s = 0.0, z1_f = 0.0;
  double z2_s = 0.0;
  std::optional<double> z2_f;
  long d1_s = 0, d1_f = 0;
  long d2_s = 0;
  std::optional<long> d2_f;
};

struct ClosedTestResult {
  double z_chw_elementary = 0.0;
  double z_chw_intersection = 0.0;
  bool reject_elementary = false;
  bool reject_intersection = false;
  bool reject_overall = false;
  SelectedPopulation tested = SelectedPopulation::None;
};

/// Closed testing of the selected elementary hypothesis and the
/// intersection hypothesis with stagewise combination statistics. After
/// enrichment the stage-2 intersection component is the subgroup increment
/// (the full-population stage-2 statistic is not estimable). Futility
/// decisions test nothing and return all-false.
ClosedTestResult closed_test(const StageStatistics& stats,
                             const InterimDecision& decision,
                             const StageCounts& planned, double alpha);

}  // namespace enrichsim
