#include "enrichsim/trial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace enrichsim {

void Scenario::validate() const {
  if (!(hr_f > 0.0 && hr_s > 0.0))
    throw std::domain_error("Scenario: hazard ratios must be > 0");
  if (!(control_median > 0.0))
    throw std::domain_error("Scenario: control median must be > 0");
  if (!(tau > 0.0 && tau < 1.0))
    throw std::domain_error("Scenario: tau must be in (0,1)");
  if (!(rho > -1.0 && rho < 1.0))
    throw std::domain_error("Scenario: |rho| must be < 1");
  for (double p : {p_c_f, p_c_s})
    if (!(p >= 0.0 && p <= 1.0))
      throw std::domain_error("Scenario: response rates must be in [0,1]");
  for (double th : {theta_f, theta_s})
    if (!(th >= -1.0 && th <= 1.0))
      throw std::domain_error("Scenario: risk differences must be in [-1,1]");
}

double Scenario::hr_complement() const {
  return std::exp((std::log(hr_f) - tau * std::log(hr_s)) / (1.0 - tau));
}

double Scenario::p_c_complement() const {
  return (p_c_f - tau * p_c_s) / (1.0 - tau);
}

double Scenario::theta_complement() const {
  return (theta_f - tau * theta_s) / (1.0 - tau);
}

void DesignSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::domain_error("DesignSpec: alpha must be in (0, 0.5)");
  if (!(power_target > 0.5 && power_target < 1.0))
    throw std::domain_error("DesignSpec: power target must be in (0.5, 1)");
  if (!(d1_interim >= 1 && d1_interim <= d1_total && d1_total < d_total_planned))
    throw std::domain_error("DesignSpec: need d1_interim <= d1_total < d_total_planned");
  if (d1_total + d2_planned != d_total_planned)
    throw std::domain_error("DesignSpec: d1_total + d2_planned must equal d_total_planned");
  if (!(cap_multiplier >= 1.0))
    throw std::domain_error("DesignSpec: cap multiplier must be >= 1");
  if (!(cohort1_size >= d1_total))
    throw std::domain_error("DesignSpec: cohort 1 must be able to produce the stage-1 events");
  if (!(cohort2_size >= 1))
    throw std::domain_error("DesignSpec: cohort 2 must be nonempty");
  if (!(accrual_stage1 > 0.0 && accrual_stage2 > 0.0))
    throw std::domain_error("DesignSpec: accrual rates must be > 0");
  if (!(surrogate_noise_sd >= 0.0))
    throw std::domain_error("DesignSpec: noise sd must be >= 0");
  thresholds.validate();
}

double DesignSpec::effective_t() const {
  if (t_interim > 0.0) return t_interim;
  return static_cast<double>(d1_interim) / static_cast<double>(d1_total);
}

long DesignSpec::cap_total() const {
  return static_cast<long>(
      std::ceil(cap_multiplier * static_cast<double>(d_total_planned)));
}

SimCohort generate_cohort(RngStream& rng, long size, double accrual_rate,
                          const Scenario& scenario, bool subgroup_only,
                          double start_month, const DesignSpec& spec) {
  if (size < 1) throw std::domain_error("generate_cohort: size must be >= 1");
  if (!(accrual_rate > 0.0))
    throw std::domain_error("generate_cohort: accrual rate must be > 0");
  scenario.validate();

  const double control_rate = std::log(2.0) / scenario.control_median;
  const double hr_c = scenario.hr_complement();
  const double p_c_c = scenario.p_c_complement();
  const double theta_c = scenario.theta_complement();
  const double spacing = 1.0 / accrual_rate;

  SimCohort cohort;
  cohort.subjects.reserve(size);
  cohort.surrogate.reserve(size);

  double clock = start_month;
  long arm_count[2] = {0, 0};  // per subgroup cell, keeps allocation 1:1
  for (long i = 0; i < size; ++i) {
    if (i > 0)
      clock += spec.poisson_accrual ? rng.exponential(accrual_rate) : spacing;

    bool in_subgroup = rng.bernoulli(scenario.tau) == 1;
    while (subgroup_only && !in_subgroup) {
      // Screened-out candidate; consumes accrual time only when the design
      // models enrichment as diluting the accrual rate.
      if (spec.dilute_enrichment_accrual)
        clock += spec.poisson_accrual ? rng.exponential(accrual_rate) : spacing;
      in_subgroup = rng.bernoulli(scenario.tau) == 1;
    }

    const int cell = in_subgroup ? 1 : 0;
    const Arm arm =
        (arm_count[cell]++ % 2 == 0) ? Arm::Treatment : Arm::Control;

    const double hr = in_subgroup ? scenario.hr_s : hr_c;
    const double rate =
        arm == Arm::Treatment ? control_rate * hr : control_rate;
    const double event_month = rng.exponential(rate);

    const double p_control = in_subgroup ? scenario.p_c_s : p_c_c;
    const double theta = in_subgroup ? scenario.theta_s : theta_c;
    const double p_resp = std::clamp(
        p_control + (arm == Arm::Treatment ? theta : 0.0), 0.0, 1.0);

    cohort.subjects.push_back({arm, in_subgroup, clock, event_month});
    cohort.surrogate.push_back(
        static_cast<std::uint8_t>(rng.bernoulli(p_resp)));
  }
  return cohort;
}

double draw_predicted_statistic(RngStream& rng, const Scenario& scenario,
                                Population population, long events_at_interim,
                                double theta_hat) {
  if (events_at_interim < 0)
    throw std::domain_error("draw_predicted_statistic: negative event count");
  const double hr =
      population == Population::Full ? scenario.hr_f : scenario.hr_s;
  const double theta =
      population == Population::Full ? scenario.theta_f : scenario.theta_s;
  const double mean =
      std::log(hr) * std::sqrt(static_cast<double>(events_at_interim) / 4.0) +
      scenario.rho * (theta_hat + scenario.phi - theta);
  const double sd = std::sqrt(1.0 - scenario.rho * scenario.rho);
  return rng.normal(mean, sd);
}

namespace {

// Calendar time of the k-th event in the population (every subject events
// eventually under the exponential laws, so only k matters).
double kth_event_time(std::span<const Subject> subjects, Population pop,
                      long k, std::vector<double>& scratch) {
  scratch.clear();
  for (const Subject& s : subjects)
    if (pop == Population::Full || s.in_subgroup)
      scratch.push_back(s.enroll_month + s.event_month);
  if (k < 1 || static_cast<std::size_t>(k) > scratch.size())
    throw std::runtime_error(
        "kth_event_time: event target beyond enrollable events");
  std::nth_element(scratch.begin(), scratch.begin() + (k - 1), scratch.end());
  return scratch[k - 1];
}

long events_at(std::span<const Subject> subjects, Population pop, double cut) {
  long n = 0;
  for (const Subject& s : subjects)
    if ((pop == Population::Full || s.in_subgroup) && s.enroll_month <= cut &&
        s.enroll_month + s.event_month <= cut)
      ++n;
  return n;
}

long population_size(std::span<const Subject> subjects, Population pop) {
  if (pop == Population::Full) return static_cast<long>(subjects.size());
  long n = 0;
  for (const Subject& s : subjects)
    if (s.in_subgroup) ++n;
  return n;
}

double mean_control_follow_up(std::span<const Subject> subjects,
                              Population pop, double cut) {
  double sum = 0.0;
  long n = 0;
  for (const Subject& s : subjects) {
    if (s.arm != Arm::Control) continue;
    if (pop == Population::Subgroup && !s.in_subgroup) continue;
    if (s.enroll_month > cut) continue;
    sum += cut - s.enroll_month;
    ++n;
  }
  return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

struct CpSetup {
  StageCounts counts;
  long planned_incr;
  long cap_incr;
  long anchor;  // final event target = anchor + chosen increment
};

CpSetup cp_setup(const DesignSpec& spec, long observed_events) {
  if (spec.cp_anchor == CpAnchor::PlannedStage1) {
    return {StageCounts{static_cast<double>(spec.d1_total),
                        static_cast<double>(spec.d_total_planned)},
            spec.d2_planned, spec.cap_total() - spec.d1_total, spec.d1_total};
  }
  const long m = std::max<long>(observed_events, 1);
  const long planned = std::max<long>(spec.d_total_planned - m, 1);
  const long cap = std::max<long>(spec.cap_total() - m, planned);
  return {StageCounts{static_cast<double>(m),
                      static_cast<double>(spec.d_total_planned)},
          planned, cap, m};
}

}  // namespace

ReplicationOutcome run_replication(std::uint64_t seed, std::uint64_t replication,
                                   const Scenario& scenario,
                                   const DesignSpec& spec) {
  scenario.validate();
  spec.validate();

  // Dedicated streams per purpose keep every variant of the design on
  // common random numbers and make the surrogate path fully separable.
  const std::uint64_t base = replication * 8;
  RngStream rng_cohort1(seed, base + 0);
  RngStream rng_cohort2(seed, base + 1);
  RngStream rng_noise(seed, base + 2);
  RngStream rng_pred_f(seed, base + 3);
  RngStream rng_pred_s(seed, base + 4);

  const SimCohort cohort1 = generate_cohort(
      rng_cohort1, spec.cohort1_size, spec.accrual_stage1, scenario,
      /*subgroup_only=*/false, 0.0, spec);
  const std::span<const Subject> stage1{cohort1.subjects};

  std::vector<double> scratch;

  // --- Interim look at the d1_interim-th full-population event ---
  const double t_interim_cal =
      kth_event_time(stage1, Population::Full, spec.d1_interim, scratch);

  InterimReadout interim;
  interim.calendar_month = t_interim_cal;
  const LogRankResult lr_f =
      logrank_statistic(stage1, Population::Full, t_interim_cal);
  interim.z1_f = lr_f.z_oriented;
  interim.m_f = lr_f.events;
  try {
    const LogRankResult lr_s =
        logrank_statistic(stage1, Population::Subgroup, t_interim_cal);
    interim.z1_s = lr_s.z_oriented;
    interim.m_s = lr_s.events;
  } catch (const std::runtime_error&) {
    interim.subgroup_evaluable = false;  // no subgroup events yet
  }

  interim.theta_hat_f =
      scenario.theta_f + rng_noise.normal(0.0, spec.surrogate_noise_sd);
  interim.theta_hat_s =
      scenario.theta_s + rng_noise.normal(0.0, spec.surrogate_noise_sd);

  if (spec.variant != SurrogateWeighting::None) {
    interim.predicted_f =
        -draw_predicted_statistic(rng_pred_f, scenario, Population::Full,
                                  interim.m_f, interim.theta_hat_f);
    if (interim.subgroup_evaluable)
      interim.predicted_s =
          -draw_predicted_statistic(rng_pred_s, scenario, Population::Subgroup,
                                    interim.m_s, interim.theta_hat_s);
  }

  const double t_frac = spec.effective_t();
  const double control_rate = std::log(2.0) / scenario.control_median;
  const auto make_inputs = [&](Population pop) {
    const bool full = pop == Population::Full;
    CpInputs in;
    in.evaluable = full ? true : interim.subgroup_evaluable;
    in.z1 = full ? interim.z1_f : interim.z1_s;
    in.predicted = full ? interim.predicted_f : interim.predicted_s;
    const CpSetup setup = cp_setup(spec, full ? interim.m_f : interim.m_s);
    in.counts = setup.counts;
    in.planned_incr = setup.planned_incr;
    in.cap_incr = setup.cap_incr;
    const double follow = mean_control_follow_up(stage1, pop, t_interim_cal);
    in.info = InfoFraction{t_frac, 1.0 - std::exp(-control_rate * follow)};
    return in;
  };

  const InterimSnapshot snapshot{make_inputs(Population::Full),
                                 make_inputs(Population::Subgroup)};
  const DecisionConfig dconf{spec.variant, spec.alpha, spec.power_target,
                             spec.thresholds, spec.futility_enabled};
  const InterimDecision decision = decide(snapshot, dconf);

  ReplicationOutcome out;
  out.interim = interim;
  out.decision = decision;

  if (decision.zone == Zone::Futility) {
    out.duration_months = t_interim_cal;
    out.total_events = events_at(stage1, Population::Full, t_interim_cal);
    out.test = ClosedTestResult{};  // all-false
    return out;
  }

  const bool enriched = decision.selected == SelectedPopulation::Subgroup;
  const Population selected_pop =
      enriched ? Population::Subgroup : Population::Full;

  const SimCohort cohort2 =
      generate_cohort(rng_cohort2, spec.cohort2_size, spec.accrual_stage2,
                      scenario, enriched, t_interim_cal, spec);

  std::vector<Subject> all_subjects;
  all_subjects.reserve(cohort1.subjects.size() + cohort2.subjects.size());
  all_subjects.insert(all_subjects.end(), cohort1.subjects.begin(),
                      cohort1.subjects.end());
  all_subjects.insert(all_subjects.end(), cohort2.subjects.begin(),
                      cohort2.subjects.end());
  const std::span<const Subject> all{all_subjects};

  // --- Stage-1 cut: cohort 1 reaches its prespecified event count ---
  const double t_stage1 =
      kth_event_time(stage1, Population::Full, spec.d1_total, scratch);
  const LogRankResult s1_f =
      logrank_statistic(stage1, Population::Full, t_stage1);

  StageStatistics stats;
  stats.z1_f = s1_f.z_oriented;
  stats.d1_f = s1_f.events;
  try {
    const LogRankResult s1_s =
        logrank_statistic(stage1, Population::Subgroup, t_stage1);
    stats.z1_s = s1_s.z_oriented;
    stats.d1_s = s1_s.events;
  } catch (const std::runtime_error&) {
    // No subgroup events in stage 1: neutral evidence, no usable increment.
  }

  // --- Final cut at the re-estimated event target in the selected pop ---
  const CpSetup sel_setup =
      cp_setup(spec, enriched ? interim.m_s : interim.m_f);
  long target = sel_setup.anchor + decision.n2_incr_final;
  const long available = population_size(all, selected_pop);
  if (target > available) {
    target = available;
    out.target_truncated = true;
  }
  const double t_final =
      std::max(kth_event_time(all, selected_pop, target, scratch), t_stage1);

  try {
    const LogRankResult fin_s =
        logrank_statistic(all, Population::Subgroup, t_final);
    stats.z2_s = fin_s.z_oriented;
    stats.d2_s = fin_s.events;
  } catch (const std::runtime_error&) {
    stats.z2_s = stats.z1_s;
    stats.d2_s = stats.d1_s;
  }
  if (!enriched) {
    const LogRankResult fin_f =
        logrank_statistic(all, Population::Full, t_final);
    stats.z2_f = fin_f.z_oriented;
    stats.d2_f = fin_f.events;
  }

  const StageCounts planned{static_cast<double>(spec.d1_total),
                            static_cast<double>(spec.d_total_planned)};
  out.test = closed_test(stats, decision, planned, spec.alpha);
  out.duration_months = t_final;
  out.total_events = events_at(all, Population::Full, t_final);
  return out;
}

}  // namespace enrichsim
