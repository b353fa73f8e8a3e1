#include "enrichsim/inference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "enrichsim/normal.hpp"

namespace enrichsim {

SurvivalSample SurvivalSample::load(const std::string& path,
                                    double cut_month) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open subject file: " + path);
  SurvivalSample sample;
  sample.cut_month = cut_month;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    int arm, subgroup;
    double enroll, event;
    if (!(row >> arm)) continue;  // blank line
    if (!(row >> subgroup >> enroll >> event) || (arm != 0 && arm != 1) ||
        (subgroup != 0 && subgroup != 1) || event < 0.0)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 'arm subgroup enroll_month event_month'");
    sample.subjects.push_back({arm == 1 ? Arm::Treatment : Arm::Control,
                               subgroup == 1, enroll, event});
  }
  return sample;
}

LogRankResult logrank_statistic(std::span<const Subject> subjects,
                                Population population, double cut_month) {
  struct Obs {
    double time;
    bool event;
    bool treatment;
  };
  std::vector<Obs> obs;
  obs.reserve(subjects.size());
  for (const Subject& s : subjects) {
    if (s.enroll_month > cut_month) continue;
    if (population == Population::Subgroup && !s.in_subgroup) continue;
    // Compare in calendar time with the same expression event-count cuts
    // use, so the subject whose event defines the cut is always counted.
    const bool event = s.enroll_month + s.event_month <= cut_month;
    obs.push_back({event ? s.event_month : cut_month - s.enroll_month, event,
                   s.arm == Arm::Treatment});
  }
  std::sort(obs.begin(), obs.end(), [](const Obs& a, const Obs& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.event > b.event;  // events before censorings at ties
  });

  long events = 0;
  double observed_minus_expected = 0.0;
  double variance = 0.0;
  std::size_t i = 0;
  long at_risk = static_cast<long>(obs.size());
  long at_risk_trt = 0;
  for (const Obs& o : obs) at_risk_trt += o.treatment ? 1 : 0;

  while (i < obs.size()) {
    const double t = obs[i].time;
    long deaths = 0, deaths_trt = 0, leaving = 0, leaving_trt = 0;
    // Group the tied times; censorings at t stay at risk for the event.
    while (i < obs.size() && obs[i].time == t) {
      ++leaving;
      leaving_trt += obs[i].treatment ? 1 : 0;
      if (obs[i].event) {
        ++deaths;
        deaths_trt += obs[i].treatment ? 1 : 0;
      }
      ++i;
    }
    if (deaths > 0) {
      events += deaths;
      const double n = static_cast<double>(at_risk);
      const double n1 = static_cast<double>(at_risk_trt);
      const double d = static_cast<double>(deaths);
      observed_minus_expected += deaths_trt - d * n1 / n;
      if (at_risk > 1)
        variance += d * (n1 / n) * (1.0 - n1 / n) * (n - d) / (n - 1.0);
    }
    at_risk -= leaving;
    at_risk_trt -= leaving_trt;
  }

  if (events == 0)
    throw std::runtime_error("logrank_statistic: no events at the cut");
  const double z_raw =
      variance > 0.0 ? observed_minus_expected / std::sqrt(variance) : 0.0;
  return {-z_raw, events};
}

double increment_statistic(double z_cum, double z1, double d1, double d2) {
  if (!(d2 > d1 && d1 >= 1.0))
    throw std::domain_error("increment_statistic: need d2 > d1 >= 1");
  return (z_cum * std::sqrt(d2) - z1 * std::sqrt(d1)) / std::sqrt(d2 - d1);
}

double chw_combine(double z1, double z2_incr, const StageCounts& planned) {
  planned.validate();
  const double w1 = std::sqrt(planned.n1 / planned.n2);
  const double w2 = std::sqrt(planned.planned_increment() / planned.n2);
  return w1 * z1 + w2 * z2_incr;
}

double hochberg_intersection(double z_f, double z_s) {
  if (!std::isfinite(z_f) || !std::isfinite(z_s))
    throw std::domain_error("hochberg_intersection: non-finite statistic");
  constexpr double kPClamp = 1e-16;
  const double p_f = 1.0 - norm_cdf(z_f);
  const double p_s = 1.0 - norm_cdf(z_s);
  double p_int = std::min(2.0 * std::min(p_f, p_s), std::max(p_f, p_s));
  p_int = std::clamp(p_int, kPClamp, 1.0 - kPClamp);
  return norm_quantile(1.0 - p_int);
}

ClosedTestResult closed_test(const StageStatistics& stats,
                             const InterimDecision& decision,
                             const StageCounts& planned, double alpha) {
  ClosedTestResult out;
  if (decision.zone == Zone::Futility) {
    out.z_chw_elementary = std::numeric_limits<double>::quiet_NaN();
    out.z_chw_intersection = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  const bool enriched = decision.selected == SelectedPopulation::Subgroup;
  if (enriched == stats.z2_f.has_value())
    throw std::invalid_argument(
        "closed_test: stage-2 full statistic must be absent exactly when enrichment occurred");

  // Degenerate samples can leave the subgroup without a usable increment
  // (no stage-1 events, or none between the cuts); it then carries no
  // evidence.
  const double z2_incr_s =
      (stats.d1_s >= 1 && stats.d2_s > stats.d1_s)
          ? increment_statistic(stats.z2_s, stats.z1_s,
                                static_cast<double>(stats.d1_s),
                                static_cast<double>(stats.d2_s))
          : 0.0;
  const double z1_int = hochberg_intersection(stats.z1_f, stats.z1_s);

  double z_elem, z2_incr_int;
  if (enriched) {
    z_elem = chw_combine(stats.z1_s, z2_incr_s, planned);
    z2_incr_int = z2_incr_s;  // subgroup evidence carries the intersection
    out.tested = SelectedPopulation::Subgroup;
  } else {
    const double z2_incr_f = increment_statistic(
        *stats.z2_f, stats.z1_f, static_cast<double>(stats.d1_f),
        static_cast<double>(*stats.d2_f));
    z_elem = chw_combine(stats.z1_f, z2_incr_f, planned);
    z2_incr_int = hochberg_intersection(z2_incr_f, z2_incr_s);
    out.tested = SelectedPopulation::Full;
  }
  const double z_int = chw_combine(z1_int, z2_incr_int, planned);

  const double z_crit = norm_quantile(1.0 - alpha);
  out.z_chw_elementary = z_elem;
  out.z_chw_intersection = z_int;
  out.reject_elementary = z_elem > z_crit;
  out.reject_intersection = z_int > z_crit;
  out.reject_overall = out.reject_elementary && out.reject_intersection;
  return out;
}

}  // namespace enrichsim
