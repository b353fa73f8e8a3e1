#include "enrichsim/decision.hpp"

#include <stdexcept>

namespace enrichsim {

const char* zone_name(Zone z) {
  switch (z) {
    case Zone::Favorable: return "Favorable";
    case Zone::Promising: return "Promising";
    case Zone::Enrichment: return "Enrichment";
    case Zone::Unfavorable: return "Unfavorable";
    case Zone::Futility: return "Futility";
  }
  return "?";
}

void ZoneThresholds::validate() const {
  if (!(0.0 <= futility_f && futility_f <= delta_f && delta_f <= favorable &&
        favorable <= 1.0))
    throw std::domain_error("ZoneThresholds: need 0 <= futility_f <= delta_f <= favorable <= 1");
  if (!(0.0 <= futility_s && futility_s <= delta_s && delta_s <= 1.0))
    throw std::domain_error("ZoneThresholds: need 0 <= futility_s <= delta_s <= 1");
}

Zone classify_zone(double cp_f, double cp_s, const ZoneThresholds& th) {
  if (cp_f >= th.favorable) return Zone::Favorable;
  if (cp_f >= th.delta_f) return Zone::Promising;
  if (cp_s >= th.delta_s) return Zone::Enrichment;
  if (cp_f < th.futility_f && cp_s < th.futility_s) return Zone::Futility;
  return Zone::Unfavorable;
}

SsrResult reestimate_events(const std::function<double(long)>& cp_fn,
                            long planned_incr, long cap_incr, double target) {
  if (!(planned_incr >= 1 && cap_incr >= planned_incr))
    throw std::domain_error("reestimate_events: need 1 <= planned <= cap");

  const double cp_planned = cp_fn(planned_incr);
  if (cp_planned >= target) return {planned_incr, false, false};
  const double cp_cap = cp_fn(cap_incr);
  if (cp_cap < target) {
    // Unattainable within the cap; flag the pathological case where the
    // curve actually went down.
    return {cap_incr, true, cp_cap < cp_planned};
  }

  long lo = planned_incr;  // cp < target
  long hi = cap_incr;      // cp >= target
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (cp_fn(mid) >= target)
      hi = mid;
    else
      lo = mid;
  }
  return {hi, hi == cap_incr, false};
}

namespace {

struct CpEval {
  double cp;
  bool fallback;
};

CpEval eval_cp(const CpInputs& in, const DecisionConfig& cfg) {
  if (!in.evaluable) return {0.0, false};  // no events: futility-grade evidence
  const McpValue v =
      modified_cp(cfg.variant, in.z1, in.predicted, in.info, in.counts,
                  cfg.alpha, static_cast<double>(in.planned_incr));
  return {v.value, v.fallback};
}

}  // namespace

InterimDecision decide(const InterimSnapshot& snapshot,
                       const DecisionConfig& config) {
  config.thresholds.validate();

  const CpEval f = eval_cp(snapshot.full, config);
  const CpEval s = eval_cp(snapshot.subgroup, config);

  ZoneThresholds th = config.thresholds;
  if (!config.futility_enabled) {
    th.futility_f = 0.0;  // cp < 0 never holds: futility row unreachable
    th.futility_s = 0.0;
  }
  const Zone zone = classify_zone(f.cp, s.cp, th);

  InterimDecision out;
  out.zone = zone;
  out.cp_f = f.cp;
  out.cp_s = s.cp;
  out.fallback_f = f.fallback;
  out.fallback_s = s.fallback;

  switch (zone) {
    case Zone::Futility:
      out.selected = SelectedPopulation::None;
      out.n2_incr_final = 0;
      break;
    case Zone::Favorable:
    case Zone::Unfavorable:
      out.selected = SelectedPopulation::Full;
      out.n2_incr_final = snapshot.full.planned_incr;
      break;
    case Zone::Promising:
    case Zone::Enrichment: {
      const bool on_subgroup = zone == Zone::Enrichment;
      const CpInputs& in = on_subgroup ? snapshot.subgroup : snapshot.full;
      const auto cp_fn = [&](long incr) {
        return modified_cp(config.variant, in.z1, in.predicted, in.info,
                           in.counts, config.alpha,
                           static_cast<double>(incr))
            .value;
      };
      const SsrResult ssr = reestimate_events(
          cp_fn, in.planned_incr, in.cap_incr, config.power_target);
      out.selected = on_subgroup ? SelectedPopulation::Subgroup
                                 : SelectedPopulation::Full;
      out.n2_incr_final = ssr.events;
      out.ssr_at_cap = ssr.at_cap;
      out.ssr_non_monotone = ssr.non_monotone;
      break;
    }
  }
  return out;
}

}  // namespace enrichsim
