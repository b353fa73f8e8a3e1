#include "enrichsim/power.hpp"

#include <cmath>
#include <stdexcept>

#include "enrichsim/normal.hpp"

namespace enrichsim {

double HistoricalModel::predict_oriented(double theta_hat) const {
  const double raw = intercept + slope * theta_hat;
  return logrank_convention ? -raw : raw;
}

double predict_statistic(const HistoricalModel& model,
                         const SurrogateReadout& surrogate) {
  if (!std::isfinite(model.intercept) || !std::isfinite(model.slope))
    throw std::domain_error("predict_statistic: model must be finite");
  return model.predict_oriented(surrogate.theta_hat);
}

void StageCounts::validate() const {
  if (!(n1 > 0.0 && n2 > n1))
    throw std::domain_error("StageCounts: need 0 < n1 < n2");
}

double conditional_power(double z1, const StageCounts& counts, double alpha,
                         double n2_incr_actual) {
  counts.validate();
  if (!(n2_incr_actual > 0.0))
    throw std::domain_error("conditional_power: increment must be > 0");
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::domain_error("conditional_power: alpha must be in (0, 0.5)");
  const double z_crit = norm_quantile(1.0 - alpha);
  const double arg =
      (z_crit * std::sqrt(counts.n2) - z1 * std::sqrt(counts.n1)) /
          std::sqrt(n2_incr_actual) -
      z1 * std::sqrt(n2_incr_actual / counts.n1);
  return norm_sf(arg);
}

namespace {

constexpr double kDenomEps = 1e-9;

// Blended drift statistic g; sets fallback when the harmonic form is
// undefined (opposite signs, zeros, vanishing denominator) and the linear
// blend is used instead.
double blended_drift(SurrogateWeighting variant, double z1, double predicted,
                     const InfoFraction& info, bool& fallback) {
  const double t = info.t;
  if (!(t > 0.0 && t <= 1.0))
    throw std::domain_error("modified_cp: information fraction t not in (0,1]");

  const double linear = z1 * t + predicted * (1.0 - t);
  if (variant == SurrogateWeighting::LinearBlend) return linear;

  double w;  // weight on the observed statistic inside the harmonic mean
  if (variant == SurrogateWeighting::HarmonicInfo) {
    w = t;
  } else {
    if (!info.fc_t.has_value())
      throw std::domain_error(
          "modified_cp: survival-weighted variant needs the control CDF value");
    w = *info.fc_t;
    if (!(w >= 0.0 && w <= 1.0))
      throw std::domain_error("modified_cp: control CDF value not in [0,1]");
  }

  const double denom = z1 * (1.0 - w) + predicted * w;
  if (z1 * predicted <= 0.0 || std::abs(denom) < kDenomEps) {
    fallback = true;
    return linear;
  }
  return z1 * predicted / denom;
}

}  // namespace

McpValue modified_cp(SurrogateWeighting variant, double z1, double predicted,
                     const InfoFraction& info, const StageCounts& counts,
                     double alpha, double n2_incr_actual) {
  if (variant == SurrogateWeighting::None)
    return {conditional_power(z1, counts, alpha, n2_incr_actual), false};

  counts.validate();
  if (!(n2_incr_actual > 0.0))
    throw std::domain_error("modified_cp: increment must be > 0");

  bool fallback = false;
  const double g = blended_drift(variant, z1, predicted, info, fallback);
  const double z_crit = norm_quantile(1.0 - alpha);
  const double arg =
      (z_crit * std::sqrt(counts.n2) - z1 * std::sqrt(counts.n1)) /
          std::sqrt(n2_incr_actual) -
      std::sqrt(n2_incr_actual / counts.n1) * g;
  return {norm_sf(arg), fallback};
}

long required_events(double hr_alt, double alpha, double power,
                     double allocation, double hr_margin) {
  if (!(hr_alt > 0.0 && hr_margin > 0.0 && hr_margin <= 1.0))
    throw std::domain_error("required_events: hazard ratios must be positive, margin <= 1");
  if (!(hr_alt < hr_margin))
    throw std::domain_error("required_events: hr_alt must be below the margin");
  if (!(alpha > 0.0 && alpha < 0.5 && power > 0.5 && power < 1.0))
    throw std::domain_error("required_events: need 0 < alpha < 0.5 < power < 1");
  if (!(allocation > 0.0))
    throw std::domain_error("required_events: allocation ratio must be > 0");

  const double z_sum = norm_quantile(1.0 - alpha) + norm_quantile(power);
  const double log_hr = std::log(hr_alt / hr_margin);
  const double r = allocation;
  const double d = (1.0 + r) * (1.0 + r) / r * z_sum * z_sum / (log_hr * log_hr);
  return static_cast<long>(std::ceil(d));
}

double ve_from_hr(double hr) {
  if (!(hr > 0.0)) throw std::domain_error("ve_from_hr: hr must be > 0");
  return 100.0 * (1.0 - hr);
}

double hr_from_ve(double ve_percent) {
  const double hr = 1.0 - ve_percent / 100.0;
  if (!(hr > 0.0)) throw std::domain_error("hr_from_ve: VE must be below 100%");
  return hr;
}

std::array<std::array<double, 4>, 4> theoretical_stage_covariance(
    const StageArmCounts& counts, double tau, const PopulationVariances& var) {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::domain_error("theoretical_stage_covariance: tau must be in (0,1)");
  const double n[2][2] = {{counts.n01, counts.n11}, {counts.n02, counts.n12}};
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      if (!(n[j][k] > 0.0))
        throw std::domain_error("theoretical_stage_covariance: counts must be > 0");
  if (!(var.s0_sub > 0 && var.s1_sub > 0 && var.s0_full > 0 && var.s1_full > 0))
    throw std::domain_error("theoretical_stage_covariance: variances must be > 0");

  // Pooled standard errors of the per-stage effect estimates.
  const auto pool_full = [&](int j) {
    return std::sqrt(var.s1_full * var.s1_full / n[j][1] +
                     var.s0_full * var.s0_full / n[j][0]);
  };
  const auto pool_sub = [&](int j) {
    return std::sqrt(var.s1_sub * var.s1_sub / (tau * n[j][1]) +
                     var.s0_sub * var.s0_sub / (tau * n[j][0]));
  };
  // cov(effect_S at stage j, effect_F at stage j') uses full-population
  // variances over the later stage's counts.
  const auto cross = [&](int j, int jp) {
    const int m = j > jp ? j : jp;
    return var.s0_full * var.s0_full / n[m][0] +
           var.s1_full * var.s1_full / n[m][1];
  };

  const double pf[2] = {pool_full(0), pool_full(1)};
  const double ps[2] = {pool_sub(0), pool_sub(1)};
  const double stage_corr =
      std::sqrt((n[0][0] + n[0][1]) / (n[1][0] + n[1][1]));

  // Order: Z1_S, Z1_F, Z2_S, Z2_F.
  std::array<std::array<double, 4>, 4> m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  const auto set = [&](int i, int j, double v) { m[i][j] = m[j][i] = v; };
  set(0, 2, stage_corr);                          // Z1_S, Z2_S
  set(1, 3, stage_corr);                          // Z1_F, Z2_F
  set(0, 1, cross(0, 0) / (ps[0] * pf[0]));       // Z1_S, Z1_F
  set(2, 3, cross(1, 1) / (ps[1] * pf[1]));       // Z2_S, Z2_F
  set(0, 3, cross(0, 1) / (ps[0] * pf[1]));       // Z1_S, Z2_F
  set(1, 2, cross(1, 0) / (ps[1] * pf[0]));       // Z1_F, Z2_S
  return m;
}

}  // namespace enrichsim
