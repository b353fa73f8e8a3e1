#include "enrichsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace enrichsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_string(text.str(), path);
}

Config Config::parse_string(const std::string& text,
                            const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": empty key or value");
    if (cfg.kv_.count(key))
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    cfg.kv_[key] = value;
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

void Config::missing(const std::string& key) const {
  throw ConfigError(origin_ + ": missing required key '" + key + "'");
}

const std::string& Config::get_string(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) missing(key);
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = get_string(key);
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ": key '" + key + "': not a number: " + v);
  }
  if (pos != v.size())
    throw ConfigError(origin_ + ": key '" + key + "': trailing junk in " + v);
  return x;
}

long Config::get_long(const std::string& key) const {
  const double x = get_double(key);
  const long v = static_cast<long>(x);
  if (static_cast<double>(v) != x)
    throw ConfigError(origin_ + ": key '" + key + "': expected an integer");
  return v;
}

bool Config::get_bool(const std::string& key) const {
  std::string v = get_string(key);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(origin_ + ": key '" + key + "': expected a boolean, got " + v);
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}
double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}
long Config::get_long(const std::string& key, long fallback) const {
  return has(key) ? get_long(key) : fallback;
}
bool Config::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

void Config::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

std::string Config::canonical_text() const {
  std::ostringstream out;
  for (const auto& [k, v] : kv_) out << k << " = " << v << '\n';
  return out.str();
}

Scenario scenario_from_config(const Config& cfg, const std::string& prefix) {
  Scenario sc;
  sc.hr_f = cfg.get_double(prefix + "hr_f", sc.hr_f);
  sc.hr_s = cfg.get_double(prefix + "hr_s", sc.hr_s);
  sc.control_median = cfg.get_double(prefix + "control_median", sc.control_median);
  sc.p_c_f = cfg.get_double(prefix + "p_c_f", sc.p_c_f);
  sc.p_c_s = cfg.get_double(prefix + "p_c_s", sc.p_c_s);
  sc.theta_f = cfg.get_double(prefix + "theta_f", sc.theta_f);
  sc.theta_s = cfg.get_double(prefix + "theta_s", sc.theta_s);
  sc.phi = cfg.get_double(prefix + "phi", sc.phi);
  sc.rho = cfg.get_double(prefix + "rho", sc.rho);
  sc.tau = cfg.get_double(prefix + "tau", sc.tau);
  sc.validate();
  return sc;
}

DesignSpec design_from_config(const Config& cfg) {
  DesignSpec d;
  d.alpha = cfg.get_double("design.alpha", d.alpha);
  d.power_target = cfg.get_double("design.power", d.power_target);
  d.d1_interim = cfg.get_long("design.d1_interim", d.d1_interim);
  d.d1_total = cfg.get_long("design.d1_total", d.d1_total);
  d.d2_planned = cfg.get_long("design.d2_planned", d.d2_planned);
  d.d_total_planned = cfg.get_long("design.d_total_planned", d.d_total_planned);
  d.cap_multiplier = cfg.get_double("design.cap_multiplier", d.cap_multiplier);
  d.cohort1_size = cfg.get_long("design.cohort1_size", d.cohort1_size);
  d.cohort2_size = cfg.get_long("design.cohort2_size", d.cohort2_size);
  d.accrual_stage1 = cfg.get_double("design.accrual_stage1", d.accrual_stage1);
  d.accrual_stage2 = cfg.get_double("design.accrual_stage2", d.accrual_stage2);
  d.t_interim = cfg.get_double("design.t_interim", d.t_interim);
  d.surrogate_noise_sd =
      cfg.get_double("design.surrogate_noise_sd", d.surrogate_noise_sd);
  d.poisson_accrual = cfg.get_bool("design.poisson_accrual", d.poisson_accrual);
  d.dilute_enrichment_accrual = cfg.get_bool("design.dilute_enrichment_accrual",
                                             d.dilute_enrichment_accrual);
  const std::string anchor =
      cfg.get_string("design.cp_anchor", "planned_stage1");
  if (anchor == "planned_stage1")
    d.cp_anchor = CpAnchor::PlannedStage1;
  else if (anchor == "observed_interim")
    d.cp_anchor = CpAnchor::ObservedInterim;
  else
    throw ConfigError("design.cp_anchor: expected planned_stage1 or observed_interim");

  d.thresholds.favorable = cfg.get_double("thresholds.favorable", 0.9);
  d.thresholds.delta_f = cfg.get_double("thresholds.promising", 0.4);
  d.thresholds.delta_s = cfg.get_double("thresholds.enrichment", 0.5);
  d.thresholds.futility_f = cfg.get_double("futility.cp_f", 0.05);
  d.thresholds.futility_s = cfg.get_double("futility.cp_s", 0.05);
  d.futility_enabled = cfg.get_bool("futility.enabled", true);

  d.variant = variant_from_token(cfg.get_string("variant", "none"));
  d.validate();
  return d;
}

InterimCase interim_from_config(const Config& cfg) {
  std::vector<std::string> missing;
  for (const char* key : {"interim.m_f", "interim.m_s", "interim.z_f",
                          "interim.z_s", "interim.t"})
    if (!cfg.has(key)) missing.emplace_back(key);

  const bool have_model = cfg.has("model.intercept") || cfg.has("model.slope");
  const bool have_direct =
      cfg.has("interim.predicted_f") && cfg.has("interim.predicted_s");
  const std::string variant_tok = cfg.get_string("variant", "none");
  if (variant_tok != "none" && !have_model && !have_direct) {
    missing.emplace_back("model.intercept/model.slope (with surrogate.theta_f/theta_s)");
    missing.emplace_back("or interim.predicted_f/interim.predicted_s");
  }
  if (have_model)
    for (const char* key : {"surrogate.theta_f", "surrogate.theta_s"})
      if (!cfg.has(key)) missing.emplace_back(key);
  if (!missing.empty()) {
    std::string msg = "interim config missing fields:";
    for (const auto& m : missing) msg += " " + m;
    throw ConfigError(msg);
  }

  InterimCase out;
  out.decision.variant = variant_from_token(variant_tok);
  out.decision.alpha = cfg.get_double("design.alpha", 0.025);
  out.decision.power_target = cfg.get_double("design.power", 0.9);
  out.decision.thresholds.favorable = cfg.get_double("thresholds.favorable", 0.9);
  out.decision.thresholds.delta_f = cfg.get_double("thresholds.promising", 0.4);
  out.decision.thresholds.delta_s = cfg.get_double("thresholds.enrichment", 0.5);
  out.decision.thresholds.futility_f = cfg.get_double("futility.cp_f", 0.05);
  out.decision.thresholds.futility_s = cfg.get_double("futility.cp_s", 0.05);
  out.decision.futility_enabled = cfg.get_bool("futility.enabled", true);

  const long total = cfg.get_long("design.d_total_planned", 160);
  const long cap_total = cfg.get_long(
      "interim.cap_total",
      static_cast<long>(std::ceil(cfg.get_double("design.cap_multiplier", 1.4) *
                                  static_cast<double>(total))));
  const double t = cfg.get_double("interim.t");

  HistoricalModel model;
  if (have_model) {
    model.intercept = cfg.get_double("model.intercept");
    model.slope = cfg.get_double("model.slope");
    model.logrank_convention = cfg.get_bool("model.logrank_convention", false);
  }

  const auto make = [&](Population pop) {
    const bool full = pop == Population::Full;
    const std::string side = full ? "_f" : "_s";
    CpInputs in;
    const long m = cfg.get_long("interim.m" + side);
    if (m < 1) throw ConfigError("interim.m" + side + ": must be >= 1");
    if (m >= total)
      throw ConfigError("interim.m" + side + ": at or past the planned total");
    // Observed statistics arrive in the log-rank convention and are
    // oriented on entry.
    in.z1 = -cfg.get_double("interim.z" + side);
    if (have_model) {
      const SurrogateReadout readout{cfg.get_double("surrogate.theta" + side),
                                     pop};
      in.predicted = predict_statistic(model, readout);
    } else if (have_direct) {
      in.predicted = -cfg.get_double("interim.predicted" + side);
    }
    in.counts = StageCounts{static_cast<double>(m), static_cast<double>(total)};
    in.planned_incr = total - m;
    in.cap_incr = std::max(cap_total - m, total - m);
    in.info.t = t;
    if (cfg.has("interim.fc_t")) in.info.fc_t = cfg.get_double("interim.fc_t");
    return in;
  };
  out.snapshot.full = make(Population::Full);
  out.snapshot.subgroup = make(Population::Subgroup);
  return out;
}

ScenarioGrid grid_from_config(const Config& cfg) {
  ScenarioGrid grid;
  grid.replications = cfg.get_long("run.replications", 1000);

  std::string variants = cfg.get_string("run.variants",
                                        cfg.get_string("variant", "none"));
  std::replace(variants.begin(), variants.end(), ',', ' ');
  std::istringstream vs(variants);
  grid.variants.clear();
  for (std::string tok; vs >> tok;)
    grid.variants.push_back(variant_from_token(tok));

  if (cfg.has("grid.sets")) {
    // Expand the built-in alternative grid, filtered by set letter.
    std::string sets = cfg.get_string("grid.sets");
    std::replace(sets.begin(), sets.end(), ',', ' ');
    std::istringstream ss(sets);
    std::string wanted;
    for (std::string tok; ss >> tok;) wanted += tok;
    for (const LabeledScenario& item : alternative_grid())
      if (wanted.find(item.label[0]) != std::string::npos)
        grid.items.push_back(item);
    if (grid.items.empty())
      throw ConfigError("grid.sets: no scenarios matched '" + sets + "'");
  } else if (cfg.get_bool("grid.null", false)) {
    for (double rho : {-0.3, -0.6, -0.9}) {
      std::ostringstream label;
      label << "null_rho" << rho;
      grid.items.push_back({null_scenario(rho), label.str()});
    }
  } else {
    grid.items.push_back({scenario_from_config(cfg),
                          cfg.get_string("scenario.label", "scenario")});
  }

  // Optional filters on the expanded grid.
  if (cfg.has("grid.phi")) {
    const double phi = cfg.get_double("grid.phi");
    std::erase_if(grid.items, [&](const LabeledScenario& s) {
      return s.scenario.phi != phi;
    });
  }
  if (cfg.has("grid.rho")) {
    const double rho = cfg.get_double("grid.rho");
    std::erase_if(grid.items, [&](const LabeledScenario& s) {
      return s.scenario.rho != rho;
    });
  }
  if (grid.items.empty())
    throw ConfigError("grid filters removed every scenario");
  grid.validate();
  return grid;
}

}  // namespace enrichsim
