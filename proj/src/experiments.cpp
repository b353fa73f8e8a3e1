#include "enrichsim/experiments.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace enrichsim {

void ScenarioGrid::validate() const {
  if (items.empty()) throw std::domain_error("ScenarioGrid: no scenarios");
  if (replications < 1)
    throw std::domain_error("ScenarioGrid: replications must be >= 1");
  if (variants.empty())
    throw std::domain_error("ScenarioGrid: no variants");
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t j = i + 1; j < items.size(); ++j)
      if (items[i].label == items[j].label)
        throw std::domain_error("ScenarioGrid: duplicate label " +
                                items[i].label);
}

const char* variant_token(SurrogateWeighting v) {
  switch (v) {
    case SurrogateWeighting::None: return "none";
    case SurrogateWeighting::LinearBlend: return "W1";
    case SurrogateWeighting::HarmonicInfo: return "W2";
    case SurrogateWeighting::HarmonicSurvival: return "W3";
  }
  return "?";
}

SurrogateWeighting variant_from_token(const std::string& token) {
  if (token == "none" || token == "None") return SurrogateWeighting::None;
  if (token == "W1" || token == "w1" || token == "linear")
    return SurrogateWeighting::LinearBlend;
  if (token == "W2" || token == "w2") return SurrogateWeighting::HarmonicInfo;
  if (token == "W3" || token == "w3")
    return SurrogateWeighting::HarmonicSurvival;
  throw std::domain_error("unknown variant token: " + token);
}

namespace {

RepRecord to_record(const ReplicationOutcome& out) {
  RepRecord r;
  r.zone = static_cast<std::uint8_t>(out.decision.zone);
  r.reject_overall = out.test.reject_overall ? 1 : 0;
  r.reject_elementary = out.test.reject_elementary ? 1 : 0;
  r.reject_intersection = out.test.reject_intersection ? 1 : 0;
  r.duration = static_cast<float>(out.duration_months);
  r.events = static_cast<std::int32_t>(out.total_events);
  return r;
}

}  // namespace

std::vector<RepRecord> run_scenario(const Scenario& scenario,
                                    const DesignSpec& spec, long replications,
                                    std::uint64_t seed, int threads) {
  scenario.validate();  // fail before entering the parallel region
  spec.validate();
  std::vector<RepRecord> records(replications);
  const int nt = threads > 0 ? threads : omp_get_max_threads();
  std::exception_ptr error;  // exceptions must not unwind out of the loop
#pragma omp parallel for schedule(dynamic, 64) num_threads(nt)
  for (long r = 0; r < replications; ++r) {
    try {
      records[r] = to_record(run_replication(seed, r, scenario, spec));
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return records;
}

std::vector<RepRecord> run_scenario_serial(const Scenario& scenario,
                                           const DesignSpec& spec,
                                           long replications,
                                           std::uint64_t seed) {
  std::vector<RepRecord> records(replications);
  for (long r = 0; r < replications; ++r)
    records[r] = to_record(run_replication(seed, r, scenario, spec));
  return records;
}

OperatingCharacteristics aggregate(const std::vector<RepRecord>& records,
                                   const LabeledScenario& item,
                                   SurrogateWeighting variant) {
  OperatingCharacteristics oc;
  oc.label = item.label;
  oc.variant = variant_token(variant);
  oc.phi = item.scenario.phi;
  oc.rho = item.scenario.rho;
  oc.replications = static_cast<long>(records.size());
  const double n = static_cast<double>(records.size());
  if (records.empty()) return oc;

  long zones[5] = {0, 0, 0, 0, 0};
  long overall = 0, elem = 0, inter = 0;
  double dur_sum = 0.0, dur_sq = 0.0, evt_sum = 0.0, evt_sq = 0.0;
  for (const RepRecord& r : records) {  // sequential: order-independent totals
    ++zones[r.zone];
    overall += r.reject_overall;
    elem += r.reject_elementary;
    inter += r.reject_intersection;
    dur_sum += r.duration;
    dur_sq += static_cast<double>(r.duration) * r.duration;
    evt_sum += r.events;
    evt_sq += static_cast<double>(r.events) * r.events;
  }
  for (int z = 0; z < 5; ++z) oc.zone_freq[z] = zones[z] / n;
  oc.power = overall / n;
  oc.power_se = std::sqrt(oc.power * (1.0 - oc.power) / n);
  oc.reject_elementary = elem / n;
  oc.reject_intersection = inter / n;
  oc.mean_duration = dur_sum / n;
  oc.mean_events = evt_sum / n;
  if (records.size() > 1) {
    const double dvar = (dur_sq - dur_sum * dur_sum / n) / (n - 1.0);
    const double evar = (evt_sq - evt_sum * evt_sum / n) / (n - 1.0);
    oc.duration_se = std::sqrt(std::max(dvar, 0.0) / n);
    oc.events_se = std::sqrt(std::max(evar, 0.0) / n);
  }
  return oc;
}

std::vector<OperatingCharacteristics> run_grid(const ScenarioGrid& grid,
                                               const DesignSpec& spec,
                                               std::uint64_t seed, int threads,
                                               std::ostream* progress) {
  grid.validate();
  std::vector<OperatingCharacteristics> out;
  out.reserve(grid.items.size() * grid.variants.size());
  for (const LabeledScenario& item : grid.items) {
    for (SurrogateWeighting v : grid.variants) {
      DesignSpec s = spec;
      s.variant = v;
      try {
        const auto records =
            run_scenario(item.scenario, s, grid.replications, seed, threads);
        out.push_back(aggregate(records, item, v));
      } catch (const std::exception& e) {
        // One bad scenario must not take down the grid.
        if (progress)
          *progress << "scenario " << item.label << " variant "
                    << variant_token(v) << " failed: " << e.what() << '\n';
        continue;
      }
      if (progress) {
        const OperatingCharacteristics& oc = out.back();
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "%-18s %-5s power=%.4f dur=%.1f evts=%.1f",
                      oc.label.c_str(), oc.variant.c_str(), oc.power,
                      oc.mean_duration, oc.mean_events);
        *progress << buf << '\n';
      }
    }
  }
  return out;
}

VariantComparison compare_variants(const ScenarioGrid& grid,
                                   const DesignSpec& spec, std::uint64_t seed,
                                   int threads, std::ostream* progress) {
  VariantComparison cmp;
  cmp.cells = run_grid(grid, spec, seed, threads, progress);
  if (grid.variants.size() < 2) return cmp;  // nothing to pair against

  // Same replication streams fed every variant, so the deltas are paired.
  const std::string base = variant_token(grid.variants.front());
  for (const auto& cell : cmp.cells) {
    if (cell.variant == base) continue;
    for (const auto& ref : cmp.cells) {
      if (ref.label == cell.label && ref.variant == base) {
        cmp.deltas.push_back({cell.label, cell.variant,
                              cell.power - ref.power,
                              cell.mean_events - ref.mean_events,
                              cell.mean_duration - ref.mean_duration});
        break;
      }
    }
  }
  return cmp;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    q += c;
    if (c == '"') q += '"';
  }
  q += '"';
  return q;
}

}  // namespace

void write_csv(const std::string& path,
               const std::vector<OperatingCharacteristics>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "scenario,variant,phi,rho,replications,"
         "favorable,promising,enrichment,unfavorable,futility,"
         "power,power_se,mean_duration,duration_se,mean_events,events_se,"
         "reject_elementary,reject_intersection\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%s,%g,%g,%ld,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.4f,"
                  "%.4f,%.4f,%.4f,%.6f,%.6f\n",
                  csv_quote(r.label).c_str(), csv_quote(r.variant).c_str(),
                  r.phi, r.rho, r.replications, r.zone_freq[0], r.zone_freq[1],
                  r.zone_freq[2], r.zone_freq[3], r.zone_freq[4], r.power,
                  r.power_se, r.mean_duration, r.duration_se, r.mean_events,
                  r.events_se, r.reject_elementary, r.reject_intersection);
    out << buf;
  }
}

std::uint64_t config_hash(const std::string& canonical_config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical_config) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void write_json_sidecar(const std::string& path,
                        const std::string& canonical_config,
                        std::uint64_t seed,
                        const std::vector<OperatingCharacteristics>& rows) {
  nlohmann::json j;
  j["config"] = canonical_config;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config_hash(canonical_config)));
  j["config_hash"] = hash;
  j["seed"] = seed;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"scenario", r.label},
                         {"variant", r.variant},
                         {"replications", r.replications},
                         {"power", r.power}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

std::vector<LabeledScenario> alternative_grid() {
  struct Set {
    char name;
    double hr_f, hr_s, theta_f, theta_s;
  };
  const Set sets[] = {{'a', 0.6, 0.6, 0.4, 0.4},
                      {'b', 0.7, 0.6, 0.2, 0.3},
                      {'c', 0.7, 0.7, 0.3, 0.3},
                      {'d', 0.8, 0.6, 0.2, 0.4}};
  const double phis[] = {0.2, 0.0, -0.2};
  const double rhos[] = {-0.3, -0.6, -0.9};

  std::vector<LabeledScenario> grid;
  grid.reserve(36);
  for (const Set& s : sets)
    for (double phi : phis)
      for (double rho : rhos) {
        Scenario sc;
        sc.hr_f = s.hr_f;
        sc.hr_s = s.hr_s;
        sc.theta_f = s.theta_f;
        sc.theta_s = s.theta_s;
        sc.phi = phi;
        sc.rho = rho;
        std::ostringstream label;
        label << s.name << "_phi" << (phi >= 0 ? "+" : "") << phi << "_rho"
              << rho;
        grid.push_back({sc, label.str()});
      }
  return grid;
}

Scenario null_scenario(double rho) {
  Scenario sc;
  sc.hr_f = 1.0;
  sc.hr_s = 1.0;
  sc.theta_f = 0.0;
  sc.theta_s = 0.0;
  sc.phi = 0.0;
  sc.rho = rho;
  return sc;
}

}  // namespace enrichsim
