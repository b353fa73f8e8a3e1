// Command-line front end: simulation grids, null calibration, one-shot
// interim decisions, event sizing, log-rank analysis of subject files, and
// result-file reports. Every subcommand is deterministic given (config, seed).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "enrichsim/config.hpp"
#include "enrichsim/inference.hpp"
#include "enrichsim/normal.hpp"

namespace es = enrichsim;

namespace {

// Seed precedence: --seed flag > ENRICHSIM_SEED > this documented default.
constexpr std::uint64_t kDefaultSeed = 19937;

std::uint64_t resolve_seed(bool seed_set, std::uint64_t flag_seed) {
  if (seed_set) return flag_seed;
  if (const char* env = std::getenv("ENRICHSIM_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::runtime_error("ENRICHSIM_SEED is not an integer");
    }
  }
  return kDefaultSeed;
}

void print_oc_table(const std::vector<es::OperatingCharacteristics>& rows) {
  std::printf("%-20s %-5s %8s %9s %10s %9s %9s %9s %9s %9s\n", "scenario",
              "var", "power", "dur(mo)", "events", "fav", "prom", "enrich",
              "unfav", "futil");
  for (const auto& r : rows) {
    std::printf(
        "%-20s %-5s %8.4f %9.1f %10.1f %9.4f %9.4f %9.4f %9.4f %9.4f\n",
        r.label.c_str(), r.variant.c_str(), r.power, r.mean_duration,
        r.mean_events, r.zone_freq[0], r.zone_freq[1], r.zone_freq[2],
        r.zone_freq[3], r.zone_freq[4]);
  }
}

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = kDefaultSeed;
  bool seed_set = false;
  long reps_override = 0;
  std::string out_dir = ".";
  std::string variant_override;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config = true) {
  auto* c = cmd->add_option("--config", opts.config_path, "config file path");
  if (needs_config) c->required();
  cmd->add_option("--seed", opts.seed, "RNG seed (default 19937, or ENRICHSIM_SEED)")
      ->each([&](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--reps", opts.reps_override, "override run.replications");
  cmd->add_option("--out", opts.out_dir, "output directory (default .)");
  cmd->add_option("--variant", opts.variant_override,
                  "override variant set (none, W1, W2, W3)");
  cmd->add_option("--threads", opts.threads, "worker threads (default: all cores)");
}

int run_simulate(const CommonOpts& opts, bool null_default) {
  es::Config cfg = es::Config::parse_file(opts.config_path);
  if (null_default && !cfg.has("grid.null") && !cfg.has("grid.sets") &&
      !cfg.has("scenario.hr_f"))
    cfg.set("grid.null", "true");
  if (!opts.variant_override.empty()) cfg.set("run.variants", opts.variant_override);

  const es::DesignSpec design = es::design_from_config(cfg);
  es::ScenarioGrid grid = es::grid_from_config(cfg);
  if (opts.reps_override > 0) grid.replications = opts.reps_override;
  const std::uint64_t seed = resolve_seed(opts.seed_set, opts.seed);

  const es::VariantComparison cmp =
      es::compare_variants(grid, design, seed, opts.threads, &std::cerr);

  print_oc_table(cmp.cells);
  if (!cmp.deltas.empty()) {
    std::printf("\ndeltas vs %s (common random numbers):\n",
                es::variant_token(grid.variants.front()));
    std::printf("%-20s %-5s %9s %9s %9s\n", "scenario", "var", "dPower",
                "dEvents", "dDur(mo)");
    for (const auto& d : cmp.deltas)
      std::printf("%-20s %-5s %+9.4f %+9.1f %+9.1f\n", d.label.c_str(),
                  d.variant.c_str(), d.d_power, d.d_events, d.d_duration);
  }

  std::filesystem::create_directories(opts.out_dir);
  const std::string base = cfg.get_string("run.output_basename", "results");
  const std::string csv = opts.out_dir + "/" + base + ".csv";
  const std::string json = opts.out_dir + "/" + base + ".json";
  es::write_csv(csv, cmp.cells);
  es::write_json_sidecar(json, cfg.canonical_text(), seed, cmp.cells);
  std::printf("\nwrote %s and %s (seed %llu)\n", csv.c_str(), json.c_str(),
              static_cast<unsigned long long>(seed));
  return 0;
}

void print_decision(const es::InterimSnapshot& snap,
                    const es::InterimDecision& d, const char* heading) {
  std::printf("%s\n", heading);
  std::printf("  zone: %s   selected population: %s\n", es::zone_name(d.zone),
              d.selected == es::SelectedPopulation::Full       ? "full"
              : d.selected == es::SelectedPopulation::Subgroup ? "subgroup"
                                                               : "none");
  std::printf("  cp_full     = %.4f   cp_subgroup = %.4f%s\n", d.cp_f, d.cp_s,
              (d.fallback_f || d.fallback_s) ? "   [harmonic weight fell back to linear]" : "");
  if (d.zone == es::Zone::Promising || d.zone == es::Zone::Enrichment) {
    const es::CpInputs& in = d.zone == es::Zone::Enrichment ? snap.subgroup : snap.full;
    std::printf("  re-estimated stage-2 increment: %ld events (planned %ld, cap %ld)%s\n",
                d.n2_incr_final, in.planned_incr, in.cap_incr,
                d.ssr_at_cap ? "  [cap]" : "");
    std::printf("  final event target in selected population: %.0f events\n",
                in.counts.n1 + static_cast<double>(d.n2_incr_final));
  } else if (d.zone != es::Zone::Futility) {
    std::printf("  no event-size change: stage-2 increment stays %ld\n",
                d.n2_incr_final);
  } else {
    std::printf("  trial stops at the interim\n");
  }
}

int run_decide(const CommonOpts& opts) {
  es::Config cfg = es::Config::parse_file(opts.config_path);
  if (!opts.variant_override.empty()) cfg.set("variant", opts.variant_override);
  const es::InterimCase one = es::interim_from_config(cfg);

  std::printf("interim inputs (log-rank convention / oriented):\n");
  std::printf("  z_full = %.4f / %.4f    z_subgroup = %.4f / %.4f\n",
              -one.snapshot.full.z1, one.snapshot.full.z1,
              -one.snapshot.subgroup.z1, one.snapshot.subgroup.z1);
  if (one.decision.variant != es::SurrogateWeighting::None)
    std::printf("  predicted_full = %.4f / %.4f    predicted_subgroup = %.4f / %.4f\n",
                -one.snapshot.full.predicted, one.snapshot.full.predicted,
                -one.snapshot.subgroup.predicted, one.snapshot.subgroup.predicted);
  std::printf("  events at interim: full %.0f, subgroup %.0f (planned total %.0f)\n\n",
              one.snapshot.full.counts.n1, one.snapshot.subgroup.counts.n1,
              one.snapshot.full.counts.n2);

  es::DecisionConfig benchmark = one.decision;
  benchmark.variant = es::SurrogateWeighting::None;
  print_decision(one.snapshot, es::decide(one.snapshot, benchmark),
                 "without surrogate information:");
  std::printf("\n");
  if (one.decision.variant != es::SurrogateWeighting::None) {
    std::string heading = std::string("with surrogate information (") +
                          es::variant_token(one.decision.variant) + "):";
    print_decision(one.snapshot, es::decide(one.snapshot, one.decision),
                   heading.c_str());
  }
  return 0;
}

int run_size(double hr, double alpha, double power, double margin,
             double allocation) {
  const long events = es::required_events(hr, alpha, power, allocation,
                                          margin);
  std::printf("one-sided alpha %.4f, power %.2f, allocation %.2g:1\n", alpha,
              power, allocation);
  std::printf("hazard ratio %.4g vs margin %.4g -> %ld events\n", hr, margin,
              events);
  if (margin < 1.0) {
    // Case-split approximation for margin designs: a case is a treatment
    // case with probability hr/(1+hr); test that proportion against the
    // margin's value.
    const double p1 = hr / (1.0 + hr);
    const double p0 = margin / (1.0 + margin);
    const double za = es::norm_quantile(1.0 - alpha);
    const double zb = es::norm_quantile(power);
    const double n = std::pow(za * std::sqrt(p0 * (1.0 - p0)) +
                                  zb * std::sqrt(p1 * (1.0 - p1)),
                              2.0) /
                     ((p1 - p0) * (p1 - p0));
    std::printf("binomial case-split approximation: %ld cases\n",
                static_cast<long>(std::ceil(n)));
    std::printf("  (VE %.1f%% vs margin VE %.1f%%)\n", es::ve_from_hr(hr),
                es::ve_from_hr(margin));
  }
  return 0;
}

int run_analyze(const std::string& path, double cut, const std::string& pop) {
  const es::SurvivalSample sample = es::SurvivalSample::load(path, cut);
  std::printf("%zu subjects, analysis cut at month %.2f\n",
              sample.subjects.size(), cut);
  const auto report = [&](es::Population p, const char* name) {
    try {
      const es::LogRankResult r = es::logrank_statistic(sample, p);
      std::printf("  %-9s events %4ld   log-rank z = %+.4f   oriented z = %+.4f\n",
                  name, r.events, -r.z_oriented, r.z_oriented);
    } catch (const std::exception& e) {
      std::printf("  %-9s %s\n", name, e.what());
    }
  };
  if (pop == "both" || pop == "F") report(es::Population::Full, "full");
  if (pop == "both" || pop == "S") report(es::Population::Subgroup, "subgroup");
  return 0;
}

int run_report(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv");
  std::printf("%-20s %-5s %8s %9s %10s %10s\n", "scenario", "var", "power",
              "dur(mo)", "events", "futility");
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> f;
    while (std::getline(row, field, ',')) f.push_back(field);
    if (f.size() < 18) continue;
    std::printf("%-20s %-5s %8s %9s %10s %10s\n", f[0].c_str(), f[1].c_str(),
                f[10].c_str(), f[12].c_str(), f[14].c_str(), f[9].c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-stage adaptive enrichment trial simulator"};
  app.require_subcommand(1);

  CommonOpts sim_opts, cal_opts, dec_opts;
  auto* sim = app.add_subcommand("simulate", "run a scenario grid and write CSV/JSON results");
  add_common(sim, sim_opts);
  auto* cal = app.add_subcommand("calibrate", "estimate null rejection rates (type I error)");
  add_common(cal, cal_opts);
  auto* dec = app.add_subcommand("decide", "one-shot interim decision from observed values");
  dec->add_option("--config", dec_opts.config_path, "interim config file")->required();
  dec->add_option("--variant", dec_opts.variant_override, "override variant");

  double hr = 0.6, alpha = 0.025, power = 0.9, margin = 1.0, allocation = 1.0;
  auto* size = app.add_subcommand("size", "event count for a log-rank design");
  size->add_option("--hr", hr, "alternative hazard ratio")->required();
  size->add_option("--alpha", alpha, "one-sided level (default 0.025)");
  size->add_option("--power", power, "target power (default 0.9)");
  size->add_option("--margin", margin, "hazard-ratio margin (default 1 = superiority)");
  size->add_option("--allocation", allocation, "treatment:control ratio (default 1)");

  std::string data_path, population = "both";
  double cut = 1e9;
  auto* ana = app.add_subcommand("analyze", "log-rank statistics from a subject file");
  ana->add_option("--data", data_path, "rows: arm subgroup enroll_month event_month")->required();
  ana->add_option("--cut", cut, "calendar analysis cut in months (default: all events)");
  ana->add_option("--population", population, "both, F, or S");

  std::string report_csv;
  auto* rep = app.add_subcommand("report", "summarize a results CSV");
  rep->add_option("--csv", report_csv, "results file from simulate")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(sim_opts, false);
    if (cal->parsed()) return run_simulate(cal_opts, true);
    if (dec->parsed()) return run_decide(dec_opts);
    if (size->parsed()) return run_size(hr, alpha, power, margin, allocation);
    if (ana->parsed()) return run_analyze(data_path, cut, population);
    if (rep->parsed()) return run_report(report_csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
