// Command-line front end: single runs, gain sweeps, paired-run checks
// and system-information corpus verification.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "uljam/compare.hpp"
#include "uljam/sib_auth.hpp"
#include "uljam/sim.hpp"
#include "uljam/sweep.hpp"

using namespace uljam;

namespace {

int cmd_simulate(const std::string& config_path, uint64_t seed, bool seed_set,
                 const std::string& out_path, const std::string& series_path,
                 const std::string& events_path)
{
  ScenarioConfig cfg = load_scenario(config_path);
  if (seed_set) {
    cfg.seed = seed;
  }
  const RunMetrics m = run_scenario(cfg);

  std::printf("offered=%llu received=%llu dropped=%llu retx=%llu rnti_changes=%llu crashed=%d\n",
              static_cast<unsigned long long>(m.packets_offered),
              static_cast<unsigned long long>(m.packets_received),
              static_cast<unsigned long long>(m.packets_dropped),
              static_cast<unsigned long long>(m.retransmissions),
              static_cast<unsigned long long>(m.rnti_changes), m.crashed ? 1 : 0);
  if (m.time_to_recovery_s) {
    std::printf("time_to_recovery_s=%.3f\n", *m.time_to_recovery_s);
  }
  std::printf("exposure_rb_subframes=%llu rlf_events=%llu audit_violations=%llu\n",
              static_cast<unsigned long long>(m.exposure.rb_subframes),
              static_cast<unsigned long long>(m.rlf_events),
              static_cast<unsigned long long>(m.audit.total()));

  if (!out_path.empty()) {
    write_file(out_path, run_summary_csv(m, cfg.jammer.gain_db));
  }
  if (!series_path.empty()) {
    write_file(series_path, series_csv(m));
  }
  if (!events_path.empty()) {
    std::string out = "subframe,event,rnti,detail\n";
    char buf[96];
    for (const Event& e : m.rrc_events) {
      std::snprintf(buf, sizeof(buf), "%u,%s,%u,%lld\n", e.subframe, event_kind_name(e.kind),
                    e.rnti, static_cast<long long>(e.detail));
      out += buf;
    }
    write_file(events_path, out);
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, uint64_t seed, bool seed_set,
              const std::string& out_path, unsigned threads)
{
  SweepConfig sweep = load_sweep(config_path);
  if (seed_set) {
    sweep.base.seed = seed;
  }
  const SweepTable table = run_sweep(sweep, threads);
  const std::string csv = sweep_csv(table);
  if (!out_path.empty()) {
    write_file(out_path, csv);
  } else {
    std::fputs(csv.c_str(), stdout);
  }
  uint64_t audit = 0;
  for (const SweepRow& row : table.rows) {
    audit += row.metrics.audit.total();
  }
  std::fprintf(stderr, "sweep done: %zu rows, audit_violations=%llu\n", table.rows.size(),
               static_cast<unsigned long long>(audit));
  return 0;
}

int cmd_compare(const std::string& check, const std::string& a_path, const std::string& b_path,
                double window_start, double window_end, double rate_per_s)
{
  CompareReport rep;
  if (check == "fig4_low") {
    rep = check_fig4_low(load_summary_csv(a_path), load_summary_csv(b_path));
  } else if (check == "fig4_high") {
    rep = check_fig4_high(load_series_csv(a_path), load_series_csv(b_path), window_start,
                          window_end, rate_per_s);
  } else if (check == "fig5_shape") {
    rep = check_fig5_shape(load_summary_csv(a_path), load_summary_csv(b_path));
  } else if (check == "mitigation_hopping") {
    rep = check_mitigation_hopping(load_summary_csv(a_path), load_summary_csv(b_path));
  } else if (check == "identical") {
    rep = check_identical(load_summary_csv(a_path), load_summary_csv(b_path));
  } else {
    std::fprintf(stderr, "unknown check '%s'\n", check.c_str());
    return 1;
  }
  for (const std::string& line : rep.lines) {
    std::printf("%s\n", line.c_str());
  }
  std::printf("%s: %s\n", check.c_str(), rep.pass ? "PASS" : "FAIL");
  return rep.pass ? 0 : 2;
}

int cmd_sibauth(const std::string& corpus_path, const std::string& pubkey_path)
{
  const OperatorKeyPair key = OperatorKeyPair::public_from_pem_file(pubkey_path);
  const auto corpus = load_sib_corpus(corpus_path);
  const int mismatches = run_sib_corpus(corpus, key);
  std::printf("%zu records, %d verdict mismatches\n", corpus.size(), mismatches);
  return mismatches == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"LTE uplink jamming simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, series_path, events_path;
  uint64_t seed = 0;
  unsigned threads = 0;

  CLI::App* sim = app.add_subcommand("simulate", "run one scenario");
  sim->add_option("--config", config_path, "scenario file")->required();
  CLI::Option* sim_seed = sim->add_option("--seed", seed, "seed override");
  sim->add_option("--out", out_path, "summary csv path");
  sim->add_option("--series", series_path, "throughput series csv path");
  sim->add_option("--events", events_path, "event log csv path");

  CLI::App* swp = app.add_subcommand("sweep", "run a gain sweep");
  swp->add_option("--config", config_path, "scenario file")->required();
  CLI::Option* swp_seed = swp->add_option("--seed", seed, "base seed override");
  swp->add_option("--out", out_path, "sweep csv path");
  swp->add_option("--threads", threads, "worker threads (0 = auto)");

  std::string check, a_path, b_path;
  double window_start = 6.0, window_end = 45.0, rate = 1000.0;
  CLI::App* cmp = app.add_subcommand("compare", "paired-run checks");
  cmp->add_option("--check", check, "check name")->required();
  cmp->add_option("--a", a_path, "first csv")->required();
  cmp->add_option("--b", b_path, "second csv")->required();
  cmp->add_option("--window-start", window_start, "window start (s)");
  cmp->add_option("--window-end", window_end, "window end (s)");
  cmp->add_option("--rate", rate, "offered packets per second");

  std::string corpus_path, pubkey_path;
  CLI::App* sib = app.add_subcommand("sibauth", "verify a broadcast corpus");
  sib->add_option("--corpus", corpus_path, "corpus file")->required();
  sib->add_option("--public-key", pubkey_path, "operator public key (PEM)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return cmd_simulate(config_path, seed, !sim_seed->empty(), out_path, series_path,
                          events_path);
    }
    if (swp->parsed()) {
      return cmd_sweep(config_path, seed, !swp_seed->empty(), out_path, threads);
    }
    if (cmp->parsed()) {
      return cmd_compare(check, a_path, b_path, window_start, window_end, rate);
    }
    if (sib->parsed()) {
      return cmd_sibauth(corpus_path, pubkey_path);
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
