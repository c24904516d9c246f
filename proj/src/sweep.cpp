#include "uljam/sweep.hpp"

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "uljam/sim.hpp"

namespace uljam {

uint64_t sweep_cell_seed(uint64_t base_seed, PowerDb gain_db, uint32_t run)
{
  const auto gain_centi = static_cast<int64_t>(std::llround(gain_db * 100.0));
  const uint64_t mix =
      splitmix64((static_cast<uint64_t>(gain_centi) << 20) ^ static_cast<uint64_t>(run));
  return base_seed ^ mix;
}

SweepTable run_sweep(const SweepConfig& sweep, unsigned max_threads)
{
  sweep.validate();
  const size_t n_cells = sweep.gains_db.size() * sweep.runs_per_gain;

  SweepTable table;
  table.rows.resize(n_cells);

  unsigned n_threads = max_threads ? max_threads : std::thread::hardware_concurrency();
  if (n_threads == 0) {
    n_threads = 1;
  }
  n_threads = static_cast<unsigned>(std::min<size_t>(n_threads, n_cells));

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t cell = next.fetch_add(1);
      if (cell >= n_cells) {
        return;
      }
      const size_t gi = cell / sweep.runs_per_gain;
      const uint32_t run = static_cast<uint32_t>(cell % sweep.runs_per_gain);
      ScenarioConfig cfg = sweep.base;
      cfg.jammer.gain_db = sweep.gains_db[gi];
      cfg.seed = sweep_cell_seed(sweep.base.seed, sweep.gains_db[gi], run);
      Simulation sim(cfg);
      SweepRow& row = table.rows[cell];
      row.gain_db = sweep.gains_db[gi];
      row.run = run;
      row.metrics = sim.run();
    }
  };

  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
      pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
      t.join();
    }
  }
  return table;
}

namespace {

// Locale-independent formatting: '.' decimal separator, no exponent.
std::string format_gain(PowerDb v)
{
  char buf[48];
  if (std::abs(v - std::llround(v)) < 1e-9) {
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(std::llround(v)));
  } else {
    std::snprintf(buf, sizeof(buf), "%.2f", v);
  }
  return buf;
}

void append_row(std::string& out, PowerDb gain, uint32_t run, const RunMetrics& m)
{
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%u,%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%d,",
                format_gain(gain).c_str(), run, m.packets_offered, m.packets_received,
                m.packets_dropped, m.retransmissions, m.rnti_changes, m.crashed ? 1 : 0);
  out += buf;
  if (m.time_to_recovery_s) {
    std::snprintf(buf, sizeof(buf), "%.3f", *m.time_to_recovery_s);
    out += buf;
  }
  out += '\n';
}

} // namespace

std::string sweep_csv(const SweepTable& table)
{
  std::string out =
      "gain_db,run,offered,received,dropped,retransmissions,rnti_changes,crashed,"
      "time_to_recovery_s\n";
  for (const SweepRow& row : table.rows) {
    append_row(out, row.gain_db, row.run, row.metrics);
  }
  return out;
}

std::string run_summary_csv(const RunMetrics& metrics, PowerDb gain_db)
{
  std::string out =
      "gain_db,run,offered,received,dropped,retransmissions,rnti_changes,crashed,"
      "time_to_recovery_s\n";
  append_row(out, gain_db, 0, metrics);
  return out;
}

std::string series_csv(const RunMetrics& metrics)
{
  std::string out = "bin_start_s,received_in_bin\n";
  char buf[64];
  for (size_t b = 0; b < metrics.throughput_series.size(); ++b) {
    std::snprintf(buf, sizeof(buf), "%.1f,%u\n",
                  static_cast<double>(b) * metrics.bin_ms / 1000.0,
                  metrics.throughput_series[b]);
    out += buf;
  }
  return out;
}

void write_file(const std::string& path, const std::string& content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path);
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

} // namespace uljam
