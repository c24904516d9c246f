#pragma once

#include <string>
#include <vector>

#include "uljam/metrics.hpp"
#include "uljam/scenario.hpp"

namespace uljam {

struct SweepRow {
  PowerDb gain_db = 0.0;
  uint32_t run = 0;
  RunMetrics metrics;
};

struct SweepTable {
  std::vector<SweepRow> rows;  // ordered by (gain, run)
};

/// Per-cell seed: base_seed XOR a hash of (gain, run); rows are
/// reproducible independently of execution order or thread count.
uint64_t sweep_cell_seed(uint64_t base_seed, PowerDb gain_db, uint32_t run);

/// Runs every (gain, run) cell, in parallel across hardware threads.
SweepTable run_sweep(const SweepConfig& sweep, unsigned max_threads = 0);

/// Summary CSV. Columns:
/// gain_db,run,offered,received,dropped,retransmissions,rnti_changes,crashed,time_to_recovery_s
std::string sweep_csv(const SweepTable& table);
std::string run_summary_csv(const RunMetrics& metrics, PowerDb gain_db);

/// Time-series CSV. Columns: bin_start_s,received_in_bin
std::string series_csv(const RunMetrics& metrics);

void write_file(const std::string& path, const std::string& content);

} // namespace uljam
