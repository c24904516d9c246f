#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uljam/phy.hpp"

namespace uljam {

struct SummaryRow {
  double gain_db = 0.0;
  uint32_t run = 0;
  uint64_t offered = 0;
  uint64_t received = 0;
  uint64_t dropped = 0;
  uint64_t retransmissions = 0;
  uint64_t rnti_changes = 0;
  bool crashed = false;
  std::optional<double> time_to_recovery_s;
};

std::vector<SummaryRow> parse_summary_csv(const std::string& content);
std::vector<std::pair<double, uint32_t>> parse_series_csv(const std::string& content);

std::vector<SummaryRow> load_summary_csv(const std::string& path);
std::vector<std::pair<double, uint32_t>> load_series_csv(const std::string& path);

struct GainStat {
  double gain_db = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  uint32_t runs = 0;
};

/// Mean/stddev of received packets per gain, ordered by gain.
std::vector<GainStat> received_by_gain(const std::vector<SummaryRow>& rows);

struct CompareReport {
  bool pass = false;
  std::vector<std::string> lines;  // one measured check per line
};

/// Low-gain control-channel contrast: PUCCH-only jamming must be
/// lossless while the same gain aimed at the shared channel causes
/// retransmissions.
CompareReport check_fig4_low(const std::vector<SummaryRow>& pucch,
                             const std::vector<SummaryRow>& pusch);

/// High-gain contrast on the in-window series: the targeted attack
/// starves the victim while PUCCH-only jamming stays survivable.
CompareReport check_fig4_high(const std::vector<std::pair<double, uint32_t>>& pucch_series,
                              const std::vector<std::pair<double, uint32_t>>& pusch_series,
                              double window_start_s, double window_end_s,
                              double offered_per_s);

/// Received-vs-gain curve shape with and without link adaptation:
/// exact baseline plateau, onset decline, an adaptation-driven local
/// recovery, and no such recovery in the ablation.
CompareReport check_fig5_shape(const std::vector<SummaryRow>& adapt_on,
                               const std::vector<SummaryRow>& adapt_off);

/// RNTI hopping ablation at one gain.
CompareReport check_mitigation_hopping(const std::vector<SummaryRow>& hopping,
                                       const std::vector<SummaryRow>& fixed);

/// All numeric deltas between two summary tables are zero.
CompareReport check_identical(const std::vector<SummaryRow>& a,
                              const std::vector<SummaryRow>& b);

} // namespace uljam
