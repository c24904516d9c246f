#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uljam/dci.hpp"
#include "uljam/phy.hpp"

namespace uljam {

enum class RntiPolicy : uint8_t { ReuseOnReestablish, FreshPerConnection, Hopping };

struct PowerControlConfig {
  PowerDb target_sinr_db = 19.0;
  PowerDb margin_db = 1.0;
  PowerDb max_headroom_db = 3.0;   // cap on positive TPC offset
  PowerDb max_reduction_db = 6.0;  // cap on negative TPC offset
  uint32_t interval_subframes = 8;
};

struct SchedulerConfig {
  uint32_t grant_delay_subframes = 4;
  bool adaptation_enabled = true;
  double adaptation_fail_threshold = 0.1;
  uint32_t adaptation_window = 50;       // failure-rate window, in samples
  uint32_t adaptation_min_samples = 8;   // samples required before a down-step
  uint32_t adaptation_holdoff_subframes = 32;  // settle time between down-steps
  double probe_backoff_base = 2.0;       // up-probe interval grows by this per step below top
  uint32_t pucch_fallback_threshold = 8; // consecutive PUCCH failures
  uint32_t pucch_probe_interval = 100;   // subframes between PUCCH re-probes
  RntiPolicy rnti_policy = RntiPolicy::ReuseOnReestablish;
  uint32_t hopping_period = 500;         // subframes, Hopping policy only
  PowerControlConfig power_control;
};

struct RachConfig {
  uint32_t rar_delay_subframes = 3;
  uint32_t msg3_offset_subframes = 1;  // msg3_subframe = rar + 4 + offset
  uint32_t msg3_rbs = 2;
  uint32_t msg3_mcs = 0;
  uint32_t proc_timeout_subframes = 40;
  uint32_t completion_bytes = 64;      // connection-complete control block
  uint32_t signalling_mcs_cap = 2;     // procedure blocks ride a robust MCS
  uint32_t preamble_rbs = 6;
  PowerDb preamble_min_sinr_db = -6.0;
  PowerDb pucch_min_sinr_db = 0.0;
  uint32_t rnti_retire_subframes = 100;
  uint32_t dtx_suspend_threshold = 48;  // consecutive silent grants before suspend
};

struct TrafficConfig {
  uint32_t packet_size_bytes = 800;
  uint32_t interval_subframes = 1;
  uint32_t buffer_capacity_packets = 500;
};

struct HarqConfig {
  uint32_t processes = 8;
  uint32_t max_retx = 4;
};

struct UeProfile {
  std::string name = "modem-a";
  bool reestablish_with_previous_rnti = true;
  std::optional<PowerDb> fresh_connection_sinr_deficit_db;  // total-loss escape trigger
  double backoff_base_s = 2.0;
  double backoff_growth = 2.0;
  double backoff_cap_s = 12.0;
  uint32_t max_rach_attempts = 6;  // [6, 200]
  double barring_s = 300.0;        // <= 300
  uint32_t rlf_consecutive_failures = 40;
  double crash_probability_per_rlf = 0.0;
};

enum class JammerKind : uint8_t { None, Barrage, PucchJam, PuschTargeted, Prattle };

struct JammerConfig {
  JammerKind kind = JammerKind::None;
  PowerDb gain_db = 0.0;
  double active_start_s = 6.0;
  double active_end_s = 45.0;
  double duty_cycle = 1.0;
  uint32_t duty_period_subframes = 100;
  /// Targeted mode: RNTI candidates for blind decoding. The sentinel
  /// "victim" binds to the victim's first assigned RNTI, standing in
  /// for out-of-band reconnaissance.
  bool target_is_victim = true;
  std::vector<Rnti> explicit_candidates;
};

struct GridConfig {
  uint32_t total_rbs = 100;
  uint32_t pucch_edge_rbs = 2;
};

struct UeInstanceConfig {
  std::string profile = "modem-a";
  double connect_at_s = 0.0;
};

struct SibAuthConfig {
  bool enabled = false;
  bool spoofed_barring = false;  // inject a forged clone advertising cellBarred
  std::string public_key_path;
  std::string private_key_path;
};

struct ScenarioConfig {
  double duration_s = 60.0;
  uint64_t seed = 1;
  uint32_t flush_subframes = 100;  // post-traffic tail so in-flight data settles
  GridConfig grid;
  LinkBudget budget;
  McsTable mcs;
  SchedulerConfig sched;
  RachConfig rach;
  TrafficConfig traffic;
  HarqConfig harq;
  std::vector<UeProfile> profiles;
  std::vector<UeInstanceConfig> ues;
  JammerConfig jammer;
  ScramblingMode scrambling = ScramblingMode::CrcMaskOnly;
  SibAuthConfig sib_auth;

  uint32_t duration_subframes() const { return static_cast<uint32_t>(duration_s * 1000.0); }
  uint32_t total_subframes() const { return duration_subframes() + flush_subframes; }
  const UeProfile& profile(const std::string& name) const;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct SweepConfig {
  std::vector<PowerDb> gains_db;
  uint32_t runs_per_gain = 20;
  ScenarioConfig base;

  void validate() const;
};

/// Built-in defaults matching the shipped baseline scenario.
ScenarioConfig default_scenario();

/// Default sweep: gains 1,3,...,35 dB, 20 runs per gain.
SweepConfig default_sweep(const ScenarioConfig& base);

ScenarioConfig load_scenario(const std::string& path);

/// Loads the scenario's optional "sweep" block; falls back to the
/// default gain ladder when absent.
SweepConfig load_sweep(const std::string& path);

} // namespace uljam
