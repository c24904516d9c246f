#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "uljam/events.hpp"

namespace uljam {

/// Attacker exposure accounting: how much spectrum-time and energy the
/// jammer spent on the air.
struct ExposureMetric {
  uint64_t rb_subframes = 0;
  double energy_linear = 0.0;  // sum of linear power over jammed RBs
};

/// Always-on trace audit counters; all must stay zero in a correct run.
struct AuditCounters {
  uint64_t rb_double_bookings = 0;
  uint64_t grant_delay_violations = 0;
  uint64_t conservation_violations = 0;
  uint64_t tx_outside_grant = 0;
  uint64_t jam_outside_window = 0;
  uint64_t targeted_jam_mismatches = 0;

  uint64_t total() const
  {
    return rb_double_bookings + grant_delay_violations + conservation_violations +
           tx_outside_grant + jam_outside_window + targeted_jam_mismatches;
  }
};

struct RunMetrics {
  uint64_t packets_offered = 0;
  uint64_t packets_received = 0;
  uint64_t packets_dropped = 0;   // buffer overflow + HARQ exhaustion + connection loss
  uint64_t retransmissions = 0;
  uint64_t rnti_changes = 0;
  bool crashed = false;

  uint32_t bin_ms = 100;
  std::vector<uint32_t> throughput_series;  // received packets per bin

  std::vector<Event> rrc_events;
  std::optional<double> time_to_recovery_s;

  ExposureMetric exposure;
  AuditCounters audit;

  // end-of-run residuals for the packet-conservation ledger
  uint64_t buffer_residual = 0;
  uint64_t in_flight_residual = 0;

  // attacker-side observables used by the mitigation checks
  uint64_t jammer_tracked_grants = 0;
  uint64_t jammer_tracked_after_first_hop = 0;
  std::optional<SubframeIndex> first_hop_sf;
  std::optional<SubframeIndex> fresh_connect_sf;
  std::optional<SubframeIndex> last_jam_emission_sf;

  uint64_t rlf_events = 0;
  uint64_t procedure_failures = 0;

  uint64_t count_events(EventKind kind) const
  {
    uint64_t n = 0;
    for (const Event& e : rrc_events) {
      if (e.kind == kind) {
        ++n;
      }
    }
    return n;
  }
};

} // namespace uljam
