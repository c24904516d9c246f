#pragma once

#include <optional>
#include <vector>

#include "uljam/airframe.hpp"
#include "uljam/metrics.hpp"
#include "uljam/scenario.hpp"

namespace uljam {

/// A grant recovered from the downlink, queued to be jammed when the
/// corresponding uplink transmission happens (grant delay later).
struct TrackedGrant {
  Rnti rnti;
  SubframeIndex fire_subframe = 0;
  uint32_t rb_start = 0;
  uint32_t rb_len = 0;
};

/// One contiguous burst of interference in one subframe.
struct JamEmission {
  uint32_t rb_start = 0;
  uint32_t rb_len = 0;
  PowerDb power_db = 0.0;  // received level at the eNB
};

class JammerModel
{
public:
  JammerModel(const ScenarioConfig& cfg, RunMetrics& metrics);

  /// Reconnaissance result: the victim RNTI the attacker targets.
  /// Bound by the harness when the victim first connects.
  void bind_victim(Rnti rnti);

  /// Phase 2: eavesdrop on the control channel. Targeted mode blind-
  /// decodes against the candidate set; PRATTLE consumes every RAR.
  void observe_downlink(SubframeIndex sf, const DownlinkBroadcast& broadcast);

  /// Phase 3: interference for this subframe. Empty outside the active
  /// window and during duty-cycle-off phases.
  std::vector<JamEmission> emit_interference(SubframeIndex sf);

  bool active_at(SubframeIndex sf) const;
  std::optional<Rnti> target() const { return target_; }

private:
  const ScenarioConfig& cfg_;
  RunMetrics& metrics_;
  DciCodecConfig codec_;

  std::optional<Rnti> target_;
  std::vector<TrackedGrant> tracked_;
  SubframeIndex active_start_sf_ = 0;
  SubframeIndex active_end_sf_ = 0;
  PowerDb emission_power_db_ = 0.0;
};

} // namespace uljam
