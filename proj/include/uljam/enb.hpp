#pragma once

#include <deque>
#include <map>
#include <set>
#include <vector>

#include "uljam/airframe.hpp"
#include "uljam/metrics.hpp"
#include "uljam/rng.hpp"
#include "uljam/scenario.hpp"

namespace uljam {

/// Lifecycle of a per-RNTI context at the base station.
enum class CtxState : uint8_t {
  PendingMsg3,      // RAR issued, waiting for the scheduled first message
  PendingComplete,  // Msg3 in, waiting for the connection-complete block
  Active,
  Suspended,        // link presumed lost; parameters kept for reestablishment
};

struct HarqSlot {
  bool busy = false;
  SubframeIndex fire_sf = 0;
  uint32_t rb_len = 0;
  int mcs = 0;
  uint32_t retx_count = 0;
  bool is_control = false;
  uint32_t granted_bytes = 0;
};

struct RetxRequest {
  uint8_t harq_id = 0;
  uint32_t rb_len = 0;
  int mcs = 0;
};

struct ConnectedUeContext {
  Rnti rnti;
  int ue_index = 0;
  CtxState state = CtxState::PendingMsg3;

  int mcs_index = 0;
  uint32_t weight = 1;  // granted-RB demand multiplier, doubled by adaptation

  PowerDb tpc_offset_db = 0.0;
  SubframeIndex next_pc_sf = 0;
  PowerDb last_sinr_db = 0.0;
  bool sinr_valid = false;

  uint32_t bsr_bytes = 0;
  uint32_t outstanding_bytes = 0;  // granted capacity not yet resolved

  // failure-rate window over the most recent samples (<= 64)
  uint64_t win_bits = 0;
  uint32_t win_count = 0;
  uint32_t win_fails = 0;
  uint32_t clean_streak = 0;
  SubframeIndex last_adapt_sf = 0;

  uint32_t pucch_fail_streak = 0;
  bool uci_on_pusch = false;
  SubframeIndex next_pucch_probe_sf = 0;
  SubframeIndex next_probe_grant_sf = 0;

  uint32_t dtx_streak = 0;
  SubframeIndex release_sf = 0;      // Suspended contexts expire here
  SubframeIndex proc_deadline = 0;   // PendingMsg3/PendingComplete watchdog
  SubframeIndex hop_deadline = 0;

  std::deque<RetxRequest> retx_queue;
  std::vector<HarqSlot> harq;
};

/// Output of one scheduling step. The grid describes the subframe
/// grant_delay later; the DCIs/RARs go on the air now.
struct ScheduleResult {
  DownlinkBroadcast broadcast;
};

/// Shares `avail` resource blocks among requests. Fully satisfies
/// everyone when possible; otherwise proportional to demand with the
/// remainder handed out round-robin in input (ascending-RNTI) order.
std::vector<uint32_t> proportional_share(const std::vector<uint32_t>& wants, uint32_t avail);

class EnbModel
{
public:
  EnbModel(const ScenarioConfig& cfg, Rng& rng, RunMetrics& metrics);

  /// Builds the grid for sf + grant_delay and emits this subframe's
  /// control messages. Also executes due RNTI hops.
  ScheduleResult schedule_subframe(SubframeIndex sf, RbGrid& grid_out);

  /// Consumes the decode results of subframe sf and produces downlink
  /// feedback. Drives HARQ, link adaptation, power control, PUCCH
  /// fallback and context lifecycle.
  std::vector<Feedback> process_uplink(SubframeIndex sf, const std::vector<UlRxResult>& results,
                                       const RbGrid& grid);

  const ConnectedUeContext* context_by_rnti(Rnti rnti) const;
  const std::vector<ConnectedUeContext>& contexts() const { return contexts_; }

  PowerDb tpc_for(Rnti rnti) const;

  /// Set when a hop occurred during schedule_subframe; consumed by the
  /// harness to deliver the reconfiguration over the (encrypted,
  /// unobservable) signalling bearer.
  struct HopNotice {
    int ue_index;
    Rnti old_rnti;
    Rnti new_rnti;
  };
  std::vector<HopNotice> take_hop_notices();

  uint64_t pool_rejections() const { return pool_rejections_; }

private:
  struct PendingRar {
    SubframeIndex emit_sf;
    RarGrant rar;
  };
  struct Msg3Reservation {
    SubframeIndex subframe;
    uint32_t rb_start;
    uint32_t rb_len;
    Rnti rnti;
  };
  struct GrantRequest {
    Rnti rnti;
    uint32_t rbs_wanted = 0;
    bool is_retx = false;
    RetxRequest retx;
    uint32_t new_bytes = 0;  // outstanding accounting for new-data grants
    int mcs = 0;
  };

  ConnectedUeContext* find_ctx(Rnti rnti);
  std::optional<Rnti> draw_rnti();
  void retire_rnti(Rnti rnti, SubframeIndex sf);
  bool rnti_in_use(Rnti rnti) const;
  void release_context(size_t idx, SubframeIndex sf);
  void suspend_context(ConnectedUeContext& ctx, SubframeIndex sf);

  void handle_preamble(SubframeIndex sf, const UplinkTx& tx);
  void append_adapt_sample(ConnectedUeContext& ctx, bool failed, SubframeIndex sf);
  void power_control_step(ConnectedUeContext& ctx, SubframeIndex sf);
  uint32_t probe_interval(int mcs) const;

  void emit(SubframeIndex sf, EventKind kind, uint16_t rnti, int64_t detail = 0);

  const ScenarioConfig& cfg_;
  Rng& rng_;
  RunMetrics& metrics_;
  DciCodecConfig codec_;

  std::vector<ConnectedUeContext> contexts_;
  std::vector<PendingRar> pending_rars_;
  std::vector<Msg3Reservation> msg3_reservations_;
  std::map<uint16_t, SubframeIndex> retired_;  // rnti -> reusable after
  // old rnti -> (new rnti, expiry): honours in-flight grants across hops
  std::map<uint16_t, std::pair<Rnti, SubframeIndex>> aliases_;
  std::vector<HopNotice> hop_notices_;
  uint64_t pool_rejections_ = 0;

  uint32_t interior_start_ = 0;
  uint32_t interior_len_ = 0;
};

} // namespace uljam
