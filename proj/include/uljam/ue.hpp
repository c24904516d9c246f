#pragma once

#include <array>
#include <optional>
#include <vector>

#include "uljam/airframe.hpp"
#include "uljam/metrics.hpp"
#include "uljam/rng.hpp"
#include "uljam/scenario.hpp"

namespace uljam {

enum class UeState : uint8_t {
  Idle,
  RandomAccess,
  Connected,
  Reestablishing,
  BackOff,
  CellBarred,
  Crashed,
};

/// Exponentially growing backoff, capped per modem profile.
double backoff_duration_s(const UeProfile& prof, uint32_t failure_count);

class UeModel
{
public:
  UeModel(int index, const ScenarioConfig& cfg, const UeProfile& prof,
          SubframeIndex connect_at_sf, RunMetrics& metrics);

  /// Phase 2: blind-decode this subframe's control channel and pick up
  /// RARs addressed to our preamble.
  void observe_downlink(SubframeIndex sf, const DownlinkBroadcast& broadcast,
                        ScramblingMode mode, const DciCodecConfig& codec);

  /// Phase 3: emit this subframe's transmissions (grants fired for this
  /// subframe, Msg3, preamble, PUCCH). Power levels are filled by the
  /// harness.
  void collect_tx(SubframeIndex sf, std::vector<UplinkTx>& out);

  /// Phase 6a: HARQ feedback for one of our blocks.
  void handle_feedback(SubframeIndex sf, const Feedback& fb, PowerDb sinr_db, Rng& rng);

  /// Phase 6b: timers, traffic arrival, state transitions.
  void step(SubframeIndex sf, Rng& rng);

  /// RNTI reconfiguration over encrypted signalling.
  void notify_hop(SubframeIndex sf, Rnti new_rnti, SubframeIndex alias_expiry);

  /// Cell-selection verdict gate: a blocked UE never leaves Idle.
  void block_cell() { cell_blocked_ = true; }

  UeState state() const { return state_; }
  Rnti rnti() const { return rnti_; }
  bool matches(Rnti r) const;
  int index() const { return index_; }
  uint32_t buffer_packets() const { return buffer_pkts_; }
  uint64_t offered() const { return offered_; }
  uint64_t dropped() const { return dropped_; }
  uint32_t in_flight_packets() const;
  uint64_t delivered() const { return delivered_; }

  SubframeIndex traffic_end_sf = 0;  // set by the harness

private:
  enum class ProcPhase : uint8_t { None, WaitRar, WaitMsg3, WaitConnected };

  struct HarqProc {
    bool busy = false;
    uint32_t n_packets = 0;
    bool is_control = false;
  };
  struct PendingGrant {
    UplinkDci dci;
    Rnti rnti;
    SubframeIndex fire_sf = 0;
  };

  void start_attempt(SubframeIndex sf);
  void procedure_failed(SubframeIndex sf);
  void enter_backoff(SubframeIndex sf);
  void bar_cell(SubframeIndex sf);
  void detect_rlf(SubframeIndex sf, Rng& rng);
  void drop_in_flight();
  void clear_buffer_as_dropped();
  void emit(SubframeIndex sf, EventKind kind, uint16_t rnti, int64_t detail = 0);

  int index_;
  const ScenarioConfig& cfg_;
  const UeProfile& prof_;
  RunMetrics& metrics_;

  UeState state_ = UeState::Idle;
  ProcPhase phase_ = ProcPhase::None;

  Rnti rnti_{0};
  bool has_rnti_ = false;
  std::optional<Rnti> prev_rnti_;
  std::vector<std::pair<Rnti, SubframeIndex>> rnti_aliases_;
  std::optional<Rnti> last_connected_rnti_;

  SubframeIndex connect_at_sf_ = 0;
  bool cell_blocked_ = false;
  bool cell_blocked_reported_ = false;

  uint32_t attempt_ = 0;            // current procedure attempt, 1-based
  bool episode_reestablish_ = false;
  bool escape_episode_ = false;     // fresh connection after declared total loss
  bool preamble_pending_ = false;
  SubframeIndex proc_deadline_ = 0;
  SubframeIndex msg3_sf_ = 0;
  uint32_t msg3_rb_start_ = 0;
  uint32_t msg3_rb_len_ = 0;
  SubframeIndex backoff_until_ = 0;
  SubframeIndex barred_until_ = 0;

  uint32_t buffer_pkts_ = 0;
  uint64_t offered_ = 0;
  uint64_t dropped_ = 0;
  uint64_t delivered_ = 0;

  std::array<HarqProc, 8> procs_{};
  std::vector<PendingGrant> pending_grants_;

  uint32_t consec_fails_ = 0;
  PowerDb last_fb_sinr_db_ = 0.0;
  PowerDb last_fb_tpc_db_ = 0.0;
  bool fb_seen_ = false;
};

} // namespace uljam
