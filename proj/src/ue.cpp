#include "uljam/ue.hpp"

#include <algorithm>
#include <cmath>

namespace uljam {

double backoff_duration_s(const UeProfile& prof, uint32_t failure_count)
{
  if (failure_count < 1) {
    failure_count = 1;
  }
  const double raw =
      prof.backoff_base_s * std::pow(prof.backoff_growth, static_cast<double>(failure_count - 1));
  return std::min(raw, prof.backoff_cap_s);
}

UeModel::UeModel(int index, const ScenarioConfig& cfg, const UeProfile& prof,
                 SubframeIndex connect_at_sf, RunMetrics& metrics)
    : index_(index), cfg_(cfg), prof_(prof), metrics_(metrics), connect_at_sf_(connect_at_sf)
{
  traffic_end_sf = cfg.duration_subframes();
}

void UeModel::emit(SubframeIndex sf, EventKind kind, uint16_t rnti, int64_t detail)
{
  metrics_.rrc_events.push_back(Event{sf, kind, rnti, detail});
}

bool UeModel::matches(Rnti r) const
{
  if (has_rnti_ && rnti_ == r) {
    return true;
  }
  for (const auto& [alias, expiry] : rnti_aliases_) {
    if (alias == r) {
      return true;
    }
  }
  return false;
}

uint32_t UeModel::in_flight_packets() const
{
  uint32_t n = 0;
  for (const HarqProc& p : procs_) {
    if (p.busy) {
      n += p.n_packets;
    }
  }
  return n;
}

void UeModel::drop_in_flight()
{
  for (HarqProc& p : procs_) {
    if (p.busy) {
      dropped_ += p.n_packets;
      metrics_.packets_dropped += p.n_packets;
    }
    p = HarqProc{};
  }
  pending_grants_.clear();
}

void UeModel::clear_buffer_as_dropped()
{
  dropped_ += buffer_pkts_;
  metrics_.packets_dropped += buffer_pkts_;
  buffer_pkts_ = 0;
}

void UeModel::start_attempt(SubframeIndex sf)
{
  state_ = episode_reestablish_ ? UeState::Reestablishing : UeState::RandomAccess;
  phase_ = ProcPhase::WaitRar;
  preamble_pending_ = true;
  proc_deadline_ = sf + cfg_.rach.proc_timeout_subframes;
  if (attempt_ == 0) {
    attempt_ = 1;
  }
}

void UeModel::enter_backoff(SubframeIndex sf)
{
  const double dur_s = backoff_duration_s(prof_, attempt_);
  backoff_until_ = sf + static_cast<SubframeIndex>(dur_s * 1000.0);
  state_ = UeState::BackOff;
  phase_ = ProcPhase::None;
  emit(sf, EventKind::BackoffEnter, has_rnti_ ? rnti_.value : 0,
       static_cast<int64_t>(dur_s * 1000.0));
}

void UeModel::bar_cell(SubframeIndex sf)
{
  barred_until_ = sf + static_cast<SubframeIndex>(prof_.barring_s * 1000.0);
  state_ = UeState::CellBarred;
  phase_ = ProcPhase::None;
  has_rnti_ = false;
  emit(sf, EventKind::Barred, 0, static_cast<int64_t>(prof_.barring_s * 1000.0));
}

void UeModel::procedure_failed(SubframeIndex sf)
{
  ++metrics_.procedure_failures;
  emit(sf, EventKind::ProcedureFailed, has_rnti_ ? rnti_.value : 0, attempt_);
  for (HarqProc& p : procs_) {
    p = HarqProc{};  // only control blocks can be in flight here
  }
  pending_grants_.clear();
  phase_ = ProcPhase::None;
  if (attempt_ >= prof_.max_rach_attempts) {
    bar_cell(sf);
  } else {
    enter_backoff(sf);
  }
}

void UeModel::detect_rlf(SubframeIndex sf, Rng& rng)
{
  ++metrics_.rlf_events;
  emit(sf, EventKind::Rlf, rnti_.value, consec_fails_);
  consec_fails_ = 0;
  drop_in_flight();

  if (prof_.crash_probability_per_rlf > 0.0 &&
      rng.next_double() < prof_.crash_probability_per_rlf) {
    state_ = UeState::Crashed;
    phase_ = ProcPhase::None;
    metrics_.crashed = true;
    emit(sf, EventKind::Crashed, rnti_.value);
    return;
  }

  const PowerDb deficit =
      (cfg_.budget.ue_signal_db - cfg_.budget.noise_floor_db) -
      (last_fb_sinr_db_ - last_fb_tpc_db_);
  if (prof_.fresh_connection_sinr_deficit_db.has_value() && fb_seen_ &&
      deficit > *prof_.fresh_connection_sinr_deficit_db) {
    // Total connection loss assumed: abandon the old identity and start
    // an entirely new connection. The transmit buffer does not survive.
    emit(sf, EventKind::FreshConnectStart, rnti_.value, rnti_.value);
    clear_buffer_as_dropped();
    prev_rnti_.reset();
    has_rnti_ = false;
    episode_reestablish_ = false;
    escape_episode_ = true;
    attempt_ = 1;
    start_attempt(sf);
    return;
  }

  emit(sf, EventKind::ReestablishStart, rnti_.value, rnti_.value);
  prev_rnti_ = rnti_;
  has_rnti_ = false;
  episode_reestablish_ = true;
  escape_episode_ = false;
  attempt_ = 1;
  start_attempt(sf);
}

void UeModel::observe_downlink(SubframeIndex sf, const DownlinkBroadcast& broadcast,
                               ScramblingMode mode, const DciCodecConfig& codec)
{
  if (state_ == UeState::Crashed || state_ == UeState::CellBarred ||
      state_ == UeState::BackOff || state_ == UeState::Idle) {
    return;
  }

  if (phase_ == ProcPhase::WaitRar) {
    for (const RarGrant& rar : broadcast.rars) {
      if (rar.preamble_id == static_cast<uint32_t>(index_)) {
        rnti_ = rar.assigned_rnti;
        has_rnti_ = true;
        msg3_sf_ = rar.msg3_subframe;
        msg3_rb_start_ = rar.msg3_rb_start;
        msg3_rb_len_ = rar.msg3_rb_len;
        phase_ = ProcPhase::WaitMsg3;
        break;
      }
    }
  }

  if (!has_rnti_) {
    return;
  }
  if (state_ != UeState::Connected && phase_ != ProcPhase::WaitConnected) {
    return;
  }

  std::vector<Rnti> candidates{rnti_};
  for (const auto& [alias, expiry] : rnti_aliases_) {
    candidates.push_back(alias);
  }
  const auto matches = blind_decode(broadcast.dcis, candidates, mode, codec);
  const SubframeIndex fire = sf + cfg_.sched.grant_delay_subframes;
  for (const auto& [rnti, dci] : matches) {
    pending_grants_.push_back(PendingGrant{dci, rnti, fire});
  }
}

void UeModel::collect_tx(SubframeIndex sf, std::vector<UplinkTx>& out)
{
  if (state_ == UeState::Crashed || state_ == UeState::CellBarred ||
      state_ == UeState::BackOff || state_ == UeState::Idle) {
    return;
  }

  if (preamble_pending_) {
    preamble_pending_ = false;
    UplinkTx tx;
    tx.type = UlTxType::Preamble;
    tx.ue_index = index_;
    tx.preamble_id = static_cast<uint32_t>(index_);
    tx.rb_start = cfg_.grid.pucch_edge_rbs;
    tx.rb_len = cfg_.rach.preamble_rbs;
    if (episode_reestablish_ && prev_rnti_) {
      tx.reestablish_rnti = prev_rnti_;
    }
    out.push_back(tx);
    return;  // nothing else goes out while waiting for the RAR
  }

  if (phase_ == ProcPhase::WaitMsg3 && sf == msg3_sf_ && has_rnti_) {
    UplinkTx tx;
    tx.type = UlTxType::Msg3;
    tx.ue_index = index_;
    tx.rnti = rnti_;
    tx.rb_start = msg3_rb_start_;
    tx.rb_len = msg3_rb_len_;
    tx.mcs_index = static_cast<int>(cfg_.rach.msg3_mcs);
    out.push_back(tx);
    phase_ = ProcPhase::WaitConnected;
  }

  // Grants fired for this subframe.
  for (size_t i = pending_grants_.size(); i-- > 0;) {
    if (pending_grants_[i].fire_sf != sf) {
      continue;
    }
    const PendingGrant grant = pending_grants_[i];
    pending_grants_.erase(pending_grants_.begin() + static_cast<long>(i));

    const UplinkDci& dci = grant.dci;
    UplinkTx tx;
    tx.type = UlTxType::Data;
    tx.ue_index = index_;
    tx.rnti = grant.rnti;
    tx.rb_start = dci.rb_start;
    tx.rb_len = dci.rb_len;
    tx.mcs_index = static_cast<int>(dci.mcs_index);
    tx.harq_id = dci.harq_id;

    HarqProc& proc = procs_[dci.harq_id];
    if (dci.ndi == 0) {
      if (!proc.busy) {
        continue;  // stale retransmission grant
      }
      tx.is_retx = true;
      tx.is_control = proc.is_control;
      tx.n_packets = proc.n_packets;
      ++metrics_.retransmissions;
    } else {
      const uint32_t bits = cfg_.mcs.at(tx.mcs_index).bits_per_rb;
      const uint32_t cap_bytes = bits * dci.rb_len / 8;
      if (phase_ == ProcPhase::WaitConnected) {
        tx.is_control = true;
        tx.n_packets = 0;
        proc = HarqProc{true, 0, true};
      } else {
        const uint32_t n =
            std::min<uint32_t>(cap_bytes / cfg_.traffic.packet_size_bytes, buffer_pkts_);
        if (n == 0) {
          continue;  // zero-payload block is not transmitted
        }
        buffer_pkts_ -= n;
        tx.n_packets = n;
        proc = HarqProc{true, n, false};
      }
    }
    tx.bsr_bytes = buffer_pkts_ * cfg_.traffic.packet_size_bytes;
    out.push_back(tx);
  }

  if (state_ == UeState::Connected && has_rnti_) {
    UplinkTx tx;
    tx.type = UlTxType::Pucch;
    tx.ue_index = index_;
    tx.rnti = rnti_;
    const uint32_t edge = cfg_.grid.pucch_edge_rbs;
    const uint32_t region_size = 2 * edge;
    const uint32_t slot = static_cast<uint32_t>(index_) % region_size;
    tx.rb_start = slot < edge ? slot : cfg_.grid.total_rbs - region_size + slot;
    tx.rb_len = 1;
    tx.bsr_bytes = buffer_pkts_ * cfg_.traffic.packet_size_bytes;
    out.push_back(tx);
  }
}

void UeModel::handle_feedback(SubframeIndex sf, const Feedback& fb, PowerDb sinr_db, Rng& rng)
{
  if (state_ == UeState::Crashed) {
    return;
  }
  last_fb_sinr_db_ = sinr_db;
  last_fb_tpc_db_ = fb.tpc_offset_db;
  fb_seen_ = true;

  HarqProc& proc = procs_[fb.harq_id];
  if (fb.ack) {
    if (proc.busy) {
      delivered_ += proc.n_packets;
      proc = HarqProc{};
    }
    consec_fails_ = 0;
    if (fb.connection_complete && phase_ == ProcPhase::WaitConnected) {
      phase_ = ProcPhase::None;
      const bool fresh = !episode_reestablish_;
      state_ = UeState::Connected;
      attempt_ = 0;
      emit(sf, EventKind::Connected, rnti_.value, fresh ? 1 : 0);
      if (last_connected_rnti_ && !(*last_connected_rnti_ == rnti_)) {
        ++metrics_.rnti_changes;
      }
      last_connected_rnti_ = rnti_;
      if (escape_episode_) {
        if (!metrics_.fresh_connect_sf) {
          metrics_.fresh_connect_sf = sf;
        }
        escape_episode_ = false;
      }
      if (!episode_reestablish_) {
        // A fresh connection starts from a clean slate.
        prev_rnti_.reset();
      }
    }
    return;
  }

  // NACK path.
  if (fb.block_dropped && proc.busy) {
    dropped_ += proc.n_packets;
    metrics_.packets_dropped += proc.n_packets;
    proc = HarqProc{};
  }
  if (state_ == UeState::Connected) {
    ++consec_fails_;
    if (consec_fails_ >= prof_.rlf_consecutive_failures) {
      detect_rlf(sf, rng);
    }
  }
}

void UeModel::notify_hop(SubframeIndex sf, Rnti new_rnti, SubframeIndex alias_expiry)
{
  (void)sf;
  if (has_rnti_) {
    rnti_aliases_.emplace_back(rnti_, alias_expiry);
  }
  rnti_ = new_rnti;
  has_rnti_ = true;
}

void UeModel::step(SubframeIndex sf, Rng& rng)
{
  (void)rng;

  // Timers.
  switch (state_) {
    case UeState::Idle:
      if (!cell_blocked_ && sf >= connect_at_sf_) {
        episode_reestablish_ = false;
        attempt_ = 1;
        start_attempt(sf);
      } else if (cell_blocked_ && !cell_blocked_reported_ && sf >= connect_at_sf_) {
        // Spoofed barring accepted as genuine: the cell stays excluded.
        cell_blocked_reported_ = true;
        emit(sf, EventKind::Barred, 0, -1);
      }
      break;
    case UeState::BackOff:
      if (sf >= backoff_until_) {
        ++attempt_;
        start_attempt(sf);
      }
      break;
    case UeState::CellBarred:
      if (sf >= barred_until_) {
        // Barring expired; any new access is a fresh connection.
        state_ = UeState::Idle;
        clear_buffer_as_dropped();
        prev_rnti_.reset();
        episode_reestablish_ = false;
        attempt_ = 0;
      }
      break;
    case UeState::RandomAccess:
    case UeState::Reestablishing:
      if (sf >= proc_deadline_) {
        procedure_failed(sf);
      }
      break;
    default:
      break;
  }

  for (size_t i = rnti_aliases_.size(); i-- > 0;) {
    if (rnti_aliases_[i].second <= sf) {
      rnti_aliases_.erase(rnti_aliases_.begin() + static_cast<long>(i));
    }
  }

  // Traffic source: one packet per interval, drop-head when full.
  if (sf >= connect_at_sf_ && sf < traffic_end_sf &&
      (sf - connect_at_sf_) % cfg_.traffic.interval_subframes == 0) {
    ++offered_;
    ++metrics_.packets_offered;
    if (state_ == UeState::Crashed) {
      ++dropped_;
      ++metrics_.packets_dropped;
    } else if (buffer_pkts_ >= cfg_.traffic.buffer_capacity_packets) {
      ++dropped_;  // oldest packet leaves, freshest enters
      ++metrics_.packets_dropped;
    } else {
      ++buffer_pkts_;
    }
  }
}

} // namespace uljam
