#include "uljam/enb.hpp"

#include <algorithm>
#include <cmath>

namespace uljam {

std::vector<uint32_t> proportional_share(const std::vector<uint32_t>& wants, uint32_t avail)
{
  std::vector<uint32_t> granted(wants.size(), 0);
  uint64_t total_want = 0;
  for (uint32_t w : wants) {
    total_want += w;
  }
  if (total_want <= avail) {
    return wants;
  }
  if (wants.empty()) {
    return granted;
  }
  uint32_t used = 0;
  for (size_t i = 0; i < wants.size(); ++i) {
    granted[i] = static_cast<uint32_t>(static_cast<uint64_t>(wants[i]) * avail / total_want);
    used += granted[i];
  }
  size_t i = 0;
  size_t stalled = 0;
  while (used < avail && stalled < wants.size()) {
    if (granted[i] < wants[i]) {
      ++granted[i];
      ++used;
      stalled = 0;
    } else {
      ++stalled;
    }
    i = (i + 1) % wants.size();
  }
  return granted;
}

EnbModel::EnbModel(const ScenarioConfig& cfg, Rng& rng, RunMetrics& metrics)
    : cfg_(cfg), rng_(rng), metrics_(metrics)
{
  codec_.total_rbs = cfg.grid.total_rbs;
  codec_.pucch_edge_rbs = cfg.grid.pucch_edge_rbs;
  interior_start_ = cfg.grid.pucch_edge_rbs;
  interior_len_ = cfg.grid.total_rbs - 2 * cfg.grid.pucch_edge_rbs;
}

void EnbModel::emit(SubframeIndex sf, EventKind kind, uint16_t rnti, int64_t detail)
{
  metrics_.rrc_events.push_back(Event{sf, kind, rnti, detail});
}

ConnectedUeContext* EnbModel::find_ctx(Rnti rnti)
{
  for (ConnectedUeContext& ctx : contexts_) {
    if (ctx.rnti == rnti) {
      return &ctx;
    }
  }
  // Grants issued just before an RNTI hop are still honoured under the
  // old identifier for one pipeline length.
  const auto alias = aliases_.find(rnti.value);
  if (alias != aliases_.end()) {
    for (ConnectedUeContext& ctx : contexts_) {
      if (ctx.rnti == alias->second.first) {
        return &ctx;
      }
    }
  }
  return nullptr;
}

const ConnectedUeContext* EnbModel::context_by_rnti(Rnti rnti) const
{
  return const_cast<EnbModel*>(this)->find_ctx(rnti);
}

PowerDb EnbModel::tpc_for(Rnti rnti) const
{
  const ConnectedUeContext* ctx = context_by_rnti(rnti);
  return ctx ? ctx->tpc_offset_db : 0.0;
}

bool EnbModel::rnti_in_use(Rnti rnti) const
{
  for (const ConnectedUeContext& ctx : contexts_) {
    if (ctx.rnti == rnti) {
      return true;
    }
  }
  for (const PendingRar& p : pending_rars_) {
    if (p.rar.assigned_rnti == rnti) {
      return true;
    }
  }
  return retired_.count(rnti.value) > 0 || aliases_.count(rnti.value) > 0;
}

std::optional<Rnti> EnbModel::draw_rnti()
{
  const uint32_t span = Rnti::kMax - Rnti::kMin + 1;
  // Rejection sampling; the pool dwarfs any realistic context count.
  for (int tries = 0; tries < 64; ++tries) {
    const Rnti cand{static_cast<uint16_t>(Rnti::kMin + rng_.next_below(span))};
    if (!rnti_in_use(cand)) {
      return cand;
    }
  }
  for (uint32_t v = Rnti::kMin; v <= Rnti::kMax; ++v) {
    const Rnti cand{static_cast<uint16_t>(v)};
    if (!rnti_in_use(cand)) {
      return cand;
    }
  }
  return std::nullopt;
}

void EnbModel::retire_rnti(Rnti rnti, SubframeIndex sf)
{
  retired_[rnti.value] = sf + cfg_.rach.rnti_retire_subframes;
}

void EnbModel::release_context(size_t idx, SubframeIndex sf)
{
  emit(sf, EventKind::ContextReleased, contexts_[idx].rnti.value);
  retire_rnti(contexts_[idx].rnti, sf);
  contexts_.erase(contexts_.begin() + static_cast<long>(idx));
}

uint32_t EnbModel::probe_interval(int mcs) const
{
  // Conservative re-probing: the further the link has stepped down,
  // the longer the eNB waits before trying a higher MCS again.
  const int depth = cfg_.mcs.top() - mcs;
  const double interval =
      cfg_.sched.adaptation_window * std::pow(cfg_.sched.probe_backoff_base, depth);
  return static_cast<uint32_t>(std::min(interval, 1.0e9));
}

void EnbModel::suspend_context(ConnectedUeContext& ctx, SubframeIndex sf)
{
  ctx.state = CtxState::Suspended;
  ctx.release_sf = sf + 60000;
  ctx.retx_queue.clear();
  for (HarqSlot& h : ctx.harq) {
    h = HarqSlot{};
  }
  ctx.outstanding_bytes = 0;
  ctx.bsr_bytes = 0;
  ctx.dtx_streak = 0;
  emit(sf, EventKind::ContextSuspended, ctx.rnti.value);
}

void EnbModel::handle_preamble(SubframeIndex sf, const UplinkTx& tx)
{
  emit(sf, EventKind::RachAttempt, tx.reestablish_rnti ? tx.reestablish_rnti->value : 0,
       static_cast<int64_t>(tx.preamble_id));

  Rnti assigned;
  ConnectedUeContext* existing = nullptr;
  const bool reuse = cfg_.sched.rnti_policy == RntiPolicy::ReuseOnReestablish &&
                     tx.reestablish_rnti.has_value();
  if (reuse) {
    assigned = *tx.reestablish_rnti;
    existing = find_ctx(assigned);
    retired_.erase(assigned.value);  // explicit reuse overrides retirement
  } else {
    const auto drawn = draw_rnti();
    if (!drawn) {
      ++pool_rejections_;
      emit(sf, EventKind::AccessRejected, 0, static_cast<int64_t>(tx.preamble_id));
      return;
    }
    assigned = *drawn;
  }

  if (existing) {
    existing->state = CtxState::PendingMsg3;
    existing->ue_index = tx.ue_index;
    existing->retx_queue.clear();
    for (HarqSlot& h : existing->harq) {
      h = HarqSlot{};
    }
    existing->dtx_streak = 0;
    existing->bsr_bytes = 0;
    existing->outstanding_bytes = 0;
    existing->proc_deadline = sf + cfg_.rach.proc_timeout_subframes + cfg_.rach.rar_delay_subframes;
  } else {
    ConnectedUeContext ctx;
    ctx.rnti = assigned;
    ctx.ue_index = tx.ue_index;
    ctx.state = CtxState::PendingMsg3;
    ctx.mcs_index = cfg_.mcs.top();
    ctx.weight = 1;
    ctx.harq.resize(cfg_.harq.processes);
    ctx.proc_deadline = sf + cfg_.rach.proc_timeout_subframes + cfg_.rach.rar_delay_subframes;
    contexts_.push_back(std::move(ctx));
  }

  const SubframeIndex rar_sf = sf + cfg_.rach.rar_delay_subframes;
  RarGrant rar;
  rar.preamble_id = tx.preamble_id;
  rar.assigned_rnti = assigned;
  rar.msg3_subframe = rar_sf + cfg_.sched.grant_delay_subframes + cfg_.rach.msg3_offset_subframes;
  // Msg3 slots stack from the interior start, one per outstanding RAR.
  uint32_t slot = 0;
  for (const Msg3Reservation& r : msg3_reservations_) {
    if (r.subframe == rar.msg3_subframe) {
      ++slot;
    }
  }
  rar.msg3_rb_start = interior_start_ + slot * cfg_.rach.msg3_rbs;
  rar.msg3_rb_len = cfg_.rach.msg3_rbs;
  pending_rars_.push_back(PendingRar{rar_sf, rar});
  msg3_reservations_.push_back(
      Msg3Reservation{rar.msg3_subframe, rar.msg3_rb_start, rar.msg3_rb_len, assigned});
}

std::vector<EnbModel::HopNotice> EnbModel::take_hop_notices()
{
  std::vector<HopNotice> out;
  out.swap(hop_notices_);
  return out;
}

ScheduleResult EnbModel::schedule_subframe(SubframeIndex sf, RbGrid& grid_out)
{
  ScheduleResult result;
  const SubframeIndex fire_sf = sf + cfg_.sched.grant_delay_subframes;

  // Expired retirements and hop aliases return to the pool.
  for (auto it = retired_.begin(); it != retired_.end();) {
    it = it->second <= sf ? retired_.erase(it) : std::next(it);
  }
  for (auto it = aliases_.begin(); it != aliases_.end();) {
    it = it->second.second <= sf ? aliases_.erase(it) : std::next(it);
  }

  // Procedure watchdogs and suspended-context expiry.
  for (size_t i = contexts_.size(); i-- > 0;) {
    ConnectedUeContext& ctx = contexts_[i];
    if ((ctx.state == CtxState::PendingMsg3 || ctx.state == CtxState::PendingComplete) &&
        sf >= ctx.proc_deadline) {
      suspend_context(ctx, sf);
    } else if (ctx.state == CtxState::Suspended && sf >= ctx.release_sf) {
      release_context(i, sf);
    }
  }

  // Periodic RNTI reconfiguration, delivered over encrypted signalling:
  // nothing below broadcasts it.
  if (cfg_.sched.rnti_policy == RntiPolicy::Hopping) {
    for (ConnectedUeContext& ctx : contexts_) {
      if (ctx.state != CtxState::Active || sf < ctx.hop_deadline) {
        continue;
      }
      const auto fresh = draw_rnti();
      if (!fresh) {
        emit(sf, EventKind::HopSkipped, ctx.rnti.value);
        ctx.hop_deadline += cfg_.sched.hopping_period;
        continue;
      }
      const Rnti old = ctx.rnti;
      aliases_[old.value] = {*fresh, sf + cfg_.sched.grant_delay_subframes + 2};
      retire_rnti(old, sf + cfg_.sched.grant_delay_subframes + 2);
      ctx.rnti = *fresh;
      ctx.hop_deadline += cfg_.sched.hopping_period;
      emit(sf, EventKind::RntiHop, fresh->value, old.value);
      ++metrics_.rnti_changes;
      if (!metrics_.first_hop_sf) {
        metrics_.first_hop_sf = sf;
      }
      hop_notices_.push_back(HopNotice{ctx.ue_index, old, *fresh});
    }
  }

  // RARs due this subframe go on the air.
  for (size_t i = pending_rars_.size(); i-- > 0;) {
    if (pending_rars_[i].emit_sf == sf) {
      result.broadcast.rars.push_back(pending_rars_[i].rar);
      emit(sf, EventKind::RarIssued, pending_rars_[i].rar.assigned_rnti.value,
           pending_rars_[i].rar.msg3_subframe);
      pending_rars_.erase(pending_rars_.begin() + static_cast<long>(i));
    }
  }

  grid_out.reset(fire_sf, cfg_.grid.total_rbs, cfg_.grid.pucch_edge_rbs);

  // Msg3 allocations placed first.
  for (size_t i = msg3_reservations_.size(); i-- > 0;) {
    const Msg3Reservation& r = msg3_reservations_[i];
    if (r.subframe == fire_sf) {
      if (!grid_out.grant(r.rb_start, r.rb_len, r.rnti.value)) {
        ++metrics_.audit.rb_double_bookings;
      }
      msg3_reservations_.erase(msg3_reservations_.begin() + static_cast<long>(i));
    } else if (r.subframe < fire_sf) {
      msg3_reservations_.erase(msg3_reservations_.begin() + static_cast<long>(i));
    }
  }

  uint32_t avail = 0;
  for (uint32_t rb = interior_start_; rb < interior_start_ + interior_len_; ++rb) {
    if (grid_out.cells[rb].kind == RbOwnerKind::Idle) {
      ++avail;
    }
  }

  // Collect grant requests: HARQ retransmissions take priority, then
  // one new transport block per context and subframe.
  std::vector<GrantRequest> requests;
  for (ConnectedUeContext& ctx : contexts_) {
    if (ctx.state != CtxState::Active && ctx.state != CtxState::PendingComplete) {
      continue;
    }
    if (!ctx.retx_queue.empty()) {
      GrantRequest req;
      req.rnti = ctx.rnti;
      req.is_retx = true;
      req.retx = ctx.retx_queue.front();
      req.rbs_wanted = req.retx.rb_len;
      req.new_bytes = 0;
      requests.push_back(req);
      continue;
    }

    int free_harq = -1;
    for (size_t h = 0; h < ctx.harq.size(); ++h) {
      if (!ctx.harq[h].busy) {
        free_harq = static_cast<int>(h);
        break;
      }
    }
    if (free_harq < 0) {
      continue;
    }

    bool is_control = false;
    uint32_t want_bytes = 0;
    if (ctx.state == CtxState::PendingComplete) {
      bool in_flight = false;
      for (const HarqSlot& h : ctx.harq) {
        in_flight = in_flight || h.busy;
      }
      if (in_flight) {
        continue;
      }
      want_bytes = cfg_.rach.completion_bytes;
      is_control = true;
    } else {
      const uint32_t backlog =
          ctx.bsr_bytes > ctx.outstanding_bytes ? ctx.bsr_bytes - ctx.outstanding_bytes : 0;
      // Whole-packet granularity: a grant smaller than one packet is
      // unusable and would bounce forever.
      const uint32_t pkt = cfg_.traffic.packet_size_bytes;
      want_bytes = (backlog + pkt - 1) / pkt * pkt;
      if (want_bytes == 0 && ctx.uci_on_pusch && sf >= ctx.next_probe_grant_sf) {
        // Without a usable PUCCH the eNB cannot see scheduling
        // requests, so it polls with a small grant.
        want_bytes = cfg_.traffic.packet_size_bytes;
        ctx.next_probe_grant_sf = sf + 10;
      }
      if (want_bytes == 0) {
        continue;
      }
    }

    GrantRequest req;
    req.rnti = ctx.rnti;
    req.is_retx = false;
    // Procedure signalling rides a robust MCS regardless of where link
    // adaptation currently sits.
    req.mcs = is_control
                  ? std::min<int>(ctx.mcs_index, static_cast<int>(cfg_.rach.signalling_mcs_cap))
                  : ctx.mcs_index;
    const uint32_t bits = cfg_.mcs.at(req.mcs).bits_per_rb;
    const uint32_t base_rbs = (want_bytes * 8 + bits - 1) / bits;
    req.rbs_wanted = std::min(base_rbs * ctx.weight, interior_len_);
    req.new_bytes = want_bytes;
    requests.push_back(req);
  }

  // Proportional share under over-demand; placement in RNTI order so
  // the lower RNTI takes the lower RB indices.
  std::sort(requests.begin(), requests.end(),
            [](const GrantRequest& a, const GrantRequest& b) { return a.rnti < b.rnti; });
  std::vector<uint32_t> wants(requests.size());
  for (size_t i = 0; i < requests.size(); ++i) {
    wants[i] = requests[i].rbs_wanted;
  }
  const std::vector<uint32_t> granted = proportional_share(wants, avail);

  uint32_t cursor = interior_start_;
  for (size_t i = 0; i < requests.size(); ++i) {
    if (granted[i] == 0) {
      continue;
    }
    // Retransmissions carry the original transport block, so a short
    // share defers them instead of shrinking them.
    if (requests[i].is_retx && granted[i] < requests[i].rbs_wanted) {
      continue;
    }
    ConnectedUeContext* ctx = find_ctx(requests[i].rnti);
    if (!ctx) {
      continue;
    }
    while (cursor < interior_start_ + interior_len_ &&
           grid_out.cells[cursor].kind != RbOwnerKind::Idle) {
      ++cursor;
    }
    uint32_t run = 0;
    for (uint32_t rb = cursor; rb < interior_start_ + interior_len_; ++rb) {
      if (grid_out.cells[rb].kind != RbOwnerKind::Idle || run == granted[i]) {
        break;
      }
      ++run;
    }
    const uint32_t len = std::min(granted[i], run);
    if (len == 0 || (requests[i].is_retx && len < requests[i].rbs_wanted)) {
      continue;
    }

    UplinkDci dci;
    dci.rb_start = cursor;
    dci.rb_len = len;
    if (requests[i].is_retx) {
      dci.mcs_index = static_cast<uint32_t>(requests[i].retx.mcs);
      dci.ndi = 0;
      dci.harq_id = requests[i].retx.harq_id;
      ctx->retx_queue.pop_front();
      HarqSlot& slot = ctx->harq[dci.harq_id];
      slot.busy = true;
      slot.fire_sf = fire_sf;
      slot.rb_len = len;
      slot.mcs = requests[i].retx.mcs;
    } else {
      dci.mcs_index = static_cast<uint32_t>(requests[i].mcs);
      dci.ndi = 1;
      int free_harq = 0;
      for (size_t h = 0; h < ctx->harq.size(); ++h) {
        if (!ctx->harq[h].busy) {
          free_harq = static_cast<int>(h);
          break;
        }
      }
      dci.harq_id = static_cast<uint8_t>(free_harq);
      HarqSlot& slot = ctx->harq[dci.harq_id];
      slot.busy = true;
      slot.fire_sf = fire_sf;
      slot.rb_len = len;
      slot.mcs = requests[i].mcs;
      slot.retx_count = 0;
      slot.is_control = ctx->state == CtxState::PendingComplete;
      // Outstanding tracks backlog coverage, not physical capacity:
      // weight-inflated grants must not throttle the pipeline.
      slot.granted_bytes = requests[i].new_bytes;
      ctx->outstanding_bytes += requests[i].new_bytes;
    }

    if (!grid_out.grant(dci.rb_start, dci.rb_len, ctx->rnti.value)) {
      ++metrics_.audit.rb_double_bookings;
      continue;
    }
    result.broadcast.dcis.push_back(encode_dci(dci, ctx->rnti, cfg_.scrambling, codec_));
    cursor += len;
  }

  return result;
}

void EnbModel::append_adapt_sample(ConnectedUeContext& ctx, bool failed, SubframeIndex sf)
{
  const uint32_t window = cfg_.sched.adaptation_window;
  if (ctx.win_count == window) {
    const bool oldest = (ctx.win_bits >> (window - 1)) & 1u;
    if (oldest) {
      --ctx.win_fails;
    }
  } else {
    ++ctx.win_count;
  }
  ctx.win_bits <<= 1;
  if (window < 64) {
    ctx.win_bits &= (1ull << window) - 1;
  }
  if (failed) {
    ctx.win_bits |= 1u;
    ++ctx.win_fails;
    ctx.clean_streak = 0;
  } else {
    ++ctx.clean_streak;
  }

  if (!cfg_.sched.adaptation_enabled) {
    return;
  }

  const double rate = ctx.win_count ? static_cast<double>(ctx.win_fails) / ctx.win_count : 0.0;
  // Down-steps respect a hold-off so one reconfiguration can take
  // effect (stale retransmissions finish) before the next.
  const bool settled = sf >= ctx.last_adapt_sf + cfg_.sched.adaptation_holdoff_subframes;
  if (ctx.win_count >= cfg_.sched.adaptation_min_samples &&
      rate > cfg_.sched.adaptation_fail_threshold && settled) {
    if (ctx.mcs_index > 0) {
      --ctx.mcs_index;
      ctx.weight = std::min<uint32_t>(ctx.weight * 2, interior_len_);
      emit(sf, EventKind::LinkAdaptDown, ctx.rnti.value, ctx.mcs_index);
    }
    ctx.last_adapt_sf = sf;
    ctx.win_bits = 0;
    ctx.win_count = 0;
    ctx.win_fails = 0;
    ctx.clean_streak = 0;
  } else if (ctx.mcs_index < cfg_.mcs.top() && ctx.win_fails == 0 &&
             ctx.clean_streak >= probe_interval(ctx.mcs_index)) {
    ++ctx.mcs_index;
    ctx.weight = 1;
    emit(sf, EventKind::LinkAdaptUp, ctx.rnti.value, ctx.mcs_index);
    ctx.last_adapt_sf = sf;
    ctx.win_bits = 0;
    ctx.win_count = 0;
    ctx.win_fails = 0;
    ctx.clean_streak = 0;
  }
}

void EnbModel::power_control_step(ConnectedUeContext& ctx, SubframeIndex sf)
{
  if (sf < ctx.next_pc_sf || !ctx.sinr_valid) {
    return;
  }
  ctx.next_pc_sf = sf + cfg_.sched.power_control.interval_subframes;
  const PowerControlConfig& pc = cfg_.sched.power_control;
  if (ctx.last_sinr_db > pc.target_sinr_db + pc.margin_db) {
    ctx.tpc_offset_db = std::max(ctx.tpc_offset_db - 1.0, -pc.max_reduction_db);
  } else if (ctx.last_sinr_db < pc.target_sinr_db - pc.margin_db) {
    ctx.tpc_offset_db = std::min(ctx.tpc_offset_db + 1.0, pc.max_headroom_db);
  }
}

std::vector<Feedback> EnbModel::process_uplink(SubframeIndex sf,
                                               const std::vector<UlRxResult>& results,
                                               const RbGrid& grid)
{
  (void)grid;
  std::vector<Feedback> feedback;

  std::set<uint16_t> heard;     // contexts with any signal this subframe
  std::set<uint32_t> resolved;  // (rnti << 3) | harq_id pairs seen

  for (const UlRxResult& res : results) {
    const UplinkTx& tx = res.tx;
    switch (tx.type) {
      case UlTxType::Preamble:
        if (res.decoded) {
          handle_preamble(sf, tx);
        }
        break;

      case UlTxType::Msg3: {
        ConnectedUeContext* ctx = find_ctx(tx.rnti);
        if (!ctx) {
          break;
        }
        heard.insert(ctx->rnti.value);
        if (res.decoded && ctx->state == CtxState::PendingMsg3) {
          ctx->state = CtxState::PendingComplete;
          ctx->bsr_bytes = cfg_.rach.completion_bytes;
          ctx->outstanding_bytes = 0;
          ctx->proc_deadline = sf + cfg_.rach.proc_timeout_subframes;
          emit(sf, EventKind::Msg3Received, ctx->rnti.value);
        }
        break;
      }

      case UlTxType::Pucch: {
        ConnectedUeContext* ctx = find_ctx(tx.rnti);
        if (!ctx || ctx->state != CtxState::Active) {
          break;
        }
        heard.insert(ctx->rnti.value);
        if (ctx->uci_on_pusch) {
          if (sf >= ctx->next_pucch_probe_sf) {
            ctx->next_pucch_probe_sf = sf + cfg_.sched.pucch_probe_interval;
            if (res.decoded) {
              ctx->uci_on_pusch = false;
              ctx->pucch_fail_streak = 0;
              ctx->bsr_bytes = tx.bsr_bytes;
              emit(sf, EventKind::FallbackExit, ctx->rnti.value);
            }
          }
          break;
        }
        if (res.decoded) {
          ctx->pucch_fail_streak = 0;
          ctx->bsr_bytes = tx.bsr_bytes;
        } else {
          ++ctx->pucch_fail_streak;
          if (ctx->pucch_fail_streak >= cfg_.sched.pucch_fallback_threshold) {
            ctx->uci_on_pusch = true;
            ctx->next_pucch_probe_sf = sf + cfg_.sched.pucch_probe_interval;
            ctx->next_probe_grant_sf = sf;
            emit(sf, EventKind::FallbackEnter, ctx->rnti.value);
          }
        }
        break;
      }

      case UlTxType::Data: {
        ConnectedUeContext* ctx = find_ctx(tx.rnti);
        if (!ctx) {
          break;
        }
        heard.insert(ctx->rnti.value);
        ctx->dtx_streak = 0;
        if (tx.harq_id >= ctx->harq.size() || !ctx->harq[tx.harq_id].busy) {
          break;  // stale grant; nothing tracked for it
        }
        resolved.insert((static_cast<uint32_t>(ctx->rnti.value) << 3) | tx.harq_id);
        HarqSlot& slot = ctx->harq[tx.harq_id];
        if (slot.granted_bytes) {
          ctx->outstanding_bytes = ctx->outstanding_bytes > slot.granted_bytes
                                       ? ctx->outstanding_bytes - slot.granted_bytes
                                       : 0;
          slot.granted_bytes = 0;
        }

        ctx->last_sinr_db = res.sinr_db;
        ctx->sinr_valid = true;

        Feedback fb;
        fb.rnti = tx.rnti;
        fb.harq_id = tx.harq_id;
        fb.ack = res.decoded;
        fb.tpc_offset_db = ctx->tpc_offset_db;
        fb.sinr_db = res.sinr_db;

        if (res.decoded) {
          ctx->bsr_bytes = tx.bsr_bytes;
          metrics_.packets_received += tx.n_packets;
          const size_t bin = sf / metrics_.bin_ms;
          if (bin < metrics_.throughput_series.size()) {
            metrics_.throughput_series[bin] += tx.n_packets;
          }
          if (slot.is_control && ctx->state == CtxState::PendingComplete) {
            ctx->state = CtxState::Active;
            ctx->hop_deadline = sf + cfg_.sched.hopping_period;
            fb.connection_complete = true;
          }
          slot.busy = false;
          append_adapt_sample(*ctx, false, sf);
        } else {
          if (slot.retx_count < cfg_.harq.max_retx) {
            ++slot.retx_count;
            ctx->retx_queue.push_back(RetxRequest{tx.harq_id, slot.rb_len, slot.mcs});
          } else {
            fb.block_dropped = true;  // retransmission budget exhausted
            slot.busy = false;
          }
          append_adapt_sample(*ctx, true, sf);
        }
        feedback.push_back(fb);
        break;
      }
    }
  }

  // Granted-but-silent accounting. Slots that were due this subframe
  // and produced no signal are freed; a fully silent context counts
  // toward suspension (covers crashed, escaped and backed-off UEs).
  for (ConnectedUeContext& ctx : contexts_) {
    if (ctx.state != CtxState::Active && ctx.state != CtxState::PendingComplete) {
      continue;
    }
    bool had_due = false;
    for (HarqSlot& slot : ctx.harq) {
      if (!slot.busy || slot.fire_sf != sf) {
        continue;
      }
      had_due = true;
      const uint32_t key = (static_cast<uint32_t>(ctx.rnti.value) << 3) |
                           static_cast<uint32_t>(&slot - ctx.harq.data());
      if (resolved.count(key)) {
        continue;
      }
      // No transmission for this grant (empty buffer or absent UE).
      slot.busy = false;
      if (slot.granted_bytes) {
        ctx.outstanding_bytes = ctx.outstanding_bytes > slot.granted_bytes
                                    ? ctx.outstanding_bytes - slot.granted_bytes
                                    : 0;
        slot.granted_bytes = 0;
      }
    }
    if (had_due && !heard.count(ctx.rnti.value)) {
      ++ctx.dtx_streak;
      if (ctx.dtx_streak >= cfg_.rach.dtx_suspend_threshold) {
        suspend_context(ctx, sf);
      }
    }
  }

  for (ConnectedUeContext& ctx : contexts_) {
    if (ctx.state == CtxState::Active || ctx.state == CtxState::PendingComplete) {
      power_control_step(ctx, sf);
    }
  }

  return feedback;
}

} // namespace uljam
