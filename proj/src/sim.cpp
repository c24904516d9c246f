#include "uljam/sim.hpp"

#include <algorithm>

#include "uljam/sib_auth.hpp"

namespace uljam {

Simulation::Simulation(const ScenarioConfig& cfg) : Simulation(cfg, cfg.seed) {}

Simulation::Simulation(const ScenarioConfig& cfg, uint64_t seed_override)
    : cfg_(cfg), rng_(seed_override)
{
  cfg_.seed = seed_override;
  codec_.total_rbs = cfg_.grid.total_rbs;
  codec_.pucch_edge_rbs = cfg_.grid.pucch_edge_rbs;

  metrics_.bin_ms = 100;
  metrics_.throughput_series.assign(cfg_.total_subframes() / metrics_.bin_ms + 1, 0);

  enb_ = std::make_unique<EnbModel>(cfg_, rng_, metrics_);
  jammer_ = std::make_unique<JammerModel>(cfg_, metrics_);

  ues_.reserve(cfg_.ues.size());
  for (size_t i = 0; i < cfg_.ues.size(); ++i) {
    const UeProfile& prof = cfg_.profile(cfg_.ues[i].profile);
    const auto connect_sf = static_cast<SubframeIndex>(cfg_.ues[i].connect_at_s * 1000.0);
    ues_.emplace_back(static_cast<int>(i), cfg_, prof, connect_sf, metrics_);
    ues_.back().traffic_end_sf = connect_sf + cfg_.duration_subframes();
  }

  grids_.resize(kGridRing);
  for (uint32_t sf = 0; sf < cfg_.sched.grant_delay_subframes; ++sf) {
    grids_[sf % kGridRing].reset(sf, cfg_.grid.total_rbs, cfg_.grid.pucch_edge_rbs);
  }
  interference_lin_.assign(cfg_.grid.total_rbs, 0.0);

  apply_sib_gate();
}

void Simulation::apply_sib_gate()
{
  if (!cfg_.sib_auth.spoofed_barring) {
    return;
  }
  OperatorKeyPair key;
  if (!cfg_.sib_auth.private_key_path.empty()) {
    key = OperatorKeyPair::from_pem_files(cfg_.sib_auth.private_key_path,
                                          cfg_.sib_auth.public_key_path);
  } else {
    key = OperatorKeyPair::generate();
  }

  // Genuine system information for cell 1.
  CellSettings genuine_settings;
  genuine_settings.cell_barred = false;
  genuine_settings.cell_id = 1;
  genuine_settings.signal_metric = 10.0;
  const Bytes mib = {0x4c, 0x54, 0x45, 0x00};
  const Bytes sib1 = {0x00 /* not barred */, 0x01, 0x00, 0x01};
  const Bytes sib2(32, 0x5a);
  SystemInfoBroadcast genuine{mib, {sib1, sib2}, sign_si(mib, {sib1, sib2}, key)};

  // Rogue re-broadcast of the same cell with the barring flag set; the
  // signature is a stale copy and no longer covers the content.
  Bytes forged_sib1 = sib1;
  forged_sib1[0] = 0x01;
  CellSettings forged_settings = genuine_settings;
  forged_settings.cell_barred = true;
  forged_settings.signal_metric = 20.0;  // rogue overpowers the real cell
  SystemInfoBroadcast forged{mib, {forged_sib1, sib2}, genuine.signature};

  const std::vector<CellCandidate> candidates = {
      CellCandidate{forged, forged_settings},
      CellCandidate{genuine, genuine_settings},
  };
  const auto selected = cell_select(candidates, key, cfg_.sib_auth.enabled);
  if (!selected) {
    for (UeModel& ue : ues_) {
      ue.block_cell();
    }
  }
}

void Simulation::audit_tx(const RbGrid& grid, const UplinkTx& tx)
{
  if (tx.type == UlTxType::Preamble) {
    return;  // contention access happens outside scheduled grants
  }
  for (uint32_t rb = tx.rb_start; rb < tx.rb_start + tx.rb_len; ++rb) {
    if (rb >= grid.total_rbs) {
      ++metrics_.audit.tx_outside_grant;
      return;
    }
    const RbCell& cell = grid.cells[rb];
    if (tx.type == UlTxType::Pucch) {
      if (cell.kind != RbOwnerKind::PucchRegion) {
        ++metrics_.audit.tx_outside_grant;
        return;
      }
    } else if (cell.kind != RbOwnerKind::Granted || cell.rnti != tx.rnti.value) {
      ++metrics_.audit.tx_outside_grant;
      return;
    }
  }
}

void Simulation::audit_jam(SubframeIndex sf, const RbGrid& grid,
                           const std::vector<JamEmission>& jams)
{
  if (!jams.empty() && !jammer_->active_at(sf)) {
    ++metrics_.audit.jam_outside_window;
  }
  const bool tracked_kind = cfg_.jammer.kind == JammerKind::PuschTargeted ||
                            cfg_.jammer.kind == JammerKind::Prattle;
  if (!tracked_kind) {
    return;
  }
  // A grant-tracking attacker only ever hits RBs that were granted
  // exactly grant_delay earlier.
  for (const JamEmission& e : jams) {
    for (uint32_t rb = e.rb_start; rb < e.rb_start + e.rb_len; ++rb) {
      if (rb >= grid.total_rbs || grid.cells[rb].kind != RbOwnerKind::Granted) {
        ++metrics_.audit.targeted_jam_mismatches;
        return;
      }
    }
  }
}

void Simulation::resolve_phy(SubframeIndex sf, const RbGrid& grid,
                             const std::vector<UplinkTx>& txs,
                             const std::vector<JamEmission>& jams,
                             std::vector<UlRxResult>& results)
{
  (void)sf;
  const double noise_lin = db_to_linear(cfg_.budget.noise_floor_db);
  std::fill(interference_lin_.begin(), interference_lin_.end(), noise_lin);
  for (const JamEmission& e : jams) {
    const double p = db_to_linear(e.power_db);
    for (uint32_t rb = e.rb_start; rb < e.rb_start + e.rb_len && rb < grid.total_rbs; ++rb) {
      interference_lin_[rb] += p;
    }
  }

  results.clear();
  for (const UplinkTx& tx_in : txs) {
    UlRxResult res;
    res.tx = tx_in;
    UplinkTx& tx = res.tx;

    PowerDb power = cfg_.budget.ue_signal_db + enb_->tpc_for(tx.rnti);
    if (tx.type == UlTxType::Pucch) {
      power -= cfg_.budget.pucch_power_offset_db;
    }
    tx.tx_power_db = power;

    PowerDb min_sinr = 1e9;
    for (uint32_t rb = tx.rb_start; rb < tx.rb_start + tx.rb_len && rb < grid.total_rbs; ++rb) {
      min_sinr = std::min(min_sinr, sinr_against(power, interference_lin_[rb]));
    }
    res.sinr_db = min_sinr;

    switch (tx.type) {
      case UlTxType::Data:
      case UlTxType::Msg3:
        res.decoded = decode_success(min_sinr, cfg_.mcs.at(tx.mcs_index));
        break;
      case UlTxType::Pucch:
        res.decoded = min_sinr >= cfg_.rach.pucch_min_sinr_db;
        break;
      case UlTxType::Preamble:
        res.decoded = min_sinr >= cfg_.rach.preamble_min_sinr_db;
        break;
    }
    results.push_back(res);
  }
}

void Simulation::check_conservation(SubframeIndex sf)
{
  for (const UeModel& ue : ues_) {
    const uint64_t rhs =
        ue.delivered() + ue.dropped() + ue.buffer_packets() + ue.in_flight_packets();
    if (ue.offered() != rhs) {
      ++metrics_.audit.conservation_violations;
      (void)sf;
      return;
    }
  }
}

void Simulation::step_subframe()
{
  const SubframeIndex sf = now_;
  const uint32_t delay = cfg_.sched.grant_delay_subframes;

  // (1) schedule
  RbGrid& future = grids_[(sf + delay) % kGridRing];
  ScheduleResult sched = enb_->schedule_subframe(sf, future);
  if (future.subframe != sf + delay) {
    ++metrics_.audit.grant_delay_violations;
  }
  for (const EnbModel::HopNotice& notice : enb_->take_hop_notices()) {
    ues_[static_cast<size_t>(notice.ue_index)].notify_hop(sf, notice.new_rnti, sf + delay + 2);
  }

  // (2) downlink broadcast
  for (UeModel& ue : ues_) {
    ue.observe_downlink(sf, sched.broadcast, cfg_.scrambling, codec_);
  }
  jammer_->observe_downlink(sf, sched.broadcast);

  // (3) uplink transmissions against the grid scheduled delay ago
  RbGrid& current = grids_[sf % kGridRing];
  if (current.subframe != sf) {
    // Ring slot was never scheduled (can only happen before the first
    // schedule reaches this offset); treat as an empty grid.
    current.reset(sf, cfg_.grid.total_rbs, cfg_.grid.pucch_edge_rbs);
  }
  txs_.clear();
  for (UeModel& ue : ues_) {
    ue.collect_tx(sf, txs_);
  }
  const std::vector<JamEmission> jams = jammer_->emit_interference(sf);
  for (const UplinkTx& tx : txs_) {
    audit_tx(current, tx);
  }
  audit_jam(sf, current, jams);

  // (4) PHY
  resolve_phy(sf, current, txs_, jams, results_);

  // (5) eNB uplink processing
  const std::vector<Feedback> feedback = enb_->process_uplink(sf, results_, current);

  // (6) feedback delivery and state machine steps
  for (const Feedback& fb : feedback) {
    for (UeModel& ue : ues_) {
      if (ue.matches(fb.rnti)) {
        ue.handle_feedback(sf, fb, fb.sinr_db, rng_);
        break;
      }
    }
  }
  for (UeModel& ue : ues_) {
    ue.step(sf, rng_);
  }
  if (!victim_bound_ && !ues_.empty() && ues_[0].state() == UeState::Connected) {
    jammer_->bind_victim(ues_[0].rnti());
    victim_bound_ = true;
  }

  check_conservation(sf);
  ++now_;
}

void Simulation::compute_recovery()
{
  if (cfg_.jammer.kind == JammerKind::None) {
    return;
  }
  const uint32_t bin_ms = metrics_.bin_ms;
  const double nominal =
      static_cast<double>(bin_ms) / cfg_.traffic.interval_subframes;
  const uint32_t jam_start_bin =
      static_cast<uint32_t>(cfg_.jammer.active_start_s * 1000.0) / bin_ms;
  const uint32_t last_full_bin = cfg_.duration_subframes() / bin_ms;  // exclusive

  uint32_t candidate = jam_start_bin;
  bool have = false;
  for (uint32_t b = jam_start_bin; b < last_full_bin; ++b) {
    if (metrics_.throughput_series[b] < 0.95 * nominal) {
      candidate = b + 1;
      have = false;
    } else if (!have) {
      have = true;
    }
  }
  if (have && candidate < last_full_bin) {
    const double t_rec =
        candidate * static_cast<double>(bin_ms) / 1000.0 - cfg_.jammer.active_start_s;
    metrics_.time_to_recovery_s = std::max(t_rec, 0.0);
  }
}

void Simulation::finalize()
{
  if (finalized_) {
    return;
  }
  finalized_ = true;
  metrics_.buffer_residual = 0;
  metrics_.in_flight_residual = 0;
  for (const UeModel& ue : ues_) {
    metrics_.buffer_residual += ue.buffer_packets();
    metrics_.in_flight_residual += ue.in_flight_packets();
  }
  compute_recovery();
}

RunMetrics Simulation::run()
{
  const uint32_t total = cfg_.total_subframes();
  while (now_ < total) {
    step_subframe();
  }
  finalize();
  return metrics_;
}

RunMetrics run_scenario(const ScenarioConfig& cfg)
{
  cfg.validate();
  Simulation sim(cfg);
  return sim.run();
}

} // namespace uljam
