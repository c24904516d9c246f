#include "uljam/jammer.hpp"

#include <algorithm>

namespace uljam {

JammerModel::JammerModel(const ScenarioConfig& cfg, RunMetrics& metrics)
    : cfg_(cfg), metrics_(metrics)
{
  codec_.total_rbs = cfg.grid.total_rbs;
  codec_.pucch_edge_rbs = cfg.grid.pucch_edge_rbs;
  active_start_sf_ = static_cast<SubframeIndex>(cfg.jammer.active_start_s * 1000.0);
  active_end_sf_ = static_cast<SubframeIndex>(cfg.jammer.active_end_s * 1000.0);
  emission_power_db_ = cfg.budget.jammer_base_db + cfg.jammer.gain_db;
  if (!cfg.jammer.target_is_victim && !cfg.jammer.explicit_candidates.empty()) {
    target_ = cfg.jammer.explicit_candidates.front();
  }
}

void JammerModel::bind_victim(Rnti rnti)
{
  if (cfg_.jammer.target_is_victim && !target_) {
    target_ = rnti;
  }
}

bool JammerModel::active_at(SubframeIndex sf) const
{
  if (cfg_.jammer.kind == JammerKind::None) {
    return false;
  }
  if (sf < active_start_sf_ || sf >= active_end_sf_) {
    return false;
  }
  if (cfg_.jammer.duty_cycle >= 1.0) {
    return true;
  }
  const uint32_t period = cfg_.jammer.duty_period_subframes;
  const uint32_t on_slice = static_cast<uint32_t>(cfg_.jammer.duty_cycle * period);
  return (sf - active_start_sf_) % period < on_slice;
}

void JammerModel::observe_downlink(SubframeIndex sf, const DownlinkBroadcast& broadcast)
{
  switch (cfg_.jammer.kind) {
    case JammerKind::PuschTargeted: {
      if (!target_) {
        return;
      }
      const auto matches =
          blind_decode(broadcast.dcis, {*target_}, cfg_.scrambling, codec_);
      for (const auto& [rnti, dci] : matches) {
        TrackedGrant g;
        g.rnti = rnti;
        g.fire_subframe = sf + cfg_.sched.grant_delay_subframes;
        g.rb_start = dci.rb_start;
        g.rb_len = dci.rb_len;
        tracked_.push_back(g);
        ++metrics_.jammer_tracked_grants;
        if (metrics_.first_hop_sf && sf >= *metrics_.first_hop_sf) {
          ++metrics_.jammer_tracked_after_first_hop;
        }
      }
      break;
    }
    case JammerKind::Prattle: {
      for (const RarGrant& rar : broadcast.rars) {
        TrackedGrant g;
        g.rnti = rar.assigned_rnti;
        g.fire_subframe = rar.msg3_subframe;
        g.rb_start = rar.msg3_rb_start;
        g.rb_len = rar.msg3_rb_len;
        tracked_.push_back(g);
        ++metrics_.jammer_tracked_grants;
      }
      break;
    }
    default:
      break;
  }
}

std::vector<JamEmission> JammerModel::emit_interference(SubframeIndex sf)
{
  std::vector<JamEmission> out;
  const bool on = active_at(sf);

  // Tracked grants expire whether or not they were fired upon; a
  // minimal-exposure attacker never transmits outside them.
  std::vector<TrackedGrant> due;
  for (size_t i = tracked_.size(); i-- > 0;) {
    if (tracked_[i].fire_subframe == sf) {
      due.push_back(tracked_[i]);
    }
    if (tracked_[i].fire_subframe <= sf) {
      tracked_.erase(tracked_.begin() + static_cast<long>(i));
    }
  }
  if (!on) {
    return out;
  }

  switch (cfg_.jammer.kind) {
    case JammerKind::None:
      break;
    case JammerKind::Barrage:
      out.push_back(JamEmission{0, cfg_.grid.total_rbs, emission_power_db_});
      break;
    case JammerKind::PucchJam: {
      const uint32_t edge = cfg_.grid.pucch_edge_rbs;
      out.push_back(JamEmission{0, edge, emission_power_db_});
      out.push_back(JamEmission{cfg_.grid.total_rbs - edge, edge, emission_power_db_});
      break;
    }
    case JammerKind::PuschTargeted:
    case JammerKind::Prattle:
      for (const TrackedGrant& g : due) {
        out.push_back(JamEmission{g.rb_start, g.rb_len, emission_power_db_});
      }
      break;
  }

  for (const JamEmission& e : out) {
    metrics_.exposure.rb_subframes += e.rb_len;
    metrics_.exposure.energy_linear += db_to_linear(e.power_db) * e.rb_len;
  }
  if (!out.empty()) {
    metrics_.last_jam_emission_sf = sf;
  }
  return out;
}

} // namespace uljam
