#pragma once

#include <memory>
#include <vector>

#include "uljam/enb.hpp"
#include "uljam/jammer.hpp"
#include "uljam/metrics.hpp"
#include "uljam/scenario.hpp"
#include "uljam/ue.hpp"

namespace uljam {

/// Deterministic single-run event loop. Subframe phase order is fixed:
///   1. eNB schedules (grid for now + grant_delay, DCIs/RARs for now)
///   2. downlink broadcast reaches UEs and jammer
///   3. UEs and jammer transmit for the grid scheduled grant_delay ago
///   4. PHY resolves per-RB decode outcomes
///   5. eNB processes the uplink
///   6. feedback delivery, state machines and timers step
/// Identical (config, seed) produces bit-identical metrics.
class Simulation
{
public:
  explicit Simulation(const ScenarioConfig& cfg);
  Simulation(const ScenarioConfig& cfg, uint64_t seed_override);

  RunMetrics run();

  /// Single-subframe step, exposed for trace-level tests.
  void step_subframe();
  SubframeIndex now() const { return now_; }
  const RunMetrics& metrics() const { return metrics_; }
  const EnbModel& enb() const { return *enb_; }
  const JammerModel& jammer() const { return *jammer_; }
  const std::vector<UeModel>& ues() const { return ues_; }
  void finalize();

private:
  static constexpr uint32_t kGridRing = 16;

  void resolve_phy(SubframeIndex sf, const RbGrid& grid, const std::vector<UplinkTx>& txs,
                   const std::vector<JamEmission>& jams, std::vector<UlRxResult>& results);
  void audit_tx(const RbGrid& grid, const UplinkTx& tx);
  void audit_jam(SubframeIndex sf, const RbGrid& grid, const std::vector<JamEmission>& jams);
  void check_conservation(SubframeIndex sf);
  void apply_sib_gate();
  void compute_recovery();

  ScenarioConfig cfg_;
  Rng rng_;
  RunMetrics metrics_;
  std::unique_ptr<EnbModel> enb_;
  std::unique_ptr<JammerModel> jammer_;
  std::vector<UeModel> ues_;
  std::vector<RbGrid> grids_;
  DciCodecConfig codec_;
  SubframeIndex now_ = 0;
  bool victim_bound_ = false;
  bool finalized_ = false;

  // scratch buffers reused across subframes
  std::vector<UplinkTx> txs_;
  std::vector<UlRxResult> results_;
  std::vector<double> interference_lin_;
};

/// Convenience wrapper: validate, run, finalize.
RunMetrics run_scenario(const ScenarioConfig& cfg);

} // namespace uljam
