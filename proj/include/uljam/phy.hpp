#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

namespace uljam {

/// One tick == 1 ms of simulated time (one LTE subframe).
using SubframeIndex = uint32_t;

/// Decibel-valued quantity. Comparisons happen in dB; power sums are
/// carried out in the linear domain via the helpers below.
using PowerDb = double;

inline double db_to_linear(PowerDb db) { return std::pow(10.0, db / 10.0); }
inline PowerDb linear_to_db(double lin) { return 10.0 * std::log10(lin); }

struct LinkBudget {
  PowerDb ue_signal_db = 20.0;          // UE signal as seen at the eNB
  PowerDb noise_floor_db = 0.0;
  PowerDb jammer_base_db = -7.5;        // jammer signal at 0 dB gain
  PowerDb pucch_power_offset_db = 3.0;  // PUCCH transmit power deficit
};

struct McsLevel {
  PowerDb sinr_threshold_db = 0.0;
  uint32_t bits_per_rb = 0;  // payload bits carried per RB per subframe
};

/// Ordered modulation/coding ladder; thresholds and capacities must be
/// strictly increasing in the index.
struct McsTable {
  std::vector<McsLevel> levels;

  const McsLevel& at(int index) const { return levels.at(static_cast<size_t>(index)); }
  int top() const { return static_cast<int>(levels.size()) - 1; }

  void validate() const
  {
    if (levels.size() < 2) {
      throw std::invalid_argument("mcs_table: at least two levels required");
    }
    for (size_t i = 1; i < levels.size(); ++i) {
      if (levels[i].sinr_threshold_db <= levels[i - 1].sinr_threshold_db) {
        throw std::invalid_argument("mcs_table: sinr_threshold_db not strictly increasing");
      }
      if (levels[i].bits_per_rb <= levels[i - 1].bits_per_rb) {
        throw std::invalid_argument("mcs_table: bits_per_rb not strictly increasing");
      }
    }
  }
};

/// PUCCH region: edge_rbs resource blocks at each edge of the band.
/// Rejects empty regions and regions that would cover the whole band.
std::set<uint32_t> pucch_region(uint32_t total_rbs, uint32_t edge_rbs);

/// SINR at the eNB receiver. Unjammed this is just signal over noise;
/// with a jammer present the jammer power and the noise floor add in
/// the linear domain.
PowerDb effective_sinr(const LinkBudget& budget, PowerDb jammer_gain_db, bool jammed);

/// Same, but for an arbitrary received signal level against an
/// arbitrary linear-domain interference sum (noise included).
inline PowerDb sinr_against(PowerDb signal_db, double interference_linear)
{
  return signal_db - linear_to_db(interference_linear);
}

/// Deterministic threshold decode; boundary inclusive.
inline bool decode_success(PowerDb sinr_db, const McsLevel& mcs)
{
  return sinr_db >= mcs.sinr_threshold_db;
}

// ---------------------------------------------------------------------------
// Uplink resource grid

enum class RbOwnerKind : uint8_t { Idle, PucchRegion, Granted };

struct RbCell {
  RbOwnerKind kind = RbOwnerKind::Idle;
  uint16_t rnti = 0;  // valid when kind == Granted
};

/// Per-subframe map of uplink resource blocks to owners.
struct RbGrid {
  static constexpr uint32_t kMaxRbs = 110;

  SubframeIndex subframe = 0;
  uint32_t total_rbs = 100;
  std::array<RbCell, kMaxRbs> cells{};

  void reset(SubframeIndex sf, uint32_t n_rbs, uint32_t edge_rbs)
  {
    subframe = sf;
    total_rbs = n_rbs;
    for (uint32_t i = 0; i < n_rbs; ++i) {
      cells[i] = RbCell{};
    }
    for (uint32_t i = 0; i < edge_rbs; ++i) {
      cells[i].kind = RbOwnerKind::PucchRegion;
      cells[n_rbs - 1 - i].kind = RbOwnerKind::PucchRegion;
    }
  }

  /// Marks [start, start+len) granted to rnti. Returns false (leaving
  /// the grid untouched) if any RB is already owned.
  bool grant(uint32_t start, uint32_t len, uint16_t rnti)
  {
    if (start + len > total_rbs) {
      return false;
    }
    for (uint32_t i = start; i < start + len; ++i) {
      if (cells[i].kind != RbOwnerKind::Idle) {
        return false;
      }
    }
    for (uint32_t i = start; i < start + len; ++i) {
      cells[i].kind = RbOwnerKind::Granted;
      cells[i].rnti = rnti;
    }
    return true;
  }
};

} // namespace uljam
