#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "uljam/bits.hpp"

namespace uljam {

/// 16-bit connection identifier. Values outside [0x003D, 0xFFF3] are
/// reserved and never assigned to connections.
struct Rnti {
  uint16_t value = 0;

  static constexpr uint16_t kMin = 0x003D;
  static constexpr uint16_t kMax = 0xFFF3;

  auto operator<=>(const Rnti&) const = default;
};

enum class ScramblingMode : uint8_t {
  CrcMaskOnly,   // CRC XOR-masked with the RNTI (LTE behaviour)
  FullScramble,  // payload additionally XORed with an RNTI-derived sequence
};

/// Uplink grant content as carried on the control channel.
struct UplinkDci {
  uint32_t rb_start = 0;
  uint32_t rb_len = 0;
  uint32_t mcs_index = 0;
  uint8_t ndi = 1;      // new-data indicator
  uint8_t harq_id = 0;  // [0, 7]

  bool operator==(const UplinkDci&) const = default;
};

/// Payload bits plus 16 masked CRC bits.
struct EncodedDci {
  BitVec bits;
};

/// Fixed payload layout: rb_start(7) rb_len(7) mcs(5) ndi(1) harq(3),
/// zero-padded to kPayloadBits. Documented in docs/dci_format.md.
struct DciCodecConfig {
  uint32_t total_rbs = 100;
  uint32_t pucch_edge_rbs = 2;

  static constexpr int kPayloadBits = 24;
  static constexpr int kCrcBits = 16;
  static constexpr int kTotalBits = kPayloadBits + kCrcBits;
};

/// Validity against the grid: in-range fields and no overlap with the
/// PUCCH edge regions.
bool dci_fields_valid(const UplinkDci& dci, const DciCodecConfig& cfg);

/// Pseudo-random scrambling sequence: 16-bit Fibonacci LFSR, taps at
/// bit positions 16, 14, 13, 11; output is the pre-shift LSB. Seeded
/// with the RNTI; seed 0 is remapped to 0xACE1.
BitVec rnti_sequence(Rnti rnti, size_t len);

EncodedDci encode_dci(const UplinkDci& dci, Rnti rnti, ScramblingMode mode,
                      const DciCodecConfig& cfg = {});

enum class DciDecodeStatus : uint8_t {
  Ok,
  BadCrc,
  InvalidFields,  // CRC verified but fields fail grid sanity checks
};

struct DciDecodeResult {
  DciDecodeStatus status = DciDecodeStatus::BadCrc;
  UplinkDci dci{};

  bool ok() const { return status == DciDecodeStatus::Ok; }
  /// True whenever the unmasked CRC verified, even if the payload was
  /// then discarded by the field sanity check. Used by the
  /// false-positive rate measurements.
  bool crc_passed() const { return status != DciDecodeStatus::BadCrc; }
};

DciDecodeResult decode_dci(const EncodedDci& enc, Rnti rnti, ScramblingMode mode,
                           const DciCodecConfig& cfg = {});

/// Tries every candidate RNTI against every encoded DCI, in input
/// order. Lets a receiver or an eavesdropper recover grants without
/// knowing which RNTI a DCI was addressed to.
std::vector<std::pair<Rnti, UplinkDci>> blind_decode(const std::vector<EncodedDci>& enc_list,
                                                     const std::vector<Rnti>& candidates,
                                                     ScramblingMode mode,
                                                     const DciCodecConfig& cfg = {});

} // namespace uljam
