#include "uljam/dci.hpp"

#include <stdexcept>

namespace uljam {

bool dci_fields_valid(const UplinkDci& dci, const DciCodecConfig& cfg)
{
  if (dci.rb_len == 0 || dci.rb_start + dci.rb_len > cfg.total_rbs) {
    return false;
  }
  // Grants live in the PUSCH interior between the edge regions.
  if (dci.rb_start < cfg.pucch_edge_rbs ||
      dci.rb_start + dci.rb_len > cfg.total_rbs - cfg.pucch_edge_rbs) {
    return false;
  }
  if (dci.mcs_index > 31 || dci.ndi > 1 || dci.harq_id > 7) {
    return false;
  }
  return true;
}

BitVec rnti_sequence(Rnti rnti, size_t len)
{
  uint16_t lfsr = rnti.value != 0 ? rnti.value : 0xACE1;
  BitVec out;
  out.reserve(len);
  for (size_t i = 0; i < len; ++i) {
    out.push_back(static_cast<uint8_t>(lfsr & 1u));
    const uint16_t bit = static_cast<uint16_t>(
        ((lfsr >> 0) ^ (lfsr >> 2) ^ (lfsr >> 3) ^ (lfsr >> 5)) & 1u);
    lfsr = static_cast<uint16_t>((lfsr >> 1) | (bit << 15));
  }
  return out;
}

static BitVec serialize_payload(const UplinkDci& dci)
{
  BitVec bits;
  bits.reserve(DciCodecConfig::kPayloadBits);
  append_bits(bits, dci.rb_start, 7);
  append_bits(bits, dci.rb_len, 7);
  append_bits(bits, dci.mcs_index, 5);
  append_bits(bits, dci.ndi, 1);
  append_bits(bits, dci.harq_id, 3);
  while (bits.size() < DciCodecConfig::kPayloadBits) {
    bits.push_back(0);
  }
  return bits;
}

static UplinkDci deserialize_payload(const BitVec& bits)
{
  size_t pos = 0;
  UplinkDci dci;
  dci.rb_start = read_bits(bits, pos, 7);
  dci.rb_len = read_bits(bits, pos, 7);
  dci.mcs_index = read_bits(bits, pos, 5);
  dci.ndi = static_cast<uint8_t>(read_bits(bits, pos, 1));
  dci.harq_id = static_cast<uint8_t>(read_bits(bits, pos, 3));
  return dci;
}

EncodedDci encode_dci(const UplinkDci& dci, Rnti rnti, ScramblingMode mode,
                      const DciCodecConfig& cfg)
{
  if (!dci_fields_valid(dci, cfg)) {
    throw std::invalid_argument("encode_dci: dci violates grid invariants");
  }
  BitVec payload = serialize_payload(dci);
  const uint16_t crc = crc16_ccitt_false(bits_to_bytes(payload));
  const uint16_t masked = crc ^ rnti.value;

  if (mode == ScramblingMode::FullScramble) {
    const BitVec seq = rnti_sequence(rnti, payload.size());
    for (size_t i = 0; i < payload.size(); ++i) {
      payload[i] ^= seq[i];
    }
  }

  EncodedDci enc;
  enc.bits = std::move(payload);
  append_bits(enc.bits, masked, DciCodecConfig::kCrcBits);
  return enc;
}

DciDecodeResult decode_dci(const EncodedDci& enc, Rnti rnti, ScramblingMode mode,
                           const DciCodecConfig& cfg)
{
  DciDecodeResult res;
  if (enc.bits.size() != static_cast<size_t>(DciCodecConfig::kTotalBits)) {
    return res;
  }
  BitVec payload(enc.bits.begin(), enc.bits.begin() + DciCodecConfig::kPayloadBits);
  if (mode == ScramblingMode::FullScramble) {
    const BitVec seq = rnti_sequence(rnti, payload.size());
    for (size_t i = 0; i < payload.size(); ++i) {
      payload[i] ^= seq[i];
    }
  }
  size_t pos = DciCodecConfig::kPayloadBits;
  const uint16_t masked = static_cast<uint16_t>(read_bits(enc.bits, pos, DciCodecConfig::kCrcBits));
  const uint16_t crc = crc16_ccitt_false(bits_to_bytes(payload));
  if (static_cast<uint16_t>(masked ^ rnti.value) != crc) {
    res.status = DciDecodeStatus::BadCrc;
    return res;
  }
  const UplinkDci dci = deserialize_payload(payload);
  if (!dci_fields_valid(dci, cfg)) {
    // CRC false positive producing nonsense fields; a real receiver
    // discards these silently.
    res.status = DciDecodeStatus::InvalidFields;
    return res;
  }
  res.status = DciDecodeStatus::Ok;
  res.dci = dci;
  return res;
}

std::vector<std::pair<Rnti, UplinkDci>> blind_decode(const std::vector<EncodedDci>& enc_list,
                                                     const std::vector<Rnti>& candidates,
                                                     ScramblingMode mode,
                                                     const DciCodecConfig& cfg)
{
  std::vector<std::pair<Rnti, UplinkDci>> matches;
  for (const EncodedDci& enc : enc_list) {
    for (const Rnti cand : candidates) {
      const DciDecodeResult res = decode_dci(enc, cand, mode, cfg);
      if (res.ok()) {
        matches.emplace_back(cand, res.dci);
      }
    }
  }
  return matches;
}

} // namespace uljam
