#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace uljam {

/// Bit vector, MSB-first ordering: bit 0 of the vector is the most
/// significant bit of the first encoded field.
using BitVec = std::vector<uint8_t>;

/// Packs an integer value into `bits` MSB-first, appending to `out`.
inline void append_bits(BitVec& out, uint32_t value, int bits)
{
  for (int i = bits - 1; i >= 0; --i) {
    out.push_back(static_cast<uint8_t>((value >> i) & 1u));
  }
}

/// Reads `bits` MSB-first starting at `pos`, advancing `pos`.
inline uint32_t read_bits(const BitVec& in, size_t& pos, int bits)
{
  uint32_t v = 0;
  for (int i = 0; i < bits; ++i) {
    v = (v << 1) | in[pos++];
  }
  return v;
}

/// Packs a bit vector into bytes, MSB-first within each byte. The bit
/// count must be a multiple of 8.
inline std::vector<uint8_t> bits_to_bytes(const BitVec& bits)
{
  std::vector<uint8_t> out(bits.size() / 8, 0);
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) {
      out[i / 8] |= static_cast<uint8_t>(0x80u >> (i % 8));
    }
  }
  return out;
}

/// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no
/// final XOR.
inline uint16_t crc16_ccitt_false(const std::vector<uint8_t>& data)
{
  uint16_t crc = 0xFFFF;
  for (uint8_t byte : data) {
    crc ^= static_cast<uint16_t>(byte) << 8;
    for (int i = 0; i < 8; ++i) {
      if (crc & 0x8000) {
        crc = static_cast<uint16_t>((crc << 1) ^ 0x1021);
      } else {
        crc = static_cast<uint16_t>(crc << 1);
      }
    }
  }
  return crc;
}

inline std::string bits_to_hex(const BitVec& bits)
{
  static const char* digits = "0123456789abcdef";
  const auto bytes = bits_to_bytes(bits);
  std::string s;
  s.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xF]);
  }
  return s;
}

} // namespace uljam
