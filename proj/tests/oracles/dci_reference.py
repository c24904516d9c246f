#!/usr/bin/env python3
"""Independent reference for the uplink grant codec.

Re-implements payload serialization, CRC-16/CCITT-FALSE, the RNTI
scrambling LFSR and both encoding modes from the documented wire format
(docs/dci_format.md), with no code shared with the C++ implementation.
Regenerates tests/data/dci_golden.txt and prints the frozen constants
used by the unit tests.
"""

import random
import os

PAYLOAD_BITS = 24


def crc16_ccitt_false(data: bytes) -> int:
    crc = 0xFFFF
    for byte in data:
        crc ^= byte << 8
        for _ in range(8):
            if crc & 0x8000:
                crc = ((crc << 1) ^ 0x1021) & 0xFFFF
            else:
                crc = (crc << 1) & 0xFFFF
    return crc


def lfsr_sequence(rnti: int, n: int) -> list:
    state = rnti if rnti != 0 else 0xACE1
    out = []
    for _ in range(n):
        out.append(state & 1)
        bit = ((state >> 0) ^ (state >> 2) ^ (state >> 3) ^ (state >> 5)) & 1
        state = (state >> 1) | (bit << 15)
    return out


def serialize(rb_start, rb_len, mcs, ndi, harq):
    bits = []
    for value, width in ((rb_start, 7), (rb_len, 7), (mcs, 5), (ndi, 1), (harq, 3)):
        for i in range(width - 1, -1, -1):
            bits.append((value >> i) & 1)
    bits += [0] * (PAYLOAD_BITS - len(bits))
    return bits


def bits_to_bytes(bits):
    out = bytearray(len(bits) // 8)
    for i, b in enumerate(bits):
        if b:
            out[i // 8] |= 0x80 >> (i % 8)
    return bytes(out)


def encode(rb_start, rb_len, mcs, ndi, harq, rnti, full_scramble):
    payload = serialize(rb_start, rb_len, mcs, ndi, harq)
    crc = crc16_ccitt_false(bits_to_bytes(payload))
    masked = crc ^ rnti
    if full_scramble:
        seq = lfsr_sequence(rnti, PAYLOAD_BITS)
        payload = [p ^ s for p, s in zip(payload, seq)]
    bits = payload + [(masked >> i) & 1 for i in range(15, -1, -1)]
    return bits_to_bytes(bits).hex()


def main():
    rng = random.Random(20240117)
    here = os.path.dirname(os.path.abspath(__file__))
    out_path = os.path.join(here, "..", "data", "dci_golden.txt")
    os.makedirs(os.path.dirname(out_path), exist_ok=True)

    lines = ["# rb_start rb_len mcs ndi harq rnti mode bits_hex"]
    for i in range(100):
        rb_start = rng.randint(2, 97)
        rb_len = rng.randint(1, 98 - rb_start)
        mcs = rng.randint(0, 31)
        ndi = rng.randint(0, 1)
        harq = rng.randint(0, 7)
        rnti = rng.randint(0x003D, 0xFFF3)
        mode = "full_scramble" if i % 2 else "crc_mask_only"
        bits = encode(rb_start, rb_len, mcs, ndi, harq, rnti, mode == "full_scramble")
        lines.append(f"{rb_start} {rb_len} {mcs} {ndi} {harq} {rnti:#06x} {mode} {bits}")
    with open(out_path, "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {out_path}")

    # Frozen constants for the unit tests.
    seq = lfsr_sequence(0, 16)  # seed 0 remaps to 0xACE1
    print("lfsr seed 0xACE1 first 16 bits:", "".join(map(str, seq)))
    fixed = encode(10, 11, 7, 1, 2, 0x1234, False)
    print("encode(rb_start=10, rb_len=11, mcs=7, ndi=1, harq=2, rnti=0x1234, mask):", fixed)
    crc = crc16_ccitt_false(bytes([0x12, 0x34, 0x56]))
    print("crc16_ccitt_false(123456):", hex(crc))
    crc2 = crc16_ccitt_false(b"123456789")
    print("crc16_ccitt_false('123456789'):", hex(crc2))


if __name__ == "__main__":
    main()
